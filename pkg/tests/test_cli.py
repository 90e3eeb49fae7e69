import json

import numpy as np
import pytest

from stormclust import save_metrics
from stormclust.cli import main, parse_config_file
from stormclust.errors import SchemaError
from stormclust.events import EventMetricsTable, load_events


@pytest.fixture(scope="module")
def events_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthdata")
    code = main(["synth", "--events-per-type", "2", "--seed", "3", "--out", str(out)])
    assert code == 0
    return out / "events.csv"


@pytest.fixture(scope="module")
def cluster_dir(tmp_path_factory, events_csv):
    out = tmp_path_factory.mktemp("clusterrun")
    code = main(
        [
            "cluster",
            str(events_csv),
            "--k",
            "4",
            "--restarts",
            "2",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    return out


def test_synth_outputs_and_manifest(events_csv):
    assert events_csv.exists()
    manifest = json.loads((events_csv.parent / "synth_manifest.json").read_text())
    assert manifest["command"] == "synth"
    assert manifest["config"]["seed"] == 3
    assert manifest["config"]["events_per_type"] == 2
    assert manifest["outputs"] == ["events.csv"]
    assert len(load_events(events_csv)) == 32


def test_synth_rerun_is_byte_identical(events_csv, tmp_path):
    code = main(["synth", "--events-per-type", "2", "--seed", "3", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "events.csv").read_bytes() == events_csv.read_bytes()


def test_preprocess_command(events_csv, tmp_path):
    code = main(["preprocess", str(events_csv), "--out", str(tmp_path)])
    assert code == 0
    processed = load_events(tmp_path / "processed.csv")
    assert len(processed) == 32
    for ev in processed:
        assert len(ev) == 50
        assert ev.discharge.max() <= 1.0


def test_cluster_outputs(cluster_dir):
    doc = json.loads((cluster_dir / "clustering.json").read_text())
    assert doc["k"] == 4
    assert len(doc["medoid_event_ids"]) == 4
    assert len(doc["assignments"]) == 32
    lines = (cluster_dir / "memberships.csv").read_text().splitlines()
    assert lines[0] == "event_id,cluster,is_medoid"
    assert len(lines) == 33
    medoid_rows = [ln for ln in lines[1:] if ln.endswith(",1")]
    assert len(medoid_rows) == 4
    manifest = json.loads((cluster_dir / "cluster_manifest.json").read_text())
    assert "distances.csv" not in manifest["outputs"]


def test_cluster_rerun_is_byte_identical(events_csv, cluster_dir, tmp_path):
    code = main(
        ["cluster", str(events_csv), "--k", "4", "--restarts", "2", "--out", str(tmp_path)]
    )
    assert code == 0
    assert (tmp_path / "clustering.json").read_bytes() == (
        cluster_dir / "clustering.json"
    ).read_bytes()


def test_cluster_save_distances(events_csv, tmp_path):
    code = main(
        [
            "cluster",
            str(events_csv),
            "--k",
            "2",
            "--restarts",
            "1",
            "--save-distances",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 0
    lines = (tmp_path / "distances.csv").read_text().splitlines()
    assert len(lines) == 33
    assert lines[0].startswith("event_id,synth-00,")


def test_cluster_requires_k(events_csv, tmp_path, capsys):
    code = main(["cluster", str(events_csv), "--out", str(tmp_path)])
    assert code == 1
    assert "k" in capsys.readouterr().err


def test_cluster_missing_input_exits_2(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    code = main(["cluster", str(missing), "--k", "2", "--out", str(tmp_path)])
    assert code == 2
    assert str(missing) in capsys.readouterr().err


def test_elbow_command(events_csv, tmp_path):
    code = main(
        [
            "elbow",
            str(events_csv),
            "--k-min",
            "2",
            "--k-max",
            "8",
            "--restarts",
            "2",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 0
    lines = (tmp_path / "elbow.csv").read_text().splitlines()
    assert lines[0] == "k,sse"
    assert len(lines) == 8
    report = json.loads((tmp_path / "elbow_report.json").read_text())
    assert report["k_min"] == 2
    assert report["k_max"] == 8
    assert report["seeds_per_k"] == 2
    assert report["knee"] is None or 2 <= report["knee"] <= 8
    svg = (tmp_path / "elbow.svg").read_text()
    assert svg.lstrip().startswith("<?xml")


def test_elbow_no_plots(events_csv, tmp_path):
    code = main(
        [
            "elbow",
            str(events_csv),
            "--k-min",
            "2",
            "--k-max",
            "4",
            "--restarts",
            "1",
            "--no-plots",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 0
    assert not (tmp_path / "elbow.svg").exists()
    manifest = json.loads((tmp_path / "elbow_manifest.json").read_text())
    assert "elbow.svg" not in manifest["outputs"]


def test_elbow_range_too_small_exits_1(events_csv, tmp_path, capsys):
    code = main(
        [
            "elbow",
            str(events_csv),
            "--k-min",
            "2",
            "--k-max",
            "3",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 1
    assert "at least 3" in capsys.readouterr().err


def test_hopkins_command(events_csv, tmp_path):
    code = main(["hopkins", str(events_csv), "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "hopkins.json").read_text())
    assert 0.0 <= doc["statistic"] <= 1.0
    assert doc["statistic"] > 0.8
    assert doc["n_events"] == 32
    assert doc["repetitions"] == 10


def test_evaluate_with_labels(events_csv, cluster_dir, tmp_path):
    code = main(
        [
            "evaluate",
            str(events_csv),
            "--clustering",
            str(cluster_dir / "clustering.json"),
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 0
    doc = json.loads((tmp_path / "evaluation.json").read_text())
    assert 0.0 <= doc["rand_index"] <= 1.0
    assert 0.0 <= doc["homogeneity"] <= 1.0
    assert 0.0 <= doc["completeness"] <= 1.0
    assert doc["k"] == 4
    table = (tmp_path / "contingency_label.csv").read_text().splitlines()
    # 4 cluster rows plus header and totals
    assert len(table) == 6
    assert table[0].startswith("cluster,")
    assert table[-1].startswith("total,")
    assert "label" in doc["chi_squared"]


def test_evaluate_without_labels_notes_skip(events_csv, cluster_dir, tmp_path, capsys):
    events = load_events(events_csv)
    stripped = tmp_path / "unlabeled.csv"
    lines = events_csv.read_text().splitlines()
    header = lines[0].split(",")
    keep = [i for i, name in enumerate(header) if name != "label"]
    rows = [",".join(ln.split(",")[i] for i in keep) for ln in lines]
    stripped.write_text("\n".join(rows) + "\n")
    out = tmp_path / "run"
    code = main(
        [
            "evaluate",
            str(stripped),
            "--clustering",
            str(cluster_dir / "clustering.json"),
            "--out",
            str(out),
        ]
    )
    assert code == 0
    doc = json.loads((out / "evaluation.json").read_text())
    assert doc["rand_index"] is None
    assert any("skipped" in note for note in doc["notes"])
    assert "skipped" in capsys.readouterr().out
    assert not (out / "contingency_label.csv").exists()
    assert len(events) == 32


def test_evaluate_with_metrics(events_csv, cluster_dir, tmp_path):
    events = load_events(events_csv)
    gen = np.random.default_rng(5)
    table = EventMetricsTable(
        event_ids=events.event_ids,
        numeric={
            "P": gen.uniform(1.0, 30.0, len(events)),
            "FI": gen.uniform(0.0, 1.0, len(events)),
        },
        categorical={
            "hysteresis_class": [
                ("clockwise" if i % 2 == 0 else "anticlockwise")
                for i in range(len(events))
            ]
        },
    )
    metrics_csv = tmp_path / "metrics.csv"
    save_metrics(table, metrics_csv)
    out = tmp_path / "run"
    code = main(
        [
            "evaluate",
            str(events_csv),
            "--clustering",
            str(cluster_dir / "clustering.json"),
            "--metrics",
            str(metrics_csv),
            "--out",
            str(out),
        ]
    )
    assert code == 0
    anova = (out / "anova.csv").read_text().splitlines()
    assert anova[0].split(",")[0] == "metric"
    assert "f_cluster" in anova[0]
    assert "f_hysteresis_class" in anova[0]
    assert len(anova) == 3
    zscores = (out / "zscores.csv").read_text().splitlines()
    assert zscores[0] == "metric,cluster_0,cluster_1,cluster_2,cluster_3"
    assert len(zscores) == 3
    for cluster in range(4):
        assert (out / f"zscores_cluster_{cluster}.svg").exists()
    assert (out / "contingency_hysteresis_class.csv").exists()
    doc = json.loads((out / "evaluation.json").read_text())
    assert "hysteresis_class" in doc["chi_squared"]


def test_evaluate_requires_clustering(events_csv, tmp_path):
    code = main(["evaluate", str(events_csv), "--out", str(tmp_path)])
    assert code == 1


def test_config_file_and_flag_precedence(events_csv, tmp_path):
    config = tmp_path / "run.conf"
    config.write_text(
        "# clustering run\n"
        "k = 4\n"
        "restarts = 2\n"
        "seed = 5\n"
    )
    out1 = tmp_path / "from-config"
    code = main(
        ["cluster", str(events_csv), "--config", str(config), "--out", str(out1)]
    )
    assert code == 0
    manifest = json.loads((out1 / "cluster_manifest.json").read_text())
    assert manifest["config"]["k"] == 4
    assert manifest["config"]["seed"] == 5
    out2 = tmp_path / "flag-wins"
    code = main(
        [
            "cluster",
            str(events_csv),
            "--config",
            str(config),
            "--seed",
            "7",
            "--out",
            str(out2),
        ]
    )
    assert code == 0
    manifest = json.loads((out2 / "cluster_manifest.json").read_text())
    assert manifest["config"]["seed"] == 7
    assert manifest["config"]["k"] == 4


def test_config_file_unknown_key_exits_2(events_csv, tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("mystery = 1\n")
    code = main(
        ["cluster", str(events_csv), "--config", str(config), "--out", str(tmp_path)]
    )
    assert code == 2
    assert "mystery" in capsys.readouterr().err


def test_config_file_bad_value_exits_2(events_csv, tmp_path):
    config = tmp_path / "bad.conf"
    config.write_text("k = lots\n")
    code = main(
        ["cluster", str(events_csv), "--config", str(config), "--out", str(tmp_path)]
    )
    assert code == 2


def test_parse_config_file(tmp_path):
    config = tmp_path / "a.conf"
    config.write_text(
        "# comment\n"
        "\n"
        "window-fraction = 0.2\n"
        "variant = 'independent'\n"
    )
    opts = parse_config_file(config)
    assert opts == {"window_fraction": "0.2", "variant": "independent"}
    config.write_text("novalue\n")
    with pytest.raises(SchemaError):
        parse_config_file(config)


def test_invalid_events_schema_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("event_id,site_id\naa,s\n")
    code = main(["hopkins", str(bad), "--out", str(tmp_path)])
    assert code == 2
    assert "missing column" in capsys.readouterr().err
