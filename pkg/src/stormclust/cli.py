"""Command-line interface wiring ingestion, preprocessing, distances,
clustering, model selection, and evaluation into reproducible runs.

Each subcommand merges its built-in defaults with an optional key = value
config file and explicit flags (flags win), writes its outputs plus a
manifest JSON recording the effective configuration, and is fully
deterministic given that manifest. Exit codes: 0 success, 1 validation
or computation error, 2 I/O or schema error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

from .distance import DtwConfig, distance_matrix, save_distance_matrix
from .errors import SchemaError, ValidationError
from .evaluation import (
    ContingencyTable,
    anova_oneway,
    attach_clusters,
    chi_squared_independence,
    homogeneity_completeness,
    rand_index,
    zscore_profiles,
)
from .events import (
    load_clustering,
    load_events,
    load_metrics,
    save_clustering,
    save_events,
)
from .kmedoids import kmedoids_restarts
from .model_selection import elbow_curve, find_knee, hopkins_statistic
from .preprocess import PreprocessConfig, SmoothingConfig, preprocess_dataset
from .synthetic import SynthConfig, generate_dataset

log = logging.getLogger(__name__)

_PREPROCESS_DEFAULTS = {
    "smoothing_order": 3,
    "smoothing_window": 21,
    "target_length": 50,
    "normalize": True,
}

_DTW_DEFAULTS = {
    "window_fraction": 0.10,
    "variant": "dependent",
}

_DEFAULTS: dict[str, dict] = {
    "synth": {
        "out": ".",
        "seed": 42,
        "events_per_type": 50,
        "raw_length": 100,
        "noise_std": 0.05,
        "noise_mean": 0.0,
    },
    "preprocess": {
        "out": ".",
        "input": None,
        **_PREPROCESS_DEFAULTS,
    },
    "cluster": {
        "out": ".",
        "input": None,
        "k": None,
        "restarts": 10,
        "seed": 0,
        "max_iter": 100,
        "save_distances": False,
        **_DTW_DEFAULTS,
        **_PREPROCESS_DEFAULTS,
    },
    "elbow": {
        "out": ".",
        "input": None,
        "k_min": 2,
        "k_max": 24,
        "restarts": 10,
        "seed": 0,
        "max_iter": 100,
        "sensitivity": 1.0,
        "emit_plots": True,
        **_DTW_DEFAULTS,
        **_PREPROCESS_DEFAULTS,
    },
    "hopkins": {
        "out": ".",
        "input": None,
        "sample_fraction": 0.1,
        "repetitions": 10,
        "seed": 0,
        **_PREPROCESS_DEFAULTS,
    },
    "evaluate": {
        "out": ".",
        "input": None,
        "clustering": None,
        "metrics": None,
        "emit_plots": True,
    },
}

# types for keys whose default is None
_CONFIG_TYPES = {"input": str, "k": int, "clustering": str, "metrics": str}

_TRUE_WORDS = frozenset({"true", "yes", "on", "1"})
_FALSE_WORDS = frozenset({"false", "no", "off", "0"})


def parse_config_file(path) -> dict[str, str]:
    """Read a key = value config file into a string dict.

    Blank lines and lines starting with # are skipped; values may be
    quoted; dashes in keys normalize to underscores.
    """
    options: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SchemaError(f"{path}: line {lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
                value = value[1:-1]
            if not key:
                raise SchemaError(f"{path}: line {lineno}: empty key")
            options[key] = value
    return options


def _coerce(path, key: str, raw: str, default):
    target = type(default) if default is not None else _CONFIG_TYPES.get(key, str)
    if target is bool:
        word = raw.lower()
        if word in _TRUE_WORDS:
            return True
        if word in _FALSE_WORDS:
            return False
        raise SchemaError(f"{path}: option '{key}' expects a boolean, got '{raw}'")
    try:
        return target(raw)
    except ValueError:
        raise SchemaError(
            f"{path}: option '{key}' expects {target.__name__}, got '{raw}'"
        ) from None


def _effective_config(args: argparse.Namespace) -> dict:
    conf = dict(_DEFAULTS[args.command])
    if getattr(args, "config", None):
        for key, raw in parse_config_file(args.config).items():
            if key not in conf:
                raise SchemaError(
                    f"{args.config}: unknown option '{key}' for command '{args.command}'"
                )
            conf[key] = _coerce(args.config, key, raw, _DEFAULTS[args.command][key])
    for key in conf:
        value = getattr(args, key, None)
        if value is not None:
            conf[key] = value
    return conf


def _write_manifest(out_dir: Path, command: str, conf: dict, outputs: list[str]) -> Path:
    path = out_dir / f"{command}_manifest.json"
    doc = {"command": command, "config": conf, "outputs": outputs}
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    return path


def _require_input(conf: dict):
    if not conf["input"]:
        raise ValidationError(
            "no input dataset given (positional argument or config key 'input')"
        )
    return load_events(conf["input"])


def _preprocess_config(conf: dict) -> PreprocessConfig:
    return PreprocessConfig(
        smoothing=SmoothingConfig(
            order=conf["smoothing_order"], window=conf["smoothing_window"]
        ),
        target_length=conf["target_length"],
        normalize=conf["normalize"],
    )


def _processed_dataset(conf: dict):
    return preprocess_dataset(_require_input(conf), _preprocess_config(conf))


def _significance(p: float) -> str:
    if p < 0.0001:
        return "***"
    if p < 0.001:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def cmd_synth(conf: dict, out: Path) -> list[str]:
    config = SynthConfig(
        events_per_type=conf["events_per_type"],
        raw_length=conf["raw_length"],
        noise_std=conf["noise_std"],
        noise_mean=conf["noise_mean"],
        seed=conf["seed"],
    )
    dataset = generate_dataset(config)
    path = out / "events.csv"
    save_events(dataset, path)
    print(f"wrote {len(dataset)} synthetic events to {path}")
    return ["events.csv"]


def cmd_preprocess(conf: dict, out: Path) -> list[str]:
    processed = _processed_dataset(conf)
    path = out / "processed.csv"
    save_events(processed, path)
    print(f"wrote {len(processed)} processed events to {path}")
    return ["processed.csv"]


def cmd_cluster(conf: dict, out: Path) -> list[str]:
    if conf["k"] is None:
        raise ValidationError("no cluster count given (flag --k or config key 'k')")
    processed = _processed_dataset(conf)
    matrix = distance_matrix(
        processed,
        DtwConfig(window_fraction=conf["window_fraction"], variant=conf["variant"]),
    )
    seeds = range(conf["seed"], conf["seed"] + conf["restarts"])
    best = kmedoids_restarts(matrix, conf["k"], seeds, conf["max_iter"])
    outputs = ["clustering.json", "memberships.csv"]
    save_clustering(best, processed, out / "clustering.json")
    medoid_set = set(int(m) for m in best.medoids)
    with open(out / "memberships.csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["event_id", "cluster", "is_medoid"])
        for i, event_id in enumerate(processed.event_ids):
            writer.writerow([event_id, int(best.assignments[i]), int(i in medoid_set)])
    if conf["save_distances"]:
        save_distance_matrix(matrix, out / "distances.csv", processed.event_ids)
        outputs.append("distances.csv")
    print(
        f"k={best.k} cost={best.cost:.6g} sse={best.sse:.6g} "
        f"iterations={best.iterations} seed={best.seed}"
    )
    return outputs


def cmd_elbow(conf: dict, out: Path) -> list[str]:
    if conf["k_max"] - conf["k_min"] + 1 < 3:
        raise ValidationError(
            "k range must contain at least 3 values for knee detection"
        )
    processed = _processed_dataset(conf)
    matrix = distance_matrix(
        processed,
        DtwConfig(window_fraction=conf["window_fraction"], variant=conf["variant"]),
    )
    seeds = range(conf["seed"], conf["seed"] + conf["restarts"])
    curve = elbow_curve(
        matrix, range(conf["k_min"], conf["k_max"] + 1), seeds, conf["max_iter"]
    )
    knee = find_knee(curve, conf["sensitivity"])
    outputs = ["elbow.csv", "elbow_report.json"]
    with open(out / "elbow.csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["k", "sse"])
        for k, sse in zip(curve.ks, curve.sse):
            writer.writerow([int(k), repr(float(sse))])
    report = {
        "knee": knee,
        "sensitivity": conf["sensitivity"],
        "k_min": conf["k_min"],
        "k_max": conf["k_max"],
        "seeds_per_k": curve.seeds_per_k,
    }
    with open(out / "elbow_report.json", "w", encoding="utf-8", newline="") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    if conf["emit_plots"]:
        from .plots import save_elbow_plot

        save_elbow_plot(curve, knee, out / "elbow.svg")
        outputs.append("elbow.svg")
    print(f"knee: {knee if knee is not None else 'not detected'}")
    return outputs


def cmd_hopkins(conf: dict, out: Path) -> list[str]:
    processed = _processed_dataset(conf)
    statistic = hopkins_statistic(
        processed,
        sample_fraction=conf["sample_fraction"],
        seed=conf["seed"],
        repetitions=conf["repetitions"],
    )
    doc = {
        "statistic": statistic,
        "sample_fraction": conf["sample_fraction"],
        "repetitions": conf["repetitions"],
        "seed": conf["seed"],
        "n_events": len(processed),
    }
    with open(out / "hopkins.json", "w", encoding="utf-8", newline="") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    print(f"hopkins statistic: {statistic:.4f}")
    return ["hopkins.json"]


def _write_contingency(table: ContingencyTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["cluster"] + list(table.col_labels) + ["total"])
        for i, row_label in enumerate(table.row_labels):
            counts = [int(v) for v in table.counts[i]]
            writer.writerow([row_label] + counts + [int(table.row_totals[i])])
        writer.writerow(
            ["total"] + [int(v) for v in table.col_totals] + [table.n]
        )


def cmd_evaluate(conf: dict, out: Path) -> list[str]:
    if not conf["clustering"]:
        raise ValidationError(
            "no clustering document given (flag --clustering or config key 'clustering')"
        )
    doc = load_clustering(conf["clustering"])
    dataset = _require_input(conf)
    assignments = doc["assignments"]
    predicted: list[int] = []
    for event_id in dataset.event_ids:
        if event_id not in assignments:
            raise ValidationError(
                f"event_id '{event_id}' missing from the clustering assignments"
            )
        predicted.append(int(assignments[event_id]))

    outputs: list[str] = ["evaluation.json"]
    notes: list[str] = []
    results: dict = {
        "clustering": str(conf["clustering"]),
        "k": int(doc["k"]),
        "n_events": len(dataset),
        "rand_index": None,
        "homogeneity": None,
        "completeness": None,
        "chi_squared": {},
        "notes": notes,
    }

    labels = dataset.labels
    labeled = [i for i, lab in enumerate(labels) if lab is not None]
    if len(labeled) >= 2:
        truth = [labels[i] for i in labeled]
        pred = [predicted[i] for i in labeled]
        results["rand_index"] = rand_index(truth, pred)
        h, c = homogeneity_completeness(truth, pred)
        results["homogeneity"] = h
        results["completeness"] = c
        table = ContingencyTable.from_labels(pred, truth)
        _write_contingency(table, out / "contingency_label.csv")
        outputs.append("contingency_label.csv")
        try:
            stat, p, df = chi_squared_independence(table)
            results["chi_squared"]["label"] = {
                "statistic": stat,
                "p_value": p,
                "df": df,
            }
        except ValidationError as exc:
            notes.append(f"chi-squared vs label skipped: {exc}")
    else:
        notes.append("no ground-truth labels; external metrics skipped")

    if conf["metrics"]:
        metrics = load_metrics(conf["metrics"])
        attach_clusters(metrics, assignments)
        cluster_col = metrics.group_column("cluster")

        for grouping in ("site", "hysteresis_class"):
            if grouping not in metrics.categorical:
                continue
            pairs = [
                (c, g)
                for c, g in zip(cluster_col, metrics.categorical[grouping])
                if c is not None and g is not None
            ]
            if not pairs:
                notes.append(f"no rows with both cluster and {grouping}; skipped")
                continue
            table = ContingencyTable.from_labels(
                [p[0] for p in pairs], [p[1] for p in pairs]
            )
            name = f"contingency_{grouping}.csv"
            _write_contingency(table, out / name)
            outputs.append(name)
            try:
                stat, p, df = chi_squared_independence(table)
                results["chi_squared"][grouping] = {
                    "statistic": stat,
                    "p_value": p,
                    "df": df,
                }
            except ValidationError as exc:
                notes.append(f"chi-squared vs {grouping} skipped: {exc}")

        groupings = ["cluster"] + [
            g for g in ("hysteresis_class",) if g in metrics.categorical
        ]
        anova_rows: dict[str, dict[str, object]] = {}
        for grouping in groupings:
            for metric in metrics.metric_names():
                try:
                    result = anova_oneway(metrics, metric, grouping)
                except ValidationError as exc:
                    log.warning("ANOVA %s by %s skipped: %s", metric, grouping, exc)
                    continue
                row = anova_rows.setdefault(metric, {"metric": metric})
                row[f"f_{grouping}"] = result.f_value
                row[f"p_{grouping}"] = result.p_value
                row[f"significance_{grouping}"] = _significance(result.p_value)
        if anova_rows:
            header = ["metric"]
            for grouping in groupings:
                header += [f"f_{grouping}", f"p_{grouping}", f"significance_{grouping}"]
            with open(out / "anova.csv", "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                for metric in metrics.metric_names():
                    if metric not in anova_rows:
                        continue
                    row = anova_rows[metric]
                    cells: list = [metric]
                    for grouping in groupings:
                        f_val = row.get(f"f_{grouping}")
                        p_val = row.get(f"p_{grouping}")
                        cells.append("" if f_val is None else _fmt_stat(f_val))
                        cells.append("" if p_val is None else _fmt_stat(p_val))
                        cells.append(row.get(f"significance_{grouping}", ""))
                    writer.writerow(cells)
            outputs.append("anova.csv")

        profiles = zscore_profiles(metrics, "cluster")
        with open(out / "zscores.csv", "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(
                ["metric"] + [f"cluster_{p.group}" for p in profiles]
            )
            for metric in metrics.metric_names():
                row = [metric]
                for profile in profiles:
                    z = profile.z.get(metric, math.nan)
                    row.append("" if math.isnan(z) else _fmt_stat(z))
                writer.writerow(row)
        outputs.append("zscores.csv")
        if conf["emit_plots"]:
            from .plots import save_zscore_plot

            for profile in profiles:
                name = f"zscores_cluster_{profile.group}.svg"
                save_zscore_plot(profile, out / name)
                outputs.append(name)

    with open(out / "evaluation.json", "w", encoding="utf-8", newline="") as f:
        json.dump(results, f, indent=2)
        f.write("\n")
    if results["rand_index"] is not None:
        print(
            f"rand={results['rand_index']:.4f} "
            f"homogeneity={results['homogeneity']:.4f} "
            f"completeness={results['completeness']:.4f}"
        )
    for note in notes:
        print(note)
    return outputs


def _fmt_stat(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return repr(round(float(value), 12))


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key = value config file")
    sub.add_argument("--out", help="output directory (default .)")


def _add_preprocess_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--smoothing-order", type=int, dest="smoothing_order")
    sub.add_argument("--smoothing-window", type=int, dest="smoothing_window")
    sub.add_argument("--target-length", type=int, dest="target_length")
    sub.add_argument(
        "--no-normalize", dest="normalize", action="store_false", default=None
    )


def _add_dtw_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--window-fraction", type=float, dest="window_fraction")
    sub.add_argument(
        "--variant", choices=("dependent", "independent", "euclidean")
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stormclust",
        description="Cluster storm-event discharge/concentration series "
        "with window-constrained DTW and K-medoids.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("synth", help="generate the labeled synthetic dataset")
    _add_common(sub)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--events-per-type", type=int, dest="events_per_type")
    sub.add_argument("--raw-length", type=int, dest="raw_length")
    sub.add_argument("--noise-std", type=float, dest="noise_std")
    sub.add_argument("--noise-mean", type=float, dest="noise_mean")
    sub.set_defaults(handler=cmd_synth)

    sub = subs.add_parser("preprocess", help="smooth, resample, and normalize events")
    _add_common(sub)
    sub.add_argument("input", nargs="?", help="long CSV of raw events")
    _add_preprocess_flags(sub)
    sub.set_defaults(handler=cmd_preprocess)

    sub = subs.add_parser("cluster", help="preprocess, build distances, run K-medoids")
    _add_common(sub)
    sub.add_argument("input", nargs="?", help="long CSV of raw events")
    sub.add_argument("--k", type=int)
    sub.add_argument("--restarts", type=int)
    sub.add_argument("--seed", type=int, help="first restart seed")
    sub.add_argument("--max-iter", type=int, dest="max_iter")
    sub.add_argument(
        "--save-distances", dest="save_distances", action="store_true", default=None
    )
    _add_dtw_flags(sub)
    _add_preprocess_flags(sub)
    sub.set_defaults(handler=cmd_cluster)

    sub = subs.add_parser("elbow", help="SSE curve over a k range plus knee detection")
    _add_common(sub)
    sub.add_argument("input", nargs="?", help="long CSV of raw events")
    sub.add_argument("--k-min", type=int, dest="k_min")
    sub.add_argument("--k-max", type=int, dest="k_max")
    sub.add_argument("--restarts", type=int)
    sub.add_argument("--seed", type=int, help="first restart seed")
    sub.add_argument("--max-iter", type=int, dest="max_iter")
    sub.add_argument("--sensitivity", type=float)
    sub.add_argument(
        "--no-plots", dest="emit_plots", action="store_false", default=None
    )
    _add_dtw_flags(sub)
    _add_preprocess_flags(sub)
    sub.set_defaults(handler=cmd_elbow)

    sub = subs.add_parser("hopkins", help="clusterability statistic of a dataset")
    _add_common(sub)
    sub.add_argument("input", nargs="?", help="long CSV of raw events")
    sub.add_argument("--sample-fraction", type=float, dest="sample_fraction")
    sub.add_argument("--repetitions", type=int)
    sub.add_argument("--seed", type=int)
    _add_preprocess_flags(sub)
    sub.set_defaults(handler=cmd_hopkins)

    sub = subs.add_parser("evaluate", help="score a clustering and write reports")
    _add_common(sub)
    sub.add_argument("input", nargs="?", help="long CSV the clustering was built from")
    sub.add_argument("--clustering", help="clustering JSON document")
    sub.add_argument("--metrics", help="per-event metrics CSV")
    sub.add_argument(
        "--no-plots", dest="emit_plots", action="store_false", default=None
    )
    sub.set_defaults(handler=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        conf = _effective_config(args)
        out = Path(conf["out"])
        out.mkdir(parents=True, exist_ok=True)
        outputs = args.handler(conf, out)
        _write_manifest(out, args.command, conf, outputs)
    except ValidationError as exc:
        log.error("%s", exc)
        return 1
    except SchemaError as exc:
        log.error("%s", exc)
        return 2
    except OSError as exc:
        log.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
