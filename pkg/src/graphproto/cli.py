"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 no cluster discovered.
Options may also come from ``--config file.json`` (keys are option names with
dashes or underscores); explicit flags win over the file.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .datasets import DataError, load_dataset, parse_tudataset, prepare_glad, save_dataset
from .detect import ZeroClusterError, result_from_json
from .experiment import Params, derive_seed, fit_and_embed, run_detection, run_experiment
from .explain import explain_pair
from .export import export_scored_graph
from .ik import IkModel
from .synthetic import SyntheticConfig, gen_synthetic

log = logging.getLogger("graphproto")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NO_CLUSTER = 0, 1, 2, 3

DEFAULTS = {
    "psi": 16, "t": 100, "h": 2, "mode": "final", "tau": None, "tau_quantile": 0.85,
    "rho": 0.1, "seed": 0, "seeds": 5, "attr_mode": None,
    "num_normal": 500, "num_anomalous": 25, "base_kinds": "tree,wheel,ladder",
    "size_min": 8, "size_max": 12, "cycle_size": 5, "noise": 0.05,
    "ratio": 0.1, "anomalous_class": None, "model": None, "model_out": None,
    "synthetic": False, "fmt": "dot", "dot_prefix": None, "dataset": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _model_flags(p):
    p.add_argument("--psi", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--mode", choices=["final", "concat"])
    p.add_argument("--tau", type=float)
    p.add_argument("--tau-quantile", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--seed", type=int)


def _synth_flags(p):
    p.add_argument("--num-normal", type=int)
    p.add_argument("--num-anomalous", type=int)
    p.add_argument("--base-kinds")
    p.add_argument("--size-min", type=int)
    p.add_argument("--size-max", type=int)
    p.add_argument("--cycle-size", type=int)
    p.add_argument("--noise", type=float)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="graphproto", argument_default=argparse.SUPPRESS,
                 description="Prototype-based graph-level anomaly detection")
    ap.add_argument("--config", help="JSON file with option defaults")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", parser_class=_Parser)

    p = sub.add_parser("synth", argument_default=argparse.SUPPRESS,
                       help="generate the synthetic motif benchmark")
    _synth_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("ingest", argument_default=argparse.SUPPRESS,
                       help="read a TUDataset directory")
    p.add_argument("directory")
    p.add_argument("name")
    p.add_argument("--attr-mode", choices=["raw_attributes", "one_hot_labels", "degree_scalar"])
    p.add_argument("--out", required=True)

    p = sub.add_parser("prep", argument_default=argparse.SUPPRESS,
                       help="downsample one class into anomalies")
    p.add_argument("dataset")
    p.add_argument("--anomalous-class", type=int, required=True)
    p.add_argument("--ratio", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("detect", argument_default=argparse.SUPPRESS,
                       help="embed and detect; writes the detection result")
    p.add_argument("dataset")
    _model_flags(p)
    p.add_argument("--model", help="reuse a fitted IK model JSON")
    p.add_argument("--model-out", help="save the fitted IK model JSON")
    p.add_argument("--out", required=True)

    p = sub.add_parser("explain", argument_default=argparse.SUPPRESS,
                       help="contrast one graph with its nearest prototype")
    p.add_argument("dataset")
    p.add_argument("result")
    p.add_argument("--graph-id", type=int, required=True)
    p.add_argument("--model", help="IK model JSON used by detect, if it was saved")
    p.add_argument("--fmt", choices=["dot", "json"])
    p.add_argument("--dot-prefix", help="path prefix for the two scored-graph files")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", argument_default=argparse.SUPPRESS,
                       help="repeated-seed AUC evaluation")
    p.add_argument("dataset", nargs="?")
    p.add_argument("--synthetic", action="store_true",
                   help="evaluate on a generated benchmark instead of a file")
    _model_flags(p)
    for flag in ("--num-normal", "--num-anomalous", "--base-kinds", "--size-min",
                 "--size-max", "--cycle-size", "--noise"):
        p.add_argument(flag, type=str if flag == "--base-kinds" else
                       float if flag == "--noise" else int)
    p.add_argument("--seeds", type=int)
    p.add_argument("--out", required=True)
    return ap


def resolve_options(argv) -> dict:
    """Merge built-in defaults, the config file, and explicit flags (in that order)."""
    ns = vars(build_parser().parse_args(argv))
    if "cmd" not in ns or ns["cmd"] is None:
        raise UsageError("a subcommand is required")
    opts = dict(DEFAULTS)
    if "config" in ns:
        try:
            cfg = json.loads(Path(ns["config"]).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"bad config file: {e}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        opts.update({k.replace("-", "_"): v for k, v in cfg.items()})
    opts.update(ns)
    return opts


def _params(o) -> Params:
    return Params(psi=o["psi"], t=o["t"], h=o["h"], mode=o["mode"], tau=o["tau"],
                  tau_quantile=o["tau_quantile"], rho=o["rho"], seed=o["seed"])


def _synth_config(o) -> SyntheticConfig:
    return SyntheticConfig(
        num_normal=o["num_normal"], num_anomalous=o["num_anomalous"],
        base_kinds=tuple(k.strip() for k in o["base_kinds"].split(",") if k.strip()),
        base_size_range=(o["size_min"], o["size_max"]), cycle_size=o["cycle_size"],
        attr_noise_std=o["noise"], seed=derive_seed(o["seed"], "synthetic"))


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def cmd_synth(o):
    save_dataset(gen_synthetic(_synth_config(o)), o["out"])


def cmd_ingest(o):
    save_dataset(parse_tudataset(o["directory"], o["name"], o["attr_mode"]), o["out"])


def cmd_prep(o):
    ds = load_dataset(o["dataset"])
    save_dataset(prepare_glad(ds, o["anomalous_class"], o["ratio"],
                              derive_seed(o["seed"], "downsample")), o["out"])


def cmd_detect(o):
    ds = load_dataset(o["dataset"])
    model = IkModel.load(o["model"]) if o["model"] else None
    emb, result = run_detection(ds, _params(o), model)
    if o["model_out"]:
        emb.model.save(o["model_out"])
    d = result.to_json()
    d["dataset"] = ds.name
    _write_json(o["out"], d)
    log.info("k=%d clusters, prototypes %s", result.k, result.prototypes)


def cmd_explain(o):
    ds = load_dataset(o["dataset"])
    try:
        rd = json.loads(Path(o["result"]).read_text(encoding="utf-8"))
        params = Params(**{k: rd["params"][k] for k in
                           ("psi", "t", "h", "mode", "tau", "tau_quantile", "rho", "seed")})
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise DataError(f"bad detection result: {e}") from None
    if not rd.get("clusters"):
        raise ZeroClusterError(float("nan"), params.tau or float("nan"))
    model = IkModel.load(o["model"]) if o["model"] else None
    emb = fit_and_embed(ds, params, model)
    result = result_from_json(rd, emb)
    gid = o["graph_id"]
    try:
        emb.position(gid)
    except KeyError as e:
        raise DataError(str(e)) from None
    ex = explain_pair(result, emb, gid)
    d = ex.to_json()
    d["params"] = result.params
    _write_json(o["out"], d)
    prefix = o["dot_prefix"] or str(Path(o["out"]).with_suffix(""))
    fmt = o["fmt"]
    export_scored_graph(ds.graphs[emb.position(gid)], ex.anomaly_node_scores,
                        f"{prefix}.graph{gid}.{fmt}", fmt)
    export_scored_graph(ds.graphs[emb.position(ex.prototype_id)], ex.prototype_node_scores,
                        f"{prefix}.prototype{ex.prototype_id}.{fmt}", fmt)


def cmd_eval(o):
    if o["synthetic"]:
        source = _synth_config(o)
    elif o["dataset"]:
        source = o["dataset"]
    else:
        raise UsageError("eval needs a dataset file or --synthetic")
    report = run_experiment(source, _params(o), o["seeds"], out=o["out"])
    print(f"{report.dataset}: AUC {report.mean:.4f} +- {report.std:.4f} "
          f"over {len(report.aucs)}/{o['seeds']} seeds ({report.wall_clock_s:.1f}s)")


COMMANDS = {"synth": cmd_synth, "ingest": cmd_ingest, "prep": cmd_prep,
            "detect": cmd_detect, "explain": cmd_explain, "eval": cmd_eval}


def main(argv=None) -> int:
    try:
        o = resolve_options(sys.argv[1:] if argv is None else argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if o.get("verbose") else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[o["cmd"]](o)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ZeroClusterError as e:
        print(f"detection failed: {e}", file=sys.stderr)
        return EXIT_NO_CLUSTER
    except (DataError, OSError, ValueError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
