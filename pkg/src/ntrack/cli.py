"""Command-line interface: track, eval, count and synth subcommands.

Exit codes: 0 success, 1 internal error, 2 user/input error. Every track
run writes a manifest recording the fully resolved configuration, seed,
input paths and timings, so any run can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .errors import NTrackError
from .estimator import NTrack
from .flow import DirectoryFlowProvider
from .metrics import (CountPair, clear_and_id_metrics, filter_margin, format_report,
                      mape, rmse)
from .motio import parse_detections, parse_ground_truth, parse_results, parse_seqinfo, write_results
from .synth import export_scene, generate_scene, load_scene_config
from .tracker import run_sequence


class UsageError(Exception):
    """Raised for problems the user can fix; maps to exit code 2."""


def _load_json(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise UsageError(f"file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed JSON in {path}: {e}") from None


def _read_sequence_dir(seq_dir: Path):
    seqinfo = seq_dir / "seqinfo.ini"
    det_file = seq_dir / "det" / "det.txt"
    if not seqinfo.is_file():
        raise UsageError(f"missing {seqinfo}")
    if not det_file.is_file():
        raise UsageError(f"missing {det_file}")
    meta = parse_seqinfo(seqinfo.read_text(encoding="utf-8"))
    detections = parse_detections(det_file.read_text(encoding="utf-8"))
    return meta, detections


def _resolve_flow_dir(seq_dir: Path, flow_arg: str | None, seq_name: str) -> Path | None:
    candidates = []
    if flow_arg:
        candidates = [Path(flow_arg) / seq_name, Path(flow_arg)]
    else:
        candidates = [seq_dir / "flow"]
    for c in candidates:
        if c.is_dir() and any(c.glob("*.flo")):
            return c
    return None


def cmd_track(args) -> int:
    started = time.perf_counter()
    seq_dir = Path(args.seq)
    meta, detections = _read_sequence_dir(seq_dir)
    name = meta.name or seq_dir.name

    params = {}
    if args.config:
        params.update(_load_json(Path(args.config)))
    if args.rla is not None:
        params["rla"] = args.rla == "on"
    if args.neighbors is not None:
        params["neighbors"] = args.neighbors
    if args.seed is not None:
        params["seed"] = args.seed
    try:
        estimator = NTrack(**params)
        cfg = estimator.build_config()
    except (TypeError, NTrackError) as e:
        raise UsageError(f"bad configuration: {e}") from None

    flow_dir = _resolve_flow_dir(seq_dir, args.flow, name)
    if flow_dir is None:
        print("warning: no flow files found, using identity-motion fallback", file=sys.stderr)
        provider = None
    else:
        provider = DirectoryFlowProvider(flow_dir)

    result = run_sequence(meta, provider, detections, cfg, estimator.seed)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / f"{name}.txt"
    results_path.write_text(write_results(result.entries), encoding="utf-8")
    counts_path = out_dir / f"{name}_counts.json"
    counts_path.write_text(json.dumps(
        {"sequence": name, "unique_count": result.unique_count,
         "rows": len(result.entries)}, indent=2) + "\n", encoding="utf-8")
    manifest = {
        "artifact_version": __version__,
        "command": "track",
        "sequence": name,
        "inputs": {
            "seq_dir": str(seq_dir),
            "flow_dir": str(flow_dir) if flow_dir else None,
            "config_file": args.config,
        },
        "seed": estimator.seed,
        "config": estimator.get_params(),
        "outputs": {"results": results_path.name, "counts": counts_path.name},
        "timings": {"total_s": round(time.perf_counter() - started, 6)},
    }
    (out_dir / f"{name}_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{name}: {result.unique_count} unique objects, "
          f"{len(result.entries)} rows -> {results_path}")
    return 0


def cmd_eval(args) -> int:
    seq_dir = Path(args.seq)
    gt_file = seq_dir / "gt" / "gt.txt"
    seqinfo = seq_dir / "seqinfo.ini"
    if not gt_file.is_file():
        raise UsageError(f"missing {gt_file}")
    if not seqinfo.is_file():
        raise UsageError(f"missing {seqinfo}")
    results_path = Path(args.results)
    if not results_path.is_file():
        raise UsageError(f"missing results file {results_path}")
    meta = parse_seqinfo(seqinfo.read_text(encoding="utf-8"))
    name = meta.name or seq_dir.name
    if results_path.stem != name:
        raise UsageError(f"results file {results_path.name!r} does not match sequence {name!r}")

    gt = parse_ground_truth(gt_file.read_text(encoding="utf-8"))
    hyp = parse_results(results_path.read_text(encoding="utf-8"))
    if args.margin > 0:
        gt = filter_margin(gt, meta, args.margin)
        hyp = filter_margin(hyp, meta, args.margin)
    report = clear_and_id_metrics(gt, hyp, iou_match_min=args.iou_min)

    gt_count = len({e.id for e in gt})
    hyp_count = len({e.id for e in hyp})
    block = format_report(report) + f"COUNT_GT={gt_count}\nCOUNT_HYP={hyp_count}\n"
    print(block, end="")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        doc = {
            "sequences": {name: {**report.as_dict(),
                                 "count_gt": gt_count, "count_hyp": hyp_count}},
            "aggregate": report.as_dict(),
            "margin": args.margin,
            "iou_min": args.iou_min,
        }
        (out_dir / f"{name}_metrics.json").write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def cmd_count(args) -> int:
    raw = _load_json(Path(args.pairs))
    try:
        if "pairs" in raw:
            pairs = [CountPair(gt=p["gt"], hyp=p["hyp"]) for p in raw["pairs"]]
        elif "sequences" in raw:
            pairs = [CountPair(gt=s["gt"], hyp=s["counts"][args.method])
                     for s in raw["sequences"]]
        else:
            raise UsageError("counts file must contain a 'pairs' or 'sequences' key")
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"bad counts file: {e}") from None
    if not pairs:
        raise UsageError("counts file holds no pairs")
    m, r = mape(pairs), rmse(pairs)
    print(f"N={len(pairs)}")
    print(f"MAPE={m:.6f}")
    print(f"MAPE_PCT={100.0 * m:.2f}")
    print(f"RMSE={r:.6f}")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "counting_metrics.json").write_text(json.dumps(
            {"n": len(pairs), "mape": m, "rmse": r}, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    return 0


def cmd_synth(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        raise UsageError(f"file not found: {path}")
    try:
        cfg = load_scene_config(path)
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed JSON in {path}: {e}") from None
    scene = generate_scene(cfg)
    out = export_scene(scene, Path(args.out))
    flows = cfg.frame_count - 1
    print(f"{cfg.name}: {len(cfg.objects)} objects, {cfg.frame_count} frames, "
          f"{flows} flow files -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ntrack", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ntrack {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_track = sub.add_parser("track", help="run the tracker over a MOT-format sequence")
    p_track.add_argument("--seq", required=True, help="sequence directory (seqinfo.ini, det/det.txt)")
    p_track.add_argument("--flow", help="directory of .flo files (default: <seq>/flow)")
    p_track.add_argument("--config", help="JSON file of tracker parameters")
    p_track.add_argument("--seed", type=int, help="random seed (default 0)")
    p_track.add_argument("--rla", choices=["on", "off"], help="neighbor-based re-identification")
    p_track.add_argument("--neighbors", type=int, help="neighbor count used by re-identification")
    p_track.add_argument("--out", required=True, help="output directory")
    p_track.set_defaults(func=cmd_track)

    p_eval = sub.add_parser("eval", help="score a results file against ground truth")
    p_eval.add_argument("--seq", required=True, help="sequence directory (seqinfo.ini, gt/gt.txt)")
    p_eval.add_argument("--results", required=True, help="tracker results file (<seq name>.txt)")
    p_eval.add_argument("--margin", type=float, default=200.0,
                        help="left/right margin band to ignore, px (default 200)")
    p_eval.add_argument("--iou-min", dest="iou_min", type=float, default=0.5,
                        help="IoU needed to count a match (default 0.5)")
    p_eval.add_argument("--out", help="directory for the JSON report")
    p_eval.set_defaults(func=cmd_eval)

    p_count = sub.add_parser("count", help="counting-error metrics from a counts file")
    p_count.add_argument("--pairs", required=True, help="JSON file of count pairs")
    p_count.add_argument("--method", default="ntrack",
                         help="hypothesis column when the file holds several methods")
    p_count.add_argument("--out", help="directory for the JSON report")
    p_count.set_defaults(func=cmd_count)

    p_synth = sub.add_parser("synth", help="generate and export a synthetic scene")
    p_synth.add_argument("--config", required=True, help="scene config JSON")
    p_synth.add_argument("--out", required=True, help="sequence output directory")
    p_synth.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NTrackError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - surface as internal failure
        print(f"internal error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
