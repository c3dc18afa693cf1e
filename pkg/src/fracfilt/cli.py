"""Command line interface: dataset -> train -> collapse -> simulate -> report."""

import argparse
import logging
import sys

from . import io
from .collapse import FilterBank, collapse, export_heatmap, quantize_filter
from .harness import SimConfig, build_dataset, simulate
from .metrics import bd_rate
from .stdfilters import std_coeffs
from .training import TrainConfig, train


def _parse_size(text):
    w, h = text.lower().split("x")
    return int(w), int(h)


def _qp_list(text):
    return [int(q) for q in text.split(",")]


def cmd_dataset(args):
    seq = io.YuvSequence(path=args.yuv, width=args.size[0], height=args.size[1])
    frames = io.read_all_luma(seq)
    cfg = SimConfig(block_size=args.blocks[0], search_range=args.search_range)
    records, skipped = build_dataset(frames, args.qp, cfg)
    io.write_dataset(args.out, records)
    print(f"wrote {len(records)} records to {args.out} ({skipped} edge blocks skipped)")
    return 0


def cmd_train(args):
    records = io.read_dataset(args.dataset)
    if args.qp:
        records = [r for r in records if r.qp in args.qp]
    if not records:
        raise ValueError("no records match the requested QPs")
    cfg = TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        lr=args.lr,
        lr_decay=args.lr_decay,
    )
    bank = train(cfg, records, seed=args.seed)
    io.write_bank(args.out, bank)
    print(f"trained {len(bank.models)} models -> {args.out}")
    return 0


def cmd_collapse(args):
    bank = io.read_bank(args.model)
    filters = FilterBank()
    for key in sorted(bank.models.keys(), key=lambda k: (k[2], k[1], k[0])):
        f = collapse(bank.models[key])
        filters.add(quantize_filter(f, args.shift))
    io.write_filters(args.out, filters)
    print(f"collapsed {len(filters.filters)} filters -> {args.out}")
    return 0


def cmd_export(args):
    import os

    filters = io.read_filters(args.filters)
    os.makedirs(args.heatmaps, exist_ok=True)
    for (dx, dy, qp), f in sorted(filters.filters.items(), key=lambda kv: (kv[0][2], kv[0][1], kv[0][0])):
        stem = os.path.join(args.heatmaps, f"qp{qp}_dx{dx}_dy{dy}")
        export_heatmap(f, stem)
    print(f"exported {len(filters.filters)} filters to {args.heatmaps}")
    return 0


def cmd_filters(args):
    if not args.std:
        raise ValueError("nothing to do (use --std)")
    for phase in (1, 2, 3):
        t = std_coeffs(phase)
        taps = ", ".join(f"{c:4d}" for c in t.taps)
        print(f"phase {phase}: [{taps}]  sum {sum(t.taps)}")
    return 0


def cmd_simulate(args):
    seq = io.YuvSequence(path=args.yuv, width=args.size[0], height=args.size[1])
    frames = io.read_all_luma(seq)
    filters = io.read_filters(args.filters)
    cfg = SimConfig(
        qps=tuple(args.qp),
        block_size=args.blocks[0],
        search_range=args.search_range,
        lam=args.lam,
    )
    report = simulate(frames, filters, cfg)
    io.write_report(args.report, report)
    for qp, stats in report["per_qp"].items():
        hr = stats["hit_ratio"]
        hr_text = "N/A" if hr is None else f"{hr:.3f}"
        print(
            f"qp {qp}: {stats['fractional_blocks']} fractional blocks, "
            f"hit ratio {hr_text}"
        )
    print(f"report -> {args.report}")
    return 0


def cmd_bdrate(args):
    anchor = io.read_rd_csv(args.anchor)
    test = io.read_rd_csv(args.test)
    print(f"{bd_rate(anchor, test):.2f}%")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="fracfilt",
        description="learned 13x13 quarter-pel interpolation filters: "
        "dataset extraction, training, collapse and evaluation",
    )
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dataset", help="extract training records from a YUV clip")
    d.add_argument("--yuv", required=True, help="raw 8-bit 4:2:0 file")
    d.add_argument("--size", required=True, type=_parse_size, metavar="WxH")
    d.add_argument("--qp", required=True, type=int)
    d.add_argument("--blocks", type=_parse_size, default=(16, 16), metavar="NxN")
    d.add_argument("--search-range", type=int, default=8)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_dataset)

    t = sub.add_parser("train", help="train one model per (position, QP)")
    t.add_argument("--dataset", required=True)
    t.add_argument("--qp", type=_qp_list, default=None, help="comma-separated QP filter")
    t.add_argument("--epochs", type=int, default=40)
    t.add_argument("--batch-size", type=int, default=32)
    t.add_argument("--lr", type=float, default=1e-3)
    t.add_argument("--lr-decay", type=float, default=1.0)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    c = sub.add_parser("collapse", help="fuse trained models into 13x13 filters")
    c.add_argument("--model", required=True, help="model bank file")
    c.add_argument("--shift", type=int, default=6, help="fixed-point shift bits")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_collapse)

    e = sub.add_parser("export", help="write per-filter CSV + PGM heatmaps")
    e.add_argument("--filters", required=True)
    e.add_argument("--heatmaps", required=True, help="output directory")
    e.set_defaults(func=cmd_export)

    f = sub.add_parser("filters", help="dump standard filter coefficients")
    f.add_argument("--std", action="store_true")
    f.set_defaults(func=cmd_filters)

    s = sub.add_parser("simulate", help="switchable-filter MC simulation")
    s.add_argument("--yuv", required=True)
    s.add_argument("--size", required=True, type=_parse_size, metavar="WxH")
    s.add_argument("--filters", required=True)
    s.add_argument("--qp", type=_qp_list, default=[22, 27, 32, 37])
    s.add_argument("--blocks", type=_parse_size, default=(16, 16), metavar="NxN")
    s.add_argument("--search-range", type=int, default=8)
    s.add_argument("--lam", type=float, default=0.0)
    s.add_argument("--report", required=True, help="output JSON path")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bdrate", help="Bjontegaard delta-rate between two RD curves")
    b.add_argument("--anchor", required=True, help="CSV with rate,psnr columns")
    b.add_argument("--test", required=True)
    b.set_defaults(func=cmd_bdrate)

    return p


def cli_main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ValueError, KeyError, IndexError, OSError) as e:
        print(f"fracfilt {args.command}: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
