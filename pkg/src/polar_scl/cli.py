"""Command-line entry point: ``polar-scl {construct,simulate,compare,latency}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .codebook import (
    DEFAULT_CONSTRUCTION_TRIALS,
    DEFAULT_DESIGN_EBN0_DB,
    extend_with_crc,
    format_frozen_file,
    frozen_cluster_count,
    read_frozen_file,
)
from .crc import SCHEMES, get_scheme
from .perf_model import REFERENCE_ROWS, LatencyQuery, LatencyRow, format_table
from .simulate import DECODERS, FORMATS, SimConfig, compare_configs, parse_snr_grid, run_sweep
from .scl_decoder import SORTERS


def _add_code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=10, help="log2 of the block length")
    p.add_argument("--k", type=int, default=512, help="payload bits (CRC bits come on top)")
    p.add_argument("--crc", choices=sorted(SCHEMES), default=None)
    p.add_argument("--design-snr", type=float, default=DEFAULT_DESIGN_EBN0_DB, help="construction Eb/N0 (dB)")
    p.add_argument("--construction-trials", type=int, default=DEFAULT_CONSTRUCTION_TRIALS)
    p.add_argument("--construction-seed", type=int, default=0)


def _cmd_construct(args) -> int:
    code = extend_with_crc(
        args.n, args.k, get_scheme(args.crc), args.design_snr, args.construction_trials,
        args.construction_seed, args.workers,
    )  # fmt: skip
    text = format_frozen_file(code)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"N={code.N} |A|={code.K} F_C={frozen_cluster_count(code)}", file=sys.stderr)
    return 0


def _config_from_args(args) -> SimConfig:
    decoder = args.decoder or ("ca-scl" if args.crc else "scl")
    return SimConfig(
        n=args.n,
        k=args.k,
        decoder=decoder,
        list_size=args.list_size,
        mode=args.mode,
        crc=args.crc,
        sorter=args.sorter,
        snr=parse_snr_grid(args.snr),
        seed=args.seed,
        min_errors=args.min_errors,
        max_trials=args.max_trials,
        batch_size=args.batch_size,
        design_ebn0_db=args.design_snr,
        construction_trials=args.construction_trials,
        construction_seed=args.construction_seed,
        frozen_file=args.frozen_file,
        workers=args.workers,
    )


def _print_record(cfg: SimConfig, rec) -> None:
    print(
        f"{cfg.name}  Eb/N0={rec.ebn0_db:.2f} dB  trials={rec.trials}  errors={rec.block_errors}  "
        f"FER={rec.fer:.3e} [{rec.ci95_low:.2e}, {rec.ci95_high:.2e}]  BER={rec.ber:.3e}",
        file=sys.stderr,
        flush=True,
    )


def _cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    records = run_sweep(cfg, args.out, args.format, args.record_time, progress=_print_record)
    if not args.out:
        for rec in records:
            print(json.dumps({k: v for k, v in rec.__dict__.items() if args.record_time or k != "wall_time_s"}))
    return 0


def _load_configs(paths) -> list[SimConfig]:
    configs = []
    for path in paths:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        items = data if isinstance(data, list) else [data]
        configs.extend(SimConfig.from_dict(item) for item in items)
    return configs


def _cmd_compare(args) -> int:
    configs = _load_configs(args.configs)
    if args.workers:
        configs = [SimConfig.from_dict({**c.to_dict(), "workers": args.workers}) for c in configs]
    comp = compare_configs(configs, progress=_print_record)
    text = comp.table()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")
    return 0


def _cmd_latency(args) -> int:
    if args.reference or (args.N is None and args.frozen_file is None):
        print(format_table(REFERENCE_ROWS))
        return 0
    info, clusters, N = args.info_size, args.clusters, args.N
    if args.frozen_file:
        code = read_frozen_file(args.frozen_file)
        N = N or code.N
        info = code.K if info is None else info
        clusters = frozen_cluster_count(code) if clusters is None else clusters
    freq = args.freq_mhz * 1e6 if args.freq_mhz else None
    q = LatencyQuery(N, args.P, info or 0, clusters or 0, args.sorter, freq)
    label = f"N={N} P={args.P} |A|={q.info_size} F_C={q.frozen_clusters} {args.sorter}"
    print(format_table([LatencyRow(label, q)]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polar-scl", description="Polar code SC/SCL decoding toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="Monte-Carlo code construction; writes a frozen-set file")
    _add_code_args(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("simulate", help="FER/BER sweep over Eb/N0")
    _add_code_args(p)
    p.add_argument("--decoder", choices=DECODERS, default=None, help="default: scl, or ca-scl with --crc")
    p.add_argument("--list-size", "-L", type=int, default=8)
    p.add_argument("--mode", default="exact", help="exact | minsum | fixed:Q=6,M=8[,scale=1]")
    p.add_argument("--sorter", choices=SORTERS, default="full")
    p.add_argument("--snr", default="2.0", help="start:stop:step, comma list, or one value (dB)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-errors", type=int, default=500)
    p.add_argument("--max-trials", type=int, default=1_000_000)
    p.add_argument("--batch-size", type=int, default=500)
    p.add_argument("--frozen-file", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="CSV or JSONL file, written point by point")
    p.add_argument("--format", choices=FORMATS, default=None, help="default: from the --out suffix")
    p.add_argument("--record-time", action="store_true", help="include wall_time_s in the output")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("compare", help="run several JSON configs on one SNR grid and compare FER")
    p.add_argument("configs", nargs="+", help="JSON files, each a config object or a list of them")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("latency", help="cycle counts and throughput of the decoder architecture")
    p.add_argument("--reference", action="store_true", help="print the published configurations")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--P", type=int, default=64, help="processing elements per path")
    p.add_argument("--info-size", type=int, default=None, help="|A|")
    p.add_argument("--clusters", type=int, default=None, help="frozen cluster count F_C")
    p.add_argument("--sorter", choices=("full", "pruned", "none"), default="full")
    p.add_argument("--freq-mhz", type=float, default=None)
    p.add_argument("--frozen-file", default=None, help="take N, |A| and F_C from a frozen-set file")
    p.set_defaults(func=_cmd_latency)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
