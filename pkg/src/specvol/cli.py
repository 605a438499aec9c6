"""Command-line entry point: ``specvol synth | analyze | version``.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 I/O error.
A run is complete only once ``manifest.json`` exists in the output
directory; it is removed at start and written last.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import analyze, write_results
from .exceptions import ConfigError, DataError
from .market_data import load_study_config, read_calendar, read_tick_table
from .resample import dump_grid, resample_days
from .synth import generate_dataset, load_synth_config

log = logging.getLogger("specvol")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specvol", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic tick dataset")
    p.add_argument("--config", required=True, help="synth configuration file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", type=int, default=0, help="worker threads (0 = auto)")

    p = sub.add_parser("analyze", help="run the before/after study")
    p.add_argument("--config", required=True, help="study configuration file")
    p.add_argument("--ticks", required=True, help="tick file")
    p.add_argument("--calendar", required=True, help="trading calendar file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", type=int, default=0, help="worker threads (0 = auto)")
    p.add_argument("--lenient", action="store_true",
                   help="drop out-of-session ticks instead of failing")
    p.add_argument("--dump-grids", action="store_true",
                   help="also write the resampled grids of every stock-day")

    sub.add_parser("version", help="print the version")
    return parser


def _start(out: Path) -> float:
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").unlink(missing_ok=True)
    return time.perf_counter()


def _finish(out: Path, started: float, manifest: dict) -> None:
    manifest.update(tool="specvol", version=__version__, output_dir=str(out),
                    duration_seconds=round(time.perf_counter() - started, 3))
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")


def cmd_synth(args) -> int:
    cfg = load_synth_config(args.config)
    out = Path(args.out)
    started = _start(out)
    files = generate_dataset(cfg, out, args.threads)
    _finish(out, started, {
        "command": "synth", "config": args.config,
        "inputs": {},
        "outputs": sorted(p.name for p in (files.ticks, files.calendar, files.truth,
                                           files.symbols, files.study) if p.exists()),
        "counts": {"stocks": cfg.n_stocks, "days": len(cfg.days), "ticks": files.n_ticks},
    })
    print(f"wrote {files.n_ticks} ticks for {cfg.n_stocks} stocks x {len(cfg.days)} days to {out}")
    return EXIT_OK


def _dump_grids(table, study, out: Path) -> None:
    five = open(out / "grid_returns.csv", "w", encoding="utf-8", newline="\n")
    minute = open(out / "grid_minute_logprices.csv", "w", encoding="utf-8", newline="\n")
    with five, minute:
        for code, symbol in enumerate(table.symbols):
            rows = table.symbol_code == code
            day, t, p = table.day_code[rows], table.time[rows], table.price[rows]
            order = np.lexsort((t, day))
            grids = resample_days(day[order], t[order], p[order].astype(float), study.session)
            days = [table.days[c] for c in grids.day_code]
            dump_grid(five, symbol, days, grids.returns)
            dump_grid(minute, symbol, days, grids.log_prices)


def cmd_analyze(args) -> int:
    study = load_study_config(args.config)
    out = Path(args.out)
    calendar = read_calendar(args.calendar)
    table = read_tick_table(args.ticks, study.session, strict=not args.lenient)
    started = _start(out)
    result = analyze(table, calendar, study, args.threads)
    write_results(result, out)
    if args.dump_grids:
        _dump_grids(table, study, out)
    _finish(out, started, {
        "command": "analyze", "config": args.config,
        "inputs": {"ticks": args.ticks, "calendar": args.calendar},
        "counts": {
            "stocks": len(result.symbols),
            "days": len(calendar),
            "stock_days": result.n_stock_days,
            "exclusions": {w.label: len(w.exclusions) for w in result.windows},
            "included": {w.label: w.summary.n for w in result.windows},
        },
    })
    for w in result.windows:
        s = w.summary
        print(f"{s.label}: n={s.n} mean_rv={s.mean:.6f} t={s.t_stat:.4f} "
              f"significant_w={list(map(int, w.profile.significant()))}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "version":
        print(f"specvol {__version__}")
        return EXIT_OK
    handler = {"synth": cmd_synth, "analyze": cmd_analyze}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"specvol: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"specvol: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"specvol: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
