#!/usr/bin/env python3
"""Run the default amplitude sweep and write all figure-data files.

Equivalent to `stokes-manifolds run --out out/default_sweep`; kept as a script
so the default study is reproducible with a single command.
"""

import argparse
import sys

from stokes_manifolds.pipeline import emit_figure_tables, parse_config, run_sweep


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/default_sweep")
    parser.add_argument("--config", default=None, help="optional JSON config")
    args = parser.parse_args()

    config = parse_config(args.config, {"out_dir": args.out})
    report = run_sweep(config)
    manifest = emit_figure_tables(report, config.out_dir)

    print(f"wrote {len(manifest['files'])} files to {config.out_dir}")
    print(f"{'alpha':>8} {'xi2_total':>12} {'dB':>9} {'deficit':>10}")
    for res in report.results:
        print(f"{res.alpha:8.3f} {res.total.xi2:12.6f} "
              f"{res.total.xi2_db:9.3f} {res.trace_deficit:10.3g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
