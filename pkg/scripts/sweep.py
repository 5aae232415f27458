#!/usr/bin/env python3
"""Run a bench grid from a key=value config (or a built-in suite) and write the CSV.

Example config:

    models=gnp,tree
    n=48
    delta=3
    k=2,3,4
    algos=linialk,agk,fastk,misk,naive-baseline
    seeds=0,1
"""
import argparse
import sys
import time

from powercolor.bench import SUITES, parse_config, rows_to_csv, run_bench


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--config")
    src.add_argument("--suite", choices=sorted(SUITES))
    ap.add_argument("--out", help="CSV path (default: stdout)")
    args = ap.parse_args(argv)

    text = SUITES[args.suite] if args.suite else open(args.config).read()
    t0 = time.time()
    rows = run_bench(parse_config(text))
    out = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    invalid = [r for r in rows if not r[-1]]
    print(f"{len(rows)} cells in {time.time() - t0:.1f}s, {len(invalid)} invalid", file=sys.stderr)
    return 1 if invalid else 0


if __name__ == "__main__":
    sys.exit(main())
