#!/usr/bin/env python3
"""Full conjecture sweep: every symmetry class of pattern sets within S_4
with more than four patterns, counted through n = 16 and matched against a
local OEIS dump.

This is the long-run batch job behind the `mine` subcommand, sized well
beyond the test suite: 2,137,358 classes, each needing an avoider count to
n = 16 in the wide word layout.  The bulk runs at tens of milliseconds per
class, but the few thousand five-pattern classes grow Catalan-fast and take
seconds each: budget days of CPU time in pure Python.  Use --limit for a
taste, --jobs to spread across cores, and --min-size 1 to also sweep the
small sets.

Usage:
    python scripts/full_s4_sweep.py --oeis /path/to/stripped.gz \
        --out sweep.csv [--max-n 16] [--jobs 2] [--limit 1000]

Output: the standard report CSV (canonical_patterns,terms,degree,oeis_anum,shift).
"""

import argparse
import sys
import time
from multiprocessing import Pool

from permscan.avoiders import PatternSet, count_avoiders_fast
from permscan.permcore import PackedPerm, layout_for
from permscan.sequences import (
    FIRST_TERM_N,
    MineRow,
    OeisDb,
    enumerate_symmetry_classes,
    growth_degree,
    oeis_match,
    write_report,
)

_WORKER_STATE = {}


def _init_worker(n_max):
    _WORKER_STATE["n_max"] = n_max
    _WORKER_STATE["layout"] = layout_for(n_max)


def _sequence_for(letters_lists):
    n_max = _WORKER_STATE["n_max"]
    layout = _WORKER_STATE["layout"]
    pat = PatternSet.build(
        [PackedPerm.from_letters(ls, layout) for ls in letters_lists])
    counts = count_avoiders_fast(pat, n_max)
    return tuple(counts[FIRST_TERM_N - 1:])


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--oeis", help="path to OEIS 'stripped' file (.gz ok)")
    ap.add_argument("--out", required=True)
    ap.add_argument("--max-n", type=int, default=16, dest="max_n")
    ap.add_argument("--min-size", type=int, default=5, dest="min_size")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--limit", type=int, default=None,
                    help="only process the first N classes (smoke runs)")
    args = ap.parse_args()

    db = OeisDb.load(args.oeis) if args.oeis else None
    classes = []
    for i, cls in enumerate(enumerate_symmetry_classes(4, args.min_size)):
        if args.limit is not None and i >= args.limit:
            break
        classes.append(cls)
    print(f"{len(classes)} classes to sweep (max n = {args.max_n})", file=sys.stderr)

    payloads = [[p.letters() for p in cls] for cls in classes]
    t0 = time.time()
    if args.jobs > 1:
        with Pool(args.jobs, initializer=_init_worker, initargs=(args.max_n,)) as pool:
            sequences = pool.map(_sequence_for, payloads, chunksize=64)
    else:
        _init_worker(args.max_n)
        sequences = []
        for i, payload in enumerate(payloads):
            sequences.append(_sequence_for(payload))
            if (i + 1) % 1000 == 0:
                rate = (i + 1) / (time.time() - t0)
                print(f"  {i + 1}/{len(payloads)} classes "
                      f"({rate:.0f}/s)", file=sys.stderr)

    rows = []
    for cls, terms in zip(classes, sequences):
        try:
            degree = growth_degree(terms)
            checked = True
        except ValueError:
            degree, checked = None, False
        filtered = checked and degree is not None
        anum = shift = None
        if not filtered and db is not None:
            hit = oeis_match(terms, db)
            if hit:
                anum, shift = hit
        rows.append(MineRow(cls, terms, degree, checked, filtered, anum, shift))

    with open(args.out, "w", encoding="utf-8") as fh:
        write_report(rows, fh)
    matched = sum(1 for r in rows if r.anum is not None)
    print(f"done in {time.time() - t0:.0f}s; {matched} rows matched OEIS",
          file=sys.stderr)


if __name__ == "__main__":
    main()
