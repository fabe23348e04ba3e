"""Command-line front end.

Subcommands: ``avoid`` (avoider counts / enumeration), ``count`` (hit-count
histograms), ``vincular-count`` (covincular hit histograms), ``mine`` (the
OEIS conjecture sweep), and ``bench`` (timings against the
generate-and-check baseline).  All outputs are sorted before emission, so a
given command line always produces byte-identical output (bench timings
excepted).

Exit codes: 0 on success, 1 on usage or parse errors, 2 when --oracle-check
finds an engine/oracle mismatch.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import TextIO

from . import avoiders as av
from . import counting as ct
from . import oracle as orc
from . import sequences as sq
from . import vincular as vc
from .permcore import (
    NIBBLE,
    WIDE,
    PackedPerm,
    PermCapacityError,
    format_perm,
    layout_for,
    parse_perm,
)

ORACLE_CHECK_MAX_N = 8


def _layout_for_args(args) -> "NIBBLE.__class__":
    if getattr(args, "wide", False):
        return WIDE
    return layout_for(args.max_n)


def _open_out(args) -> TextIO:
    if args.out:
        return open(args.out, "w", encoding="utf-8")
    return sys.stdout


def _close_out(fh: TextIO) -> None:
    if fh is not sys.stdout:
        fh.close()


# ---------------------------------------------------------------------------
# avoid

def cmd_avoid(args) -> int:
    layout = _layout_for_args(args)
    pat = av.PatternSet.parse(args.patterns, layout)
    n = args.max_n
    enumerate_levels = args.enumerate
    levels: dict[int, list[PackedPerm]] | None = None
    if args.engine == "basic" or enumerate_levels:
        if args.engine == "lowmem":
            raise ValueError("--enumerate requires the basic or fast engine "
                             "(the low-memory engine never materializes levels)")
        if args.engine == "basic":
            built = av.build_avoiders_basic(pat, n)
            levels = {m: sorted(built[m], key=lambda p: p.letters())
                      for m in range(1, n + 1)}
        else:
            collected: dict[int, list[PackedPerm]] = {m: [] for m in range(1, n + 1)}
            av.enumerate_avoiders_fast(pat, n,
                                       lambda rec: collected[rec.perm.length].append(rec.perm))
            levels = {m: sorted(collected[m], key=lambda p: p.letters())
                      for m in range(1, n + 1)}
        counts = [len(levels[m]) for m in range(1, n + 1)]
    elif args.engine == "fast":
        counts = av.count_avoiders_fast(pat, n)
    else:
        counts = av.count_avoiders_lowmem(pat, n)

    if args.oracle_check:
        if n > ORACLE_CHECK_MAX_N:
            raise ValueError(f"--oracle-check supports max-n <= {ORACLE_CHECK_MAX_N}")
        truth = orc.oracle_avoider_levels(pat, n)
        if counts != [len(truth[m]) for m in range(1, n + 1)]:
            print("oracle-check FAILED: avoider counts disagree", file=sys.stderr)
            return 2
        if levels is not None:
            for m in range(1, n + 1):
                if set(levels[m]) != truth[m]:
                    print(f"oracle-check FAILED: avoider set at n={m} disagrees",
                          file=sys.stderr)
                    return 2

    out = _open_out(args)
    try:
        for m in range(1, n + 1):
            out.write(f"{m},{counts[m - 1]}\n")
            if levels is not None and enumerate_levels:
                for p in levels[m]:
                    out.write(f"{m},{format_perm(p)}\n")
    finally:
        _close_out(out)
    return 0


# ---------------------------------------------------------------------------
# count

def cmd_count(args) -> int:
    layout = _layout_for_args(args)
    pat = av.PatternSet.parse(args.patterns, layout)
    n = args.max_n
    engine = args.engine
    if engine == "auto":
        engine = "single-fast" if len(pat) == 1 else "standard"
    if engine == "single-fast":
        if len(pat) != 1:
            raise ValueError("--engine single-fast needs exactly one pattern")
        tally = ct.count_single_fast(pat.patterns[0], n)
    elif engine == "lowmem":
        tally = ct.count_all_lowmem(pat, n)
    else:
        tally = ct.count_all(pat, n)

    if args.oracle_check:
        if n > ORACLE_CHECK_MAX_N:
            raise ValueError(f"--oracle-check supports max-n <= {ORACLE_CHECK_MAX_N}")
        if tally.by_length != orc.oracle_hit_histogram(pat, n):
            print("oracle-check FAILED: hit histogram disagrees", file=sys.stderr)
            return 2

    out = _open_out(args)
    try:
        out.write("length,hits,multiplicity\n")
        for m, hits, mult in tally.rows():
            out.write(f"{m},{hits},{mult}\n")
    finally:
        _close_out(out)
    return 0


# ---------------------------------------------------------------------------
# vincular-count

def cmd_vincular_count(args) -> int:
    layout = _layout_for_args(args)
    pattern = parse_perm(args.pattern, layout)
    try:
        adj = frozenset(int(tok) for tok in args.adjacencies.split(",") if tok != "")
    except ValueError:
        raise ValueError(f"bad adjacency list {args.adjacencies!r}")
    cov = vc.CovincularPattern(pattern, adj)
    tally = vc.covincular_count_all(cov, args.max_n)
    out = _open_out(args)
    try:
        out.write("length,hits,multiplicity\n")
        for m, hits, mult in tally.rows():
            out.write(f"{m},{hits},{mult}\n")
    finally:
        _close_out(out)
    return 0


# ---------------------------------------------------------------------------
# mine

def cmd_mine(args) -> int:
    db = sq.OeisDb.load(args.oeis) if args.oeis else None
    rows = sq.mine(args.pattern_length, args.min_set_size, args.max_n, db,
                   max_shift=args.max_shift, min_overlap=args.min_overlap)
    out = _open_out(args)
    try:
        sq.write_report(rows, out)
    finally:
        _close_out(out)
    return 0


# ---------------------------------------------------------------------------
# bench

def _bench_oracle(pat, n):
    from itertools import permutations

    counter = orc.SubseqCounter()
    counts = []
    for m in range(1, n + 1):
        cnt = 0
        for tup in permutations(range(1, m + 1)):
            q = PackedPerm.from_letters(tup, pat.layout)
            if not orc.oracle_contains(q, pat, counter=counter):
                cnt += 1
        counts.append(cnt)
    return counts, counter.examined


def cmd_bench(args) -> int:
    layout = _layout_for_args(args)
    pat = av.PatternSet.parse(args.patterns, layout)
    n = args.max_n
    rows = []
    for algo in args.algos.split(","):
        algo = algo.strip()
        t0 = time.perf_counter()
        if algo == "fast":
            counts = av.count_avoiders_fast(pat, n)
            work = sum(counts)
        elif algo == "lowmem":
            counts = av.count_avoiders_lowmem(pat, n)
            work = sum(counts)
        elif algo == "basic":
            built = av.build_avoiders_basic(pat, n)
            counts = [len(built[m]) for m in range(1, n + 1)]
            work = sum(counts)
        elif algo == "oracle":
            counts, work = _bench_oracle(pat, n)
        else:
            raise ValueError(f"unknown algorithm {algo!r} "
                             "(choose from basic, fast, lowmem, oracle)")
        elapsed = time.perf_counter() - t0
        rows.append((algo, n, elapsed, work, counts[-1]))
    out = _open_out(args)
    try:
        out.write("algorithm,n,seconds,work,last_level\n")
        for algo, nn, secs, work, last in rows:
            out.write(f"{algo},{nn},{secs:.6f},{work},{last}\n")
    finally:
        _close_out(out)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permscan",
        description="pattern avoiders, hit counting, and OEIS conjecture mining")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, patterns=True):
        if patterns:
            p.add_argument("--patterns", required=True,
                           help="patterns separated by spaces or commas; digit "
                                "strings up to length 9, bracketed letter lists "
                                "beyond (e.g. '[10 2 1 ...]')")
        p.add_argument("--max-n", type=int, required=True, dest="max_n")
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--wide", action="store_true",
                       help="force the wide word layout (5-bit letters, n up to 25)")
        p.add_argument("--threads", type=int, default=1,
                       help="reserved; engines run serially and output never "
                            "depends on this value")

    p_avoid = sub.add_parser("avoid", help="count or list pattern avoiders")
    common(p_avoid)
    p_avoid.add_argument("--engine", choices=["basic", "fast", "lowmem"],
                         default="fast")
    p_avoid.add_argument("--enumerate", action="store_true",
                         help="also list the avoiders of each length, sorted")
    p_avoid.add_argument("--oracle-check", action="store_true", dest="oracle_check",
                         help="cross-validate against generate-and-check (max-n <= 8)")
    p_avoid.set_defaults(func=cmd_avoid)

    p_count = sub.add_parser("count", help="histogram of hit counts per length")
    common(p_count)
    p_count.add_argument("--engine", choices=["auto", "standard", "single-fast", "lowmem"],
                         default="auto",
                         help="auto routes single patterns to the constant-"
                              "time-per-permutation path")
    p_count.add_argument("--histogram", action="store_true",
                         help="accepted for compatibility; histogram rows are "
                              "the only output format")
    p_count.add_argument("--oracle-check", action="store_true", dest="oracle_check")
    p_count.set_defaults(func=cmd_count)

    p_vc = sub.add_parser("vincular-count",
                          help="histogram of covincular hit counts per length")
    p_vc.add_argument("--pattern", required=True)
    p_vc.add_argument("--adjacencies", default="",
                      help="comma list within 0..k (0 anchors the minimum, "
                           "k the maximum, x forces values x,x+1 adjacent)")
    common(p_vc, patterns=False)
    p_vc.set_defaults(func=cmd_vincular_count)

    p_mine = sub.add_parser("mine", help="avoidance-sequence sweep with OEIS lookup")
    p_mine.add_argument("--pattern-length", type=int, required=True,
                        dest="pattern_length")
    p_mine.add_argument("--min-set-size", type=int, default=1, dest="min_set_size")
    p_mine.add_argument("--max-n", type=int, required=True, dest="max_n")
    p_mine.add_argument("--oeis", help="path to an OEIS 'stripped' file "
                                       "(plain or .gz); omit to skip matching")
    p_mine.add_argument("--max-shift", type=int, default=14, dest="max_shift")
    p_mine.add_argument("--min-overlap", type=int, default=8, dest="min_overlap")
    p_mine.add_argument("--out")
    p_mine.add_argument("--threads", type=int, default=1)
    p_mine.set_defaults(func=cmd_mine)

    p_bench = sub.add_parser("bench", help="time engines against the baseline")
    common(p_bench)
    p_bench.add_argument("--algos", default="fast,oracle",
                         help="comma list from basic,fast,lowmem,oracle")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (ValueError, PermCapacityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
