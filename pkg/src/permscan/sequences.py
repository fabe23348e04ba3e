"""Conjecture mining: avoidance sequences matched against a local OEIS dump.

Pattern sets related by inverse, reverse, or complement (applied to every
pattern) have identical avoidance counts, so sets are first folded into
symmetry classes under the order-8 group those maps generate.  For each
class the counts |S_5|..|S_n| are computed, sequences of polynomial growth
(degree at most 3) are filtered out, and the rest are looked up in a local
copy of the OEIS "stripped" file, allowing the OEIS entry to start up to 14
positions before the query.
"""

from __future__ import annotations

import gzip
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Iterable, Iterator, Sequence, TextIO

import numpy as np

from .avoiders import PatternSet, count_avoiders_fast
from .permcore import (
    PackedPerm,
    complement_perm,
    format_perm,
    inverse_perm,
    layout_for,
    reverse_perm,
)

SETTLE_N = 10        # growth degree must have settled by this length
MAX_DEGREE = 3       # growth of cubic or smaller degree is filtered out
FIRST_TERM_N = 5     # sequences start at |S_5|: |S_4| depends only on |Pi|


# ---------------------------------------------------------------------------
# the symmetry group

def _compose(f: Callable, g: Callable) -> Callable:
    return lambda p: f(g(p))


def symmetry_group() -> tuple[Callable[[PackedPerm], PackedPerm], ...]:
    """The 8 maps generated by inverse, reverse, and complement (the
    symmetries of the permutation matrix), identity first."""
    probe = [PackedPerm.from_letters(t) for t in permutations(range(1, 5))]

    def key(f):
        return tuple(f(p).word for p in probe)

    identity = lambda p: p
    elems = {key(identity): identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for f in frontier:
            for g in (inverse_perm, reverse_perm, complement_perm):
                h = _compose(g, f)
                kk = key(h)
                if kk not in elems:
                    elems[kk] = h
                    nxt.append(h)
        frontier = nxt
    group = tuple(elems.values())
    assert len(group) == 8
    return group


_GROUP: tuple[Callable, ...] | None = None


def _group() -> tuple[Callable, ...]:
    global _GROUP
    if _GROUP is None:
        _GROUP = symmetry_group()
    return _GROUP


@dataclass(frozen=True)
class SymmetryClass:
    """Canonical representative of a pattern set: the lexicographically
    least of the 8 symmetric images, where patterns compare by their
    one-line letters and an image is its ascending tuple of patterns."""

    patterns: tuple[PackedPerm, ...]

    @property
    def words(self) -> tuple[int, ...]:
        return tuple(p.word for p in self.patterns)

    def __str__(self) -> str:
        return " ".join(format_perm(p) for p in self.patterns)


def canonicalize(patterns: "PatternSet | Iterable[PackedPerm]") -> SymmetryClass:
    perms = list(patterns)
    best: list[PackedPerm] | None = None
    best_key: tuple[tuple[int, ...], ...] | None = None
    for g in _group():
        image = sorted((g(p) for p in perms), key=lambda p: p.letters())
        kk = tuple(p.letters() for p in image)
        if best_key is None or kk < best_key:
            best_key = kk
            best = image
    assert best is not None
    return SymmetryClass(tuple(best))


# ---------------------------------------------------------------------------
# symmetry-class enumeration over subsets of S_k (bit-mask sweep)

def _mask_tables(k: int):
    # bit j holds the j-th pattern in DESCENDING one-line order, so that the
    # integer-largest mask of an orbit decodes to the lexicographically
    # least sorted pattern tuple (the same representative canonicalize picks)
    perms = sorted((PackedPerm.from_letters(t) for t in permutations(range(1, k + 1))),
                   key=lambda p: p.letters(), reverse=True)
    index = {p.word: i for i, p in enumerate(perms)}
    moves = [tuple(index[g(p).word] for p in perms) for g in _group()[1:]]
    return perms, moves


def _byte_tables(move: Sequence[int], nbits: int) -> list[np.ndarray]:
    tables = []
    for byte_idx in range((nbits + 7) // 8):
        tb = np.zeros(256, dtype=np.uint32)
        for byte in range(256):
            acc = 0
            for bit in range(8):
                j = byte_idx * 8 + bit
                if j < nbits and (byte >> bit) & 1:
                    acc |= 1 << move[j]
            tb[byte] = acc
        tables.append(tb)
    return tables


def _canonical_mask_flags(k: int, min_size: int,
                          include_full: bool) -> tuple[list[PackedPerm], np.ndarray]:
    """Boolean array over subset masks of S_k marking canonical
    representatives of classes with at least min_size patterns."""
    if k > 4:
        raise ValueError("class sweeps enumerate all subsets of S_k; k > 4 "
                         "is astronomically large")
    perms, moves = _mask_tables(k)
    nbits = len(perms)
    tables = [_byte_tables(mv, nbits) for mv in moves]
    total = 1 << nbits
    flags = np.zeros(total, dtype=bool)
    chunk = 1 << 20
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint32)
        keep = np.bitwise_count(idx) >= min_size
        canon = idx.copy()
        for tbs in tables:
            img = tbs[0][idx & np.uint32(255)]
            for t in range(1, len(tbs)):
                img |= tbs[t][(idx >> np.uint32(8 * t)) & np.uint32(255)]
            np.maximum(canon, img, out=canon)
        flags[canon[keep]] = True
    if not include_full:
        flags[total - 1] = False
    return perms, flags


def count_symmetry_classes(k: int, min_size: int, include_full: bool = False) -> int:
    """Number of symmetry classes of pattern sets within S_k having at
    least min_size patterns.

    The full set S_k is excluded by default: forbidding every pattern makes
    the avoidance sequence identically zero from n = k on, so the sweep has
    nothing to learn from it.
    """
    _, flags = _canonical_mask_flags(k, min_size, include_full)
    return int(flags.sum())


def enumerate_symmetry_classes(k: int, min_size: int,
                               include_full: bool = False,
                               ) -> Iterator[tuple[PackedPerm, ...]]:
    """Canonical representatives, each sorted ascending by one-line letters,
    in a fixed deterministic order (full set S_k excluded by default, as in
    ``count_symmetry_classes``)."""
    perms, flags = _canonical_mask_flags(k, min_size, include_full)
    for mask in np.nonzero(flags)[0].tolist():
        members = [perms[j] for j in range(len(perms)) if (mask >> j) & 1]
        yield tuple(sorted(members, key=lambda p: p.letters()))


# ---------------------------------------------------------------------------
# avoidance sequences and the growth filter

@dataclass(frozen=True)
class SequenceRecord:
    """Avoidance counts |S_5|..|S_n_max| of one canonical pattern set."""

    pattern_set: SymmetryClass
    terms: tuple[int, ...]
    n_max: int

    def __post_init__(self) -> None:
        if len(self.terms) != self.n_max - (FIRST_TERM_N - 1):
            raise ValueError("terms must run from n=5 through n_max")


def avoidance_record(patterns: Iterable[PackedPerm], n_max: int,
                     counter: Callable[[PatternSet, int], list[int]] = count_avoiders_fast,
                     ) -> SequenceRecord:
    cls = canonicalize(patterns)
    if n_max < FIRST_TERM_N:
        raise ValueError(f"n_max must be at least {FIRST_TERM_N}")
    layout = layout_for(n_max)
    pat = PatternSet.build([PackedPerm.from_letters(p.letters(), layout)
                            for p in cls.patterns])
    counts = counter(pat, n_max)
    return SequenceRecord(cls, tuple(counts[FIRST_TERM_N - 1:]), n_max)


def growth_degree(terms: Sequence[int], start_n: int = FIRST_TERM_N,
                  settle_n: int = SETTLE_N) -> int | None:
    """Polynomial degree d <= 3 of the sequence, or None for faster growth.

    Degree d means the (d+1)-st finite difference vanishes at every index
    from settle_n on (early terms may misbehave; only the settled tail
    counts).  Raises if the sequence is too short to check even degree 0 at
    settle_n, i.e. shorter than through n = settle_n + 1.
    """
    terms = list(terms)
    if start_n + len(terms) - 1 < settle_n + 1:
        raise ValueError(
            f"need terms through n={settle_n + 1} to test growth at n={settle_n}")
    for d in range(MAX_DEGREE + 1):
        diff = terms
        for _ in range(d + 1):
            diff = [b - a for a, b in zip(diff, diff[1:])]
        # diff[j] is the (d+1)-st difference at n = start_n + j
        tail = [x for j, x in enumerate(diff) if start_n + j >= settle_n]
        if tail and all(x == 0 for x in tail):
            return d
        if not tail:
            # cannot certify this or any higher degree; growth unknown
            raise ValueError(
                f"need terms through n={settle_n + d + 1} to test degree {d}")
    return None


# ---------------------------------------------------------------------------
# local OEIS dump

class OeisFormatError(ValueError):
    pass


@dataclass(frozen=True)
class OeisEntry:
    anum: int
    terms: tuple[int, ...]


@dataclass
class OeisDb:
    """A loaded OEIS "stripped" dump: one line per sequence,
    ``A000045 ,0,1,1,2,3,5,...,`` with ``#`` comment lines."""

    entries: list[OeisEntry]
    _sorted: list[OeisEntry] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        anums = [e.anum for e in self.entries]
        if len(set(anums)) != len(anums):
            raise OeisFormatError("duplicate A-numbers in OEIS db")
        self._sorted = sorted(self.entries, key=lambda e: e.anum)

    @classmethod
    def load(cls, path: str) -> "OeisDb":
        if str(path).endswith(".gz"):
            fh: TextIO = gzip.open(path, "rt", encoding="utf-8")
        else:
            fh = open(path, "rt", encoding="utf-8")
        with fh:
            return cls.parse(fh)

    @classmethod
    def parse(cls, lines: Iterable[str]) -> "OeisDb":
        entries = []
        for lineno, line in enumerate(lines, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                name, rest = line.split(None, 1)
                if not name.startswith("A"):
                    raise ValueError("line must start with an A-number")
                anum = int(name[1:])
                terms = tuple(int(t) for t in rest.strip().strip(",").split(",") if t)
            except ValueError as exc:
                raise OeisFormatError(f"malformed OEIS line {lineno}: {exc}") from exc
            entries.append(OeisEntry(anum, terms))
        return cls(entries)

    def __len__(self) -> int:
        return len(self.entries)


def oeis_match(terms: Sequence[int], db: OeisDb, max_shift: int = 14,
               min_overlap: int = 8) -> tuple[int, int] | None:
    """Smallest A-number matching the query at some left shift 0..max_shift.

    A match at shift s compares the query against the entry's terms starting
    at position s, over the whole overlap: all query terms when the entry is
    long enough, otherwise every remaining entry term (at least min_overlap
    of them; entries in the wild run out of terms).
    """
    q = list(terms)
    if not q:
        return None
    for entry in db._sorted:
        e = entry.terms
        for s in range(0, max_shift + 1):
            overlap = min(len(q), len(e) - s)
            if overlap < min(len(q), min_overlap):
                break
            if all(e[s + j] == q[j] for j in range(overlap)):
                return entry.anum, s
    return None


# ---------------------------------------------------------------------------
# the mining pipeline

@dataclass
class MineRow:
    """One symmetry class: its sequence, growth degree (None when growth is
    superpolynomial), whether the degree filter removed it, and the OEIS
    match for surviving rows.  ``annotation`` is free text for downstream
    joins (e.g. external solvability filters)."""

    patterns: tuple[PackedPerm, ...]
    terms: tuple[int, ...]
    degree: int | None
    degree_checked: bool
    filtered: bool
    anum: int | None
    shift: int | None
    annotation: str = ""


def mine(pattern_length: int, min_size: int, n_max: int, db: OeisDb | None,
         max_shift: int = 14, min_overlap: int = 8,
         progress: Callable[[int], None] | None = None) -> list[MineRow]:
    """Sweep all symmetry classes of pattern sets in S_pattern_length with
    at least min_size patterns: counts |S_5|..|S_n_max| per class, growth
    filter, OEIS lookup for the survivors."""
    layout = layout_for(n_max)
    rows = []
    for done, patterns in enumerate(enumerate_symmetry_classes(pattern_length, min_size)):
        pat = PatternSet.build([PackedPerm.from_letters(p.letters(), layout)
                                for p in patterns])
        counts = count_avoiders_fast(pat, n_max)
        terms = tuple(counts[FIRST_TERM_N - 1:])
        try:
            degree = growth_degree(terms)
            checked = True
        except ValueError:
            degree = None
            checked = False
        filtered = checked and degree is not None
        anum = shift = None
        if not filtered and db is not None:
            hit = oeis_match(terms, db, max_shift=max_shift, min_overlap=min_overlap)
            if hit is not None:
                anum, shift = hit
        rows.append(MineRow(patterns, terms, degree, checked, filtered, anum, shift))
        if progress is not None:
            progress(done + 1)
    return rows


REPORT_HEADER = "canonical_patterns,terms,degree,oeis_anum,shift"


def write_report(rows: Iterable[MineRow], out: TextIO) -> None:
    out.write(REPORT_HEADER + "\n")
    for row in rows:
        pats = " ".join(format_perm(p) for p in row.patterns)
        terms = ";".join(str(t) for t in row.terms)
        if row.degree is not None:
            degree = str(row.degree)
        elif row.degree_checked:
            degree = "superpolynomial"
        else:
            degree = ""
        anum = f"A{row.anum:06d}" if row.anum is not None else ""
        shift = str(row.shift) if row.shift is not None else ""
        out.write(f"{pats},{terms},{degree},{anum},{shift}\n")
