"""Counting covincular-pattern occurrences.

A covincular pattern is a pattern plus value-adjacency constraints: an index
x with 1 <= x <= k-1 forces the letters playing pattern values x and x+1 to
have consecutive values in the host, 0 anchors the smallest letter of a hit
to the host's 1, and k anchors the largest to the host's n.  Consecutive
patterns are the special case X = {1..k-1}.  Vincular patterns (the dashed
notation, with position-adjacency constraints) convert to covincular form by
inverting the pattern; see ``VincularPattern``.

The profile recurrence extends the classical one with a pass-through case:
when the constraint between the i-th and (i+1)-st largest pattern values is
active (that is, k - i is constrained), a hit using the host's entire
i-upfix cannot skip the (i+1)-st largest host letter, so P_i = P_{i+1} and
no deletion term appears.

Only counting is provided.  Building the avoider set with these patterns is
rejected: deleting a letter can create a covincular hit that was not there,
so the avoiders of a covincular pattern do not form a downset and the
construction this package is built on does not apply.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .avoiders import PatternSet, _scan_words
from .counting import ClosureViolationError, CountTally, HitProfile
from .permcore import (
    PackedPerm,
    PartialInverse,
    PermCapacityError,
    delete_down,
    delete_down_next,
    insert_pos,
    inverse_perm,
    kill_pos,
    pack,
)


class UnsupportedConstructionError(NotImplementedError):
    """Raised for operations that are unsound for covincular patterns."""


@dataclass(frozen=True)
class CovincularPattern:
    """A pattern with value-adjacency constraints X, a subset of {0..k}."""

    pattern: PackedPerm
    adjacencies: frozenset[int]

    def __post_init__(self) -> None:
        k = self.pattern.length
        bad = [x for x in self.adjacencies if not 0 <= x <= k]
        if bad:
            raise ValueError(f"adjacency indices {bad} out of 0..{k}")
        if k < 1:
            raise ValueError("covincular pattern needs a nonempty pattern")

    @property
    def k(self) -> int:
        return self.pattern.length

    def is_consecutive(self) -> bool:
        return self.adjacencies == frozenset(range(1, self.k))

    def __str__(self) -> str:
        adj = ",".join(str(x) for x in sorted(self.adjacencies))
        return f"({self.pattern},{{{adj}}})"

    def passes_through(self, i: int) -> bool:
        """Whether P_i = P_{i+1}: the pair of pattern values (k-i, k-i+1)
        carries a constraint that a hit missing the (i+1)-st largest host
        letter could never satisfy."""
        return (self.k - i) in self.adjacencies


@dataclass(frozen=True)
class VincularPattern:
    """Dash-notation pattern with position-adjacency constraints.

    ``dashes`` holds i when a dash follows the i-th letter (so letters i and
    i+1 of the pattern must sit in adjacent host positions), 0 for a leading
    dash (hit starts at host position 1) and k for a trailing dash (hit ends
    at position n).  Inverting the pattern turns position adjacency into
    value adjacency with the same index set: hits of the vincular pattern in
    a host correspond to hits of ``to_covincular()`` in the host's inverse.
    """

    pattern: PackedPerm
    dashes: frozenset[int]

    def __post_init__(self) -> None:
        k = self.pattern.length
        bad = [x for x in self.dashes if not 0 <= x <= k]
        if bad:
            raise ValueError(f"dash positions {bad} out of 0..{k}")

    def to_covincular(self) -> CovincularPattern:
        return CovincularPattern(inverse_perm(self.pattern), self.dashes)


def parse_vincular(text: str) -> VincularPattern:
    """Parse dash notation like "-12-3": a dash before the first letter, after
    the last, or between letters i and i+1 contributes 0, k, or i."""
    text = text.strip()
    if not text:
        raise ValueError("empty vincular pattern")
    dashes = set()
    letters = []
    for ch in text:
        if ch == "-":
            dashes.add(len(letters))
        elif ch.isdigit() and ch != "0":
            letters.append(int(ch))
        else:
            raise ValueError(f"bad vincular pattern {text!r}")
    pattern = PackedPerm.from_letters(letters)
    if len(letters) in dashes and not text.endswith("-"):
        raise ValueError(f"bad vincular pattern {text!r}")
    return VincularPattern(pattern, frozenset(dashes))


# ---------------------------------------------------------------------------
# profile recurrence

def covincular_profile(p: PackedPerm, cov: CovincularPattern,
                       lookup: Callable[[PackedPerm, int], int],
                       inv: PartialInverse | None = None) -> HitProfile:
    """Profile of p for one covincular pattern, given P_i of p's deletions.

    Cases, for i below both n and k: pass-through (P_{i+1}) when the top
    pair at i is constrained, otherwise the classical sum; at i = n the
    profile tests p against the pattern itself (the anchors hold trivially
    there); everything above k or n is zero.
    """
    n = p.length
    k = cov.k
    values = [0] * (k + 2)
    if n <= k and p.word == cov.pattern.word:
        values[n] = 1
    need = min(k, n - 1)
    dels: list[PackedPerm | None] = [None] * (need + 2)
    if need >= 0 and n >= 1:
        if inv is not None and inv.valid_count >= min(k + 1, n):
            prev = delete_down(p, 1)
            dels[1] = prev
            for r in range(2, need + 2):
                prev = delete_down_next(p, prev, inv, r - 1)
                dels[r] = prev
        else:
            for r in range(1, need + 2):
                dels[r] = delete_down(p, r)
    for i in range(min(k, n - 1), -1, -1):
        if cov.passes_through(i):
            values[i] = values[i + 1]
            continue
        try:
            values[i] = lookup(dels[i + 1], i) + values[i + 1]
        except KeyError as exc:
            raise ClosureViolationError(
                f"missing P_{i} of {dels[i + 1]}: input is not a downset") from exc
    return HitProfile(tuple(values))


def _covincular_tally(cov: CovincularPattern, stream, layout,
                      stats: dict | None) -> CountTally:
    """Shared engine: stream of (word, length, inv_word) in nondecreasing
    length, profiles truncated at the first upfix mismatch against the
    pattern's upfixes."""
    pat = PatternSet.build([cov.pattern])
    k = cov.k
    b, mask = layout.bits, layout.mask
    pi_word = cov.pattern.word
    tally = CountTally({})
    entries = 0
    prev: dict[int, tuple[int, ...]] = {0: ()}
    cur: dict[int, tuple[int, ...]] = {}
    cur_len = 0
    for word, m, inv_word in stream:
        if m < cur_len:
            raise ValueError("stream must be nondecreasing in length")
        while m > cur_len:
            prev, cur = (cur if cur_len else prev), {}
            cur_len += 1
        g = _scan_words(word, m, inv_word, min(k, m), pat, layout)
        dels = [0] * (min(g + 1, m) + 1)
        if len(dels) > 1:
            d = kill_pos(word, (inv_word >> (b * (m - 1))) & mask, layout)
            dels[1] = d
            for r in range(2, len(dels)):
                vdel = m - r + 1
                pos_a = (inv_word >> (b * vdel)) & mask
                pos_b = (inv_word >> (b * (vdel - 1))) & mask
                d = insert_pos(d, pos_a, vdel, layout)
                d = kill_pos(d, pos_b, layout)
                dels[r] = d
        prof = [0] * (g + 1)
        acc = 0
        for i in range(g, -1, -1):
            if i == m:
                acc = 1 if word == pi_word else 0
            elif cov.passes_through(i):
                pass
            else:
                try:
                    stored = prev[dels[i + 1]]
                except KeyError:
                    raise ClosureViolationError(
                        f"missing length-{m - 1} member: input is not a downset"
                    ) from None
                acc = (stored[i] if i < len(stored) else 0) + acc
            prof[i] = acc
        entries += g + 1
        cur[word] = tuple(prof)
        tally.add(m, prof[0] if prof else 0)
    if stats is not None:
        stats["profile_entries"] = entries
    return tally


def covincular_count_all(cov: CovincularPattern, n: int,
                         stats: dict | None = None) -> CountTally:
    """Tally of covincular hit counts over every permutation of lengths
    1..n; the upfix cutoff keeps total work proportional to the number of
    permutations."""
    if n < 1:
        raise ValueError("n must be at least 1")
    layout = cov.pattern.layout
    if n > layout.capacity:
        raise PermCapacityError(f"n={n} exceeds layout capacity {layout.capacity}")
    k = cov.k
    b, mask = layout.bits, layout.mask

    def stream():
        level = [(pack([1], layout), 1)]
        m = 1
        while True:
            for word, inv_word in level:
                yield word, m, inv_word
            if m == n:
                return
            nxt = []
            clen = m + 1
            for word, inv_word in level:
                for i in range(1, m + 2):
                    cw = insert_pos(word, i, clen, layout)
                    ci = inv_word
                    for v in range(max(1, clen - k), clen):
                        shift = b * (v - 1)
                        pos = (ci >> shift) & mask
                        if pos >= i:
                            ci += 1 << shift
                    ci |= i << (b * m)
                    nxt.append((cw, ci))
            level = nxt
            m += 1

    return _covincular_tally(cov, stream(), layout, stats)


def covincular_count_downset(
        stream: Iterable[tuple[PackedPerm, PartialInverse | None]],
        cov: CovincularPattern, stats: dict | None = None) -> CountTally:
    """Tally over a downset streamed in nondecreasing length with partial
    inverses (recomputed when too shallow), as in ``counting.count_downset``."""
    layout = cov.pattern.layout
    k = cov.k

    def gen():
        for perm, inv in stream:
            m = perm.length
            if inv is None or inv.valid_count < min(m, k + 1):
                inv = PartialInverse.from_perm(perm, min(m, k + 1))
            yield perm.word, m, inv.word

    return _covincular_tally(cov, gen(), layout, stats)


def covincular_count_set(patterns: Iterable[CovincularPattern], n: int) -> CountTally:
    """Tally of total hits of several covincular patterns over S_<=n.

    Covincular profiles do not combine across patterns the way classical
    ones do, so each pattern is counted separately and the per-permutation
    totals are summed before tallying.
    """
    covs = list(patterns)
    if not covs:
        raise ValueError("no patterns given")
    if n < 1:
        raise ValueError("n must be at least 1")
    layout = covs[0].pattern.layout
    if n > layout.capacity:
        raise PermCapacityError(f"n={n} exceeds layout capacity {layout.capacity}")
    kmax = max(c.k for c in covs)
    b, mask = layout.bits, layout.mask
    tally = CountTally({})
    states = [(c, PatternSet.build([c.pattern]), {0: ()}, {}) for c in covs]
    level = [(pack([1], layout), 1)]
    m = 1
    while True:
        states = [(c, ps, cur if m > 1 else prev, {})
                  for (c, ps, prev, cur) in states]
        for word, inv_word in level:
            total = 0
            for c, ps, prev, cur in states:
                k = c.k
                g = _scan_words(word, m, inv_word, min(k, m), ps, layout)
                dels = [0] * (min(g + 1, m) + 1)
                if len(dels) > 1:
                    d = kill_pos(word, (inv_word >> (b * (m - 1))) & mask, layout)
                    dels[1] = d
                    for r in range(2, len(dels)):
                        vdel = m - r + 1
                        pos_a = (inv_word >> (b * vdel)) & mask
                        pos_b = (inv_word >> (b * (vdel - 1))) & mask
                        d = insert_pos(d, pos_a, vdel, layout)
                        d = kill_pos(d, pos_b, layout)
                        dels[r] = d
                prof = [0] * (g + 1)
                acc = 0
                for i in range(g, -1, -1):
                    if i == m:
                        acc = 1 if word == c.pattern.word else 0
                    elif not c.passes_through(i):
                        stored = prev[dels[i + 1]]
                        acc = (stored[i] if i < len(stored) else 0) + acc
                    prof[i] = acc
                cur[word] = tuple(prof)
                total += prof[0] if prof else 0
            tally.add(m, total)
        if m == n:
            return tally
        nxt = []
        clen = m + 1
        for word, inv_word in level:
            for i in range(1, m + 2):
                cw = insert_pos(word, i, clen, layout)
                ci = inv_word
                for v in range(max(1, clen - kmax), clen):
                    shift = b * (v - 1)
                    pos = (ci >> shift) & mask
                    if pos >= i:
                        ci += 1 << shift
                ci |= i << (b * m)
                nxt.append((cw, ci))
        level = nxt
        m += 1


def build_covincular_avoiders(*args, **kwargs):
    """Unsupported: covincular avoiders are not closed under letter deletion
    (removing a letter can create a hit), so the bottom-up construction used
    for classical patterns is unsound here."""
    raise UnsupportedConstructionError(
        "building S_n of covincular avoiders is unsupported: avoider sets of "
        "covincular patterns are not downsets")
