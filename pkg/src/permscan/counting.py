"""Counting pattern hits in every permutation of a downset.

The central quantity is the profile P_0..P_{k+1} of a host permutation:
P_i is the number of hits that use the host's entire i-upfix, so P_0 is the
total hit count.  P obeys a one-step recurrence: a hit using the i-upfix
either also uses the (i+1)-st largest letter (counted by P_{i+1}) or
survives deleting it (counted by P_i of that deletion).  Processing hosts in
increasing length therefore costs O(k) per host.

Engines:

* ``count_all`` - every permutation of lengths 1..n.  Hosts are indexed by
  their max-insertion history (a mixed-radix code), which makes each level a
  dense array and each deletion an index computation, so whole levels run as
  vector operations.
* ``count_downset`` - any streamed downset, hash-table based.
* ``count_single_fast`` - single pattern: stops computing the profile at the
  first upfix of the host that is not an upfix of the pattern (everything
  above is zero and is never needed again), giving amortized O(1) per host.
* ``count_all_lowmem`` - identical tally to ``count_all`` via a depth-first
  traversal of the inclusion tree that keeps profile batches only along one
  root-to-leaf path.
* ``build_bounded_hits`` - the permutations with at most j hits, built
  bottom-up with rejection, together with their profiles.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .avoiders import PatternSet, _scan_words
from .permcore import (
    PackedPerm,
    PartialInverse,
    PermCapacityError,
    PermLayout,
    delete_down,
    delete_down_next,
    insert_pos,
    kill_pos,
    pack,
)


class ClosureViolationError(LookupError):
    """A needed shorter permutation was never supplied: the input set is not
    closed under deleting a letter and standardizing."""


@dataclass(frozen=True)
class HitProfile:
    """P_0..P_{k+1} for one host: P_i counts the hits containing the host's
    entire i-upfix."""

    values: tuple[int, ...]

    @property
    def p0(self) -> int:
        return self.values[0]

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class CountTally:
    """Per length, a sparse map from hit count to how many permutations of
    the processed set have that many hits."""

    by_length: dict[int, dict[int, int]]

    def level(self, m: int) -> dict[int, int]:
        return self.by_length.get(m, {})

    def total(self, m: int) -> int:
        return sum(self.by_length.get(m, {}).values())

    def hits_sum(self, m: int) -> int:
        return sum(h * c for h, c in self.by_length.get(m, {}).items())

    def zero_counts(self) -> dict[int, int]:
        return {m: lvl.get(0, 0) for m, lvl in self.by_length.items()}

    def rows(self) -> list[tuple[int, int, int]]:
        out = []
        for m in sorted(self.by_length):
            for hits in sorted(self.by_length[m]):
                out.append((m, hits, self.by_length[m][hits]))
        return out

    def add(self, m: int, hits: int, mult: int = 1) -> None:
        lvl = self.by_length.setdefault(m, {})
        lvl[hits] = lvl.get(hits, 0) + mult


# ---------------------------------------------------------------------------
# single-host profile (the public recurrence step)

def count_profile(p: PackedPerm, pat: PatternSet,
                  lookup: Callable[[PackedPerm, int], int],
                  inv: PartialInverse | None = None) -> HitProfile:
    """Profile of p, given P_i values of its one-letter deletions.

    ``lookup(q, i)`` must return P_i(q) for every deletion q of p actually
    requested; a KeyError from it is reported as a downset-closure
    violation.  ``inv`` (valid in the top k+1 values) lets the deletions be
    computed by the constant-time chain instead of rescanning.
    """
    n = p.length
    k = pat.k
    values = [0] * (k + 2)
    if n <= k and p.word in pat.words:
        values[n] = 1
    dels: list[PackedPerm | None] = [None] * (min(k + 1, n) + 1)
    if n >= 1 and min(k + 1, n) >= 1:
        if inv is not None and inv.valid_count >= min(k + 1, n):
            prev = delete_down(p, 1)
            dels[1] = prev
            for r in range(2, min(k + 1, n) + 1):
                prev = delete_down_next(p, prev, inv, r - 1)
                dels[r] = prev
        else:
            for r in range(1, min(k + 1, n) + 1):
                dels[r] = delete_down(p, r)
    for i in range(min(k, n - 1), -1, -1):
        try:
            values[i] = lookup(dels[i + 1], i) + values[i + 1]
        except KeyError as exc:
            raise ClosureViolationError(
                f"missing P_{i} of {dels[i + 1]}: input is not a downset") from exc
    return HitProfile(tuple(values))


# ---------------------------------------------------------------------------
# dense whole-of-S_<=n engine
#
# Level m is ordered by insertion code: a permutation's index is
# I(parent) * m + (position of the maximum - 1), so the index is a
# mixed-radix numeral whose digit for letter t is t's insertion position.
# Deleting a letter rewrites a bounded suffix of those digits, which is pure
# index arithmetic and vectorizes over a whole level.

_DENSE_MAX_N = 11  # level arrays are m!-sized; beyond this use count_all_lowmem


def _membership_vector(pat: PatternSet, m: int, layout: PermLayout) -> np.ndarray:
    """[word in Pi] for level m <= k, in insertion-code order."""
    words = [0]
    for t in range(1, m + 1):
        words = [insert_pos(w, i, t, layout) for w in words for i in range(1, t + 1)]
    return np.fromiter((1 if w in pat.words else 0 for w in words),
                       dtype=np.int64, count=len(words))


def _deletion_index(I: np.ndarray, digits: dict[int, np.ndarray],
                    prefixes: dict[int, np.ndarray], m: int, rank: int) -> np.ndarray:
    """Index of each level-m permutation's rank-th down-deletion in level m-1."""
    v = m - rank + 1
    J = prefixes[v]
    if rank == 1:
        return J
    p0 = digits[v] + 1
    for t in range(v + 1, m + 1):
        c = digits[t] + 1
        J = J * (t - 1) + (c - (c > p0) - 1)
        p0 = p0 + (c <= p0)
    return J


def _dense_levels(pat: PatternSet, n: int, layout: PermLayout):
    """Yield (m, P_arrays) for m = 1..n; P_arrays[i] is P_i over level m in
    insertion-code order, for i = 0..min(k, m)."""
    k = pat.k
    prev: list[np.ndarray] = [np.zeros(1, dtype=np.int64)]
    size = 1
    for m in range(1, n + 1):
        size *= m
        I = np.arange(size, dtype=np.int64)
        max_rank = min(k + 1, m)
        digits: dict[int, np.ndarray] = {}
        prefixes: dict[int, np.ndarray] = {}
        Q = I
        for t in range(m, m - max_rank, -1):
            digits[t] = Q % t
            Q = Q // t
            prefixes[t] = Q
        cur: list[np.ndarray | None] = [None] * (min(k, m) + 1)
        if m <= k:
            acc = _membership_vector(pat, m, layout)
            cur[m] = acc
        else:
            acc = np.zeros(size, dtype=np.int64)
        for i in range(min(k, m - 1), -1, -1):
            J = _deletion_index(I, digits, prefixes, m, i + 1)
            acc = prev[i][J] + acc
            cur[i] = acc
        yield m, cur
        prev = cur


def count_all(pat: PatternSet, n: int) -> CountTally:
    """Tally of hit counts over every permutation of lengths 1..n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > _DENSE_MAX_N:
        raise ValueError(
            f"count_all holds whole m! levels in memory; use count_all_lowmem for n={n}")
    layout = pat.layout
    if n > layout.capacity:
        raise PermCapacityError(f"n={n} exceeds layout capacity {layout.capacity}")
    tally = CountTally({})
    for m, cur in _dense_levels(pat, n, layout):
        vals, mults = np.unique(cur[0], return_counts=True)
        for v, c in zip(vals.tolist(), mults.tolist()):
            tally.add(m, v, c)
    return tally


# ---------------------------------------------------------------------------
# streamed downsets (hash-table engine)

def count_downset(stream: Iterable[tuple[PackedPerm, PartialInverse | None]],
                  pat: PatternSet,
                  emit: Callable[[PackedPerm, HitProfile], None] | None = None,
                  ) -> CountTally:
    """Tally hit counts over a downset streamed in nondecreasing length.

    Each element comes with a partial inverse valid in its top k+1 values
    (elements built by repeated max-insertion have these for free; anything
    shallower is recomputed here).  Profiles are stored only up to the first
    upfix of the host that is no upfix of any pattern; entries beyond are
    zero and are never requested by longer hosts.  A host whose deletion was
    never streamed raises ClosureViolationError.
    """
    k = pat.k
    layout = pat.layout
    b, mask = layout.bits, layout.mask
    pi_words = pat.words
    tally = CountTally({})
    prev: dict[int, tuple[int, ...]] = {0: ()}
    cur: dict[int, tuple[int, ...]] = {}
    cur_len = 0
    for perm, inv in stream:
        m = perm.length
        if m < cur_len:
            raise ValueError("stream must be nondecreasing in length")
        while m > cur_len:
            prev, cur = (cur if cur_len else prev), {}
            cur_len += 1
        if inv is None or inv.valid_count < min(m, k + 1):
            inv = PartialInverse.from_perm(perm, min(m, k + 1))
        word = perm.word
        inv_word = inv.word
        g = _scan_words(word, m, inv_word, min(k, m), pat, layout)
        dels = [0] * (min(g + 1, m) + 1)
        if m >= 1 and dels and len(dels) > 1:
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
                acc = 1 if word in pi_words else 0
            else:
                try:
                    stored = prev[dels[i + 1]]
                except KeyError:
                    raise ClosureViolationError(
                        f"missing length-{m - 1} member below {perm}: "
                        "input is not a downset") from None
                acc = (stored[i] if i < len(stored) else 0) + acc
            prof[i] = acc
        cur[word] = tuple(prof)
        tally.add(m, prof[0] if prof else 0)
        if emit is not None:
            values = [0] * (k + 2)
            values[:len(prof)] = prof
            emit(perm, HitProfile(tuple(values)))
    return tally


# ---------------------------------------------------------------------------
# permutations with at most j hits

@dataclass
class BoundedHits:
    """Permutations of lengths 1..n with at most `budget` hits, by length,
    with the profile of every member."""

    budget: int
    levels: dict[int, set[PackedPerm]]
    profiles: dict[PackedPerm, HitProfile]


def build_bounded_hits(pat: PatternSet, n: int, budget: int) -> BoundedHits:
    """Bottom-up construction: a candidate is kept iff all its k+1 top
    deletions were kept and its own hit count is within budget (partial
    profile rows of rejected candidates are rolled back)."""
    if budget < 0:
        raise ValueError("hit budget must be nonnegative")
    if n < 1:
        raise ValueError("n must be at least 1")
    layout = pat.layout
    if n > layout.capacity:
        raise PermCapacityError(f"n={n} exceeds layout capacity {layout.capacity}")
    k = pat.k
    b, mask = layout.bits, layout.mask
    result = BoundedHits(budget, {m: set() for m in range(1, n + 1)}, {})
    profiles: dict[int, tuple[int, ...]] = {0: (0,) * (k + 2)}
    one = pack([1], layout)
    one_profile = [0] * (k + 2)
    if one in pat.words:
        one_profile[1] = 1
        one_profile[0] = 1
    if one_profile[0] > budget:
        return result
    profiles[one] = tuple(one_profile)
    p_one = PackedPerm(one, 1, layout)
    result.levels[1].add(p_one)
    result.profiles[p_one] = HitProfile(tuple(one_profile))
    queue: deque[tuple[int, int, int]] = deque()
    if n > 1:
        queue.append((one, 1, 1))
    while queue:
        word, m, inv_word = queue.popleft()
        clen = m + 1
        for i in range(1, m + 2):
            cand = insert_pos(word, i, clen, layout)
            ci = inv_word
            for v in range(max(1, clen - k), clen):
                shift = b * (v - 1)
                pos = (ci >> shift) & mask
                if pos >= i:
                    ci += 1 << shift
            ci |= i << (b * m)
            values = [0] * (k + 2)
            if clen <= k and cand in pat.words:
                values[clen] = 1
            dels = [0] * (min(k + 1, clen) + 1)
            d = kill_pos(cand, (ci >> (b * (clen - 1))) & mask, layout)
            dels[1] = d
            for r in range(2, len(dels)):
                vdel = clen - r + 1
                pos_a = (ci >> (b * vdel)) & mask
                pos_b = (ci >> (b * (vdel - 1))) & mask
                d = insert_pos(d, pos_a, vdel, layout)
                d = kill_pos(d, pos_b, layout)
                dels[r] = d
            ok = True
            for idx in range(min(k, clen - 1), -1, -1):
                stored = profiles.get(dels[idx + 1])
                if stored is None:
                    ok = False
                    break
                values[idx] = stored[idx] + values[idx + 1]
            if not ok or values[0] > budget:
                continue
            profiles[cand] = tuple(values)
            q = PackedPerm(cand, clen, layout)
            result.levels[clen].add(q)
            result.profiles[q] = HitProfile(tuple(values))
            if clen < n:
                queue.append((cand, clen, ci))
    return result


# ---------------------------------------------------------------------------
# single-pattern engine with the upfix cutoff

def count_single_fast(pattern: PackedPerm, n: int,
                      stats: dict | None = None) -> CountTally:
    """Tally for a single pattern over S_<=n in Theta(n!) total work.

    For each host only P_0..P_g are computed, g being the deepest upfix of
    the host order-isomorphic to the pattern's; sum of g over a level is a
    vanishing fraction of the level, so work per host is amortized constant.
    ``stats['profile_entries']`` reports exactly how many P values were
    computed.
    """
    pat = PatternSet.build([pattern])
    if n < 1:
        raise ValueError("n must be at least 1")
    layout = pat.layout
    if n > layout.capacity:
        raise PermCapacityError(f"n={n} exceeds layout capacity {layout.capacity}")
    k = pat.k
    b, mask = layout.bits, layout.mask
    pi_word = pattern.word
    tally = CountTally({})
    entries = 0
    prev: dict[int, tuple[int, ...]] = {0: ()}
    level: list[tuple[int, int]] = [(pack([1], layout), 1)]
    m = 1
    while True:
        cur: dict[int, tuple[int, ...]] = {}
        for word, inv_word in level:
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
                else:
                    stored = prev[dels[i + 1]]
                    acc = (stored[i] if i < len(stored) else 0) + acc
                prof[i] = acc
            entries += g + 1
            cur[word] = tuple(prof)
            tally.add(m, prof[0])
        if m == n:
            break
        nxt: list[tuple[int, int]] = []
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
        prev = cur
        level = nxt
        m += 1
    if stats is not None:
        stats["profile_entries"] = entries
    return tally


# ---------------------------------------------------------------------------
# low-memory engine: depth-first batches over the inclusion tree

def count_all_lowmem(pat: PatternSet, n: int, stats: dict | None = None) -> CountTally:
    """Same tally as ``count_all`` holding O(n^{k+1}) profile rows.

    The k-level descendants of a tree node form one dense batch (indexed by
    the node-relative suffix of the insertion code); a node's batch is
    computed from its parent's and freed on backtrack.  ``stats`` receives
    ``max_live_profile_rows`` (a row is one host's k+1 profile values).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    layout = pat.layout
    if n > layout.capacity:
        raise PermCapacityError(f"n={n} exceeds layout capacity {layout.capacity}")
    k = pat.k
    if n < k:
        if stats is not None:
            stats["max_live_profile_rows"] = (
                _factorial(n) + (_factorial(n - 1) if n >= 2 else 0))
        return count_all(pat, n)

    tally = CountTally({})
    base: list[np.ndarray] | None = None
    for m, cur in _dense_levels(pat, min(k, n), layout):
        vals, mults = np.unique(cur[0], return_counts=True)
        for v, c in zip(vals.tolist(), mults.tolist()):
            tally.add(m, v, c)
        base = cur
    assert base is not None
    state = {"live": base[0].size, "peak": base[0].size}

    def expand(m: int, p: int, parent: list[np.ndarray]) -> list[np.ndarray]:
        # batch of C^k(u) for u = v ^ p with |v| = m, from the batch of C^k(v)
        radices = [m + 1 + t for t in range(1, k + 1)]
        size = 1
        for r_ in radices:
            size *= r_
        L = np.arange(size, dtype=np.int64)
        digits: dict[int, np.ndarray] = {}
        Q = L
        for t in range(k, 0, -1):
            digits[t] = Q % radices[t - 1]
            Q = Q // radices[t - 1]
        child_len = m + 1 + k
        idx: dict[int, np.ndarray] = {}
        for rank in range(1, k + 2):
            if rank <= k:
                t_star = k + 1 - rank
                p0 = digits[t_star] + 1
                J = np.full(size, p - 1, dtype=np.int64)
                for t in range(2, t_star + 1):
                    J = J * (m + t) + digits[t - 1]
                for t in range(t_star + 1, k + 1):
                    c = digits[t] + 1
                    J = J * (m + t) + (c - (c > p0) - 1)
                    p0 = p0 + (c <= p0)
            else:
                p0 = np.full(size, p, dtype=np.int64)
                J = None
                for t in range(1, k + 1):
                    c = digits[t] + 1
                    d2 = c - (c > p0) - 1
                    J = d2 if J is None else J * (m + t) + d2
                    p0 = p0 + (c <= p0)
            idx[rank] = J
        cur: list[np.ndarray | None] = [None] * (k + 1)
        acc = np.zeros(size, dtype=np.int64)
        for i in range(k, -1, -1):
            acc = parent[i][idx[i + 1]] + acc
            cur[i] = acc
        vals, mults = np.unique(cur[0], return_counts=True)
        for v, c in zip(vals.tolist(), mults.tolist()):
            tally.add(child_len, v, c)
        state["live"] += size
        state["peak"] = max(state["peak"], state["live"])
        return cur

    def visit(m: int, p: int, parent: list[np.ndarray]) -> None:
        batch = expand(m, p, parent)
        if m + 1 < n - k:
            for p2 in range(1, m + 3):
                visit(m + 1, p2, batch)
        state["live"] -= batch[0].size

    if n - k >= 1:
        visit(0, 1, base)
    if stats is not None:
        stats["max_live_profile_rows"] = state["peak"]
    return tally


def _factorial(m: int) -> int:
    out = 1
    for t in range(2, m + 1):
        out *= t
    return out
