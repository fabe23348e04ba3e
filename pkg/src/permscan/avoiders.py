"""Building and counting pattern-avoiding permutations.

Three engines, all producing the avoiders of each length 1..n:

* ``build_avoiders_basic`` - breadth-first insertion of the new maximum with
  a per-candidate membership test against the previous level (quadratic
  per-avoider, the straightforward dynamic program).
* ``count_avoiders_fast`` / ``enumerate_avoiders_fast`` - the extension-map
  engine: each avoider carries a bit map over insertion positions saying
  which children avoid, assembled by AND-ing shifted maps of its one-letter
  deletions.  Counting a level is a popcount; materializing children walks
  the set bits.  O(k) work per avoider.
* ``count_avoiders_lowmem`` - the same recurrence run as a depth-first
  traversal of the inclusion tree, keeping extension maps only along one
  root-to-leaf path (O(n^k) live maps instead of a whole level).

Hosts may be restricted to any downset via ``downset_filter``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .permcore import (
    NIBBLE,
    PackedPerm,
    PartialInverse,
    PermCapacityError,
    PermLayout,
    delete_down,
    insert_pos,
    insert_up,
    kill_pos,
    pack,
    parse_perm,
    upfix,
)

_PATTERN_TOKEN = re.compile(r"\[[^\]]*\]|[^\s,]+")


@dataclass(frozen=True)
class PatternSet:
    """A set of forbidden patterns, with per-size tables of their upfixes.

    ``upfix_table(i)`` holds the packed standardizations of the i-upfix of
    every pattern with at least i letters; engines use it to recognize, in
    constant time per size, whether a host's i-upfix could still begin a hit.
    """

    patterns: tuple[PackedPerm, ...]
    k: int
    words: frozenset[int]
    _tables: tuple[frozenset[int], ...]

    @classmethod
    def build(cls, patterns: Iterable[PackedPerm]) -> "PatternSet":
        by_word = {p.word: p for p in patterns}
        pats = tuple(sorted(by_word.values(), key=lambda p: (p.length, p.word)))
        if not pats:
            raise ValueError("a pattern set needs at least one pattern")
        if len({p.layout for p in pats}) != 1:
            raise ValueError("patterns mix word layouts")
        k = max(p.length for p in pats)
        tables = tuple(
            frozenset(upfix(p, i).word for p in pats if p.length >= i)
            for i in range(1, k + 1)
        )
        return cls(pats, k, frozenset(by_word), tables)

    @classmethod
    def parse(cls, text: str, layout: PermLayout = NIBBLE) -> "PatternSet":
        tokens = _PATTERN_TOKEN.findall(text)
        if not tokens:
            raise ValueError(f"no patterns in {text!r}")
        perms = []
        for tok in tokens:
            if tok.startswith("["):
                perms.append(parse_perm(tok[1:-1].strip(), layout))
            else:
                perms.append(parse_perm(tok, layout))
        return cls.build(perms)

    @property
    def layout(self) -> PermLayout:
        return self.patterns[0].layout

    def upfix_table(self, i: int) -> frozenset[int]:
        if 1 <= i <= self.k:
            return self._tables[i - 1]
        return frozenset()

    def lengths(self) -> tuple[int, ...]:
        return tuple(sorted({p.length for p in self.patterns}))

    def __iter__(self) -> Iterator[PackedPerm]:
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def __contains__(self, p: PackedPerm) -> bool:
        return p.word in self.words


@dataclass(frozen=True)
class ExtensionMap:
    """Bit map over insertion positions 1..width; bit i set means inserting
    the new maximum at position i leaves an avoider."""

    bits: int
    width: int

    def test(self, i: int) -> bool:
        if not 1 <= i <= self.width:
            raise IndexError(f"position {i} out of 1..{self.width}")
        return bool((self.bits >> (i - 1)) & 1)

    def positions(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.width + 1) if self.test(i))

    def popcount(self) -> int:
        return self.bits.bit_count()

    def __str__(self) -> str:
        return "".join("1" if self.test(i) else "0" for i in range(1, self.width + 1))


@dataclass(frozen=True)
class AvoiderRecord:
    """One streamed avoider: the permutation, a partial inverse valid in its
    top-k values, and its extension map (None at the final level, where maps
    are never computed)."""

    perm: PackedPerm
    inverse: PartialInverse
    extension_map: ExtensionMap | None


@dataclass(frozen=True)
class AvoiderLevel:
    """All avoiders of one length, as (permutation, inverse, map) records."""

    length: int
    records: tuple[AvoiderRecord, ...]

    def perms(self) -> set[PackedPerm]:
        return {r.perm for r in self.records}

    def __len__(self) -> int:
        return len(self.records)


def collect_avoider_levels(pat: "PatternSet", n: int) -> list[AvoiderLevel]:
    """Materialize the stream of ``enumerate_avoiders_fast`` per length."""
    buckets: dict[int, list[AvoiderRecord]] = {m: [] for m in range(1, n + 1)}
    enumerate_avoiders_fast(pat, n, lambda r: buckets[r.perm.length].append(r))
    return [AvoiderLevel(m, tuple(buckets[m])) for m in range(1, n + 1)]


def _check_n(n: int, layout: PermLayout) -> None:
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > layout.capacity:
        raise PermCapacityError(f"n={n} exceeds layout capacity {layout.capacity}")


# ---------------------------------------------------------------------------
# plain detection + breadth-first builder

def detect_avoider(p: PackedPerm, pat: PatternSet, below: "set[int] | frozenset[int]",
                   upfix_cutoff: bool = False) -> bool:
    """Is p an avoider, given the packed words of all shorter avoiders?

    p avoids iff p is not itself a pattern and deleting each of the
    min(k+1, n) largest letters leaves an avoider.  With ``upfix_cutoff``
    the deletion tests stop once p's upfix can no longer begin any hit;
    the answer is unchanged.
    """
    if p.word in pat.words:
        return False
    n = p.length
    limit = min(pat.k + 1, n)
    if upfix_cutoff:
        inv = PartialInverse.from_perm(p)
        matched = _scan_words(p.word, n, inv.word, min(pat.k, n), pat, p.layout)
        limit = min(limit, matched + 1)
    word = p.word
    for rank in range(1, limit + 1):
        if _delete_down_word(word, n, rank, p.layout) not in below:
            return False
    return True


def _delete_down_word(word: int, n: int, rank: int, layout: PermLayout) -> int:
    b, m = layout.bits, layout.mask
    value = n - rank + 1
    pos = 1
    while (word >> (b * (pos - 1))) & m != value:
        pos += 1
    word = kill_pos(word, pos, layout)
    out = 0
    for i in range(n - 1):
        v = (word >> (b * i)) & m
        out |= (v - 1 if v > value else v) << (b * i)
    return out


def _scan_words(word: int, n: int, inv_word: int, r: int, pat: PatternSet,
                layout: PermLayout) -> int:
    """Word-level upfix scan: largest i <= r with st(i-upfix) in the tables."""
    b, m = layout.bits, layout.mask
    bitmap = 0
    st = 0
    matched = 0
    for i in range(1, min(r, n) + 1):
        pos = (inv_word >> (b * (n - i))) & m
        below = (bitmap & ((1 << (pos - 1)) - 1)).bit_count()
        st = insert_pos(st + layout.ones(i - 1), below + 1, 1, layout)
        bitmap |= 1 << (pos - 1)
        if st not in pat.upfix_table(i):
            break
        matched = i
    return matched


def build_avoiders_basic(pat: PatternSet, n: int,
                         downset_filter: Callable[[PackedPerm], bool] | None = None,
                         ) -> dict[int, set[PackedPerm]]:
    """All avoiders of lengths 1..n (optionally intersected with a downset).

    Breadth-first in length: every candidate is an avoider of the previous
    level with the new maximum inserted somewhere, tested by deleting each of
    the k+1 largest letters.  ``downset_filter`` is applied to a candidate
    before the avoidance test and must define a downset.
    """
    layout = pat.layout
    _check_n(n, layout)
    levels: dict[int, set[PackedPerm]] = {m: set() for m in range(1, n + 1)}
    one = pack([1], layout)
    if one in pat.words:
        return levels
    if downset_filter is not None and not downset_filter(PackedPerm(one, 1, layout)):
        return levels
    levels[1].add(PackedPerm(one, 1, layout))
    seen: set[int] = {one}
    queue: deque[tuple[int, int]] = deque()
    if n > 1:
        queue.append((one, 1))
    k = pat.k
    words = pat.words
    while queue:
        word, m = queue.popleft()
        clen = m + 1
        for i in range(1, m + 2):
            cand = insert_pos(word, i, clen, layout)
            if downset_filter is not None and not downset_filter(
                    PackedPerm(cand, clen, layout)):
                continue
            if cand in words:
                continue
            ok = True
            for rank in range(1, min(k + 1, clen) + 1):
                if _delete_down_word(cand, clen, rank, layout) not in seen:
                    ok = False
                    break
            if ok:
                seen.add(cand)
                levels[clen].add(PackedPerm(cand, clen, layout))
                if clen < n:
                    queue.append((cand, clen))
    return levels


# ---------------------------------------------------------------------------
# extension-map engine (level-synchronous)

def _seed_level(pat: PatternSet, layout: PermLayout):
    psi = 0 if pack([1], layout) in pat.words else 1
    return [0], [0], [psi]


def _advance_level(m: int, words: list[int], invs: list[int], psis: list[int],
                   pat: PatternSet, layout: PermLayout):
    """Build level m+1 (words, partial inverses, extension maps) from level m."""
    b, mask = layout.bits, layout.mask
    k = pat.k
    psi_of = dict(zip(words, psis))
    c_words: list[int] = []
    c_invs: list[int] = []
    c_parents: list[int] = []
    new_len = m + 1
    for w, iv, psi in zip(words, invs, psis):
        bits = psi
        while bits:
            low = bits & -bits
            i = low.bit_length()
            bits ^= low
            cw = insert_pos(w, i, new_len, layout)
            ci = iv
            for v in range(max(1, new_len + 1 - k), new_len):
                shift = b * (v - 1)
                pos = (ci >> shift) & mask
                if pos >= i:
                    ci += 1 << shift
            ci |= i << (b * (new_len - 1))
            c_words.append(cw)
            c_invs.append(ci)
            c_parents.append(w)
    c_psis: list[int] = []
    full = (1 << (new_len + 1)) - 1
    check_membership = new_len + 1 <= k
    for cw, ci, parent in zip(c_words, c_invs, c_parents):
        psi_c = full
        d = parent
        for r in range(1, min(new_len, k) + 1):
            vdel = new_len - r + 1
            q = (ci >> (b * (vdel - 1))) & mask
            if r > 1:
                pos_a = (ci >> (b * vdel)) & mask
                d = insert_pos(d, pos_a, vdel, layout)
                d = kill_pos(d, q, layout)
            src = psi_of[d]
            psi_c &= (src & ((1 << q) - 1)) | ((src >> (q - 1)) << q)
            if not psi_c:
                break
        if check_membership and psi_c:
            bits = psi_c
            while bits:
                low = bits & -bits
                i = low.bit_length()
                bits ^= low
                if insert_pos(cw, i, new_len + 1, layout) in pat.words:
                    psi_c ^= low
        c_psis.append(psi_c)
    return c_words, c_invs, c_psis


def enumerate_avoiders_fast(pat: PatternSet, n: int,
                            sink: Callable[[AvoiderRecord], None]) -> None:
    """Stream every avoider of lengths 1..n to sink, levels in increasing
    order (order within a level is unspecified)."""
    layout = pat.layout
    _check_n(n, layout)
    k = pat.k
    b, mask = layout.bits, layout.mask
    words, invs, psis = _seed_level(pat, layout)
    for m in range(0, n):
        if not words:
            return
        if m + 1 < n:
            nwords, ninvs, npsis = _advance_level(m, words, invs, psis, pat, layout)
            for w, iv, psi in zip(nwords, ninvs, npsis):
                sink(AvoiderRecord(
                    PackedPerm(w, m + 1, layout),
                    PartialInverse(iv, min(m + 1, k)),
                    ExtensionMap(psi, m + 2)))
            words, invs, psis = nwords, ninvs, npsis
        else:
            new_len = m + 1
            for w, iv, psi in zip(words, invs, psis):
                bits = psi
                while bits:
                    low = bits & -bits
                    i = low.bit_length()
                    bits ^= low
                    cw = insert_pos(w, i, new_len, layout)
                    ci = iv
                    for v in range(max(1, new_len + 1 - k), new_len):
                        shift = b * (v - 1)
                        pos = (ci >> shift) & mask
                        if pos >= i:
                            ci += 1 << shift
                    ci |= i << (b * (new_len - 1))
                    sink(AvoiderRecord(
                        PackedPerm(cw, new_len, layout),
                        PartialInverse(ci, min(new_len, k)),
                        None))


def count_avoiders_fast(pat: PatternSet, n: int,
                        vectorized: bool | None = None) -> list[int]:
    """[|S_1|, ..., |S_n|] via extension maps; levels are tallied by popcount
    and the final level is never materialized."""
    layout = pat.layout
    _check_n(n, layout)
    if vectorized is None:
        vectorized = layout.bits * (n + 1) <= 64 and n + 2 <= 32
    if vectorized:
        return _count_fast_numpy(pat, n, layout)
    counts = [0] * n
    words, invs, psis = _seed_level(pat, layout)
    for m in range(0, n):
        counts[m] = sum(psi.bit_count() for psi in psis)
        if m + 1 == n or counts[m] == 0:
            break
        words, invs, psis = _advance_level(m, words, invs, psis, pat, layout)
    return counts


def _count_fast_numpy(pat: PatternSet, n: int, layout: PermLayout) -> list[int]:
    b = layout.bits
    k = pat.k
    u64 = np.uint64
    u32 = np.uint32
    mask64 = u64(layout.mask)
    one64 = u64(1)
    b64 = u64(b)
    counts = [0] * n
    words0, invs0, psis0 = _seed_level(pat, layout)
    W = np.array(words0, dtype=np.uint64)
    INV = np.array(invs0, dtype=np.uint64)
    PSI = np.array(psis0, dtype=np.uint32)
    for m in range(0, n):
        counts[m] = int(np.bitwise_count(PSI).astype(np.int64).sum())
        if m + 1 == n or counts[m] == 0:
            break
        new_len = m + 1
        parts: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        for p in range(1, m + 2):
            idx = np.nonzero((PSI >> u32(p - 1)) & u32(1))[0]
            if idx.size == 0:
                continue
            Wp = W[idx]
            low_mask = u64((1 << (b * (p - 1))) - 1)
            CW = ((Wp & low_mask)
                  | ((Wp >> u64(b * (p - 1))) << u64(b * p))
                  | u64(new_len << (b * (p - 1))))
            CI = INV[idx].copy()
            for v in range(max(1, new_len + 1 - k), new_len):
                shift = u64(b * (v - 1))
                pos = (CI >> shift) & mask64
                CI += (pos >= u64(p)).astype(np.uint64) << shift
            CI |= u64(p << (b * m))
            parts.append((CW, CI, Wp))
        CW = np.concatenate([t[0] for t in parts])
        CI = np.concatenate([t[1] for t in parts])
        PARW = np.concatenate([t[2] for t in parts])
        order = np.argsort(CW, kind="stable")
        CW, CI, PARW = CW[order], CI[order], PARW[order]
        PSIc = np.full(CW.shape, u32((1 << (new_len + 1)) - 1), dtype=np.uint32)
        D = PARW
        for r in range(1, min(new_len, k) + 1):
            vdel = new_len - r + 1
            q = (CI >> u64(b * (vdel - 1))) & mask64
            if r > 1:
                pos_a = (CI >> u64(b * vdel)) & mask64
                sh_a = (pos_a - one64) * b64
                low_a = (one64 << sh_a) - one64
                D = (D & low_a) | ((D >> sh_a) << (sh_a + b64)) | (u64(vdel) << sh_a)
                sh_b = (q - one64) * b64
                low_b = (one64 << sh_b) - one64
                D = (D & low_b) | ((D >> (sh_b + b64)) << sh_b)
            j = np.searchsorted(W, D)
            src = PSI[j]
            qq = q.astype(np.uint32)
            low_q = (u32(1) << qq) - u32(1)
            PSIc &= (src & low_q) | ((src >> (qq - u32(1))) << qq)
        if new_len + 1 <= k:
            psis_list = PSIc.tolist()
            cw_list = CW.tolist()
            for t, (cw, psi_c) in enumerate(zip(cw_list, psis_list)):
                bits = psi_c
                while bits:
                    low = bits & -bits
                    i = low.bit_length()
                    bits ^= low
                    if insert_pos(cw, i, new_len + 1, layout) in pat.words:
                        psi_c ^= low
                psis_list[t] = psi_c
            PSIc = np.array(psis_list, dtype=np.uint32)
        W, INV, PSI = CW, CI, PSIc
    return counts


# ---------------------------------------------------------------------------
# low-memory engine: depth-first over the inclusion tree

def count_avoiders_lowmem(pat: PatternSet, n: int,
                          stats: dict | None = None) -> list[int]:
    """Same counts as ``count_avoiders_fast`` in O(n^k) space.

    Avoiders are grouped by the pattern of their smallest letters; the group
    of maps for a tree node is built from its parent's group and discarded
    on backtrack, so only one root-to-leaf path of groups is ever live.
    ``stats``, if given, receives ``max_live_extension_maps``.
    """
    layout = pat.layout
    _check_n(n, layout)
    k = pat.k
    if n < k:
        counts = count_avoiders_fast(pat, n, vectorized=False)
        if stats is not None:
            stats["max_live_extension_maps"] = sum(counts)
        return counts

    counts = [0] * n
    words, invs, psis = _seed_level(pat, layout)
    for m in range(0, k - 1):
        counts[m] = sum(psi.bit_count() for psi in psis)
        words, invs, psis = _advance_level(m, words, invs, psis, pat, layout)
    # `words` is now S_{k-1}(Pi), the group of the single tree node of size
    # zero; its popcounts tally |S_k|.
    counts[k - 1] = sum(psi.bit_count() for psi in psis)

    state = {"live": len(words), "peak": len(words)}
    b, mask = layout.bits, layout.mask

    def build_group(group_words, group_invs, group_psis, psi_of, child_len):
        """Extend a group one letter: children words/inverses/maps, plus the
        popcount total that tallies level child_len + 1."""
        c_words: list[int] = []
        c_invs: list[int] = []
        c_parents: list[int] = []
        for w, iv, psi in zip(group_words, group_invs, group_psis):
            bits = psi
            while bits:
                low = bits & -bits
                i = low.bit_length()
                bits ^= low
                cw = insert_pos(w, i, child_len, layout)
                ci = iv
                for v in range(max(1, child_len + 1 - k), child_len):
                    shift = b * (v - 1)
                    pos = (ci >> shift) & mask
                    if pos >= i:
                        ci += 1 << shift
                ci |= i << (b * (child_len - 1))
                c_words.append(cw)
                c_invs.append(ci)
                c_parents.append(w)
        c_psis: list[int] = []
        total = 0
        for cw, ci, parent in zip(c_words, c_invs, c_parents):
            psi_c = (1 << (child_len + 1)) - 1
            d = parent
            for r in range(1, min(child_len, k) + 1):
                vdel = child_len - r + 1
                q = (ci >> (b * (vdel - 1))) & mask
                if r > 1:
                    pos_a = (ci >> (b * vdel)) & mask
                    d = insert_pos(d, pos_a, vdel, layout)
                    d = kill_pos(d, q, layout)
                src = psi_of[d]
                psi_c &= (src & ((1 << q) - 1)) | ((src >> (q - 1)) << q)
                if not psi_c:
                    break
            c_psis.append(psi_c)
            total += psi_c.bit_count()
        state["live"] += len(c_words)
        state["peak"] = max(state["peak"], state["live"])
        return c_words, c_invs, c_psis, total

    def visit(v_len, batch_words, batch_invs, batch_psis):
        # batch: the avoiders of length v_len + k - 1 whose smallest v_len
        # letters form the current tree node
        if v_len == n - k:
            return
        member_len = v_len + k - 1
        psi_of = dict(zip(batch_words, batch_psis))
        groups: dict[int, list[int]] = {}
        for t, iv in enumerate(batch_invs):
            pos = (iv >> (b * v_len)) & mask
            shift_down = 0
            for vv in range(v_len + 2, member_len + 1):
                if (iv >> (b * (vv - 1))) & mask < pos:
                    shift_down += 1
            groups.setdefault(pos - shift_down, []).append(t)
        for key in sorted(groups):
            sel = groups[key]
            gw = [batch_words[t] for t in sel]
            gi = [batch_invs[t] for t in sel]
            gp = [batch_psis[t] for t in sel]
            cw, ci, cp, total = build_group(gw, gi, gp, psi_of, member_len + 1)
            counts[member_len + 1] += total
            visit(v_len + 1, cw, ci, cp)
            state["live"] -= len(cw)

    if n - k >= 1 and words:
        psi_of_root = dict(zip(words, psis))
        cw, ci, cp, total = build_group(words, invs, psis, psi_of_root, k)
        counts[k] += total
        visit(1, cw, ci, cp)
        state["live"] -= len(cw)
    if stats is not None:
        stats["max_live_extension_maps"] = state["peak"]
    return counts


# ---------------------------------------------------------------------------
# reference extension maps (small inputs; engines compute these incrementally)

def extension_map(p: PackedPerm, pat: PatternSet) -> ExtensionMap:
    """Which insertions of the new maximum into p leave an avoider."""
    levels = build_avoiders_basic(pat, p.length + 1)
    if p.length >= 1 and p not in levels[p.length]:
        raise ValueError(f"{p} does not avoid the pattern set")
    top = {q.word for q in levels[p.length + 1]}
    bits = 0
    for i in range(1, p.length + 2):
        if insert_up(p, i).word in top:
            bits |= 1 << (i - 1)
    return ExtensionMap(bits, p.length + 1)


def ignoring_extension_map(p: PackedPerm, pat: PatternSet, value: int) -> ExtensionMap:
    """Which insertions avoid once hits through the letter `value` are
    forgiven: bit i is set when deleting `value` from the child leaves an
    avoider."""
    n = p.length
    if not 1 <= value <= n:
        raise ValueError(f"ignored value {value} out of 1..{n}")
    levels = build_avoiders_basic(pat, n)
    same = {q.word for q in levels[n]}
    bits = 0
    for i in range(1, n + 2):
        child = insert_up(p, i)
        if delete_down(child, n + 2 - value).word in same:
            bits |= 1 << (i - 1)
    return ExtensionMap(bits, n + 1)
