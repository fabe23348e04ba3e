import gzip
import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permscan.avoiders import PatternSet, count_avoiders_fast
from permscan.permcore import parse_perm
from permscan.sequences import (
    OeisDb,
    OeisEntry,
    OeisFormatError,
    SequenceRecord,
    avoidance_record,
    canonicalize,
    count_symmetry_classes,
    enumerate_symmetry_classes,
    growth_degree,
    mine,
    oeis_match,
    symmetry_group,
    write_report,
)
from conftest import perms_upto


def test_group_structure():
    group = symmetry_group()
    assert len(group) == 8
    from permscan.permcore import complement_perm, inverse_perm, reverse_perm

    for p in perms_upto(5):
        assert inverse_perm(inverse_perm(p)) == p
        assert reverse_perm(reverse_perm(p)) == p
        assert complement_perm(complement_perm(p)) == p
        assert reverse_perm(complement_perm(p)) == complement_perm(reverse_perm(p))


def test_canonicalize_golden():
    assert str(canonicalize([parse_perm("123")])) == "123"
    c1 = canonicalize([parse_perm("231")])
    c2 = canonicalize([parse_perm("312")])
    assert c1 == c2  # 312 is the inverse of 231


def test_canonicalize_is_class_function(s3_patterns, s4_patterns):
    from permscan.sequences import _group

    for mask in range(1, 64):
        sub = [s3_patterns[j] for j in range(6) if (mask >> j) & 1]
        base = canonicalize(sub)
        for g in _group():
            assert canonicalize([g(p) for p in sub]) == base
    rng = random.Random(4)
    for _ in range(1000):
        sub = rng.sample(s4_patterns, rng.randint(1, 12))
        base = canonicalize(sub)
        for g in _group():
            assert canonicalize([g(p) for p in sub]) == base


def test_class_enumeration_matches_canonicalize(s3_patterns):
    classes = list(enumerate_symmetry_classes(3, 1))
    assert len(classes) == count_symmetry_classes(3, 1) == 19
    assert count_symmetry_classes(3, 1, include_full=True) == 20
    reps = {tuple(p.word for p in c) for c in classes}
    for mask in range(1, 63):  # proper subsets
        sub = [s3_patterns[j] for j in range(6) if (mask >> j) & 1]
        assert canonicalize(sub).words in reps
    for c in classes:
        assert canonicalize(c).patterns == c


def test_class_enumeration_k4_sample():
    rng = random.Random(8)
    classes = list(enumerate_symmetry_classes(4, 12))
    for c in rng.sample(classes, 40):
        assert canonicalize(c).patterns == c
    assert count_symmetry_classes(4, 12) == len(classes)
    with pytest.raises(ValueError):
        count_symmetry_classes(5, 1)


def test_wilf_invariance(s4_patterns):
    from permscan.sequences import _group

    rng = random.Random(12)
    for _ in range(200):
        sub = rng.sample(s4_patterns, rng.randint(1, 8))
        base = count_avoiders_fast(PatternSet.build(sub), 9)
        for g in _group():
            image = PatternSet.build([g(p) for p in sub])
            assert count_avoiders_fast(image, 9) == base


def test_growth_degree_golden():
    assert growth_degree([7] * 10) == 0
    assert growth_degree([n * n for n in range(5, 17)]) == 2
    assert growth_degree([2 * n + 1 for n in range(5, 17)]) == 1
    assert growth_degree([n ** 3 - 4 * n for n in range(5, 17)]) == 3
    catalan = [42, 132, 429, 1430, 4862, 16796, 58786, 208012, 742900,
               2674440, 9694845, 35357670]
    assert growth_degree(catalan) is None
    with pytest.raises(ValueError):
        growth_degree([1, 2, 3])


def test_growth_degree_ignores_unsettled_head():
    # noisy early terms don't matter once the tail has settled
    terms = [99, -5, 17] + [4] * 9  # n=5..16, constant from n=8
    assert growth_degree(terms) == 0


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 3),
       st.lists(st.integers(-5, 5), min_size=4, max_size=4),
       st.integers(1, 9))
def test_growth_degree_random_polynomials(degree, coeffs, lead):
    def poly(n):
        val = lead * n ** degree
        for j in range(degree):
            val += coeffs[j] * n ** j
        return val

    terms = [poly(n) for n in range(5, 17)]
    assert growth_degree(terms) == degree


def test_oeis_parse_and_errors(tmp_path):
    text = """# OEIS data
# comment line
A000004 ,0,0,0,0,0,0,0,0,0,0,
A000012 ,1,1,1,1,1,1,1,1,1,1,
A000045 ,0,1,1,2,3,5,8,13,21,34,55,89,
"""
    db = OeisDb.parse(io.StringIO(text).readlines())
    assert len(db) == 3
    assert db.entries[2] == OeisEntry(45, (0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89))
    plain = tmp_path / "stripped"
    plain.write_text(text)
    assert len(OeisDb.load(str(plain))) == 3
    gz = tmp_path / "stripped.gz"
    with gzip.open(gz, "wt") as fh:
        fh.write(text)
    assert len(OeisDb.load(str(gz))) == 3
    with pytest.raises(OeisFormatError) as err:
        OeisDb.parse(["A000001 ,1,2,\n", "not a line\n"])
    assert "line 2" in str(err.value)
    with pytest.raises(OeisFormatError):
        OeisDb.parse(["A000001 ,1,2,\n", "A000001 ,3,4,\n"])


def test_oeis_match_shifts_and_tiebreak():
    prefix = list(range(100, 114))  # 14 junk terms
    target = [7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
    db = OeisDb.parse([
        "A000300 ," + ",".join(map(str, target)) + ",\n",
        "A000200 ," + ",".join(map(str, prefix + target)) + ",\n",
        "A000100 ," + ",".join(map(str, prefix + [0] + target)) + ",\n",
    ])
    # shift 0 works for A000300, shift 14 for A000200; A000100 needs 15
    assert oeis_match(target, db) == (200, 14)  # smallest A-number that fits
    assert oeis_match(target, OeisDb.parse(
        ["A000300 ," + ",".join(map(str, target)) + ",\n"])) == (300, 0)
    assert oeis_match(target, OeisDb.parse(
        ["A000100 ," + ",".join(map(str, prefix + [0] + target)) + ",\n"])) is None
    assert oeis_match(target, OeisDb.parse(["A000100 ,1,2,3,\n"])) is None


def test_oeis_match_truncated_entries():
    q = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]
    db = OeisDb.parse(["A000007 ,1,2,3,4,5,6,7,8,\n"])
    # entry runs out after 8 terms: that overlap is accepted by default
    assert oeis_match(q, db) == (7, 0)
    db2 = OeisDb.parse(["A000007 ,1,2,3,4,5,6,7,\n"])
    assert oeis_match(q, db2) is None
    assert oeis_match(q, db2, min_overlap=7) == (7, 0)
    assert oeis_match([], db) is None


def test_match_independent_of_load_order():
    a = "A000010 ,5,5,5,5,5,5,5,5,5,5,\n"
    b = "A000020 ,5,5,5,5,5,5,5,5,5,5,\n"
    q = [5] * 10
    assert oeis_match(q, OeisDb.parse([a, b])) == (10, 0)
    assert oeis_match(q, OeisDb.parse([b, a])) == (10, 0)


def test_avoidance_record():
    rec = avoidance_record([parse_perm("231")], 10)
    assert rec.n_max == 10 and len(rec.terms) == 6
    assert rec.terms == (42, 132, 429, 1430, 4862, 16796)
    assert str(rec.pattern_set) == "132"  # canonical form of the 231 class
    with pytest.raises(ValueError):
        SequenceRecord(rec.pattern_set, (1, 2, 3), 10)


def test_mine_k3_with_synthetic_db():
    db = OeisDb.parse([
        "A000108 ,1,1,2,5,14,42,132,429,1430,4862,16796,58786,208012,742900,\n",
        "A000045 ,0,1,1,2,3,5,8,13,21,34,55,89,144,233,377,\n",
    ])
    rows = mine(3, 1, 11, db)
    assert len(rows) == 19
    by_patterns = {tuple(str(p) for p in r.patterns): r for r in rows}
    catalan_row = by_patterns[("123",)]
    assert catalan_row.terms == (42, 132, 429, 1430, 4862, 16796, 58786)
    assert catalan_row.anum == 108 and catalan_row.shift == 5
    fib_row = by_patterns[("123", "132", "213")]
    assert fib_row.anum == 45
    # classes whose growth settles to a polynomial are filtered from matching
    twos = by_patterns[("123", "132", "213", "231")]
    assert twos.degree == 0 and twos.filtered and twos.anum is None


def test_mine_empty_db_and_reports():
    rows = mine(3, 5, 10, None)
    assert all(r.anum is None for r in rows)
    buf = io.StringIO()
    write_report(rows, buf)
    text = buf.getvalue().splitlines()
    assert text[0] == "canonical_patterns,terms,degree,oeis_anum,shift"
    assert len(text) == len(rows) + 1
    # byte determinism
    buf2 = io.StringIO()
    write_report(mine(3, 5, 10, None), buf2)
    assert buf.getvalue() == buf2.getvalue()
