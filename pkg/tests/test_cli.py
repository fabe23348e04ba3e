import gzip

from permscan import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_avoid_catalan(capsys):
    code, out, err = run_cli(capsys, "avoid", "--patterns", "231", "--max-n", "8")
    assert code == 0 and err == ""
    assert out == "1,1\n2,2\n3,5\n4,14\n5,42\n6,132\n7,429\n8,1430\n"


def test_avoid_engines_agree(capsys):
    outs = []
    for engine in ("basic", "fast", "lowmem"):
        code, out, _ = run_cli(capsys, "avoid", "--patterns", "123 321",
                               "--max-n", "6", "--engine", engine)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]
    assert outs[0].endswith("5,0\n6,0\n")


def test_avoid_single_letter(capsys):
    code, out, _ = run_cli(capsys, "avoid", "--patterns", "1", "--max-n", "3")
    assert code == 0
    assert out == "1,0\n2,0\n3,0\n"


def test_avoid_enumerate_sorted_and_deterministic(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "avoid", "--patterns", "132", "--max-n", "4",
                           "--enumerate")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "1,1" and lines[1] == "1,1"
    level3 = [l for l in lines if l.startswith("3,") and len(l) == 5]
    assert level3 == sorted(level3)
    code2, out2, _ = run_cli(capsys, "avoid", "--patterns", "132", "--max-n", "4",
                             "--enumerate")
    assert out2 == out
    target = tmp_path / "avoid.txt"
    code3, out3, _ = run_cli(capsys, "avoid", "--patterns", "132", "--max-n", "4",
                             "--enumerate", "--out", str(target))
    assert code3 == 0 and out3 == ""
    assert target.read_text() == out


def test_avoid_enumerate_lowmem_rejected(capsys):
    code, out, err = run_cli(capsys, "avoid", "--patterns", "231", "--max-n", "5",
                             "--enumerate", "--engine", "lowmem")
    assert code == 1 and "enumerate" in err


def test_avoid_oracle_check(capsys):
    code, _, err = run_cli(capsys, "avoid", "--patterns", "231", "--max-n", "6",
                           "--oracle-check")
    assert code == 0 and err == ""
    code, _, err = run_cli(capsys, "avoid", "--patterns", "231", "--max-n", "9",
                           "--oracle-check")
    assert code == 1 and "max-n" in err


def test_avoid_oracle_check_catches_bad_engine(capsys, monkeypatch):
    monkeypatch.setattr(cli.av, "count_avoiders_fast", lambda pat, n: [1] * n)
    code, _, err = run_cli(capsys, "avoid", "--patterns", "231", "--max-n", "5",
                           "--oracle-check")
    assert code == 2 and "FAILED" in err


def test_count_rows(capsys):
    code, out, _ = run_cli(capsys, "count", "--patterns", "12", "--max-n", "2")
    assert code == 0
    assert out == "length,hits,multiplicity\n1,0,1\n2,0,1\n2,1,1\n"


def test_count_histogram_flag_and_sum(capsys):
    code, out, _ = run_cli(capsys, "count", "--patterns", "123", "--max-n", "4",
                           "--histogram")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    level4 = [(int(h), int(c)) for (m, h, c) in rows if m == "4"]
    assert sum(h * c for h, c in level4) == 16


def test_count_engines(capsys):
    outs = []
    for engine in ("standard", "single-fast", "lowmem", "auto"):
        code, out, _ = run_cli(capsys, "count", "--patterns", "2413",
                               "--max-n", "6", "--engine", engine)
        assert code == 0
        outs.append(out)
    assert len(set(outs)) == 1
    code, _, err = run_cli(capsys, "count", "--patterns", "12 21",
                           "--max-n", "4", "--engine", "single-fast")
    assert code == 1 and "single" in err


def test_count_oracle_check(capsys):
    code, _, err = run_cli(capsys, "count", "--patterns", "132 321",
                           "--max-n", "5", "--oracle-check")
    assert code == 0 and err == ""


def test_vincular_count(capsys):
    code, out, _ = run_cli(capsys, "vincular-count", "--pattern", "123",
                           "--adjacencies", "0,2", "--max-n", "6")
    assert code == 0
    assert out.splitlines()[0] == "length,hits,multiplicity"
    # levels 1..6 all present and multiplicities per level sum to m!
    import math
    sums = {}
    for line in out.splitlines()[1:]:
        m, h, c = map(int, line.split(","))
        sums[m] = sums.get(m, 0) + c
    assert sums == {m: math.factorial(m) for m in range(1, 7)}
    code, _, err = run_cli(capsys, "vincular-count", "--pattern", "123",
                           "--adjacencies", "9", "--max-n", "4")
    assert code == 1
    code, _, err = run_cli(capsys, "vincular-count", "--pattern", "123",
                           "--adjacencies", "x", "--max-n", "4")
    assert code == 1


def test_mine_cli(capsys, tmp_path):
    stripped = tmp_path / "stripped.gz"
    with gzip.open(stripped, "wt") as fh:
        fh.write("A000108 ,1,1,2,5,14,42,132,429,1430,4862,16796,58786,208012,742900,\n")
    code, out, _ = run_cli(capsys, "mine", "--pattern-length", "3",
                           "--min-set-size", "1", "--max-n", "10",
                           "--oeis", str(stripped))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "canonical_patterns,terms,degree,oeis_anum,shift"
    catalan = [l for l in lines if l.startswith("123,")]
    assert catalan and ",A000108,5" in catalan[0]


def test_bench_format(capsys):
    code, out, _ = run_cli(capsys, "bench", "--algos", "fast,oracle",
                           "--patterns", "2431", "--max-n", "6")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "algorithm,n,seconds,work,last_level"
    assert len(lines) == 3
    assert lines[1].startswith("fast,6,") and lines[2].startswith("oracle,6,")
    # both report the same avoider count at the final level
    assert lines[1].rsplit(",", 1)[1] == lines[2].rsplit(",", 1)[1]
    code, _, err = run_cli(capsys, "bench", "--algos", "nope",
                           "--patterns", "231", "--max-n", "4")
    assert code == 1


def test_usage_errors(capsys):
    code, _, err = run_cli(capsys, "avoid", "--patterns", "1x2", "--max-n", "4")
    assert code == 1
    code, _, _ = run_cli(capsys, "avoid", "--max-n", "4")
    assert code == 1
    code, _, _ = run_cli(capsys, "nonsense")
    assert code == 1
    code, _, err = run_cli(capsys, "avoid", "--patterns", "231", "--max-n", "4",
                           "--threads", "0")
    assert code == 1
    code, _, err = run_cli(capsys, "avoid", "--patterns", "231", "--max-n", "40")
    assert code == 1


def test_wide_mode(capsys):
    code, out, _ = run_cli(capsys, "avoid", "--patterns", "123 321",
                           "--max-n", "16")
    assert code == 0
    assert out.splitlines()[-1] == "16,0"
    code, out2, _ = run_cli(capsys, "avoid", "--patterns", "123 321",
                            "--max-n", "10", "--wide")
    assert code == 0
