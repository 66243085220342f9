import pytest

from qcpart import cli
from qcpart import partition as P
from qcpart.qc import expand, load_base_matrix

SMALL_TEXT = "2 4 8\n1 3 0 5\n0 2 7 -1\n"


@pytest.fixture
def small_path(tmp_path):
    p = tmp_path / "small.txt"
    p.write_text(SMALL_TEXT)
    return str(p)


@pytest.fixture
def toy_path(tmp_path):
    p = tmp_path / "toy.txt"
    p.write_text("2 3 4\n1 3 -1\n0 2 0\n")
    return str(p)


def run(argv):
    return cli.main(argv)


def test_analyze(toy_path, capsys):
    assert run(["analyze", "--matrix", toy_path]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "M=2 N=3 Z=4 omega=2" in out
    assert "factors(Z)=[1, 2, 4]" in out


def test_analyze_parse_error(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("2 3\n1 2 3\n")
    assert run(["analyze", "--matrix", str(p)]) == cli.EXIT_PARSE


def test_usage_errors(toy_path):
    assert run([]) == cli.EXIT_USAGE
    assert run(["bogus"]) == cli.EXIT_USAGE
    assert run(["partition", "--matrix", toy_path]) == cli.EXIT_USAGE


def test_partition_writes_scheme(small_path, tmp_path, capsys):
    out = str(tmp_path / "scheme.txt")
    code = run(["partition", "--matrix", small_path, "--layers", "2",
                "--method", "enum", "--out", out])
    assert code == cli.EXIT_OK
    text = capsys.readouterr().out
    assert "omega=" in text and "proven_optimal=True" in text
    h = expand(load_base_matrix(small_path))
    scheme, omega, dist = P.load_scheme(out, h)
    assert P.evaluate_omega(h, scheme) == omega


def test_partition_greedy_matches_enum_on_small(small_path, capsys):
    assert run(["partition", "--matrix", small_path, "--layers", "2"]) == cli.EXIT_OK
    g = capsys.readouterr().out
    assert run(["partition", "--matrix", small_path, "--layers", "2", "--method", "enum"]) == cli.EXIT_OK
    e = capsys.readouterr().out
    g_omega = int(g.split("omega=")[1].split()[0])
    e_omega = int(e.split("omega=")[1].split()[0])
    assert g_omega >= e_omega


def test_partition_no_distance_solution(tmp_path):
    # column of full weight Z cannot reach distance Z+1
    p = tmp_path / "dense.txt"
    p.write_text("1 2 4\n0,1,2,3 1\n")
    code = run(["partition", "--matrix", str(p), "--distance", "9", "--method", "enum"])
    assert code == cli.EXIT_NO_SOLUTION


def test_construct_and_verify(tmp_path, capsys):
    out = str(tmp_path / "built.txt")
    code = run(["construct", "--dims", "2,4,8", "--degrees", "2,2,2,1",
                "--layers", "2", "--strategy", "2", "--seed", "3", "--out", out])
    assert code == cli.EXIT_OK
    assert "seed=3" in capsys.readouterr().out
    assert run(["verify", "--matrix", out, "--layers", "2"]) == cli.EXIT_OK
    text = capsys.readouterr().out
    assert "PASS" in text


def test_verify_failure_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    # two shifts in the same cell share the residue class mod 2, which no
    # block-row shift can separate
    p.write_text("1 2 4\n0,2 1\n")
    assert run(["verify", "--matrix", str(p), "--layers", "2"]) == cli.EXIT_NO_SOLUTION


def test_simulate_csv(small_path, tmp_path, capsys):
    out = str(tmp_path / "fer.csv")
    code = run(["simulate", "--matrix", small_path, "--snr", "6:6:1",
                "--min-frame-errors", "2", "--max-frames", "100",
                "--seed", "5", "--out", out])
    assert code == cli.EXIT_OK
    lines = open(out).read().strip().splitlines()
    assert lines[0].startswith("snr_db,")
    assert len(lines) == 2
    # deterministic: rerun gives an identical file
    run(["simulate", "--matrix", small_path, "--snr", "6:6:1",
         "--min-frame-errors", "2", "--max-frames", "100",
         "--seed", "5", "--out", out])
    assert open(out).read().strip().splitlines() == lines


def test_simulate_with_scheme(small_path, tmp_path):
    scheme_path = str(tmp_path / "s.txt")
    run(["partition", "--matrix", small_path, "--layers", "2", "--out", scheme_path])
    code = run(["simulate", "--matrix", small_path, "--scheme", scheme_path,
                "--snr", "6:6:1", "--min-frame-errors", "2", "--max-frames", "100"])
    assert code == cli.EXIT_OK
