import subprocess
import sys

import pytest

from lampwork.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from lampwork.lamplighter import Pair, pairs_up_to


def run(*argv):
    lines = []
    code = main(list(argv), out=lambda s: lines.extend(str(s).splitlines()))
    return code, lines


@pytest.fixture
def aut_file(tmp_path):
    def write(text):
        p = tmp_path / "aut.txt"
        p.write_text(text)
        return str(p)
    return write


def test_check_builtin():
    code, out = run("check", "--builtin", "paper_G")
    assert code == EXIT_OK
    assert out == ["invertible=true reversible=true bireversible=true", "alphabet = 4",
                   "_0 = (_1,_1,_0,_0) [1,3,0,2]", "_1 = (_0,_0,_1,_1) [3,1,2,0]"]


def test_check_lamplighter_is_not_reversible():
    code, out = run("check", "--builtin", "lamplighter_2state")
    assert code == EXIT_OK
    assert out[0] == "invertible=true reversible=false bireversible=false"


def test_check_identity_file(aut_file):
    code, out = run("check", aut_file("alphabet = 2\ne = (e,e) e\n"))
    assert code == EXIT_OK
    assert out[0] == "invertible=true reversible=true bireversible=true"


def test_check_noninvertible_file_prints_no_dual(aut_file):
    code, out = run("check", aut_file("alphabet = 2\nk = (k,k) [1,0]\nm = (k,m) e\n"))
    assert code == EXIT_OK
    assert out[0].startswith("invertible=true")
    code, out = run("check", aut_file("alphabet = 2\nk = (k,k) [0,0]\n"))
    assert code == EXIT_INPUT


def test_act_and_section():
    assert run("act", "--builtin", "paper_G", "--word", "a", "--on", "00000000") == (0, ["11001100"])
    assert run("act", "--word", "a a^-1", "--on", "0110") == (0, ["0110"])
    assert run("section", "--word", "a", "--at", "0") == (0, ["b"])
    assert run("section", "--word", "a b^-1", "--at", "1") == (0, ["d b^-1"])


def test_trivial():
    assert run("trivial", "--word", "a b^-1 a b^-1") == (0, ["trivial"])
    assert run("trivial", "--word", "a") == (0, ["nontrivial witness=root"])
    assert run("trivial", "--word", "a b^-1") == (0, ["nontrivial witness=0"])
    for method in ("closure", "transducer"):
        assert run("trivial", "--method", method, "--word", "a b^-1 a b^-1")[1] == ["trivial"]


def test_sh_and_order():
    assert run("sh", "--word", "a") == (0, ["false"])
    assert run("sh", "--word", "a b^-1") == (0, ["true"])
    assert run("order", "--word", "a b^-1", "--max-n", "8") == (0, ["order=2", "seed=0"])
    assert run("order", "--word", "a") == (0, ["order=exceeds 64", "seed=0"])


def test_commands_are_deterministic():
    assert run("order", "--word", "a", "--seed", "5") == run("order", "--word", "a", "--seed", "5")
    assert run("trivial", "--word", "c d^-1 a") == run("trivial", "--word", "c d^-1 a")


def test_affine_default_maps_match():
    code, out = run("affine", "--depth", "14")
    assert code == EXIT_OK
    assert out == [f"generator={k} match depth=14" for k in "abcd"]


def test_affine_single_map_and_minor():
    code, out = run("affine", "--gen", "a", "--f", "(t^2+t+1)/(t^2+1)", "--g", "1/(t+1)^3",
                    "--depth", "10", "--minor", "32")
    assert code == EXIT_OK
    assert out[0] == "generator=a match depth=10"
    rows = [list(map(int, line.split())) for line in out[1:]]
    assert len(rows) == 32
    # row i is 0^i, 1, then 1 0 1 0 ...
    for i, row in enumerate(rows):
        assert row == [0] * i + [1] + [(k + 1) % 2 for k in range(31 - i)]


def test_affine_mismatch():
    code, out = run("affine", "--gen", "a", "--f", "(t^2+t+1)/(t^2+1)", "--g", "1/(t+1)^2")
    assert code == EXIT_FAIL
    assert out[0].startswith("generator=a mismatch depth=14 witness=")
    witness = out[0].split("witness=")[1]
    assert set(witness) <= {"0", "1"} and 1 <= len(witness) <= 3


def test_affine_bad_input():
    assert run("affine", "--gen", "a", "--f", "t", "--g", "1")[0] == EXIT_INPUT
    assert run("affine", "--gen", "a", "--f", "1")[0] == EXIT_INPUT
    assert run("affine", "--gen", "a", "--f", "(t", "--g", "1")[0] == EXIT_INPUT


def test_verify_small_degrees():
    code, out = run("verify", "--max-deg", "0", "--products", "10")
    assert code == EXIT_OK
    assert "pairs_checked=3" in out and "pairs_nontrivial=3" in out and "seed=0" in out
    assert out[-1] == "result=pass"
    assert "shift_conjugates_checked=12 shift_conjugates_ok=12 shift_depth=10" in out


def test_verify_summary_file(tmp_path):
    summary = tmp_path / "summary.txt"
    code, out = run("verify", "--max-deg", "1", "--products", "0", "--summary", str(summary))
    assert code == EXIT_OK and "pairs_checked=15" in out
    lines = summary.read_text().splitlines()
    assert len(lines) == 15
    expected = [f"p={p.p} q={p.q}" for p in pairs_up_to(1)]
    assert [" ".join(l.split()[:2]) for l in lines] == expected
    assert lines[0] == "p=0 q=1 verdict=nontrivial witness_level=0 descent_steps=1"
    for base in ("p=1+a q=0", "p=a q=0", "p=1 q=0", "p=1+a q=1+a", "p=a q=1+a", "p=1 q=1+a"):
        assert any(l.startswith(base + " verdict=nontrivial") for l in lines)


def test_input_errors():
    assert run("trivial", "--word", "a^x")[0] == EXIT_INPUT
    assert run("act", "--word", "a", "--on", "012")[0] == EXIT_INPUT
    assert run("act", "--word", "a")[0] == EXIT_INPUT
    assert run("check", "/nonexistent/file")[0] == EXIT_INPUT
    assert run("bogus")[0] == EXIT_INPUT


def test_parse_error_reports_line(aut_file, capsys):
    code, _ = run("check", aut_file("alphabet = 2\na = (a,b) sigma\n"))
    assert code == EXIT_INPUT
    assert "2" in capsys.readouterr().err


def test_budget_exceeded(monkeypatch):
    word = "a^-5 a b^-1 a^5 a b^-1 a^-5 b a^-1 a^5 b a^-1"
    assert run("trivial", "--method", "closure", "--word", word)[0] == EXIT_OK
    monkeypatch.setenv("WORKBENCH_BUDGET", "20")
    assert run("trivial", "--method", "closure", "--word", word)[0] == EXIT_BUDGET
    assert run("trivial", "--method", "closure", "--cap", "20", "--word", word)[0] == EXIT_BUDGET
    monkeypatch.setenv("WORKBENCH_BUDGET", "lots")
    assert run("trivial", "--word", "a")[0] == EXIT_INPUT


def test_console_script_exit_codes():
    ok = subprocess.run([sys.executable, "-m", "lampwork.cli", "sh", "--word", "a"],
                        capture_output=True, text=True)
    assert ok.returncode == 0 and ok.stdout == "false\n"
    bad = subprocess.run([sys.executable, "-m", "lampwork.cli", "sh", "--word", "q"],
                         capture_output=True, text=True)
    assert bad.returncode == EXIT_INPUT and bad.stderr.startswith("error:")
