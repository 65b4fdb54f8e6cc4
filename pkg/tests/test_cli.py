import subprocess
import sys

import pytest

from slomod.cli import main, parse_session, run_command
from slomod.errors import ParseError

MINIMAL = """\
ring zp p=5 prec=20
slope 0/1
matrix A 1 1
1 !
"""

EXAMPLE = """\
ring zp p=5 prec=16
slope 0/1
matrix M 1 2
25 ! ; 5*u^3 !
matrix U 1 1
u !
matrix P 1 1
5 !
series y
u^2 !
series x
u - 5 !
"""

FQ = """\
ring fq q=2 prec=10
slope 1/2
matrix A 1 1
t*u + 1 !
"""


def test_parse_minimal():
    s = parse_session(MINIMAL)
    assert s.cfg.p == 5 and s.cfg.default_prec == 20
    assert s.slope.nu == 0
    assert s.matrix("A").rows == 1


def test_parse_unknown_ring():
    with pytest.raises(ParseError) as e:
        parse_session("ring qq foo=1\nslope 0/1\n")
    assert "ring" in str(e.value) or "qq" in str(e.value)


def test_parse_roundtrip():
    s = parse_session(EXAMPLE)
    text = s.render()
    s2 = parse_session(text)
    assert s2.render() == text
    assert s2.matrix("M").a[0][1] == s.matrix("M").a[0][1]


def test_parse_fq():
    s = parse_session(FQ)
    x = s.matrix("A").a[0][0]
    assert x.coeffs[1].num_val == 1  # the t*u term


def test_max_worked_example_report():
    s = parse_session(EXAMPLE)
    out = run_command(["max", "M"], s)
    lines = out.splitlines()
    assert lines[0] == "M = [pi]"
    assert lines[1] == "L = [0]"


def test_cf_report():
    s = parse_session(MINIMAL)
    out = run_command(["cf", "10/7"], s)
    assert "[1;2,3]" in out
    assert "1/1 3/2 10/7" in out


def test_divmod_report():
    s = parse_session(EXAMPLE)
    out = run_command(["divmod", "y", "x", "--prec", "8"], s)
    assert "q = pi + u" in out
    assert "r = pi^2" in out


def test_sum_and_eq_reports():
    s = parse_session(EXAMPLE)
    assert "M = [1]" in run_command(["sum", "U", "P"], s)
    assert run_command(["eq", "M", "M"], s) == "EQUAL"
    assert run_command(["eq", "M", "U"], s) == "DIFFERENT"


def test_eq_via_pair_roundtrip():
    s = parse_session(EXAMPLE)
    out = run_command(["pair", "M"], s)
    assert "A = [1]" in out
    assert "B = [pi]" in out


def test_determinism():
    s1 = parse_session(EXAMPLE)
    s2 = parse_session(EXAMPLE)
    assert run_command(["max", "M"], s1) == run_command(["max", "M"], s2)
    assert run_command(["intersect", "U", "P"], s1) == run_command(["intersect", "U", "P"], s2)


def test_main_exit_codes(tmp_path):
    f = tmp_path / "s.txt"
    f.write_text(EXAMPLE)
    assert main(["max", str(f), "M"]) == 0
    # inexact gcd operands: certified-precision failure, exit 2
    g = tmp_path / "inexact.txt"
    g.write_text("ring zp p=5 prec=6\nslope 0/1\nseries a\nu - 1\nseries b\nu - 1\n")
    assert main(["gcd", str(g), "a", "b"]) == 2
    assert main(["max", str(f), "NOPE"]) == 1


def test_cli_entrypoint_subprocess():
    out = subprocess.run(
        [sys.executable, "-m", "slomod.cli", "cf", "2/5"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert "[0;2,2]" in out.stdout
