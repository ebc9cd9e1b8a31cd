"""Command line behavior: report shapes, exit codes, and determinism."""

import json

import pytest

from supermech.cli import main

OSCILLATOR = """
order 1;
even q;
L = 1/2*q[1]^2 - 1/2*q[0]^2;

symmetry time {
    q -> q[1];
}

simulate {
    n = 0;
    dt = 0.001;
    t = 1.0;
    init q[0] = 1.0;
    init q[1] = 0.0;
}
"""

SUPERPARTICLE = """
order 1;
even q;
odd th;
L = 1/2*q[1]^2 + 1/2*th[0]*th[1];

symmetry susy {
    q -> th[0];
    th -> -q[1];
}

simulate {
    n = 2;
    dt = 0.001;
    t = 1.0;
    init q[1] = 1.0;
    init th[0] = 1.0*g[0];
}
"""

DEGENERATE = """
order 1;
even q;
L = q[1];
"""

BAD_SYMMETRY = """
order 1;
even q;
L = 1/2*q[1]^2 - 1/2*q[0]^2;

symmetry scale {
    q -> q[0];
}
"""


@pytest.fixture
def problem_file(tmp_path):
    def write(text, name="problem.sm"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


# -- derive ----------------------------------------------------------------

DERIVE_KEYS = {
    "schema",
    "command",
    "order",
    "coordinates",
    "lagrangian",
    "theta",
    "omega",
    "energy",
    "euler_lagrange",
    "regularity",
    "regular",
    "forces",
    "constraints",
}


def test_derive_regular_report(problem_file, capsys):
    code = main(["derive", problem_file(SUPERPARTICLE)])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert set(report) == DERIVE_KEYS
    assert report["schema"] == 1
    assert report["order"] == 1
    assert report["regular"] is True
    assert report["regularity"] == "regular"
    assert report["theta"] == "q[1]*d(q[0]) + 1/2*th[0]*d(th[0])"
    assert report["omega"] == "d(q[0])^d(q[1]) - 1/2*d(th[0])^d(th[0])"
    assert report["energy"] == "1/2*q[1]^2"
    assert report["euler_lagrange"] == {"q": "-q[2]", "th": "-th[1]"}
    assert report["forces"] == {"q[2]": "0", "th[2]": "0"}
    assert report["constraints"] == {"th[1]": "0"}


def test_derive_degenerate_exits_one(problem_file, capsys):
    code = main(["derive", problem_file(DEGENERATE)])
    report = json.loads(capsys.readouterr().out)
    assert code == 1
    assert report["regular"] is False
    assert report["regularity"] == "degenerate"
    assert report["forces"] == {}
    assert report["constraints"] == {}


def test_derive_is_deterministic(problem_file, capsys):
    path = problem_file(SUPERPARTICLE)
    main(["derive", path])
    first = capsys.readouterr().out
    main(["derive", path])
    second = capsys.readouterr().out
    assert first == second


def test_derive_latex(problem_file, capsys):
    code = main(["derive", problem_file(OSCILLATOR), "--emit", "latex"])
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().splitlines()
    assert lines == [
        r"L = -\tfrac{1}{2} \, q_{0}^{2} + \tfrac{1}{2} \, q_{1}^{2}",
        r"\Theta_L = q_{1} \, \mathrm{d}q_{0}",
        r"\Omega_L = \mathrm{d}q_{0} \wedge \mathrm{d}q_{1}",
        r"E_L = \tfrac{1}{2} \, q_{0}^{2} + \tfrac{1}{2} \, q_{1}^{2}",
        r"\delta L / \delta q = -q_{0} - q_{2}",
        r"\text{regularity: regular}",
    ]


# -- noether ---------------------------------------------------------------


def test_noether_symmetry_report(problem_file, capsys):
    code = main(["noether", problem_file(SUPERPARTICLE), "--symmetry", "susy"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["is_symmetry"] is True
    assert report["F"] == "1/2*q[1]*th[0]"
    assert report["charge"] == "q[1]*th[0]"
    assert report["conserved"] is True


def test_noether_rejection_report(problem_file, capsys):
    code = main(["noether", problem_file(BAD_SYMMETRY), "--symmetry", "scale"])
    report = json.loads(capsys.readouterr().out)
    assert code == 1
    assert report["is_symmetry"] is False
    assert report["certificate"] == {"q": "-2*q[0] - 2*q[2]"}


def test_noether_unknown_name_is_usage_error(problem_file, capsys):
    code = main(["noether", problem_file(OSCILLATOR), "--symmetry", "missing"])
    captured = capsys.readouterr()
    assert code == 2
    assert captured.out == ""
    assert "missing" in captured.err


def test_noether_from_charge(problem_file, capsys):
    code = main(
        ["noether", problem_file(SUPERPARTICLE), "--from-charge", "q[1]*th[0]"]
    )
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["mode"] == "inverse"
    assert report["symmetry"] == {"q": "th[0]", "th": "-q[1]"}
    assert report["F"] == "1/2*q[1]*th[0]"


def test_noether_from_charge_without_witness_fails(problem_file, capsys):
    code = main(["noether", problem_file(OSCILLATOR), "--from-charge", "q[0]"])
    captured = capsys.readouterr()
    assert code == 1
    assert "witness" in captured.err


def test_noether_requires_exactly_one_mode(problem_file, capsys):
    code = main(["noether", problem_file(OSCILLATOR)])
    capsys.readouterr()
    assert code == 2


# -- simulate --------------------------------------------------------------


def test_simulate_report(problem_file, capsys):
    code = main(["simulate", problem_file(OSCILLATOR)])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["within_tolerance"] is True
    assert report["t_end"] == 1.0
    assert set(report["drift"]) == {"energy", "time"}
    assert report["drift"]["energy"] < 1e-12


def test_simulate_tolerance_failure(problem_file, capsys):
    code = main(["simulate", problem_file(OSCILLATOR), "--tol", "1e-18"])
    report = json.loads(capsys.readouterr().out)
    assert code == 1
    assert report["within_tolerance"] is False


def test_simulate_requires_a_block(problem_file, capsys):
    code = main(["simulate", problem_file(DEGENERATE)])
    captured = capsys.readouterr()
    assert code == 2
    assert "simulate block" in captured.err


def test_simulate_degenerate_is_math_failure(problem_file, capsys):
    text = DEGENERATE + "simulate { dt = 0.1; t = 1.0; }\n"
    code = main(["simulate", problem_file(text)])
    captured = capsys.readouterr()
    assert code == 1
    assert "degenerate" in captured.err


def test_simulate_trajectory_out(problem_file, tmp_path, capsys):
    out_path = tmp_path / "trajectory.tsv"
    code = main(
        ["simulate", problem_file(OSCILLATOR), "--trajectory-out", str(out_path)]
    )
    capsys.readouterr()
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "time\tcoordinate\tmask\tvalue"
    assert len(lines) == 1 + 1001 * 2


# -- usage and input errors ------------------------------------------------


def test_missing_file_is_usage_error(capsys):
    code = main(["derive", "/nonexistent/problem.sm"])
    captured = capsys.readouterr()
    assert code == 2
    assert captured.err


def test_parse_error_is_usage_error(problem_file, capsys):
    code = main(["derive", problem_file("order 1; even q; L = 0.5*q[1];")])
    captured = capsys.readouterr()
    assert code == 2
    assert "line 1" in captured.err


def test_unknown_subcommand_is_usage_error(problem_file, capsys):
    code = main(["frobnicate", problem_file(OSCILLATOR)])
    capsys.readouterr()
    assert code == 2
