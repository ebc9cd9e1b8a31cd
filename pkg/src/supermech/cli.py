"""Command line front end.

Three subcommands work on problem files:

* ``derive``: momentum and symplectic forms, energy, field equations,
  regularity, and (when regular) the solved forces and constraints.
* ``noether``: check a declared symmetry and produce its conserved
  charge, or start from a charge and recover a symmetry.
* ``simulate``: integrate the solved dynamics and report conservation
  drift.

Reports are JSON on stdout (``--emit latex`` switches derive to LaTeX
lines).  Exit code 0 means success, 1 a mathematical failure (not a
symmetry, not regular, drift out of tolerance), 2 bad usage or input.
Output is deterministic: identical inputs give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Mapping

from .algebra import AlgebraError, SuperExpr
from .forms import FormError, GradedForm
from .jets import JetError
from .lagrangian import (
    CartanData,
    LagrangianError,
    NotRegular,
    NotSymmetry,
    Regularity,
    cartan_data,
    check_constant_of_motion,
    noether_charge,
    noether_inverse,
    check_symmetry,
    regularity,
    solve_dynamics,
)
from .numeric import NumericError, conservation_report, integrate
from .problems import (
    ProblemError,
    ProblemFile,
    parse_expression,
    parse_problem,
)

SCHEMA_VERSION = 1

_GREEK = {
    "th": r"\theta",
    "theta": r"\theta",
    "psi": r"\psi",
    "phi": r"\phi",
    "chi": r"\chi",
    "eta": r"\eta",
    "xi": r"\xi",
}


class _InputFailure(Exception):
    pass


class _MathFailure(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supermech",
        description="Symbolic higher-order Lagrangian mechanics with even and odd coordinates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    derive = sub.add_parser("derive", help="derive forms, energy, field equations, dynamics")
    derive.add_argument("problem", help="path to a problem file")
    derive.add_argument(
        "--emit", choices=("json", "latex"), default="json", help="output format"
    )

    noether = sub.add_parser("noether", help="relate symmetries and conserved charges")
    noether.add_argument("problem", help="path to a problem file")
    group = noether.add_mutually_exclusive_group(required=True)
    group.add_argument("--symmetry", metavar="NAME", help="check a symmetry declared in the file")
    group.add_argument(
        "--from-charge",
        metavar="EXPR",
        help="recover a symmetry from a conserved quantity",
    )

    simulate = sub.add_parser("simulate", help="integrate the dynamics and report drift")
    simulate.add_argument("problem", help="path to a problem file")
    simulate.add_argument(
        "--tol", type=float, default=1e-6, help="conservation tolerance (default 1e-6)"
    )
    simulate.add_argument(
        "--trajectory-out", metavar="PATH", help="write the sampled trajectory to a file"
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        problem = _load_problem(args.problem)
        if args.command == "derive":
            output = run_derive(problem, emit=args.emit)
        elif args.command == "noether":
            output = run_noether(
                problem, symmetry=args.symmetry, from_charge=args.from_charge
            )
        else:
            output = run_simulate(
                problem, tol=args.tol, trajectory_out=args.trajectory_out
            )
    except _InputFailure as exc:
        print(f"supermech: {exc}", file=sys.stderr)
        return 2
    except (ProblemError, OSError) as exc:
        print(f"supermech: {exc}", file=sys.stderr)
        return 2
    except _MathFailure as exc:
        print(f"supermech: {exc}", file=sys.stderr)
        return 1
    except (LagrangianError, NumericError, FormError, JetError, AlgebraError) as exc:
        print(f"supermech: {exc}", file=sys.stderr)
        return 1

    if isinstance(output, tuple):
        text, code = output
    else:
        text, code = output, 0
    print(text)
    return code


def _load_problem(path: str) -> ProblemFile:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_problem(handle.read())


def _render(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False)


# -- derive ----------------------------------------------------------------


def run_derive(problem: ProblemFile, emit: str = "json"):
    lag = problem.lagrangian()
    data = cartan_data(lag)
    report_verdict = regularity(lag)
    regular = report_verdict.verdict is Regularity.REGULAR
    code = 0 if regular else 1

    if emit == "latex":
        return _derive_latex(problem, data, report_verdict), code

    chart = lag.chart
    forces: dict[str, str] = {}
    constraints: dict[str, str] = {}
    if regular:
        dynamics = solve_dynamics(lag, data)
        forces = {
            str(gen): str(expr)
            for gen, expr in sorted(dynamics.forces.items(), key=lambda it: it[0].sort_key)
        }
        constraints = {
            str(gen): str(expr)
            for gen, expr in sorted(
                dynamics.constraints.items(), key=lambda it: it[0].sort_key
            )
        }
    report = {
        "schema": SCHEMA_VERSION,
        "command": "derive",
        "order": lag.order,
        "coordinates": {
            "even": list(chart.base_even),
            "odd": list(chart.base_odd),
        },
        "lagrangian": str(lag.expr),
        "theta": str(data.theta),
        "omega": str(data.omega),
        "energy": str(data.energy),
        "euler_lagrange": {
            gen.name: str(data.delta_check.component(gen))
            for gen in chart.at_order(0).coordinates()
        },
        "regularity": report_verdict.verdict.value,
        "regular": regular,
        "forces": forces,
        "constraints": constraints,
    }
    return _render(report), code


def _derive_latex(problem: ProblemFile, data: CartanData, verdict) -> str:
    chart = data.lagrangian.chart
    lines = [
        f"L = {latex_expr(data.lagrangian.expr)}",
        f"\\Theta_L = {latex_form(data.theta)}",
        f"\\Omega_L = {latex_form(data.omega)}",
        f"E_L = {latex_expr(data.energy)}",
    ]
    for gen in chart.at_order(0).coordinates():
        component = data.delta_check.component(gen)
        lines.append(
            f"\\delta L / \\delta {latex_name(gen.name)} = {latex_expr(component)}"
        )
    lines.append(f"\\text{{regularity: {verdict.verdict.value}}}")
    return "\n".join(lines)


# -- noether ---------------------------------------------------------------


def run_noether(problem: ProblemFile, symmetry: str | None, from_charge: str | None):
    lag = problem.lagrangian()
    data = cartan_data(lag)
    if symmetry is not None:
        if symmetry not in problem.symmetries:
            raise _InputFailure(f"no symmetry named {symmetry!r} in the problem file")
        field = problem.symmetry_field(symmetry)
        try:
            generating = check_symmetry(field, lag)
        except NotSymmetry as exc:
            report = {
                "schema": SCHEMA_VERSION,
                "command": "noether",
                "mode": "symmetry",
                "symmetry": symmetry,
                "is_symmetry": False,
                "certificate": {
                    name: str(expr) for name, expr in sorted(exc.certificate.items())
                },
            }
            return _render(report), 1
        charge = noether_charge(field, generating, lag, data)
        conserved = None
        if regularity(lag).verdict is Regularity.REGULAR:
            dynamics = solve_dynamics(lag, data)
            conserved = check_constant_of_motion(charge, dynamics)
        report = {
            "schema": SCHEMA_VERSION,
            "command": "noether",
            "mode": "symmetry",
            "symmetry": symmetry,
            "is_symmetry": True,
            "F": str(generating),
            "charge": str(charge),
            "conserved": conserved,
        }
        return _render(report)

    assert from_charge is not None
    chart = lag.chart
    charge_expr = parse_expression(
        from_charge, chart.at_order(2 * lag.order - 1), 2 * lag.order - 1
    )
    witness, generating = noether_inverse(charge_expr, lag, data)
    report = {
        "schema": SCHEMA_VERSION,
        "command": "noether",
        "mode": "inverse",
        "charge": str(charge_expr),
        "symmetry": {
            gen.name: str(witness.component(gen))
            for gen in chart.at_order(0).coordinates()
        },
        "F": str(generating),
    }
    return _render(report)


# -- simulate --------------------------------------------------------------


def run_simulate(problem: ProblemFile, tol: float, trajectory_out: str | None):
    if problem.simulation is None:
        raise _InputFailure("the problem file has no simulate block")
    lag = problem.lagrangian()
    data = cartan_data(lag)
    try:
        dynamics = solve_dynamics(lag, data)
    except NotRegular as exc:
        raise _MathFailure(str(exc)) from exc

    quantities: dict[str, SuperExpr] = {"energy": data.energy}
    for name in problem.symmetries:
        field = problem.symmetry_field(name)
        generating = check_symmetry(field, lag)  # NotSymmetry -> exit 1
        quantities[name] = noether_charge(field, generating, lag, data, verify=False)

    sim = problem.simulation
    trajectory = integrate(
        dynamics, problem.initial_state(), dt=sim.dt, t_end=sim.t_end
    )
    drift = conservation_report(trajectory, quantities)
    constraint_drift = trajectory.constraint_drift()
    within = all(value <= tol for value in drift.values()) and constraint_drift <= tol

    if trajectory_out is not None:
        with open(trajectory_out, "w", encoding="utf-8") as handle:
            handle.write("\n".join(trajectory.export_rows()) + "\n")

    report = {
        "schema": SCHEMA_VERSION,
        "command": "simulate",
        "n": sim.directions,
        "dt": sim.dt,
        "t_end": sim.t_end,
        "drift": {name: drift[name] for name in quantities},
        "constraint_drift": constraint_drift,
        "tolerance": tol,
        "within_tolerance": within,
    }
    return _render(report), 0 if within else 1


# -- LaTeX rendering -------------------------------------------------------


def latex_name(name: str) -> str:
    if name in _GREEK:
        return _GREEK[name]
    if len(name) == 1:
        return name
    return rf"\mathrm{{{name}}}"


def _latex_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    return rf"{sign}\tfrac{{{abs(value.numerator)}}}{{{value.denominator}}}"


def latex_expr(expr: SuperExpr) -> str:
    if expr.is_zero():
        return "0"
    chunks: list[str] = []
    for (even, odd), coeff in expr.items():
        factors = [
            rf"{latex_name(g.name)}_{{{g.jet_order}}}"
            + (rf"^{{{e}}}" if e > 1 else "")
            for g, e in even
        ]
        factors.extend(rf"{latex_name(g.name)}_{{{g.jet_order}}}" for g in odd)
        body = r" \, ".join(factors)
        if body:
            if coeff == 1:
                text = body
            elif coeff == -1:
                text = f"-{body}"
            else:
                text = rf"{_latex_fraction(coeff)} \, {body}"
        else:
            text = _latex_fraction(coeff)
        if not chunks:
            chunks.append(text)
        elif text.startswith("-"):
            chunks.append(f" - {text[1:]}")
        else:
            chunks.append(f" + {text}")
    return "".join(chunks)


def latex_form(form: GradedForm) -> str:
    if form.is_zero():
        return "0"
    chunks: list[str] = []
    for word, coeff in form.items():
        differentials = r" \wedge ".join(
            rf"\mathrm{{d}}{latex_name(g.name)}_{{{g.jet_order}}}" for g in word
        )
        coeff_text = latex_expr(coeff)
        if not word:
            text = coeff_text
        elif coeff_text == "1":
            text = differentials
        elif coeff_text == "-1":
            text = f"-{differentials}"
        elif "+" in coeff_text or " - " in coeff_text:
            text = rf"\left( {coeff_text} \right) {differentials}"
        else:
            text = rf"{coeff_text} \, {differentials}"
        if not chunks:
            chunks.append(text)
        elif text.startswith("-"):
            chunks.append(f" - {text[1:]}")
        else:
            chunks.append(f" + {text}")
    return "".join(chunks)


if __name__ == "__main__":
    sys.exit(main())
