"""The Lagrangian pipeline: momentum form, energy, field equations,
dynamics, and the symmetry/conserved-quantity correspondence.

For an even Lagrangian of order k the momentum one-form lives on
T^(2k-1), the field equations are the components of a one-form that is
semibasic over the base, and a regular Lagrangian determines a unique
second-order-type field.  Odd coordinates entering the Lagrangian only
below top order produce lower-order equations; these are solved as
constraints and prolonged by total differentiation instead of being
promoted to fake forces.

All checks are symbolic and exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import (
    GeneratorSymbol,
    Parity,
    SuperExpr,
    has_parity,
    left_partial,
    normalize,
    parity_of,
    parity_product,
    substitute,
)
from .forms import (
    CheckForm,
    GradedForm,
    cartan_operator,
    exterior_d,
    interior,
    pair,
    semibasic_check,
    total_derivative as form_total_derivative,
)
from .jets import (
    Chart,
    OrderExceeded,
    VectorFieldAlong,
    iterated_total_derivative,
    lift_vector_field,
    liouville_field,
    total_derivative as expr_total_derivative,
    total_derivative_field,
    vertical_endomorphism,
)


class LagrangianError(Exception):
    pass


class NotRegular(LagrangianError):
    def __init__(self, report: "RegularityReport"):
        super().__init__(f"Lagrangian is {report.verdict.value}")
        self.report = report


class SingularSystem(LagrangianError):
    pass


class NotSymmetry(LagrangianError):
    def __init__(self, certificate: Mapping[str, SuperExpr]):
        parts = ", ".join(f"{name}: {expr}" for name, expr in sorted(certificate.items()))
        super().__init__(f"not a symmetry; nonvanishing variational data ({parts})")
        self.certificate = dict(certificate)


class NoWitness(LagrangianError):
    pass


class NotProjectable(LagrangianError):
    pass


@dataclass(frozen=True)
class SuperLagrangian:
    """An even polynomial Lagrangian on an order-k chart (k >= 1)."""

    chart: Chart
    expr: SuperExpr

    def __post_init__(self):
        if self.chart.order < 1:
            raise OrderExceeded("a Lagrangian needs chart order k >= 1")
        self.chart.validate(self.expr)
        if not has_parity(self.expr, Parity.EVEN):
            raise LagrangianError("the Lagrangian must be even")

    @property
    def order(self) -> int:
        return self.chart.order


def variational_derivative(expr: SuperExpr, base_gen: GeneratorSymbol) -> SuperExpr:
    """The alternating-sign combination of shifted partials that vanishes
    exactly on total time derivatives."""
    if base_gen.jet_order != 0:
        raise ValueError("variational derivatives are taken per base coordinate")
    out = SuperExpr.zero()
    for j in range(expr.max_jet_order() + 1):
        term = left_partial(expr, base_gen.shifted(j))
        out = out + (-1) ** j * iterated_total_derivative(term, j)
    return out


# -- Cartan package --------------------------------------------------------


def cartan_one_form(lag: SuperLagrangian) -> GradedForm:
    """The momentum one-form on T^(2k-1); semibasic at level k-1."""
    theta = cartan_operator(exterior_d(lag.expr), lag.order)
    semibasic_check(theta, lag.order - 1)
    return theta


def cartan_two_form(lag: SuperLagrangian) -> GradedForm:
    return -exterior_d(cartan_one_form(lag))


def energy(lag: SuperLagrangian) -> SuperExpr:
    """Pair the momentum components against the total-derivative field and
    subtract the Lagrangian."""
    k = lag.order
    theta_check = semibasic_check(cartan_one_form(lag), k - 1)
    t_field = total_derivative_field(lag.chart, k - 1).widen_target(2 * k - 1)
    return pair(t_field, theta_check) - lag.expr


def euler_lagrange_form(lag: SuperLagrangian) -> GradedForm:
    """The variational one-form on T^(2k): dL minus the total derivative
    of the momentum form.  Semibasic over the base; its components are the
    graded field equations.

    The alternative route through the two-form and the energy must agree,
    and is checked on every call.
    """
    k = lag.order
    theta = cartan_one_form(lag)
    delta = exterior_d(lag.expr) - form_total_derivative(theta)
    semibasic_check(delta, 0)

    omega = -exterior_d(theta)
    t_field = total_derivative_field(lag.chart, 2 * k - 1)
    chain = interior(t_field, omega) - exterior_d(energy(lag))
    if chain != delta:
        raise LagrangianError("internal identity failure relating the variational form to the two-form")
    return delta


@dataclass(frozen=True)
class CartanData:
    """The derived geometry of one Lagrangian, computed once."""

    lagrangian: SuperLagrangian
    theta: GradedForm
    omega: GradedForm
    energy: SuperExpr
    delta: GradedForm

    @property
    def theta_check(self) -> CheckForm:
        return semibasic_check(self.theta, self.lagrangian.order - 1)

    @property
    def delta_check(self) -> CheckForm:
        return semibasic_check(self.delta, 0)


def cartan_data(lag: SuperLagrangian) -> CartanData:
    return CartanData(
        lagrangian=lag,
        theta=cartan_one_form(lag),
        omega=cartan_two_form(lag),
        energy=energy(lag),
        delta=euler_lagrange_form(lag),
    )


# -- linear algebra over the superalgebra ----------------------------------


def _body(expr: SuperExpr) -> SuperExpr:
    """Strip every term containing an odd generator."""
    return SuperExpr({key: c for key, c in expr.items() if not key[1]})


def _det(matrix: Sequence[Sequence[SuperExpr]]) -> SuperExpr:
    n = len(matrix)
    if n == 0:
        return SuperExpr.constant(1)
    if n == 1:
        return matrix[0][0]
    out = SuperExpr.zero()
    for col in range(n):
        entry = matrix[0][col]
        if entry.is_zero():
            continue
        minor = [[row[c] for c in range(n) if c != col] for row in matrix[1:]]
        out = out + (-1) ** col * entry * _det(minor)
    return out


def _adjugate(matrix: Sequence[Sequence[SuperExpr]]) -> list[list[SuperExpr]]:
    n = len(matrix)
    if n == 1:
        return [[SuperExpr.constant(1)]]
    adj = [[SuperExpr.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [matrix[r][c] for c in range(n) if c != j]
                for r in range(n)
                if r != i
            ]
            adj[j][i] = (-1) ** (i + j) * _det(minor)
    return adj


def _mat_mul(a: Sequence[Sequence[SuperExpr]], b: Sequence[Sequence[SuperExpr]]) -> list[list[SuperExpr]]:
    rows, mid, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[SuperExpr.zero()] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            acc = SuperExpr.zero()
            for l in range(mid):
                acc = acc + a[i][l] * b[l][j]
            out[i][j] = acc
    return out


def _mat_vec(a: Sequence[Sequence[SuperExpr]], v: Sequence[SuperExpr]) -> list[SuperExpr]:
    return [
        sum((a[i][l] * v[l] for l in range(len(v))), SuperExpr.zero())
        for i in range(len(a))
    ]


def _solve_affine(
    matrix: Sequence[Sequence[SuperExpr]],
    rhs: Sequence[SuperExpr],
    nilpotency_cap: int,
) -> list[SuperExpr]:
    """Solve A u = rhs when the body of A has a constant nonzero
    determinant.  The nilpotent remainder is peeled off with a finite
    geometric series; the result is verified exactly."""
    n = len(matrix)
    body = [[_body(e) for e in row] for row in matrix]
    det = _det(body)
    if det.is_zero() or det.max_jet_order() >= 0:
        raise SingularSystem(f"leading matrix has non-invertible body determinant {det}")
    scale = det.constant_term()
    adj = _adjugate(body)
    inv_body = [[e / scale for e in row] for row in adj]
    soul = [
        [matrix[i][j] - body[i][j] for j in range(n)]
        for i in range(n)
    ]
    correction = _mat_mul(inv_body, soul)
    u = _mat_vec(inv_body, list(rhs))
    term = u
    for _ in range(nilpotency_cap + 1):
        term = [-x for x in _mat_vec(correction, term)]
        if all(x.is_zero() for x in term):
            break
        u = [a + b for a, b in zip(u, term)]
    else:
        raise SingularSystem("nilpotent correction failed to terminate")
    residual = [
        sum((matrix[i][j] * u[j] for j in range(n)), SuperExpr.zero()) - rhs[i]
        for i in range(n)
    ]
    if any(not r.is_zero() for r in residual):
        raise SingularSystem("affine solve verification failed")
    return u


def _affine_split(
    expr: SuperExpr, unknowns: set[GeneratorSymbol]
) -> tuple[SuperExpr, dict[GeneratorSymbol, SuperExpr]]:
    """Write ``expr = rest + sum coeff[u] * u`` with each unknown moved to
    the right end of its term.  Fails when an unknown appears nonlinearly
    or two unknowns share a term."""
    rest = SuperExpr.zero()
    coeffs: dict[GeneratorSymbol, SuperExpr] = {}
    for (even, odd), c in expr.items():
        hits_even = [(g, e) for g, e in even if g in unknowns]
        hits_odd = [g for g in odd if g in unknowns]
        count = sum(e for _, e in hits_even) + len(hits_odd)
        term = SuperExpr({(even, odd): c})
        if count == 0:
            rest = rest + term
            continue
        if count > 1:
            raise SingularSystem(f"equation is not affine in the unknowns: term {term}")
        if hits_even:
            gen = hits_even[0][0]
            reduced = tuple((g, e) for g, e in even if g != gen)
            coeff = SuperExpr({(reduced, odd): c})
        else:
            gen = hits_odd[0]
            pos = odd.index(gen)
            sign = (-1) ** (len(odd) - 1 - pos)
            coeff = SuperExpr({(even, odd[:pos] + odd[pos + 1:]): c * sign})
        coeffs[gen] = coeffs.get(gen, SuperExpr.zero()) + coeff
    return rest, coeffs


# -- regularity and dynamics -----------------------------------------------


class Regularity(Enum):
    REGULAR = "regular"
    DEGENERATE = "degenerate"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class RegularityReport:
    verdict: Regularity
    determinants: tuple[SuperExpr, ...]
    note: str = ""


@dataclass(frozen=True)
class Dynamics:
    """A second-order-type field solving the field equations.

    ``forces`` assigns every order-2k coordinate its value along the
    dynamics; ``constraints`` holds solved lower-order relations from the
    degenerate odd sector (empty for strictly regular systems), used to
    reduce on-shell expressions.
    """

    lagrangian: SuperLagrangian
    forces: Mapping[GeneratorSymbol, SuperExpr]
    constraints: Mapping[GeneratorSymbol, SuperExpr]

    @property
    def order(self) -> int:
        return 2 * self.lagrangian.order - 1

    def field(self) -> VectorFieldAlong:
        chart = self.lagrangian.chart
        top = self.order
        comps: dict[GeneratorSymbol, SuperExpr] = {}
        for gen in chart.at_order(top).coordinates():
            if gen.jet_order < top:
                comps[gen] = SuperExpr.generator(gen.shifted())
            else:
                comps[gen] = self.forces[gen.shifted()]
        return VectorFieldAlong(chart, top, top, comps, Parity.EVEN)

    def reduce(self, expr: SuperExpr) -> SuperExpr:
        """Substitute the solved constraints until stable."""
        for _ in range(2 * self.lagrangian.order + 2):
            reduced = substitute(expr, dict(self.constraints))
            if reduced == expr:
                return expr
            expr = reduced
        raise SingularSystem("constraint substitution did not stabilise")

    def reduce_form(self, form: GradedForm) -> GradedForm:
        out = GradedForm.zero()
        for word, coeff in form.items():
            out = out + GradedForm({word: self.reduce(coeff)})
        return out

    def on_shell(self, expr: SuperExpr) -> SuperExpr:
        """Substitute top-order coordinates by forces, then reduce."""
        for _ in range(2 * self.lagrangian.order + 2):
            replaced = substitute(expr, dict(self.forces))
            replaced = self.reduce(replaced)
            if replaced == expr:
                return expr
            expr = replaced
        raise SingularSystem("on-shell substitution did not stabilise")


@dataclass(frozen=True)
class _SolvePlan:
    report: RegularityReport
    dynamical: tuple[tuple[GeneratorSymbol, SuperExpr, dict[GeneratorSymbol, SuperExpr]], ...]
    dyn_unknowns: tuple[GeneratorSymbol, ...]
    constraint_rows: tuple[tuple[GeneratorSymbol, SuperExpr], ...]


def _solve_plan(lag: SuperLagrangian, delta_check: CheckForm) -> _SolvePlan:
    chart = lag.chart
    k = lag.order
    tops = {g.shifted(2 * k) for g in chart.at_order(0).coordinates()}
    determinants: list[SuperExpr] = []

    dynamical = []
    constraint_rows = []
    dyn_unknowns: set[GeneratorSymbol] = set()
    for base in chart.at_order(0).coordinates():
        eq = delta_check.component(base)
        if eq.is_zero():
            return _SolvePlan(
                RegularityReport(
                    Regularity.DEGENERATE, (), f"no field equation for {base.name}"
                ),
                (), (), (),
            )
        rest, coeffs = _affine_split(eq, tops)
        if coeffs:
            dynamical.append((base, rest, coeffs))
            dyn_unknowns.update(coeffs)
        else:
            if base.parity is Parity.EVEN:
                return _SolvePlan(
                    RegularityReport(
                        Regularity.DEGENERATE, (), f"even equation for {base.name} is lower order"
                    ),
                    (), (), (),
                )
            constraint_rows.append((base, rest))

    unknown_list = tuple(sorted(dyn_unknowns, key=lambda g: g.sort_key))
    if len(unknown_list) != len(dynamical):
        return _SolvePlan(
            RegularityReport(
                Regularity.DEGENERATE,
                (),
                f"{len(dynamical)} equations determine {len(unknown_list)} top coordinates",
            ),
            (), (), (),
        )

    matrix = [
        [_body(coeffs.get(u, SuperExpr.zero())) for u in unknown_list]
        for _, _, coeffs in dynamical
    ]
    if matrix:
        determinants.append(_det(matrix))

    if constraint_rows:
        level = max(r.max_jet_order() for _, r in constraint_rows)
        con_unknowns = sorted(
            {
                g
                for _, r in constraint_rows
                for g in r.generators()
                if g.jet_order == level and g.parity is Parity.ODD
            },
            key=lambda g: g.sort_key,
        )
        if len(con_unknowns) != len(constraint_rows):
            return _SolvePlan(
                RegularityReport(
                    Regularity.DEGENERATE, tuple(determinants), "constraint sector is not square"
                ),
                (), (), (),
            )
        try:
            con_matrix = [
                [
                    _body(_affine_split(r, set(con_unknowns))[1].get(u, SuperExpr.zero()))
                    for u in con_unknowns
                ]
                for _, r in constraint_rows
            ]
        except SingularSystem:
            return _SolvePlan(
                RegularityReport(
                    Regularity.DEGENERATE, tuple(determinants), "constraint sector is not affine"
                ),
                (), (), (),
            )
        determinants.append(_det(con_matrix))

    dets = tuple(determinants)
    if any(d.is_zero() for d in dets):
        verdict = Regularity.DEGENERATE
    elif any(d.max_jet_order() >= 0 for d in dets):
        verdict = Regularity.INDETERMINATE
    else:
        verdict = Regularity.REGULAR
    return _SolvePlan(
        RegularityReport(verdict, dets),
        tuple(dynamical),
        unknown_list,
        tuple(constraint_rows),
    )


def regularity(lag: SuperLagrangian) -> RegularityReport:
    """Classify the Lagrangian by the leading coefficient matrices of its
    field equations, evaluated with all odd generators set to zero.

    Regular: constant nonzero determinants (unique dynamics).
    Degenerate: a determinant vanishes identically.
    Indeterminate: a determinant is a nonconstant expression, so
    invertibility depends on the point; reported, not decided.
    """
    data = cartan_data(lag)
    return _solve_plan(lag, data.delta_check).report


def solve_dynamics(lag: SuperLagrangian, data: CartanData | None = None) -> Dynamics:
    """Solve the field equations of a regular Lagrangian.

    Produces forces for every top-order coordinate; lower-order odd
    equations are solved as constraints and prolonged by total
    differentiation up to top order.  The result is post-verified: the
    field is even, second-order-type, and the contraction identity against
    the two-form and the energy differential reduces to zero.
    """
    data = data or cartan_data(lag)
    chart = lag.chart
    k = lag.order
    plan = _solve_plan(lag, data.delta_check)
    if plan.report.verdict is not Regularity.REGULAR:
        raise NotRegular(plan.report)

    n_odd_symbols = len(chart.base_odd) * (2 * k + 1)
    forces: dict[GeneratorSymbol, SuperExpr] = {}
    if plan.dynamical:
        matrix = [
            [coeffs.get(u, SuperExpr.zero()) for u in plan.dyn_unknowns]
            for _, _, coeffs in plan.dynamical
        ]
        rhs = [-rest for _, rest, _ in plan.dynamical]
        solution = _solve_affine(matrix, rhs, n_odd_symbols)
        for gen, value in zip(plan.dyn_unknowns, solution):
            if not has_parity(value, gen.parity):
                raise SingularSystem(f"force for {gen} has the wrong parity")
            forces[gen] = value

    constraints: dict[GeneratorSymbol, SuperExpr] = {}
    if plan.constraint_rows:
        level = max(r.max_jet_order() for _, r in plan.constraint_rows)
        con_unknowns = sorted(
            {
                g
                for _, r in plan.constraint_rows
                for g in r.generators()
                if g.jet_order == level and g.parity is Parity.ODD
            },
            key=lambda g: g.sort_key,
        )
        matrix = []
        rhs = []
        for _, r in plan.constraint_rows:
            rest, coeffs = _affine_split(r, set(con_unknowns))
            matrix.append([coeffs.get(u, SuperExpr.zero()) for u in con_unknowns])
            rhs.append(-rest)
        solution = _solve_affine(matrix, rhs, n_odd_symbols)
        for gen, value in zip(con_unknowns, solution):
            if not has_parity(value, gen.parity):
                raise SingularSystem(f"constraint value for {gen} has the wrong parity")
            constraints[gen] = value
        # prolong each solved relation up to top order; the top level
        # supplies the otherwise undetermined odd forces
        for gen in con_unknowns:
            value = constraints[gen]
            for j in range(gen.jet_order + 1, 2 * k + 1):
                value = expr_total_derivative(value)
                target = gen.shifted(j - gen.jet_order)
                if target.jet_order == 2 * k:
                    forces.setdefault(target, value)
                else:
                    constraints.setdefault(target, value)

    missing = [
        g.shifted(2 * k)
        for g in chart.at_order(0).coordinates()
        if g.shifted(2 * k) not in forces
    ]
    if missing:
        raise SingularSystem(f"no force determined for {missing[0]}")

    dyn = Dynamics(lag, forces, constraints)
    gamma = dyn.field()
    if gamma.parity is not Parity.EVEN:
        raise SingularSystem("the dynamics field is not even")
    if not is_sode(gamma):
        raise SingularSystem("the dynamics field is not second-order-type")

    residual = interior(gamma, data.omega) - exterior_d(data.energy)
    if not dyn.reduce_form(residual).is_zero():
        raise SingularSystem("dynamics verification failed: contraction identity residual")
    for base in chart.at_order(0).coordinates():
        if not dyn.on_shell(data.delta_check.component(base)).is_zero():
            raise SingularSystem("dynamics verification failed: field equations not satisfied")
    return dyn


def is_sode(field: VectorFieldAlong) -> bool:
    """Second-order-type test: every non-top coordinate maps to its
    successor; equivalently the vertical endomorphism sends the field to
    the dilation field.  Both formulations are evaluated and must agree."""
    if field.source_order != field.target_order:
        raise OrderExceeded("second-order-type fields live on a single chart")
    k = field.source_order
    chart = field.chart
    direct = all(
        field.component(gen) == SuperExpr.generator(gen.shifted())
        for gen in chart.at_order(k - 1).coordinates()
    )
    via_endomorphism = vertical_endomorphism(field) == liouville_field(chart, k)
    if direct != via_endomorphism:
        raise LagrangianError("second-order-type formulations disagree")
    return direct


def check_constant_of_motion(g_expr: SuperExpr, dyn: Dynamics) -> bool:
    """True when the dynamics field annihilates the quantity after the
    solved constraints are imposed."""
    value = dyn.field().apply(g_expr)
    return dyn.reduce(value).is_zero()


# -- symmetry and conserved quantity correspondence ------------------------


def _monomials(
    gens: Sequence[GeneratorSymbol], max_degree: int, parity: Parity
) -> list[SuperExpr]:
    """All monomials of bounded total degree and fixed parity, in a
    deterministic order; the constant monomial is included for even
    parity."""
    evens = [g for g in gens if g.parity is Parity.EVEN]
    odds = [g for g in gens if g.parity is Parity.ODD]
    out: list[SuperExpr] = []
    for subset_size in range(len(odds) + 1):
        if subset_size > max_degree or subset_size % 2 != parity.value:
            continue
        for subset in itertools.combinations(odds, subset_size):
            budget = max_degree - subset_size
            for exponents in _exponent_vectors(len(evens), budget):
                factors = [g for g, e in zip(evens, exponents) for _ in range(e)]
                factors.extend(subset)
                out.append(normalize([(1, factors)]))
    return out


def _exponent_vectors(count: int, budget: int):
    if count == 0:
        yield ()
        return
    for head in range(budget + 1):
        for tail in _exponent_vectors(count - 1, budget - head):
            yield (head,) + tail


def _solve_rational(columns: Sequence[SuperExpr], target: SuperExpr) -> list[Fraction] | None:
    """Find rational coefficients with sum(c_i * columns_i) = target, or
    None when inconsistent.  Free coefficients are set to zero."""
    keys: list = sorted(
        {key for col in columns for key, _ in col.items()}
        | {key for key, _ in target.items()},
        key=lambda key: (str(key),),
    )
    index = {key: i for i, key in enumerate(keys)}
    rows = [[Fraction(0)] * (len(columns) + 1) for _ in keys]
    for c, col in enumerate(columns):
        for key, coeff in col.items():
            rows[index[key]][c] = coeff
    for key, coeff in target.items():
        rows[index[key]][-1] = coeff

    pivot_row = 0
    pivot_cols = []
    for col in range(len(columns)):
        pivot = next((r for r in range(pivot_row, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[pivot_row], rows[pivot] = rows[pivot], rows[pivot_row]
        lead = rows[pivot_row][col]
        rows[pivot_row] = [x / lead for x in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[pivot_row])]
        pivot_cols.append(col)
        pivot_row += 1
    for r in range(pivot_row, len(rows)):
        if rows[r][-1]:
            return None
    solution = [Fraction(0)] * len(columns)
    for i, col in enumerate(pivot_cols):
        solution[col] = rows[i][-1]
    return solution


def conservation_witness(
    g_expr: SuperExpr,
    lag: SuperLagrangian,
    data: CartanData | None = None,
    max_degree: int | None = None,
) -> VectorFieldAlong:
    """Find a field along the projection to the base whose pairing with
    the field-equation components reproduces the total derivative of the
    quantity (with a minus sign).  Components are sought as polynomials of
    growing degree; raises NoWitness when the bound is exhausted."""
    data = data or cartan_data(lag)
    chart = lag.chart
    k = lag.order
    if g_expr.is_zero():
        return VectorFieldAlong(chart, 0, 2 * k - 1, {}, Parity.EVEN)
    chart.at_order(2 * k - 1).validate(g_expr)
    g_parity = parity_of(g_expr)
    target = expr_total_derivative(g_expr)
    delta_check = data.delta_check
    cap = max_degree if max_degree is not None else g_expr.total_degree() + 2 * k

    ambient = chart.at_order(2 * k - 1).coordinates()
    bases = chart.at_order(0).coordinates()
    for degree in range(cap + 1):
        columns: list[SuperExpr] = []
        labels: list[tuple[GeneratorSymbol, SuperExpr]] = []
        for base in bases:
            component = delta_check.component(base)
            if component.is_zero():
                continue
            sign = -1 if (g_parity.value and parity_of(component).value) else 1
            comp_parity = parity_product(base.parity, g_parity)
            for mono in _monomials(ambient, degree, comp_parity):
                columns.append(-sign * component * mono)
                labels.append((base, mono))
        solution = _solve_rational(columns, target)
        if solution is None:
            continue
        components: dict[GeneratorSymbol, SuperExpr] = {}
        for (base, mono), coeff in zip(labels, solution):
            if coeff:
                components[base] = components.get(base, SuperExpr.zero()) + coeff * mono
        witness = VectorFieldAlong(chart, 0, 2 * k - 1, components, g_parity)
        check = pair(witness.widen_target(2 * k), delta_check)
        if target + check != SuperExpr.zero():
            raise LagrangianError("witness verification failed")
        return witness
    raise NoWitness(
        f"no witness field with polynomial components of degree <= {cap}"
    )


def _integrate_total_derivative(target: SuperExpr, chart: Chart, order: int) -> SuperExpr:
    """Invert the total derivative on jet polynomials: find F on the
    order-``order`` chart with T(F) = target and zero constant term."""
    if target.is_zero():
        return SuperExpr.zero()
    parity = parity_of(target)
    gens = chart.at_order(order).coordinates()
    monos = [
        m for m in _monomials(gens, target.total_degree(), parity) if m.constant_term() == 0
    ]
    columns = [expr_total_derivative(m) for m in monos]
    solution = _solve_rational(columns, target)
    if solution is None:
        raise LagrangianError("total-derivative inversion failed on an exact expression")
    out = SuperExpr.zero()
    for mono, coeff in zip(monos, solution):
        out = out + coeff * mono
    return out


def check_symmetry(
    x_field: VectorFieldAlong, lag: SuperLagrangian
) -> SuperExpr:
    """Decide whether the k-th lift of the field changes the Lagrangian by
    a total time derivative; return the generating function F (normalised
    to zero constant term) or raise NotSymmetry with the nonvanishing
    variational derivatives as certificate."""
    chart = lag.chart
    k = lag.order
    if x_field.source_order != 0 or x_field.target_order != 2 * k - 1:
        raise OrderExceeded("symmetry candidates are fields along the projection to the base")
    rate = lift_vector_field(x_field, k).apply(lag.expr)
    certificate: dict[str, SuperExpr] = {}
    for base in chart.at_order(0).coordinates():
        vd = variational_derivative(rate, base)
        if not vd.is_zero():
            certificate[base.name] = vd
    constant = rate.constant_term()
    if constant:
        certificate["1"] = SuperExpr.constant(constant)
    if certificate:
        raise NotSymmetry(certificate)
    generating = _integrate_total_derivative(rate, chart, 3 * k - 2)
    if expr_total_derivative(generating) != rate:
        raise LagrangianError("generating function verification failed")
    return generating


def noether_charge(
    x_field: VectorFieldAlong,
    generating: SuperExpr,
    lag: SuperLagrangian,
    data: CartanData | None = None,
    verify: bool = True,
) -> SuperExpr:
    """The conserved quantity attached to a symmetry: pair the (k-1)-th
    lift against the momentum components and subtract the generating
    function.  The result must only involve coordinates up to order 2k-1;
    for a regular Lagrangian it is checked to be constant along the
    dynamics."""
    data = data or cartan_data(lag)
    k = lag.order
    lifted = lift_vector_field(x_field, k - 1)
    charge = pair(lifted.widen_target(3 * k - 2), data.theta_check) - generating
    if charge.max_jet_order() > 2 * k - 1:
        raise NotProjectable(
            f"charge involves jet order {charge.max_jet_order()}, above {2 * k - 1}"
        )
    if verify and _solve_plan(lag, data.delta_check).report.verdict is Regularity.REGULAR:
        dyn = solve_dynamics(lag, data)
        if not check_constant_of_motion(charge, dyn):
            raise LagrangianError("charge verification failed: not constant along the dynamics")
    return charge


@dataclass(frozen=True)
class NoetherCertificate:
    """A symmetry together with its generating function and charge.

    ``x_field`` raises the Lagrangian by the total derivative of
    ``generating`` under the top-order lift, and ``charge`` is constant
    along the dynamics.
    """

    x_field: VectorFieldAlong
    generating: SuperExpr
    charge: SuperExpr


def certify_symmetry(
    x_field: VectorFieldAlong,
    lag: SuperLagrangian,
    data: CartanData | None = None,
    verify: bool = True,
) -> NoetherCertificate:
    """Check the candidate field and bundle it with its generating
    function and conserved charge; raises NotSymmetry otherwise."""
    data = data or cartan_data(lag)
    generating = check_symmetry(x_field, lag)
    charge = noether_charge(x_field, generating, lag, data, verify=verify)
    return NoetherCertificate(x_field, generating, charge)


def noether_inverse(
    g_expr: SuperExpr,
    lag: SuperLagrangian,
    data: CartanData | None = None,
    max_degree: int | None = None,
) -> tuple[VectorFieldAlong, SuperExpr]:
    """Recover a symmetry from a conserved quantity.

    The witness field for the quantity is itself the symmetry; its
    generating function is the momentum pairing minus the quantity.  The
    defining identity of the symmetry is re-verified exactly."""
    data = data or cartan_data(lag)
    k = lag.order
    witness = conservation_witness(g_expr, lag, data, max_degree)
    lifted = lift_vector_field(witness, k - 1)
    generating = pair(lifted.widen_target(3 * k - 2), data.theta_check) - g_expr
    rate = lift_vector_field(witness, k).apply(lag.expr)
    if rate != expr_total_derivative(generating):
        raise LagrangianError("recovered symmetry failed the defining identity")
    return witness, generating
