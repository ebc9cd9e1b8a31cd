"""Shared test utilities.

Two kinds of helpers live here: seeded random generators for expressions,
forms, and fields, and a small independent polynomial calculator for the
one-even-coordinate case.  The calculator represents polynomials as plain
exponent-tuple dictionaries and knows nothing about the package
internals, so momenta and field equations computed with it are a second
opinion, not an echo.
"""

from __future__ import annotations

import random
from fractions import Fraction

from supermech import (
    Chart,
    GradedForm,
    Parity,
    SuperExpr,
    VectorFieldAlong,
    normalize,
    parity_of,
    parity_product,
)

# -- independent reference: one even coordinate q[0..n] --------------------
# A polynomial is a dict mapping exponent tuples to Fraction coefficients;
# entry (e0, e1, ...) stands for q[0]^e0 * q[1]^e1 * ...  Keys carry no
# trailing zeros so equal polynomials have equal dicts.

Poly = dict


def _trim(exps):
    exps = list(exps)
    while exps and exps[-1] == 0:
        exps.pop()
    return tuple(exps)


def poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for exps, coeff in b.items():
        total = out.get(exps, Fraction(0)) + coeff
        if total:
            out[exps] = total
        else:
            out.pop(exps, None)
    return out


def poly_scale(a: Poly, factor) -> Poly:
    factor = Fraction(factor)
    if not factor:
        return {}
    return {exps: coeff * factor for exps, coeff in a.items()}


def poly_partial(a: Poly, j: int) -> Poly:
    out: Poly = {}
    for exps, coeff in a.items():
        if j >= len(exps) or exps[j] == 0:
            continue
        new = list(exps)
        new[j] -= 1
        key = _trim(new)
        total = out.get(key, Fraction(0)) + coeff * exps[j]
        if total:
            out[key] = total
        else:
            out.pop(key, None)
    return out


def poly_total_derivative(a: Poly) -> Poly:
    out: Poly = {}
    for exps, coeff in a.items():
        for j, e in enumerate(exps):
            if e == 0:
                continue
            new = list(exps) + [0] * max(0, j + 2 - len(exps))
            new[j] -= 1
            new[j + 1] += 1
            key = _trim(new)
            total = out.get(key, Fraction(0)) + coeff * e
            if total:
                out[key] = total
            else:
                out.pop(key, None)
    return out


def poly_iterated_total(a: Poly, times: int) -> Poly:
    for _ in range(times):
        a = poly_total_derivative(a)
    return a


def classical_momentum(lagrangian: Poly, k: int, i: int) -> Poly:
    """The i-th Jacobi-Ostrogradski momentum of a one-coordinate order-k
    Lagrangian: sum over l of (-T)^l applied to dL/dq[i+1+l]."""
    out: Poly = {}
    for l in range(k - i):
        piece = poly_iterated_total(poly_partial(lagrangian, i + 1 + l), l)
        out = poly_add(out, poly_scale(piece, (-1) ** l))
    return out


def classical_field_equation(lagrangian: Poly, k: int) -> Poly:
    """sum over j of (-T)^j applied to dL/dq[j]."""
    out: Poly = {}
    for j in range(k + 1):
        piece = poly_iterated_total(poly_partial(lagrangian, j), j)
        out = poly_add(out, poly_scale(piece, (-1) ** j))
    return out


def poly_to_expr(a: Poly, chart: Chart) -> SuperExpr:
    out = SuperExpr.zero()
    name = chart.base_names()[0]
    for exps, coeff in a.items():
        term = SuperExpr.constant(coeff)
        for j, e in enumerate(exps):
            if e:
                term = term * chart.coord(name, j) ** e
        out = out + term
    return out


def random_poly(rng: random.Random, top: int, max_degree: int, terms: int) -> Poly:
    """A random nonzero polynomial in q[0..top] with small exact
    coefficients."""
    while True:
        out: Poly = {}
        for _ in range(terms):
            degree = rng.randint(1, max_degree)
            exps = [0] * (top + 1)
            for _ in range(degree):
                exps[rng.randrange(top + 1)] += 1
            coeff = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
            out = poly_add(out, {_trim(exps): coeff})
        out.pop((), None)
        if out:
            return out


# -- seeded random package objects -----------------------------------------


def random_expr(
    rng: random.Random,
    chart: Chart,
    max_order: int,
    max_degree: int,
    terms: int,
    parity: Parity | None = None,
) -> SuperExpr:
    """A random expression on the order-``max_order`` chart; when a parity
    is requested the other half is dropped (possibly leaving zero)."""
    gens = chart.at_order(max_order).coordinates()
    raw = []
    for _ in range(terms):
        degree = rng.randint(0, max_degree)
        factors = [rng.choice(gens) for _ in range(degree)]
        raw.append((Fraction(rng.randint(-6, 6), rng.randint(1, 3)), factors))
    expr = normalize(raw)
    if parity is not None:
        even_part, odd_part = expr.parity_split()
        expr = even_part if parity is Parity.EVEN else odd_part
    return expr


def random_homogeneous(
    rng: random.Random,
    chart: Chart,
    max_order: int,
    max_degree: int,
    terms: int,
    parity: Parity,
    attempts: int = 60,
) -> SuperExpr:
    for _ in range(attempts):
        expr = random_expr(rng, chart, max_order, max_degree, terms, parity)
        if not expr.is_zero():
            return expr
    raise RuntimeError("could not draw a nonzero homogeneous expression")


def random_form(
    rng: random.Random, chart: Chart, max_order: int, words: int, length: int
) -> GradedForm:
    gens = chart.at_order(max_order).coordinates()
    out = GradedForm.zero()
    for _ in range(words):
        word = [rng.choice(gens) for _ in range(length)]
        out = out + GradedForm.term(random_expr(rng, chart, max_order, 2, 2), word)
    return out


def random_homogeneous_form(
    rng: random.Random,
    chart: Chart,
    max_order: int,
    length: int,
    parity: Parity,
    attempts: int = 60,
) -> GradedForm:
    """A single-word form whose coefficient has a definite parity."""
    gens = chart.at_order(max_order).coordinates()
    for _ in range(attempts):
        word = [rng.choice(gens) for _ in range(length)]
        coeff = random_expr(rng, chart, max_order, 2, 3, parity)
        form = GradedForm.term(coeff, word)
        if not form.is_zero():
            return form
    raise RuntimeError("could not draw a nonzero homogeneous form")


def form_degree_parity(form: GradedForm) -> tuple[int, int]:
    """(form degree, total parity bit) of a form with one kind of term."""
    bits = set()
    for word, coeff in form.items():
        word_parity = sum(g.parity.value for g in word) % 2
        bits.add((len(word), (word_parity + parity_of(coeff).value) % 2))
    if len(bits) != 1:
        raise ValueError("form is not homogeneous")
    return next(iter(bits))


def random_field(
    rng: random.Random,
    chart: Chart,
    source: int,
    target: int,
    parity: Parity,
    max_degree: int = 2,
    terms: int = 2,
) -> VectorFieldAlong | None:
    """A random field along T^target -> T^source of the given parity, or
    None when every drawn component collapses to zero."""
    components = {}
    for gen in chart.at_order(source).coordinates():
        comp = random_expr(
            rng, chart, target, max_degree, terms, parity_product(parity, gen.parity)
        )
        if not comp.is_zero():
            components[gen] = comp
    if not components:
        return None
    return VectorFieldAlong(chart, source, target, components, parity)
