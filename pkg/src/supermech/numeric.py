"""Floating-point evaluation of solved dynamics with nilpotent odd data.

Odd coordinates take values in a finite exterior algebra over float
coefficients: a value with ``n`` directions stores one coefficient per
subset of the directions, indexed by bitmask.  Products merge disjoint
subsets with the usual alternating sign and vanish on overlap, so
symbolic identities evaluate exactly (up to roundoff) without any
re-ordering logic here: canonical ordering happens upstream.

Integration is classic fixed-step fourth-order Runge-Kutta on the flat
coordinate vector of all subset coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import GeneratorSymbol, Parity, SuperExpr
from .lagrangian import Dynamics


class NumericError(Exception):
    pass


class MissingValue(NumericError):
    pass


class ParityViolation(NumericError):
    pass


class ConstraintViolation(NumericError):
    pass


class IntegrationError(NumericError):
    pass


@lru_cache(maxsize=None)
def _merge_sign(left_mask: int, right_mask: int) -> int:
    """Sign of concatenating two ordered subsets, counting the swaps that
    interleave them into one ordered word."""
    crossings = 0
    for i in range(right_mask.bit_length()):
        if right_mask >> i & 1:
            crossings += (left_mask >> (i + 1)).bit_count()
    return -1 if crossings % 2 else 1


class GrassmannValue:
    """An element of the exterior algebra on ``directions`` generators
    with float coefficients, one per subset bitmask."""

    __slots__ = ("directions", "coeffs")

    def __init__(self, directions: int, coeffs: np.ndarray | None = None):
        if not 0 <= directions <= 8:
            raise NumericError("between 0 and 8 odd directions are supported")
        self.directions = directions
        if coeffs is None:
            coeffs = np.zeros(1 << directions)
        else:
            coeffs = np.asarray(coeffs, dtype=float)
            if coeffs.shape != (1 << directions,):
                raise NumericError(
                    f"expected {1 << directions} coefficients, got {coeffs.shape}"
                )
        self.coeffs = coeffs

    @staticmethod
    def scalar(value: float, directions: int) -> "GrassmannValue":
        out = GrassmannValue(directions)
        out.coeffs[0] = float(value)
        return out

    @staticmethod
    def direction(index: int, directions: int) -> "GrassmannValue":
        if not 0 <= index < directions:
            raise NumericError(f"direction index {index} out of range")
        out = GrassmannValue(directions)
        out.coeffs[1 << index] = 1.0
        return out

    @staticmethod
    def from_terms(
        terms: Iterable[tuple[float, Sequence[int]]], directions: int
    ) -> "GrassmannValue":
        """Build from (coefficient, direction indices) pairs; repeated
        indices kill a term and odd permutations flip its sign."""
        out = GrassmannValue(directions)
        for value, indices in terms:
            acc = GrassmannValue.scalar(value, directions)
            for index in indices:
                acc = acc * GrassmannValue.direction(index, directions)
            out = out + acc
        return out

    def body(self) -> float:
        return float(self.coeffs[0])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def is_even_support(self) -> bool:
        return all(
            mask.bit_count() % 2 == 0 or value == 0.0
            for mask, value in enumerate(self.coeffs)
        )

    def is_odd_support(self) -> bool:
        return all(
            mask.bit_count() % 2 == 1 or value == 0.0
            for mask, value in enumerate(self.coeffs)
        )

    def supports_parity(self, parity: Parity) -> bool:
        return self.is_even_support() if parity is Parity.EVEN else self.is_odd_support()

    def __add__(self, other: "GrassmannValue") -> "GrassmannValue":
        self._compatible(other)
        return GrassmannValue(self.directions, self.coeffs + other.coeffs)

    def __sub__(self, other: "GrassmannValue") -> "GrassmannValue":
        self._compatible(other)
        return GrassmannValue(self.directions, self.coeffs - other.coeffs)

    def __neg__(self) -> "GrassmannValue":
        return GrassmannValue(self.directions, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return GrassmannValue(self.directions, self.coeffs * other)
        self._compatible(other)
        out = np.zeros_like(self.coeffs)
        left_nonzero = np.nonzero(self.coeffs)[0]
        right_nonzero = np.nonzero(other.coeffs)[0]
        for a in left_nonzero:
            xa = self.coeffs[a]
            for b in right_nonzero:
                if a & b:
                    continue
                out[a | b] += _merge_sign(int(a), int(b)) * xa * other.coeffs[b]
        return GrassmannValue(self.directions, out)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return GrassmannValue(self.directions, self.coeffs * other)
        return NotImplemented

    def __pow__(self, exponent: int) -> "GrassmannValue":
        if exponent < 0:
            raise NumericError("negative powers are not defined")
        out = GrassmannValue.scalar(1.0, self.directions)
        for _ in range(exponent):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GrassmannValue)
            and self.directions == other.directions
            and bool(np.array_equal(self.coeffs, other.coeffs))
        )

    def __repr__(self) -> str:
        parts = []
        for mask, value in enumerate(self.coeffs):
            if value == 0.0:
                continue
            indices = [i for i in range(self.directions) if mask >> i & 1]
            label = "*".join(f"g[{i}]" for i in indices) or "1"
            parts.append(f"{float(value)!r}*{label}")
        return f"GrassmannValue({' + '.join(parts) or '0.0'})"

    def _compatible(self, other: "GrassmannValue"):
        if not isinstance(other, GrassmannValue):
            raise NumericError(f"cannot combine with {type(other).__name__}")
        if self.directions != other.directions:
            raise NumericError("mismatched numbers of odd directions")


@dataclass(frozen=True)
class NumericState:
    """Coordinate values at one instant.  Even coordinates must have
    even-subset support, odd coordinates odd-subset support."""

    time: float
    values: Mapping[GeneratorSymbol, GrassmannValue]
    directions: int

    def __post_init__(self):
        for gen, value in self.values.items():
            if value.directions != self.directions:
                raise NumericError(f"value for {gen} has the wrong number of directions")
            if not value.supports_parity(gen.parity):
                raise ParityViolation(
                    f"value for {gen} has support of the wrong parity"
                )

    def get(self, gen: GeneratorSymbol) -> GrassmannValue:
        try:
            return self.values[gen]
        except KeyError:
            raise MissingValue(f"no value for coordinate {gen}") from None


def evaluate(expr: SuperExpr, state: NumericState) -> GrassmannValue:
    """Evaluate a polynomial expression on a state.  Factors multiply in
    canonical order, so this is an algebra homomorphism."""
    out = GrassmannValue(state.directions)
    for (even, odd), coeff in expr.items():
        acc = GrassmannValue.scalar(float(coeff), state.directions)
        for gen, exponent in even:
            acc = acc * state.get(gen) ** exponent
        for gen in odd:
            acc = acc * state.get(gen)
        out = out + acc
    return out


@dataclass(frozen=True)
class Trajectory:
    dynamics: Dynamics
    times: tuple[float, ...]
    states: tuple[NumericState, ...]

    def constraint_drift(self) -> float:
        """Largest constraint residual over the whole run (zero when the
        dynamics has no constraints)."""
        worst = 0.0
        residuals = [
            SuperExpr.generator(gen) - value
            for gen, value in self.dynamics.constraints.items()
            if gen.jet_order <= self.dynamics.order
        ]
        for state in self.states:
            for residual in residuals:
                worst = max(worst, evaluate(residual, state).sup_norm())
        return worst

    def export_rows(self) -> list[str]:
        """Tab-separated rows: time, coordinate, subset mask, coefficient."""
        rows = ["time\tcoordinate\tmask\tvalue"]
        chart = self.dynamics.lagrangian.chart
        coords = chart.at_order(self.dynamics.order).coordinates()
        for time, state in zip(self.times, self.states):
            for gen in coords:
                value = state.get(gen)
                for mask, coeff in enumerate(value.coeffs):
                    rows.append(f"{time!r}\t{gen}\t{mask}\t{float(coeff)!r}")
        return rows


def integrate(
    dynamics: Dynamics,
    initial: NumericState,
    *,
    dt: float,
    t_end: float,
    constraint_tol: float = 1e-9,
) -> Trajectory:
    """Classic fourth-order Runge-Kutta with fixed step from the initial
    time to ``t_end``, which must be a whole number of steps away.

    The initial state must satisfy the solved constraints within
    ``constraint_tol``; the run aborts on non-finite values.
    """
    if dt <= 0:
        raise IntegrationError("dt must be positive")
    span = t_end - initial.time
    steps = round(span / dt)
    if steps < 1 or abs(steps * dt - span) > 1e-9 * max(1.0, abs(span)):
        raise IntegrationError(
            f"the span {span} is not a positive whole number of steps of {dt}"
        )
    chart = dynamics.lagrangian.chart
    order = dynamics.order
    coords = chart.at_order(order).coordinates()
    for gen in coords:
        initial.get(gen)

    for gen, value in dynamics.constraints.items():
        if gen.jet_order > order:
            continue
        residual = evaluate(SuperExpr.generator(gen) - value, initial)
        if residual.sup_norm() > constraint_tol:
            raise ConstraintViolation(
                f"initial data violates {gen} constraint by {residual.sup_norm():.3e}"
            )

    components = {gen: dynamics.field().component(gen) for gen in coords}
    directions = initial.directions

    def rhs(values: dict[GeneratorSymbol, GrassmannValue], time: float):
        state = NumericState(time, values, directions)
        return {gen: evaluate(expr, state) for gen, expr in components.items()}

    def shift(values, slopes, factor):
        return {gen: values[gen] + slopes[gen] * factor for gen in values}

    times = [initial.time]
    states = [initial]
    current = dict(initial.values)
    time = initial.time
    for step in range(steps):
        k1 = rhs(current, time)
        k2 = rhs(shift(current, k1, dt / 2), time + dt / 2)
        k3 = rhs(shift(current, k2, dt / 2), time + dt / 2)
        k4 = rhs(shift(current, k3, dt), time + dt)
        current = {
            gen: current[gen]
            + (k1[gen] + 2.0 * k2[gen] + 2.0 * k3[gen] + k4[gen]) * (dt / 6)
            for gen in current
        }
        time = initial.time + (step + 1) * dt
        for gen, value in current.items():
            if not np.all(np.isfinite(value.coeffs)):
                raise IntegrationError(f"non-finite value for {gen} at step {step + 1}")
        state = NumericState(time, dict(current), directions)
        times.append(time)
        states.append(state)
    return Trajectory(dynamics, tuple(times), tuple(states))


def conservation_report(
    trajectory: Trajectory, quantities: Mapping[str, SuperExpr]
) -> dict[str, float]:
    """Largest deviation of each quantity from its initial value, in the
    coefficient-wise sup norm."""
    report: dict[str, float] = {}
    for name, expr in quantities.items():
        start = evaluate(expr, trajectory.states[0])
        worst = 0.0
        for state in trajectory.states[1:]:
            worst = max(worst, (evaluate(expr, state) - start).sup_norm())
        report[name] = worst
    return report
