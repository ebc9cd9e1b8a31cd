"""Differential forms with the bidegree (form degree, parity) sign rule.

A form is a sum of terms ``coefficient * dx_1 ^ ... ^ dx_p`` with the
coefficient written on the left.  Swapping two adjacent differentials
gives ``dx ^ dy = -(-1)^{|x||y|} dy ^ dx``: differentials of even
coordinates anticommute among themselves, differentials of odd
coordinates commute, so the square of an odd differential survives.
Canonical words keep differentials sorted by the generator order.

The exterior differential is built from ``df = sum dx * (df/dx)`` with
left partials, which makes ``d(f w) = df ^ w + f dw`` and ``d ^ 2 = 0``
hold on the nose; the total-derivative extension shifts subscripts and
commutes with d.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .algebra import (
    GeneratorSymbol,
    Parity,
    SuperExpr,
    left_partial,
    parity_of,
)
from .jets import DomainMismatch, OrderExceeded, VectorFieldAlong, total_derivative as expr_total_derivative

WedgeWord = tuple[GeneratorSymbol, ...]
Scalar = Union[int, Fraction]


class FormError(Exception):
    pass


class NotSemibasic(FormError):
    pass


def _word_parity(word: WedgeWord) -> int:
    return sum(g.parity.value for g in word) % 2


def _normalize_word(word: Iterable[GeneratorSymbol]) -> tuple[int, WedgeWord] | None:
    """Sort differentials into canonical order.

    Returns ``(sign, word)`` or ``None`` when a repeated even differential
    makes the term vanish.  Repeated odd differentials are kept: they
    commute, so no sign is produced when they pass each other.
    """
    letters = list(word)
    sign = 1
    for i in range(1, len(letters)):
        j = i
        while j > 0 and letters[j].sort_key < letters[j - 1].sort_key:
            a, b = letters[j - 1], letters[j]
            if not (a.parity is Parity.ODD and b.parity is Parity.ODD):
                sign = -sign
            letters[j - 1], letters[j] = b, a
            j -= 1
    for a, b in zip(letters, letters[1:]):
        if a == b and a.parity is Parity.EVEN:
            return None
    return sign, tuple(letters)


class GradedForm:
    """A sum of wedge terms with SuperExpr coefficients on the left."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[WedgeWord, SuperExpr] | None = None):
        self._terms: dict[WedgeWord, SuperExpr] = {
            word: coeff for word, coeff in (terms or {}).items() if not coeff.is_zero()
        }

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "GradedForm":
        return GradedForm()

    @staticmethod
    def from_function(f: SuperExpr) -> "GradedForm":
        return GradedForm({(): f})

    @staticmethod
    def differential(gen: GeneratorSymbol) -> "GradedForm":
        return GradedForm({(gen,): SuperExpr.constant(1)})

    @staticmethod
    def term(coeff: SuperExpr, word: Iterable[GeneratorSymbol]) -> "GradedForm":
        normalized = _normalize_word(word)
        if normalized is None:
            return GradedForm()
        sign, canonical = normalized
        return GradedForm({canonical: sign * coeff})

    # -- structure ---------------------------------------------------------

    def items(self) -> list[tuple[WedgeWord, SuperExpr]]:
        return sorted(
            self._terms.items(), key=lambda it: tuple(g.sort_key for g in it[0])
        )

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, word: WedgeWord) -> SuperExpr:
        return self._terms.get(word, SuperExpr.zero())

    def degrees(self) -> set[int]:
        return {len(word) for word in self._terms}

    def is_one_form(self) -> bool:
        return all(len(word) == 1 for word in self._terms)

    def differential_order(self) -> int:
        """Largest subscript among the differentials; -1 when none."""
        return max((g.jet_order for word in self._terms for g in word), default=-1)

    def coefficient_order(self) -> int:
        return max((c.max_jet_order() for c in self._terms.values()), default=-1)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "GradedForm") -> "GradedForm":
        terms = dict(self._terms)
        for word, coeff in other._terms.items():
            acc = terms.get(word, SuperExpr.zero()) + coeff
            if acc.is_zero():
                terms.pop(word, None)
            else:
                terms[word] = acc
        return GradedForm(terms)

    def __neg__(self) -> "GradedForm":
        return GradedForm({word: -coeff for word, coeff in self._terms.items()})

    def __sub__(self, other: "GradedForm") -> "GradedForm":
        return self + (-other)

    def scale(self, factor: SuperExpr | Scalar) -> "GradedForm":
        """Multiply by a function from the left."""
        if not isinstance(factor, SuperExpr):
            factor = SuperExpr.constant(factor)
        return GradedForm({word: factor * coeff for word, coeff in self._terms.items()})

    def wedge(self, other: "GradedForm") -> "GradedForm":
        out = GradedForm()
        for w1, f1 in self._terms.items():
            p1 = _word_parity(w1)
            for w2, f2 in other._terms.items():
                # move f2 (degree 0) to the left across the w1 differentials
                for part, part_parity in _parity_parts(f2):
                    sign = -1 if (p1 and part_parity) else 1
                    out = out + GradedForm.term(sign * f1 * part, w1 + w2)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedForm):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset((w, hash(c)) for w, c in self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        chunks: list[str] = []
        for word, coeff in self.items():
            body = "^".join(f"d({g})" for g in word)
            text = _format_term(coeff, body)
            if not chunks:
                chunks.append(text)
            elif text.startswith("-"):
                chunks.append(f" - {text[1:]}")
            else:
                chunks.append(f" + {text}")
        return "".join(chunks)

    def __repr__(self) -> str:
        return f"GradedForm({self})"


def _format_term(coeff: SuperExpr, body: str) -> str:
    if not body:
        return str(coeff)
    text = str(coeff)
    if text == "1":
        return body
    if text == "-1":
        return f"-{body}"
    if " " in text:
        return f"({text})*{body}"
    return f"{text}*{body}"


def _parity_parts(expr: SuperExpr) -> list[tuple[SuperExpr, int]]:
    even, odd = expr.parity_split()
    parts: list[tuple[SuperExpr, int]] = []
    if not even.is_zero():
        parts.append((even, 0))
    if not odd.is_zero():
        parts.append((odd, 1))
    return parts


def differential_of_function(f: SuperExpr) -> GradedForm:
    """df as a one-form, coefficients moved to the left of the
    differentials with the Koszul sign."""
    out = GradedForm.zero()
    for gen in sorted(f.generators(), key=lambda g: g.sort_key):
        partial = left_partial(f, gen)
        for part, part_parity in _parity_parts(partial):
            sign = -1 if (gen.parity.value and part_parity) else 1
            out = out + GradedForm({(gen,): sign * part})
    return out


def exterior_d(form: GradedForm | SuperExpr) -> GradedForm:
    """The exterior differential; parity preserving, degree raising,
    and square zero."""
    if isinstance(form, SuperExpr):
        return differential_of_function(form)
    out = GradedForm.zero()
    for word, coeff in form._terms.items():
        out = out + differential_of_function(coeff).wedge(GradedForm({word: SuperExpr.constant(1)}))
    return out


def total_derivative(form: GradedForm) -> GradedForm:
    """Extend the total time derivative to forms as an even derivation:
    coefficients differentiate, each differential shifts one subscript up."""
    out = GradedForm.zero()
    for word, coeff in form._terms.items():
        out = out + GradedForm({word: expr_total_derivative(coeff)})
        for t in range(len(word)):
            shifted = word[:t] + (word[t].shifted(),) + word[t + 1:]
            out = out + GradedForm.term(coeff, shifted)
    return out


def interior(x_field: VectorFieldAlong, form: GradedForm) -> GradedForm:
    """Left interior product with a field along a projection.

    Acts as a graded derivation of degree -1 and the field's parity; on a
    one-form term ``f dx`` it gives ``(-1)^{|X||f|} f X(x)``.
    """
    x_parity = x_field.parity.value
    max_jet = form.differential_order()
    if max_jet > x_field.source_order:
        raise DomainMismatch(
            f"form has differentials of jet order {max_jet}, field source is T^{x_field.source_order}"
        )

    def contract_word(word: WedgeWord) -> GradedForm:
        if not word:
            return GradedForm.zero()
        head, rest = word[0], word[1:]
        out = GradedForm.term(x_field.component(head), rest)
        tail = contract_word(rest)
        if not tail.is_zero():
            sign = -1 if (1 + x_parity * head.parity.value) % 2 else 1
            out = out + GradedForm.differential(head).wedge(tail).scale(sign)
        return out

    out = GradedForm.zero()
    for word, coeff in form._terms.items():
        contracted = contract_word(word)
        if contracted.is_zero():
            continue
        for part, part_parity in _parity_parts(coeff):
            sign = -1 if (x_parity and part_parity) else 1
            out = out + contracted.scale(sign * part)
    return out


def transpose_vertical(form: GradedForm, k: int) -> GradedForm:
    """Transpose of the vertical endomorphism on one-forms over T^k:
    ``dx_{j+1}`` becomes ``(j+1) dx_j`` and bottom differentials vanish."""
    if not form.is_one_form():
        raise FormError("the vertical transpose acts on one-forms")
    if max(form.differential_order(), form.coefficient_order()) > k:
        raise OrderExceeded(f"form does not live on T^{k}")
    out = GradedForm.zero()
    for word, coeff in form._terms.items():
        j = word[0].jet_order
        if j == 0:
            continue
        out = out + GradedForm({(word[0].shifted(-1),): j * coeff})
    return out


def cartan_operator(form: GradedForm, k: int) -> GradedForm:
    """The alternating-weights combination of vertical transposes and
    total-derivative extensions that carries dL to the momentum one-form.

    For order k the result is ``sum_{l=1..k} ((-1)^{l+1} / l!) *
    d_T^{l-1}(S*^l(form))`` and lives on T^(2k-1); for k = 1 it collapses
    to the vertical transpose alone.
    """
    if k < 1:
        raise OrderExceeded("the momentum construction needs k >= 1")
    if not form.is_one_form():
        raise FormError("expected a one-form")
    if max(form.differential_order(), form.coefficient_order()) > k:
        raise OrderExceeded(f"form does not live on T^{k}")
    out = GradedForm.zero()
    factorial = 1
    for l in range(1, k + 1):
        factorial *= l
        piece = form
        for _ in range(l):
            piece = transpose_vertical(piece, k)
        for _ in range(l - 1):
            piece = total_derivative(piece)
        out = out + piece.scale(Fraction((-1) ** (l + 1), factorial))
    return out


@dataclass(frozen=True)
class CheckForm:
    """A semibasic one-form read as a fibre-linear pairing partner.

    ``components[x]`` is the coefficient of dx for each level-``level``
    coordinate x; pairing against a field along the same projection
    contracts component against component.
    """

    level: int
    components: Mapping[GeneratorSymbol, SuperExpr]

    def __post_init__(self):
        clean = {
            gen: coeff for gen, coeff in self.components.items() if not coeff.is_zero()
        }
        for gen in clean:
            if gen.jet_order > self.level:
                raise NotSemibasic(f"component on {gen} above level {self.level}")
        object.__setattr__(self, "components", clean)

    def component(self, gen: GeneratorSymbol) -> SuperExpr:
        return self.components.get(gen, SuperExpr.zero())


def semibasic_check(form: GradedForm, level: int) -> CheckForm:
    """Certify that a one-form only involves differentials of subscript
    at most ``level`` and repackage it by components."""
    if not form.is_one_form():
        raise FormError("semibasic splitting applies to one-forms")
    components: dict[GeneratorSymbol, SuperExpr] = {}
    for word, coeff in form._terms.items():
        gen = word[0]
        if gen.jet_order > level:
            raise NotSemibasic(f"differential d({gen}) exceeds level {level}")
        components[gen] = components.get(gen, SuperExpr.zero()) + coeff
    return CheckForm(level, components)


def pair(x_field: VectorFieldAlong, check: CheckForm) -> SuperExpr:
    """Contract a field along a projection with a check form at the same
    level: ``sum_x (-1)^{|X||f_x|} f_x X(x)``."""
    if x_field.source_order != check.level:
        raise DomainMismatch(
            f"field along T^{x_field.source_order} cannot pair with level {check.level} components"
        )
    x_parity = x_field.parity.value
    out = SuperExpr.zero()
    for gen, coeff in check.components.items():
        value = x_field.component(gen)
        if value.is_zero():
            continue
        for part, part_parity in _parity_parts(coeff):
            sign = -1 if (x_parity and part_parity) else 1
            out = out + sign * part * value
    return out
