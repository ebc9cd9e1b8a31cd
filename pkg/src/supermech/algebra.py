"""Supercommutative polynomial algebra over the rationals.

An expression is a finite sum of terms ``coefficient * even-monomial *
odd-word``.  Even generators commute with everything and carry integer
exponents; odd generators anticommute among themselves and square to zero,
so an odd word is a product of distinct odd generators kept in a fixed
total order.  Reordering odd factors multiplies the coefficient by the
sign of the permutation.

Coefficients are exact ``Fraction`` values and every operation returns the
unique canonical form, so equality is dictionary equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union


class Parity(Enum):
    EVEN = 0
    ODD = 1

    def flip(self) -> "Parity":
        return Parity(1 - self.value)

    def __str__(self) -> str:
        return "even" if self is Parity.EVEN else "odd"


def parity_product(*parities: Parity) -> Parity:
    return Parity(sum(p.value for p in parities) % 2)


class AlgebraError(Exception):
    """Base class for algebra-level failures."""


class UndeclaredGenerator(AlgebraError):
    pass


class MixedParity(AlgebraError):
    pass


class ZeroExpression(AlgebraError):
    pass


class ParityMismatch(AlgebraError):
    pass


@dataclass(frozen=True)
class GeneratorSymbol:
    """A single jet coordinate, e.g. the first derivative of q.

    ``base_index`` numbers the coordinate within its parity class and
    ``jet_order`` is the derivative subscript.  Symbols are value objects:
    charts of different jet orders share them.
    """

    name: str
    parity: Parity
    base_index: int
    jet_order: int

    @property
    def sort_key(self) -> tuple[int, int, int]:
        # odd generators sort after even ones; within a class the order is
        # lexicographic on (base_index, jet_order)
        return (self.parity.value, self.base_index, self.jet_order)

    def shifted(self, amount: int = 1) -> "GeneratorSymbol":
        if self.jet_order + amount < 0:
            raise ValueError(f"negative jet order for {self}")
        return GeneratorSymbol(self.name, self.parity, self.base_index, self.jet_order + amount)

    def __str__(self) -> str:
        return f"{self.name}[{self.jet_order}]"


EvenMonomial = tuple[tuple[GeneratorSymbol, int], ...]
OddWord = tuple[GeneratorSymbol, ...]
TermKey = tuple[EvenMonomial, OddWord]

Scalar = Union[int, Fraction]
RawTerm = tuple[Scalar, Sequence[GeneratorSymbol]]


def _sort_odd_word(factors: Sequence[GeneratorSymbol]) -> tuple[int, OddWord] | None:
    """Sort odd factors into canonical order, or report a repeated factor.

    Returns ``(sign, word)`` with the permutation sign, or ``None`` when a
    generator repeats (the term vanishes).
    """
    word = list(factors)
    sign = 1
    for i in range(1, len(word)):
        j = i
        while j > 0 and word[j].sort_key < word[j - 1].sort_key:
            word[j], word[j - 1] = word[j - 1], word[j]
            sign = -sign
            j -= 1
    for a, b in zip(word, word[1:]):
        if a == b:
            return None
    return sign, tuple(word)


def _merge_odd_words(left: OddWord, right: OddWord) -> tuple[int, OddWord] | None:
    """Merge two canonical odd words, counting the crossings."""
    sign = 1
    out: list[GeneratorSymbol] = []
    i = j = 0
    while i < len(left) and j < len(right):
        a, b = left[i], right[j]
        if a == b:
            return None
        if a.sort_key < b.sort_key:
            out.append(a)
            i += 1
        else:
            # b jumps over the remaining factors of left
            if (len(left) - i) % 2:
                sign = -sign
            out.append(b)
            j += 1
    out.extend(left[i:])
    out.extend(right[j:])
    return sign, tuple(out)


def _merge_even(left: EvenMonomial, right: EvenMonomial) -> EvenMonomial:
    exps: dict[GeneratorSymbol, int] = dict(left)
    for gen, exp in right:
        exps[gen] = exps.get(gen, 0) + exp
    return tuple(sorted(((g, e) for g, e in exps.items() if e), key=lambda it: it[0].sort_key))


class SuperExpr:
    """A canonical supercommutative polynomial."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[TermKey, Fraction] | None = None):
        self._terms: dict[TermKey, Fraction] = dict(terms or {})
        self._hash: int | None = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "SuperExpr":
        return SuperExpr()

    @staticmethod
    def constant(value: Scalar) -> "SuperExpr":
        value = Fraction(value)
        if value == 0:
            return SuperExpr()
        return SuperExpr({((), ()): value})

    @staticmethod
    def generator(gen: GeneratorSymbol) -> "SuperExpr":
        if gen.parity is Parity.EVEN:
            return SuperExpr({(((gen, 1),), ()): Fraction(1)})
        return SuperExpr({((), (gen,)): Fraction(1)})

    # -- structure ---------------------------------------------------------

    def items(self) -> list[tuple[TermKey, Fraction]]:
        return sorted(self._terms.items(), key=lambda it: _term_sort_key(it[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def generators(self) -> set[GeneratorSymbol]:
        out: set[GeneratorSymbol] = set()
        for (even, odd) in self._terms:
            out.update(g for g, _ in even)
            out.update(odd)
        return out

    def max_jet_order(self) -> int:
        """Largest derivative subscript present; -1 for constants."""
        gens = self.generators()
        return max((g.jet_order for g in gens), default=-1)

    def constant_term(self) -> Fraction:
        return self._terms.get(((), ()), Fraction(0))

    def total_degree(self) -> int:
        """Largest total degree of a term (odd factors count once each)."""
        deg = 0
        for (even, odd) in self._terms:
            deg = max(deg, sum(e for _, e in even) + len(odd))
        return deg

    def parity_split(self) -> tuple["SuperExpr", "SuperExpr"]:
        """Split into the even-parity and odd-parity parts."""
        even_terms: dict[TermKey, Fraction] = {}
        odd_terms: dict[TermKey, Fraction] = {}
        for key, coeff in self._terms.items():
            (even_terms if len(key[1]) % 2 == 0 else odd_terms)[key] = coeff
        return SuperExpr(even_terms), SuperExpr(odd_terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "SuperExpr | Scalar") -> "SuperExpr":
        other = _coerce(other)
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            acc = terms.get(key, Fraction(0)) + coeff
            if acc:
                terms[key] = acc
            else:
                terms.pop(key, None)
        return SuperExpr(terms)

    __radd__ = __add__

    def __neg__(self) -> "SuperExpr":
        return SuperExpr({key: -coeff for key, coeff in self._terms.items()})

    def __sub__(self, other: "SuperExpr | Scalar") -> "SuperExpr":
        return self + (-_coerce(other))

    def __rsub__(self, other: "SuperExpr | Scalar") -> "SuperExpr":
        return _coerce(other) + (-self)

    def __mul__(self, other: "SuperExpr | Scalar") -> "SuperExpr":
        other = _coerce(other)
        terms: dict[TermKey, Fraction] = {}
        for (ev1, od1), c1 in self._terms.items():
            for (ev2, od2), c2 in other._terms.items():
                merged = _merge_odd_words(od1, od2)
                if merged is None:
                    continue
                sign, odd = merged
                key = (_merge_even(ev1, ev2), odd)
                acc = terms.get(key, Fraction(0)) + sign * c1 * c2
                if acc:
                    terms[key] = acc
                else:
                    terms.pop(key, None)
        return SuperExpr(terms)

    def __rmul__(self, other: "SuperExpr | Scalar") -> "SuperExpr":
        return _coerce(other) * self

    def __truediv__(self, other: Scalar) -> "SuperExpr":
        other = Fraction(other)
        if other == 0:
            raise ZeroDivisionError("division of a SuperExpr by zero")
        return SuperExpr({key: coeff / other for key, coeff in self._terms.items()})

    def __pow__(self, exponent: int) -> "SuperExpr":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponents must be non-negative integers")
        out = SuperExpr.constant(1)
        for _ in range(exponent):
            out = out * self
        return out

    # -- comparison --------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SuperExpr.constant(other)
        if not isinstance(other, SuperExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- display -----------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        chunks: list[str] = []
        for key, coeff in self.items():
            body = _format_monomial(key)
            if body:
                if coeff == 1:
                    text = body
                elif coeff == -1:
                    text = f"-{body}"
                else:
                    text = f"{coeff}*{body}"
            else:
                text = str(coeff)
            if not chunks:
                chunks.append(text)
            elif text.startswith("-"):
                chunks.append(f" - {text[1:]}")
            else:
                chunks.append(f" + {text}")
        return "".join(chunks)

    def __repr__(self) -> str:
        return f"SuperExpr({self})"


def _coerce(value: "SuperExpr | Scalar") -> SuperExpr:
    if isinstance(value, SuperExpr):
        return value
    if isinstance(value, (int, Fraction)):
        return SuperExpr.constant(value)
    raise TypeError(f"cannot interpret {value!r} as a SuperExpr")


def _term_sort_key(key: TermKey):
    even, odd = key
    return (
        tuple((g.sort_key, e) for g, e in even),
        tuple(g.sort_key for g in odd),
    )


def _format_monomial(key: TermKey) -> str:
    even, odd = key
    parts = [f"{g}^{e}" if e > 1 else str(g) for g, e in even]
    parts.extend(str(g) for g in odd)
    return "*".join(parts)


def normalize(raw: Iterable[RawTerm], declared: Iterable[GeneratorSymbol] | None = None) -> SuperExpr:
    """Build a canonical expression from raw ``(coefficient, factors)`` terms.

    Factors may appear in any order and evens may repeat; odd factors are
    sorted with the permutation sign and a repeated odd factor kills the
    term.  When ``declared`` is given, every factor must belong to it.
    """
    allowed = set(declared) if declared is not None else None
    out = SuperExpr.zero()
    for coeff, factors in raw:
        evens: list[GeneratorSymbol] = []
        odds: list[GeneratorSymbol] = []
        for gen in factors:
            if allowed is not None and gen not in allowed:
                raise UndeclaredGenerator(f"generator {gen} is not declared")
            (evens if gen.parity is Parity.EVEN else odds).append(gen)
        sorted_odd = _sort_odd_word(odds)
        if sorted_odd is None:
            continue
        sign, odd_word = sorted_odd
        exps: dict[GeneratorSymbol, int] = {}
        for gen in evens:
            exps[gen] = exps.get(gen, 0) + 1
        even_mono = tuple(sorted(exps.items(), key=lambda it: it[0].sort_key))
        out = out + SuperExpr({(even_mono, odd_word): Fraction(coeff) * sign})
    return out


def parity_of(expr: SuperExpr) -> Parity:
    """Parity of a homogeneous expression.

    Raises ``ZeroExpression`` for 0 (any parity) and ``MixedParity`` when
    terms of both parities are present.
    """
    if expr.is_zero():
        raise ZeroExpression("the zero expression has no definite parity")
    parities = {len(odd) % 2 for (_, odd) in expr._terms}
    if len(parities) > 1:
        raise MixedParity(f"expression {expr} mixes parities")
    return Parity(parities.pop())


def has_parity(expr: SuperExpr, parity: Parity) -> bool:
    """True when the expression is zero or homogeneous of the given parity."""
    if expr.is_zero():
        return True
    try:
        return parity_of(expr) is parity
    except MixedParity:
        return False


def left_partial(expr: SuperExpr, gen: GeneratorSymbol) -> SuperExpr:
    """Left partial derivative with respect to a generator.

    For an odd generator the factor is moved to the front of its word,
    collecting a Koszul sign, and then removed.
    """
    terms: dict[TermKey, Fraction] = {}
    for (even, odd), coeff in expr._terms.items():
        if gen.parity is Parity.EVEN:
            exps = dict(even)
            exp = exps.get(gen, 0)
            if not exp:
                continue
            if exp == 1:
                del exps[gen]
            else:
                exps[gen] = exp - 1
            key = (tuple(sorted(exps.items(), key=lambda it: it[0].sort_key)), odd)
            value = coeff * exp
        else:
            if gen not in odd:
                continue
            pos = odd.index(gen)
            key = (even, odd[:pos] + odd[pos + 1:])
            value = coeff * (-1) ** pos
        acc = terms.get(key, Fraction(0)) + value
        if acc:
            terms[key] = acc
        else:
            terms.pop(key, None)
    return SuperExpr(terms)


def substitute(expr: SuperExpr, assignment: Mapping[GeneratorSymbol, SuperExpr | Scalar]) -> SuperExpr:
    """Simultaneous substitution of generators by expressions.

    Each assigned value must be homogeneous of the generator's parity
    (zero always passes); the substitution is then an algebra map and the
    Koszul bookkeeping is inherited from multiplication.
    """
    values: dict[GeneratorSymbol, SuperExpr] = {}
    for gen, value in assignment.items():
        value = _coerce(value)
        if not has_parity(value, gen.parity):
            raise ParityMismatch(f"value {value} assigned to {gen} is not {gen.parity}")
        values[gen] = value
    out = SuperExpr.zero()
    for (even, odd), coeff in expr._terms.items():
        term = SuperExpr.constant(coeff)
        for gen, exp in even:
            term = term * values.get(gen, SuperExpr.generator(gen)) ** exp
        for gen in odd:
            term = term * values.get(gen, SuperExpr.generator(gen))
        out = out + term
    return out
