"""Exact sparse polynomial arithmetic over the rationals in two noise variables.

Every probability in the exact engine is a polynomial in the gate failure
rate ``eps`` and the per-detector loss rate ``delta``, with Fraction
coefficients.  A polynomial is stored as a dict mapping exponent pairs to
coefficients:

    terms: Dict[(eps_degree, delta_degree), Fraction]

The zero polynomial is the empty dict; zero coefficients are never stored.
All operations are exact, so identities like row-stochasticity of a
transition matrix can be asserted with ``==`` rather than a tolerance.

Single-variable polynomials (for runs that substitute delta = eps, or for
the ideal model where delta = 0) are just the special case where every
stored delta_degree is zero.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Tuple

Exponent = Tuple[int, int]

RationalLike = int | Fraction


class Poly:
    """Sparse bivariate polynomial with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Exponent, Fraction] | None = None):
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for exp, coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff != 0:
                    clean[(int(exp[0]), int(exp[1]))] = coeff
        self.terms = clean

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------
    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def one() -> "Poly":
        return Poly({(0, 0): Fraction(1)})

    @staticmethod
    def constant(value: RationalLike) -> "Poly":
        return Poly({(0, 0): Fraction(value)})

    @staticmethod
    def eps() -> "Poly":
        return Poly({(1, 0): Fraction(1)})

    @staticmethod
    def delta() -> "Poly":
        return Poly({(0, 1): Fraction(1)})

    @staticmethod
    def monomial(eps_deg: int, delta_deg: int, coeff: RationalLike = 1) -> "Poly":
        return Poly({(eps_deg, delta_deg): Fraction(coeff)})

    @staticmethod
    def from_coeffs(coeffs: Iterable[RationalLike], var: str = "eps") -> "Poly":
        """Build a univariate polynomial from coefficients in degree order."""
        terms: Dict[Exponent, Fraction] = {}
        for deg, c in enumerate(coeffs):
            exp = (deg, 0) if var == "eps" else (0, deg)
            terms[exp] = Fraction(c)
        return Poly(terms)

    # ------------------------------------------------------------------
    # ring operations
    # ------------------------------------------------------------------
    def __add__(self, other: "Poly | RationalLike") -> "Poly":
        other = _coerce(other)
        out = dict(self.terms)
        for exp, coeff in other.terms.items():
            s = out.get(exp, Fraction(0)) + coeff
            if s == 0:
                out.pop(exp, None)
            else:
                out[exp] = s
        result = Poly.__new__(Poly)
        result.terms = out
        return result

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        result = Poly.__new__(Poly)
        result.terms = {exp: -c for exp, c in self.terms.items()}
        return result

    def __sub__(self, other: "Poly | RationalLike") -> "Poly":
        return self + (-_coerce(other))

    def __rsub__(self, other: "Poly | RationalLike") -> "Poly":
        return _coerce(other) + (-self)

    def __mul__(self, other: "Poly | RationalLike") -> "Poly":
        other = _coerce(other)
        if not self.terms or not other.terms:
            return Poly.zero()
        out: Dict[Exponent, Fraction] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                exp = (i1 + i2, j1 + j2)
                s = out.get(exp, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(exp, None)
                else:
                    out[exp] = s
        result = Poly.__new__(Poly)
        result.terms = out
        return result

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Maximum total degree, or -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(i + j for i, j in self.terms)

    def valuation(self) -> int:
        """Minimum total degree of any stored term, or -1 for zero."""
        if not self.terms:
            return -1
        return min(i + j for i, j in self.terms)

    def coefficient(self, eps_deg: int, delta_deg: int = 0) -> Fraction:
        return self.terms.get((eps_deg, delta_deg), Fraction(0))

    def key(self) -> tuple:
        """Canonical hashable form, usable as a dict key or for sorting."""
        return tuple(sorted(self.terms.items()))

    # ------------------------------------------------------------------
    # evaluation and rewriting
    # ------------------------------------------------------------------
    def evaluate(self, eps: RationalLike, delta: RationalLike = 0) -> Fraction:
        """Exact substitution of rational values for both variables."""
        e = Fraction(eps)
        d = Fraction(delta)
        total = Fraction(0)
        for (i, j), coeff in self.terms.items():
            total += coeff * e**i * d**j
        return total

    def truncate(self, order: int) -> "Poly":
        """Drop all terms of total degree greater than ``order``."""
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        result = Poly.__new__(Poly)
        result.terms = {
            (i, j): c for (i, j), c in self.terms.items() if i + j <= order
        }
        return result

    def substitute_delta_with_eps(self) -> "Poly":
        """Rewrite delta as eps, merging terms (used for the delta = eps runs)."""
        out: Dict[Exponent, Fraction] = {}
        for (i, j), coeff in self.terms.items():
            exp = (i + j, 0)
            s = out.get(exp, Fraction(0)) + coeff
            if s == 0:
                out.pop(exp, None)
            else:
                out[exp] = s
        result = Poly.__new__(Poly)
        result.terms = out
        return result

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------
    def to_json(self) -> list:
        """Wire format: list of {eps_deg, delta_deg, num, den}, ints as strings."""
        return [
            {
                "eps_deg": i,
                "delta_deg": j,
                "num": str(c.numerator),
                "den": str(c.denominator),
            }
            for (i, j), c in sorted(self.terms.items())
        ]

    @staticmethod
    def from_json(data: list) -> "Poly":
        terms: Dict[Exponent, Fraction] = {}
        for entry in data:
            exp = (int(entry["eps_deg"]), int(entry["delta_deg"]))
            terms[exp] = Fraction(int(entry["num"]), int(entry["den"]))
        return Poly(terms)

    def __repr__(self) -> str:
        return f"Poly({self!s})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0])):
            factors = []
            if c != 1 or (i == 0 and j == 0):
                factors.append(str(c))
            if i == 1:
                factors.append("eps")
            elif i > 1:
                factors.append(f"eps^{i}")
            if j == 1:
                factors.append("delta")
            elif j > 1:
                factors.append(f"delta^{j}")
            parts.append("*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")


def _coerce(value: "Poly | RationalLike") -> Poly:
    if isinstance(value, Poly):
        return value
    return Poly.constant(value)


# Module-level aliases matching the functional naming used elsewhere.
def poly_add(a: Poly, b: Poly) -> Poly:
    """Exact coefficient-wise sum; zero terms dropped."""
    return a + b


def poly_mul(a: Poly, b: Poly) -> Poly:
    """Exact product; distributes over poly_add."""
    return a * b


def poly_eval(p: Poly, eps: RationalLike, delta: RationalLike = 0) -> Fraction:
    """Exact evaluation at rational (eps, delta)."""
    return p.evaluate(eps, delta)


def series_truncate(p: Poly, order: int) -> Poly:
    """Drop all terms of total degree > order."""
    return p.truncate(order)
