"""Exact scalars: Gaussian rationals extended by Laurent powers of pi.

Every exact quantity in the symplectic-fermion computations lives in
Q(i)[pi, 1/pi].  ``pi`` is kept as a formal transcendental symbol, so equality
of two scalars is structural equality of their canonical forms.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, List, Tuple, Union

__all__ = [
    "GaussRat",
    "ExactScalar",
    "NotInvertible",
    "ScalarLike",
    "ONE",
    "ZERO",
    "I",
    "PI",
    "as_scalar",
    "to_complex",
]


class NotInvertible(ArithmeticError):
    """Raised when inverting zero or a scalar with more than one pi-power."""


class GaussRat:
    """A Gaussian rational ``re + im*i`` with arbitrary-precision parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, Fraction] = 0, im: Union[int, Fraction] = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction, Rational)):
            return cls(Fraction(x))
        if isinstance(x, complex):
            raise TypeError("complex floats are not exact; build a GaussRat explicitly")
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussRat")

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        try:
            other = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __add__(self, other) -> "GaussRat":
        other = GaussRat.coerce(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussRat":
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other) -> "GaussRat":
        other = GaussRat.coerce(other)
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "GaussRat":
        return GaussRat.coerce(other) - self

    def __mul__(self, other) -> "GaussRat":
        other = GaussRat.coerce(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inv(self) -> "GaussRat":
        n = self.norm()
        if not n:
            raise NotInvertible("inverse of 0")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other) -> "GaussRat":
        return self * GaussRat.coerce(other).inv()

    def __rtruediv__(self, other) -> "GaussRat":
        return GaussRat.coerce(other) * self.inv()

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"GaussRat({self.re}, {self.im})"

    def __str__(self) -> str:
        return f"{self.re} + {self.im}*i"


ScalarLike = Union["ExactScalar", GaussRat, int, Fraction]


class ExactScalar:
    """Element of Q(i)[pi, 1/pi], stored as ``{pi exponent: GaussRat}``.

    Instances are immutable.  Zero coefficients are never stored, so two
    scalars are equal exactly when their term dictionaries agree.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[Dict[int, GaussRat], None] = None):
        clean: Dict[int, GaussRat] = {}
        if terms:
            for k, c in terms.items():
                c = GaussRat.coerce(c)
                if c:
                    clean[int(k)] = c
        self._terms = clean
        self._hash = None

    # construction -----------------------------------------------------

    @classmethod
    def monomial(cls, coeff, pi_pow: int = 0) -> "ExactScalar":
        return cls({pi_pow: GaussRat.coerce(coeff)})

    @classmethod
    def gauss(cls, re=0, im=0, pi_pow: int = 0) -> "ExactScalar":
        return cls({pi_pow: GaussRat(re, im)})

    @property
    def terms(self) -> Dict[int, GaussRat]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[int, GaussRat]]:
        return iter(sorted(self._terms.items()))

    # predicates ---------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_rational(self) -> bool:
        """True for a plain rational number (no i, no pi)."""
        if not self._terms:
            return True
        return list(self._terms) == [0] and self._terms[0].im == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._terms[0].re if self._terms else Fraction(0)

    def pi_degree_range(self) -> Tuple[int, int]:
        if not self._terms:
            return (0, 0)
        return (min(self._terms), max(self._terms))

    # ring operations ----------------------------------------------------

    def __eq__(self, other) -> bool:
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other) -> "ExactScalar":
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out[k] + c if k in out else c
        return ExactScalar(out)

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "ExactScalar":
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "ExactScalar":
        return as_scalar(other) - self

    def __mul__(self, other) -> "ExactScalar":
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        if not self._terms or not other._terms:
            return ZERO
        out: Dict[int, GaussRat] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = k1 + k2
                p = c1 * c2
                out[k] = out[k] + p if k in out else p
        return ExactScalar(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ExactScalar":
        if not isinstance(n, int):
            raise TypeError("only integer powers")
        if n < 0:
            return self.inv() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inv(self) -> "ExactScalar":
        """Inverse of a single nonzero monomial ``c * pi**k``."""
        if len(self._terms) != 1:
            raise NotInvertible(f"cannot invert {self}: not a nonzero monomial")
        (k, c), = self._terms.items()
        return ExactScalar({-k: c.inv()})

    def __truediv__(self, other) -> "ExactScalar":
        other = as_scalar(other)
        if other.is_monomial():
            return self * other.inv()
        return self.exact_div(other)

    def __rtruediv__(self, other) -> "ExactScalar":
        return as_scalar(other) / self

    def exact_div(self, other: "ExactScalar") -> "ExactScalar":
        """Divide by a multi-term scalar when the quotient is again a Laurent polynomial.

        Raises NotInvertible when ``other`` does not divide ``self``.
        """
        other = as_scalar(other)
        if not other:
            raise NotInvertible("division by zero")
        if not self:
            return ZERO
        if other.is_monomial():
            return self * other.inv()
        # polynomial long division in pi after shifting both to non-negative degrees
        lo_a, _ = self.pi_degree_range()
        lo_b, _ = other.pi_degree_range()
        a = {k - lo_a: c for k, c in self._terms.items()}
        b = {k - lo_b: c for k, c in other._terms.items()}
        db = max(b)
        lead_inv = b[db].inv()
        quot: Dict[int, GaussRat] = {}
        while a:
            da = max(a)
            if da < db:
                break
            f = a[da] * lead_inv
            shift = da - db
            quot[shift] = f
            for k, c in b.items():
                kk = k + shift
                v = a.get(kk, GaussRat()) - f * c
                if v:
                    a[kk] = v
                else:
                    a.pop(kk, None)
        if a:
            raise NotInvertible(f"{other} does not divide {self}")
        return ExactScalar({k + lo_a - lo_b: c for k, c in quot.items()})

    def conjugate(self) -> "ExactScalar":
        return ExactScalar({k: c.conjugate() for k, c in self._terms.items()})

    # numeric bridge ---------------------------------------------------

    def to_complex(self, pi_value: float = math.pi) -> complex:
        total = 0j
        for k, c in self._terms.items():
            total += complex(c) * pi_value ** k
        return total

    def __complex__(self) -> complex:
        return self.to_complex()

    def evaluate_at(self, pi_value: Fraction) -> GaussRat:
        """Exact substitution of a rational value for pi."""
        total = GaussRat()
        pv = Fraction(pi_value)
        for k, c in self._terms.items():
            total = total + c * (pv ** k)
        return total

    # rendering / serialization -------------------------------------------

    def __repr__(self) -> str:
        return f"ExactScalar({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, c in sorted(self._terms.items()):
            s = f"{c.re} + {c.im}*i"
            if k:
                s += f" * pi^{k}"
            parts.append(s)
        return " + ".join(f"({p})" if len(self._terms) > 1 else p for p in parts)

    def to_json(self) -> List[dict]:
        return [
            {"re": str(c.re), "im": str(c.im), "pi_pow": k}
            for k, c in sorted(self._terms.items())
        ]

    @classmethod
    def from_json(cls, data: Iterable[dict]) -> "ExactScalar":
        out = ZERO
        for term in data:
            out = out + cls({int(term["pi_pow"]): GaussRat(Fraction(term["re"]), Fraction(term["im"]))})
        return out


def as_scalar(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    return ExactScalar({0: GaussRat.coerce(x)})


def to_complex(a: ScalarLike, pi_value: float = math.pi) -> complex:
    return as_scalar(a).to_complex(pi_value)


ZERO = ExactScalar()
ONE = ExactScalar({0: GaussRat(1)})
I = ExactScalar({0: GaussRat(0, 1)})
PI = ExactScalar({1: GaussRat(1)})
