"""Exterior algebra on the symplectic basis alpha^1, ..., alpha^{2N}.

Monomials are bitmasks: bit ``k-1`` is set iff alpha^k is a factor, and the
mask always stands for the product in ascending generator order.
"""

from __future__ import annotations

from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

from .scalars import ONE, ZERO, ExactScalar, as_scalar

__all__ = [
    "DimensionMismatch",
    "ExtElement",
    "wedge",
    "parity_involution",
    "gamma",
    "generator",
    "top_form",
    "reorder_sign",
    "monomial_from_indices",
    "basis_masks",
    "even_masks",
]


class DimensionMismatch(ValueError):
    pass


def popcount(x: int) -> int:
    return bin(x).count("1")


def reorder_sign(a: int, b: int) -> int:
    """Sign of sorting the concatenation (monomial a)(monomial b); 0 if they overlap."""
    if a & b:
        return 0
    inversions = 0
    rest = b
    while rest:
        low = rest & -rest
        # generators of a sitting above this generator of b must hop over it
        inversions += popcount(a & ~((low << 1) - 1))
        rest ^= low
    return -1 if inversions & 1 else 1


def monomial_from_indices(indices: Sequence[int]) -> Tuple[int, int]:
    """(sign, mask) of alpha^{i1} alpha^{i2} ... in the given order (1-based)."""
    mask, sign = 0, 1
    for k in indices:
        bit = 1 << (k - 1)
        s = reorder_sign(mask, bit)
        if s == 0:
            return 0, 0
        sign *= s
        mask |= bit
    return sign, mask


def basis_masks(n_pairs: int) -> range:
    return range(1 << (2 * n_pairs))


def even_masks(n_pairs: int) -> List[int]:
    return [m for m in basis_masks(n_pairs) if popcount(m) % 2 == 0]


class ExtElement:
    """Element of Lambda(h) for ``n_pairs`` fermion pairs.

    ``terms`` maps monomial masks to ExactScalar coefficients; zeros are
    dropped on construction and instances are treated as immutable.
    """

    __slots__ = ("n_pairs", "_terms")

    def __init__(self, n_pairs: int, terms: Dict[int, ExactScalar] | None = None):
        if n_pairs < 1:
            raise ValueError("need at least one fermion pair")
        self.n_pairs = n_pairs
        limit = 1 << (2 * n_pairs)
        clean = {}
        for m, c in (terms or {}).items():
            if not 0 <= m < limit:
                raise DimensionMismatch(f"mask {m:b} out of range for N={n_pairs}")
            c = as_scalar(c)
            if c:
                clean[m] = c
        self._terms = clean

    @classmethod
    def scalar(cls, n_pairs: int, c=1) -> "ExtElement":
        return cls(n_pairs, {0: as_scalar(c)})

    @classmethod
    def zero(cls, n_pairs: int) -> "ExtElement":
        return cls(n_pairs)

    @property
    def terms(self) -> Dict[int, ExactScalar]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[int, ExactScalar]]:
        return iter(sorted(self._terms.items()))

    def coeff(self, mask: int) -> ExactScalar:
        return self._terms.get(mask, ZERO)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_even(self) -> bool:
        return all(popcount(m) % 2 == 0 for m in self._terms)

    def is_odd(self) -> bool:
        return all(popcount(m) % 2 == 1 for m in self._terms)

    def even_part(self) -> "ExtElement":
        return ExtElement(self.n_pairs, {m: c for m, c in self._terms.items() if popcount(m) % 2 == 0})

    def _check(self, other: "ExtElement") -> None:
        if not isinstance(other, ExtElement):
            raise TypeError(f"expected ExtElement, got {type(other).__name__}")
        if other.n_pairs != self.n_pairs:
            raise DimensionMismatch(f"N={self.n_pairs} vs N={other.n_pairs}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtElement):
            return NotImplemented
        return self.n_pairs == other.n_pairs and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n_pairs, frozenset(self._terms.items())))

    def __add__(self, other: "ExtElement") -> "ExtElement":
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out[m] + c if m in out else c
        return ExtElement(self.n_pairs, out)

    def __neg__(self) -> "ExtElement":
        return ExtElement(self.n_pairs, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "ExtElement") -> "ExtElement":
        return self + (-other)

    def scale(self, c) -> "ExtElement":
        c = as_scalar(c)
        if not c:
            return ExtElement(self.n_pairs)
        return ExtElement(self.n_pairs, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, ExtElement):
            return wedge(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __xor__(self, other: "ExtElement") -> "ExtElement":
        return wedge(self, other)

    def __repr__(self) -> str:
        return f"ExtElement(N={self.n_pairs}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in sorted(self._terms.items()):
            gens = [f"a{k + 1}" for k in range(2 * self.n_pairs) if m >> k & 1]
            parts.append(f"({c}) * {'^'.join(gens) if gens else '1'}")
        return " + ".join(parts)


def wedge(a: ExtElement, b: ExtElement) -> ExtElement:
    a._check(b)
    out: Dict[int, ExactScalar] = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            s = reorder_sign(ma, mb)
            if not s:
                continue
            m = ma | mb
            v = ca * cb if s > 0 else -(ca * cb)
            out[m] = out[m] + v if m in out else v
    return ExtElement(a.n_pairs, out)


def parity_involution(a: ExtElement) -> ExtElement:
    return ExtElement(a.n_pairs, {m: (-c if popcount(m) & 1 else c) for m, c in a._terms.items()})


def generator(n_pairs: int, k: int) -> ExtElement:
    """alpha^k, 1-based."""
    if not 1 <= k <= 2 * n_pairs:
        raise IndexError(f"generator index {k} out of range 1..{2 * n_pairs}")
    return ExtElement(n_pairs, {1 << (k - 1): ONE})


def gamma(n_pairs: int, j: int) -> ExtElement:
    """gamma_j = alpha^{2j} alpha^{2j-1} = -alpha^{2j-1} alpha^{2j}."""
    if not 1 <= j <= n_pairs:
        raise IndexError(f"pair index {j} out of range 1..{n_pairs}")
    return ExtElement(n_pairs, {0b11 << (2 * j - 2): -ONE})


def top_form(n_pairs: int) -> ExtElement:
    """alpha^1 ... alpha^{2N}."""
    return ExtElement(n_pairs, {(1 << (2 * n_pairs)) - 1: ONE})


def product(elements: Iterable[ExtElement], n_pairs: int) -> ExtElement:
    out = ExtElement.scalar(n_pairs)
    for e in elements:
        out = wedge(out, e)
    return out


def masks_of_degree(n_pairs: int, degree: int) -> List[int]:
    out = []
    for idx in combinations(range(2 * n_pairs), degree):
        m = 0
        for k in idx:
            m |= 1 << k
        out.append(m)
    return out
