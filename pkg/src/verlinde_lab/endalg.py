"""The algebra E = Lambda(h) x| CZ2  (+)  C e_T x| CZ2 and its finite-dimensional structure.

E_0 (untwisted sector) is spanned by ``lambda * kappa^a`` with kappa acting as
the parity involution, E_1 (twisted sector) by ``e_T`` and ``kappa e_T``.
E_0 * E_1 = 0 and the unit is ``1_Lambda + e_T``.

Canonical basis indexing (used by CentralForm and FDModule)::

    2*mask + a        ->  alpha^{mask} kappa^a      (E_0)
    2**(2N+1) + a     ->  kappa^a e_T               (E_1)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .exterior import (
    DimensionMismatch,
    ExtElement,
    even_masks,
    parity_involution,
    popcount,
    reorder_sign,
    top_form,
    wedge,
)
from .scalars import ONE, ZERO, ExactScalar, as_scalar

IRR = ("1", "Pi1", "T", "PiT")


class NonDegenerateRequired(ValueError):
    pass


class SectionInvalid(ValueError):
    pass


class NotCentral(ValueError):
    pass


# --------------------------------------------------------------------------
# E elements


class EElement:
    """u_plus + u_kappa*kappa  (+)  t_plus*e_T + t_kappa*kappa*e_T."""

    __slots__ = ("n_pairs", "u_plus", "u_kappa", "t_plus", "t_kappa")

    def __init__(
        self,
        n_pairs: int,
        u_plus: Optional[ExtElement] = None,
        u_kappa: Optional[ExtElement] = None,
        t_plus=ZERO,
        t_kappa=ZERO,
    ):
        self.n_pairs = n_pairs
        self.u_plus = u_plus if u_plus is not None else ExtElement(n_pairs)
        self.u_kappa = u_kappa if u_kappa is not None else ExtElement(n_pairs)
        for part in (self.u_plus, self.u_kappa):
            if part.n_pairs != n_pairs:
                raise DimensionMismatch(f"N={part.n_pairs} component in an N={n_pairs} element")
        self.t_plus = as_scalar(t_plus)
        self.t_kappa = as_scalar(t_kappa)

    # named elements
    @classmethod
    def unit(cls, n: int) -> "EElement":
        return cls(n, ExtElement.scalar(n), None, ONE, ZERO)

    @classmethod
    def lam(cls, x: ExtElement) -> "EElement":
        return cls(x.n_pairs, x)

    @classmethod
    def lam_kappa(cls, x: ExtElement) -> "EElement":
        return cls(x.n_pairs, None, x)

    @classmethod
    def kappa(cls, n: int) -> "EElement":
        """The Z2 generator inside E_0, i.e. 1_Lambda * kappa."""
        return cls(n, None, ExtElement.scalar(n))

    @classmethod
    def e_t(cls, n: int) -> "EElement":
        return cls(n, t_plus=ONE)

    @classmethod
    def kappa_e_t(cls, n: int) -> "EElement":
        return cls(n, t_kappa=ONE)

    def __bool__(self) -> bool:
        return bool(self.u_plus) or bool(self.u_kappa) or bool(self.t_plus) or bool(self.t_kappa)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EElement):
            return NotImplemented
        return (
            self.n_pairs == other.n_pairs
            and self.u_plus == other.u_plus
            and self.u_kappa == other.u_kappa
            and self.t_plus == other.t_plus
            and self.t_kappa == other.t_kappa
        )

    def __hash__(self) -> int:
        return hash((self.n_pairs, self.u_plus, self.u_kappa, self.t_plus, self.t_kappa))

    def _check(self, other: "EElement") -> None:
        if not isinstance(other, EElement):
            raise TypeError(f"expected EElement, got {type(other).__name__}")
        if other.n_pairs != self.n_pairs:
            raise DimensionMismatch(f"N={self.n_pairs} vs N={other.n_pairs}")

    def __add__(self, other: "EElement") -> "EElement":
        self._check(other)
        return EElement(
            self.n_pairs,
            self.u_plus + other.u_plus,
            self.u_kappa + other.u_kappa,
            self.t_plus + other.t_plus,
            self.t_kappa + other.t_kappa,
        )

    def __neg__(self) -> "EElement":
        return self.scale(-1)

    def __sub__(self, other: "EElement") -> "EElement":
        return self + (-other)

    def scale(self, c) -> "EElement":
        c = as_scalar(c)
        return EElement(self.n_pairs, self.u_plus.scale(c), self.u_kappa.scale(c), self.t_plus * c, self.t_kappa * c)

    def __mul__(self, other):
        if isinstance(other, EElement):
            return e_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def coords(self) -> Dict[int, ExactScalar]:
        """Coordinates in the canonical basis."""
        out: Dict[int, ExactScalar] = {}
        for m, c in self.u_plus.items():
            out[2 * m] = c
        for m, c in self.u_kappa.items():
            out[2 * m + 1] = c
        base = e_dim(self.n_pairs) - 2
        if self.t_plus:
            out[base] = self.t_plus
        if self.t_kappa:
            out[base + 1] = self.t_kappa
        return out

    @classmethod
    def from_coords(cls, n: int, coords: Dict[int, object]) -> "EElement":
        base = e_dim(n) - 2
        up, uk = {}, {}
        tp = tk = ZERO
        for idx, c in coords.items():
            c = as_scalar(c)
            if idx < base:
                (uk if idx & 1 else up)[idx >> 1] = c
            elif idx == base:
                tp = c
            elif idx == base + 1:
                tk = c
            else:
                raise IndexError(idx)
        return cls(n, ExtElement(n, up), ExtElement(n, uk), tp, tk)

    def render(self) -> str:
        parts = []
        if self.u_plus:
            parts.append(f"[{self.u_plus}]")
        if self.u_kappa:
            parts.append(f"[{self.u_kappa}]*k")
        if self.t_plus:
            parts.append(f"({self.t_plus})*eT")
        if self.t_kappa:
            parts.append(f"({self.t_kappa})*k*eT")
        return " + ".join(parts) if parts else "0"

    __str__ = render

    def __repr__(self) -> str:
        return f"EElement(N={self.n_pairs}, {self.render()})"


def e_dim(n: int) -> int:
    return (1 << (2 * n + 1)) + 2


def e_mul(a: EElement, b: EElement) -> EElement:
    """Product in E; kappa * lambda = omega(lambda) * kappa on the untwisted side."""
    a._check(b)
    wb0 = parity_involution(b.u_plus)
    wb1 = parity_involution(b.u_kappa)
    plus = wedge(a.u_plus, b.u_plus) + wedge(a.u_kappa, wb1)
    kap = wedge(a.u_plus, b.u_kappa) + wedge(a.u_kappa, wb0)
    tp = a.t_plus * b.t_plus + a.t_kappa * b.t_kappa
    tk = a.t_plus * b.t_kappa + a.t_kappa * b.t_plus
    return EElement(a.n_pairs, plus, kap, tp, tk)


def basis_element(n: int, idx: int) -> EElement:
    return EElement.from_coords(n, {idx: ONE})


def basis_mul(n: int, i: int, j: int) -> Tuple[int, int]:
    """(sign, index) with b_i * b_j = sign * b_index; sign 0 means the product vanishes."""
    base = e_dim(n) - 2
    if i >= base and j >= base:
        return 1, base + ((i - base) ^ (j - base))
    if i >= base or j >= base:
        return 0, -1
    m1, a = i >> 1, i & 1
    m2, b = j >> 1, j & 1
    s = reorder_sign(m1, m2)
    if not s:
        return 0, -1
    if a and popcount(m2) & 1:
        s = -s
    return s, 2 * (m1 | m2) + (a ^ b)


def generators(n: int) -> List[EElement]:
    """Algebra generators of E: the alpha^k, kappa (in E_0), e_T and kappa e_T."""
    gens = [EElement.lam(ExtElement(n, {1 << k: ONE})) for k in range(2 * n)]
    gens += [EElement.kappa(n), EElement.e_t(n), EElement.kappa_e_t(n)]
    return gens


def is_central(x: EElement) -> bool:
    return all(e_mul(x, g) == e_mul(g, x) for g in generators(x.n_pairs))


# --------------------------------------------------------------------------
# the centre


@dataclass(frozen=True)
class ZElement:
    """Central element split as Z_Lambda (+) Z_P.

    ``z_p`` holds coordinates along z1 = alpha^1...alpha^{2N} kappa,
    z2 = e_T (kappa + 1) and z3 = e_T (kappa - 1).
    """

    z_lambda: ExtElement
    z_p: Tuple[ExactScalar, ExactScalar, ExactScalar] = (ZERO, ZERO, ZERO)

    def __post_init__(self):
        if not self.z_lambda.is_even():
            raise ValueError("Z_Lambda component must be of even degree")
        object.__setattr__(self, "z_p", tuple(as_scalar(c) for c in self.z_p))
        if len(self.z_p) != 3:
            raise ValueError("z_p needs three coordinates")

    @property
    def n_pairs(self) -> int:
        return self.z_lambda.n_pairs

    @classmethod
    def zero(cls, n: int) -> "ZElement":
        return cls(ExtElement(n))

    @classmethod
    def from_lambda(cls, x: ExtElement) -> "ZElement":
        return cls(x)

    @classmethod
    def from_p(cls, n: int, c1=0, c2=0, c3=0) -> "ZElement":
        return cls(ExtElement(n), (c1, c2, c3))

    def to_e(self) -> EElement:
        n = self.n_pairs
        c1, c2, c3 = self.z_p
        return EElement(n, self.z_lambda, top_form(n).scale(c1), c2 - c3, c2 + c3)

    @classmethod
    def from_e(cls, x: EElement, check: bool = True) -> "ZElement":
        n = x.n_pairs
        top = (1 << (2 * n)) - 1
        if check and not is_central(x):
            raise NotCentral(f"{x} is not central")
        extra = {m for m in x.u_kappa.terms if m != top}
        if extra or not x.u_plus.is_even():
            raise NotCentral(f"{x} is not central")
        half = ExactScalar.monomial(Fraction(1, 2))
        c2 = (x.t_plus + x.t_kappa) * half
        c3 = (x.t_kappa - x.t_plus) * half
        return cls(x.u_plus, (x.u_kappa.coeff(top), c2, c3))

    def __add__(self, other: "ZElement") -> "ZElement":
        return ZElement(self.z_lambda + other.z_lambda, tuple(a + b for a, b in zip(self.z_p, other.z_p)))

    def __neg__(self) -> "ZElement":
        return self.scale(-1)

    def __sub__(self, other: "ZElement") -> "ZElement":
        return self + (-other)

    def scale(self, c) -> "ZElement":
        c = as_scalar(c)
        return ZElement(self.z_lambda.scale(c), tuple(a * c for a in self.z_p))

    def __mul__(self, other):
        if isinstance(other, ZElement):
            return ZElement.from_e(e_mul(self.to_e(), other.to_e()), check=False)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def vector(self) -> Dict[int, ExactScalar]:
        """Coordinates in :func:`center_basis_labels` order."""
        n = self.n_pairs
        pos = _even_position(n)
        out = {pos[m]: c for m, c in self.z_lambda.items()}
        k = len(pos)
        for t, c in enumerate(self.z_p):
            if c:
                out[k + t] = c
        return out

    @classmethod
    def from_vector(cls, n: int, vec: Dict[int, object]) -> "ZElement":
        masks = even_masks(n)
        k = len(masks)
        lam, p = {}, [ZERO, ZERO, ZERO]
        for i, c in vec.items():
            if i < k:
                lam[masks[i]] = as_scalar(c)
            else:
                p[i - k] = as_scalar(c)
        return cls(ExtElement(n, lam), tuple(p))

    def render(self) -> str:
        parts = []
        if self.z_lambda:
            parts.append(f"[{self.z_lambda}]")
        for name, c in zip(("z1", "z2", "z3"), self.z_p):
            if c:
                parts.append(f"({c})*{name}")
        return " + ".join(parts) if parts else "0"

    __str__ = render


_EVEN_POS: Dict[int, Dict[int, int]] = {}


def _even_position(n: int) -> Dict[int, int]:
    if n not in _EVEN_POS:
        _EVEN_POS[n] = {m: i for i, m in enumerate(even_masks(n))}
    return _EVEN_POS[n]


def center_dim(n: int) -> int:
    return (1 << (2 * n - 1)) + 3


def center_basis_labels(n: int) -> List[str]:
    labels = []
    for m in even_masks(n):
        gens = [f"a{k + 1}" for k in range(2 * n) if m >> k & 1]
        labels.append("^".join(gens) if gens else "1")
    return labels + ["z1", "z2", "z3"]


def center_closed_form(n: int) -> List[ZElement]:
    """Lambda(h)_even (+) C alpha^1...alpha^{2N} kappa (+) E_1, each element checked central."""
    if n < 1:
        raise ValueError("N must be positive")
    basis = [ZElement(ExtElement(n, {m: ONE})) for m in even_masks(n)]
    basis += [ZElement.from_p(n, 1, 0, 0), ZElement.from_p(n, 0, 1, 0), ZElement.from_p(n, 0, 0, 1)]
    for z in basis:
        if not is_central(z.to_e()):
            raise AssertionError(f"closed-form centre element {z} is not central")
    return basis


def center_brute_force(n: int, max_pairs: int = 3) -> List[EElement]:
    """Solve x g = g x for every algebra generator g, over Q."""
    if n > max_pairs:
        raise ValueError(f"brute-force centre is limited to N <= {max_pairs}")
    dim = e_dim(n)
    gens = [2 * (1 << k) for k in range(2 * n)] + [1, dim - 2, dim - 1]
    rows: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for g in gens:
        for a in range(dim):
            s1, k1 = basis_mul(n, a, g)
            s2, k2 = basis_mul(n, g, a)
            for s, k in ((s1, k1), (-s2, k2)):
                if s:
                    row = rows.setdefault((g, k), {})
                    v = row.get(a, 0) + s
                    if v:
                        row[a] = Fraction(v)
                    else:
                        row.pop(a, None)
    null = linalg.nullspace(list(rows.values()), dim)
    return [EElement.from_coords(n, {i: as_scalar(v) for i, v in vec.items()}) for vec in null]


def span_rank(elements: Sequence[EElement]) -> int:
    elements = list(elements)
    if not elements:
        return 0
    rows = [{i: linalg.RatFunc(c) for i, c in e.coords().items()} for e in elements]
    return linalg.rank(rows, e_dim(elements[0].n_pairs))


def same_span(a: Sequence[EElement], b: Sequence[EElement]) -> bool:
    ra = span_rank(a)
    rb = span_rank(b)
    return ra == rb == span_rank(list(a) + list(b))


# --------------------------------------------------------------------------
# central forms


@dataclass(frozen=True)
class CentralForm:
    """Linear functional on E given by its values on the canonical basis (sparse)."""

    n_pairs: int
    values: Dict[int, ExactScalar] = field(default_factory=dict)

    def __call__(self, x: EElement) -> ExactScalar:
        total = ZERO
        for i, c in x.coords().items():
            v = self.values.get(i)
            if v:
                total = total + c * v
        return total

    def value(self, idx: int) -> ExactScalar:
        return self.values.get(idx, ZERO)

    def pair(self, i: int, j: int) -> ExactScalar:
        s, k = basis_mul(self.n_pairs, i, j)
        if not s:
            return ZERO
        v = self.values.get(k, ZERO)
        return v if s > 0 else -v

    def is_central(self) -> bool:
        """phi(ab) == phi(ba) on all basis pairs."""
        dim = e_dim(self.n_pairs)
        return all(self.pair(i, j) == self.pair(j, i) for i in range(dim) for j in range(i + 1, dim))

    def gram(self) -> List[List[ExactScalar]]:
        dim = e_dim(self.n_pairs)
        return [[self.pair(i, j) for j in range(dim)] for i in range(dim)]

    def is_nondegenerate(self) -> bool:
        dim = e_dim(self.n_pairs)
        rows = [{j: linalg.RatFunc(v) for j in range(dim) if (v := self.pair(i, j))} for i in range(dim)]
        return linalg.rank(rows, dim) == dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, CentralForm):
            return NotImplemented
        clean = lambda d: {k: v for k, v in d.items() if v}
        return self.n_pairs == other.n_pairs and clean(self.values) == clean(other.values)

    def __hash__(self) -> int:
        return hash((self.n_pairs, frozenset((k, v) for k, v in self.values.items() if v)))


def top_kappa_index(n: int) -> int:
    return 2 * ((1 << (2 * n)) - 1) + 1


def kappa_e_t_index(n: int) -> int:
    return e_dim(n) - 1


def eps_form(n: int) -> CentralForm:
    """eps(alpha^1...alpha^{2N} kappa) = 1, eps(e_T kappa) = 1, zero elsewhere."""
    return CentralForm(n, {top_kappa_index(n): ONE, kappa_e_t_index(n): ONE})


def hat_iso(z, form: CentralForm) -> CentralForm:
    """z |-> form(z * -)."""
    x = z.to_e() if isinstance(z, ZElement) else z
    n = form.n_pairs
    dim = e_dim(n)
    values: Dict[int, ExactScalar] = {}
    for i, c in x.coords().items():
        for b in range(dim):
            v = form.pair(i, b)
            if v:
                values[b] = values.get(b, ZERO) + c * v
    return CentralForm(n, {k: v for k, v in values.items() if v})


def hat_iso_inv(phi: CentralForm, form: CentralForm) -> ZElement:
    """The central z with form(z * -) = phi."""
    n = form.n_pairs
    dim = e_dim(n)
    # row b:  sum_a z_a form(b_a b_b) = phi(b_b)
    rows = []
    for b in range(dim):
        row = {}
        for a in range(dim):
            v = form.pair(a, b)
            if v:
                row[a] = linalg.RatFunc(v)
        rows.append(row)
    rhs = [linalg.RatFunc(phi.value(b)) if phi.value(b) else None for b in range(dim)]
    try:
        sol = linalg.solve(rows, rhs, dim)
    except linalg.UnderdeterminedSystem as exc:
        raise NonDegenerateRequired("pairing of the reference form is degenerate") from exc
    coords = {i: v.to_scalar() for i, v in enumerate(sol) if v is not None}
    return ZElement.from_e(EElement.from_coords(n, coords))


# --------------------------------------------------------------------------
# the elements c_U


def phi_irr(n: int) -> Dict[str, ZElement]:
    """c_U in Z(E) with eps(c_U * -) the central form of the irreducible U."""
    top = top_form(n)
    return {
        "1": ZElement(top, (ONE, ZERO, ZERO)),
        "Pi1": ZElement(-top, (ONE, ZERO, ZERO)),
        "T": ZElement.from_p(n, 0, 1, 0),
        "PiT": ZElement.from_p(n, 0, 0, 1),
    }


# --------------------------------------------------------------------------
# finite-dimensional modules and the Hattori-Stallings trace

Matrix = List[List[ExactScalar]]


def zeros(r: int, c: int) -> Matrix:
    return [[ZERO] * c for _ in range(r)]


def identity(d: int) -> Matrix:
    m = zeros(d, d)
    for i in range(d):
        m[i][i] = ONE
    return m


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    if len(a[0]) != inner:
        raise DimensionMismatch(f"{len(a)}x{len(a[0])} times {inner}x{cols}")
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        acc = out[i]
        for k, aik in enumerate(row):
            if not aik:
                continue
            for j, bkj in enumerate(b[k]):
                if bkj:
                    acc[j] = acc[j] + aik * bkj
    return out


def matvec(a: Matrix, v: List[ExactScalar]) -> List[ExactScalar]:
    out = []
    for row in a:
        acc = ZERO
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def kron_identity(a: Matrix, d: int) -> Matrix:
    """a (x) id_d with index (i, x) -> i*d + x."""
    r, c = len(a), len(a[0])
    out = zeros(r * d, c * d)
    for i in range(r):
        for j in range(c):
            if a[i][j]:
                for x in range(d):
                    out[i * d + x][j * d + x] = a[i][j]
    return out


@dataclass
class FDModule:
    """Finite-dimensional left E-module: basis index -> action matrix."""

    n_pairs: int
    dim: int
    action: Dict[int, Matrix]

    def act(self, x: EElement) -> Matrix:
        out = zeros(self.dim, self.dim)
        for i, c in x.coords().items():
            mat = self.action[i]
            for r in range(self.dim):
                for s in range(self.dim):
                    if mat[r][s]:
                        out[r][s] = out[r][s] + c * mat[r][s]
        return out

    def check_homomorphism(self) -> bool:
        d = e_dim(self.n_pairs)
        for i in range(d):
            for j in range(d):
                s, k = basis_mul(self.n_pairs, i, j)
                lhs = matmul(self.action[i], self.action[j])
                rhs = zeros(self.dim, self.dim) if not s else [[v if s > 0 else -v for v in row] for row in self.action[k]]
                if lhs != rhs:
                    return False
        return True

    def tensor_space(self, w: int) -> "FDModule":
        """P (x) W for a w-dimensional multiplicity space."""
        return FDModule(self.n_pairs, self.dim * w, {i: kron_identity(m, w) for i, m in self.action.items()})

    def is_module_map(self, f: Matrix, target: Optional["FDModule"] = None) -> bool:
        target = target or self
        for g in generators(self.n_pairs):
            if matmul(f, self.act(g)) != matmul(target.act(g), f):
                return False
        return True


def left_mul_matrix(n: int, c: EElement) -> Matrix:
    dim = e_dim(n)
    m = zeros(dim, dim)
    for i, ci in c.coords().items():
        for j in range(dim):
            s, k = basis_mul(n, i, j)
            if s:
                m[k][j] = m[k][j] + (ci if s > 0 else -ci)
    return m


def right_mul_matrix(n: int, c: EElement) -> Matrix:
    """Matrix of b |-> b * c on the regular module (an E-module endomorphism)."""
    dim = e_dim(n)
    m = zeros(dim, dim)
    for i, ci in c.coords().items():
        for j in range(dim):
            s, k = basis_mul(n, j, i)
            if s:
                m[k][j] = m[k][j] + (ci if s > 0 else -ci)
    return m


def regular_module(n: int) -> FDModule:
    dim = e_dim(n)
    return FDModule(n, dim, {i: left_mul_matrix(n, basis_element(n, i)) for i in range(dim)})


def hs_trace(phi: CentralForm, module: FDModule, cover_dim: int, pi: Matrix, iota: Matrix, f: Matrix) -> ExactScalar:
    """Hattori-Stallings trace t^phi_P(f) from a cover E (x) X -> P with section iota.

    ``pi`` is dim(P) x dim(E)*|X|, ``iota`` is dim(E)*|X| x dim(P); the free
    module E (x) X uses the index ``a*|X| + x``.
    """
    n = module.n_pairs
    dim_e = e_dim(n)
    if len(pi) != module.dim or len(pi[0]) != dim_e * cover_dim:
        raise DimensionMismatch("pi has the wrong shape")
    if matmul(pi, iota) != identity(module.dim):
        raise SectionInvalid("pi o iota is not the identity on P")
    loop = matmul(iota, matmul(f, pi))
    unit = EElement.unit(n).coords()
    total = ZERO
    for x in range(cover_dim):
        col = x  # 1 (x) x has coordinates unit[a] at a*|X| + x
        vec = [ZERO] * (dim_e * cover_dim)
        for a, c in unit.items():
            vec[a * cover_dim + col] = c
        out = matvec(loop, vec)
        for a in range(dim_e):
            v = out[a * cover_dim + x]
            if v:
                total = total + v * phi.value(a)
    return total


def partial_trace(f: Matrix, dim_p: int, w: int) -> Matrix:
    """Trace out the multiplicity factor W of an endomorphism of P (x) W."""
    out = zeros(dim_p, dim_p)
    for i in range(dim_p):
        for j in range(dim_p):
            acc = ZERO
            for x in range(w):
                v = f[i * w + x][j * w + x]
                if v:
                    acc = acc + v
            out[i][j] = acc
    return out
