"""Fusion rings from modular data.

``fusion_sf`` runs the non-semisimple procedure for the even symplectic
fermions entirely in exact arithmetic.  ``fusion_semisimple`` is the classical
Verlinde formula in floating point, for comparison with rational theories.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .endalg import IRR, CentralForm, ZElement, e_mul, eps_form, hat_iso, phi_irr, top_kappa_index, kappa_e_t_index
from .parallel import parallel_map
from .scalars import PI, ExactScalar
from .smod import phi_basis, s_z, s_z_inv, s_z_tilde

__all__ = [
    "NotInPhiSpan",
    "NonIntegerCoefficient",
    "NotIntegral",
    "NegativeFusion",
    "InvertibilityError",
    "FusionTable",
    "SMatrixInput",
    "expand_in_phi_basis",
    "fusion_sf",
    "fusion_semisimple",
    "smatrix_from_fusion_ring",
    "delta_from_s",
    "fibonacci_ring",
    "ising_ring",
    "cyclic_ring",
    "fibonacci_smatrix",
    "ising_smatrix",
]


class NotInPhiSpan(ArithmeticError):
    pass


class NonIntegerCoefficient(ArithmeticError):
    pass


class NotIntegral(ArithmeticError):
    def __init__(self, entry: Tuple[str, str, str], deviation: float):
        super().__init__(f"N_{{{entry[0]},{entry[1]}}}^{entry[2]} is {deviation:.3g} away from an integer")
        self.entry = entry
        self.deviation = deviation


class NegativeFusion(ArithmeticError):
    pass


class InvertibilityError(ValueError):
    pass


@dataclass
class FusionTable:
    labels: Tuple[str, ...]
    n_abc: Dict[Tuple[str, str], Tuple[int, ...]]
    max_deviation: float = 0.0

    def coeff(self, a: str, b: str, c: str) -> int:
        return self.n_abc[(a, b)][self.labels.index(c)]

    def as_array(self) -> np.ndarray:
        """Integer array indexed [a, b, c]."""
        k = len(self.labels)
        out = np.zeros((k, k, k), dtype=np.int64)
        for (a, b), vec in self.n_abc.items():
            out[self.labels.index(a), self.labels.index(b)] = vec
        return out

    def check_invariants(self, unit: Optional[str] = None) -> None:
        unit = self.labels[0] if unit is None else unit
        for (a, b), vec in self.n_abc.items():
            if any(v < 0 for v in vec):
                raise NegativeFusion(f"{a}*{b} has a negative coefficient")
            if self.n_abc.get((b, a)) != vec:
                raise ValueError(f"table is not commutative at {a},{b}")
        for b in self.labels:
            if self.n_abc[(unit, b)] != tuple(int(c == b) for c in self.labels):
                raise ValueError(f"{unit} does not act as unit on {b}")

    def is_associative(self) -> bool:
        n = self.as_array()
        # (A*B)*C versus A*(B*C)
        left = np.einsum("abd,dce->abce", n, n)
        right = np.einsum("bcd,ade->abce", n, n)
        return bool(np.array_equal(left, right))

    def product_str(self, a: str, b: str) -> str:
        parts = []
        for c, k in zip(self.labels, self.n_abc[(a, b)]):
            if k:
                parts.append(f"[{c}]" if k == 1 else f"{k}[{c}]")
        return " + ".join(parts) if parts else "0"

    def render(self) -> str:
        lines = []
        for i, a in enumerate(self.labels):
            for b in self.labels[i:]:
                lines.append(f"[{a}] * [{b}] = {self.product_str(a, b)}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "table": {f"{a},{b}": list(v) for (a, b), v in self.n_abc.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FusionTable":
        labels = tuple(data["labels"])
        table = {}
        for key, vec in data["table"].items():
            a, b = key.split(",")
            if a not in labels or b not in labels or len(vec) != len(labels):
                raise ValueError(f"malformed fusion table entry {key!r}")
            table[(a, b)] = tuple(int(v) for v in vec)
        return cls(labels, table)


@dataclass
class SMatrixInput:
    labels: Tuple[str, ...]
    matrix: np.ndarray
    unit: int = 0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        k = len(self.labels)
        if self.matrix.shape != (k, k):
            raise ValueError(f"S-matrix shape {self.matrix.shape} does not match {k} labels")
        if not 0 <= self.unit < k:
            raise ValueError("unit index out of range")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "unit": self.unit,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SMatrixInput":
        try:
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
            return cls(tuple(data["labels"]), re + 1j * im, int(data.get("unit", 0)))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed S-matrix JSON: {exc}") from exc

    @classmethod
    def load(cls, path) -> "SMatrixInput":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


# --------------------------------------------------------------------------
# symplectic fermions


def expand_in_phi_basis(z: ZElement, n: Optional[int] = None) -> Tuple[int, ...]:
    """Integer k with z = sum_C k_C phi_C, in IRR order."""
    n = z.n_pairs if n is None else n
    phis = phi_basis(n)
    cols = [phis[label].vector() for label in IRR]
    target = z.vector()
    support = sorted(set(target).union(*cols))
    rows = [{j: linalg.RatFunc(c[i]) for j, c in enumerate(cols) if i in c} for i in support]
    rhs = [linalg.RatFunc(target[i]) if i in target else None for i in support]
    try:
        sol = linalg.solve(rows, rhs, len(IRR))
    except linalg.InconsistentSystem as exc:
        raise NotInPhiSpan(f"{z} is not a combination of the phi_U") from exc
    out = []
    for label, v in zip(IRR, sol):
        s = ExactScalar() if v is None else v.to_scalar()
        if not s.is_rational() or s.as_fraction().denominator != 1:
            raise NonIntegerCoefficient(f"coefficient of phi_{label} is {s}")
        out.append(int(s.as_fraction()))
    return tuple(out)


def fusion_sf(n: int) -> FusionTable:
    if n < 1:
        raise ValueError("N must be at least 1")
    phis = phi_basis(n)
    images = {label: s_z(phis[label]).to_e() for label in IRR}
    pairs = [(a, b) for a, b in product(IRR, repeat=2)]

    def one(pair):
        a, b = pair
        prod = ZElement.from_e(e_mul(images[a], images[b]), check=n <= 3)
        return expand_in_phi_basis(s_z_inv(prod), n)

    table = dict(zip(pairs, parallel_map(one, pairs)))
    return FusionTable(IRR, table)


def delta_from_s(n: int, check_nondegenerate: Optional[bool] = None) -> CentralForm:
    """delta = eps(S~(c_1) * -), checked against its closed form."""
    c1 = phi_irr(n)["1"]
    delta = hat_iso(s_z_tilde(c1), eps_form(n))
    expected = CentralForm(
        n,
        {
            top_kappa_index(n): (PI * 2) ** (-n),
            kappa_e_t_index(n): ExactScalar.monomial(Fraction(1, 2 ** n)),
        },
    )
    if delta != expected:
        raise AssertionError(f"delta does not match its closed form: {delta.values}")
    if check_nondegenerate is None:
        check_nondegenerate = n <= 3
    if check_nondegenerate and not delta.is_nondegenerate():
        from .endalg import NonDegenerateRequired

        raise NonDegenerateRequired("Gram matrix of delta is singular")
    return delta


# --------------------------------------------------------------------------
# semisimple Verlinde formula


def fusion_semisimple(s: SMatrixInput, tol: float = 1e-9) -> FusionTable:
    m = s.matrix
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise InvertibilityError("S-matrix is singular") from exc
    if np.linalg.cond(m) > 1e12:
        raise InvertibilityError("S-matrix is numerically singular")
    vac = m[s.unit]
    if np.any(np.abs(vac) < 1e-12):
        raise InvertibilityError("vacuum row of the S-matrix has a zero entry")
    # N[a, b, c] = sum_x S[a, x] S[b, x] S^{-1}[x, c] / S[1, x]
    raw = np.einsum("ax,bx,xc,x->abc", m, m, inv, 1.0 / vac)
    rounded = np.rint(raw.real).astype(np.int64)
    dev = np.abs(raw - rounded)
    labels = s.labels
    worst = np.unravel_index(np.argmax(dev), dev.shape)
    if dev[worst] > tol:
        raise NotIntegral(tuple(labels[i] for i in worst), float(dev[worst]))
    if np.any(rounded < 0):
        a, b, c = np.argwhere(rounded < 0)[0]
        raise NegativeFusion(f"N_{{{labels[a]},{labels[b]}}}^{labels[c]} = {rounded[a, b, c]}")
    k = len(labels)
    table = {(labels[a], labels[b]): tuple(int(v) for v in rounded[a, b]) for a in range(k) for b in range(k)}
    return FusionTable(labels, table, max_deviation=float(dev.max()))


def smatrix_from_fusion_ring(table: FusionTable, seed: int = 0, unit: int = 0) -> SMatrixInput:
    """Columns are joint eigenvectors of the fusion matrices (N_A)_{BC} = N_{AB}^C.

    Each column is scaled to unit norm with a positive real vacuum entry.
    """
    n = table.as_array().astype(float)
    rng = np.random.default_rng(seed)
    weights = rng.standard_normal(len(table.labels))
    mixed = np.einsum("a,abc->bc", weights, n)
    _, vecs = np.linalg.eig(mixed)
    vecs = vecs / vecs[unit]
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    return SMatrixInput(table.labels, vecs, unit)


def _ring(labels: Sequence[str], rule) -> FusionTable:
    labels = tuple(labels)
    table = {}
    for a in labels:
        for b in labels:
            prod = rule(a, b)
            table[(a, b)] = tuple(prod.get(c, 0) for c in labels)
    return FusionTable(labels, table)


def fibonacci_ring() -> FusionTable:
    def rule(a, b):
        if a == "1":
            return {b: 1}
        if b == "1":
            return {a: 1}
        return {"1": 1, "tau": 1}

    return _ring(("1", "tau"), rule)


def ising_ring() -> FusionTable:
    def rule(a, b):
        if a == "1":
            return {b: 1}
        if b == "1":
            return {a: 1}
        if a == b == "sigma":
            return {"1": 1, "psi": 1}
        if a == b == "psi":
            return {"1": 1}
        return {"sigma": 1}

    return _ring(("1", "sigma", "psi"), rule)


def cyclic_ring(k: int) -> FusionTable:
    labels = tuple(str(i) for i in range(k))
    return _ring(labels, lambda a, b: {str((int(a) + int(b)) % k): 1})


def fibonacci_smatrix() -> SMatrixInput:
    phi = (1 + 5 ** 0.5) / 2
    m = np.array([[1, phi], [phi, -1]]) / np.sqrt(2 + phi)
    return SMatrixInput(("1", "tau"), m)


def ising_smatrix() -> SMatrixInput:
    r = 2 ** 0.5
    m = np.array([[1, r, 1], [r, 0, -r], [1, -r, 1]]) / 2
    return SMatrixInput(("1", "sigma", "psi"), m)
