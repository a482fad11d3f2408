"""Characters, pseudo-trace functions and their behaviour under tau -> -1/tau.

Series live on the exponent lattice (1/48)Z in the nome q = exp(2 pi i tau).
Pseudo-trace functions are first assembled as exact data (polynomials in tau
with coefficients in Q(i)[pi^{+-1}] times products of character derivatives)
and only numericized at the very end.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .endalg import EElement, ZElement, center_closed_form, e_mul, eps_form
from .exterior import ExtElement, gamma, monomial_from_indices, wedge
from .parallel import parallel_map
from .scalars import I, PI, ZERO, ExactScalar
from .smod import s_z_tilde

__all__ = [
    "STEP",
    "IM_GUARD",
    "DEFAULT_TRUNCATION",
    "DEFAULT_TAUS",
    "CHARACTERS",
    "ImTooSmall",
    "ToleranceExceeded",
    "InvalidInsertion",
    "PuiseuxSeries",
    "character_series",
    "evaluate",
    "Insertion",
    "valid_insertions",
    "Term",
    "PseudoTraceExpr",
    "pseudo_trace_expr",
    "pseudo_trace_eval",
    "CheckLine",
    "Report",
    "check_character_s",
    "check_modular_covariance",
    "covariance_suite",
    "separation_rank",
]

STEP = 48
IM_GUARD = 0.3
DEFAULT_TRUNCATION = 400
DEFAULT_TAUS = (1j, 0.3 + 1.1j, -0.4 + 0.8j)
CHARACTERS = ("ns+", "ns-", "r+", "r-")

TWO_PI_I = PI * I * 2


class ImTooSmall(ValueError):
    pass


class ToleranceExceeded(AssertionError):
    def __init__(self, name: str, tau: complex, deviation: float):
        super().__init__(f"{name} at tau={tau}: relative deviation {deviation:.3e}")
        self.name = name
        self.tau = tau
        self.deviation = deviation


class InvalidInsertion(ValueError):
    pass


# --------------------------------------------------------------------------
# Puiseux series


@dataclass(frozen=True)
class PuiseuxSeries:
    """sum_k coeffs[k] q^(k/48), known exactly for exponents below ``truncation_order``."""

    coeffs: Mapping[int, complex]
    truncation_order: Fraction
    step: int = STEP

    def __post_init__(self):
        if self.step != STEP:
            raise ValueError(f"exponent denominator is fixed at {STEP}")
        object.__setattr__(self, "truncation_order", Fraction(self.truncation_order))
        limit = self.truncation_order * STEP
        clean = {int(k): complex(v) for k, v in self.coeffs.items() if v and k < limit}
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def constant(cls, c: complex = 1.0, order=math.inf) -> "PuiseuxSeries":
        order = Fraction(10 ** 9) if order == math.inf else order
        return cls({0: c}, order)

    @cached_property
    def _arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        keys = sorted(self.coeffs)
        return np.array(keys, dtype=float), np.array([self.coeffs[k] for k in keys], dtype=complex)

    def leading_exponent(self) -> Optional[Fraction]:
        return Fraction(min(self.coeffs), STEP) if self.coeffs else None

    def coefficient(self, exponent) -> complex:
        k = Fraction(exponent) * STEP
        if k.denominator != 1:
            return 0j
        return self.coeffs.get(int(k), 0j)

    def __add__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return PuiseuxSeries(out, min(self.truncation_order, other.truncation_order))

    def scale(self, c: complex) -> "PuiseuxSeries":
        return PuiseuxSeries({k: c * v for k, v in self.coeffs.items()}, self.truncation_order)

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self.scale(other)
        if not self.coeffs or not other.coeffs:
            return PuiseuxSeries({}, min(self.truncation_order, other.truncation_order))
        lead_a, lead_b = self.leading_exponent(), other.leading_exponent()
        order = min(self.truncation_order + lead_b, other.truncation_order + lead_a)
        limit = order * STEP
        out: Dict[int, complex] = {}
        for ka, va in self.coeffs.items():
            for kb, vb in other.coeffs.items():
                k = ka + kb
                if k < limit:
                    out[k] = out.get(k, 0) + va * vb
        return PuiseuxSeries(out, order)

    __rmul__ = scale

    def derivative(self, order: int = 1) -> "PuiseuxSeries":
        """(d/dtau)^order, acting as 2 pi i (k/48) on q^(k/48)."""
        f = 2j * math.pi / STEP
        return PuiseuxSeries({k: v * (f * k) ** order for k, v in self.coeffs.items()}, self.truncation_order)

    def evaluate(self, tau: complex, im_guard: float = IM_GUARD) -> complex:
        return evaluate(self, tau, im_guard)

    def tail_estimate(self, tau: complex) -> float:
        """Geometric estimate of the omitted tail.

        Uses the largest of the last ten stored coefficients as the size of
        every omitted coefficient; valid as an order of magnitude because the
        coefficients here grow subexponentially.
        """
        if not self.coeffs:
            return 0.0
        keys = sorted(self.coeffs)[-10:]
        c = max(abs(self.coeffs[k]) for k in keys)
        r = math.exp(-2 * math.pi * complex(tau).imag / 2)  # half-integer spacing at worst
        return c * math.exp(-2 * math.pi * complex(tau).imag * float(self.truncation_order)) / (1 - r)


def _check_tau(tau: complex, im_guard: float) -> complex:
    tau = complex(tau)
    if tau.imag < im_guard:
        raise ImTooSmall(f"Im(tau) = {tau.imag:.3g} is below the convergence guard {im_guard}")
    return tau


def evaluate(s: PuiseuxSeries, tau: complex, im_guard: float = IM_GUARD) -> complex:
    tau = _check_tau(tau, im_guard)
    exps, coeffs = s._arrays
    if not len(exps):
        return 0j
    return complex(np.sum(coeffs * np.exp(2j * np.pi * tau * exps / STEP)))


def _euler_square(sign: int, odd: bool, terms: int) -> List[int]:
    """Integer coefficients of (prod (1 + sign x^e))^2 mod x^terms.

    e runs over 1, 2, 3, ... or over the odd numbers 1, 3, 5, ... (in units of
    the half-step variable x = q^(1/2) for the Ramond products).
    """
    poly = np.zeros(terms, dtype=object)
    poly[:] = 0
    poly[0] = 1
    e = 1
    while e < terms:
        poly[e:] = poly[e:] + sign * poly[:-e]
        e += 2 if odd else 1
    sq = np.zeros(terms, dtype=object)
    sq[:] = 0
    for i in range(terms):
        if poly[i]:
            sq[i:] = sq[i:] + poly[i] * poly[: terms - i]
    return [int(v) for v in sq]


@lru_cache(maxsize=None)
def character_series(kind: str, truncation: int = DEFAULT_TRUNCATION, derivative: int = 0) -> PuiseuxSeries:
    """N=1 characters, kept up to q-power ``truncation`` beyond the leading term."""
    if kind not in CHARACTERS:
        raise ValueError(f"unknown character {kind!r}; expected one of {CHARACTERS}")
    if truncation <= 0:
        raise ValueError("truncation must be positive")
    if derivative:
        return character_series(kind, truncation).derivative(derivative)
    sign = 1 if kind.endswith("+") else -1
    if kind.startswith("ns"):
        coeffs = _euler_square(sign, odd=False, terms=truncation + 1)
        lead = 4  # q^(1/12)
        spacing = STEP
    else:
        coeffs = _euler_square(sign, odd=True, terms=2 * truncation + 1)
        lead = -2  # q^(-1/24)
        spacing = STEP // 2
    data = {lead + spacing * k: float(c) for k, c in enumerate(coeffs) if c}
    order = Fraction(lead + spacing * len(coeffs), STEP)
    return PuiseuxSeries(data, order)


# --------------------------------------------------------------------------
# insertions and pseudo-trace data


@dataclass(frozen=True)
class Insertion:
    """gamma~_{l_1} ... gamma~_{l_r} alpha^{j_1}_{-1} ... alpha^{j_s}_{-1} |0>."""

    l_indices: Tuple[int, ...] = ()
    j_indices: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "l_indices", tuple(sorted(self.l_indices)))
        object.__setattr__(self, "j_indices", tuple(self.j_indices))

    @property
    def r(self) -> int:
        return len(self.l_indices)

    @property
    def s(self) -> int:
        return len(self.j_indices)

    @property
    def weight(self) -> int:
        return 2 * self.r + self.s

    @property
    def pairs_of_j(self) -> frozenset:
        return frozenset((j + 1) // 2 for j in self.j_indices)

    def validate(self, n: int) -> "Insertion":
        if any(not 1 <= l <= n for l in self.l_indices):
            raise InvalidInsertion(f"l indices {self.l_indices} out of range 1..{n}")
        if any(not 1 <= j <= 2 * n for j in self.j_indices):
            raise InvalidInsertion(f"j indices {self.j_indices} out of range 1..{2 * n}")
        if len(set(self.j_indices)) != self.s:
            raise InvalidInsertion("repeated j index")
        if len(self.pairs_of_j) != self.s:
            raise InvalidInsertion("j indices contain a complete pair")
        if self.s % 2:
            raise InvalidInsertion("odd number of fermion modes leaves the even subalgebra")
        if self.pairs_of_j & set(self.l_indices):
            raise InvalidInsertion("l and j indices must belong to different pairs")
        return self

    def label(self) -> str:
        l = ",".join(map(str, self.l_indices))
        j = ",".join(map(str, self.j_indices))
        return f"w(l=[{l}],j=[{j}])"


def valid_insertions(n: int, max_rs: int) -> List[Insertion]:
    """Insertions with distinct l's, ascending j's and r + s <= max_rs."""
    out = []
    for s in range(0, min(max_rs, n) + 1, 2):
        for pair_set in combinations(range(1, n + 1), s):
            for choice in range(1 << s):
                j = tuple(2 * p - 1 + ((choice >> t) & 1) for t, p in enumerate(pair_set))
                free = [p for p in range(1, n + 1) if p not in pair_set]
                for r in range(0, min(max_rs - s, len(free)) + 1):
                    for ls in combinations(free, r):
                        out.append(Insertion(ls, j))
    return out


@dataclass(frozen=True)
class Term:
    """poly(tau) * prod_k chi_character^(derivs[k])(tau)."""

    character: str
    derivs: Tuple[int, ...]
    poly: Tuple[ExactScalar, ...]

    @property
    def family(self) -> str:
        return self.character[:-1]

    def key(self) -> Tuple[str, Tuple[int, ...]]:
        # the factors are evaluated at a common tau, so only the multiset of orders matters
        return self.character, tuple(sorted(self.derivs, reverse=True))


def _poly_add(a: Sequence[ExactScalar], b: Sequence[ExactScalar]) -> Tuple[ExactScalar, ...]:
    m = max(len(a), len(b))
    out = [(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(m)]
    while out and not out[-1]:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class PseudoTraceExpr:
    n_pairs: int
    terms: Tuple[Term, ...] = ()

    def data(self) -> Dict[Tuple[str, Tuple[int, ...]], Tuple[ExactScalar, ...]]:
        out: Dict[Tuple[str, Tuple[int, ...]], Tuple[ExactScalar, ...]] = {}
        for t in self.terms:
            out[t.key()] = _poly_add(out.get(t.key(), ()), t.poly)
        return {k: v for k, v in out.items() if v}

    def is_zero(self) -> bool:
        return not self.data()

    def families(self) -> set:
        return {k[0] for k in self.data()}

    def __add__(self, other: "PseudoTraceExpr") -> "PseudoTraceExpr":
        return PseudoTraceExpr(self.n_pairs, self.terms + other.terms)

    def scale(self, c) -> "PseudoTraceExpr":
        return PseudoTraceExpr(self.n_pairs, tuple(Term(t.character, t.derivs, tuple(c * p for p in t.poly)) for t in self.terms))

    def render(self) -> str:
        parts = []
        for (ch, d), poly in sorted(self.data().items()):
            p = " + ".join(f"({c})*tau^{k}" for k, c in enumerate(poly) if c)
            parts.append(f"[{p}] * prod chi_{ch}^{d}")
        return "\n".join(parts) if parts else "0"


def _alpha_word(n: int, j: Sequence[int]) -> ExtElement:
    sign, mask = monomial_from_indices(j)
    return ExtElement(n, {mask: ExactScalar.monomial(sign)})


def _gamma_word(n: int, pairs: Iterable[int]) -> ExtElement:
    out = ExtElement.scalar(n)
    for p in pairs:
        out = wedge(out, gamma(n, p))
    return out


def pseudo_trace_expr(z: ZElement, w: Insertion, n: Optional[int] = None) -> PseudoTraceExpr:
    n = z.n_pairs if n is None else n
    w.validate(n)
    eps = eps_form(n)
    ze = z.to_e()
    aj = _alpha_word(n, w.j_indices)
    mult = Counter(w.l_indices)
    prefactor = ExactScalar.monomial(Fraction(1, 2)) * TWO_PI_I ** (-w.r)
    distinct = sorted(mult)
    terms: List[Term] = []

    for nu, character in ((0, "ns+"), (1, "ns-")):
        left = e_mul(ze, EElement.kappa(n)) if nu else ze
        for h in range(len(distinct) + 1):
            for hit in combinations(distinct, h):
                # derivatives in ``hit`` land once on the linear factor 1 + 2 pi i gamma tau
                weight = 1
                for l in hit:
                    weight *= mult[l]
                derivs = tuple(mult.get(p, 0) - (p in hit) for p in range(1, n + 1))
                rest = [p for p in range(1, n + 1) if p not in hit]
                base = wedge(aj, _gamma_word(n, hit))
                poly = []
                for k in range(len(rest) + 1):
                    acc = ZERO
                    for sub in combinations(rest, k):
                        x = EElement.lam(wedge(base, _gamma_word(n, sub)))
                        acc = acc + eps(e_mul(left, x))
                    poly.append(acc * TWO_PI_I ** (h + k) * weight * prefactor)
                poly = _poly_add(poly, ())
                if poly:
                    terms.append(Term(character, derivs, poly))

    if w.s == 0:
        derivs = tuple(mult.get(p, 0) for p in range(1, n + 1))
        for x, character in ((EElement.e_t(n), "r+"), (EElement.kappa_e_t(n), "r-")):
            v = eps(e_mul(ze, x))
            if v:
                terms.append(Term(character, derivs, (v * prefactor,)))
    return PseudoTraceExpr(n, tuple(terms))


def _poly_value(poly: Sequence[ExactScalar], tau: complex) -> complex:
    return sum((complex(c) * tau ** k for k, c in enumerate(poly)), 0j)


def pseudo_trace_eval(
    e: PseudoTraceExpr,
    tau: complex,
    truncation: int = DEFAULT_TRUNCATION,
    im_guard: float = IM_GUARD,
) -> complex:
    tau = _check_tau(tau, im_guard)
    values: Dict[Tuple[str, int], complex] = {}
    total = 0j
    for (character, derivs), poly in e.data().items():
        prod = _poly_value(poly, tau)
        for d in derivs:
            if (character, d) not in values:
                values[(character, d)] = evaluate(character_series(character, truncation, d), tau, im_guard)
            prod *= values[(character, d)]
        total += prod
    return total


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class CheckLine:
    name: str
    tau: complex
    deviation: float
    passed: bool

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<40} tau={self.tau.real:+.3f}{self.tau.imag:+.3f}i  rel={self.deviation:.3e}  {status}"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "tau": [self.tau.real, self.tau.imag],
            "deviation": self.deviation,
            "passed": self.passed,
        }


@dataclass
class Report:
    title: str
    lines: List[CheckLine] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(l.passed for l in self.lines)

    @property
    def max_deviation(self) -> float:
        return max((l.deviation for l in self.lines), default=0.0)

    def raise_on_failure(self) -> None:
        for l in self.lines:
            if not l.passed:
                raise ToleranceExceeded(l.name, l.tau, l.deviation)

    def extend(self, other: "Report") -> None:
        self.lines.extend(other.lines)

    def render(self) -> str:
        return "\n".join([self.title] + ["  " + l.render() for l in self.lines])

    def to_json(self) -> dict:
        return {"title": self.title, "passed": self.passed, "lines": [l.to_json() for l in self.lines]}


def relative_deviation(lhs: complex, rhs: complex) -> float:
    diff = abs(lhs - rhs)
    if diff == 0:
        return 0.0
    return diff / abs(rhs) if rhs else diff


def _line(name: str, tau: complex, lhs: complex, rhs: complex, tol: float) -> CheckLine:
    dev = relative_deviation(lhs, rhs)
    return CheckLine(name, complex(tau), dev, bool(dev <= tol))


# chi(-1/tau) = factor(tau) * chi_other(tau)
_CHARACTER_S = (
    ("ns+", "r-", lambda t: 0.5),
    ("ns-", "ns-", lambda t: -1j * t),
    ("r+", "r+", lambda t: 1.0),
    ("r-", "ns+", lambda t: 2.0),
)


def check_character_s(
    taus: Sequence[complex] = DEFAULT_TAUS,
    truncation: int = DEFAULT_TRUNCATION,
    tol: float = 1e-8,
    im_guard: float = IM_GUARD,
) -> Report:
    report = Report("character S-transformation")
    for tau in taus:
        tau = complex(tau)
        for src, dst, factor in _CHARACTER_S:
            lhs = evaluate(character_series(src, truncation), -1 / tau, im_guard)
            rhs = factor(tau) * evaluate(character_series(dst, truncation), tau, im_guard)
            report.lines.append(_line(f"chi_{src}(-1/tau) vs chi_{dst}", tau, lhs, rhs, tol))
    return report


def check_modular_covariance(
    z: ZElement,
    w: Insertion,
    n: Optional[int] = None,
    taus: Sequence[complex] = DEFAULT_TAUS,
    tol: float = 1e-6,
    truncation: int = DEFAULT_TRUNCATION,
    name: Optional[str] = None,
    im_guard: float = IM_GUARD,
) -> Report:
    """tau^-(2r+s) zeta^z(w, -1/tau) against zeta^{S z}(w, tau), both evaluated directly."""
    n = z.n_pairs if n is None else n
    left = pseudo_trace_expr(z, w, n)
    right = pseudo_trace_expr(s_z_tilde(z), w, n)
    name = name or w.label()
    report = Report(f"pseudo-trace covariance {name}")
    for tau in taus:
        tau = complex(tau)
        lhs = tau ** (-w.weight) * pseudo_trace_eval(left, -1 / tau, truncation, im_guard)
        rhs = pseudo_trace_eval(right, tau, truncation, im_guard)
        report.lines.append(_line(name, tau, lhs, rhs, tol))
    return report


def covariance_suite(
    n: int,
    max_rs: int = 2,
    taus: Sequence[complex] = DEFAULT_TAUS,
    tol: float = 1e-6,
    truncation: int = DEFAULT_TRUNCATION,
) -> Report:
    """Every closed-form centre basis element against every valid insertion."""
    from .endalg import center_basis_labels

    basis = center_closed_form(n)
    labels = center_basis_labels(n)
    jobs = [(lab, z, w) for lab, z in zip(labels, basis) for w in valid_insertions(n, max_rs)]

    def run(job):
        lab, z, w = job
        return check_modular_covariance(z, w, n, taus, tol, truncation, name=f"z={lab} {w.label()}")

    report = Report(f"pseudo-trace covariance N={n}, r+s<={max_rs}")
    for r in parallel_map(run, jobs):
        report.extend(r)
    return report


def separation_rank(n: int, max_rs: Optional[int] = None) -> int:
    """Exact rank of z |-> (pseudo-trace data over all insertions with r + s <= max_rs)."""
    max_rs = n if max_rs is None else max_rs
    basis = center_closed_form(n)
    index: Dict[tuple, int] = {}
    columns = []
    for z in basis:
        col = {}
        for w in valid_insertions(n, max_rs):
            for key, poly in pseudo_trace_expr(z, w, n).data().items():
                for power, c in enumerate(poly):
                    if c:
                        row = index.setdefault((w, key, power), len(index))
                        col[row] = c
        columns.append(col)
    # rank of the transpose: one row per basis element
    rows = [{r: linalg.RatFunc(c) for r, c in col.items()} for col in columns]
    return linalg.rank(rows, len(index))
