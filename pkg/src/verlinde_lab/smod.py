"""Modular S-action on the centre Z(E) = Z_Lambda (+) Z_P.

Two transports of the same modular transformation live here:

* ``s_z_tilde`` -- the action seen through eps, i.e. on elements z whose
  pseudo-trace function is built from eps(z * -).  This is the map that the
  q-series covariance checks compare against.
* ``s_z`` -- the action seen through delta = eps(S~(c_1) * -), which is the
  one that enters the fusion-rule computation.  The two differ by conjugation
  with multiplication by u = (2 pi)^N 1_Lambda + 2^N e_T.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Sequence, Tuple

from . import linalg
from .endalg import EElement, ZElement, e_mul, eps_form, phi_irr
from .exterior import ExtElement, gamma, monomial_from_indices, wedge
from .scalars import I, ONE, PI, ZERO, ExactScalar, as_scalar

__all__ = [
    "OddInput",
    "NonUniqueSolution",
    "Inconsistent",
    "sigma_matrix",
    "sigma_inverse",
    "sp_block",
    "s_lambda",
    "s_lambda_inv",
    "s_p",
    "s_z_tilde",
    "s_z_tilde_inv",
    "s_z",
    "s_z_inv",
    "delta_unit",
    "phi_basis",
    "y_oracle",
]


class OddInput(ValueError):
    pass


class NonUniqueSolution(ArithmeticError):
    pass


class Inconsistent(ArithmeticError):
    pass


Mat = List[List[ExactScalar]]

HALF = ExactScalar.monomial(Fraction(1, 2))
MINUS_TWO_PI = PI * -2


def sigma_matrix() -> Mat:
    """Representing matrix on Lambda(C^2) in the basis (1, b1, b2, b2 b1); columns are images."""
    z = ZERO
    return [
        [z, z, z, MINUS_TWO_PI.inv()],
        [z, -I, z, z],
        [z, z, -I, z],
        [MINUS_TWO_PI, z, z, z],
    ]


def _mat_inverse(m: Mat) -> Mat:
    d = len(m)
    cols = []
    for k in range(d):
        e = [ONE if i == k else ZERO for i in range(d)]
        cols.append(linalg.solve_scalar(m, e))
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def sigma_inverse() -> Mat:
    return _mat_inverse(sigma_matrix())


def mat_mul(a: Mat, b: Mat) -> Mat:
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)), ZERO) for j in range(m)] for i in range(n)]


def sp_block(n: int) -> Mat:
    """3x3 block on Z_P in the basis (z1, z2, z3); columns are images."""
    p = ExactScalar.monomial(Fraction(2) ** n)
    q = ExactScalar.monomial(Fraction(1, 2 ** (n + 1)))
    return [
        [ZERO, p, -p],
        [q, HALF, HALF],
        [-q, HALF, HALF],
    ]


# The block bits of one pair index the basis (1, b1, b2, b2 b1) directly, up to
# the sign of the last one: the canonical alpha^{2n-1} alpha^{2n} equals -b2 b1.
_BLOCK_SIGN = (1, 1, 1, -1)


def _factorwise(x: ExtElement, mat: Mat) -> ExtElement:
    n = x.n_pairs
    out: Dict[int, ExactScalar] = {}
    for mask, coeff in x.items():
        partial: Dict[int, ExactScalar] = {0: coeff}
        for pair in range(n):
            k = (mask >> (2 * pair)) & 3
            images = []
            for row in range(4):
                v = mat[row][k]
                if v:
                    images.append((row << (2 * pair), v if _BLOCK_SIGN[k] * _BLOCK_SIGN[row] > 0 else -v))
            nxt: Dict[int, ExactScalar] = {}
            for m0, c0 in partial.items():
                for b, v in images:
                    key = m0 | b
                    val = c0 * v
                    nxt[key] = nxt[key] + val if key in nxt else val
            partial = nxt
        for m, c in partial.items():
            out[m] = out[m] + c if m in out else c
    return ExtElement(n, out)


def s_lambda(z: ExtElement) -> ExtElement:
    """sigma (x) ... (x) sigma restricted to the even part of Lambda(h)."""
    if not z.is_even():
        raise OddInput("S on Z_Lambda needs an even element")
    return _factorwise(z, sigma_matrix())


def s_lambda_inv(z: ExtElement) -> ExtElement:
    if not z.is_even():
        raise OddInput("S on Z_Lambda needs an even element")
    return _factorwise(z, sigma_inverse())


def s_p(coords: Sequence, n: int) -> Tuple[ExactScalar, ExactScalar, ExactScalar]:
    m = sp_block(n)
    v = [as_scalar(c) for c in coords]
    return tuple(sum((m[i][j] * v[j] for j in range(3)), ZERO) for i in range(3))


def s_z_tilde(z: ZElement) -> ZElement:
    return ZElement(s_lambda(z.z_lambda), s_p(z.z_p, z.n_pairs))


def s_z_tilde_inv(z: ZElement) -> ZElement:
    # the Z_P block squares to the identity
    return ZElement(s_lambda_inv(z.z_lambda), s_p(z.z_p, z.n_pairs))


def delta_unit(n: int, inverse: bool = False) -> EElement:
    """u = (2 pi)^N 1_Lambda + 2^N e_T, the element with hat_delta^{-1} o hat_eps = u * (-)."""
    k = -n if inverse else n
    two_pi = (PI * 2) ** k
    two = ExactScalar.monomial(Fraction(2) ** k)
    return EElement(n, ExtElement.scalar(n, two_pi), None, two, ZERO)


def _times(u: EElement, z: ZElement) -> ZElement:
    return ZElement.from_e(e_mul(u, z.to_e()), check=False)


def s_z(z: ZElement) -> ZElement:
    """S on Z(E) transported with delta."""
    n = z.n_pairs
    return _times(delta_unit(n), s_z_tilde(_times(delta_unit(n, inverse=True), z)))


def s_z_inv(z: ZElement) -> ZElement:
    n = z.n_pairs
    return _times(delta_unit(n), s_z_tilde_inv(_times(delta_unit(n, inverse=True), z)))


def phi_basis(n: int) -> Dict[str, ZElement]:
    """phi_U = u * c_U, the preimages of the irreducible forms under hat_delta."""
    u = delta_unit(n)
    return {label: _times(u, c) for label, c in phi_irr(n).items()}


# --------------------------------------------------------------------------
# brute-force oracle from the necessary conditions on y


def _admissible_insertions(n: int):
    """(J, L) with J free of complete pairs and L a set of pairs disjoint from [J]."""
    for choice in product(range(3), repeat=n):
        j = []
        for pair, c in enumerate(choice, start=1):
            if c == 1:
                j.append(2 * pair - 1)
            elif c == 2:
                j.append(2 * pair)
        used = {pair for pair, c in enumerate(choice, start=1) if c}
        free = [p for p in range(1, n + 1) if p not in used]
        for r in range(len(free) + 1):
            for ls in combinations(free, r):
                yield tuple(j), ls


def _alpha_word(n: int, j: Sequence[int]) -> ExtElement:
    sign, mask = monomial_from_indices(j)
    return ExtElement(n, {mask: ExactScalar.monomial(sign)} if sign else {})


def _gamma_word(n: int, pairs: Sequence[int]) -> ExtElement:
    out = ExtElement.scalar(n)
    for p in pairs:
        out = wedge(out, gamma(n, p))
    return out


def y_oracle(z: ExtElement, max_pairs: int = 2) -> ExtElement:
    """Solve eps(y kappa a^J g_L) = eps(z kappa a^J (-i)^s (-2pi)^(N-2r-s) prod_{j not in L,[J]} g_j)."""
    n = z.n_pairs
    if n > max_pairs:
        raise ValueError(f"y_oracle enumerates all index sets; limited to N <= {max_pairs}")
    if not z.is_even():
        raise OddInput("y_oracle needs an even element")
    eps = eps_form(n)
    masks = list(range(1 << (2 * n)))
    kappa = EElement.kappa(n)
    zk = e_mul(EElement.lam(z), kappa)
    rows, rhs = [], []
    for j, ls in _admissible_insertions(n):
        aj = _alpha_word(n, j)
        r, s = len(ls), len(j)
        probe = EElement.lam(wedge(aj, _gamma_word(n, ls)))
        row = {}
        for idx, m in enumerate(masks):
            v = eps(e_mul(e_mul(EElement.lam(ExtElement(n, {m: ONE})), kappa), probe))
            if v:
                row[idx] = linalg.RatFunc(v)
        covered = {(k + 1) // 2 for k in j} | set(ls)
        rest = [p for p in range(1, n + 1) if p not in covered]
        factor = (-I) ** s * MINUS_TWO_PI ** (n - 2 * r - s)
        target = eps(e_mul(zk, EElement.lam(wedge(aj, _gamma_word(n, rest))))) * factor
        rows.append(row)
        rhs.append(linalg.RatFunc(target) if target else None)
    try:
        sol = linalg.solve(rows, rhs, len(masks))
    except linalg.InconsistentSystem as exc:
        raise Inconsistent(str(exc)) from exc
    except linalg.UnderdeterminedSystem as exc:
        raise NonUniqueSolution(str(exc)) from exc
    return ExtElement(n, {masks[i]: v.to_scalar() for i, v in enumerate(sol) if v is not None})


def s_matrix_on_center(n: int, transport: str = "delta") -> List[Dict[int, ExactScalar]]:
    """Columns of S on the closed-form centre basis as sparse coordinate dicts."""
    from .endalg import center_closed_form

    fn = s_z if transport == "delta" else s_z_tilde
    return [fn(z).vector() for z in center_closed_form(n)]
