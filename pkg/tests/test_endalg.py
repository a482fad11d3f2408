import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import central_elements, e_elements
from verlinde_lab import endalg
from verlinde_lab.endalg import (
    EElement,
    ZElement,
    center_brute_force,
    center_closed_form,
    center_dim,
    e_mul,
    eps_form,
    hat_iso,
    hat_iso_inv,
    hs_trace,
    identity,
    is_central,
    kron_identity,
    partial_trace,
    regular_module,
    right_mul_matrix,
    same_span,
)
from verlinde_lab.exterior import ExtElement, generator, parity_involution, top_form
from verlinde_lab.scalars import ONE, ExactScalar


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 2).flatmap(lambda n: st.tuples(e_elements(n), e_elements(n), e_elements(n))))
def test_e_mul_associative(triple):
    a, b, c = triple
    assert e_mul(e_mul(a, b), c) == e_mul(a, e_mul(b, c))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 2).flatmap(e_elements))
def test_unit(a):
    one = EElement.unit(a.n_pairs)
    assert e_mul(one, a) == a == e_mul(a, one)


def test_relations():
    n = 1
    k = EElement.kappa(n)
    a1 = EElement.lam(generator(n, 1))
    # kappa squares to the unit of the untwisted block
    assert e_mul(k, k) == EElement.lam(ExtElement.scalar(n))
    assert e_mul(e_mul(k, a1), k) == -a1
    # E_0 and E_1 annihilate each other
    assert not e_mul(a1, EElement.e_t(n)) and not e_mul(EElement.e_t(n), a1)
    assert e_mul(EElement.e_t(n), EElement.e_t(n)) == EElement.e_t(n)
    assert e_mul(EElement.kappa_e_t(n), EElement.kappa_e_t(n)) == EElement.e_t(n)


@given(st.integers(1, 2).flatmap(e_elements))
def test_kappa_conjugation_is_parity(a):
    lam = EElement.lam(a.u_plus)
    k = EElement.kappa(a.n_pairs)
    assert e_mul(e_mul(k, lam), k) == EElement.lam(parity_involution(a.u_plus))


@pytest.mark.parametrize("n,dim", [(1, 5), (2, 11), (3, 35)])
def test_centre_closed_form_matches_brute_force(n, dim):
    closed = center_closed_form(n)
    brute = center_brute_force(n)
    assert len(closed) == center_dim(n) == dim
    assert len(brute) == dim
    assert same_span([z.to_e() for z in closed], brute)


def test_brute_force_refuses_large_n():
    with pytest.raises(ValueError):
        center_brute_force(4)


def test_non_central_element_is_rejected():
    with pytest.raises(endalg.NotCentral):
        ZElement.from_e(EElement.lam(generator(1, 1)))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 2).flatmap(central_elements))
def test_centre_closed_under_product(z):
    w = center_closed_form(z.n_pairs)[-2]
    assert is_central(e_mul(z.to_e(), w.to_e()))


@pytest.mark.parametrize("n", [1, 2])
def test_eps_is_central_and_nondegenerate(n):
    eps = eps_form(n)
    assert eps.is_central()
    assert eps.is_nondegenerate()
    assert eps(EElement.lam_kappa(top_form(n))) == ONE
    assert eps(EElement.kappa_e_t(n)) == ONE


def test_degenerate_form_is_reported():
    zero_form = endalg.CentralForm(1, {})
    with pytest.raises(endalg.NonDegenerateRequired):
        hat_iso_inv(zero_form, zero_form)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 2).flatmap(central_elements))
def test_hat_iso_round_trip(z):
    eps = eps_form(z.n_pairs)
    assert hat_iso_inv(hat_iso(z, eps), eps) == z


def test_phi_irr_forms_are_central():
    for c in endalg.phi_irr(2).values():
        assert hat_iso(c, eps_form(2)).is_central()


# -- Hattori-Stallings trace on the regular module, N = 1 ---------------------

N1 = 1
DIM1 = endalg.e_dim(N1)


@pytest.fixture(scope="module")
def reg():
    return regular_module(N1)


def test_regular_module_is_a_module(reg):
    assert reg.check_homomorphism()


def _random_e(rng, n):
    coords = {i: ExactScalar.monomial(rng.randint(-2, 2)) for i in rng.sample(range(endalg.e_dim(n)), 4)}
    return EElement.from_coords(n, coords)


@pytest.mark.parametrize("seed", range(4))
def test_hs_trace_of_right_multiplication_is_the_form(reg, seed):
    rng = random.Random(seed)
    c = _random_e(rng, N1)
    f = right_mul_matrix(N1, c)
    assert reg.is_module_map(f)
    eps = eps_form(N1)
    assert hs_trace(eps, reg, 1, identity(DIM1), identity(DIM1), f) == eps(c)


@pytest.mark.parametrize("seed", range(4))
def test_hs_trace_cyclicity(reg, seed):
    rng = random.Random(seed)
    f = right_mul_matrix(N1, _random_e(rng, N1))
    g = right_mul_matrix(N1, _random_e(rng, N1))
    eps = eps_form(N1)
    fg = endalg.matmul(f, g)
    gf = endalg.matmul(g, f)
    t = lambda h: hs_trace(eps, reg, 1, identity(DIM1), identity(DIM1), h)
    assert t(fg) == t(gf)


@pytest.mark.parametrize("seed", range(3))
def test_hs_trace_independent_of_presentation(reg, seed):
    # cover E (x) C^2 -> E projecting onto the first copy
    rng = random.Random(seed)
    f = right_mul_matrix(N1, _random_e(rng, N1))
    pi = endalg.zeros(DIM1, 2 * DIM1)
    iota = endalg.zeros(2 * DIM1, DIM1)
    for a in range(DIM1):
        pi[a][2 * a] = ONE
        iota[2 * a][a] = ONE
    eps = eps_form(N1)
    small = hs_trace(eps, reg, 1, identity(DIM1), identity(DIM1), f)
    assert hs_trace(eps, reg, 2, pi, iota, f) == small


def test_bad_section_is_rejected(reg):
    with pytest.raises(endalg.SectionInvalid):
        hs_trace(eps_form(N1), reg, 1, identity(DIM1), endalg.zeros(DIM1, DIM1), identity(DIM1))


@pytest.mark.parametrize("w", [1, 2, 3])
def test_partial_trace_and_multiplicity(reg, w):
    rng = random.Random(w)
    g = right_mul_matrix(N1, _random_e(rng, N1))
    big = kron_identity(g, w)
    assert partial_trace(big, DIM1, w) == [[c * w for c in row] for row in g]
    module = reg.tensor_space(w)
    assert module.is_module_map(big)
    eps = eps_form(N1)
    lhs = hs_trace(eps, module, w, identity(DIM1 * w), identity(DIM1 * w), big)
    rhs = hs_trace(eps, reg, 1, identity(DIM1), identity(DIM1), partial_trace(big, DIM1, w))
    assert lhs == rhs
