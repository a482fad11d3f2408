"""Acceptance gate: one recorded PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also collected into the terminal summary of every pytest run.
"""

import json
import random
import time
from fractions import Fraction

from verlinde_lab import cli, endalg, qseries, smod, verlinde
from verlinde_lab.endalg import EElement, ZElement, center_brute_force, center_closed_form, e_mul, same_span
from verlinde_lab.exterior import ExtElement, even_masks, popcount, wedge
from verlinde_lab.scalars import ONE, PI, ZERO, ExactScalar

SEED = 20240601


def test_1_fusion_ring(capsys, record_acceptance):
    start = time.perf_counter()
    failures = []
    for n in (1, 2, 3, 4):
        code = cli.main(["fusion", "sf", "--pairs", str(n), "--output", "json"])
        table = json.loads(capsys.readouterr().out)["table"]
        big = 2 ** (2 * n - 1)
        expected = {
            "Pi1,Pi1": [1, 0, 0, 0],
            "Pi1,T": [0, 0, 0, 1],
            "Pi1,PiT": [0, 0, 1, 0],
            "T,T": [big, big, 0, 0],
            "T,PiT": [big, big, 0, 0],
            "PiT,T": [big, big, 0, 0],
            "PiT,PiT": [big, big, 0, 0],
        }
        if code != 0 or any(table[k] != v for k, v in expected.items()):
            failures.append(n)
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 5
    record_acceptance(1, "fusion ring reproduction N=1..4", ok, f"{elapsed:.2f}s, failing N: {failures or 'none'}")
    assert ok


def test_2_s_matrix_structure(record_acceptance):
    problems = []
    for n in (1, 2, 3):
        m = smod.sp_block(n)
        p, h, q = ExactScalar.monomial(2 ** n), ExactScalar.monomial(Fraction(1, 2)), ExactScalar.monomial(Fraction(1, 2 ** (n + 1)))
        if m != [[ZERO, p, -p], [q, h, h], [-q, h, h]]:
            problems.append(f"S_P entries N={n}")
        if smod.mat_mul(m, m) != [[ONE if i == j else ZERO for j in range(3)] for i in range(3)]:
            problems.append(f"S_P^2 N={n}")
        for mask in even_masks(n):
            x = ExtElement(n, {mask: ONE})
            if smod.s_lambda(smod.s_lambda(x)) != x:
                problems.append(f"S_Lambda^2 N={n} mask {mask:b}")
        image = smod.s_z_tilde(endalg.phi_irr(n)["1"]).to_e()
        expected = EElement.lam(ExtElement.scalar(n, (PI * 2) ** (-n))) + EElement.e_t(n).scale(Fraction(1, 2 ** n))
        if image != expected:
            problems.append(f"S(c_1) N={n}")
    ok = not problems
    record_acceptance(2, "S-matrix structure (S_P entries, S_P^2, S_Lambda^2, S(c_1))", ok, "; ".join(problems) or "exact")
    assert ok


def test_3_y_oracle(record_acceptance):
    start = time.perf_counter()
    mismatches = []
    for n in (1, 2):
        for mask in even_masks(n):
            x = ExtElement(n, {mask: ONE})
            if smod.y_oracle(x) != smod.s_lambda(x):
                mismatches.append((n, mask))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 10
    record_acceptance(3, "y-oracle equals sigma^N on Z_Lambda, N=1,2", ok, f"{elapsed:.2f}s, mismatches {len(mismatches)}")
    assert ok


def test_4_centre_dimension(record_acceptance):
    dims = []
    ok = True
    for n, expected in ((1, 5), (2, 11), (3, 35)):
        closed = center_closed_form(n)
        brute = center_brute_force(n)
        dims.append(len(brute))
        ok &= len(closed) == len(brute) == expected and same_span([z.to_e() for z in closed], brute)
    record_acceptance(4, "centre dimension closed form vs brute force", ok, f"dims {dims}")
    assert ok


def test_5_character_covariance(record_acceptance):
    qseries.character_series.cache_clear()
    start = time.perf_counter()
    rep = qseries.check_character_s(qseries.DEFAULT_TAUS, truncation=400, tol=1e-8)
    elapsed = time.perf_counter() - start
    ok = rep.passed and elapsed < 2
    record_acceptance(5, "character S-identities at default tau, tol 1e-8", ok, f"max rel {rep.max_deviation:.2e}, {elapsed:.2f}s")
    assert ok


def test_6_pseudo_trace_covariance(record_acceptance):
    start = time.perf_counter()
    reports = [qseries.covariance_suite(n, 2, qseries.DEFAULT_TAUS, 1e-6, 400) for n in (1, 2)]
    elapsed = time.perf_counter() - start
    count = sum(len(r.lines) for r in reports)
    worst = max(r.max_deviation for r in reports)
    ok = all(r.passed for r in reports) and elapsed < 60
    record_acceptance(6, "pseudo-trace covariance N=1,2, r+s<=2, tol 1e-6", ok, f"{count} checks, max rel {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_7_semisimple_round_trip(record_acceptance):
    worst = 0.0
    ok = True
    for ring in (verlinde.fibonacci_ring(), verlinde.ising_ring(), verlinde.cyclic_ring(5)):
        table = verlinde.fusion_semisimple(verlinde.smatrix_from_fusion_ring(ring, seed=SEED))
        worst = max(worst, table.max_deviation)
        ok &= table.n_abc == ring.n_abc
    ok &= worst < 1e-9
    record_acceptance(7, "semisimple Verlinde round trip (Fibonacci, Ising, Z_5)", ok, f"max deviation {worst:.2e}")
    assert ok


def test_8_separation_rank(record_acceptance):
    ranks = {n: qseries.separation_rank(n) for n in (1, 2)}
    ok = all(r == endalg.center_dim(n) for n, r in ranks.items())
    record_acceptance(8, "separation rank equals dim Z(E), N=1,2", ok, f"ranks {ranks}")
    assert ok


# -- criterion 9: seeded randomized property suites -------------------------


def _rand_scalar(rng):
    return ExactScalar({rng.randint(-1, 1): Fraction(rng.randint(-3, 3), rng.randint(1, 3))})


def _rand_ext(rng, n, degree=None, terms=3):
    masks = range(1 << (2 * n))
    if degree is not None:
        masks = [m for m in masks if popcount(m) == degree]
    return ExtElement(n, {rng.choice(list(masks)): _rand_scalar(rng) for _ in range(terms)})


def _rand_e(rng, n):
    return EElement(n, _rand_ext(rng, n), _rand_ext(rng, n), _rand_scalar(rng), _rand_scalar(rng))


def _graded_commutativity(rng):
    for _ in range(40):
        n = rng.randint(1, 2)
        da, db = rng.randint(0, 2 * n), rng.randint(0, 2 * n)
        a, b = _rand_ext(rng, n, da), _rand_ext(rng, n, db)
        if wedge(a, b) != wedge(b, a).scale(-1 if da * db % 2 else 1):
            return False
    return True


def _e_mul_associativity(rng):
    for _ in range(40):
        n = rng.randint(1, 2)
        a, b, c = (_rand_e(rng, n) for _ in range(3))
        if e_mul(e_mul(a, b), c) != e_mul(a, e_mul(b, c)):
            return False
    return True


def _hs_trace_properties(rng):
    n = 1
    dim = endalg.e_dim(n)
    reg = endalg.regular_module(n)
    eps = endalg.eps_form(n)
    ident = endalg.identity(dim)
    for _ in range(3):
        f = endalg.right_mul_matrix(n, _rand_e(rng, n))
        g = endalg.right_mul_matrix(n, _rand_e(rng, n))
        t = lambda h: endalg.hs_trace(eps, reg, 1, ident, ident, h)
        if t(endalg.matmul(f, g)) != t(endalg.matmul(g, f)):
            return False
        w = rng.randint(2, 3)
        big = endalg.kron_identity(f, w)
        if endalg.partial_trace(big, dim, w) != [[c * w for c in row] for row in f]:
            return False
        big_ident = endalg.identity(dim * w)
        if endalg.hs_trace(eps, reg.tensor_space(w), w, big_ident, big_ident, big) != t(endalg.partial_trace(big, dim, w)):
            return False
    return True


def _fusion_associativity(rng):
    return all(verlinde.fusion_sf(n).is_associative() for n in (1, 2, 3, 4))


def _hat_iso_round_trips(rng):
    for n in (1, 2):
        eps = endalg.eps_form(n)
        basis = center_closed_form(n)
        for _ in range(4):
            z = ZElement.zero(n)
            for b in basis:
                c = rng.randint(-2, 2)
                if c:
                    z = z + b.scale(c)
            if endalg.hat_iso_inv(endalg.hat_iso(z, eps), eps) != z:
                return False
    return True


def test_9_property_suites(record_acceptance):
    suites = {
        "graded commutativity": _graded_commutativity,
        "e_mul associativity": _e_mul_associativity,
        "hs_trace cyclicity and partial trace": _hs_trace_properties,
        "fusion associativity": _fusion_associativity,
        "hat_iso round trips": _hat_iso_round_trips,
    }
    results = {name: fn(random.Random(SEED)) for name, fn in suites.items()}
    ok = all(results.values())
    failed = [k for k, v in results.items() if not v]
    record_acceptance(9, "seeded property suites", ok, f"seed {SEED}; failed: {failed or 'none'}")
    assert ok
