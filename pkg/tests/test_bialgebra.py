import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liebialg import catalog
from liebialg.bialgebra import (
    Bialgebra, ad2, canonical_basis, check_bialgebra, check_cocycle, coboundary, cotangent,
    dual_bracket, from_manin, morphism_check, round_trip_residual, to_manin,
)
from liebialg.lie_core import abelian, check_jacobi, coad
from liebialg.loop_fourier import WittBase, loop_manin
from liebialg.torus_weight import (
    ManinError, ManinTriple, TorusWeighting, TraceState, build_double_manin, verify_manin,
)


def double_of(name, weights=None):
    g = catalog.algebra(name)
    w = TorusWeighting(g, catalog.DEFAULT_WEIGHTS[name] if weights is None else weights)
    return build_double_manin(w, TraceState(g))


def brute_cocycle(bi):
    """Oracle: evaluate the cocycle identity on dual basis pairs one at a time."""
    g, n = bi.g, bi.dim
    eye = np.eye(n)
    worst = 0.0
    for i in range(n):
        for j in range(n):
            X, Y = eye[i], eye[j]
            XY = g.bracket_coords(X, Y)
            for a in range(n):
                for b in range(n):
                    al, be = eye[a], eye[b]
                    # ad2_X eta(alpha, beta) = eta(coad_X alpha, beta) + eta(alpha, coad_X beta)
                    cX, cY = coad(g.element(X)), coad(g.element(Y))
                    lhs = bi.evaluate(XY, al, be)
                    rhs = (bi.evaluate(Y, cX @ al, be) + bi.evaluate(Y, al, cX @ be)
                           - bi.evaluate(X, cY @ al, be) - bi.evaluate(X, al, cY @ be))
                    worst = max(worst, abs(lhs - rhs))
    return worst


def test_zero_cobracket_is_cocycle():
    bi = cotangent(catalog.sl2())
    assert check_cocycle(bi).max_residual == 0.0
    b, rep = dual_bracket(bi)
    assert not b.structure.any() and rep.passed


@pytest.mark.parametrize("name", ["m2", "sl2", "sl3", "m3"])
def test_from_manin_gives_bialgebra(name):
    bi = from_manin(double_of(name))
    rep = check_bialgebra(bi, tol=1e-12)
    assert rep.passed, rep.to_dict()
    if bi.dim <= 4:
        assert brute_cocycle(bi) < 1e-12


def test_cocycle_matches_brute_force_oracle():
    rng = np.random.default_rng(0)
    g = catalog.sl2()
    d = rng.normal(size=(3, 3, 3))
    d = d - np.swapaxes(d, 1, 2)
    bi = Bialgebra(g, d)
    assert check_cocycle(bi).residuals["cocycle"] == pytest.approx(brute_cocycle(bi))


def test_from_manin_g_is_the_original_algebra():
    t = double_of("m2")
    bi = from_manin(t)
    np.testing.assert_allclose(bi.g.structure, catalog.gl(2).structure, atol=1e-14)
    assert bi.g.realization is not None


def test_perturbed_cobracket_detected():
    bi = from_manin(double_of("m2"))
    d = np.array(bi.delta)
    d[0, 1, 2] += 0.1
    d[0, 2, 1] -= 0.1
    rep = check_cocycle(Bialgebra(bi.g, d))
    assert rep.residuals["cocycle"] >= 0.05
    d2 = np.array(bi.delta)
    d2[0, 1, 2] += 0.1  # breaks antisymmetry only
    assert check_cocycle(Bialgebra(bi.g, d2)).residuals["antisymmetry"] == pytest.approx(0.1)


def _p2_structure_in_dual_basis(t):
    """Oracle: bracket p2 vectors in the double, solve for coordinates by least squares."""
    P, Q, Om = t.p1, t.p2, t.pairing
    Qt = Q @ np.linalg.inv(P.T @ Om @ Q)
    n = Qt.shape[1]
    out = np.zeros((n, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            v = t.double.bracket_coords(Qt[:, a], Qt[:, b])
            out[a, b], *_ = np.linalg.lstsq(Qt, v, rcond=None)
    return out


@pytest.mark.parametrize("make", [lambda: double_of("m2"), lambda: loop_manin(WittBase(), 2)],
                         ids=["m2", "witt2"])
def test_dual_bracket_reproduces_p2_bracket(make):
    t = make()
    b, _ = dual_bracket(from_manin(t))
    assert np.abs(b.structure - _p2_structure_in_dual_basis(t)).max() < 1e-12


def test_degenerate_cross_pairing_refused():
    t = double_of("m2")
    bad = ManinTriple(t.double, t.p1, t.p1, t.pairing)
    with pytest.raises(ManinError, match="degenerate"):
        from_manin(bad)


def test_abelian_p2_gives_zero_delta():
    g = catalog.sl2()
    t = to_manin(cotangent(g))
    assert not from_manin(t).delta.any()


@pytest.mark.parametrize("name", ["m2", "sl2", "sl3"])
def test_round_trip_structure_constants(name):
    rep = round_trip_residual(double_of(name))
    assert rep.max_residual < 1e-12


@pytest.mark.parametrize("name", sorted(catalog.BIALGEBRAS))
def test_catalog_doubles_are_manin_and_lie(name):
    bi = catalog.bialgebra(name)
    assert check_bialgebra(bi).passed
    t = to_manin(bi)
    assert t.meta["jacobi"]["pass"]
    assert verify_manin(t).passed


def test_to_manin_of_non_cocycle_fails_jacobi():
    bi = from_manin(double_of("m2"))
    d = np.array(bi.delta)
    d[0, 1, 2] += 0.1
    d[0, 2, 1] -= 0.1
    t = to_manin(Bialgebra(bi.g, d))
    assert t.meta["jacobi"]["residuals"]["jacobi"] > 1e-3
    assert not t.meta["jacobi"]["pass"]


def test_cotangent_double_is_semidirect_product():
    g = catalog.heisenberg3()
    t = to_manin(cotangent(g))
    n = g.dim
    eye = np.eye(n)
    # independent construction: [(x, a), (y, b)] = ([x, y], -coad(x) b + coad(y) a)
    for i in range(2 * n):
        for j in range(2 * n):
            u, v = np.eye(2 * n)[i], np.eye(2 * n)[j]
            x, a, y, b = u[:n], u[n:], v[:n], v[n:]
            expect = np.concatenate([g.bracket_coords(x, y),
                                     -coad(g.element(x)) @ b + coad(g.element(y)) @ a])
            np.testing.assert_array_equal(t.double.bracket_coords(u, v), expect)
    assert check_jacobi(t.double).max_residual == 0.0


def test_morphism_identity_zero_and_conjugation():
    bi = from_manin(double_of("m2"))
    n = bi.dim
    assert morphism_check(bi, bi, np.eye(n)).max_residual == 0.0
    assert morphism_check(bi, bi, np.zeros((n, n))).max_residual == 0.0
    # Ad(diag(s, t)) scales E_ij by s_i / s_j
    s = np.array([2.0, 0.5])
    phi = np.diag([s[i] / s[j] for i in range(2) for j in range(2)])
    assert morphism_check(bi, bi, phi).passed


def test_morphism_non_homomorphism_skips_compatibility():
    bi = from_manin(double_of("m2"))
    phi = np.eye(4)
    phi[0, 1] = 1.0
    rep = morphism_check(bi, bi, phi)
    assert not rep.passed and "compatibility" not in rep.residuals


def test_morphism_detects_incompatible_weight_swap():
    # transpose-like automorphism x -> -x^T is a homomorphism but flips weights
    bi = from_manin(double_of("m2"))
    perm = {0: 0, 1: 2, 2: 1, 3: 3}
    phi = np.zeros((4, 4))
    for i, j in perm.items():
        phi[j, i] = -1.0
    rep = morphism_check(bi, bi, phi)
    assert rep.residuals["homomorphism"] == 0.0
    assert rep.residuals["compatibility"] > 0.1


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_random_weighted_doubles_give_bialgebras(seed, n):
    rng = np.random.default_rng(seed)
    k = rng.choice(np.arange(-3, 4), size=n, replace=False)
    t = double_of(f"m{n}", catalog.diagonal_weights(k))
    assert verify_manin(t).passed
    bi = from_manin(t)
    assert check_cocycle(bi).passed
    assert dual_bracket(bi)[1].passed
    assert round_trip_residual(t).max_residual < 1e-10


def test_coboundary_is_cocycle_and_ad2_matches():
    g = catalog.gl(2)
    rng = np.random.default_rng(3)
    r = rng.normal(size=(4, 4))
    r = r - r.T
    d = coboundary(g, r)
    assert check_cocycle(Bialgebra(g, d)).max_residual < 1e-12
    x = rng.normal(size=4)
    np.testing.assert_allclose(Bialgebra(g, d).cobracket(x), ad2(g, x, r), atol=1e-12)


def test_sl2_dual_has_sl2_bracket():
    bi = catalog.sl2_dual()
    np.testing.assert_array_equal(bi.b.structure, catalog.sl2().structure)
    assert not bi.g.structure.any()
    assert check_cocycle(bi).passed


def test_canonical_basis_pairs_to_standard_form():
    t = double_of("sl3")
    M = canonical_basis(t)
    n = 8
    form = M.T @ t.pairing @ M
    np.testing.assert_allclose(form, np.block([[np.zeros((n, n)), np.eye(n)],
                                               [np.eye(n), np.zeros((n, n))]]), atol=1e-12)
