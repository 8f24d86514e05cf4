import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liebialg import catalog
from liebialg.bialgebra import Bialgebra, coboundary, dual_bracket
from liebialg.lie_core import AlgebraElement, StructureError, abelian, coad, killing_form
from liebialg.lie_poisson import (
    Multivector, PolyObservable, ad_multivector, check_poisson_axioms, evaluate_field,
    hamiltonian_field, lie_poisson_bracket, schouten, schouten_report, schouten_self,
)

CATALOG = sorted(catalog.BIALGEBRAS)


@pytest.fixture(scope="module")
def bis():
    return {name: catalog.bialgebra(name) for name in CATALOG}


def fd_bracket(f, h, bi, v, eps=1e-4):
    """Oracle: central-difference gradients contracted with the dual bracket at v."""
    n = bi.dim
    eye = np.eye(n)
    df = np.array([(f(v + eps * eye[i]) - f(v - eps * eye[i])) / (2 * eps) for i in range(n)])
    dh = np.array([(h(v + eps * eye[i]) - h(v - eps * eye[i])) / (2 * eps) for i in range(n)])
    b = dual_bracket(bi)[0]
    return v @ np.einsum("a,b,abl->l", df, dh, b.structure)


# --- polynomials ----------------------------------------------------------------------

def test_poly_arithmetic_and_derivative():
    p = PolyObservable(2, {(2, 0): 3.0, (0, 1): -1.0})
    q = PolyObservable(2, {(1, 1): 2.0})
    v = np.array([0.7, -1.3])
    assert np.isclose((p * q)(v), p(v) * q(v))
    assert np.isclose((p - q)(v), p(v) - q(v))
    assert p.partial(0).terms == {(1, 0): 6.0}
    assert (p * q).degree == 4
    assert not (p - p)


def test_poly_rejects_bad_exponents():
    with pytest.raises(StructureError):
        PolyObservable(2, {(1,): 1.0})
    with pytest.raises(StructureError):
        PolyObservable(2, {(-1, 0): 1.0})


def test_quadratic_constructor():
    Q = np.array([[1.0, 2.0], [0.0, -3.0]])
    v = np.array([0.4, 1.1])
    assert np.isclose(PolyObservable.quadratic(Q)(v), v @ Q @ v)


# --- Lie-Poisson bracket ----------------------------------------------------------------

@pytest.mark.parametrize("name", CATALOG)
def test_linear_bracket_is_dual_bracket(bis, name):
    bi = bis[name]
    b = dual_bracket(bi)[0]
    rng = np.random.default_rng(3)
    al, be = rng.normal(size=(2, bi.dim))
    got = lie_poisson_bracket(PolyObservable.linear(al), PolyObservable.linear(be), bi)
    want = np.einsum("a,b,abl->l", al, be, b.structure)
    for v in rng.normal(size=(4, bi.dim)):
        assert abs(got(v) - v @ want) < 1e-12


@pytest.mark.parametrize("name", ["sl2", "m2", "sl2_dual"])
def test_quadratic_bracket_matches_finite_differences(bis, name):
    bi = bis[name]
    rng = np.random.default_rng(11)
    f = PolyObservable.random(bi.dim, 2, rng)
    h = PolyObservable.random(bi.dim, 2, rng)
    br = lie_poisson_bracket(f, h, bi)
    for v in rng.normal(size=(5, bi.dim)):
        assert abs(br(v) - fd_bracket(f, h, bi, v)) < 1e-7


def test_bracket_antisymmetric_and_degree_bound(bis):
    bi = bis["sl3"]
    rng = np.random.default_rng(5)
    f = PolyObservable.random(bi.dim, 2, rng)
    h = PolyObservable.random(bi.dim, 3, rng)
    fh, hf = lie_poisson_bracket(f, h, bi), lie_poisson_bracket(h, f, bi)
    assert (fh + hf).max_coeff() < 1e-12
    assert fh.degree <= f.degree + h.degree - 1


def test_hamiltonian_field_of_linear_is_coadjoint(bis):
    bi = bis["sl2"]
    b = dual_bracket(bi)[0]
    rng = np.random.default_rng(2)
    alpha, v = rng.normal(size=(2, bi.dim))
    X = evaluate_field(hamiltonian_field(PolyObservable.linear(alpha), bi), v)
    assert np.allclose(X, coad(AlgebraElement(b, alpha)) @ v, atol=1e-13)


def test_casimir_on_sl2_dual(bis):
    bi = bis["sl2_dual"]
    b = dual_bracket(bi)[0]
    C = PolyObservable.quadratic(np.linalg.inv(killing_form(b)))
    rng = np.random.default_rng(9)
    for _ in range(5):
        h = PolyObservable.random(3, 3, rng)
        assert lie_poisson_bracket(C, h, bi).max_coeff() < 1e-12
    assert all(not c for c in hamiltonian_field(C, bi))


def test_dimension_mismatch_raises(bis):
    with pytest.raises(StructureError):
        hamiltonian_field(PolyObservable.linear([1.0, 2.0]), bis["sl2"])


@pytest.mark.parametrize("name", CATALOG)
def test_axioms_on_catalog(bis, name):
    rep = check_poisson_axioms(bis[name], degree=2, trials=10, tol=1e-8, seed=0)
    assert rep.passed, rep.residuals
    assert rep.residuals["hamiltonian"] < 1e-9
    assert rep.info["seed"] == 0


def test_axioms_degree_three_sl2(bis):
    assert check_poisson_axioms(bis["sl2"], degree=3, trials=5, seed=1).passed


def test_axioms_deterministic(bis):
    a = check_poisson_axioms(bis["m2"], 2, 3, seed=4).residuals
    b = check_poisson_axioms(bis["m2"], 2, 3, seed=4).residuals
    assert a == b


def test_jacobi_fails_when_b_not_lie():
    rng = np.random.default_rng(8)
    c = rng.normal(size=(4, 4, 4))
    d = np.einsum("abi->iab", c - np.swapaxes(c, 0, 1))
    bi = Bialgebra(abelian(4), d)
    assert dual_bracket(bi)[1].residuals["jacobi"] > 1e-3
    rep = check_poisson_axioms(bi, degree=2, trials=5, seed=0)
    assert rep.residuals["jacobi"] > 1e-3
    assert rep.residuals["leibniz"] < 1e-8
    assert not rep.passed


def test_jacobi_holds_for_coboundary_b():
    g = catalog.gl(2)
    r = np.zeros((4, 4))
    r[1, 2], r[2, 1] = 1.0, -1.0
    bi = Bialgebra(g, coboundary(g, r))
    assert dual_bracket(bi)[1].passed
    assert check_poisson_axioms(bi, degree=2, trials=5).passed


# --- multivectors and Schouten ----------------------------------------------------------

def test_wedge_matches_antisymmetrized_tensor():
    rng = np.random.default_rng(0)
    x, y, z = rng.normal(size=(3, 4))
    assert np.allclose(Multivector.wedge(x, y).components, np.outer(x, y) - np.outer(y, x))
    t = np.einsum("i,j,k->ijk", x, y, z)
    anti = sum(np.sign(np.linalg.det(np.eye(3)[list(p)])) * np.transpose(t, p)
               for p in itertools.permutations(range(3)))
    assert np.allclose(Multivector.wedge(x, y, z).components, anti)
    assert Multivector.wedge(x, y, z).antisymmetry_residual() < 1e-14


def test_terms_round_trip():
    rng = np.random.default_rng(1)
    m = Multivector.wedge(*rng.normal(size=(2, 4)))
    back = Multivector.from_terms(4, 2, m.terms())
    assert np.allclose(back.components, m.components)


def test_wedge_repeated_vector_vanishes():
    x = np.array([1.0, 2.0, 0.5])
    assert np.abs(Multivector.wedge(x, x).components).max() == 0


def test_schouten_vectors_is_lie_bracket():
    g = catalog.sl3()
    rng = np.random.default_rng(4)
    x, y = rng.normal(size=(2, 8))
    s = schouten(Multivector(8, 1, x), Multivector(8, 1, y), g)
    assert np.allclose(s.components, g.bracket_coords(x, y), atol=1e-13)


def test_schouten_with_vector_is_minus_ad():
    g = catalog.sl3()
    rng = np.random.default_rng(6)
    A = Multivector.wedge(*rng.normal(size=(2, 8))) + Multivector.wedge(*rng.normal(size=(2, 8)))
    y = rng.normal(size=8)
    # oracle: slot-wise ad via explicit einsum
    ad_y = np.einsum("i,ijk->kj", y, g.structure)
    want = -(ad_y @ A.components + A.components @ ad_y.T)
    got = schouten(A, Multivector(8, 1, y), g).components
    assert np.allclose(got, want, atol=1e-12)
    assert np.allclose(ad_multivector(g, y, A).components, -want, atol=1e-12)


def decomposable_oracle(xs, ys, g):
    """Oracle: sum (-1)^(i+j) [x_i, y_j] ^ (xs without i) ^ (ys without j) on vectors."""
    n = g.dim
    k, l = len(xs), len(ys)
    out = np.zeros((n,) * (k + l - 1))
    for i, j in itertools.product(range(k), range(l)):
        vec = g.bracket_coords(xs[i], ys[j])
        rest = xs[:i] + xs[i + 1:] + ys[:j] + ys[j + 1:]
        out = out + (-1) ** (i + j) * Multivector.wedge(vec, *rest).components
    return out


@pytest.mark.parametrize("k,l", [(1, 2), (2, 2), (2, 3), (3, 1)])
def test_schouten_matches_decomposable_oracle(k, l):
    g = catalog.sl3()
    rng = np.random.default_rng(10 * k + l)
    xs = list(rng.normal(size=(k, 8)))
    ys = list(rng.normal(size=(l, 8)))
    got = schouten(Multivector.wedge(*xs), Multivector.wedge(*ys), g).components
    assert np.allclose(got, decomposable_oracle(xs, ys, g), atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3))
def test_graded_antisymmetry(seed, k, l):
    g = catalog.gl(2)
    rng = np.random.default_rng(seed)
    a = Multivector.wedge(*rng.normal(size=(k, 4)))
    b = Multivector.wedge(*rng.normal(size=(l, 4)))
    ab, ba = schouten(a, b, g).components, schouten(b, a, g).components
    assert np.abs(ab + (-1) ** ((k - 1) * (l - 1)) * ba).max(initial=0) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_graded_jacobi_112(seed):
    g = catalog.sl3()
    rng = np.random.default_rng(seed)
    a = Multivector(8, 1, rng.normal(size=8))
    b = Multivector(8, 1, rng.normal(size=8))
    c = Multivector.wedge(*rng.normal(size=(2, 8))) + Multivector.wedge(*rng.normal(size=(2, 8)))
    degs = {id(a): 1, id(b): 1, id(c): 2}
    total = np.zeros((8, 8))
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        sign = (-1) ** ((degs[id(x)] - 1) * (degs[id(z)] - 1))
        total = total + sign * schouten(x, schouten(y, z, g), g).components
    assert np.abs(total).max() < 1e-12


def test_sl2_EF_H_matches_expansion_oracle():
    g = catalog.sl2()  # basis H, E, F
    H, E, F = np.eye(3)
    got = schouten(Multivector.wedge(E, F), Multivector(3, 1, H), g).components
    want = decomposable_oracle([E, F], [H], g)
    assert np.allclose(got, want, atol=1e-14)
    # [E,H]^F - [F,H]^E = -2 E^F - 2 F^E = 0
    assert np.abs(got).max() < 1e-14


def test_self_bracket_solvable_plane_vanishes():
    g = catalog.upper_triangular2()
    x, y = np.eye(g.dim)[:2]
    assert np.allclose(g.bracket_coords(x, y) - np.linalg.lstsq(np.array([x, y]).T,
                       g.bracket_coords(x, y), rcond=None)[0] @ np.array([x, y]), 0)
    assert np.abs(schouten_self(Multivector.wedge(x, y), g).components).max() < 1e-14


def test_self_bracket_zero_for_zero_and_xx():
    g = catalog.sl2()
    assert np.abs(schouten_self(Multivector(3, 2, np.zeros((3, 3))), g).components).max() == 0
    x = np.array([0.3, 1.0, -2.0])
    y = np.array([1.0, 0.0, 0.5])
    assert np.abs(schouten(Multivector.wedge(x, x), Multivector(3, 1, y), g).components).max() == 0


def test_standard_r_matrix_self_bracket_nonzero_but_invariant():
    g = catalog.sl2()
    H, E, F = np.eye(3)
    rep = schouten_report(Multivector.wedge(E, F), g)
    assert rep.residuals["schouten"] > 1.0
    assert rep.residuals["ad_invariance"] < 1e-13
    # a generic bivector is not invariant
    rng = np.random.default_rng(0)
    gen = schouten_report(Multivector.wedge(*rng.normal(size=(2, 3))) + Multivector.wedge(H, E), g)
    assert gen.residuals["schouten"] > 1e-3


def test_self_bracket_rejects_non_bivector():
    with pytest.raises(StructureError):
        schouten_self(Multivector(3, 1, np.ones(3)), catalog.sl2())
