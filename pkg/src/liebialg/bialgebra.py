"""Finite-dimensional Lie bialgebras and their Manin doubles.

The cobracket is a tensor ``d[i, a, b]`` with
``delta(X)(alpha, beta) = sum X^i alpha_a beta_b d[i, a, b]`` (all ``a, b``,
antisymmetric, no 1/2).  As a matrix, ``delta(X) = sum_i X^i d[i]`` and the
adjoint action on such matrices is ``ad2_X N = A N + N A^T`` with ``A = ad(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .lie_core import DEFAULT_TOL, LieAlgebra, StructureError, ad_matrix, check_jacobi
from .report import CheckReport
from .torus_weight import ManinError, ManinTriple


@dataclass(frozen=True, eq=False)
class Bialgebra:
    """``(g, b, delta)``; ``b`` is read off from ``delta`` so duality holds by construction."""

    g: LieAlgebra
    delta: np.ndarray
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.array(self.delta)
        n = self.g.dim
        if d.shape != (n, n, n):
            raise StructureError(f"cobracket must be ({n}, {n}, {n}), got {d.shape}")
        if not np.all(np.isfinite(d)):
            raise StructureError("cobracket entries must be finite")
        if np.iscomplexobj(d) and np.abs(d.imag).max(initial=0) == 0:
            d = d.real
        d.setflags(write=False)
        object.__setattr__(self, "delta", d)

    @property
    def dim(self) -> int:
        return self.g.dim

    @property
    def b(self) -> LieAlgebra:
        return dual_bracket(self)[0]

    def cobracket(self, x) -> np.ndarray:
        """``delta(x)`` as an antisymmetric matrix."""
        return np.einsum("i,iab->ab", x, self.delta)

    def evaluate(self, x, alpha, beta):
        return alpha @ self.cobracket(x) @ beta


def ad2(g: LieAlgebra, x, N: np.ndarray) -> np.ndarray:
    A = ad_matrix(g, x)
    return A @ N + N @ A.T


def cocycle_defect(g: LieAlgebra, d: np.ndarray) -> np.ndarray:
    """``delta([b_i,b_j]) - ad2_{b_i} delta(b_j) + ad2_{b_j} delta(b_i)`` for all ``i, j``."""
    c = g.structure
    ads = np.einsum("ijk->ikj", c)
    t1 = np.einsum("ijk,kab->ijab", c, d)
    act = np.einsum("iac,jcb->ijab", ads, d) + np.einsum("jac,ibc->ijab", d, ads)
    return t1 - act + np.swapaxes(act, 0, 1)


def check_cocycle(bi: Bialgebra, tol: float = DEFAULT_TOL) -> CheckReport:
    d = bi.delta
    res = {
        "cocycle": float(np.abs(cocycle_defect(bi.g, d)).max(initial=0.0)),
        "antisymmetry": float(np.abs(d + np.swapaxes(d, 1, 2)).max(initial=0.0)),
    }
    return CheckReport("cocycle", res, tol)


def dual_bracket(bi: Bialgebra, tol: float = DEFAULT_TOL):
    """``(b, report)`` with ``c_b[a, b, i] = d[i, a, b]``; the report is b's Jacobi check."""
    c = np.einsum("iab->abi", bi.delta)
    field_ = "complex" if np.iscomplexobj(c) else "real"
    labels = tuple(f"{l}*" for l in bi.g.labels)
    b = LieAlgebra(c, labels, None, field_, None, f"{bi.name or bi.g.name}_dual")
    rep = check_jacobi(b, tol)
    rep.check = "cojacobi"
    return b, rep


def check_bialgebra(bi: Bialgebra, tol: float = DEFAULT_TOL) -> CheckReport:
    """Jacobi of g, co-Jacobi, antisymmetry and the cocycle condition in one report."""
    cj = dual_bracket(bi, tol)[1]
    cc = check_cocycle(bi, tol)
    res = {"jacobi_g": check_jacobi(bi.g, tol).residuals["jacobi"],
           "cojacobi": cj.residuals["jacobi"], **cc.residuals}
    return CheckReport("bialgebra", res, tol)


def _dual_p2_basis(t: ManinTriple, tol: float):
    P, Q, Om = t.p1, t.p2, t.pairing
    if P.shape[1] != Q.shape[1]:
        raise ManinError("p1 and p2 have different dimensions")
    G = P.T @ Om @ Q
    sig = np.linalg.svd(G, compute_uv=False)
    if sig.size == 0 or sig.min() <= tol:
        raise ManinError(f"cross pairing p1 x p2 is degenerate (sigma_min = {sig.min(initial=0):.3g})")
    return Q @ np.linalg.inv(G), float(np.linalg.cond(G))


def from_manin(t: ManinTriple, tol: float = DEFAULT_TOL) -> Bialgebra:
    """Bialgebra on ``p1`` with ``delta(X)(alpha, beta) = <<X, [alpha, beta]>>``.

    ``p2`` is identified with the dual of ``p1`` through the pairing: basis
    vector ``a`` of the dual corresponds to ``Qt[:, a]`` with ``<<P_i, Qt_a>> = delta_ia``.
    """
    d_alg, P, Om = t.double, t.p1, t.pairing
    Qt, cond = _dual_p2_basis(t, tol)
    c = d_alg.structure
    br_p = np.einsum("ia,jb,ijk->abk", P, P, c, optimize=True)
    c_g = np.einsum("abk,kl,lc->abc", br_p, Om, Qt, optimize=True)
    br_q = np.einsum("ia,jb,ijk->abk", Qt, Qt, c, optimize=True)
    delta = np.einsum("ki,kl,abl->iab", P, Om, br_q, optimize=True)
    src = t.weighting.algebra if t.weighting is not None else None
    labels = src.labels if src is not None and src.dim == P.shape[1] else ()
    form = src.form if src is not None and src.dim == P.shape[1] else None
    field_ = "complex" if np.iscomplexobj(c_g) and np.abs(c_g.imag).max(initial=0) > 0 else "real"
    if field_ == "real":
        c_g = np.real(c_g)
    g = LieAlgebra(c_g, labels, form, field_, t.p1_realization, t.name)
    meta = {"cross_gram_condition": cond, "source": t.name}
    return Bialgebra(g, delta, t.name, meta)


def _double_structure(bi: Bialgebra) -> np.ndarray:
    n = bi.dim
    cg = bi.g.structure
    cb = np.einsum("iab->abi", bi.delta)
    dtype = np.result_type(cg, cb)
    c = np.zeros((2 * n,) * 3, dtype=dtype)
    c[:n, :n, :n] = cg
    c[n:, n:, n:] = cb
    mixed_g = np.einsum("akI->Iak", cb)  # [e_I, f_a] -> e_k with c_b[a, k, I]
    mixed_b = -np.einsum("IjA->IAj", cg)  # [e_I, f_A] -> f_j with -c_g[I, j, A]
    c[:n, n:, :n] = mixed_g
    c[:n, n:, n:] = mixed_b
    c[n:, :n, :] = -np.swapaxes(c[:n, n:, :], 0, 1)
    return c


def to_manin(bi: Bialgebra, tol: float = DEFAULT_TOL) -> ManinTriple:
    """Double ``g (+) b`` with pairing ``<(x, alpha), (y, beta)> = beta(x) + alpha(y)``.

    The double's Jacobi residual is stored in ``meta['jacobi']``; it vanishes
    exactly when the input is a bialgebra.
    """
    n = bi.dim
    c = _double_structure(bi)
    pairing = np.zeros((2 * n, 2 * n))
    pairing[:n, n:] = np.eye(n)
    pairing[n:, :n] = np.eye(n)
    labels = bi.g.labels + tuple(f"{l}*" for l in bi.g.labels)
    field_ = "complex" if np.iscomplexobj(c) else "real"
    double = LieAlgebra(c, labels, pairing, field_, None, f"D({bi.name or bi.g.name})")
    eye = np.eye(2 * n)
    jac = check_jacobi(double, tol)
    return ManinTriple(double, eye[:, :n], eye[:, n:], pairing, bi.g.realization, None,
                       double.name, {"jacobi": jac.to_dict()})


def transport(c: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Structure constants in the basis given by the columns of ``M``."""
    Minv = np.linalg.inv(M)
    return np.einsum("iu,jv,ijk,wk->uvw", M, M, c, Minv, optimize=True)


def canonical_basis(t: ManinTriple, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Columns ``[P | Qt]``: the identification used by ``from_manin``."""
    Qt, _ = _dual_p2_basis(t, tol)
    return np.hstack([t.p1, Qt])


def round_trip_residual(t: ManinTriple, tol: float = DEFAULT_TOL) -> CheckReport:
    """Compare ``t``'s double with ``to_manin(from_manin(t))`` after identification."""
    rebuilt = to_manin(from_manin(t, tol), tol)
    M = canonical_basis(t, tol)
    c_t = transport(t.double.structure, M)
    form_t = M.T @ t.pairing @ M
    res = {"structure": float(np.abs(c_t - rebuilt.double.structure).max(initial=0.0)),
           "pairing": float(np.abs(form_t - rebuilt.pairing).max(initial=0.0))}
    return CheckReport("round_trip", res, tol)


def morphism_check(src: Bialgebra, dst: Bialgebra, phi, tol: float = DEFAULT_TOL) -> CheckReport:
    """``delta_2(phi X)(alpha, beta) = delta_1(X)(phi^T alpha, phi^T beta)`` on basis elements."""
    phi = np.asarray(phi)
    if phi.shape != (dst.dim, src.dim):
        raise StructureError(f"phi must be ({dst.dim}, {src.dim}), got {phi.shape}")
    c1, c2 = src.g.structure, dst.g.structure
    lhs = np.einsum("ijk,lk->ijl", c1, phi)
    rhs = np.einsum("ai,bj,abl->ijl", phi, phi, c2, optimize=True)
    hom = float(np.abs(lhs - rhs).max(initial=0.0))
    if hom > tol:
        return CheckReport("morphism", {"homomorphism": hom}, tol, False,
                           {"note": "phi is not a Lie algebra homomorphism; compatibility skipped"})
    left = np.einsum("ki,kab->iab", phi, dst.delta)
    right = np.einsum("ac,icd,bd->iab", phi, src.delta, phi, optimize=True)
    comp = float(np.abs(left - right).max(initial=0.0))
    return CheckReport("morphism", {"homomorphism": hom, "compatibility": comp}, tol)


def coboundary(g: LieAlgebra, r: np.ndarray) -> np.ndarray:
    """Cobracket ``delta(X) = ad2_X r`` of an antisymmetric ``r``; always a 1-cocycle."""
    ads = np.einsum("ijk->ikj", g.structure)
    return np.einsum("iac,cb->iab", ads, r) + np.einsum("ac,ibc->iab", r, ads)


def cotangent(g: LieAlgebra) -> Bialgebra:
    """``delta = 0``; the double is ``g`` semidirect its dual."""
    return Bialgebra(g, np.zeros((g.dim,) * 3), f"{g.name}_cotangent")


def dual_of(b: LieAlgebra, g: Optional[LieAlgebra] = None) -> Bialgebra:
    """Abelian ``g`` (or a supplied one) with ``b`` as the dual bracket."""
    if g is None:
        from .lie_core import abelian

        g = abelian(b.dim)
    delta = np.einsum("abi->iab", b.structure)
    return Bialgebra(g, delta, f"{b.name}_dual")
