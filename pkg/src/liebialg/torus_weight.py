"""Integer weight gradings and the weight-space Manin triple on ``g (+) g``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .lie_core import DEFAULT_TOL, LieAlgebra, StructureError, check_form_invariance, direct_sum
from .report import CheckReport


class ManinError(ValueError):
    """Construction refused: the hypotheses of the weight-space triple fail."""


@dataclass(frozen=True, eq=False)
class TorusWeighting:
    algebra: LieAlgebra
    weights: tuple

    def __post_init__(self):
        w = tuple(int(m) for m in self.weights)
        if len(w) != self.algebra.dim:
            raise StructureError(f"{len(w)} weights for an algebra of dim {self.algebra.dim}")
        object.__setattr__(self, "weights", w)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.weights)

    def indices(self, pred) -> list:
        return [i for i, m in enumerate(self.weights) if pred(m)]


def check_weighting(w: TorusWeighting, tol: float = DEFAULT_TOL) -> CheckReport:
    """Residuals for ``[g_m, g_n] in g_{m+n}`` and ``[h, h] = 0``."""
    c = w.algebra.structure
    m = w.array
    wrong = (m[:, None, None] + m[None, :, None]) != m[None, None, :]
    grading = float(np.abs(np.where(wrong, c, 0)).max(initial=0.0))
    zero = w.indices(lambda k: k == 0)
    zero_mode = float(np.abs(c[np.ix_(zero, zero)]).max(initial=0.0)) if zero else 0.0
    return CheckReport("weighting", {"grading": grading, "zero_mode_abelian": zero_mode}, tol)


def projections(w: TorusWeighting):
    """``(pi0, P+, P-)`` as diagonal 0/1 matrices in the algebra basis."""
    m = w.array
    return (np.diag((m == 0).astype(float)), np.diag((m > 0).astype(float)),
            np.diag((m < 0).astype(float)))


def split(u, v, w: TorusWeighting):
    """Decompose ``(u, v) = (a, a) + (x, y)`` with ``(x, y)`` in the second summand.

    Accepts coordinate arrays or ``AlgebraElement``s and returns coordinate arrays.
    """
    u = np.asarray(getattr(u, "coords", u))
    v = np.asarray(getattr(v, "coords", v))
    pi0, pp, pm = projections(w)
    a = pp @ v + 0.5 * (pi0 @ (u + v)) + pm @ u
    x = pp @ (u - v) + 0.5 * (pi0 @ (u - v))
    y = 0.5 * (pi0 @ (v - u)) + pm @ (v - u)
    return a, x, y


@dataclass(frozen=True, eq=False)
class TraceState:
    """Normalized trace ``tr(a)/n`` on a matrix realization of an algebra."""

    algebra: LieAlgebra
    realization: np.ndarray = None

    def __post_init__(self):
        r = self.realization if self.realization is not None else self.algebra.realization
        if r is None:
            raise StructureError("trace state needs a matrix realization")
        object.__setattr__(self, "realization", np.asarray(r))

    @property
    def n(self) -> int:
        return self.realization.shape[1]

    def __call__(self, a) -> complex:
        return np.trace(a) / self.n

    def gram(self) -> np.ndarray:
        """``omega(b_i b_j)``."""
        R = self.realization
        G = np.einsum("iab,jba->ij", R, R) / self.n
        return G.real if np.abs(G.imag).max(initial=0) == 0 else G

    def check(self, w: Optional[TorusWeighting] = None, tol: float = DEFAULT_TOL) -> CheckReport:
        R = self.realization
        G = np.einsum("iab,jba->ij", R, R) / self.n
        tracial = np.abs(G - G.T).max(initial=0.0)
        star = np.einsum("iba,jba->ij", R.conj(), R) / self.n  # omega(b_i^* b_j)
        eig_min = float(np.linalg.eigvalsh(0.5 * (star + star.conj().T)).min())
        res = {"tracial": tracial}
        if w is not None:
            traces = np.array([self(r) for r in R])
            res["torus_invariance"] = float(np.abs(traces[w.array != 0]).max(initial=0.0))
        return CheckReport("trace_state", res, tol, passed=None if eig_min > tol else False,
                           info={"faithful_min_eigenvalue": eig_min})


@dataclass(frozen=True, eq=False)
class ManinTriple:
    """A double with two complementary isotropic subalgebras.

    ``p1`` and ``p2`` hold basis vectors as columns in double coordinates.
    ``p1_realization`` is carried along when ``p1`` is a diagonal copy of a
    matrix algebra, so the group code can rebuild ``Ad`` later.
    """

    double: LieAlgebra
    p1: np.ndarray
    p2: np.ndarray
    pairing: np.ndarray
    p1_realization: Optional[np.ndarray] = None
    weighting: Optional[TorusWeighting] = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def dims(self):
        return self.double.dim, self.p1.shape[1], self.p2.shape[1]

    def pair(self, u, v):
        return u @ self.pairing @ v


def weight_space_manin(w: TorusWeighting, form: np.ndarray, name: str = "",
                       p1_realization=None) -> ManinTriple:
    """Double ``g (+) g`` with pairing ``B(a, x) - B(a', y)``."""
    g = w.algebra
    zero = w.indices(lambda m: m == 0)
    zm = np.abs(g.structure[np.ix_(zero, zero)]).max(initial=0.0) if zero else 0.0
    if zm > DEFAULT_TOL:
        raise ManinError(f"zero-weight subspace is not abelian (max |[h, h]| = {zm:.3g})")
    B = np.asarray(form)
    n = g.dim
    d = direct_sum(g.with_form(None), g.with_form(None), name=f"{g.name}+{g.name}")
    pairing = np.zeros((2 * n, 2 * n), dtype=B.dtype)
    pairing[:n, :n] = B
    pairing[n:, n:] = -B
    double = LieAlgebra(d.structure, d.labels, pairing, d.field, None, d.name)
    eye = np.eye(n)
    p1 = np.vstack([eye, eye])
    cols = []
    for i, m in enumerate(w.weights):
        if m > 0:
            cols.append(np.concatenate([eye[i], np.zeros(n)]))
        elif m < 0:
            cols.append(np.concatenate([np.zeros(n), eye[i]]))
        else:
            cols.append(np.concatenate([eye[i], -eye[i]]))
    p2 = np.array(cols).T
    return ManinTriple(double, p1, p2, pairing, p1_realization, w, name or g.name)


def build_double_manin(w: TorusWeighting, state: Union[TraceState, np.ndarray, None] = None
                       ) -> ManinTriple:
    """Weight-space Manin triple from a trace state, an explicit form, or ``algebra.form``."""
    g = w.algebra
    if isinstance(state, TraceState):
        rep = state.check(w)
        if not rep.passed:
            raise ManinError(f"trace state is not tracial/faithful/invariant: {rep.to_dict()}")
        B = state.gram()
        real = state.realization
    elif state is None:
        if g.form is None:
            raise ManinError("no trace state and no invariant form on the algebra")
        B = g.form
        real = g.realization
    else:
        B = np.asarray(state)
        real = g.realization
    return weight_space_manin(w, B, p1_realization=real)


def _orth_basis(P: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(P)
    return q


def closure_residual(double: LieAlgebra, P: np.ndarray) -> float:
    """Max distance from ``span(P)`` of brackets of basis columns of ``P``."""
    if P.shape[1] == 0:
        return 0.0
    Q = _orth_basis(P)
    br = np.einsum("ia,jb,ijk->kab", P, P, double.structure, optimize=True)
    br = br.reshape(double.dim, -1)
    out = br - Q @ (Q.conj().T @ br)
    return float(np.abs(out).max(initial=0.0))


def verify_manin(t: ManinTriple, tol: float = DEFAULT_TOL) -> CheckReport:
    """Subalgebra closure, isotropy, invariance and direct-sum nondegeneracy."""
    d = t.double
    n, k1, k2 = t.dims
    Om = t.pairing
    res = {
        "closure_p1": closure_residual(d, t.p1),
        "closure_p2": closure_residual(d, t.p2),
        "isotropy_p1": float(np.abs(t.p1.T @ Om @ t.p1).max(initial=0.0)),
        "isotropy_p2": float(np.abs(t.p2.T @ Om @ t.p2).max(initial=0.0)),
        "symmetry": float(np.abs(Om - Om.T).max(initial=0.0)),
        "invariance": check_form_invariance(d, Om).residuals["invariance"],
    }
    M = np.hstack([t.p1, t.p2])
    info = {"dims": [n, k1, k2]}
    if M.shape != (n, n):
        res["reconstruction"] = float("inf")
        sigma_min = 0.0
    else:
        coef = np.linalg.solve(M, np.eye(n))
        res["reconstruction"] = float(np.abs(M @ coef - np.eye(n)).max(initial=0.0))
        cross = t.p1.T @ Om @ t.p2
        sigma_min = float(np.linalg.svd(cross, compute_uv=False).min())
        info["condition"] = float(np.linalg.cond(M))
    info["gram_sigma_min"] = sigma_min
    passed = all(v <= tol for v in res.values()) and sigma_min > tol
    return CheckReport("manin", res, tol, passed, info)
