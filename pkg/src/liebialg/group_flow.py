"""Matrix-group flows and the integrated group 1-cocycle of a bialgebra.

For a path ``X(t)`` in ``g`` the flow ``g' = X(t) g``, ``g(0) = I`` is solved
with classical RK4, and

    Theta(g(1)) = Ad2(g(1)) int_0^1 Ad2(g(t)^-1) delta(X(t)) dt

is evaluated with composite Simpson on the same grid.  ``Theta`` is the
right-trivialized multiplicative bivector; it satisfies
``Theta(gh) = Theta(g) + Ad2(g) Theta(h)`` whenever ``delta`` is a 1-cocycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline, interp1d
from scipy.special import bernoulli, factorial

from .bialgebra import Bialgebra, check_cocycle, dual_bracket
from .lie_core import DEFAULT_TOL, LieAlgebra, StructureError, ad_matrix, jacobiator_tensor
from .report import CheckReport


# --- paths ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlgebraPath:
    """``t in [0, 1] -> coords``; build from a callable or from grid samples."""

    algebra: LieAlgebra
    X: Callable[[float], np.ndarray]
    name: str = ""
    record: Optional[dict] = None

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.X(t), dtype=float)

    def matrix(self, t: float) -> np.ndarray:
        return realize(self.algebra, self(t))

    @classmethod
    def constant(cls, algebra, x, name: str = "") -> "AlgebraPath":
        x = np.array(x, dtype=float)
        return cls(algebra, lambda t: x, name or "constant",
                   {"grid": 2, "samples": [[0.0, *x], [1.0, *x]], "interp": "linear"})

    @classmethod
    def from_samples(cls, algebra, times, samples, interp: str = "cubic", name: str = ""):
        times = np.asarray(times, dtype=float)
        samples = np.asarray(samples, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("a sampled path needs at least 2 grid points")
        if samples.shape != (times.size, algebra.dim):
            raise ValueError(f"samples must be ({times.size}, {algebra.dim}), got {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("path samples must be finite")
        if np.any(np.diff(times) <= 0) or times[0] > 0 or times[-1] < 1:
            raise ValueError("sample times must increase and cover [0, 1]")
        if interp == "cubic" and times.size >= 3:
            f = CubicSpline(times, samples, axis=0)
        elif interp in ("linear", "cubic"):
            f = interp1d(times, samples, axis=0)
        else:
            raise ValueError(f"unknown interpolation {interp!r}")
        record = {"grid": int(times.size), "interp": interp,
                "samples": [[float(t), *map(float, s)] for t, s in zip(times, samples)]}
        return cls(algebra, f, name or "sampled", record)

    def to_json(self) -> dict:
        if self.record is None:
            raise ValueError("callable paths have no file representation; sample them first")
        return dict(self.record)

    @classmethod
    def from_json(cls, algebra, d: dict) -> "AlgebraPath":
        rows = np.asarray(d["samples"], dtype=float)
        if rows.ndim != 2 or rows.shape[1] != algebra.dim + 1:
            raise ValueError("each sample row must be [t, coords...]")
        if "grid" in d and int(d["grid"]) != rows.shape[0]:
            raise ValueError("grid size does not match the number of samples")
        return cls.from_samples(algebra, rows[:, 0], rows[:, 1:], d.get("interp", "cubic"))

    def sampled(self, T: int, interp: str = "cubic") -> "AlgebraPath":
        t = np.linspace(0, 1, T)
        return AlgebraPath.from_samples(self.algebra, t, [self(s) for s in t], interp, self.name)


PathLike = Union[AlgebraPath, Sequence[AlgebraPath]]


def _pieces(path: PathLike) -> List[AlgebraPath]:
    return [path] if isinstance(path, AlgebraPath) else list(path)


def product_path(algebra, B, C) -> AlgebraPath:
    """``X(t) = B + Ad_{exp(tB)} C``, whose flow is ``exp(tB) exp(tC)``."""
    B = np.asarray(B, float)
    C = np.asarray(C, float)
    adB = ad_matrix(algebra, B)
    w, V = np.linalg.eig(adB)
    Vinv = np.linalg.inv(V)

    def X(t):
        return B + (V @ (np.exp(t * w) * (Vinv @ C))).real

    return AlgebraPath(algebra, X, "product")


# --- realizations and adjoint actions ------------------------------------------------

_SOLVERS: dict = {}


def _basis_solver(g: LieAlgebra):
    """``(pinv, flat)`` for the realization, cached per realization array."""
    R = g.realization
    if R is None:
        raise StructureError(f"algebra {g.name!r} has no matrix realization")
    hit = _SOLVERS.get(id(R))
    if hit is None or hit[0] is not R:
        flat = R.reshape(R.shape[0], -1).T
        hit = (R, np.linalg.pinv(flat), flat)
        _SOLVERS[id(R)] = hit
    return hit[1], hit[2]


def realize(g: LieAlgebra, x) -> np.ndarray:
    if g.realization is None:
        raise StructureError(f"algebra {g.name!r} has no matrix realization")
    return np.einsum("i,iab->ab", x, g.realization)


def coords_of(g: LieAlgebra, M: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Basis coordinates of a matrix in the realized span; raises if outside it."""
    pinv, flat = _basis_solver(g)
    v = M.reshape(-1)
    c = pinv @ v
    resid = np.abs(flat @ c - v).max(initial=0.0)
    if resid > tol * max(1.0, np.abs(v).max(initial=0.0)):
        raise StructureError(f"matrix leaves the realized span (residual {resid:.3g})")
    if g.field == "real":
        c = c.real
    return c


def Ad(g: LieAlgebra, G: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Matrix of ``x -> G x G^-1`` in the algebra basis."""
    pinv, flat = _basis_solver(g)
    Ginv = np.linalg.inv(G)
    conj = np.einsum("ab,ibc,cd->iad", G, g.realization, Ginv, optimize=True)
    V = conj.reshape(g.dim, -1).T
    A = pinv @ V
    resid = np.abs(flat @ A - V).max(initial=0.0)
    if resid > tol * max(1.0, np.abs(V).max(initial=0.0)):
        raise StructureError(f"G x G^-1 leaves the realized span (residual {resid:.3g})")
    if g.field == "real":
        if np.iscomplexobj(A) and np.abs(A.imag).max(initial=0.0) > tol:
            raise StructureError("G x G^-1 leaves the real form of the algebra")
        A = A.real
    return A


def Ad2(A: np.ndarray, N: np.ndarray) -> np.ndarray:
    """``Lambda^2 Ad`` on an antisymmetric matrix: ``A N A^T``."""
    return A @ N @ A.T


def Ad3(A: np.ndarray, T: np.ndarray) -> np.ndarray:
    return np.einsum("ai,bj,ck,ijk->abc", A, A, A, T, optimize=True)


def wedge_pairs(n: int):
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def Ad2_matrix(A: np.ndarray) -> np.ndarray:
    """``Lambda^2 A`` on wedge coordinates ``w_ab = N_ab`` (a < b)."""
    pairs = wedge_pairs(A.shape[0])
    M = np.empty((len(pairs), len(pairs)), dtype=A.dtype)
    for r, (c, d) in enumerate(pairs):
        for s, (a, b) in enumerate(pairs):
            M[r, s] = A[c, a] * A[d, b] - A[c, b] * A[d, a]
    return M


def wedge_coords(N: np.ndarray) -> np.ndarray:
    return np.array([N[a, b] for a, b in wedge_pairs(N.shape[0])])


# --- evolution and quadrature ---------------------------------------------------------

def evolve(path: PathLike, steps: int, g0: Optional[np.ndarray] = None) -> np.ndarray:
    """RK4 for ``g' = X(t) g``; returns ``g`` on the grid of every piece, stacked.

    For a single path the result has ``steps + 1`` entries; concatenated pieces
    share endpoints, so ``len = k * steps + 1``.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    pieces = _pieces(path)
    n = pieces[0].algebra.realization.shape[1]
    G = np.eye(n, dtype=complex if pieces[0].algebra.realization.dtype.kind == "c" else float)
    if g0 is not None:
        G = np.array(g0, dtype=np.result_type(g0, G))
    out = [G]
    for p in pieces:
        traj = _rk4(p, steps, out[-1])
        out.extend(traj[1:])
    return np.array(out)


def _rk4(p: AlgebraPath, steps: int, G: np.ndarray) -> List[np.ndarray]:
    h = 1.0 / steps
    traj = [G]
    Xa = p.matrix(0.0)
    for k in range(steps):
        t = k * h
        Xm = p.matrix(t + 0.5 * h)
        Xb = p.matrix(t + h)
        k1 = Xa @ G
        k2 = Xm @ (G + 0.5 * h * k1)
        k3 = Xm @ (G + 0.5 * h * k2)
        k4 = Xb @ (G + h * k3)
        G = G + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        traj.append(G)
        Xa = Xb
    return traj


def simpson_weights(steps: int) -> np.ndarray:
    if steps % 2:
        raise ValueError("composite Simpson needs an even number of steps")
    w = np.ones(steps + 1)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return w / (3.0 * steps)


@dataclass
class CocycleValue:
    """``Theta(g0)`` as an antisymmetric tensor (degree 2 unless stated)."""

    g0: np.ndarray
    value: np.ndarray
    steps: int
    flags: dict = field(default_factory=dict)

    @property
    def wedge(self) -> np.ndarray:
        return wedge_coords(self.value)


def _integrate(path: PathLike, steps: int, cochain, degree: int):
    """``(g_end, Ad^k(g_end) sum_pieces int Ad^k(g^-1) cochain(X) dt)``."""
    pieces = _pieces(path)
    g = pieces[0].algebra
    w = simpson_weights(steps)
    act = Ad2 if degree == 2 else Ad3
    G = None
    acc = None
    for p in pieces:
        traj = _rk4(p, steps, G if G is not None else np.eye(g.realization.shape[1],
                                                              dtype=g.realization.dtype))
        for k, Gk in enumerate(traj):
            val = cochain(p(k / steps))
            term = w[k] * act(Ad(g, np.linalg.inv(Gk)), val)
            acc = term if acc is None else acc + term
        G = traj[-1]
    return G, act(Ad(g, G), acc)


def integrate_cocycle(bi: Bialgebra, path: PathLike, steps: int,
                      tol: float = DEFAULT_TOL) -> CocycleValue:
    g0, theta = _integrate(path, steps, bi.cobracket, 2)
    flags = {}
    if not check_cocycle(bi, tol).passed:
        flags["non_cocycle"] = "delta is not a 1-cocycle; the result depends on the path"
    return CocycleValue(g0, theta, steps, flags)


def theta_identity(n: int) -> np.ndarray:
    """``Theta(e)``: the empty integral."""
    return np.zeros((n, n))


def _order(levels: Sequence[int], residuals: Sequence[float], floor: float = 1e-14):
    """Least-squares order over refinement levels whose residual is above roundoff."""
    pts = [(s, r) for s, r in zip(levels, residuals) if r > floor]
    if len(pts) < 2:
        return None
    x = np.log([s for s, _ in pts])
    y = np.log([r for _, r in pts])
    return float(-np.polyfit(x, y, 1)[0])


def _levels(steps: int, refine: int) -> List[int]:
    """``[..., steps/4, steps/2, steps]``, stopping before an odd count."""
    if steps % 2:
        raise ValueError("composite Simpson needs an even number of steps")
    out = [steps]
    while len(out) < refine and out[0] % 4 == 0:
        out.insert(0, out[0] // 2)
    return out


def path_independence(bi: Bialgebra, path1: PathLike, path2: PathLike, steps: int,
                      tol: float = 1e-6, refine: int = 3) -> CheckReport:
    """``||Theta_1 - Theta_2||`` at ``steps, steps/2, ...`` with the observed order."""
    levels = _levels(steps, refine)
    res, ends = [], []
    for s in levels:
        a = integrate_cocycle(bi, path1, s)
        b = integrate_cocycle(bi, path2, s)
        res.append(float(np.abs(a.value - b.value).max()))
        ends.append(float(np.abs(a.g0 - b.g0).max()))
    info = {"steps": levels, "residuals": res, "observed_order": _order(levels, res),
            "endpoint_mismatch": ends[-1]}
    return CheckReport("path_independence", {"theta_difference": res[-1]}, tol, info=info)


def check_group_cocycle(bi: Bialgebra, pathG: PathLike, pathH: PathLike, steps: int,
                        tol: float = 1e-6, refine: int = 3) -> CheckReport:
    """``Theta(gh) - Theta(g) - Ad2(g) Theta(h)``; ``gh`` flows along ``h`` then ``g``.

    RK4 is linear in the initial value and Simpson is applied piecewise, so the
    discrete scheme satisfies the identity up to roundoff; the reported order is
    ``None`` in that case.
    """
    g = bi.g
    levels = _levels(steps, refine)
    res = []
    for s in levels:
        tg = integrate_cocycle(bi, pathG, s)
        th = integrate_cocycle(bi, pathH, s)
        tgh = integrate_cocycle(bi, _pieces(pathH) + _pieces(pathG), s)
        res.append(float(np.abs(tgh.value - tg.value - Ad2(Ad(g, tg.g0), th.value)).max()))
    info = {"steps": levels, "residuals": res, "observed_order": _order(levels, res)}
    return CheckReport("group_cocycle", {"cocycle_identity": res[-1]}, tol, info=info)


@dataclass
class BivectorValue:
    """``pi(g0)`` stored right-trivialized: ``pi(g0) = sum theta_ab (b_a g0) ^ (b_b g0)``."""

    g0: np.ndarray
    theta: np.ndarray
    right_trivialized: bool = True

    def tangent_frame(self, g: LieAlgebra) -> np.ndarray:
        return np.einsum("iab,bc->iac", g.realization, self.g0)


def bivector_at(bi: Bialgebra, path: PathLike, steps: int) -> BivectorValue:
    v = integrate_cocycle(bi, path, steps)
    return BivectorValue(v.g0, v.value)


def multiplicativity_residual(bi: Bialgebra, path_x: PathLike, path_y: PathLike,
                              steps: int, tol: float = 1e-6) -> CheckReport:
    """``pi(xy) = L_x pi(y) + R_y pi(x)`` in its right-trivialized form."""
    rep = check_group_cocycle(bi, path_x, path_y, steps, tol, refine=1)
    rep.check = "multiplicativity"
    return rep


# --- Jacobiator --------------------------------------------------------------------------

def _dexp_inv(adu: np.ndarray, terms: int = 12) -> np.ndarray:
    """``ad_u / (exp(ad_u) - 1) = sum B_k ad_u^k / k!``."""
    B = bernoulli(terms)
    out = np.zeros_like(adu)
    P = np.eye(adu.shape[0])
    for k in range(terms + 1):
        out = out + (B[k] / factorial(k)) * P
        P = P @ adu
    return out


def b_jacobiator(bi: Bialgebra) -> np.ndarray:
    """``J[i,j,k,m]``: coefficient of ``beta_m`` in ``[e_i,[e_j,e_k]]_b + cyclic``.

    This nesting matches ``{x_i,{x_j,x_k}} + cyclic`` for coordinate functions.
    """
    return -jacobiator_tensor(dual_bracket(bi)[0].structure)


def integrated_jacobiator(bi: Bialgebra, path: PathLike, steps: int) -> np.ndarray:
    """Integrate the degree-3 cocycle ``X -> <X, Jac_b>`` with ``Ad3``."""
    J = b_jacobiator(bi)
    _, val = _integrate(path, steps, lambda x: np.einsum("m,ijkm->ijk", x, J), 3)
    return val


def fd_jacobiator(bi: Bialgebra, path: PathLike, steps: int, h: float = 1e-3,
                  short_steps: int = 8) -> np.ndarray:
    """Jacobiator of ``pi`` at ``g0`` from central differences in the chart ``exp(u) g0``.

    Returned in the right-trivialized frame at ``g0`` (where the chart is the identity).
    """
    g = bi.g
    n = g.dim
    pieces = _pieces(path)
    base_theta = integrate_cocycle(bi, pieces, steps)

    def pi_chart(u):
        # Theta(exp(u) g0) along the path extended by a short constant piece
        tail = AlgebraPath.constant(g, u)
        th = _extend(bi, base_theta, tail, short_steps)
        M = _dexp_inv(ad_matrix(g, u))
        return M @ th @ M.T

    dpi = np.zeros((n, n, n))
    eye = np.eye(n)
    for l in range(n):
        dpi[l] = ((pi_chart(h * eye[l]) - pi_chart(-h * eye[l])) / (2 * h)).real
    P = base_theta.value.real
    t = np.einsum("il,ljk->ijk", P, dpi)
    return t + np.einsum("jki->ijk", t) + np.einsum("kij->ijk", t)


def _extend(bi: Bialgebra, start: CocycleValue, tail: AlgebraPath, steps: int) -> np.ndarray:
    """Continue the path integral of ``start`` along ``tail`` (same formula over the whole path)."""
    g = bi.g
    w = simpson_weights(steps)
    traj = _rk4(tail, steps, start.g0)
    Ginv0 = np.linalg.inv(start.g0)
    acc = Ad2(Ad(g, Ginv0), start.value)  # = int over the first part
    for k, Gk in enumerate(traj):
        acc = acc + w[k] * Ad2(Ad(g, np.linalg.inv(Gk)), bi.cobracket(tail(k / steps)))
    return Ad2(Ad(g, traj[-1]), acc)


def jacobiator_check(bi: Bialgebra, path: PathLike, steps: int, tol: float = 1e-4,
                     h: float = 1e-3, require_zero: bool = False) -> CheckReport:
    """Compare the finite-difference Jacobiator of ``pi`` with the integrated b-Jacobiator.

    The two agree when ``|J_fd - J_alg| <= max(tol, 0.1 |J_alg|)`` in max norm.
    With ``require_zero`` the finite-difference Jacobiator must also vanish
    (``pi`` is Poisson).
    """
    fd = fd_jacobiator(bi, path, steps, h)
    alg = integrated_jacobiator(bi, path, steps).real
    diff = float(np.abs(fd - alg).max())
    scale = float(np.abs(alg).max())
    fd_max = float(np.abs(fd).max())
    info = {"fd_max": fd_max, "algebraic_max": scale,
            "b_jacobiator_max": float(np.abs(b_jacobiator(bi)).max()),
            "relative_difference": diff / scale if scale > 0 else None,
            "vanishes": fd_max <= tol, "h": h, "steps": steps}
    residuals = {"fd_vs_algebraic": diff}
    passed = diff <= max(tol, 0.1 * scale)
    if require_zero:
        residuals["jacobiator"] = fd_max
        passed = passed and fd_max <= tol
    return CheckReport("jacobiator", residuals, tol, passed, info)


def default_paths(g: LieAlgebra, scale: float = 0.6, seed: int = 7):
    """Two smooth seeded paths and a pair of constants ``B, C`` for path-independence tests."""
    rng = np.random.default_rng(seed)
    a, b, c = scale * rng.normal(size=(3, g.dim)) / np.sqrt(g.dim)
    pg = AlgebraPath(g, lambda t: a + np.sin(2 * t) * b, "smooth_g")
    ph = AlgebraPath(g, lambda t: b - t * t * c, "smooth_h")
    return pg, ph, a, c
