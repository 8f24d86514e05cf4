"""Loop algebras on Fourier modes, quadrature projections and decay fits.

A loop element is a finite map ``m -> coefficient vector``.  The coefficient
space and its bracket/pairing come from a ``LoopBase``:

* ``PointwiseBase`` wraps a finite-dimensional algebra (loops ``S^1 -> g``);
* ``WittBase`` is the one-dimensional fibre of vector fields ``f(theta) d/dtheta``
  where ``[e_m, e_n] = i (m - n) e_{m+n}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from .lie_core import LieAlgebra, StructureError
from .torus_weight import ManinError, ManinTriple, TorusWeighting, weight_space_manin


class NyquistError(ValueError):
    """Requested mode is not resolved by the sample grid."""


class LoopBase:
    dim: int
    name: str

    def bracket(self, x, y, m: int, n: int) -> np.ndarray:
        raise NotImplementedError

    def pair(self, x, y) -> complex:
        raise NotImplementedError

    def realize(self, coords) -> np.ndarray:
        """Value of a coefficient at one point (matrix if a realization exists)."""
        return np.asarray(coords)


@dataclass(frozen=True, eq=False)
class PointwiseBase(LoopBase):
    algebra: LieAlgebra
    form: Optional[np.ndarray] = None

    @property
    def dim(self):
        return self.algebra.dim

    @property
    def name(self):
        return self.algebra.name

    @property
    def pairing_form(self) -> np.ndarray:
        B = self.form if self.form is not None else self.algebra.form
        if B is None:
            raise StructureError("loop pairing needs an invariant form on the base")
        return np.asarray(B)

    def bracket(self, x, y, m=0, n=0):
        return np.einsum("i,j,ijk->k", x, y, self.algebra.structure)

    def pair(self, x, y):
        return x @ self.pairing_form @ y

    def realize(self, coords):
        R = self.algebra.realization
        if R is None:
            return np.asarray(coords)
        return np.einsum("i,iab->ab", coords, R)


@dataclass(frozen=True, eq=False)
class WittBase(LoopBase):
    dim: int = 1
    name: str = "witt"

    def bracket(self, x, y, m, n):
        return 1j * (m - n) * x * y

    def pair(self, x, y):
        return complex(x[0] * y[0])


@dataclass(frozen=True, eq=False)
class LoopElement:
    base: LoopBase
    modes: Dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, c in self.modes.items():
            c = np.asarray(c, dtype=complex)
            if c.shape != (self.base.dim,):
                raise StructureError(f"mode {m}: coefficient shape {c.shape}, base dim {self.base.dim}")
            clean[int(m)] = c
        object.__setattr__(self, "modes", clean)

    @classmethod
    def single(cls, base, m: int, coords) -> "LoopElement":
        return cls(base, {m: np.atleast_1d(np.asarray(coords, dtype=complex))})

    @property
    def support(self) -> tuple:
        return tuple(sorted(m for m, c in self.modes.items() if np.any(c != 0)))

    @property
    def bound(self) -> int:
        return max((abs(m) for m in self.support), default=0)

    def coeff(self, m: int) -> np.ndarray:
        return self.modes.get(m, np.zeros(self.base.dim, complex))

    def _check(self, other):
        if other.base is not self.base:
            raise StructureError("loop elements over different bases")

    def __add__(self, other):
        self._check(other)
        out = dict(self.modes)
        for m, c in other.modes.items():
            out[m] = out.get(m, 0) + c
        return LoopElement(self.base, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, s):
        return LoopElement(self.base, {m: s * c for m, c in self.modes.items()})

    __rmul__ = __mul__

    def is_real(self, tol: float = 1e-12) -> bool:
        """Coefficient at ``-m`` is the conjugate of the one at ``m``."""
        return all(np.abs(self.coeff(-m) - np.conj(c)).max() <= tol for m, c in self.modes.items())

    def evaluate(self, theta) -> np.ndarray:
        """Values ``sum_m e^{i m theta} realize(c_m)`` at each angle (leading axis)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = None
        for m, c in self.modes.items():
            v = self.base.realize(c)
            term = np.exp(1j * m * theta).reshape((-1,) + (1,) * v.ndim) * v
            out = term if out is None else out + term
        if out is None:
            shape = np.shape(self.base.realize(np.zeros(self.base.dim)))
            out = np.zeros((theta.size,) + shape, complex)
        return out

    def sample(self, S: int) -> "SampledLoop":
        return SampledLoop(self.evaluate(grid(S)))


def loop_bracket(a: LoopElement, b: LoopElement) -> LoopElement:
    """Mode-graded bracket; supports add, nothing is truncated."""
    a._check(b)
    out: Dict[int, np.ndarray] = {}
    for m, x in a.modes.items():
        for n, y in b.modes.items():
            v = a.base.bracket(x, y, m, n)
            out[m + n] = out.get(m + n, 0) + v
    return LoopElement(a.base, out)


def loop_pairing(a: LoopElement, b: LoopElement) -> complex:
    """``(1/2pi) int <a(t), b(t)> dt`` computed exactly as ``sum_m <a_m, b_{-m}>``."""
    a._check(b)
    return complex(sum(a.base.pair(x, b.coeff(-m)) for m, x in a.modes.items()))


def grid(S: int) -> np.ndarray:
    return 2 * np.pi * np.arange(S) / S


@dataclass(frozen=True, eq=False)
class SampledLoop:
    """Values on the uniform grid ``theta_j = 2 pi j / S`` (leading axis)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim < 1 or v.shape[0] < 2:
            raise ValueError("a sampled loop needs at least 2 grid points")
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, f, S: int) -> "SampledLoop":
        return cls(np.array([f(t) for t in grid(S)]))

    @property
    def S(self) -> int:
        return self.values.shape[0]

    @property
    def theta(self) -> np.ndarray:
        return grid(self.S)

    @property
    def nyquist(self) -> int:
        return (self.S - 1) // 2


def _check_nyquist(s: SampledLoop, m: int):
    if abs(m) > s.nyquist:
        raise NyquistError(f"mode {m} exceeds the bound {s.nyquist} for {s.S} samples")


def fourier_project(s: SampledLoop, m: int) -> np.ndarray:
    """Trapezoid rule for ``(1/2pi) int e^{-imt} s(t) dt``."""
    _check_nyquist(s, m)
    w = np.exp(-1j * m * s.theta) / s.S
    return np.tensordot(w, s.values, axes=(0, 0))


def _spectrum(s: SampledLoop) -> tuple:
    c = np.fft.fft(s.values, axis=0) / s.S
    freqs = np.fft.fftfreq(s.S, 1.0 / s.S)
    return c, freqs


def to_loop(s: SampledLoop, N: int, base: LoopBase, algebra_realization=None) -> LoopElement:
    """Project modes ``|m| <= N`` back to coefficient vectors (vector-valued samples)."""
    modes = {}
    for m in range(-N, N + 1):
        c = fourier_project(s, m)
        if algebra_realization is not None:
            R = np.asarray(algebra_realization)
            c, *_ = np.linalg.lstsq(R.reshape(R.shape[0], -1).T, c.ravel(), rcond=None)
        modes[m] = c
    return LoopElement(base, modes)


def derivative(s: SampledLoop, j: int = 1) -> SampledLoop:
    """Spectral ``d^j/dt^j``; exact for band-limited samples below Nyquist."""
    c, freqs = _spectrum(s)
    k = freqs.copy()
    if s.S % 2 == 0 and j % 2 == 1:
        k[s.S // 2] = 0.0
    mult = (1j * k) ** j
    d = np.fft.ifft(c * mult.reshape((-1,) + (1,) * (c.ndim - 1)), axis=0) * s.S
    return SampledLoop(d)


def _sup_norm(s: SampledLoop) -> float:
    flat = s.values.reshape(s.S, -1)
    return float(np.linalg.norm(flat, axis=1).max())


def seminorm(s: SampledLoop, k: int) -> float:
    """``max_{j<=k} sup_t ||d^j s(t)||`` (Frobenius)."""
    return max(_sup_norm(derivative(s, j)) if j else _sup_norm(s) for j in range(k + 1))


def partial_sum(s: SampledLoop, N: int) -> SampledLoop:
    _check_nyquist(s, N)
    c, freqs = _spectrum(s)
    keep = (np.abs(freqs) <= N).reshape((-1,) + (1,) * (c.ndim - 1))
    return SampledLoop(np.fft.ifft(c * keep, axis=0) * s.S)


def tail_norm(s: SampledLoop, N: int) -> float:
    """``sup_t ||a - S_N(a)||`` on the grid."""
    return _sup_norm(SampledLoop(s.values - partial_sum(s, N).values))


def tail_bound(s: SampledLoop, N: int, k: int) -> float:
    """``||a||_(k) * 2 / ((k-1) N^(k-1))``."""
    if k < 2:
        raise ValueError("the tail bound needs k >= 2")
    return seminorm(s, k) * 2.0 / ((k - 1) * N ** (k - 1))


@dataclass
class DecayReport:
    regime: str
    modes: list
    norms: Dict[int, float]
    slope: float
    intercept: float
    residual: float
    used: list

    @property
    def fitted_k(self) -> float:
        return -self.slope

    @property
    def fitted_log_rho(self) -> float:
        return -self.slope

    def model(self, m: int) -> float:
        x = np.log(abs(m)) if self.regime == "smooth" else abs(m)
        return float(np.exp(self.intercept + self.slope * x))

    def rows(self):
        """``(m, norm, fitted model value)`` for every analyzed mode."""
        out = []
        for m in self.modes:
            fit = self.model(m) if (m != 0 or self.regime == "analytic") else float("nan")
            out.append((m, self.norms[m], fit))
        return out

    def to_dict(self) -> dict:
        key = "fitted_k" if self.regime == "smooth" else "fitted_log_rho"
        return {"regime": self.regime, key: -self.slope, "intercept": self.intercept,
                "fit_residual": self.residual, "modes_used": list(self.used),
                "norms": {str(m): v for m, v in self.norms.items()}}


def decay_fit(s: SampledLoop, modes: Iterable[int], regime: str = "smooth",
              floor: float = 1e-12) -> DecayReport:
    """Least-squares fit of ``log ||P_m||`` against ``log|m|`` or ``|m|``.

    Norms below ``floor * max norm`` (roundoff) and, in the smooth regime,
    ``m = 0`` are left out of the fit.
    """
    if regime not in ("smooth", "analytic"):
        raise ValueError(f"unknown regime {regime!r}")
    modes = list(modes)
    norms = {m: float(np.linalg.norm(fourier_project(s, m))) for m in modes}
    top = max(norms.values(), default=0.0)
    used = [m for m in modes if norms[m] > floor * top and norms[m] > 0
            and not (regime == "smooth" and m == 0)]
    if len(used) < 3:
        raise ValueError(f"decay fit needs at least 3 modes with nonzero norm, got {len(used)}")
    x = np.array([np.log(abs(m)) if regime == "smooth" else abs(m) for m in used], float)
    y = np.log([norms[m] for m in used])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ [slope, intercept] - y) ** 2)))
    return DecayReport(regime, modes, norms, float(slope), float(intercept), resid, used)


# --- truncations and loop Manin triples ---------------------------------------

def mode_basis(base: LoopBase, N: int) -> list:
    """``(m, i)`` pairs ordered by mode, then base index."""
    return [(m, i) for m in range(-N, N + 1) for i in range(base.dim)]


def truncate(base: LoopBase, N: int) -> LieAlgebra:
    """Modes ``|m| <= N`` with brackets landing outside the window dropped.

    The result is generally *not* a Lie algebra (Jacobi fails at the edge);
    its form is the exact mode pairing, which truncation does not disturb.
    """
    idx = mode_basis(base, N)
    pos = {mi: k for k, mi in enumerate(idx)}
    D = len(idx)
    c = np.zeros((D, D, D), complex)
    F = np.zeros((D, D), complex)
    eye = np.eye(base.dim)
    for a, (m, i) in enumerate(idx):
        for b, (n, j) in enumerate(idx):
            if m + n == 0:
                F[a, b] = base.pair(eye[i], eye[j])
            if abs(m + n) <= N:
                v = base.bracket(eye[i], eye[j], m, n)
                for k in np.flatnonzero(v):
                    c[a, b, pos[(m + n, k)]] = v[k]
    labels = tuple(f"{_lab(base, i)}@{m}" for m, i in idx)
    return LieAlgebra(c, labels, F, "complex", None, f"{base.name}_loop{N}")


def _lab(base, i):
    if isinstance(base, PointwiseBase):
        return base.algebra.labels[i]
    return "e"


def to_vector(a: LoopElement, N: int) -> np.ndarray:
    """Coordinates of a loop element in ``truncate(base, N)`` (must fit)."""
    if a.bound > N:
        raise StructureError(f"support bound {a.bound} exceeds truncation {N}")
    return np.concatenate([a.coeff(m) for m in range(-N, N + 1)])


def loop_manin(base: LoopBase, N: int, split: str = "fourier",
               root_weights: Optional[Sequence[int]] = None) -> ManinTriple:
    """Weight-space triple on a mode truncation.

    ``split='fourier'`` grades by the Fourier mode (Witt-type); the base must then
    be abelian in mode 0.  ``split='root'`` grades by ``root_weights`` of the base
    basis, ignoring the Fourier index.
    """
    alg = truncate(base, N)
    idx = mode_basis(base, N)
    if split == "fourier":
        weights = [m for m, _ in idx]
    elif split == "root":
        if root_weights is None or len(root_weights) != base.dim:
            raise ManinError("root split needs one weight per base basis element")
        weights = [root_weights[i] for _, i in idx]
    else:
        raise ValueError(f"unknown split {split!r}")
    w = TorusWeighting(alg, weights)
    t = weight_space_manin(w, alg.form, name=alg.name)
    t.meta.update({"N": N, "split": split, "truncated": True})
    return t


def cobracket_modes(X: LoopElement, xi: LoopElement, eta: LoopElement, zeta: LoopElement,
                    chi: LoopElement) -> complex:
    """``sum_{k+m+p=0} <X_k,[xi_m,zeta_p]> - sum_{k+n+q=0} <X_k,[eta_n,chi_q]>``.

    ``xi, zeta`` must live on modes >= 0 and ``eta, chi`` on modes <= 0.
    """
    for name, el, sign in (("xi", xi, 1), ("zeta", zeta, 1), ("eta", eta, -1), ("chi", chi, -1)):
        bad = [m for m in el.support if sign * m < 0]
        if bad:
            raise ValueError(f"{name} has modes {bad} outside its half-line")
    return loop_pairing(X, loop_bracket(xi, zeta)) - loop_pairing(X, loop_bracket(eta, chi))
