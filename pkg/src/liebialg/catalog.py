"""Built-in example algebras, weightings and bialgebras."""

from __future__ import annotations

from typing import Callable, Dict, Sequence

import numpy as np

from .lie_core import LieAlgebra, abelian, check_jacobi, from_matrices


def _E(n, i, j, dtype=float):
    m = np.zeros((n, n), dtype=dtype)
    m[i, j] = 1
    return m


def sl2() -> LieAlgebra:
    H = np.diag([1.0, -1.0])
    return from_matrices([H, _E(2, 0, 1), _E(2, 1, 0)], ("H", "E", "F"), "sl2")


SL2_WEIGHTS = (0, 2, -2)


def sl3() -> LieAlgebra:
    mats = [np.diag([1.0, -1.0, 0.0]), np.diag([0.0, 1.0, -1.0])]
    labels = ["H1", "H2"]
    pairs = [(0, 1), (1, 2), (0, 2), (1, 0), (2, 1), (2, 0)]
    for i, j in pairs:
        mats.append(_E(3, i, j))
        labels.append(f"E{i + 1}{j + 1}")
    return from_matrices(mats, labels, "sl3")


def su2() -> LieAlgebra:
    """Real form with ``[e1, e2] = e3`` (cyclic), realized as ``-i sigma_k / 2``."""
    sig = [np.array([[0, 1], [1, 0]], complex),
           np.array([[0, -1j], [1j, 0]]),
           np.array([[1, 0], [0, -1]], complex)]
    return from_matrices([-0.5j * s for s in sig], ("e1", "e2", "e3"), "su2")


def heisenberg3() -> LieAlgebra:
    return from_matrices([_E(3, 0, 1), _E(3, 1, 2), _E(3, 0, 2)], ("X", "Y", "Z"),
                         "heisenberg3", form=None)


def gl(n: int) -> LieAlgebra:
    """``M_n`` with basis ``E_ij`` in row-major order and ``tr(xy)/n`` form."""
    mats, labels = [], []
    for i in range(n):
        for j in range(n):
            mats.append(_E(n, i, j))
            labels.append(f"E{i + 1}{j + 1}")
    return from_matrices(mats, labels, f"gl{n}")


def diagonal_weights(k: Sequence[int]) -> tuple:
    """Weights ``k_i - k_j`` of ``E_ij`` under the diagonal circle action."""
    n = len(k)
    return tuple(int(k[i] - k[j]) for i in range(n) for j in range(n))


def sl3_weights(k: Sequence[int] = (2, 1, 0)) -> tuple:
    pairs = [(0, 1), (1, 2), (0, 2), (1, 0), (2, 1), (2, 0)]
    return (0, 0) + tuple(int(k[i] - k[j]) for i, j in pairs)


def upper_triangular2() -> LieAlgebra:
    """Solvable algebra of 2x2 upper-triangular matrices."""
    return from_matrices([_E(2, 0, 0), _E(2, 0, 1), _E(2, 1, 1)], ("E11", "E12", "E22"),
                         "b2", form=None)


def torus(n: int) -> LieAlgebra:
    mats = [_E(n, i, i) for i in range(n)]
    g = abelian(n, f"t{n}")
    return LieAlgebra(g.structure, tuple(f"T{i + 1}" for i in range(n)), None, "real",
                      np.array(mats), f"t{n}")


ALGEBRAS: Dict[str, Callable[[], LieAlgebra]] = {
    "sl2": sl2,
    "sl3": sl3,
    "su2": su2,
    "heisenberg3": heisenberg3,
    "m2": lambda: gl(2),
    "m3": lambda: gl(3),
    "m4": lambda: gl(4),
    "b2": upper_triangular2,
    "t3": lambda: torus(3),
}

DEFAULT_WEIGHTS = {
    "sl2": SL2_WEIGHTS,
    "sl3": sl3_weights((2, 1, 0)),
    "m2": diagonal_weights((1, 0)),
    "m3": diagonal_weights((2, 1, 0)),
    "m4": diagonal_weights((3, 2, 1, 0)),
}


def algebra(name: str) -> LieAlgebra:
    try:
        g = ALGEBRAS[name]()
    except KeyError:
        raise KeyError(f"unknown catalog algebra {name!r}; known: {sorted(ALGEBRAS)}") from None
    rep = check_jacobi(g, 1e-12)
    if not rep.passed:  # pragma: no cover - catalog is fixed
        raise AssertionError(f"catalog algebra {name} fails Jacobi: {rep.residuals}")
    return g


# --- bialgebras -------------------------------------------------------------------

def weighted_bialgebra(name: str, weights=None):
    """``from_manin`` of the weight-space double of a catalog matrix algebra."""
    from .bialgebra import from_manin
    from .torus_weight import TorusWeighting, TraceState, build_double_manin

    g = algebra(name)
    w = TorusWeighting(g, DEFAULT_WEIGHTS[name] if weights is None else weights)
    return from_manin(build_double_manin(w, TraceState(g)))


def sl2_dual():
    """Abelian ``g`` (realized as the diagonal torus) whose dual bracket is sl2."""
    from .bialgebra import dual_of

    return dual_of(sl2(), torus(3))


def heisenberg_cotangent():
    from .bialgebra import cotangent

    return cotangent(heisenberg3())


BIALGEBRAS = {
    "sl2": lambda: weighted_bialgebra("sl2"),
    "m2": lambda: weighted_bialgebra("m2"),
    "m3": lambda: weighted_bialgebra("m3"),
    "sl3": lambda: weighted_bialgebra("sl3"),
    "sl2_dual": sl2_dual,
    "heisenberg_cotangent": heisenberg_cotangent,
}


def bialgebra(name: str):
    try:
        return BIALGEBRAS[name]()
    except KeyError:
        raise KeyError(f"unknown catalog bialgebra {name!r}; known: {sorted(BIALGEBRAS)}") from None


# --- loop truncations (not Lie algebras: Jacobi fails at the truncation edge) -------

def witt_truncation(N: int):
    from .loop_fourier import WittBase, loop_manin

    return loop_manin(WittBase(), N)


def sl2_loop_truncation(N: int):
    from .loop_fourier import PointwiseBase, loop_manin

    return loop_manin(PointwiseBase(sl2()), N, split="root", root_weights=SL2_WEIGHTS)


LOOPS = {"witt": witt_truncation, "sl2_loop": sl2_loop_truncation}


# --- sampled scalar loops for decay experiments ------------------------------------

def geometric_loop(log_rho: float, S: int):
    """Poisson kernel ``sum_m exp(-log_rho |m|) e^{imt}``: analytic, ``||P_m|| = rho^-|m|``."""
    from .loop_fourier import SampledLoop, grid

    r = np.exp(-log_rho)
    t = grid(S)
    return SampledLoop((1 - r * r) / (1 - 2 * r * np.cos(t) + r * r))


def smooth_loop(k: float, S: int):
    """``sum_{m != 0} |m|^-k e^{imt}`` for ``|m| <= (S-1)//2`` (band-limited on the grid)."""
    from .loop_fourier import SampledLoop

    M = (S - 1) // 2
    c = np.zeros(S, dtype=complex)
    m = np.arange(1, M + 1)
    c[m] = c[-m] = m ** -float(k)
    return SampledLoop(np.fft.ifft(c).real * S)


def constant_loop(value: float, S: int):
    from .loop_fourier import SampledLoop

    return SampledLoop(np.full(S, float(value)))


FOURIER_SAMPLES = {
    "geometric": (geometric_loop, 0.5),
    "smooth": (smooth_loop, 3.0),
    "constant": (constant_loop, 1.0),
}


def fourier_sample(name: str, S: int, param=None):
    try:
        fn, default = FOURIER_SAMPLES[name]
    except KeyError:
        raise KeyError(f"unknown catalog loop {name!r}; known: {sorted(FOURIER_SAMPLES)}") from None
    return fn(default if param is None else param, S)
