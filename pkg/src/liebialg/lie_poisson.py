"""Linear Poisson structures on ``g`` relative to the dual bracket, and Schouten brackets.

Observables are polynomials in the coordinates of ``g``.  For a bialgebra with
cobracket tensor ``d`` the bracket is

    {f, h}(v) = <v, [df(v), dh(v)]_b> = sum v_l d[l, a, b] d_a f d_b h.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bialgebra import Bialgebra
from .lie_core import DEFAULT_TOL, LieAlgebra, StructureError
from .report import CheckReport

Exp = Tuple[int, ...]


class PolyObservable:
    """Sparse polynomial in ``nvars`` variables.

    Built from ``{exponent tuple: coefficient}``; stored as an exponent array
    ``exps`` (terms x nvars) and a coefficient vector so products vectorize.
    """

    __slots__ = ("nvars", "exps", "coeffs")
    _BASE = 1 << 6  # exponent per variable must stay below this

    def __init__(self, nvars: int, terms: Optional[Dict[Exp, complex]] = None, *,
                 exps=None, coeffs=None):
        self.nvars = int(nvars)
        if terms is not None:
            keys = list(terms)
            for e in keys:
                if len(e) != self.nvars or min(e, default=0) < 0:
                    raise StructureError(f"bad exponent {e} for {self.nvars} variables")
            exps = np.array(keys, dtype=np.int64).reshape(len(keys), self.nvars)
            coeffs = np.array([terms[e] for e in keys])
        if exps is None:
            exps = np.zeros((0, self.nvars), dtype=np.int64)
            coeffs = np.zeros(0)
        self.exps, self.coeffs = self._combine(np.asarray(exps, dtype=np.int64), np.asarray(coeffs))

    @classmethod
    def _raw(cls, nvars: int, E, C) -> "PolyObservable":
        """Trusted constructor: ``E`` rows already distinct and ``C`` nonzero."""
        p = cls.__new__(cls)
        p.nvars, p.exps, p.coeffs = nvars, E, C
        return p

    def _combine(self, E, C):
        if len(C) == 0:
            return E.reshape(0, self.nvars), C.astype(float) if C.dtype.kind not in "fc" else C
        if E.max(initial=0) >= self._BASE:
            raise StructureError("polynomial degree too large for the packed representation")
        keys = E @ (self._BASE ** np.arange(self.nvars, dtype=np.int64))
        uniq, first, inv = np.unique(keys, return_index=True, return_inverse=True)
        if np.iscomplexobj(C):
            summed = (np.bincount(inv, C.real, len(uniq))
                      + 1j * np.bincount(inv, C.imag, len(uniq)))
        else:
            summed = np.bincount(inv, C.astype(float), len(uniq))
        keep = summed != 0
        return E[first][keep], summed[keep]

    @property
    def terms(self) -> Dict[Exp, complex]:
        return {tuple(int(k) for k in e): c.item() for e, c in zip(self.exps, self.coeffs)}

    # constructors
    @classmethod
    def constant(cls, n: int, c) -> "PolyObservable":
        return cls(n, {(0,) * n: c})

    @classmethod
    def linear(cls, alpha) -> "PolyObservable":
        """``v -> <v, alpha>``."""
        alpha = np.asarray(alpha)
        n = len(alpha)
        return cls(n, exps=np.eye(n, dtype=np.int64), coeffs=alpha)

    @classmethod
    def quadratic(cls, Q) -> "PolyObservable":
        """``v -> v^T Q v``."""
        Q = np.asarray(Q)
        n = Q.shape[0]
        eye = np.eye(n, dtype=np.int64)
        E = (eye[:, None, :] + eye[None, :, :]).reshape(n * n, n)
        return cls(n, exps=E, coeffs=Q.reshape(-1))

    @classmethod
    def random(cls, n: int, degree: int, rng) -> "PolyObservable":
        """All monomials up to ``degree`` with standard normal coefficients."""
        rows = []
        for d in range(degree + 1):
            for combo in itertools.combinations_with_replacement(range(n), d):
                e = [0] * n
                for i in combo:
                    e[i] += 1
                rows.append(e)
        E = np.array(rows, dtype=np.int64).reshape(len(rows), n)
        return cls(n, exps=E, coeffs=rng.normal(size=len(rows)))

    @property
    def degree(self) -> int:
        return int(self.exps.sum(axis=1).max(initial=0))

    def _check(self, other):
        if other.nvars != self.nvars:
            raise StructureError("observables on spaces of different dimension")

    def __add__(self, other):
        self._check(other)
        return PolyObservable(self.nvars, exps=np.vstack([self.exps, other.exps]),
                              coeffs=np.concatenate([self.coeffs, other.coeffs]))

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, other):
        if not isinstance(other, PolyObservable):
            return PolyObservable(self.nvars, exps=self.exps, coeffs=self.coeffs * other)
        self._check(other)
        E = (self.exps[:, None, :] + other.exps[None, :, :]).reshape(-1, self.nvars)
        C = np.outer(self.coeffs, other.coeffs).reshape(-1)
        return PolyObservable(self.nvars, exps=E, coeffs=C)

    __rmul__ = __mul__

    def __bool__(self):
        return len(self.coeffs) > 0

    def partial(self, i: int) -> "PolyObservable":
        k = self.exps[:, i]
        m = k > 0
        E = self.exps[m].copy()
        E[:, i] -= 1
        return PolyObservable._raw(self.nvars, E, self.coeffs[m] * k[m])

    def gradient(self) -> List["PolyObservable"]:
        return [self.partial(i) for i in range(self.nvars)]

    def __call__(self, v) -> complex:
        if not len(self.coeffs):
            return 0.0
        v = np.asarray(v)
        return (self.coeffs * np.prod(v[None, :] ** self.exps, axis=1)).sum()

    def max_coeff(self) -> float:
        return float(np.abs(self.coeffs).max(initial=0.0))


def poly_sum(polys: Sequence[PolyObservable], nvars: int) -> PolyObservable:
    """Sum with a single combine pass."""
    polys = [p for p in polys if p]
    if not polys:
        return PolyObservable(nvars)
    return PolyObservable(nvars, exps=np.vstack([p.exps for p in polys]),
                          coeffs=np.concatenate([p.coeffs for p in polys]))


def hamiltonian_field(f: PolyObservable, bi: Bialgebra) -> List[PolyObservable]:
    """Components ``X_f^b(v) = sum v_l d[l, a, b] d_a f(v)``, i.e. ``coad_b(df(v)) v``."""
    n, d = bi.dim, bi.delta
    if f.nvars != n:
        raise StructureError("observable and algebra dimensions differ")
    eye = np.eye(n, dtype=np.int64)
    blocks_e, blocks_c = [], []
    for a, da in enumerate(f.gradient()):
        if not da:
            continue
        for l in range(n):
            w = d[l, a]
            if w.any():
                blocks_e.append(da.exps + eye[l])
                blocks_c.append(np.outer(da.coeffs, w))
    if not blocks_e:
        return [PolyObservable(n) for _ in range(n)]
    E, W = np.vstack(blocks_e), np.vstack(blocks_c)
    keys = E @ (PolyObservable._BASE ** np.arange(n, dtype=np.int64))
    uniq, first, inv = np.unique(keys, return_index=True, return_inverse=True)
    E = E[first]
    out = []
    for b in range(n):
        w = W[:, b]
        if np.iscomplexobj(w):
            c = np.bincount(inv, w.real, len(uniq)) + 1j * np.bincount(inv, w.imag, len(uniq))
        else:
            c = np.bincount(inv, w, len(uniq))
        keep = c != 0
        out.append(PolyObservable._raw(n, E[keep], c[keep]))
    return out


def lie_poisson_bracket(f: PolyObservable, h: PolyObservable, bi: Bialgebra) -> PolyObservable:
    f._check(h)
    n = bi.dim
    X = hamiltonian_field(f, bi)
    E, C = [], []
    for b, dh in enumerate(h.gradient()):
        if X[b] and dh:
            E.append((X[b].exps[:, None, :] + dh.exps[None, :, :]).reshape(-1, n))
            C.append(np.outer(X[b].coeffs, dh.coeffs).reshape(-1))
    if not E:
        return PolyObservable(n)
    return PolyObservable(n, exps=np.vstack(E), coeffs=np.concatenate(C))


def evaluate_field(X: Sequence[PolyObservable], v) -> np.ndarray:
    return np.array([c(v) for c in X])


def check_poisson_axioms(bi: Bialgebra, degree: int = 3, trials: int = 50,
                         tol: float = 1e-8, seed: int = 0, points: int = 3) -> CheckReport:
    """Leibniz, Jacobi and ``{f,h} = dh(X_f)`` on seeded random observables and points.

    Residuals are absolute values at points drawn from a standard normal, with
    observables whose coefficients are standard normal.
    """
    rng = np.random.default_rng(seed)
    n = bi.dim
    leib = jac = ham = 0.0
    for _ in range(trials):
        f, g, h = (PolyObservable.random(n, degree, rng) for _ in range(3))
        fg, fh, gh = (lie_poisson_bracket(a, b, bi) for a, b in ((f, g), (f, h), (g, h)))
        leibniz = lie_poisson_bracket(f, g * h, bi) - g * fh - fg * h
        jacobi = (lie_poisson_bracket(f, gh, bi) + lie_poisson_bracket(g, lie_poisson_bracket(h, f, bi), bi)
                  + lie_poisson_bracket(h, fg, bi))
        Xf = hamiltonian_field(f, bi)
        dh = h.gradient()
        for v in rng.normal(size=(points, n)):
            leib = max(leib, abs(leibniz(v)))
            jac = max(jac, abs(jacobi(v)))
            ham = max(ham, abs(fh(v) - evaluate_field(dh, v) @ evaluate_field(Xf, v)))
    return CheckReport("poisson_axioms", {"leibniz": leib, "jacobi": jac, "hamiltonian": ham}, tol,
                       info={"seed": seed, "degree": degree, "trials": trials})


# --- multivectors and the Schouten bracket ------------------------------------------

def _sort_sign(idx: Sequence[int]):
    """``(sorted tuple, sign)``; sign 0 when an index repeats."""
    idx = list(idx)
    if len(set(idx)) < len(idx):
        return tuple(sorted(idx)), 0
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return tuple(sorted(idx)), sign


@dataclass(frozen=True, eq=False)
class Multivector:
    """Constant ``k``-vector on ``g`` as a fully antisymmetric rank-``k`` tensor.

    ``x_1 ^ ... ^ x_k`` corresponds to ``sum_sigma sgn(sigma) x_sigma(1) (x) ... (x) x_sigma(k)``.
    """

    dim: int
    degree: int
    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components)
        if c.shape != (self.dim,) * self.degree:
            raise StructureError(f"components must have shape {(self.dim,) * self.degree}")
        object.__setattr__(self, "components", c)

    @classmethod
    def from_terms(cls, dim: int, degree: int, terms: Dict[Tuple[int, ...], complex]):
        """From ``{index tuple: coeff}`` meaning ``sum coeff e_i1 ^ ... ^ e_ik``."""
        c = np.zeros((dim,) * degree, dtype=np.result_type(float, *terms.values()) if terms else float)
        for idx, v in terms.items():
            base, s = _sort_sign(idx)
            if s == 0 or v == 0:
                continue
            for perm in itertools.permutations(range(degree)):
                p = tuple(base[k] for k in perm)
                c[p] += s * _sort_sign(perm)[1] * v
        return cls(dim, degree, c)

    @classmethod
    def wedge(cls, *vectors) -> "Multivector":
        vecs = [np.asarray(v) for v in vectors]
        dim = vecs[0].shape[0]
        return cls.from_terms(dim, len(vecs), _wedge_terms(vecs))

    def terms(self) -> Dict[Tuple[int, ...], complex]:
        """Coefficients on ``e_I`` for sorted index tuples ``I``."""
        out = {}
        for idx in itertools.combinations(range(self.dim), self.degree):
            v = self.components[idx] if self.degree else self.components[()]
            if v != 0:
                out[idx] = v
        return out

    def antisymmetry_residual(self) -> float:
        c = self.components
        worst = 0.0
        for i in range(self.degree - 1):
            worst = max(worst, float(np.abs(c + np.swapaxes(c, i, i + 1)).max(initial=0.0)))
        return worst

    def __add__(self, other):
        return Multivector(self.dim, self.degree, self.components + other.components)

    def __mul__(self, s):
        return Multivector(self.dim, self.degree, s * self.components)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1


def _wedge_terms(vecs) -> Dict[Tuple[int, ...], complex]:
    acc: Dict[Tuple[int, ...], complex] = {(): 1.0}
    for v in vecs:
        nxt: Dict[Tuple[int, ...], complex] = {}
        for idx, c in acc.items():
            for j in np.flatnonzero(v):
                base, s = _sort_sign(idx + (int(j),))
                if s:
                    nxt[base] = nxt.get(base, 0) + s * c * v[j]
        acc = nxt
    return acc


def _schouten_basis(I, J, g: LieAlgebra) -> Dict[Tuple[int, ...], complex]:
    """``[e_I, e_J] = sum (-1)^(p+q) [e_Ip, e_Jq] ^ e_(I without p) ^ e_(J without q)``."""
    c = g.structure
    out: Dict[Tuple[int, ...], complex] = {}
    for p, i in enumerate(I):
        rest_i = I[:p] + I[p + 1:]
        for q, j in enumerate(J):
            br = c[i, j]
            if not br.any():
                continue
            rest = rest_i + J[:q] + J[q + 1:]
            sgn = (-1) ** (p + q)
            for k in np.flatnonzero(br):
                base, s = _sort_sign((int(k),) + rest)
                if s:
                    out[base] = out.get(base, 0) + sgn * s * br[k]
    return out


def schouten(a: Multivector, b: Multivector, g: LieAlgebra) -> Multivector:
    """Schouten bracket of constant multivectors, bilinear extension of the decomposable rule."""
    if a.dim != g.dim or b.dim != g.dim:
        raise StructureError("multivector and algebra dimensions differ")
    if a.degree == 0 or b.degree == 0:
        return Multivector(g.dim, max(a.degree + b.degree - 1, 0),
                           np.zeros((g.dim,) * max(a.degree + b.degree - 1, 0)))
    total: Dict[Tuple[int, ...], complex] = {}
    for I, x in a.terms().items():
        for J, y in b.terms().items():
            for K, v in _schouten_basis(I, J, g).items():
                total[K] = total.get(K, 0) + x * y * v
    return Multivector.from_terms(g.dim, a.degree + b.degree - 1, total)


def schouten_self(pi: Multivector, g: LieAlgebra) -> Multivector:
    """``[pi, pi]`` for a bivector; zero iff the constant bivector satisfies Jacobi."""
    if pi.degree != 2:
        raise StructureError("schouten_self expects a bivector")
    return schouten(pi, pi, g)


def ad_multivector(g: LieAlgebra, y, a: Multivector) -> Multivector:
    """``ad_y`` acting slot-wise on a constant multivector."""
    A = np.einsum("i,ijk->kj", y, g.structure)
    c = a.components
    out = np.zeros_like(c, dtype=np.result_type(c, A))
    for slot in range(a.degree):
        out = out + np.moveaxis(np.tensordot(A, c, axes=(1, slot)), 0, slot)
    return Multivector(a.dim, a.degree, out)


def schouten_report(pi: Multivector, g: LieAlgebra, tol: float = DEFAULT_TOL) -> CheckReport:
    """``[pi, pi]`` size and its ad-invariance defect (an r-matrix-type diagnostic)."""
    s = schouten_self(pi, g)
    eye = np.eye(g.dim)
    inv = max(float(np.abs(ad_multivector(g, eye[i], s).components).max(initial=0.0))
              for i in range(g.dim))
    res = {"schouten": float(np.abs(s.components).max(initial=0.0)), "ad_invariance": inv}
    return CheckReport("schouten_self", res, tol)
