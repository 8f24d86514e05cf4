"""Finite-dimensional Lie algebras stored as dense structure-constant tensors.

Convention: ``structure[i, j, k]`` is the coefficient of ``b_k`` in ``[b_i, b_j]``.
The coadjoint matrix follows ``ad*_X f(Y) = f([X, Y])``, so ``coad(x)`` is the
plain transpose of ``ad(x)`` with no extra sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .report import CheckReport

DEFAULT_TOL = 1e-10


class StructureError(ValueError):
    """Raised for dimension or field mismatches between algebraic objects."""


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A Lie algebra given by structure constants and an optional invariant form.

    ``realization`` optionally holds one ``n x n`` matrix per basis element; it
    is what the matrix-group code uses to build ``Ad``.
    """

    structure: np.ndarray
    labels: tuple = ()
    form: Optional[np.ndarray] = None
    field: str = "real"
    realization: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.structure)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise StructureError(f"structure tensor must be (n, n, n), got {c.shape}")
        if self.field not in ("real", "complex"):
            raise StructureError(f"unknown field {self.field!r}")
        if np.iscomplexobj(c) and self.field == "real":
            if np.abs(c.imag).max(initial=0.0) > 0:
                raise StructureError("complex structure constants on a real algebra")
            c = c.real
        if not np.all(np.isfinite(c)):
            raise StructureError("structure constants must be finite")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "structure", c)
        n = c.shape[0]
        labels = tuple(self.labels) if self.labels else tuple(f"b{i}" for i in range(n))
        if len(labels) != n:
            raise StructureError("one label per basis element required")
        object.__setattr__(self, "labels", labels)
        if self.form is not None:
            f = np.array(self.form)
            if f.shape != (n, n):
                raise StructureError(f"form must be ({n}, {n}), got {f.shape}")
            f.setflags(write=False)
            object.__setattr__(self, "form", f)
        if self.realization is not None:
            r = np.array(self.realization)
            if r.ndim != 3 or r.shape[0] != n or r.shape[1] != r.shape[2]:
                raise StructureError("realization must be (dim, n, n)")
            r.setflags(write=False)
            object.__setattr__(self, "realization", r)

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    def element(self, coords) -> "AlgebraElement":
        return AlgebraElement(self, np.asarray(coords))

    def basis(self, i: int) -> "AlgebraElement":
        v = np.zeros(self.dim)
        v[i] = 1.0
        return AlgebraElement(self, v)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def bracket_coords(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.structure)

    def with_form(self, form) -> "LieAlgebra":
        return LieAlgebra(self.structure, self.labels, form, self.field, self.realization, self.name)

    def __repr__(self):
        return f"LieAlgebra(name={self.name!r}, dim={self.dim}, field={self.field!r})"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: LieAlgebra
    coords: np.ndarray = field(repr=True)

    def __post_init__(self):
        c = np.asarray(self.coords)
        if c.shape != (self.algebra.dim,):
            raise StructureError(
                f"coords of length {c.shape} do not match algebra dim {self.algebra.dim}")
        object.__setattr__(self, "coords", c)

    def _check(self, other: "AlgebraElement"):
        if other.algebra is not self.algebra:
            raise StructureError("elements belong to different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, self.coords + other.coords)

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, self.coords - other.coords)

    def __mul__(self, s):
        return AlgebraElement(self.algebra, s * self.coords)

    __rmul__ = __mul__

    def __neg__(self):
        return AlgebraElement(self.algebra, -self.coords)


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    x._check(y)
    return AlgebraElement(x.algebra, x.algebra.bracket_coords(x.coords, y.coords))


def ad_matrix(g: LieAlgebra, x) -> np.ndarray:
    """``ad`` of a coordinate vector; column j holds ``[x, b_j]``."""
    return np.einsum("i,ijk->kj", x, g.structure)


def ad(x: AlgebraElement) -> np.ndarray:
    return ad_matrix(x.algebra, x.coords)


def coad(x: AlgebraElement) -> np.ndarray:
    """Matrix of ``alpha -> alpha o ad_x`` acting on dual coordinate columns."""
    return ad(x).T


def killing_form(g: LieAlgebra) -> np.ndarray:
    ads = np.einsum("ijk->ikj", g.structure)  # ads[i] = ad(b_i)
    return np.einsum("ikj,ljk->il", ads, ads)


def jacobiator_tensor(structure: np.ndarray) -> np.ndarray:
    """``J[i, j, k, m]``: coefficient of ``b_m`` in the cyclic Jacobi sum."""
    c = structure
    t = np.einsum("ijl,lkm->ijkm", c, c)
    return t + np.einsum("jkim->ijkm", t) + np.einsum("kijm->ijkm", t)


def check_jacobi(g: LieAlgebra, tol: float = DEFAULT_TOL) -> CheckReport:
    jac = np.abs(jacobiator_tensor(g.structure))
    anti = np.abs(g.structure + np.swapaxes(g.structure, 0, 1))
    residual = float(jac.max(initial=0.0))
    return CheckReport(
        "jacobi",
        {"jacobi": residual, "antisymmetry": float(anti.max(initial=0.0))},
        tol,
    )


def check_form_invariance(g: LieAlgebra, form=None, tol: float = DEFAULT_TOL) -> CheckReport:
    """Max over basis triples of ``|B([x,y],z) + B(y,[x,z])|``."""
    B = g.form if form is None else np.asarray(form)
    if B is None:
        raise StructureError("algebra carries no invariant form")
    c = g.structure
    lhs = np.einsum("ijm,mk->ijk", c, B) + np.einsum("ikm,jm->ijk", c, B)
    sym = np.abs(B - B.T).max(initial=0.0)
    return CheckReport(
        "form_invariance",
        {"invariance": float(np.abs(lhs).max(initial=0.0)), "symmetry": float(sym)},
        tol,
    )


def direct_sum(g1: LieAlgebra, g2: LieAlgebra, name: str = "") -> LieAlgebra:
    if g1.field != g2.field:
        raise StructureError(f"field mismatch: {g1.field} vs {g2.field}")
    n1, n2 = g1.dim, g2.dim
    dtype = np.result_type(g1.structure, g2.structure)
    c = np.zeros((n1 + n2,) * 3, dtype=dtype)
    c[:n1, :n1, :n1] = g1.structure
    c[n1:, n1:, n1:] = g2.structure
    form = None
    if g1.form is not None and g2.form is not None:
        form = np.zeros((n1 + n2, n1 + n2), dtype=np.result_type(g1.form, g2.form))
        form[:n1, :n1] = g1.form
        form[n1:, n1:] = g2.form
    labels = tuple(f"{l}_1" for l in g1.labels) + tuple(f"{l}_2" for l in g2.labels)
    return LieAlgebra(c, labels, form, g1.field, None, name or f"{g1.name}+{g2.name}")


def structure_from_matrices(mats: Sequence[np.ndarray], tol: float = 1e-10) -> np.ndarray:
    """Structure constants of the span of ``mats`` under the commutator.

    Raises ``StructureError`` if the span is not closed.
    """
    mats = np.asarray(mats)
    n = mats.shape[0]
    basis = mats.reshape(n, -1).T
    comm = np.einsum("iab,jbc->ijac", mats, mats) - np.einsum("jab,ibc->ijac", mats, mats)
    rhs = comm.reshape(n * n, -1).T
    coef, *_ = np.linalg.lstsq(basis, rhs, rcond=None)
    resid = np.abs(basis @ coef - rhs).max(initial=0.0)
    if resid > tol:
        raise StructureError(f"matrix span not closed under commutator (residual {resid:.3g})")
    c = coef.T.reshape(n, n, n)
    if not np.iscomplexobj(mats):
        c = c.real
    return c


def from_matrices(mats, labels=(), name: str = "", form="trace") -> LieAlgebra:
    """Matrix Lie algebra; ``form='trace'`` attaches ``B(x, y) = tr(xy)/n``."""
    mats = np.asarray(mats)
    c = structure_from_matrices(mats)
    field_ = "complex" if np.iscomplexobj(c) and np.abs(c.imag).max(initial=0) > 1e-12 else "real"
    if field_ == "real":
        c = np.real(c)
    c = np.where(np.abs(c) < 1e-13, 0, c)
    B = None
    if isinstance(form, str) and form == "trace":
        n = mats.shape[1]
        B = np.einsum("iab,jba->ij", mats, mats) / n
        if field_ == "real" and np.abs(B.imag).max(initial=0) < 1e-12:
            B = B.real
    elif form is not None:
        B = np.asarray(form)
    return LieAlgebra(c, tuple(labels), B, field_, mats, name)


def abelian(n: int, name: str = "abelian") -> LieAlgebra:
    return LieAlgebra(np.zeros((n, n, n)), name=name)
