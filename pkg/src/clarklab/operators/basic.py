"""Operator matrices, the compressed shift, Clark unitaries, rank-one perturbations."""
from dataclasses import dataclass

import numpy as np

from ..errors import ClarkError, HypothesisError
from ..measure import AtomicMeasure, unit_point
from ..model_space import ModelSpace, ModelVector


def _dim(space):
    if isinstance(space, ModelSpace):
        return space.dim
    if isinstance(space, AtomicMeasure):
        return space.size
    return int(space)


def _space_json(space):
    if isinstance(space, ModelSpace):
        return {"model_space": space.to_json()}
    if isinstance(space, AtomicMeasure):
        return {"l2": space.to_json()}
    return {"dim": int(space)}


def coords_of(x, dim=None):
    """Coordinates of a ModelVector, or the array itself."""
    c = x.coords if isinstance(x, ModelVector) else np.asarray(x, dtype=np.complex128).ravel()
    if dim is not None and c.size != dim:
        raise ClarkError(f"expected a vector of length {dim}")
    return c


def opnorm(A):
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


class OperatorMatrix:
    """Dense matrix of a map between two coordinate spaces.

    Domain and codomain are ModelSpace (Clark coordinates), AtomicMeasure
    (orthonormal L^2 coordinates sqrt(w) f) or a plain dimension.
    """

    __slots__ = ("domain", "codomain", "matrix")

    def __init__(self, domain, codomain, matrix):
        m = np.array(matrix, dtype=np.complex128, copy=True)
        if m.ndim != 2 or m.shape != (_dim(codomain), _dim(domain)):
            raise ClarkError(f"matrix shape {m.shape} does not match the spaces")
        m.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("OperatorMatrix is immutable")

    @property
    def shape(self):
        return self.matrix.shape

    def norm(self):
        return opnorm(self.matrix)

    def adjoint(self):
        return OperatorMatrix(self.codomain, self.domain, self.matrix.conj().T)

    def apply(self, x):
        y = self.matrix @ coords_of(x, self.shape[1])
        if isinstance(self.codomain, ModelSpace):
            return ModelVector(self.codomain, y)
        return y

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(other.domain, self.codomain, self.matrix @ other.matrix)
        return self.apply(other)

    def __repr__(self):
        return f"OperatorMatrix(shape={self.shape}, norm={self.norm():.6g})"

    def to_json(self):
        return {
            "domain": _space_json(self.domain),
            "codomain": _space_json(self.codomain),
            "rows": self.shape[0],
            "cols": self.shape[1],
            "matrix": [[float(x.real), float(x.imag)] for x in self.matrix.ravel()],
        }


def matrix_from_json(obj):
    """Matrix and shape from an operator dump (spaces are not rebuilt)."""
    vals = np.array(obj["matrix"], dtype=np.float64)
    m = (vals[:, 0] + 1j * vals[:, 1]).reshape(int(obj["rows"]), int(obj["cols"]))
    return m


def _functional(space):
    """Row vector of the functional f -> (f, conj(z) theta), i.e. (s * zeta)^T."""
    return space.sqrt_w * space.points


def compressed_shift(space):
    S = np.diag(space.points) - np.outer(space.sqrt_w, _functional(space))
    return OperatorMatrix(space, space, S)


def clark_unitary(space, c=1.0):
    c = unit_point(c, 1e-9)
    U = np.diag(space.points) + (c - 1.0) * np.outer(space.sqrt_w, _functional(space))
    return OperatorMatrix(space, space, U)


def rank_one_perturbation(space, u):
    """S_theta + (., conj(z) theta) u."""
    uc = coords_of(u, space.dim)
    T = np.diag(space.points) + np.outer(uc - space.sqrt_w, _functional(space))
    return OperatorMatrix(space, space, T)


@dataclass(frozen=True)
class IsometryReport:
    kind: str           # "unitary", "non-isometric" or "isometric-forces-constant"
    margin: float       # ||T*T - I||
    constant: complex   # best constant c with u ~ c * 1
    constant_defect: float
    consistent: bool    # small margin only when u is a unimodular constant


def isometry_classification(space, u, tol=1e-9):
    T = rank_one_perturbation(space, u).matrix
    margin = opnorm(T.conj().T @ T - np.eye(space.dim))
    uc = coords_of(u, space.dim)
    const = complex(np.vdot(space.sqrt_w, uc))
    defect = float(np.linalg.norm(uc - const * space.sqrt_w))
    is_const = defect < tol and abs(abs(const) - 1.0) < tol
    if margin < tol:
        kind = "unitary" if is_const else "isometric-forces-constant"
    else:
        kind = "non-isometric"
    consistent = (margin < tol) == is_const
    return IsometryReport(kind, margin, const, defect, consistent)


class RankOneData:
    """base + (., v) u, all in coordinates of the base operator's space."""

    def __init__(self, base, u, v):
        if not isinstance(base, OperatorMatrix):
            base = OperatorMatrix(len(base), len(base), base)
        n = base.shape[0]
        if base.shape != (n, n):
            raise ClarkError("base operator must be square")
        self.base = base
        self.u = coords_of(u, n)
        self.v = coords_of(v, n)

    def full(self):
        return OperatorMatrix(self.base.domain, self.base.codomain,
                              self.base.matrix + np.outer(self.u, np.conj(self.v)))


def rank_one_resolvent(data, lam, x, tol=1e-10):
    """(T - lam)^{-1} x for T = R + (., v) u by the rank-one update formula.

    Requires R - lam invertible and 1 + ((R - lam)^{-1} u, v) != 0.
    """
    R = data.base.matrix
    n = R.shape[0]
    A = R - lam * np.eye(n)
    smin = np.linalg.svd(A, compute_uv=False).min()
    if smin <= tol:
        raise HypothesisError("R - lambda is not invertible", smin)
    xc = coords_of(x, n)
    y1 = np.linalg.solve(A, xc)
    y2 = np.linalg.solve(A, data.u)
    denom = 1.0 + np.vdot(data.v, y2)
    if abs(denom) <= tol:
        raise HypothesisError("1 + ((R - lambda)^{-1} u, v) vanishes", abs(denom))
    out = y1 - np.vdot(data.v, y1) / denom * y2
    if isinstance(data.base.domain, ModelSpace):
        return ModelVector(data.base.domain, out)
    return out
