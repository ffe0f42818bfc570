"""Asymmetric truncated Toeplitz operators f -> P_{K_omega}(g f)."""
from dataclasses import dataclass, field

import numpy as np

from ..blaschke import FiniteBlaschke, sup_distance
from ..errors import ClarkError, HypothesisError
from ..model_space import ModelVector
from .basic import OperatorMatrix, opnorm
from .multipliers import compress

_poly = np.polynomial.polynomial
MATCH_TOL = 1e-8


class Symbol:
    """g = inner * num / den with num, den polynomials (lowest degree first)
    free of zeros in the closed disk.
    """

    def __init__(self, inner=None, num=(1.0,), den=(1.0,)):
        if inner is None:
            inner = FiniteBlaschke([], 1.0, require_origin=False)
        if not isinstance(inner, FiniteBlaschke):
            raise ClarkError("inner factor must be a FiniteBlaschke")
        self.inner = inner
        self.num = np.trim_zeros(np.asarray(num, dtype=np.complex128), "b")
        self.den = np.trim_zeros(np.asarray(den, dtype=np.complex128), "b")
        if self.num.size == 0 or self.den.size == 0:
            raise ClarkError("outer part must be a nonzero rational function")
        for p, what in ((self.num, "numerator"), (self.den, "denominator")):
            if p.size > 1:
                r = _poly.polyroots(p)
                if np.any(np.abs(r) <= 1.0 + 1e-12):
                    raise ClarkError(f"outer {what} vanishes in the closed disk")

    def outer(self, z):
        return _poly.polyval(z, self.num) / _poly.polyval(z, self.den)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return self.inner.evaluate(z) * self.outer(z)

    def reciprocal(self):
        """1/g, available when the inner part is a constant."""
        if self.inner.degree:
            raise HypothesisError("1/g is unbounded: g has an inner factor")
        return Symbol(FiniteBlaschke([], np.conj(self.inner.front), require_origin=False),
                      self.den, self.num)


def att_operator(g, dom, cod, size=None):
    """Matrix of f -> P_{K_omega}(g f), columns by quadrature projection."""
    C, _, _ = compress(g, dom, cod, size)
    return OperatorMatrix(dom, cod, C)


def match_zeros(a, b, tol=MATCH_TOL):
    """Greedy multiset intersection of two zero lists."""
    rest = list(np.asarray(b, dtype=np.complex128))
    common = []
    for x in np.asarray(a, dtype=np.complex128):
        if not rest:
            break
        d = np.abs(np.asarray(rest) - x)
        k = int(np.argmin(d))
        if d[k] <= tol:
            common.append(rest.pop(k))
    return np.array(common, dtype=np.complex128)


def _remove(zeros, sub, tol=MATCH_TOL):
    rest = list(np.asarray(zeros, dtype=np.complex128))
    for x in sub:
        d = np.abs(np.asarray(rest) - x)
        rest.pop(int(np.argmin(d)))
    return np.array(rest, dtype=np.complex128)


def _cluster(zeros, tol=1e-8):
    """[(point, multiplicity)]."""
    out = []
    for z in zeros:
        for i, (p, m) in enumerate(out):
            if abs(z - p) <= tol:
                out[i] = (p, m + 1)
                break
        else:
            out.append((complex(z), 1))
    return out


def derivative_rows(fun, point, mult, radius=None, nodes=64):
    """Values f^(j)(point)/j!, j < mult, by the Cauchy integral on a small circle.

    ``fun`` maps an array of points to an (N, m) array; returns (mult, m).
    """
    r = radius or min(0.25, 0.5 * (1.0 - abs(point)))
    phi = 2 * np.pi * np.arange(nodes) / nodes
    vals = fun(point + r * np.exp(1j * phi))
    rows = []
    for j in range(mult):
        rows.append(np.mean(vals * np.exp(-1j * j * phi)[:, None], axis=0) / r ** j)
    return np.array(rows)


@dataclass
class AttStructure:
    X: OperatorMatrix
    alpha: FiniteBlaschke
    kernel_basis: list
    kernel_dim_svd: int
    kernel_dim_predicted: int
    kernel_dim_evaluation: int
    closure_hypothesis: bool
    range_rank: int
    range_dim_expected: int
    range_residual: float
    range_consistent: bool
    singular_values: np.ndarray = field(repr=False)


def att_structure(symbol, dom, cod, rank_tol=1e-8, size=None):
    """Kernel and range of the truncated Toeplitz operator with an H-infinity symbol.

    alpha = common inner divisor of the symbol's inner part and omega.  The
    kernel is K_theta intersected with (omega/alpha) H^2; its dimension is
    checked three ways: SVD of X, the degree count, and the rank of the
    evaluation map of K_theta at the zeros of omega/alpha.  The range should
    be alpha K_{omega/alpha}: the functions of K_omega vanishing on alpha's
    zeros, of dimension deg(omega) - deg(alpha).
    """
    if not isinstance(symbol, Symbol):
        raise ClarkError("symbol must be given in inner-outer rational form")
    X = att_operator(symbol, dom, cod, size)
    common = match_zeros(symbol.inner.zeros, cod.theta.zeros)
    alpha = FiniteBlaschke(common, 1.0, require_origin=False)
    quotient = _remove(cod.theta.zeros, common)   # zeros of omega / alpha
    n, m = dom.dim, quotient.size
    U, s, Vh = np.linalg.svd(X.matrix)
    scale = max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > rank_tol * scale))
    ker = [ModelVector(dom, np.conj(Vh[k])) for k in range(rank, n)]
    predicted = max(0, n - m)
    # evaluation of the K_theta basis (with derivatives) at the zeros of omega/alpha
    if m:
        rows = [derivative_rows(dom.basis_values, p, k) for p, k in _cluster(quotient)]
        E = np.vstack(rows)
        se = np.linalg.svd(E, compute_uv=False)
        erank = int(np.sum(se > 1e-9 * max(1.0, se[0])))
    else:
        erank = 0
    closure = erank == m
    # range check: columns of X (functions in K_omega) must vanish on alpha's zeros
    if common.size:
        rows = [derivative_rows(lambda z: cod.basis_values(z) @ X.matrix, p, k)
                for p, k in _cluster(common)]
        rres = float(np.max(np.abs(np.vstack(rows)))) / scale
    else:
        rres = 0.0
    expected = cod.dim - common.size
    consistent = (rank == expected) and rres < 1e-7
    return AttStructure(X, alpha, ker, n - rank, predicted, n - erank, closure, rank,
                        expected, rres, consistent, s)


@dataclass(frozen=True)
class DirectSumReport:
    dims_equal: bool
    cross_gram: OperatorMatrix
    invertible: bool
    smallest_singular_value: float
    condition_number: float
    sup_distance: float
    sufficient_condition: bool     # sup |theta - omega| < 1
    consistent: bool               # sufficient condition implies invertible


def direct_sum_check(dom, cod, size=None, tol=1e-8):
    """Does H^2 split as K_theta (+) omega H^2?  Equivalent to P_{K_omega}|K_theta invertible."""
    G = att_operator(lambda z: np.ones_like(z), dom, cod, size)
    s = np.linalg.svd(G.matrix, compute_uv=False)
    dims_equal = dom.dim == cod.dim
    smin = float(s.min()) if dims_equal else 0.0
    inv = dims_equal and smin > tol
    cond = float(s.max() / smin) if inv else float("inf")
    d = sup_distance(dom.theta, cod.theta)
    suff = d < 1.0
    return DirectSumReport(dims_equal, G, inv, smin, cond, d, suff, (not suff) or inv)


@dataclass(frozen=True)
class AttInverse:
    X: OperatorMatrix
    X_inv: OperatorMatrix
    left_residual: float     # ||X_inv X - I||
    right_residual: float    # ||X X_inv - I||


def att_inverse(symbol, dom, cod, size=None):
    """Inverse through the skew projection onto K_theta along omega H^2.

    For h in H^2, h = k + omega q with k in K_theta, and P_{K_omega} h = G k
    with G the cross Gram matrix; so X^{-1} f = G^{-1} P_{K_omega}(f / g).
    """
    if not isinstance(symbol, Symbol):
        raise ClarkError("symbol must be given in inner-outer rational form")
    rec = symbol.reciprocal()
    ds = direct_sum_check(dom, cod, size)
    if not ds.invertible:
        raise HypothesisError("K_theta and omega H^2 do not form a direct sum",
                              ds.smallest_singular_value)
    X = att_operator(symbol, dom, cod, size)
    A = att_operator(rec, cod, cod, size)
    Xi = np.linalg.solve(ds.cross_gram.matrix, A.matrix)
    n = dom.dim
    left = opnorm(Xi @ X.matrix - np.eye(n))
    right = opnorm(X.matrix @ Xi - np.eye(n))
    return AttInverse(X, OperatorMatrix(cod, dom, Xi), left, right)
