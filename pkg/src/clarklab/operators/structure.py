"""Krylov spaces, cyclicity, the triangular form of V + (., v) u, and
normalization of a rank-one perturbation of a multiplication operator.

All matrices here act on orthonormal coordinates.  For L^2(nu) with atoms
eta_j the coordinates of f are sqrt(nu_j) f(eta_j).
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from ..errors import ClarkError, HypothesisError
from ..measure import AtomicMeasure, weight_transform
from .basic import OperatorMatrix, coords_of, opnorm

RANK_TOL = 1e-10
GROUP_TOL = 1e-10


def _mat(A):
    return A.matrix if isinstance(A, OperatorMatrix) else np.asarray(A, dtype=np.complex128)


def is_diagonal(A, tol=1e-14):
    A = np.asarray(A)
    off = A - np.diag(np.diag(A))
    return bool(np.max(np.abs(off), initial=0.0) <= tol)


def eigen_groups(diag, tol=GROUP_TOL):
    """Indices of a diagonal grouped by (numerically) equal entries, first-appearance order."""
    groups = []
    for i, d in enumerate(diag):
        for g in groups:
            if abs(diag[g[0]] - d) <= tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def krylov_basis(A, x, tol=RANK_TOL):
    """Orthonormal basis (columns) of span{A^k x}.

    For diagonal A the space is spanned by the pieces of x on each
    eigenspace, which avoids ill-conditioned power sequences.  Otherwise
    Arnoldi with one reorthogonalization pass.
    """
    A = _mat(A)
    x = np.asarray(x, dtype=np.complex128)
    n = A.shape[0]
    xn = np.linalg.norm(x)
    if xn <= tol:
        return np.zeros((n, 0), dtype=np.complex128)
    if is_diagonal(A):
        cols = []
        for g in eigen_groups(np.diag(A)):
            piece = np.zeros(n, dtype=np.complex128)
            piece[g] = x[g]
            nrm = np.linalg.norm(piece)
            if nrm > tol * xn:
                cols.append(piece / nrm)
        return np.array(cols).T if cols else np.zeros((n, 0), dtype=np.complex128)
    Q = [x / xn]
    while len(Q) < n:
        w = A @ Q[-1]
        wn = np.linalg.norm(w)
        for _ in range(2):
            for q in Q:
                w = w - np.vdot(q, w) * q
        r = np.linalg.norm(w)
        if r <= tol * max(1.0, wn):
            break
        Q.append(w / r)
    return np.array(Q).T


def subspace_distance(P, Q):
    """Spectral norm of the difference of orthogonal projections."""
    if P.shape[1] == 0 and Q.shape[1] == 0:
        return 0.0
    return opnorm(P @ P.conj().T - Q @ Q.conj().T)


@dataclass
class KrylovResult:
    M_basis: np.ndarray
    complement: np.ndarray
    T_on_M: np.ndarray
    checks: dict

    @property
    def dim(self):
        return self.M_basis.shape[1]

    @property
    def compression_check(self):
        return max(self.checks.values())


def krylov_decompose(R, u, v):
    """M = span{R^n u} and the three identities relating T = R + (., v) u to R on M and M-perp."""
    R = _mat(R)
    n = R.shape[0]
    u = coords_of(u, n)
    v = coords_of(v, n)
    T = R + np.outer(u, np.conj(v))
    Q = krylov_basis(R, u)
    Qt = krylov_basis(T, u)
    Qp = null_space(Q.conj().T) if Q.shape[1] else np.eye(n, dtype=np.complex128)
    Pv = Q @ (Q.conj().T @ v)
    on_M = opnorm(T @ Q - (R @ Q + np.outer(u, np.conj(Pv) @ Q)))
    if Qp.shape[1]:
        comp = opnorm(Qp.conj().T @ (T - R) @ Qp)
    else:
        comp = 0.0
    checks = {
        "same_space_under_T": subspace_distance(Q, Qt),
        "restriction_to_M": on_M,
        "compression_to_M_perp": comp,
    }
    return KrylovResult(Q, Qp, Q.conj().T @ T @ Q, checks)


@dataclass(frozen=True)
class CyclicityReport:
    cyclic: bool
    krylov_rank: int


def cyclicity_check(V, x):
    V = _mat(V)
    if V.shape[0] != V.shape[1]:
        raise ClarkError("operator must be square")
    r = krylov_basis(V, coords_of(x, V.shape[0])).shape[1]
    return CyclicityReport(r == V.shape[0], r)


@dataclass
class Triangular:
    W: np.ndarray            # unitary, columns = new basis
    B: np.ndarray            # W^H T W, block upper triangular
    sizes: tuple             # (dim V1, dim T1, dim V2)
    T1: np.ndarray
    nu: AtomicMeasure        # spectral atoms of the T1 block (None when empty)
    phi: np.ndarray          # T1 = U_nu + (., psi) phi, function values at nu's atoms
    psi: np.ndarray
    residual: float          # ||W B W^H - T||
    lower_block: float       # largest entry below the block diagonal

    def blocks(self):
        a, b, c = self.sizes
        return (self.B[:a, :a], self.B[a:a + b, a:a + b], self.B[a + b:, a + b:])


def triangularize_reductive(V_diag, u, v, tol=RANK_TOL):
    """T = V + (., v) u with V diagonal unitary, put in the form
    [[V1, *, *], [0, T1, *], [0, 0, V2]] with T1 = U_nu + (., psi) phi.

    M = span{V^n u} has one basis vector q_G = u_G/|u_G| per eigenspace G
    met by u; q_G lies in the T1 part when (q_G, v) != 0 and in V1
    otherwise.  V2 acts on the orthogonal complement of M.
    """
    V = _mat(V_diag) if not np.ndim(V_diag) == 1 else np.diag(np.asarray(V_diag, dtype=np.complex128))
    if not is_diagonal(V):
        raise ClarkError("V must be diagonal")
    lam = np.diag(V)
    n = lam.size
    if np.max(np.abs(np.abs(lam) - 1.0)) > 1e-10:
        raise ClarkError("V must be unitary")
    u = coords_of(u, n)
    v = coords_of(v, n)
    T = V + np.outer(u, np.conj(v))
    un = np.linalg.norm(u)
    first, mid, rest = [], [], []
    mid_lam, mid_unorm, mid_psi = [], [], []
    for g in eigen_groups(lam):
        ug = np.zeros(n, dtype=np.complex128)
        ug[g] = u[g]
        ugn = np.linalg.norm(ug)
        basis_g = np.eye(n, dtype=np.complex128)[:, g]
        if ugn > tol * max(1.0, un):
            q = ug / ugn
            psi_t = np.vdot(q, v)          # coefficient of q in P_M v
            if abs(psi_t) > tol * max(1.0, np.linalg.norm(v)):
                mid.append(q)
                mid_lam.append(lam[g[0]])
                mid_unorm.append(ugn)
                mid_psi.append(psi_t)
            else:
                first.append(q)
            comp = null_space(q[g].conj()[None, :]) if len(g) > 1 else np.zeros((1, 0))
            for k in range(comp.shape[1]):
                y = np.zeros(n, dtype=np.complex128)
                y[g] = comp[:, k]
                rest.append(y)
        else:
            rest.extend(basis_g.T)
    cols = first + mid + rest
    W = np.array(cols).T if cols else np.zeros((n, 0), dtype=np.complex128)
    B = W.conj().T @ T @ W
    a, b = len(first), len(mid)
    sizes = (a, b, n - a - b)
    low = 0.0
    if a + b < n:
        low = max(low, float(np.max(np.abs(B[a + b:, : a + b]))))
    if b and a:
        low = max(low, float(np.max(np.abs(B[a:a + b, :a]))))
    resid = opnorm(W @ B @ W.conj().T - T)
    if b:
        unorm = np.array(mid_unorm)
        w = unorm ** 2 / np.sum(unorm ** 2)
        nu = AtomicMeasure(np.array(mid_lam), w, label="triangular block")
        sq = np.sqrt(w)
        phi = np.full(b, np.sqrt(np.sum(unorm ** 2)), dtype=np.complex128)  # |u| at every atom
        psi = np.array(mid_psi) / sq
        T1 = B[a:a + b, a:a + b]
    else:
        nu, phi, psi, T1 = None, np.zeros(0), np.zeros(0), np.zeros((0, 0))
    return Triangular(W, B, sizes, T1, nu, phi, psi, resid, low)


def multiplication_perturbation(nu, phi, psi):
    """Coordinates of U_nu + (., psi) phi on L^2(nu)."""
    s = np.sqrt(nu.weights)
    return np.diag(nu.points) + np.outer(s * phi, np.conj(s * psi))


@dataclass
class Normalized:
    mu1: AtomicMeasure
    nu1: AtomicMeasure
    phi1: np.ndarray          # values at nu1's atoms
    X: np.ndarray             # L^2(mu1) -> L^2(nu1), orthonormal coordinates
    T1: np.ndarray            # U_nu1 + (., conj(z)) phi1
    Z1: np.ndarray            # diagonal of the unitary L^2(nu) -> L^2(nu1), coordinates
    Z2: np.ndarray            # diagonal of the unitary L^2(mu) -> L^2(mu1), coordinates
    a1: float
    a2: float
    residuals: dict


def normalize_pair(nu, phi, psi, Y, mu):
    """Normalize T = U_nu + (., psi) phi with T Y = Y U_mu.

    Returns mu1, nu1, phi1 and X with X* conj(z) = conj(z) and
    X U_mu1 = T1 X, T1 = U_nu1 + (., conj(z)) phi1, T1 unitarily equivalent
    to T through Z1.  ``Y`` maps orthonormal coordinates of L^2(mu) to those
    of L^2(nu).
    """
    phi = np.asarray(phi, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    Y = _mat(Y)
    if np.any(np.abs(psi) <= 1e-12):
        raise HypothesisError("psi vanishes at an atom of nu")
    T = multiplication_perturbation(nu, phi, psi)
    Umu = np.diag(mu.points)
    pre = opnorm(T @ Y - Y @ Umu)
    snu, smu = np.sqrt(nu.weights), np.sqrt(mu.weights)
    nu1, z1_vals, a1 = weight_transform(nu, psi)
    # as a map of orthonormal coordinates, f -> sqrt(a1) conj(z) f / psi is conj(eta)|psi|/psi
    Z1 = np.conj(nu.points) * np.abs(psi) / psi
    phi1 = a1 * np.conj(nu.points) * phi / psi
    ystar_psi = (Y.conj().T @ (snu * psi)) / smu / np.sqrt(a1)     # values of Y* psi / sqrt(a1)
    if np.any(np.abs(ystar_psi) <= 1e-12):
        raise HypothesisError("Y* psi vanishes at an atom of mu")
    mu1, z2_vals, a2 = weight_transform(mu, ystar_psi)
    Z2 = np.conj(mu.points) * np.abs(ystar_psi) / ystar_psi
    X = (Z1[:, None] * Y * np.conj(Z2)[None, :]) / np.sqrt(a2)
    T1 = multiplication_perturbation(nu1, phi1, np.conj(nu1.points))
    chi_nu1 = np.sqrt(nu1.weights) * np.conj(nu1.points)
    chi_mu1 = np.sqrt(mu1.weights) * np.conj(mu1.points)
    res = {
        "precondition_TY_YU": pre,
        "adjoint_fixes_conj_z": float(np.linalg.norm(X.conj().T @ chi_nu1 - chi_mu1)),
        "intertwining": opnorm(X @ np.diag(mu1.points) - T1 @ X),
        "unitary_equivalence": opnorm(Z1[:, None] * T * np.conj(Z1)[None, :] - T1),
    }
    return Normalized(mu1, nu1, phi1, X, T1, Z1, Z2, a1, a2, res)
