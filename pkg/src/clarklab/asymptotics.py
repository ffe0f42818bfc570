"""Norms of powers: sweeps, Cesaro unitary asymptotes and inequality certificates.

True suprema over all n are not computable.  A sweep gives lower bounds
(m_plus, m_minus); the eigenvector condition number kappa gives an upper
bound when T is diagonalizable with spectrum on the circle.
"""
import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClarkError, HypothesisError
from .measure import to_turns
from .operators.basic import OperatorMatrix, opnorm

KAPPA_CAP = 1e12
INVERTIBLE_TOL = 1e-12
CIRCLE_TOL = 1e-8
DIVERGENCE = 1e12
PASS_SLACK = 1e-9


def _mat(T):
    if isinstance(T, OperatorMatrix):
        return np.asarray(T.matrix)
    return np.asarray(T, dtype=np.complex128)


def eigen_condition(T):
    """Upper bound for sup over n in Z of ||T^n|| from an eigendecomposition.

    Returns inf when T is not diagonalizable at the cap or has spectrum off
    the circle.  Column scaling of the eigenvector matrix is balanced
    once, and the smaller of the two condition numbers is kept.
    """
    A = _mat(T)
    if A.shape[0] == 0:
        return 1.0
    lam, V = np.linalg.eig(A)
    if np.max(np.abs(np.abs(lam) - 1.0)) > CIRCLE_TOL:
        return math.inf
    c1 = np.linalg.cond(V)
    if not np.isfinite(c1) or c1 >= KAPPA_CAP:
        return math.inf
    Vi = np.linalg.inv(V)
    d = np.sqrt(np.linalg.norm(Vi, axis=1) / np.linalg.norm(V, axis=0))
    c2 = np.linalg.cond(V * d[None, :])
    return float(min(c1, c2))


@dataclass
class PowerNormReport:
    m_plus: float
    m_minus: float
    n_sweep: int
    kappa: float
    stabilized: bool
    checks: dict = field(default_factory=dict)
    norms_plus: np.ndarray = field(default=None, repr=False)
    norms_minus: np.ndarray = field(default=None, repr=False)
    spectrum_on_circle: bool = True
    diverged: bool = False

    def to_json(self):
        def num(x):
            return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")

        return {
            "m_plus": num(self.m_plus),
            "m_minus": num(self.m_minus),
            "n_sweep": self.n_sweep,
            "kappa": num(self.kappa),
            "stabilized": self.stabilized,
            "spectrum_on_circle": self.spectrum_on_circle,
            "diverged": self.diverged,
            "checks": {k: {kk: (num(vv) if isinstance(vv, float) else vv) for kk, vv in v.items()}
                       for k, v in sorted(self.checks.items())},
        }

    def to_csv(self):
        """Rows (n, ||T^n||, ||T^-n||); empty cells past a divergence cutoff."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "norm_plus", "norm_minus"])
        npl = self.norms_plus if self.norms_plus is not None else np.zeros(0)
        nmi = self.norms_minus if self.norms_minus is not None else np.zeros(0)
        for n in range(max(npl.size, nmi.size)):
            a = repr(float(npl[n])) if n < npl.size else ""
            b = repr(float(nmi[n])) if n < nmi.size else ""
            w.writerow([n, a, b])
        return buf.getvalue()


def _sweep(A, n_sweep):
    dim = A.shape[0]
    out = np.empty(n_sweep + 1)
    P = np.eye(dim, dtype=np.complex128)
    for n in range(n_sweep + 1):
        out[n] = opnorm(P) if dim else 1.0
        if out[n] > DIVERGENCE:
            return out[: n + 1], True
        P = A @ P
    return out, False


def _stabilized(norms):
    if norms.size < 4:
        return True
    top = norms.max()
    return bool(norms[3 * (norms.size - 1) // 4:].max() >= top - 1e-6 * max(1.0, top))


def power_sweep(T, n_sweep=2000, inverse=True):
    """Spectral norms of T^n and T^-n for 0 <= n <= n_sweep."""
    A = _mat(T)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ClarkError("operator must be square")
    n_sweep = int(n_sweep)
    if n_sweep < 0:
        raise ClarkError("n_sweep must be nonnegative")
    plus, div_p = _sweep(A, n_sweep)
    minus, div_m = np.ones(1), False
    if inverse:
        if A.shape[0]:
            smin = np.linalg.svd(A, compute_uv=False).min()
            if smin <= INVERTIBLE_TOL:
                raise HypothesisError("T is not invertible", float(smin))
            minus, div_m = _sweep(np.linalg.inv(A), n_sweep)
        else:
            minus = np.ones(n_sweep + 1)
    on_circle = True
    if A.shape[0]:
        on_circle = bool(np.max(np.abs(np.abs(np.linalg.eigvals(A)) - 1.0)) <= CIRCLE_TOL)
    stab = _stabilized(plus) and (not inverse or _stabilized(minus)) and not (div_p or div_m)
    return PowerNormReport(
        m_plus=float(plus.max()),
        m_minus=float(minus.max()),
        n_sweep=n_sweep,
        kappa=eigen_condition(A),
        stabilized=stab,
        norms_plus=plus,
        norms_minus=minus if inverse else None,
        spectrum_on_circle=on_circle,
        diverged=div_p or div_m,
    )


CHECKS = ("inverse_quadratic", "inverse_fifth", "toeplitz_quadratic", "triangular", "main")


def _bound(which, M, C=None, t1_minus=None):
    if which == "inverse_quadratic":
        return C * M ** 2
    if which == "inverse_fifth":
        return M ** 5
    if which == "toeplitz_quadratic":
        return M ** 2
    if which == "triangular":
        return t1_minus * (2 * M ** 2 + 1)
    if which == "main":
        return (2 * M ** 2 + 1) * M ** 5
    raise ClarkError(f"unknown inequality {which!r}")


def certify(report, which, C=None, t1_report=None):
    """Check sup ||T^-n|| <= bound(sup ||T^n||) for the named inequality.

    ``pass`` compares the swept m_minus with the bound evaluated at the
    swept m_plus (a lower bound of the true sup, so the strictest reading).
    ``certified`` additionally holds when the upper bound kappa for the
    left side already sits below that bound, which proves the inequality
    for this T.  ``caveat`` marks sweeps that had not stabilized.
    The record is stored in ``report.checks``.
    """
    if which not in CHECKS:
        raise ClarkError(f"unknown inequality {which!r}")
    if which == "inverse_quadratic" and C is None:
        raise ClarkError("inverse_quadratic needs the constant C")
    t1_minus = None
    if which == "triangular":
        if t1_report is None:
            raise ClarkError("triangular needs the sweep of the T1 block")
        t1_minus = t1_report.m_minus
    M = report.m_plus
    bound = float(_bound(which, M, C, t1_minus))
    observed = report.m_minus
    rec = {
        "bound": bound,
        "observed": observed,
        "pass": bool(observed <= bound * (1 + PASS_SLACK) + PASS_SLACK),
        "margin": bound - observed,
        "bound_at_kappa": float(_bound(which, report.kappa, C, t1_minus)) if math.isfinite(report.kappa) else math.inf,
        "certified": bool(report.kappa <= bound * (1 + PASS_SLACK) + PASS_SLACK),
        "caveat": "" if report.stabilized else "sweep not stabilized",
    }
    report.checks[which] = rec
    return rec


def block_inverse_bound(T, split, n):
    """||T^-n|| against max(1,||T1^-n||) max(1,||T2^-n||) sqrt(max(2, 2||T^n||^2 + 1))
    for T upper block triangular with diagonal blocks T1 = T[:split,:split], T2.
    ``n`` may be an integer or a sequence; returns a record or a list of records.
    """
    A = _mat(T)
    k = int(split)
    if not 0 < k < A.shape[0]:
        raise ClarkError("split must leave two nonempty blocks")
    low = np.max(np.abs(A[k:, :k]))
    if low > 1e-12 * max(1.0, opnorm(A)):
        raise ClarkError("operator is not block upper triangular")
    T1, T2 = A[:k, :k], A[k:, k:]
    for B in (T1, T2):
        if np.linalg.svd(B, compute_uv=False).min() <= INVERTIBLE_TOL:
            raise HypothesisError("singular diagonal block")
    Ai, T1i, T2i = np.linalg.inv(A), np.linalg.inv(T1), np.linalg.inv(T2)
    single = np.ndim(n) == 0
    out = []
    for m in np.atleast_1d(n):
        m = int(m)
        mp = np.linalg.matrix_power
        lhs = opnorm(mp(Ai, m))
        rhs = (max(1.0, opnorm(mp(T1i, m))) * max(1.0, opnorm(mp(T2i, m)))
               * math.sqrt(max(2.0, 2 * opnorm(mp(A, m)) ** 2 + 1)))
        out.append({"n": m, "lhs": lhs, "rhs": rhs, "pass": bool(lhs <= rhs + PASS_SLACK)})
    return out[0] if single else out


@dataclass
class CesaroResult:
    Q: np.ndarray
    Y: np.ndarray
    U_prime: np.ndarray
    n_avg: int
    residuals: dict


def _window_sums(A, log2_n):
    """S = sum A_k, F = sum k A_k, G = sum k^2 A_k over 1 <= k <= N = 2^log2_n,
    A_k = (T^k)* T^k.  Doubling uses A_{a+k} = (T^a)* A_k T^a.
    """
    P = A.copy()
    S = P.conj().T @ P
    F = S.copy()
    G = S.copy()
    a = 1
    for _ in range(log2_n):
        Ph = P.conj().T
        S, F, G = (S + Ph @ S @ P,
                   F + Ph @ (a * S + F) @ P,
                   G + Ph @ (a * a * S + 2 * a * F + G) @ P)
        P = P @ P
        a *= 2
    return S, F, G


def _cesaro_mean(A, log2_n, order):
    N = 2 ** log2_n
    S, F, G = _window_sums(A, log2_n)
    if order == 1:
        Q = S / N
    else:
        # parabolic window k (N - k): vanishes at both ends, so oscillating
        # terms leave an O(1/N^2) error instead of O(1/N)
        Q = (N * F - G) / (N * (N * N - 1.0) / 6.0)
    return 0.5 * (Q + Q.conj().T)


def cesaro_asymptote(T, n_avg=2 ** 20, order=2, tol=1e-6):
    """Q = lim mean of (T^n)* T^n, Y = Q^(1/2), U' = Y T Y^-1 unitary.

    N is rounded up to a power of two and doubled once as a convergence
    check; ``tol`` bounds the relative change.  ``order=1`` is the plain average; ``order=2`` weights A_k by
    k (N - k), a regular mean with the same limit that converges like 1/N^2
    for almost periodic sequences.
    """
    A = _mat(T)
    if order not in (1, 2):
        raise ClarkError("order must be 1 or 2")
    log2_n = max(1, int(math.ceil(math.log2(max(2, int(n_avg))))))
    Q = _cesaro_mean(A, log2_n, order)
    Q2 = _cesaro_mean(A, log2_n + 1, order)
    # Q scales like ||T^n||^2, so the drift is measured relative to it
    drift = opnorm(Q2 - Q) / max(1.0, opnorm(Q2))
    if not np.all(np.isfinite(Q2)) or drift > tol:
        raise HypothesisError("Cesaro average not converged", float(drift))
    w, E = np.linalg.eigh(Q2)
    if w.min() <= 0:
        raise HypothesisError("Cesaro limit is not positive definite", float(w.min()))
    Y = (E * np.sqrt(w)) @ E.conj().T
    Yi = (E / np.sqrt(w)) @ E.conj().T
    Up = Y @ A @ Yi
    dim = A.shape[0]
    res = {
        "drift": drift,
        "unitarity_defect": opnorm(Up.conj().T @ Up - np.eye(dim)),
        "norm_Y": opnorm(Y),
        "norm_Y_inv": opnorm(Yi),
    }
    return CesaroResult(Q2, Y, Up, 2 ** (log2_n + 1), res)


def contracting_return_times(times, deviations, kappa):
    """Subsequence of return times along which ||T^n - R|| provably decreases.

    With D = U^n - W diagonal, dev/kappa <= ||X D X^-1|| <= kappa dev, so a
    drop of the deviation by more than kappa^2 per step forces a drop of
    the residual.  Selection uses only the deviations and kappa = cond(X).
    """
    times = np.asarray(times, dtype=np.int64)
    dev = np.asarray(deviations, dtype=np.float64)
    if times.shape != dev.shape:
        raise ClarkError("need one deviation per return time")
    keep = []
    for i in range(times.size):
        if not keep or dev[i] * kappa ** 2 * (1 + 1e-9) < dev[keep[-1]]:
            keep.append(i)
    return times[keep], dev[keep]


@dataclass
class ReturnLimit:
    R: np.ndarray
    residuals: np.ndarray       # ||T^{n_k} - R|| along the return times
    envelope: np.ndarray        # kappa(X) * max |lambda^{n_k} - xi|
    checks: dict


def return_time_limit(U_diag, W_diag, T, X, return_times, M=None, samples=20, seed=0):
    """The limit R of T^{n_k} when X U = T X and U^{n_k} -> W, both diagonal unitary.

    R = X W X^-1.  Residuals are compared with the exact envelope
    kappa(X) max_j |lambda_j^{n_k} - xi_j|, and ||R^-1 x|| <= M^3 ||R x||
    is spot-checked on random x.
    """
    lam = np.asarray(U_diag, dtype=np.complex128)
    xi = np.asarray(W_diag, dtype=np.complex128)
    A, Xm = _mat(T), _mat(X)
    for d in (lam, xi):
        if np.max(np.abs(np.abs(d) - 1.0)) > 1e-10:
            raise ClarkError("U and W must be diagonal unitary")
    scale = max(1.0, opnorm(Xm)) * max(1.0, opnorm(A))
    inter = opnorm(Xm * lam[None, :] - A @ Xm) / scale
    if inter > 1e-9:
        raise HypothesisError("intertwining X U = T X fails", inter)
    times = np.asarray(return_times, dtype=np.int64)
    if times.size == 0:
        raise ClarkError("no return times")
    Xi = np.linalg.inv(Xm)
    R = (Xm * xi[None, :]) @ Xi
    kx = np.linalg.cond(Xm)
    res = np.array([opnorm(np.linalg.matrix_power(A, int(n)) - R) for n in times])
    dev = np.array([float(np.max(np.abs(lam ** int(n) - xi))) for n in times])
    env = kx * dev
    slack = 1e-9 * kx * max(1.0, opnorm(R))
    if M is None:
        M = power_sweep(A, 2000, inverse=False).m_plus
    rng = np.random.default_rng(seed)
    Ri = np.linalg.inv(R)
    ratio = 0.0
    for _ in range(samples):
        x = rng.normal(size=A.shape[0]) + 1j * rng.normal(size=A.shape[0])
        ratio = max(ratio, np.linalg.norm(Ri @ x) / np.linalg.norm(R @ x))
    checks = {
        "intertwining": inter,
        "limit_intertwining": opnorm(R @ Xm - Xm * xi[None, :]) / scale,
        "envelope_ok": bool(np.all(res <= env + slack)),
        "monotone": bool(np.all(np.diff(res) <= slack)),
        "final_residual": float(res[-1]),
        "final_tolerance": float(env[-1] + slack),
        "inverse_ratio": float(ratio),
        "inverse_ratio_bound": float(M ** 3),
        "inverse_ratio_ok": bool(ratio <= M ** 3 * (1 + PASS_SLACK)),
    }
    return ReturnLimit(R, res, env, checks)


@dataclass
class ReturnNormIdentities:
    lhs_sequence_plus: np.ndarray
    lhs_sequence_minus: np.ndarray
    rhs_plus: float
    rhs_minus: float
    deviations: np.ndarray
    tolerance: float
    converged: bool


def return_norm_identities(space, g, p, return_times, gamma_targets=None, size=None):
    """Bracketed norm sequences along return times against their limits.

    ``space`` is K_theta in its Clark basis (atoms of mu = sigma_1), g a
    boundary function, p polynomial coefficients (lowest first).  With
    A h = g J^-1 h and A_p h = p g J^-1 h in L^2(m):

        plus_k  = ||A(z^{n_k} p)||^2  - ||A_p(z^{-n_k})||^2
        minus_k = ||A(z^{-n_k} p)||^2 - ||A_p(z^{-n_k})||^2

    with limits ||A(gamma p)||^2 - ||A_p(conj gamma)||^2 and the same with
    conj(gamma) in the first term.  The tolerance is the Lipschitz bound
    2 dev (||A||^2 ||p||^2 + ||A_p||^2) at the last deviation.
    """
    times = np.asarray(return_times, dtype=np.int64)
    if times.size == 0:
        raise ClarkError("no return times")
    zeta, w = space.points, space.weights
    gam = np.ones(space.dim, dtype=np.complex128) if gamma_targets is None \
        else np.asarray(gamma_targets, dtype=np.complex128)
    size = size or max(2048, 128 * space.dim)
    z, B = space.grid(size)
    gz = np.asarray(g(z), dtype=np.complex128)
    pz = np.polynomial.polynomial.polyval(z, np.asarray(p, dtype=np.complex128))
    # h on atoms -> coordinates sqrt(w) h -> boundary values on the grid
    sq = np.sqrt(w)
    A = gz[:, None] * B * sq[None, :] / math.sqrt(size)
    Ap = pz[:, None] * A
    p_atoms = np.polynomial.polynomial.polyval(zeta, np.asarray(p, dtype=np.complex128))

    # ||M h||^2 = h* (M* M) h with small Gram matrices, evaluated over all times at once
    GA, GAp = A.conj().T @ A, Ap.conj().T @ Ap

    def nrm2(M, h):
        return float(np.sum(np.abs(M @ h) ** 2))

    def quad(G, H):
        return np.einsum("ti,ij,tj->t", H.conj(), G, H).real

    plus, minus, devs = [], [], []
    turns = to_turns(zeta)
    for lo in range(0, times.size, 1 << 16):
        n = times[lo:lo + (1 << 16)]
        # exact phases from turns, reduced mod 1 before exponentiating
        zn = np.exp(2j * np.pi * np.mod(np.outer(n, turns), 1.0))
        zi = np.conj(zn)
        tail = quad(GAp, zi)
        plus.append(quad(GA, zn * p_atoms) - tail)
        minus.append(quad(GA, zi * p_atoms) - tail)
        devs.append(np.max(np.abs(zn - gam[None, :]), axis=1))
    plus, minus, devs = np.concatenate(plus), np.concatenate(minus), np.concatenate(devs)
    tail = nrm2(Ap, np.conj(gam))
    rhs_p = nrm2(A, gam * p_atoms) - tail
    rhs_m = nrm2(A, np.conj(gam) * p_atoms) - tail
    # norms of h -> A h from L^2(mu) (coordinates sqrt(w) h)
    nA = opnorm(gz[:, None] * B / math.sqrt(size))
    nAp = opnorm(pz[:, None] * gz[:, None] * B / math.sqrt(size))
    pn2 = float(np.sum(w * np.abs(p_atoms) ** 2))
    tol = 2 * devs[-1] * (nA ** 2 * pn2 + nAp ** 2) + 1e-10 * (1 + abs(rhs_p) + abs(rhs_m))
    conv = abs(plus[-1] - rhs_p) <= tol and abs(minus[-1] - rhs_m) <= tol
    return ReturnNormIdentities(plus, minus, rhs_p, rhs_m, devs, float(tol), bool(conv))
