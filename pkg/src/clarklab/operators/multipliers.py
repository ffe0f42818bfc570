"""Multipliers between model spaces and the intertwiners they induce.

An operator X: K_theta -> K_omega with X U_(theta)1 = T X, where
T = S_omega + (., conj(z) omega) u, is multiplication by
g = conj(beta) (u - omega) / (1 - theta), beta = (X* conj(z)omega, conj(z)theta).
Conversely a multiplier g with g1(0) = beta != 0 gives
u = omega + (c - theta) g / conj(beta) and X U_(theta)c = T X.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import ClarkError, HypothesisError
from ..measure import from_turns, unit_point
from ..model_space import ModelSpace, ModelVector
from .basic import OperatorMatrix, clark_unitary, coords_of, opnorm, rank_one_perturbation

MEMBERSHIP_TOL = 1e-8
SEPARATION_TOL = 1e-8


def as_boundary(g):
    """Callable boundary handle for a ModelVector or a function of z."""
    if isinstance(g, ModelVector):
        return g.__call__
    if callable(g):
        return g
    raise ClarkError("symbol must be a ModelVector or a callable of z")


def compress(g, dom, cod, size=None):
    """Matrix of f -> P_{K_omega}(g f) together with per-column residuals ||g e_j - p_j||^2."""
    gfun = as_boundary(g)
    size = size or max(1024, 64 * (dom.dim + cod.dim))

    def H(z):
        # both spaces use the same half-offset grid for a given size
        return gfun(z)[:, None] * dom.grid(z.size)[1]

    C, res, n, change = cod.project_columns(H, size)
    return C, res, n


@dataclass(frozen=True)
class MultiplierResult:
    X: OperatorMatrix
    membership_residual: float
    is_multiplier: bool
    g1_0: complex
    quad_size: int
    flag: str


def multiplier_operator(g, dom, cod, size=None):
    """Multiplication by g from K_theta to K_omega, certified by projection residuals."""
    C, res, n = compress(g, dom, cod, size)
    X = OperatorMatrix(dom, cod, C)
    resid = float(max(0.0, np.max(res)))
    beta = g1_at_zero(X)
    ok = resid < MEMBERSHIP_TOL
    flag = "" if ok else "not a multiplier (projection only)"
    return MultiplierResult(X, resid, ok, beta, n, flag)


def g1_at_zero(X):
    """(X* conj(z)omega, conj(z)theta); equals g1(0) when X is multiplication by g."""
    dom, cod = X.domain, X.codomain
    y = X.matrix.conj().T @ cod.chi_bar_theta().coords
    return complex(np.vdot(dom.chi_bar_theta().coords, y))


@dataclass(frozen=True)
class PerturbationResult:
    u: ModelVector
    T: OperatorMatrix
    X: OperatorMatrix
    intertwining_residual: float
    membership_residual: float
    u_consistency: float
    g1_0: complex


def perturbation_from_multiplier(g, dom, cod, c=1.0, multiplier=None, size=None):
    """u = omega + (c - theta) g / conj(g1(0)) and T = S_omega + (., conj(z) omega) u."""
    c = unit_point(c, 1e-9)
    m = multiplier or multiplier_operator(g, dom, cod, size)
    if not m.is_multiplier:
        raise HypothesisError("g is not a multiplier", m.membership_residual)
    beta = m.g1_0
    if abs(beta) <= 1e-10:
        raise HypothesisError("hypothesis g1(0) != 0 fails", abs(beta))
    gfun = as_boundary(g)
    th, om = dom.theta, cod.theta
    # at the Clark points of omega, omega = 1
    zc = cod.points
    u_vals = 1.0 + (c - th.evaluate(zc)) * gfun(zc) / np.conj(beta)
    u = cod.from_values(u_vals)
    # u must lie in K_omega: project the boundary function and compare
    pr = cod.project(lambda z: om.evaluate(z) + (c - th.evaluate(z)) * gfun(z) / np.conj(beta),
                     size=size or max(1024, 64 * (dom.dim + cod.dim)))
    T = rank_one_perturbation(cod, u)
    U = clark_unitary(dom, c)
    resid = opnorm(m.X.matrix @ U.matrix - T.matrix @ m.X.matrix)
    return PerturbationResult(u, T, m.X, resid, max(0.0, pr.residual_norm),
                              float(np.linalg.norm(pr.p.coords - u.coords)), beta)


def _reexpress(X, dom, c):
    """X in the Clark basis of conj(c) theta (same space, atoms of sigma_c)."""
    J = dom.j_map(c)
    V = np.sqrt(J.measure.weights)[:, None] * J.forward      # unitary change of basis
    new_dom = ModelSpace(dom.theta.with_front(np.conj(c) * dom.theta.front), quadrature_size=dom.quadrature_size)
    # new_dom's atoms are sorted; match them to J.measure's order
    order = [int(np.argmin(np.abs(J.measure.points - p))) for p in new_dom.points]
    V = V[order]
    return new_dom, OperatorMatrix(new_dom, X.codomain, X.matrix @ V.conj().T), V


@dataclass(frozen=True)
class RecoveredMultiplier:
    g: ModelVector
    defect: float
    g1_0: complex
    rotation: complex        # 1 unless coincident spectra forced evaluation on sigma_c'(omega)
    hypothesis_residuals: dict


def _separation(a, b):
    return float(np.min(np.abs(np.subtract.outer(a, b))))


def multiplier_from_intertwiner(X, u, dom, cod, c=1.0, tol=1e-8, allow_rotation=True, size=None):
    """Recover g from an intertwiner X with X U_(theta)c = T X.

    Hypotheses checked: X* conj(z)omega is a multiple beta of conj(z)theta,
    and the intertwining relation.  For c != 1 the computation runs in the
    Clark basis of conj(c) theta, since U_(theta)c = U_(conj(c) theta)1.
    """
    c = unit_point(c, 1e-9)
    if abs(c - 1.0) <= 1e-12:
        c = 1.0 + 0j
    uc = coords_of(u, cod.dim)
    uvec = ModelVector(cod, uc)
    T = rank_one_perturbation(cod, uvec)
    U = clark_unitary(dom, c)
    xnorm = max(1.0, X.norm())
    inter = opnorm(X.matrix @ U.matrix - T.matrix @ X.matrix) / xnorm
    if inter > tol:
        raise HypothesisError("intertwining X U = T X fails", inter)
    work_dom, Xw = dom, X
    if c != 1.0:
        work_dom, Xw, _ = _reexpress(X, dom, c)
    y = Xw.matrix.conj().T @ cod.chi_bar_theta().coords
    cbt = work_dom.chi_bar_theta().coords
    beta = complex(np.vdot(cbt, y))
    prop = float(np.linalg.norm(y - beta * cbt)) / xnorm
    if prop > tol:
        raise HypothesisError("X* conj(z)omega is not proportional to conj(z)theta", prop)
    if abs(beta) <= 1e-10:
        if X.norm() <= tol and np.max(np.abs(uc - cod.sqrt_w)) <= tol:
            # u = 1 at omega's Clark points: the zero operator, g = 0
            return RecoveredMultiplier(cod.zero(), 0.0, beta, 1.0 + 0j,
                                       {"intertwining": inter, "proportionality": prop})
        raise HypothesisError("X* conj(z)omega vanishes", abs(beta))
    th = work_dom.theta
    om = cod.theta
    rotation = 1.0 + 0j
    if _separation(cod.points, work_dom.points) > SEPARATION_TOL:
        g_vals = np.conj(beta) * (uc / cod.sqrt_w - 1.0) / (1.0 - th.evaluate(cod.points))
        g = cod.from_values(g_vals)
    else:
        if not allow_rotation:
            raise HypothesisError("coincident spectra: 1-theta vanishes at evaluation point")
        # evaluate on sigma_c'(omega) instead, with c' chosen to keep away from theta's Clark points
        best = None
        for t in (np.arange(64) + 0.5) / 64:
            cp = complex(from_turns(t))
            eta = om.level_set(cp)
            sep = _separation(eta, work_dom.points)
            if best is None or sep > best[0]:
                best = (sep, cp)
        rotation = best[1]
        J = cod.j_map(rotation)
        eta = J.measure.points
        u_eta = J(uvec)
        g_vals = np.conj(beta) * (u_eta - rotation) / (1.0 - th.evaluate(eta))
        g = J.inverse(g_vals)
    recon = multiplier_operator(g, work_dom, cod, size).X
    defect = opnorm(Xw.matrix - recon.matrix)
    return RecoveredMultiplier(g, defect, beta, rotation,
                               {"intertwining": inter, "proportionality": prop})


def boundary_symmetry(g, dom, cod, size=2048):
    """Estimate c with g = c omega conj(theta) conj(g) on the circle; return (c, residual)."""
    gfun = as_boundary(g)
    z = np.exp(2j * np.pi * (np.arange(size) + 0.5) / size)
    gv = gfun(z)
    rhs = cod.theta.evaluate(z) * np.conj(dom.theta.evaluate(z)) * np.conj(gv)
    ok = np.abs(rhs) > 1e-8 * max(1e-300, np.max(np.abs(rhs)))
    ratio = gv[ok] / rhs[ok]
    c = complex(np.median(ratio.real) + 1j * np.median(ratio.imag))
    c = c / abs(c) if abs(c) > 0 else 1.0
    return c, float(np.max(np.abs(gv - c * rhs)))
