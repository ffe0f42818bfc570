"""Worked constructions, random instances and the end-to-end norm pipeline.

Three kinds of instance:

* ``crofoot``: omega = z k*_lambda / k_lambda, g = 1 / k_lambda, u and T from
  the multiplier; X U_(theta)c = T X.
* ``clark_weight``: nu = sigma_c, a weight phi on its atoms,
  d nu_1 = |phi|^-2 d nu and omega built from nu_1; X = conj(c) J^-1 Z Y J.
* ``triangular``: T = V + (., v) u with V diagonal unitary and T similar to
  a unitary, the input of :func:`reduction_pipeline`.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import certify, power_sweep
from .blaschke import FiniteBlaschke, from_clark_measure
from .errors import ClarkError, HypothesisError
from .measure import AtomicMeasure, from_turns, to_turns, unit_point
from .model_space import ModelSpace, ModelVector
from .operators.basic import (
    OperatorMatrix,
    RankOneData,
    clark_unitary,
    isometry_classification,
    opnorm,
    rank_one_perturbation,
    rank_one_resolvent,
)
from .operators.multipliers import (
    multiplier_from_intertwiner,
    multiplier_operator,
    perturbation_from_multiplier,
)
from .operators.structure import multiplication_perturbation, normalize_pair, triangularize_reductive

CONSTRUCTION_TOL = 1e-8
MAX_ATTEMPTS = 20
KINDS = ("crofoot", "clark_weight", "triangular")


def _cjson(z):
    return [float(np.real(z)), float(np.imag(z))]


def _carr(a):
    return [_cjson(x) for x in np.asarray(a, dtype=np.complex128).ravel()]


def _from_carr(a):
    v = np.array(a, dtype=np.float64).reshape(-1, 2)
    return v[:, 0] + 1j * v[:, 1]


@dataclass
class Instance:
    kind: str
    params: dict
    theta: FiniteBlaschke = None
    omega: FiniteBlaschke = None
    dom: ModelSpace = None
    cod: ModelSpace = None
    g: ModelVector = None
    u: ModelVector = None
    c: complex = 1.0          # X U_(theta)c = T X
    X: OperatorMatrix = None
    T: OperatorMatrix = None
    residuals: dict = field(default_factory=dict)
    provenance: str = ""
    seed: int = None
    extra: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.T.shape[0]

    def to_json(self):
        out = {
            "kind": self.kind,
            "params": self.params,
            "provenance": self.provenance,
            "seed": self.seed,
            "c_arg_over_2pi": float(to_turns(self.c)),
            "T": _carr(self.T.matrix),
            "X": _carr(self.X.matrix),
            "dim": self.dim,
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
        }
        if self.kind != "triangular":
            out.update({
                "theta": self.theta.to_json(),
                "omega": self.omega.to_json(),
                "theta_clark": self.dom.clark.to_json(),
                "omega_clark": self.cod.clark.to_json(),
                "g": _carr(self.g.coords),
                "u": _carr(self.u.coords),
            })
        else:
            out.update({k: _carr(v) for k, v in sorted(self.extra.items())})
        return out

    @classmethod
    def from_json(cls, obj):
        kind = obj.get("kind")
        if kind not in KINDS:
            raise ClarkError(f"unknown instance kind {kind!r}")
        n = int(obj["dim"])
        c = complex(from_turns(obj.get("c_arg_over_2pi", 0.0)))
        inst = cls(kind, obj.get("params", {}), c=c, provenance=obj.get("provenance", ""),
                   seed=obj.get("seed"), residuals=dict(obj.get("residuals", {})))
        if kind == "triangular":
            inst.extra = {k: _from_carr(obj[k]) for k in ("V", "u", "v")}
            inst.T = OperatorMatrix(n, n, _from_carr(obj["T"]).reshape(n, n))
            inst.X = OperatorMatrix(n, n, _from_carr(obj["X"]).reshape(n, n))
            return inst
        th = FiniteBlaschke.from_json(obj["theta"])
        om = FiniteBlaschke.from_json(obj["omega"])
        dom = ModelSpace(th, AtomicMeasure.from_json(obj["theta_clark"]))
        cod = ModelSpace(om, AtomicMeasure.from_json(obj["omega_clark"]))
        inst.theta, inst.omega, inst.dom, inst.cod = th, om, dom, cod
        inst.g = ModelVector(cod, _from_carr(obj["g"]))
        inst.u = ModelVector(cod, _from_carr(obj["u"]))
        inst.X = OperatorMatrix(dom, cod, _from_carr(obj["X"]).reshape(n, n))
        inst.T = OperatorMatrix(cod, cod, _from_carr(obj["T"]).reshape(n, n))
        return inst

    def replay(self):
        """Rebuild from the stored parameters."""
        p = self.params
        if self.kind == "crofoot":
            out = example_crofoot(FiniteBlaschke.from_json(p["theta"]), complex(*p["lambda"]),
                                  from_turns(p["c_arg_over_2pi"]))
        elif self.kind == "clark_weight":
            out = example_clark_weight(FiniteBlaschke.from_json(p["theta"]),
                                       from_turns(p["c_arg_over_2pi"]), _from_carr(p["phi"]))
        else:
            out = triangular_instance(_from_carr(p["V"]), _from_carr(p["u"]), _from_carr(p["v"]))
        out.provenance, out.seed = self.provenance, self.seed
        return out


def _align_front(zeros, target, probe=0.37 + 0.21j):
    b = FiniteBlaschke(zeros, 1.0)
    r = target(np.array([probe]))[0] / b.evaluate(np.array([probe]))[0]
    return b.with_front(r / abs(r))


def example_crofoot(theta, lam, c=1.0):
    """omega = z k*_lambda / k_lambda and g = 1 / k_lambda."""
    lam = complex(lam)
    c = unit_point(c, 1e-9)
    if not 0 < abs(lam) < 1:
        raise ClarkError("need 0 < |lambda| < 1")
    tl = complex(theta.evaluate(lam))
    if abs(tl) <= 1e-10:
        raise ClarkError("degenerate lambda: theta(lambda) = 0")
    others = theta.solve_value(tl)
    others = np.delete(others, int(np.argmin(np.abs(others - lam))))
    dom = ModelSpace(theta)

    def k(z):
        return (1.0 - np.conj(tl) * theta.evaluate(z)) / (1.0 - np.conj(lam) * z)

    def target(z):
        # z k*/k with k* = (theta - theta(lambda)) / (z - lambda)
        return z * (theta.evaluate(z) - tl) / (z - lam) / k(z)

    omega = _align_front(np.r_[0.0, others], target)
    cod = ModelSpace(omega)
    zt = 0.8 * np.exp(2j * np.pi * np.arange(16) / 16 + 0.1j)
    inner_defect = float(np.max(np.abs(omega.evaluate(zt) - target(zt))))

    def g(z):
        return 1.0 / k(z)

    m = multiplier_operator(g, dom, cod)
    pr = perturbation_from_multiplier(g, dom, cod, c, m)
    gv = cod.project(g).p
    card = int(np.sum(np.abs(theta.solve_value(tl)) < 1))
    cond = float(np.linalg.cond(m.X.matrix))
    res = {
        "omega_formula": inner_defect,
        "membership": m.membership_residual,
        "intertwining": pr.intertwining_residual,
        "u_membership": pr.membership_residual,
        "u_consistency": pr.u_consistency,
        "condition_X": cond,
    }
    inst = Instance("crofoot", {
        "theta": theta.to_json(), "lambda": _cjson(lam), "c_arg_over_2pi": float(to_turns(c)),
    }, theta, omega, dom, cod, gv, pr.u, c, pr.X, pr.T, res,
        provenance=f"crofoot lambda={lam:.6g}")
    inst.extra = {"level_set_size": card, "g1_0": pr.g1_0}
    return inst


def example_clark_weight(theta, c, phi):
    """nu = sigma_c, Y = phi(U_nu), T = U_nu + (conj(c) - 1)(., conj(z)/conj(phi)) phi.

    phi is rescaled so that the integral of |phi|^-2 d nu equals 1.
    """
    c = unit_point(c, 1e-9)
    if abs(c - 1.0) <= 1e-12:
        raise ClarkError("need c != 1")
    phi = np.asarray(phi, dtype=np.complex128)
    if theta.degree != phi.size:
        raise ClarkError("need one value of phi per atom of sigma_c")
    if np.any(np.abs(phi) <= 1e-12):
        raise HypothesisError("phi vanishes at an atom")
    dom = ModelSpace(theta)
    J = dom.j_map(c)
    nu = J.measure
    w = nu.weights
    phi = phi * math.sqrt(float(np.sum(w / np.abs(phi) ** 2)))
    nu1 = AtomicMeasure(nu.points, w / np.abs(phi) ** 2, label="weighted clark")
    cod = ModelSpace.from_measure(nu1)
    omega = cod.theta
    eta = nu.points
    V = np.sqrt(w)[:, None] * J.forward                  # J_{theta,c} in orthonormal coordinates
    X = np.conj(c) * np.abs(phi)[:, None] * V             # conj(c) Z Y J, Z Y = |phi|
    # T on L^2(nu), then moved to L^2(nu1) by Z = conj(phi)/|phi|
    sw = np.sqrt(w)
    T_nu = np.diag(eta) + (np.conj(c) - 1.0) * np.outer(sw * phi, sw * eta / phi)
    zd = np.conj(phi) / np.abs(phi)
    T1_via_Z = zd[:, None] * T_nu * np.conj(zd)[None, :]
    u = ModelVector(cod, cod.sqrt_w * ((np.conj(c) - 1.0) * np.abs(phi) ** 2 + 1.0))
    T1 = rank_one_perturbation(cod, u)
    Xop = OperatorMatrix(dom, cod, X)
    g = ModelVector(cod, np.conj(c) * cod.sqrt_w * np.abs(phi) ** 2)
    # the weight identity J^-1 |phi|^2 = (1 - omega) / (1 - conj(c) theta): at omega's Clark
    # points both sides are 0/0, so compare c omega' / theta' with |phi|^2 there
    ratio = c * omega.derivative(eta) / theta.derivative(eta)
    zin = 0.6 * np.exp(2j * np.pi * (np.arange(12) + 0.3) / 12)
    lhs_in = ModelVector(cod, cod.sqrt_w * np.abs(phi) ** 2)(zin)
    rhs_in = (1.0 - omega.evaluate(zin)) / (1.0 - np.conj(c) * theta.evaluate(zin))
    m = multiplier_operator(g, dom, cod)
    chi_w, chi_t = cod.chi_bar_theta().coords, dom.chi_bar_theta().coords
    U1 = clark_unitary(dom, 1.0).matrix
    res = {
        "weight_identity_boundary": float(np.max(np.abs(ratio - np.abs(phi) ** 2))),
        "weight_identity_interior": float(np.max(np.abs(lhs_in - rhs_in))),
        "rank_one_form": opnorm(T1_via_Z - T1.matrix),
        "intertwining": opnorm(X @ U1 - T1.matrix @ X),
        "normalization": float(np.linalg.norm(X.conj().T @ chi_w - chi_t)),
        "multiplier_match": opnorm(m.X.matrix - X),
        "membership": m.membership_residual,
        "condition_X": float(np.linalg.cond(X)),
    }
    inst = Instance("clark_weight", {
        "theta": theta.to_json(), "c_arg_over_2pi": float(to_turns(c)), "phi": _carr(phi),
    }, theta, omega, dom, cod, g, u, 1.0, Xop, T1, res, provenance="clark weight")
    inst.extra = {"phi": phi, "unitary_expected": bool(np.ptp(np.abs(phi)) <= 1e-9)}
    return inst


def triangular_instance(V_diag, u, v):
    """T = V + (., v) u with X from the eigendecomposition of T."""
    lam = np.asarray(V_diag, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    n = lam.size
    T = np.diag(lam) + np.outer(u, np.conj(v))
    ev, Y = np.linalg.eig(T)
    res = {
        "eigen_residual": opnorm(T @ Y - Y * ev[None, :]),
        "spectrum_off_circle": float(np.max(np.abs(np.abs(ev) - 1.0))),
        "condition_X": float(np.linalg.cond(Y)),
    }
    inst = Instance("triangular", {"V": _carr(lam), "u": _carr(u), "v": _carr(v)},
                    T=OperatorMatrix(n, n, T), X=OperatorMatrix(n, n, Y), residuals=res,
                    provenance="rank-one perturbation of a diagonal unitary")
    inst.extra = {"V": lam, "u": u, "v": v}
    return inst


def random_measure(rng, n):
    """Atoms with separation >= 0.05/n turns, weights >= 0.02 (Dirichlet mixed with uniform)."""
    for _ in range(1000):
        t = np.sort(rng.random(n))
        gaps = np.diff(np.r_[t, t[0] + 1.0])
        if n == 1 or gaps.min() >= 0.05 / n:
            break
    else:
        raise ClarkError("degenerate seed")
    w = 0.02 + (1.0 - 0.02 * n) * rng.dirichlet(np.ones(n))
    return AtomicMeasure.from_turns(t, w / w.sum(), label="random")


def _random_theta(rng, n):
    return from_clark_measure(random_measure(rng, n))


def _prescribed_perturbation(rng, n):
    """(V, u, v) with V diagonal unitary and T = V + (., v) u diagonalizable with spectrum on the circle.

    One eigenvalue of V is doubled when n >= 4, one group is left out of the
    T1 block when n >= 3 (v orthogonal to u there).  The T1 spectrum is
    placed strictly between the group eigenvalues, so no eigenvalue of T1
    meets one of V.
    """
    sizes = [1] * n
    if n >= 4:
        sizes = [2] + [1] * (n - 2)
    k = len(sizes)
    t = random_measure(rng, k).turns
    lam_g = from_turns(t)
    first = k - 1 if n >= 3 else None
    mid = [i for i in range(k) if i != first]
    # T1 eigenvalues strictly inside the arcs after each mid eigenvalue
    tm = np.sort(t[mid])
    others = np.sort(t)
    mu_t = []
    for a in tm:
        b = others[others > a + 1e-12]
        b = b[0] if b.size else others[0] + 1.0
        mu_t.append(a + (0.3 + 0.4 * rng.random()) * (b - a))
    mu = from_turns(np.array(mu_t))
    lam_mid = from_turns(tm)
    # residues of 1 - p_mu / p_lam at the mid eigenvalues
    r = np.array([-np.prod(l - mu) / np.prod(l - np.delete(lam_mid, j)) for j, l in enumerate(lam_mid)])
    order = [mid[i] for i in np.argsort(t[mid])]
    V, u, v = [], [], []
    for gi, size in enumerate(sizes):
        ug = rng.normal(size=size) + 1j * rng.normal(size=size)
        ug *= (0.5 + rng.random()) / np.linalg.norm(ug)
        q = ug / np.linalg.norm(ug)
        if gi == first:
            vg = np.zeros(size, dtype=np.complex128)
        else:
            j = order.index(gi)
            psi = np.conj(r[j]) / np.linalg.norm(ug)
            vg = psi * q
            if size > 1:
                extra = rng.normal(size=size) + 1j * rng.normal(size=size)
                extra -= np.vdot(q, extra) * q
                vg = vg + 0.3 * extra / np.linalg.norm(extra)
        V.extend([lam_g[gi]] * size)
        u.extend(ug)
        v.extend(vg)
    return np.array(V), np.array(u), np.array(v)


def random_instance(degree, kind, seed):
    """Deterministic random instance; draws failing the construction checks are resampled."""
    degree = int(degree)
    if not 1 <= degree <= 16:
        raise ClarkError("degree must be between 1 and 16")
    if kind not in KINDS:
        raise ClarkError(f"unknown instance kind {kind!r}")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_ATTEMPTS):
        try:
            if kind == "crofoot":
                theta = _random_theta(rng, degree)
                lam = (0.2 + 0.6 * rng.random()) * from_turns(rng.random())
                c = from_turns(rng.random())
                inst = example_crofoot(theta, lam, c)
                bad = max(inst.residuals[k] for k in ("membership", "intertwining", "u_consistency"))
            elif kind == "clark_weight":
                theta = _random_theta(rng, degree)
                c = from_turns(0.05 + 0.9 * rng.random())
                phi = (0.5 + 1.5 * rng.random(degree)) * from_turns(rng.random(degree))
                inst = example_clark_weight(theta, c, phi)
                bad = max(inst.residuals[k] for k in ("intertwining", "normalization", "rank_one_form"))
            else:
                inst = triangular_instance(*_prescribed_perturbation(rng, degree))
                bad = max(inst.residuals["eigen_residual"], inst.residuals["spectrum_off_circle"])
                if inst.residuals["condition_X"] > 1e8:
                    bad = math.inf
        except (ClarkError, np.linalg.LinAlgError):
            continue
        if bad < CONSTRUCTION_TOL:
            inst.seed = int(seed)
            inst.provenance = f"random {kind} degree={degree} seed={seed}"
            return inst
    raise ClarkError("degenerate seed")


@dataclass
class PipelineReport:
    stages: dict
    sweeps: dict
    certificates: dict
    passed: bool
    failures: list

    def to_json(self):
        return {
            "stages": {k: float(v) for k, v in sorted(self.stages.items())},
            "sweeps": {k: r.to_json() for k, r in sorted(self.sweeps.items())},
            "certificates": self.certificates,
            "passed": self.passed,
            "failures": self.failures,
        }


def _stage(name, fn):
    try:
        return fn()
    except ClarkError as e:
        raise HypothesisError(f"{name}: {e}") from e


def reduction_pipeline(V_diag, u=None, v=None, n_sweep=2000, stage_tol=1e-8):
    """Chain of reductions for T = V + (., v) u and the norm inequalities on each piece.

    triangular form -> T1 = U_nu + (., psi) phi -> R_* = T1* as a
    multiplication perturbation -> eigenvector intertwiner Y -> normalized
    pair -> theta, omega from the two measures -> R = S_omega + (., conj(z)omega) u
    with intertwiner Z -> multiplier g recovered from Z.  Sweeps certify
    sup||R^-n|| <= sup||R^n||^5, the triangular bound on T, and the final
    bound (2M^2+1) M^5.
    """
    if isinstance(V_diag, Instance):
        if V_diag.kind != "triangular":
            raise ClarkError("pipeline needs a triangular instance")
        V_diag, u, v = V_diag.extra["V"], V_diag.extra["u"], V_diag.extra["v"]
    lam = np.asarray(V_diag, dtype=np.complex128)
    T = np.diag(lam) + np.outer(np.asarray(u, dtype=np.complex128), np.conj(np.asarray(v, dtype=np.complex128)))
    stages = {}
    tri = _stage("triangularize", lambda: triangularize_reductive(lam, u, v))
    stages["triangular_reconstruction"] = tri.residual
    stages["triangular_lower_block"] = tri.lower_block
    sweeps = {"T": power_sweep(T, n_sweep)}
    certs = {}
    if tri.sizes[1]:
        nu, phi, psi = tri.nu, tri.phi, tri.psi
        stages["T1_form"] = opnorm(tri.T1 - multiplication_perturbation(nu, phi, psi))
        # T1* = U_{nu*} + (., phi) psi on L^2(nu*), nu* the conjugate atoms
        nu_s = AtomicMeasure(np.conj(nu.points), nu.weights, label="adjoint block")
        R_s = multiplication_perturbation(nu_s, psi, phi)
        stages["adjoint_form"] = opnorm(R_s - tri.T1.conj().T)
        ev, Y = np.linalg.eig(R_s)
        if np.max(np.abs(np.abs(ev) - 1.0)) > 1e-8:
            raise HypothesisError("spectrum: T1 has eigenvalues off the circle",
                                  float(np.max(np.abs(np.abs(ev) - 1.0))))
        mu_s = AtomicMeasure(ev / np.abs(ev), np.full(ev.size, 1.0 / ev.size), label="spectrum")
        if mu_s.size != ev.size:
            raise HypothesisError("spectrum: T1 has a repeated eigenvalue")
        nz = _stage("normalize", lambda: normalize_pair(nu_s, psi, phi, Y, mu_s))
        for k, val in nz.residuals.items():
            stages["normalize_" + k] = val
        dom = _stage("theta", lambda: ModelSpace.from_measure(nz.mu1))
        cod = _stage("omega", lambda: ModelSpace.from_measure(nz.nu1))
        uvec = ModelVector(cod, cod.sqrt_w * (nz.phi1 + 1.0))
        R = rank_one_perturbation(cod, uvec)
        Z = OperatorMatrix(dom, cod, nz.X)
        stages["R_form"] = opnorm(R.matrix - nz.T1)
        stages["Z_intertwining"] = opnorm(Z.matrix @ clark_unitary(dom).matrix - R.matrix @ Z.matrix)
        stages["Z_adjoint_normalization"] = float(np.linalg.norm(
            Z.matrix.conj().T @ cod.chi_bar_theta().coords - dom.chi_bar_theta().coords))
        rec = _stage("multiplier", lambda: multiplier_from_intertwiner(Z, uvec, dom, cod))
        stages["multiplier_defect"] = rec.defect
        sweeps["T1"] = power_sweep(tri.T1, n_sweep)
        sweeps["R"] = power_sweep(R.matrix, n_sweep)
        stages["R_T1_adjoint_norms"] = float(np.max(np.abs(sweeps["R"].norms_plus - sweeps["T1"].norms_plus)))
        certs["R_inverse_fifth"] = certify(sweeps["R"], "inverse_fifth")
        certs["T_triangular"] = certify(sweeps["T"], "triangular", t1_report=sweeps["T1"])
    certs["T_main"] = certify(sweeps["T"], "main")
    failures = [k for k, val in sorted(stages.items()) if not val < _stage_tol(k, stage_tol, T)]
    failures += [k for k, rec in sorted(certs.items()) if not rec["pass"]]
    return PipelineReport(stages, sweeps, certs, not failures, failures)


def _stage_tol(name, tol, T):
    # the sweep comparison accumulates rounding over n_sweep products
    if name == "R_T1_adjoint_norms":
        return 1e-6 * max(1.0, opnorm(T)) ** 2
    if name == "multiplier_defect":
        return 1e-7
    return tol


def _finite(x):
    if isinstance(x, (bool, str)) or x is None:
        return x
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _check(name, value, tol, ok=None):
    ok = bool(value < tol) if ok is None else bool(ok)
    return {"name": name, "value": _finite(value), "tol": _finite(tol), "pass": ok}


def _resolvent_check(inst, rng):
    """Rank-one resolvent formula against a dense solve at a random point inside the disk."""
    T = inst.T.matrix
    n = T.shape[0]
    if inst.kind == "triangular":
        base, uu, vv = np.diag(inst.extra["V"]), inst.extra["u"], inst.extra["v"]
    else:
        cod = inst.cod
        base = np.diag(cod.points) - np.outer(cod.sqrt_w, cod.sqrt_w * cod.points)
        uu, vv = inst.u.coords, np.conj(cod.sqrt_w * cod.points)
    lam = 0.5 * rng.random() * np.exp(2j * np.pi * rng.random())
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    y = rank_one_resolvent(RankOneData(base, uu, vv), lam, x)
    y = y.coords if isinstance(y, ModelVector) else y
    ref = np.linalg.solve(T - lam * np.eye(n), x)
    return _check("resolvent_formula", float(np.linalg.norm(y - ref) / np.linalg.norm(ref)), 1e-9)


def _core_checks(inst, quad=None, rng=None):
    out = []
    if rng is not None:
        out.append(_resolvent_check(inst, rng))
    r = inst.residuals
    if inst.kind == "triangular":
        out.append(_check("eigen_residual", r["eigen_residual"], CONSTRUCTION_TOL))
        out.append(_check("spectrum_on_circle", r["spectrum_off_circle"], CONSTRUCTION_TOL))
        out.append(_check("X_invertible", r["condition_X"], 1e12))
        return out
    dom, cod = inst.dom, inst.cod
    for k in ("membership", "intertwining", "u_consistency", "u_membership", "omega_formula",
              "weight_identity_boundary", "weight_identity_interior", "rank_one_form",
              "normalization", "multiplier_match"):
        if k in r:
            out.append(_check(k, r[k], CONSTRUCTION_TOL))
    X = inst.X.matrix
    U = clark_unitary(dom, inst.c).matrix
    out.append(_check("intertwining_replayed", opnorm(X @ U - inst.T.matrix @ X), CONSTRUCTION_TOL))
    out.append(_check("X_invertible", float(np.linalg.cond(X)), 1e12))
    rec = multiplier_from_intertwiner(inst.X, inst.u, dom, cod, inst.c, size=quad)
    out.append(_check("multiplier_recovery", float(np.max(np.abs(rec.g.coords - inst.g.coords))), 1e-7))
    iso = isometry_classification(cod, inst.u)
    if inst.kind == "crofoot":
        if inst.extra.get("level_set_size", inst.dim) > 2:
            out.append(_check("non_unitary", iso.margin, math.inf, ok=iso.margin > 1e-6))
    else:
        # |phi|^2 are the values of conj(c) g at omega's Clark points
        phi2 = np.abs(inst.g.coords / cod.sqrt_w)
        const = bool(np.ptp(phi2) <= 1e-9 * phi2.max())
        out.append(_check("unitary_iff_constant_weight", iso.margin, math.inf,
                          ok=(iso.kind == "unitary") == const))
    return out


def _inequality_checks(inst, n_sweep):
    out = []
    if inst.kind == "triangular":
        rep = reduction_pipeline(inst.extra["V"], inst.extra["u"], inst.extra["v"], n_sweep)
        for k, val in sorted(rep.stages.items()):
            out.append(_check("stage_" + k, val, _stage_tol(k, 1e-8, inst.T.matrix)))
        for k, rec in sorted(rep.certificates.items()):
            out.append(_check("certify_" + k, rec["observed"], rec["bound"], ok=rec["pass"]))
        return out
    rep = power_sweep(inst.T, n_sweep)
    which_all = ("inverse_fifth", "main")
    if inst.kind == "crofoot":
        # X is the compression of the H-infinity symbol g: the quadratic bound applies
        which_all += ("toeplitz_quadratic",)
    for which in which_all:
        rec = certify(rep, which)
        out.append(_check("certify_" + which, rec["observed"], rec["bound"], ok=rec["pass"]))
    return out


SUITES = ("core", "inequalities", "all")


def verify_instance(inst, suite="all", n_sweep=2000, quad=None, seed=0):
    """Run a check suite; returns a JSON-ready report with one record per check.

    ``quad`` fixes the starting quadrature size (adaptive doubling by
    default); ``seed`` drives the randomized spot checks.
    """
    if suite not in SUITES:
        raise ClarkError(f"unknown suite {suite!r}")
    checks = []
    if suite in ("core", "all"):
        checks += _core_checks(inst, quad, np.random.default_rng(seed))
    if suite in ("inequalities", "all"):
        checks += _inequality_checks(inst, n_sweep)
    failed = [c["name"] for c in checks if not c["pass"]]
    return {
        "kind": inst.kind,
        "provenance": inst.provenance,
        "seed": inst.seed,
        "dim": inst.dim,
        "suite": suite,
        "n_sweep": n_sweep,
        "quad": quad,
        "check_seed": seed,
        "checks": checks,
        "passed": not failed,
        "first_failure": failed[0] if failed else None,
    }


def instance_from_entry(entry):
    """Build an instance from a manifest entry.

    ``{"kind", "degree", "seed"}`` gives a random instance; ``{"example":
    "crofoot", "theta_degree", "lambda": [re, im], "c_arg_over_2pi"}`` and
    ``{"example": "clark_weight", "theta_degree", "c_arg_over_2pi", "phi"}``
    use theta = z^theta_degree.
    """
    from .blaschke import monomial

    if "example" in entry:
        theta = monomial(int(entry["theta_degree"]))
        c = from_turns(float(entry.get("c_arg_over_2pi", 0.0)))
        if entry["example"] == "crofoot":
            inst = example_crofoot(theta, complex(*entry["lambda"]), c)
        elif entry["example"] in ("clark_weight", "clark-weight"):
            inst = example_clark_weight(theta, c, _from_carr(entry["phi"]))
        else:
            raise ClarkError(f"unknown example {entry['example']!r}")
        inst.provenance = f"example {entry['example']} theta=z^{entry['theta_degree']}"
        return inst
    return random_instance(int(entry["degree"]), entry["kind"], int(entry["seed"]))
