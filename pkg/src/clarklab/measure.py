"""Finite atomic measures on the unit circle."""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ClarkError, ReturnTimeError

MERGE_TOL = 1e-10
UNIT_TOL = 1e-12


def unit_point(z, tol=UNIT_TOL):
    """Validate ``|z| = 1`` within ``tol`` and return it renormalized."""
    z = complex(z)
    r = abs(z)
    if abs(r - 1.0) > tol:
        raise ClarkError(f"not a unit point: |z| = {r!r}")
    return z / r


def from_turns(t):
    """exp(2 pi i t), exact at quarter turns."""
    t = np.asarray(t, dtype=np.float64) % 1.0
    out = np.exp(2j * np.pi * t)
    for q, val in ((0.0, 1), (0.25, 1j), (0.5, -1), (0.75, -1j)):
        out = np.where(t == q, val, out)
    return out


def to_turns(z):
    """Argument of ``z`` as a fraction of a turn in [0, 1)."""
    t = np.angle(np.asarray(z)) / (2 * np.pi)
    t = np.where(t < 0, t + 1.0, t)
    return np.where(t >= 1.0, 0.0, t)


def _merge(points, weights, tol):
    pts, ws = [], []
    for p, w in zip(points, weights):
        for i, q in enumerate(pts):
            if abs(p - q) <= tol:
                ws[i] += w
                break
        else:
            pts.append(p)
            ws.append(w)
    return np.array(pts, dtype=np.complex128), np.array(ws, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Positive measure with finitely many atoms on the circle.

    Atom order is kept as given (after merging near-duplicates), since
    coordinates elsewhere are indexed by atom.
    """

    points: np.ndarray
    weights: np.ndarray
    label: str = ""
    turns: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.points, dtype=np.complex128)).ravel()
        w = np.atleast_1d(np.asarray(self.weights, dtype=np.float64)).ravel()
        if p.size != w.size:
            raise ClarkError("points and weights differ in length")
        if p.size == 0:
            raise ClarkError("empty measure")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise ClarkError("weights must be positive")
        r = np.abs(p)
        if np.any(np.abs(r - 1.0) > UNIT_TOL):
            raise ClarkError("atom off the unit circle")
        p, w = _merge(p / r, w, MERGE_TOL)
        p.setflags(write=False)
        w.setflags(write=False)
        t = to_turns(p)
        t.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "turns", t)

    @classmethod
    def from_turns(cls, turns, weights, label=""):
        return cls(from_turns(turns), weights, label)

    @property
    def size(self):
        return self.points.size

    @property
    def mass(self):
        return float(self.weights.sum())

    def to_json(self):
        return {
            "label": self.label,
            "atoms": [
                {"arg_over_2pi": float(t), "weight": float(w)}
                for t, w in zip(self.turns, self.weights)
            ],
        }

    @classmethod
    def from_json(cls, obj):
        atoms = obj["atoms"]
        return cls.from_turns(
            [a["arg_over_2pi"] for a in atoms],
            [a["weight"] for a in atoms],
            obj.get("label", ""),
        )

    def __repr__(self):
        return f"AtomicMeasure(label={self.label!r}, n={self.size}, mass={self.mass:.6g})"


def fourier_coefficient(mu, n):
    """Sum of w_k * zeta_k**(-n)."""
    n = int(n)
    # powers through turns so large n stay on the circle
    return complex(np.sum(mu.weights * from_turns(-n * mu.turns)))


def normalize(mu):
    m = mu.mass
    if not m > 0:
        raise ClarkError("empty measure")
    return AtomicMeasure(mu.points, mu.weights / m, mu.label), m


def weight_transform(mu, phi):
    """Pass from mu to |phi|^2 mu / a with the unitary f -> z_diag * f.

    Returns ``(mu1, z_diag, a)`` with a = sum w |phi|^2 and
    z_diag = sqrt(a) conj(zeta) / phi, so that z_diag * phi = sqrt(a) conj(zeta).
    """
    phi = np.asarray(phi, dtype=np.complex128).ravel()
    if phi.size != mu.size:
        raise ClarkError("phi must have one value per atom")
    if np.any(np.abs(phi) == 0):
        raise ClarkError("vanishing weight")
    m2 = np.abs(phi) ** 2
    a = float(np.sum(mu.weights * m2))
    mu1 = AtomicMeasure(mu.points, mu.weights * m2 / a, mu.label)
    if mu1.size != mu.size:
        raise ClarkError("vanishing weight")
    z_diag = np.sqrt(a) * np.conj(mu.points) / phi
    return mu1, z_diag, a


def _target_turns(mu, targets):
    if targets is None:
        return np.zeros(mu.size)
    tg = np.atleast_1d(np.asarray(targets, dtype=np.complex128))
    if tg.size != mu.size:
        raise ClarkError("need one target per atom")
    for t in tg:
        unit_point(t, 1e-9)
    return to_turns(tg)


def find_return_times(mu, targets=None, eps=1e-3, n_max=10**6):
    """All n in [1, n_max] with max_k |zeta_k^n - xi_k| <= eps, increasing.

    ``targets`` defaults to 1 at every atom.
    """
    if not eps > 0:
        raise ClarkError("eps must be positive")
    hits, best, best_n = _kernels.return_time_scan(
        mu.turns, _target_turns(mu, targets), float(eps), int(n_max)
    )
    if hits.size == 0:
        raise ReturnTimeError("no return time within n_max", best, best_n)
    return hits


def return_time_records(mu, targets=None, n_max=10**6):
    """Successive record approximations: (n_k, deviation_k), deviations strictly decreasing."""
    return _kernels.return_time_records(mu.turns, _target_turns(mu, targets), int(n_max))


def max_deviation(mu, targets, n):
    """Direct evaluation of max_k |zeta_k^n - xi_k| (independent of the scan kernels)."""
    tg = np.ones(mu.size) if targets is None else np.asarray(targets)
    return float(np.max(np.abs(from_turns(int(n) * mu.turns) - tg)))
