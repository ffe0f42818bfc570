"""Finite Blaschke products vanishing at the origin.

The zero set plus a unimodular front constant is the source of truth; the
coefficient form ``front * P / Q`` is cached at construction for the level
set solver.
"""
import numpy as np

from . import _kernels
from .errors import ClarkError
from .measure import AtomicMeasure, from_turns, to_turns, unit_point

ZERO_TOL = 1e-10        # zeros must satisfy |a| < 1 - ZERO_TOL
ORIGIN_TOL = 1e-12      # a zero this close to 0 is snapped to 0
MAX_DEGREE = 64         # soft cap, overridable per call
OFF_CIRCLE_TOL = 1e-6
LEVEL_TOL = 1e-9

_poly = np.polynomial.polynomial


def _pad(c, n):
    out = np.zeros(n, dtype=np.complex128)
    c = np.asarray(c, dtype=np.complex128)
    out[: c.size] = c
    return out


class FiniteBlaschke:
    """B(z) = front * prod (z - a) / (1 - conj(a) z).

    Immutable.  By default a zero at the origin is mandatory; auxiliary
    factors (inner parts of symbols, common divisors) pass
    ``require_origin=False``.
    """

    __slots__ = ("zeros", "front", "degree", "num", "den", "require_origin")

    def __init__(self, zeros, front=1.0, require_origin=True, max_degree=MAX_DEGREE):
        a = np.atleast_1d(np.asarray(zeros, dtype=np.complex128)).ravel().copy()
        if a.size > max_degree:
            raise ClarkError(f"degree {a.size} exceeds cap {max_degree}")
        if np.any(~np.isfinite(a)) or np.any(np.abs(a) >= 1.0 - ZERO_TOL):
            raise ClarkError("zeros must lie in the open disk")
        a[np.abs(a) < ORIGIN_TOL] = 0.0
        if require_origin and not np.any(a == 0):
            raise ClarkError("a zero at the origin is required")
        a.setflags(write=False)
        front = unit_point(front, 1e-9)
        # coefficients, lowest degree first
        num = _poly.polyfromroots(a) if a.size else np.ones(1, dtype=np.complex128)
        den = np.ones(1, dtype=np.complex128)
        for ak in a:
            den = _poly.polymul(den, [1.0, -np.conj(ak)])
        # polymul trims trailing zeros; pad both to length degree + 1
        num = _pad(num, a.size + 1)
        den = _pad(den, a.size + 1)
        num.setflags(write=False)
        den.setflags(write=False)
        for name, val in (("zeros", a), ("front", front), ("degree", int(a.size)),
                          ("num", num), ("den", den), ("require_origin", require_origin)):
            object.__setattr__(self, name, val)

    def __setattr__(self, name, value):
        raise AttributeError("FiniteBlaschke is immutable")

    def __repr__(self):
        return f"FiniteBlaschke(zeros={np.round(self.zeros, 6).tolist()}, front={self.front:.6g})"

    @property
    def rational_form(self):
        """(front, numerator, denominator), coefficient arrays lowest degree first."""
        return self.front, self.num, self.den

    def _check_poles(self, z):
        nz = self.zeros[self.zeros != 0]
        if nz.size and np.any(np.abs(z) > 1):
            d = np.abs(1.0 - np.multiply.outer(z, np.conj(nz)))
            if np.any(d < 1e-12):
                raise ClarkError("pole")

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        z = np.asarray(z, dtype=np.complex128)
        self._check_poles(z)
        out = np.reshape(_kernels.blaschke_eval(self.zeros, self.front, z), z.shape)
        return out if out.ndim else complex(out)

    def derivative(self, z):
        """B'(z) by the product rule, one factor at a time."""
        z = np.asarray(z, dtype=np.complex128)
        self._check_poles(z)
        flat = np.atleast_1d(z).ravel()
        a = self.zeros
        if a.size == 0:
            out = np.zeros(flat.shape, dtype=np.complex128)
        else:
            den = 1.0 - np.multiply.outer(flat, np.conj(a))
            b = (flat[:, None] - a[None, :]) / den
            db = (1.0 - np.abs(a) ** 2)[None, :] / den ** 2
            left = np.ones_like(b)
            right = np.ones_like(b)
            left[:, 1:] = np.cumprod(b[:, :-1], axis=1)
            right[:, :-1] = np.cumprod(b[:, :0:-1], axis=1)[:, ::-1]
            out = self.front * np.sum(left * db * right, axis=1)
        out = out.reshape(z.shape)
        return out if out.ndim else complex(out)

    def boundary_speed(self, zeta):
        """|B'(zeta)| for zeta on the circle: sum (1-|a|^2)/|zeta-a|^2."""
        zeta = np.asarray(zeta, dtype=np.complex128)
        a = self.zeros
        s = np.sum((1.0 - np.abs(a) ** 2) / np.abs(np.subtract.outer(zeta, a)) ** 2, axis=-1)
        return s

    def diff_quotient(self, z, w):
        """Matrix (B(z_i) - B(w_j)) / (z_i - w_j), equal to B'(z) on the diagonal z = w."""
        return _kernels.difference_quotient(self.zeros, self.front, z, w)

    def times(self, other):
        return FiniteBlaschke(np.r_[self.zeros, other.zeros], self.front * other.front,
                              require_origin=False)

    def with_front(self, front):
        return FiniteBlaschke(self.zeros, front, require_origin=self.require_origin)

    def solve_value(self, value, polish=True):
        """All n solutions of B(z) = value (|value| <= 1), from the coefficient form."""
        value = complex(value)
        p = self.front * np.asarray(self.num) - value * np.asarray(self.den)
        p = np.trim_zeros(p, "b")
        if p.size <= 1:
            raise ClarkError("level set solve failed: degenerate polynomial")
        r = np.roots(p[::-1])
        if polish:
            for _ in range(8):
                f = self.evaluate(r) - value
                d = self.derivative(r)
                ok = np.abs(d) > 1e-300
                step = np.zeros_like(r)
                step[ok] = f[ok] / d[ok]
                r_new = r - step
                better = np.abs(self.evaluate(r_new) - value) < np.abs(f)
                r = np.where(better, r_new, r)
        return r

    def level_set(self, c):
        """The n points of the circle where B = c, sorted by argument."""
        c = unit_point(c, 1e-9)
        if self.degree == 0:
            raise ClarkError("constant function has no level set")
        r = self.solve_value(c, polish=False)
        if np.any(np.abs(np.abs(r) - 1.0) > OFF_CIRCLE_TOL):
            raise ClarkError("spurious off-circle root")
        t = np.angle(r)
        # Newton in the angle: arg B(e^{it}) increases with speed |B'|
        for _ in range(30):
            zt = np.exp(1j * t)
            err = np.angle(self.evaluate(zt) * np.conj(c))
            t = t - err / self.boundary_speed(zt)
            if np.max(np.abs(err)) < 1e-15:
                break
        zeta = np.exp(1j * t)
        zeta = zeta[np.argsort(to_turns(zeta), kind="stable")]
        if np.max(np.abs(self.evaluate(zeta) - c)) > LEVEL_TOL:
            raise ClarkError("level-set solve failed")
        return zeta

    def to_json(self):
        return {
            "front_constant_arg_over_2pi": float(to_turns(self.front)),
            "zeros": [{"re": float(a.real), "im": float(a.imag)} for a in self.zeros],
        }

    @classmethod
    def from_json(cls, obj, require_origin=True):
        zeros = [complex(z["re"], z["im"]) for z in obj["zeros"]]
        front = complex(from_turns(obj.get("front_constant_arg_over_2pi", 0.0)))
        return cls(zeros, front, require_origin=require_origin)


def monomial(n, front=1.0):
    """z**n times a unimodular constant."""
    return FiniteBlaschke(np.zeros(n), front)


def clark_measure(theta, c=1.0, check=True):
    """sigma_c: atoms where theta = c, weights 1/|theta'|."""
    c = unit_point(c, 1e-9)
    pts = theta.level_set(c)
    w = 1.0 / theta.boundary_speed(pts)
    mu = AtomicMeasure(pts, w, label=f"clark[{float(to_turns(c)):.12g}]")
    if mu.size != theta.degree:
        raise ClarkError("level-set solve failed: colliding atoms")
    if check:
        z = _disk_samples(32)
        lhs = 1.0 / (1.0 - np.conj(c) * theta.evaluate(z))
        rhs = cauchy_transform(mu, z)
        if np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))) > 1e-8:
            raise ClarkError("level-set solve failed: Cauchy transform mismatch")
    return mu


def cauchy_transform(mu, z):
    """sum_k w_k / (1 - z conj(zeta_k))."""
    z = np.asarray(z, dtype=np.complex128)
    return np.sum(mu.weights / (1.0 - np.multiply.outer(z, np.conj(mu.points))), axis=-1)


def _disk_samples(n, seed=20240917, rmax=0.9):
    rng = np.random.default_rng(seed)
    return rmax * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


def from_clark_measure(mu):
    """The Blaschke product B with B(0) = 0 and 1/(1-B) equal to the Cauchy transform of mu."""
    if abs(mu.mass - 1.0) > 1e-10:
        raise ClarkError("measure must be normalized (total mass 1)")
    zeta_c = np.conj(mu.points)
    n = mu.size
    D = np.ones(1, dtype=np.complex128)
    for zc in zeta_c:
        D = _poly.polymul(D, [1.0, -zc])
    N = np.zeros(n, dtype=np.complex128)
    for k in range(n):
        term = np.ones(1, dtype=np.complex128)
        for j in range(n):
            if j != k:
                term = _poly.polymul(term, [1.0, -zeta_c[j]])
        N[: term.size] += mu.weights[k] * term
    num = _pad(N, n + 1) - _pad(D, n + 1)
    # the constant term vanishes since the mass is 1; divide the zero at 0 out
    red = np.trim_zeros(num[1:], "b")
    # roundoff-level low coefficients are further zeros at 0; left in, a
    # multiple zero at the origin would split into roots of size sqrt(eps)
    k0 = 0
    if red.size:
        small = np.abs(red) <= 1e-14 * np.max(np.abs(red))
        while k0 < red.size - 1 and small[k0]:
            k0 += 1
    rest = red[k0:]
    inner = np.roots(rest[::-1]) if rest.size > 1 else np.zeros(0, dtype=np.complex128)

    def C(z):
        return np.sum(mu.weights / (1.0 - np.multiply.outer(z, zeta_c)), axis=-1)

    def dC(z):
        return np.sum(mu.weights * zeta_c / (1.0 - np.multiply.outer(z, zeta_c)) ** 2, axis=-1)

    # polish each zero on C(z) = 1, keeping only steps that lower the residual
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(12):
            if inner.size == 0:
                break
            f = C(inner) - 1.0
            cand = inner - f / dC(inner)
            better = np.abs(C(cand) - 1.0) < np.abs(f)
            inner = np.where(better, cand, inner)
    zeros = np.r_[np.zeros(k0 + 1, dtype=np.complex128), inner]
    if np.any(np.abs(zeros) >= 1.0 - ZERO_TOL):
        raise ClarkError("ill-conditioned measure")
    base = FiniteBlaschke(zeros)
    # front constant from the ratio at test points where the product is not small
    probe = 0.7 * np.exp(2j * np.pi * (np.arange(16) + 0.5) / 16)
    b = base.evaluate(probe)
    target = 1.0 - 1.0 / C(probe)
    k = np.argsort(-np.abs(b))[:4]
    ratio = np.mean(target[k] / b[k])
    theta = FiniteBlaschke(zeros, ratio / abs(ratio))
    z = _disk_samples(32)
    err = np.abs(1.0 / (1.0 - theta.evaluate(z)) - C(z))
    if np.max(err / np.maximum(1.0, np.abs(C(z)))) > 1e-9:
        raise ClarkError("ill-conditioned measure")
    return theta


def _speed_bounds(theta):
    """Bounds for the first and second t-derivatives of arg theta(e^{it})."""
    r = np.abs(theta.zeros)
    d1 = float(np.sum((1 + r) / (1 - r)))
    # |d/dt (1-r^2)/|e^{it}-a|^2| <= (9 / (8 sqrt 3)) sqrt(r) (1+r) / (1-r)^2
    d2 = float(np.sum(0.65 * np.sqrt(r) * (1 + r) / (1 - r) ** 2))
    return d1, d2


def sup_distance(theta, omega, refine=1, base_points=4096):
    """Certified upper estimate of max over the circle of |theta - omega|.

    On the circle |theta - omega|^2 = 2 - 2 Re(theta conj(omega)); its second
    t-derivative is bounded through the phase speeds, and between grid points
    the maximum can exceed the sampled one by at most h^2/8 times that bound.
    Grids for refine = 1, 2, ... are nested, and the smallest estimate is
    returned, so the value never increases with ``refine``.  Identical
    products are at distance 0 exactly.
    """
    if (theta.degree == omega.degree and theta.front == omega.front
            and np.array_equal(np.sort_complex(theta.zeros), np.sort_complex(omega.zeros))):
        return 0.0
    m0 = base_points * max(theta.degree, omega.degree, 1)
    a1, a2 = _speed_bounds(theta)
    b1, b2 = _speed_bounds(omega)
    g2 = 2.0 * (max(a1, b1) ** 2 + a2 + b2)
    best = np.inf
    for r in range(1, int(refine) + 1):
        m = m0 * r
        z = np.exp(2j * np.pi * np.arange(m) / m)
        g = np.abs(theta.evaluate(z) - omega.evaluate(z)) ** 2
        h = 2 * np.pi / m
        best = min(best, float(np.sqrt(min(4.0, g.max() + h * h / 8 * g2))))
    return best


def grid_max_distance(theta, omega, points):
    """Sampled max of |theta - omega| on an equispaced grid (a lower estimate)."""
    z = np.exp(2j * np.pi * np.arange(points) / points)
    return float(np.max(np.abs(theta.evaluate(z) - omega.evaluate(z))))
