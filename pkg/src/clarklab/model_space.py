"""The model space K_theta in the Clark orthonormal basis (c = 1).

A vector is stored by its coordinates x_k in the basis

    e_k(z) = sqrt(w_k) (1 - theta(z)) / (1 - z conj(zeta_k)),

where (zeta_k, w_k) are the atoms of the Clark measure sigma_1.  Boundary
values at the Clark points are f(zeta_k) = x_k / sqrt(w_k), and the inner
product is the plain sum of x * conj(y).
"""
from dataclasses import dataclass

import numpy as np

from .blaschke import FiniteBlaschke, clark_measure, from_clark_measure
from .errors import ClarkError
from .measure import AtomicMeasure, unit_point

QUAD_TOL = 1e-9
QUAD_MAX = 1 << 18


class ModelSpace:
    """K_theta with its Clark data precomputed.

    ``clark`` may be passed to fix the atom order (it is checked against
    theta); otherwise sigma_1 is computed and sorted by argument.
    """

    def __init__(self, theta, clark=None, quadrature_size=None):
        if not isinstance(theta, FiniteBlaschke):
            raise ClarkError("theta must be a FiniteBlaschke")
        if theta.degree == 0:
            raise ClarkError("trivial model space")
        if clark is None:
            clark = clark_measure(theta, 1.0)
        else:
            if clark.size != theta.degree:
                raise ClarkError("Clark measure has the wrong number of atoms")
            if np.max(np.abs(theta.evaluate(clark.points) - 1.0)) > 1e-9:
                raise ClarkError("supplied atoms are not Clark points of theta")
            w = 1.0 / theta.boundary_speed(clark.points)
            if np.max(np.abs(w - clark.weights)) > 1e-8:
                raise ClarkError("supplied weights are not Clark weights of theta")
        self.theta = theta
        self.clark = clark
        self.points = clark.points
        self.weights = clark.weights
        self.sqrt_w = np.sqrt(clark.weights)
        self.dim = theta.degree
        self.quadrature_size = quadrature_size or max(1024, 64 * theta.degree)
        self._grid_cache = {}

    @classmethod
    def from_measure(cls, mu, quadrature_size=None):
        """K_theta for the theta whose Clark measure is the normalized mu, atoms in mu's order."""
        theta = from_clark_measure(mu)
        w = 1.0 / theta.boundary_speed(mu.points)
        return cls(theta, AtomicMeasure(mu.points, w, mu.label), quadrature_size)

    def __repr__(self):
        return f"ModelSpace(dim={self.dim}, theta={self.theta!r})"

    # vectors -----------------------------------------------------------
    def vector(self, coords):
        return ModelVector(self, coords)

    def from_values(self, values):
        """Vector with the given boundary values at the Clark points."""
        return ModelVector(self, self.sqrt_w * np.asarray(values, dtype=np.complex128))

    def zero(self):
        return ModelVector(self, np.zeros(self.dim, dtype=np.complex128))

    def one(self):
        """The constant function 1."""
        return ModelVector(self, self.sqrt_w.astype(np.complex128))

    def chi_bar_theta(self):
        """theta(z)/z, which is conj(zeta_k) at the Clark points."""
        return ModelVector(self, self.sqrt_w * np.conj(self.points))

    def basis_vector(self, k):
        x = np.zeros(self.dim, dtype=np.complex128)
        x[k] = 1.0
        return ModelVector(self, x)

    # evaluation --------------------------------------------------------
    def basis_values(self, z):
        """Matrix E[i, k] = e_k(z_i)."""
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel()
        if np.any(np.abs(z) > 1.0 + 1e-12):
            raise ClarkError("evaluation point outside the closed disk")
        dq = self.theta.diff_quotient(z, self.points)
        E = dq * (self.sqrt_w * self.points)[None, :]
        # exact Clark points: stored values
        hit = z[:, None] == self.points[None, :]
        if hit.any():
            rows = np.nonzero(hit.any(axis=1))[0]
            for i in rows:
                E[i] = 0.0
                E[i, np.nonzero(hit[i])[0][0]] = 1.0 / self.sqrt_w[np.nonzero(hit[i])[0][0]]
        return E

    def grid(self, size):
        """Half-step offset boundary grid and basis values there (cached)."""
        size = int(size)
        if size not in self._grid_cache:
            z = np.exp(2j * np.pi * (np.arange(size) + 0.5) / size)
            self._grid_cache[size] = (z, self.basis_values(z))
        return self._grid_cache[size]

    def kernel(self, lam):
        """Reproducing kernel k_lambda and its conjugate k*_lambda."""
        lam = complex(lam)
        if abs(lam) >= 1.0:
            raise ClarkError("kernel point must lie in the open disk")
        tl = complex(self.theta.evaluate(lam))
        k = self.from_values((1.0 - np.conj(tl)) / (1.0 - np.conj(lam) * self.points))
        ks = self.from_values((1.0 - tl) / (self.points - lam))
        return KernelPair(k, ks, lam)

    def conjugation(self, f):
        """f -> theta conj(z) conj(f); at Clark points conj(zeta_k f(zeta_k))."""
        return ModelVector(self, np.conj(self.points) * np.conj(f.coords))

    def j_map(self, c):
        return JMap(self, c)

    # quadrature --------------------------------------------------------
    def project(self, h, size=None, tol=QUAD_TOL, max_size=QUAD_MAX):
        """Orthogonal projection of a boundary function onto this space.

        ``h`` maps an array of circle points to values.  The coordinates
        (h, e_j) are trapezoid sums; the grid doubles until they move by
        less than ``tol``.  ``residual_norm`` is ||h||^2 - ||p||^2.
        """
        C, res, n, change = self.project_columns(lambda z: np.asarray(h(z))[:, None],
                                                 size, tol, max_size)
        return Projection(ModelVector(self, C[:, 0]), float(res[0]), n, change)

    def project_columns(self, H, size=None, tol=QUAD_TOL, max_size=QUAD_MAX):
        """Project several boundary functions at once.

        ``H(z)`` returns an (N, m) array, one function per column.  Returns
        (coordinate matrix (dim, m), residuals (m,), grid size, last change).
        """
        n = int(size or self.quadrature_size)
        prev = None
        while True:
            z, E = self.grid(n)
            hv = np.asarray(H(z), dtype=np.complex128)
            C = np.conj(E).T @ hv / n
            hn2 = np.mean(np.abs(hv) ** 2, axis=0)
            if prev is not None:
                change = float(np.max(np.abs(C - prev))) if C.size else 0.0
                if change < tol:
                    break
                if 2 * n > max_size:
                    raise ClarkError(f"quadrature not converged (change {change:.2e} at size {n})")
            prev = C
            n *= 2
        res = hn2 - np.sum(np.abs(C) ** 2, axis=0)
        return C, res, n, change

    def boundary_inner(self, f, g, size=None):
        """L^2 inner product of two boundary functions by the trapezoid rule."""
        n = int(size or self.quadrature_size)
        z = np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)
        return complex(np.mean(f(z) * np.conj(g(z))))

    # boundary conjugate transform ---------------------------------------
    def conjugate_boundary_transform(self, gamma, samples=24, seed=7):
        """u = J^{-1}(conj(z) conj(gamma)) and the residuals of both identities.

        Identity 1 compares J^{-1}gamma with theta conj(z) conj(u) on the
        circle; identity 2 compares J^{-1}conj(gamma) with z u + conj(a)(1-theta),
        a = sum w gamma, on the circle and in the disk.
        """
        gamma = np.asarray(gamma, dtype=np.complex128)
        if gamma.size != self.dim:
            raise ClarkError("gamma needs one value per Clark point")
        u = self.from_values(np.conj(self.points) * np.conj(gamma))
        f1 = self.from_values(gamma)
        f2 = self.from_values(np.conj(gamma))
        a = complex(np.sum(self.weights * gamma))
        rng = np.random.default_rng(seed)
        circ = np.exp(2j * np.pi * rng.random(samples))
        disk = 0.95 * np.sqrt(rng.random(samples)) * np.exp(2j * np.pi * rng.random(samples))
        th_c = self.theta.evaluate(circ)
        r1 = np.max(np.abs(f1(circ) - th_c * np.conj(circ) * np.conj(u(circ))))
        both = np.r_[circ, disk]
        r2 = np.max(np.abs(f2(both) - (both * u(both) + np.conj(a) * (1.0 - self.theta.evaluate(both)))))
        r1_clark = np.max(np.abs(f1.values() - np.conj(self.points) * np.conj(u.values())))
        scale = max(1.0, float(np.max(np.abs(gamma))))
        return u, (float(max(r1, r1_clark)) / scale, float(r2) / scale)

    def to_json(self):
        return self.theta.to_json()


@dataclass(frozen=True)
class Projection:
    p: "ModelVector"
    residual_norm: float
    quad_size: int
    change: float


class ModelVector:
    """Element of a model space, by Clark coordinates."""

    __slots__ = ("space", "coords")

    def __init__(self, space, coords):
        c = np.asarray(coords, dtype=np.complex128).ravel().copy()
        if c.size != space.dim:
            raise ClarkError(f"expected {space.dim} coordinates, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "coords", c)

    def __setattr__(self, name, value):
        raise AttributeError("ModelVector is immutable")

    def values(self):
        """Boundary values at the Clark points."""
        return self.coords / self.space.sqrt_w

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        out = self.space.basis_values(z) @ self.coords
        return out.reshape(z.shape) if z.ndim else complex(out[0])

    def inner(self, other):
        self._same(other)
        return complex(np.vdot(other.coords, self.coords))

    def norm(self):
        return float(np.linalg.norm(self.coords))

    def _same(self, other):
        if other.space is not self.space:
            raise ClarkError("vectors live in different model spaces")

    def __add__(self, other):
        self._same(other)
        return ModelVector(self.space, self.coords + other.coords)

    def __sub__(self, other):
        self._same(other)
        return ModelVector(self.space, self.coords - other.coords)

    def __neg__(self):
        return ModelVector(self.space, -self.coords)

    def __mul__(self, scalar):
        return ModelVector(self.space, complex(scalar) * self.coords)

    __rmul__ = __mul__

    def __repr__(self):
        return f"ModelVector(dim={self.space.dim}, coords={np.round(self.coords, 6).tolist()})"

    def to_json(self):
        return {
            "space": self.space.to_json(),
            "coords": [{"re": float(x.real), "im": float(x.imag)} for x in self.coords],
        }


@dataclass(frozen=True)
class KernelPair:
    k: ModelVector
    k_star: ModelVector
    lam: complex


class JMap:
    """J_{theta,c}: boundary values on the atoms of sigma_c, and its inverse.

    ``forward`` is the matrix of f -> (f(eta_j))_j; J is unitary onto
    L^2(sigma_c), so the inverse is the adjoint, F^H diag(sigma weights).
    """

    def __init__(self, space, c):
        c = unit_point(c, 1e-9)
        if abs(c - 1.0) <= 1e-12:
            c = 1.0 + 0j
        self.space = space
        self.c = c
        if c == 1.0:
            self.measure = space.clark
            self.forward = np.diag(1.0 / space.sqrt_w).astype(np.complex128)
        else:
            self.measure = clark_measure(space.theta, c)
            # e_k(eta_j) through the difference quotient; the closed form
            # (1 - c) / (1 - eta_j conj(zeta_k)) cancels badly for c near 1
            self.forward = space.basis_values(self.measure.points)
        self.inverse_matrix = np.conj(self.forward.T) * self.measure.weights[None, :]

    def __call__(self, f):
        return self.forward @ f.coords

    def inverse(self, values):
        return ModelVector(self.space, self.inverse_matrix @ np.asarray(values, dtype=np.complex128))

    def inverse_by_formula(self, values, z):
        """Evaluate (1 - conj(c) theta(z)) sum sigma_j gamma_j / (1 - z conj(eta_j)) directly."""
        z = np.asarray(z, dtype=np.complex128)
        eta = self.measure.points
        s = np.sum(self.measure.weights * np.asarray(values) / (1.0 - np.multiply.outer(z, np.conj(eta))), axis=-1)
        return (1.0 - np.conj(self.c) * self.space.theta.evaluate(z)) * s
