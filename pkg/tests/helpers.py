"""Shared random generators for the tests."""
import numpy as np

from clarklab import AtomicMeasure, FiniteBlaschke


def random_zeros(rng, n, rmax=0.85):
    """0 plus n - 1 zeros in the disk of radius rmax."""
    r = rmax * np.sqrt(rng.random(n - 1))
    return np.r_[0.0, r * np.exp(2j * np.pi * rng.random(n - 1))]


def random_theta(rng, n, rmax=0.85):
    return FiniteBlaschke(random_zeros(rng, n, rmax), np.exp(2j * np.pi * rng.random()))


def random_measure(rng, n, sep=0.05):
    """Normalized measure with well separated atoms and weights bounded below."""
    while True:
        t = np.sort(rng.random(n))
        if n == 1 or np.diff(np.r_[t, t[0] + 1]).min() >= sep / n:
            break
    w = 0.05 + rng.random(n)
    return AtomicMeasure.from_turns(t, w / w.sum())


def cvec(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def unit(rng, size=None):
    return np.exp(2j * np.pi * rng.random(size))


def multiset_distance(a, b):
    """Max distance under the best matching of two equal-size point sets."""
    from scipy.optimize import linear_sum_assignment

    a, b = np.asarray(a), np.asarray(b)
    D = np.abs(np.subtract.outer(a, b))
    i, j = linear_sum_assignment(D)
    return float(D[i, j].max()) if a.size else 0.0
