"""Pure numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them loop for
loop and the test-suite checks the two against each other.
"""
import numpy as np

_CHUNK = 1 << 15


def _deviation(n, turns, target_turns):
    # |exp(2 pi i n t) - exp(2 pi i s)| = 2 |sin(pi r)|, r the wrapped phase gap
    r = np.multiply.outer(n.astype(np.float64), turns) - target_turns
    r -= np.rint(r)
    return (2.0 * np.abs(np.sin(np.pi * r))).max(axis=1)


def return_time_scan(turns, target_turns, eps, n_max):
    """All ``1 <= n <= n_max`` whose worst atom deviation is ``<= eps``.

    Returns ``(hits, best_dev, best_n)``.
    """
    turns = np.ascontiguousarray(turns, dtype=np.float64)
    target_turns = np.ascontiguousarray(target_turns, dtype=np.float64)
    hits = []
    best_dev, best_n = np.inf, 0
    for start in range(1, n_max + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, n_max + 1), dtype=np.int64)
        dev = _deviation(n, turns, target_turns)
        k = int(np.argmin(dev))
        if dev[k] < best_dev:
            best_dev, best_n = float(dev[k]), int(n[k])
        hits.append(n[dev <= eps])
    out = np.concatenate(hits) if hits else np.zeros(0, dtype=np.int64)
    return out.astype(np.int64), best_dev, best_n


def return_time_records(turns, target_turns, n_max):
    """Record-breaking return times: each entry strictly improves the deviation."""
    turns = np.ascontiguousarray(turns, dtype=np.float64)
    target_turns = np.ascontiguousarray(target_turns, dtype=np.float64)
    ns, devs = [], []
    best = np.inf
    for start in range(1, n_max + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, n_max + 1), dtype=np.int64)
        dev = _deviation(n, turns, target_turns)
        running = np.minimum.accumulate(np.concatenate(([best], dev)))
        idx = np.nonzero(dev < running[:-1])[0]
        ns.extend(int(v) for v in n[idx])
        devs.extend(float(v) for v in dev[idx])
        best = min(best, float(running[-1]))
    return np.array(ns, dtype=np.int64), np.array(devs, dtype=np.float64)


def blaschke_eval(zeros, front, z):
    zeros = np.asarray(zeros, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    out = np.full(z.shape, complex(front), dtype=np.complex128)
    for a in zeros:
        out *= (z - a) / (1.0 - np.conj(a) * z)
    return out


def difference_quotient(zeros, front, z, w):
    """Matrix ``D[i, j] = (B(z_i) - B(w_j)) / (z_i - w_j)``, stable at ``z == w``.

    The product rule is telescoped factor by factor, so no subtraction of
    nearly equal products ever happens.
    """
    zeros = np.asarray(zeros, dtype=np.complex128)
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    w = np.atleast_1d(np.asarray(w, dtype=np.complex128))
    n = zeros.size
    ac = np.conj(zeros)
    num = 1.0 - np.abs(zeros) ** 2
    dz = 1.0 - np.multiply.outer(z, ac)  # (N, n)
    dw = 1.0 - np.multiply.outer(w, ac)  # (M, n)
    bz = (z[:, None] - zeros[None, :]) / dz
    bw = (w[:, None] - zeros[None, :]) / dw
    left = np.ones((z.size, n), dtype=np.complex128)
    right = np.ones((w.size, n), dtype=np.complex128)
    if n > 1:
        left[:, 1:] = np.cumprod(bz[:, :-1], axis=1)
        right[:, :-1] = np.cumprod(bw[:, :0:-1], axis=1)[:, ::-1]
    out = np.empty((z.size, w.size), dtype=np.complex128)
    step = max(1, _CHUNK // max(1, w.size * n))
    for s in range(0, z.size, step):
        sl = slice(s, s + step)
        q = num[None, None, :] / (dz[sl, None, :] * dw[None, :, :])
        out[sl] = np.einsum("ik,ijk,jk->ij", left[sl], q, right)
    return complex(front) * out
