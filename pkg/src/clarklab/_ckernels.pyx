# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np

from libc.math cimport fabs, sin, rint, M_PI, INFINITY

ctypedef double complex cplx


cdef inline double _atom_dev(long n, double t, double s) nogil:
    cdef double r = <double>n * t - s
    r -= rint(r)
    return 2.0 * fabs(sin(M_PI * r))


def return_time_scan(turns, target_turns, double eps, long n_max):
    cdef const double[::1] t = np.ascontiguousarray(turns, dtype=np.float64)
    cdef const double[::1] s = np.ascontiguousarray(target_turns, dtype=np.float64)
    cdef Py_ssize_t k, m = t.shape[0]
    cdef long n
    cdef double dev, worst, best_dev = INFINITY
    cdef long best_n = 0
    hits = []
    for n in range(1, n_max + 1):
        worst = 0.0
        for k in range(m):
            dev = _atom_dev(n, t[k], s[k])
            if dev > worst:
                worst = dev
                if worst > eps and worst >= best_dev:
                    break
        if worst < best_dev:
            best_dev = worst
            best_n = n
        if worst <= eps:
            hits.append(n)
    return np.array(hits, dtype=np.int64), best_dev, best_n


def return_time_records(turns, target_turns, long n_max):
    cdef const double[::1] t = np.ascontiguousarray(turns, dtype=np.float64)
    cdef const double[::1] s = np.ascontiguousarray(target_turns, dtype=np.float64)
    cdef Py_ssize_t k, m = t.shape[0]
    cdef long n
    cdef double dev, worst, best = INFINITY
    ns = []
    devs = []
    for n in range(1, n_max + 1):
        worst = 0.0
        for k in range(m):
            dev = _atom_dev(n, t[k], s[k])
            if dev > worst:
                worst = dev
                if worst >= best:
                    break
        if worst < best:
            best = worst
            ns.append(n)
            devs.append(worst)
    return np.array(ns, dtype=np.int64), np.array(devs, dtype=np.float64)


def blaschke_eval(zeros, front, z):
    cdef const cplx[::1] a = np.ascontiguousarray(zeros, dtype=np.complex128)
    zz = np.ascontiguousarray(z, dtype=np.complex128)
    shape = zz.shape
    cdef const cplx[::1] x = zz.reshape(-1)
    out = np.empty(x.shape[0], dtype=np.complex128)
    cdef cplx[::1] o = out
    cdef cplx c = front
    cdef cplx acc, top, bot, xi
    cdef Py_ssize_t i, k, n = a.shape[0]
    for i in range(x.shape[0]):
        xi = x[i]
        acc = c
        top = 1.0
        bot = 1.0
        for k in range(n):
            top = top * (xi - a[k])
            bot = bot * (1.0 - a[k].conjugate() * xi)
            # one division per block keeps the partial products in range
            if (k & 31) == 31:
                acc = acc * (top / bot)
                top = 1.0
                bot = 1.0
        o[i] = acc * (top / bot)
    return out.reshape(shape)


def difference_quotient(zeros, front, z, w):
    cdef const cplx[::1] a = np.ascontiguousarray(zeros, dtype=np.complex128)
    cdef const cplx[::1] zz = np.ascontiguousarray(np.atleast_1d(z), dtype=np.complex128)
    cdef const cplx[::1] ww = np.ascontiguousarray(np.atleast_1d(w), dtype=np.complex128)
    cdef Py_ssize_t n = a.shape[0], N = zz.shape[0], M = ww.shape[0]
    cdef Py_ssize_t i, j, k
    cdef cplx c = front
    cdef cplx left, dzk, coef, dwk
    cdef double numk
    # q[k, j] = (1 - |a_k|^2) prod_{l > k} b_l(w_j) / (1 - conj(a_k) w_j)
    q_a = np.empty((n, M), dtype=np.complex128)
    cdef cplx[:, ::1] q = q_a
    cdef cplx r
    for j in range(M):
        r = 1.0
        for k in range(n - 1, -1, -1):
            numk = 1.0 - (a[k].real * a[k].real + a[k].imag * a[k].imag)
            dwk = 1.0 - a[k].conjugate() * ww[j]
            q[k, j] = numk * r / dwk
            r = r * (ww[j] - a[k]) / dwk
    out = np.zeros((N, M), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    for i in range(N):
        left = c
        for k in range(n):
            dzk = 1.0 - a[k].conjugate() * zz[i]
            coef = left / dzk
            for j in range(M):
                o[i, j] = o[i, j] + coef * q[k, j]
            left = left * (zz[i] - a[k]) / dzk
    return out
