import importlib
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from clarklab import _pykernels

ck = pytest.importorskip("clarklab._ckernels")


def test_backend_selection_honours_env():
    code = "import clarklab; print(clarklab.BACKEND)"
    env = dict(os.environ, CLARKLAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    env.pop("CLARKLAB_PURE")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "cython"


def test_kernels_module_exports_active_backend():
    k = importlib.import_module("clarklab._kernels")
    impl = ck if k.BACKEND == "cython" else _pykernels
    assert k.blaschke_eval is impl.blaschke_eval


@given(st.integers(0, 10**6), st.integers(1, 5))
def test_return_time_scan_agrees(seed, m):
    rng = np.random.default_rng(seed)
    turns, target = rng.random(m), rng.random(m)
    a = _pykernels.return_time_scan(turns, target, 0.3, 40_000)
    b = ck.return_time_scan(turns, target, 0.3, 40_000)
    assert np.array_equal(a[0], b[0])
    assert a[1] == pytest.approx(b[1], abs=1e-12) and a[2] == b[2]


@given(st.integers(0, 10**6), st.integers(1, 5))
def test_return_time_records_agree(seed, m):
    rng = np.random.default_rng(seed)
    turns = rng.random(m)
    a = _pykernels.return_time_records(turns, np.zeros(m), 70_000)
    b = ck.return_time_records(turns, np.zeros(m), 70_000)
    assert np.array_equal(a[0], b[0])
    assert np.allclose(a[1], b[1], atol=1e-13)


@given(st.integers(0, 10**6), st.integers(0, 40))
def test_blaschke_eval_agrees(seed, n):
    rng = np.random.default_rng(seed)
    zeros = 0.95 * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    z = np.sqrt(rng.random((3, 7))) * np.exp(2j * np.pi * rng.random((3, 7)))
    front = np.exp(2j * np.pi * rng.random())
    a = _pykernels.blaschke_eval(zeros, front, z)
    b = ck.blaschke_eval(zeros, front, z)
    assert a.shape == b.shape == (3, 7)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


@given(st.integers(0, 10**6), st.integers(1, 20))
def test_difference_quotient_agrees(seed, n):
    rng = np.random.default_rng(seed)
    zeros = 0.9 * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    z = np.exp(2j * np.pi * rng.random(9))
    w = np.r_[z[:3], np.exp(2j * np.pi * rng.random(5))]    # includes z == w
    a = _pykernels.difference_quotient(zeros, 1.0, z, w)
    b = ck.difference_quotient(zeros, 1.0, z, w)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-13)


def test_difference_quotient_diagonal_is_derivative():
    zeros = np.array([0, 0.3, -0.2 + 0.5j])
    z = np.array([0.1 + 0.2j, np.exp(0.4j)])
    D = ck.difference_quotient(zeros, 1.0, z, z)
    h = 1e-6
    B = lambda x: _pykernels.blaschke_eval(zeros, 1.0, x)
    fd = (B(z + h) - B(z - h)) / (2 * h)
    assert np.allclose(np.diag(D), fd, atol=1e-8)
