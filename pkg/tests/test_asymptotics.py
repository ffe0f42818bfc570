import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from clarklab import (
    ClarkError,
    FiniteBlaschke,
    HypothesisError,
    ModelSpace,
    block_inverse_bound,
    certify,
    cesaro_asymptote,
    contracting_return_times,
    clark_measure,
    find_return_times,
    monomial,
    power_sweep,
    return_norm_identities,
    return_time_limit,
)
from clarklab.asymptotics import eigen_condition
from clarklab.measure import return_time_records


SILVER = 1 + math.sqrt(2)
GOLDEN = (1 + math.sqrt(5)) / 2
# ||T^-1|| sqrt(2 ||T||^2 + 1) for T = [[1, 1], [0, -1]], T^-1 = T (mpmath, 14 digits)
BLOCK_RHS_N1 = 2.4972120409568


def power_bounded(rng, n, spread=1.0):
    """V D V^-1 with D unitary diagonal, eigenvalues 0.05 turns apart and V well conditioned."""
    V = np.eye(n) + spread * 0.3 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    gaps = 0.05 + rng.random(n) * (1 - 0.05 * n) / n
    lam = np.exp(2j * np.pi * (rng.random() + np.cumsum(gaps)))
    return (V * lam) @ np.linalg.inv(V), V, lam


def test_unitary_sweep_is_one():
    T = np.diag([1, 1j, -1])
    rep = power_sweep(T, 50)
    assert rep.m_plus == pytest.approx(1) and rep.m_minus == pytest.approx(1)
    assert rep.kappa == pytest.approx(1)
    assert rep.stabilized and rep.spectrum_on_circle


def test_two_by_two_involution():
    # T^2 = I so the sweep sees only I and T; ||T|| = ||T^-1|| = 1 + sqrt 2
    T = np.array([[1, -2], [0, -1]])
    rep = power_sweep(T, 40)
    assert rep.m_plus == pytest.approx(SILVER, abs=1e-12)
    assert rep.m_minus == pytest.approx(SILVER, abs=1e-12)
    assert rep.kappa >= SILVER - 1e-9


def test_spectrum_off_circle_flagged():
    rep = power_sweep(np.diag([2.0, 2.0]), 100)
    assert not rep.spectrum_on_circle
    assert math.isinf(rep.kappa)
    assert rep.diverged and not rep.stabilized


def test_sweep_rejects_singular_and_non_square():
    with pytest.raises(HypothesisError):
        power_sweep(np.array([[1, 0], [0, 0]]), 5)
    with pytest.raises(ClarkError):
        power_sweep(np.ones((2, 3)), 5)
    assert power_sweep(np.array([[1, 0], [0, 0]]), 5, inverse=False).m_plus == pytest.approx(1)


@given(st.integers(0, 10**6), st.integers(1, 5))
def test_sweep_monotone_in_length(seed, n):
    rng = np.random.default_rng(seed)
    T, _, _ = power_bounded(rng, n)
    a, b = power_sweep(T, 30), power_sweep(T, 90)
    assert b.m_plus >= a.m_plus and b.m_minus >= a.m_minus
    assert np.allclose(b.norms_plus[:31], a.norms_plus)


@given(st.integers(0, 10**6), st.integers(1, 5))
def test_kappa_bounds_every_power(seed, n):
    rng = np.random.default_rng(seed)
    T, _, _ = power_bounded(rng, n)
    rep = power_sweep(T, 200)
    assert max(rep.m_plus, rep.m_minus) <= rep.kappa * (1 + 1e-9)


def test_eigen_condition_of_jordan_block_is_infinite():
    assert math.isinf(eigen_condition(np.array([[1.0, 1.0], [0.0, 1.0]])))


def test_certify_records_and_errors():
    rep = power_sweep(np.array([[1, -2], [0, -1]]), 40)
    rec = certify(rep, "inverse_fifth")
    assert rec["pass"] and rec["bound"] == pytest.approx(SILVER ** 5)
    assert rec["certified"] and rec["caveat"] == ""
    assert rep.checks["inverse_fifth"] is rec
    assert certify(rep, "main")["bound"] == pytest.approx((2 * SILVER ** 2 + 1) * SILVER ** 5)
    rec = certify(rep, "inverse_quadratic", C=0.1)
    assert not rec["pass"]
    with pytest.raises(ClarkError):
        certify(rep, "fifth_power")
    with pytest.raises(ClarkError):
        certify(rep, "inverse_quadratic")
    with pytest.raises(ClarkError):
        certify(rep, "triangular")


def test_report_serialization():
    rep = power_sweep(np.diag([2.0]), 60)
    doc = json.loads(json.dumps(rep.to_json()))
    assert doc["kappa"] == "inf" and doc["diverged"] is True
    rep = power_sweep(np.array([[1, -2], [0, -1]]), 3)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "n,norm_plus,norm_minus"
    assert len(lines) == 5
    assert float(lines[2].split(",")[1]) == pytest.approx(SILVER)


def test_block_bound_example():
    rec = block_inverse_bound(np.array([[1, 1], [0, -1]]), 1, 1)
    assert rec["lhs"] == pytest.approx(GOLDEN, abs=1e-10)
    assert rec["rhs"] == pytest.approx(BLOCK_RHS_N1, abs=1e-10)
    assert rec["pass"]
    recs = block_inverse_bound(np.array([[1, 1], [0, -1]]), 1, range(6))
    assert [r["n"] for r in recs] == list(range(6)) and all(r["pass"] for r in recs)


def test_block_bound_preconditions():
    with pytest.raises(ClarkError):
        block_inverse_bound(np.array([[1, 0], [1, 1]]), 1, 1)
    with pytest.raises(ClarkError):
        block_inverse_bound(np.eye(2), 0, 1)
    with pytest.raises(HypothesisError):
        block_inverse_bound(np.array([[0, 1], [0, 1]]), 1, 1)


def test_cesaro_on_similar_diagonal():
    Y0 = np.array([[2.0, 1.0], [1.0, 1.5]])
    T = Y0 @ np.diag([1, 1j]) @ np.linalg.inv(Y0)
    res = cesaro_asymptote(T, n_avg=2 ** 16)
    assert np.allclose(np.sort_complex(np.linalg.eigvals(res.U_prime)), np.sort_complex(np.array([1, 1j])))
    assert res.residuals["unitarity_defect"] < 1e-6
    # Y T Y^-1 unitary and Y positive: Q = Y^2 is positive definite
    assert np.allclose(res.Y @ res.Y, res.Q)


def test_cesaro_of_unitary_is_identity():
    res = cesaro_asymptote(np.diag([1, -1, 1j]), n_avg=2 ** 8)
    assert np.allclose(res.Q, np.eye(3)) and np.allclose(res.Y, np.eye(3))


def test_cesaro_rejects_unbounded():
    with pytest.raises(HypothesisError):
        cesaro_asymptote(np.array([[1.0, 1.0], [0.0, 1.0]]), n_avg=2 ** 10)
    with pytest.raises(ClarkError):
        cesaro_asymptote(np.eye(2), order=3)


@given(st.integers(0, 10**6), st.integers(1, 4))
def test_cesaro_norm_bounds(seed, n):
    rng = np.random.default_rng(seed)
    T, _, _ = power_bounded(rng, n)
    res = cesaro_asymptote(T)
    rep = power_sweep(T, 2000)
    assert res.residuals["unitarity_defect"] < 1e-6
    assert res.residuals["norm_Y"] <= rep.kappa + 1e-6
    assert res.residuals["norm_Y_inv"] <= rep.kappa + 1e-6


def test_return_time_limit_identity_case():
    lam = np.array([1, -1])
    T = np.diag(lam).astype(complex)
    lim = return_time_limit(lam, np.ones(2), T, np.eye(2), [2, 4, 6])
    assert np.allclose(lim.R, np.eye(2))
    assert np.allclose(lim.residuals, 0)
    assert lim.checks["envelope_ok"] and lim.checks["inverse_ratio_ok"]


def test_return_time_limit_random():
    rng = np.random.default_rng(3)
    _, V, _ = power_bounded(rng, 3)
    mu = clark_measure(FiniteBlaschke([0, 0.3, -0.2 + 0.4j]), 1.0)
    lam = mu.points                            # generic frequencies
    T = (V * lam) @ np.linalg.inv(V)
    times, dev = return_time_records(mu, n_max=10**6)
    assert np.all(np.diff(dev) < 0)
    lim = return_time_limit(lam, np.ones(3), T, V, times)
    assert np.allclose(lim.R, np.eye(3), atol=1e-12)
    assert lim.checks["envelope_ok"]
    assert lim.residuals[-1] < 0.05 * lim.residuals[0]
    assert lim.checks["final_residual"] <= lim.checks["final_tolerance"]
    assert lim.checks["inverse_ratio_ok"]


def test_contracting_return_times_example():
    times, dev = contracting_return_times([1, 2, 3, 4], [0.5, 0.3, 0.1, 0.01], 1.5)
    # kappa^2 = 2.25: 0.3 is not below 0.5 / 2.25, 0.1 is, 0.01 is below 0.1 / 2.25
    assert list(times) == [1, 3, 4] and list(dev) == [0.5, 0.1, 0.01]
    with pytest.raises(ClarkError):
        contracting_return_times([1, 2], [0.1], 1.0)


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_residuals_decrease_along_contracting_times(seed, n):
    rng = np.random.default_rng(seed)
    _, V, lam = power_bounded(rng, n, spread=0.5)
    T = (V * lam) @ np.linalg.inv(V)
    from clarklab import AtomicMeasure

    mu = AtomicMeasure(lam, np.full(n, 1.0 / n))
    times, dev = return_time_records(mu, n_max=10**5)
    times, dev = contracting_return_times(times, dev, np.linalg.cond(V))
    lim = return_time_limit(lam, np.ones(n), T, V, times)
    assert lim.checks["monotone"] and lim.checks["envelope_ok"]
    assert np.all(np.diff(lim.residuals) < 0)


def test_return_time_limit_checks_hypotheses():
    with pytest.raises(ClarkError):
        return_time_limit([2, 1], [1, 1], np.eye(2), np.eye(2), [1])
    with pytest.raises(HypothesisError):
        return_time_limit([1, -1], [1, 1], np.eye(2), np.eye(2), [1])
    with pytest.raises(ClarkError):
        return_time_limit([1, 1], [1, 1], np.eye(2), np.eye(2), [])


def test_return_norm_identities_degree_one():
    # K_z = constants, single atom at 1: p is read at the atom, p(1) = 2, so each term is
    # 4 ||g||^2 - ||p g||^2 = 4 * 1.25 - (1 + 1.5^2 + 0.5^2) = 1.5
    sp = ModelSpace(monomial(1))
    out = return_norm_identities(sp, lambda z: 1 + 0.5 * z, [1, 1], [1, 2, 3])
    assert np.allclose(out.lhs_sequence_plus, 1.5, atol=1e-12)
    assert np.allclose(out.lhs_sequence_minus, 1.5, atol=1e-12)
    assert out.rhs_plus == pytest.approx(1.5) and out.rhs_minus == pytest.approx(1.5)
    assert out.converged


def test_return_norm_identities_exact_return_times():
    # Clark points of z^2 are +-1, so every even n is an exact return time
    sp = ModelSpace(monomial(2))
    out = return_norm_identities(sp, lambda z: 2 + z, [0, 1], [2, 4, 8])
    assert np.allclose(out.deviations, 0, atol=1e-12)
    assert np.allclose(out.lhs_sequence_plus, out.rhs_plus, atol=1e-10)
    assert np.allclose(out.lhs_sequence_minus, out.rhs_minus, atol=1e-10)
    assert out.converged


@pytest.mark.parametrize("p", [[1], [0, 1], [1, 1]])
def test_return_norm_identities_degree_three(p):
    th = FiniteBlaschke([0, 0.4, -0.3])
    sp = ModelSpace(th)
    times = find_return_times(clark_measure(th, 1.0), eps=1e-3, n_max=10**6)
    out = return_norm_identities(sp, lambda z: 1 + 0.3 * z ** 2, p, times)
    assert out.deviations[-1] <= 1e-3
    assert abs(out.lhs_sequence_plus[-1] - out.rhs_plus) <= out.tolerance
    assert abs(out.lhs_sequence_minus[-1] - out.rhs_minus) <= out.tolerance
    assert out.converged
    assert out.tolerance < 0.1


def test_return_norm_identities_needs_times():
    with pytest.raises(ClarkError):
        return_norm_identities(ModelSpace(monomial(1)), lambda z: z, [1], [])
