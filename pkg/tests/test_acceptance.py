"""Acceptance criteria AC1-AC12, each printing one PASS/FAIL line."""
import subprocess
import sys

import numpy as np
import pytest

from clarklab import (
    AtomicMeasure,
    FiniteBlaschke,
    ModelSpace,
    block_inverse_bound,
    certify,
    cesaro_asymptote,
    clark_measure,
    contracting_return_times,
    example_clark_weight,
    example_crofoot,
    find_return_times,
    from_clark_measure,
    reduction_pipeline,
    monomial,
    power_sweep,
    random_instance,
    return_norm_identities,
    return_time_limit,
)
from clarklab.measure import return_time_records
from clarklab.operators import (
    RankOneData,
    Symbol,
    att_inverse,
    att_structure,
    clark_unitary,
    direct_sum_check,
    isometry_classification,
    multiplier_from_intertwiner,
    opnorm,
    perturbation_from_multiplier,
    rank_one_perturbation,
    rank_one_resolvent,
)

from helpers import cvec, multiset_distance, random_measure, random_theta, unit


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for the terminal summary, then assert."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    def report(tag, ok, detail):
        line = f"{tag} {'PASS' if ok else 'FAIL'}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return report


def similar_to_unitary(rng, n, spread=0.3):
    """V D V^-1 with D diagonal unitary, eigenvalues 0.05 turns apart."""
    V = np.eye(n) + spread * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    gaps = 0.05 + rng.random(n) * (1 - 0.05 * n) / n
    lam = np.exp(2j * np.pi * (rng.random() + np.cumsum(gaps)))
    return (V * lam) @ np.linalg.inv(V), V, lam


def test_ac1_clark_correspondence(verdict):
    rng = np.random.default_rng(101)
    measure_err = theta_err = mass_err = 0.0
    for i in range(30):
        mu = random_measure(rng, 1 + i % 12)
        th = from_clark_measure(mu)
        back = clark_measure(th, 1.0)
        d = np.abs(np.subtract.outer(mu.points, back.points))
        j = d.argmin(axis=1)
        measure_err = max(measure_err, d.min(axis=1).max(), np.max(np.abs(back.weights[j] - mu.weights)))
        th2 = from_clark_measure(back)
        z = 0.9 * unit(rng, 16)
        theta_err = max(theta_err, multiset_distance(th2.zeros, th.zeros),
                        np.max(np.abs(th2.evaluate(z) - th.evaluate(z))))
        for c in unit(rng, 10):
            mass_err = max(mass_err, abs(clark_measure(th, c).mass - 1))
    ok = measure_err < 1e-8 and theta_err < 1e-8 and mass_err < 1e-10
    verdict("AC1", ok, f"measure round trip {measure_err:.1e}, theta round trip {theta_err:.1e}, "
                       f"mass {mass_err:.1e} (30 measures, 10 c each)")


def test_ac2_model_space_axioms(verdict):
    rng = np.random.default_rng(102)
    gram = repro = inter = conj = 0.0
    for i in range(20):
        n = 1 + i % 10
        sp = ModelSpace(random_theta(rng, n))
        E = sp.basis_values(sp.points)
        gram = max(gram, np.max(np.abs((np.conj(E).T * sp.weights) @ E - np.eye(n))))
        f = sp.vector(cvec(rng, n))
        lam = 0.9 * np.sqrt(rng.random()) * unit(rng)
        k = sp.kernel(lam).k
        repro = max(repro, abs(f(lam) - f.inner(k)) / max(1, f.norm() * k.norm()))
        c = unit(rng)
        J = sp.j_map(c)
        lhs = J.forward @ clark_unitary(sp, c).matrix
        inter = max(inter, opnorm(lhs - J.measure.points[:, None] * J.forward))
        _, res = sp.conjugate_boundary_transform(cvec(rng, n))
        conj = max(conj, max(res))
    ok = gram < 1e-10 and repro < 1e-10 and inter < 1e-10 and conj < 1e-10
    verdict("AC2", ok, f"Gram {gram:.1e}, reproducing {repro:.1e}, J intertwining {inter:.1e}, "
                       f"conjugate transform {conj:.1e} (20 instances)")


def test_ac3_isometric_perturbations(verdict):
    rng = np.random.default_rng(103)
    const_worst, nonconst_best = 0.0, np.inf
    for i in range(10):
        sp = ModelSpace(random_theta(rng, 1 + i % 8))
        T = rank_one_perturbation(sp, unit(rng) * sp.one()).matrix
        const_worst = max(const_worst, opnorm(T.conj().T @ T - np.eye(sp.dim)))
    for i in range(20):
        n = 1 + i % 8
        sp = ModelSpace(random_theta(rng, n))
        u = sp.one() + sp.vector(0.5 * cvec(rng, n))
        T = rank_one_perturbation(sp, u).matrix
        nonconst_best = min(nonconst_best, opnorm(T.conj().T @ T - np.eye(n)))
    ok = const_worst < 1e-10 and nonconst_best > 1e-6
    verdict("AC3", ok, f"u = c: max ||T*T - I|| {const_worst:.1e}; "
                       f"non-constant u: min ||T*T - I|| {nonconst_best:.2e}")


def test_ac4_rank_one_resolvent(verdict):
    rng = np.random.default_rng(104)
    worst = 0.0
    for i in range(50):
        n = 1 + i % 8
        sp = ModelSpace(random_theta(rng, n))
        u, v = sp.vector(cvec(rng, n)), sp.vector(cvec(rng, n))
        data = RankOneData(clark_unitary(sp, unit(rng)), u, v)
        lam = 0.9 * np.sqrt(rng.random()) * unit(rng)
        x = cvec(rng, n)
        y = rank_one_resolvent(data, lam, x).coords
        ref = np.linalg.solve(data.full().matrix - lam * np.eye(n), x)
        worst = max(worst, np.linalg.norm(y - ref) / np.linalg.norm(ref))
    verdict("AC4", worst < 1e-9, f"max relative error vs dense solve {worst:.1e} (50 instances, dims 1-8)")


def _multiplier_round_trip(inst):
    pr = perturbation_from_multiplier(inst.g, inst.dom, inst.cod, inst.c)
    rec = multiplier_from_intertwiner(pr.X, pr.u, inst.dom, inst.cod, inst.c)
    return pr.intertwining_residual, float(np.max(np.abs(rec.g.coords - inst.g.coords)))


def test_ac5_multiplier_round_trip(verdict):
    inter = coord = 0.0
    count = 0
    for k in (2, 3, 4):
        for lam in (0.3, 0.5, 0.5j):
            a, b = _multiplier_round_trip(example_crofoot(monomial(k), lam))
            inter, coord, count = max(inter, a), max(coord, b), count + 1
    for seed in range(20):
        a, b = _multiplier_round_trip(random_instance(1 + seed % 6, "crofoot", 500 + seed))
        inter, coord, count = max(inter, a), max(coord, b), count + 1
    ok = inter < 1e-8 and coord < 1e-7
    verdict("AC5", ok, f"intertwining {inter:.1e}, recovered g coordinates {coord:.1e} ({count} instances)")


def test_ac6_non_unitary_example(verdict):
    inst = example_crofoot(monomial(3), 0.5, 1.0)
    T, X = inst.T.matrix, inst.X.matrix
    smin = np.linalg.svd(T, compute_uv=False).min()
    kx = np.linalg.cond(X)
    defect = opnorm(T.conj().T @ T - np.eye(3))
    rec = certify(power_sweep(T, 2000), "inverse_fifth")
    ok = (inst.extra["level_set_size"] == 3 and smin > 1e-12 and np.isfinite(kx) and kx < 1e12
          and defect > 1e-6 and rec["pass"])
    verdict("AC6", ok, f"sigma_min(T) {smin:.3f}, kappa(X) {kx:.3f}, ||T*T - I|| {defect:.3f}, "
                       f"m_minus {rec['observed']:.4f} <= m_plus^5 {rec['bound']:.4f}")


def test_ac7_clark_weight(verdict):
    rng = np.random.default_rng(107)
    ident = inter = norm = 0.0
    agree = 0
    unitary_count = 0
    for i in range(20):
        n = 2 + i % 5
        theta = random_theta(rng, n)
        c = np.exp(2j * np.pi * (0.05 + 0.9 * rng.random()))
        mod = np.full(n, 0.5 + rng.random()) if i % 4 == 0 else 0.5 + 1.5 * rng.random(n)
        inst = example_clark_weight(theta, c, mod * unit(rng, n))
        r = inst.residuals
        ident = max(ident, r["weight_identity_boundary"])
        inter = max(inter, r["intertwining"])
        norm = max(norm, r["normalization"])
        is_unitary = isometry_classification(inst.cod, inst.u).kind == "unitary"
        agree += is_unitary == inst.extra["unitary_expected"]
        unitary_count += is_unitary
    ok = ident < 1e-8 and agree == 20 and inter < 1e-8 and norm < 1e-8
    verdict("AC7", ok, f"weight identity {ident:.1e}, unitary iff |phi| constant {agree}/20 "
                       f"({unitary_count} unitary), intertwining {inter:.1e}, normalization {norm:.1e}")


def test_ac8_truncated_toeplitz(verdict):
    rng = np.random.default_rng(108)
    kernel_ok = 0
    inverse_worst, inverse_count = 0.0, 0
    sufficient_ok, sufficient_count = True, 0
    for i in range(30):
        m = 2 + (i // 3) % 3
        k = i % 3
        om = random_theta(rng, m, 0.7)
        shared = min(k, m) if rng.random() < 0.7 else 0
        pick = rng.choice(m, size=shared, replace=False)
        own = 0.7 * np.sqrt(rng.random(k - shared)) * unit(rng, k - shared)
        inner = FiniteBlaschke(np.r_[om.zeros[pick], own], require_origin=False)
        sym = Symbol(inner, num=[2.0 + rng.random(), unit(rng)])
        if i % 2 == 0:
            # nearby theta of the same degree, so the direct sum usually holds
            z = om.zeros + np.r_[0, 0.05 * cvec(rng, m - 1)]
            th = FiniteBlaschke(z, om.front)
        else:
            th = random_theta(rng, int(rng.integers(1, 5)), 0.7)
        dom, cod = ModelSpace(th), ModelSpace(om)
        s = att_structure(sym, dom, cod)
        kernel_ok += s.kernel_dim_svd == s.kernel_dim_predicted == s.kernel_dim_evaluation
        ds = direct_sum_check(dom, cod)
        if ds.sufficient_condition:
            sufficient_count += 1
            sufficient_ok &= ds.invertible
        if ds.invertible and inner.degree == 0:
            inv = att_inverse(sym, dom, cod)
            inverse_worst = max(inverse_worst, inv.left_residual, inv.right_residual)
            inverse_count += 1
    ok = kernel_ok == 30 and inverse_worst < 1e-8 and inverse_count > 0 and sufficient_ok and sufficient_count > 0
    verdict("AC8", ok, f"kernel dimension matches {kernel_ok}/30, inverse residual {inverse_worst:.1e} "
                       f"({inverse_count} invertible), sup distance < 1 implies invertible on {sufficient_count}")


def test_ac9_return_norm_identities(verdict):
    g = lambda z: 1 + 0.3 * z ** 2
    worst = 0.0
    ok = True
    details = []
    for th in (monomial(1), FiniteBlaschke([0, 0.5]), FiniteBlaschke([0, 0.4, -0.3])):
        sp = ModelSpace(th)
        times = find_return_times(clark_measure(th, 1.0), eps=1e-3, n_max=10**6)
        for p in ([1], [0, 1], [1, 1]):
            out = return_norm_identities(sp, g, p, times)
            gap = max(abs(out.lhs_sequence_plus[-1] - out.rhs_plus),
                      abs(out.lhs_sequence_minus[-1] - out.rhs_minus))
            ok &= out.converged and out.deviations[-1] <= 1e-3 and gap <= out.tolerance
            worst = max(worst, gap / out.tolerance)
        details.append(f"deg {th.degree}: {times.size} return times")
    verdict("AC9", ok, f"final gap / tolerance <= {worst:.2f}, eps 1e-3, p in {{1, z, 1+z}}; "
                       + ", ".join(details))


def test_ac10_similarity_and_return_limit(verdict):
    rng = np.random.default_rng(110)
    defect, y_excess = 0.0, -np.inf
    for i in range(20):
        T, _, _ = similar_to_unitary(rng, 2 + i % 4, 0.4)
        res = cesaro_asymptote(T)
        M = power_sweep(T, 2000).m_plus
        defect = max(defect, res.residuals["unitarity_defect"])
        y_excess = max(y_excess, res.residuals["norm_Y"] - M, res.residuals["norm_Y_inv"] - M)
    monotone = inverse_ok = 0
    lengths = []
    for i in range(20):
        T, V, lam = similar_to_unitary(rng, 2 + i % 3, 0.15)
        times, dev = return_time_records(AtomicMeasure(lam, np.full(lam.size, 1.0 / lam.size)), n_max=10**6)
        times, dev = contracting_return_times(times, dev, np.linalg.cond(V))
        lim = return_time_limit(lam, np.ones(lam.size), T, V, times, samples=20, seed=i)
        monotone += lim.checks["monotone"] and times.size >= 2
        inverse_ok += lim.checks["inverse_ratio_ok"]
        lengths.append(times.size)
    ok = defect < 1e-6 and y_excess <= 1e-6 and monotone == 20 and inverse_ok == 20
    verdict("AC10", ok, f"unitarity defect {defect:.1e}, max(||Y||, ||Y^-1||) - m_plus {y_excess:.2e}; "
                        f"residuals decrease {monotone}/20 (return times per instance {min(lengths)}-{max(lengths)}), "
                        f"||R^-1 x|| <= M^3 ||R x|| {inverse_ok}/20")


def test_ac11_inequality_certificates(verdict):
    rng = np.random.default_rng(111)
    block_ok = 0
    for i in range(30):
        k1, k2 = 1 + i % 3, 1 + (i // 3) % 3
        T1, _, _ = similar_to_unitary(rng, k1)
        T2, _, _ = similar_to_unitary(rng, k2)
        T = np.block([[T1, cvec(rng, k1 * k2).reshape(k1, k2)], [np.zeros((k2, k1)), T2]])
        block_ok += all(r["pass"] for r in block_inverse_bound(T, k1, range(51)))
    recon = 0.0
    tri_ok = main_ok = 0
    for i in range(10):
        inst = random_instance(3 + i % 6, "triangular", 1100 + i)
        rep = reduction_pipeline(inst, n_sweep=2000)
        recon = max(recon, rep.stages["triangular_reconstruction"])
        tri_ok += rep.certificates["T_triangular"]["pass"]
        main_ok += rep.certificates["T_main"]["pass"] and rep.passed
    ok = block_ok == 30 and recon < 1e-9 and tri_ok == 10 and main_ok == 10
    verdict("AC11", ok, f"block bound n <= 50 on {block_ok}/30; triangular reconstruction {recon:.1e}, "
                        f"triangular bound {tri_ok}/10, (2M^2+1)M^5 bound {main_ok}/10 (dims 3-8)")


def test_ac12_deterministic_verify(verdict):
    cmd = [sys.executable, "-m", "clarklab", "verify", "--suite", "all"]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    ok = a.returncode == 0 and b.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 0
    verdict("AC12", ok, f"exit codes {a.returncode}, {b.returncode}; reports byte-identical: "
                        f"{a.stdout == b.stdout} ({len(a.stdout)} bytes)")
