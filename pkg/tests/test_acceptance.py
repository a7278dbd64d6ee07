"""Acceptance suite: one test per release criterion, heavyweight and seeded.

Criteria 5, 6 and 8 share session-scoped Monte Carlo and quadrature grids
(GOE, n = 200, 500 realizations; analytic values on the same grid).  Each
test prints a single PASS line with its headline numbers; run with
``pytest tests/test_acceptance.py -v -s`` to see them.
"""

import time

import numpy as np
import pytest

from parlevel import (
    EnsembleSpec,
    ParametricPair,
    build_h,
    estimate_k,
    estimate_two_point,
    gamma_over_d,
    integrand,
    k_for_comparison,
    l_matrix,
    linearize,
    mean_level_spacing,
    saddle_sigma,
    sample,
    semicircle_density,
    spreading_width,
    supertrace,
    symmetry_breaking_correlator,
    t_matrix,
)
from parlevel.cli import main as cli_main
from parlevel.correlator import CorrelatorGrid
from parlevel.kernel import KernelParams, calibrate_constant
from parlevel.report import compare_grids
from parlevel.superalgebra import (
    CASES,
    grading_preserving_similarity,
    symmetry_breaking_residual,
)

SEED = 20260808
SPEC200 = EnsembleSpec("goe", 200, 1.0)
R_GRID = np.linspace(0.1, 3.0, 10)
GAMMA_MAIN = np.array([0.5, 1.0, 2.0])
GAMMA_FULL = np.array([0.0, 0.5, 1.0, 2.0, 4.0])
ETA_OVER_D = 0.5


@pytest.fixture(scope="session")
def mc_headline():
    """One MC run covering criteria 5 and 6: eps {0} + R_GRID, gamma full."""
    rs = np.concatenate([[0.0], R_GRID])
    return estimate_k(SPEC200, rs, GAMMA_FULL, samples=500, seed=SEED,
                      eta_over_d=ETA_OVER_D, window_fraction=0.2)


@pytest.fixture(scope="session")
def analytic_headline():
    """Analytic values and error estimates on R_GRID x GAMMA_MAIN."""
    values = np.empty((R_GRID.size, GAMMA_MAIN.size), dtype=complex)
    errors = np.empty_like(values, dtype=float)
    for j, g in enumerate(GAMMA_MAIN):
        for i, r in enumerate(R_GRID):
            res = k_for_comparison(r, g, ETA_OVER_D, rtol=1e-6)
            values[i, j] = res.value
            errors[i, j] = res.error
            assert res.converged
    return values, errors


def _mc_main_slice(mc_headline):
    cols = [int(np.nonzero(np.isclose(mc_headline.gamma_over_d, g))[0][0])
            for g in GAMMA_MAIN]
    return CorrelatorGrid(
        epsilon_over_d=mc_headline.epsilon_over_d[1:],
        gamma_over_d=GAMMA_MAIN,
        values=mc_headline.values[1:, cols],
        std_err=mc_headline.std_err[1:, cols],
        samples=mc_headline.samples,
        meta=mc_headline.meta,
    )


def test_criterion_1_normalization_chain():
    t0 = time.perf_counter()
    spec = SPEC200
    n_real = 200
    iu = np.triu_indices(spec.n, k=1)
    offdiag = []
    eigs = []
    for i in range(n_real):
        h = sample(spec, SEED + 1, stream=i)
        offdiag.append(h[iu] ** 2)
        eigs.append(np.linalg.eigvalsh(h))
    offdiag = np.concatenate(offdiag)
    eigs_all = np.concatenate(eigs)

    variance = offdiag.mean()
    target = spec.lam ** 2 / spec.n
    assert variance == pytest.approx(target, rel=0.05)

    edges = np.linspace(-0.8 * spec.lam, 0.8 * spec.lam, 9)
    counts, _ = np.histogram(eigs_all, bins=edges)
    for lo, hi, count in zip(edges[:-1], edges[1:], counts):
        grid = np.linspace(lo, hi, 200)
        expected = n_real * np.trapezoid(semicircle_density(grid, spec), grid)
        assert count == pytest.approx(expected, rel=0.05)

    spacings = []
    for ev in eigs:
        central = ev[np.abs(ev) < 0.2 * spec.lam]
        spacings.append((central[-1] - central[0]) / (central.size - 1))
    d_emp = np.mean(spacings)
    assert d_emp == pytest.approx(mean_level_spacing(spec), rel=0.05)

    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"\nACCEPTANCE 1 PASS - variance {variance:.3e} vs {target:.3e}, "
          f"8/8 central bins within 5%, spacing {d_emp:.5f} vs "
          f"{mean_level_spacing(spec):.5f}, {elapsed:.1f}s")


def test_criterion_2_decorrelation_statistics():
    small = EnsembleSpec("goe", 2, 1.0)
    h0_el = np.empty(10_000)
    v_el = np.empty(10_000)
    for i in range(10_000):
        pair = ParametricPair.from_spec(small, SEED + 2, x=0.6, x_prime=0.2,
                                        stream_base=2 * i)
        lin = linearize(pair)
        h0_el[i] = lin.h0[0, 1]
        v_el[i] = lin.v[0, 1]
    cov = np.mean(h0_el * v_el) - h0_el.mean() * v_el.mean()
    sigma = np.sqrt(h0_el.var() * v_el.var() / h0_el.size)
    assert abs(cov) < 4 * sigma

    spec = EnsembleSpec("goe", 100, 1.0)
    x0 = 0.7
    ratios = []
    for dx in (1e-1, 1e-2, 1e-3):
        pair = ParametricPair.from_spec(spec, SEED + 3, x=x0 + dx / 2,
                                        x_prime=x0 - dx / 2)
        lin = linearize(pair)
        remainder = np.linalg.norm(build_h(pair, pair.x) - lin.h_plus())
        ratios.append(remainder / (dx ** 2 * np.linalg.norm(lin.h0)))
    assert ratios[1] == pytest.approx(ratios[2], rel=0.02)
    assert ratios[0] == pytest.approx(ratios[2], rel=0.10)
    print(f"\nACCEPTANCE 2 PASS - cov {cov:.2e} < 4 sigma {4*sigma:.2e}; "
          f"remainder/dx^2 ratios {[f'{x:.4f}' for x in ratios]}")


def test_criterion_3_strength_parameter_identities():
    rng = np.random.default_rng(SEED + 4)
    for _ in range(300):
        spec = EnsembleSpec("goe", int(rng.integers(2, 2000)),
                            float(rng.uniform(1e-3, 1e3)))
        dx = float(rng.uniform(0.0, 5.0))
        assert gamma_over_d(dx, spec) == (
            spreading_width(dx, spec) / mean_level_spacing(spec))
        assert gamma_over_d(dx, spec) == pytest.approx(
            (2 / np.pi) * spec.n * dx ** 2, rel=1e-12, abs=1e-300)
    special = gamma_over_d(np.sqrt(np.pi / 200), EnsembleSpec("goe", 100, 1.0))
    assert special == pytest.approx(1.0, abs=1e-14)
    print(f"\nACCEPTANCE 3 PASS - 300 randomized identity checks; "
          f"gamma(n=100, dx=sqrt(pi/200)) = {special!r}")


def test_criterion_4_superalgebra_suite():
    t0 = time.perf_counter()
    spec = EnsembleSpec("goe", 128, 1.0)
    rng = np.random.default_rng(SEED + 5)
    sigma0 = saddle_sigma(0.3, 1.0, dim=8)
    worst = 0.0
    for _ in range(100):
        sigma = grading_preserving_similarity(sigma0, rng)
        worst = max(worst, symmetry_breaking_residual(spec, 0.06, sigma))
    assert worst < 1e-12

    l8 = l_matrix(8)
    for _ in range(20):
        m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        from parlevel.superalgebra import GRADING_ORTHO_8, SuperMatrix

        sig = SuperMatrix(m, GRADING_ORTHO_8)
        lhs = symmetry_breaking_correlator(sig, l8)
        sl = sig @ l8
        rhs = 2 * supertrace(sl @ sl) - 2 * supertrace(sig @ sig)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    for case in CASES:
        t = t_matrix(case)
        sigma_d = saddle_sigma(0.0, 1.0, dim=t.dim)
        assert symmetry_breaking_correlator(sigma_d, t) == 0
    elapsed = time.perf_counter() - t0
    print(f"\nACCEPTANCE 4 PASS - max identity residual {worst:.2e}, "
          f"commutator-square identity exact, 4/4 diagonal correlators zero, "
          f"{elapsed:.1f}s")


def test_criterion_5_headline_cross_validation(mc_headline, analytic_headline):
    an_values, _ = analytic_headline
    mc = _mc_main_slice(mc_headline)
    cal1 = calibrate_constant(mc, gammas=[1.0])
    report = compare_grids(mc, an_values, calibration=cal1)
    assert report.normalized_rms < 0.10
    assert report.max_pull < 3.0
    for g in (0.5, 2.0):
        cal_g = calibrate_constant(mc, gammas=[g])
        gap = abs(cal_g.c - cal1.c)
        assert gap < 2.0 * np.hypot(cal_g.c_err, cal1.c_err)
    print(f"\nACCEPTANCE 5 PASS - C = {cal1.c:.1f} +- {cal1.c_err:.1f} "
          f"(gamma = 1), nRMS = {100*report.normalized_rms:.2f}% < 10%, "
          f"max pull = {report.max_pull:.2f} < 3")


def test_criterion_6_monotone_decorrelation(mc_headline):
    mags = np.abs(mc_headline.values[0, :])
    errs = mc_headline.std_err[0, :]
    for i in range(len(GAMMA_FULL) - 1):
        slack = np.hypot(errs[i], errs[i + 1])
        assert mags[i + 1] < mags[i] + slack
    ratio = mags[-1] / mags[0]
    assert ratio < 0.25
    curve = ", ".join(f"{g:g}:{m:.0f}" for g, m in zip(GAMMA_FULL, mags))
    print(f"\nACCEPTANCE 6 PASS - |k(0, gamma)| = {{{curve}}}, "
          f"gamma4/gamma0 = {ratio:.3f} < 0.25")


def test_criterion_7_two_point_reduction(tmp_path):
    from parlevel.runio import write_correlator_csv

    spec = EnsembleSpec("goe", 100, 1.0)
    rs = np.linspace(0.0, 2.5, 6)
    kw = dict(samples=60, seed=SEED + 6, n_boot=100)
    parametric = estimate_k(spec, rs, [0.0], mode="exact", **kw)
    linearized = estimate_k(spec, rs, [0.0], mode="linearized", **kw)
    plain = estimate_two_point(spec, rs, **kw)
    assert np.array_equal(parametric.values, plain.values)
    assert np.array_equal(parametric.std_err, plain.std_err)
    assert np.array_equal(linearized.values, plain.values)

    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    write_correlator_csv(pa, parametric)
    write_correlator_csv(
        pb, CorrelatorGrid(epsilon_over_d=plain.epsilon_over_d,
                           gamma_over_d=np.array([0.0]), values=plain.values,
                           std_err=plain.std_err, samples=plain.samples,
                           meta=plain.meta))
    assert pa.read_bytes() == pb.read_bytes()
    print("\nACCEPTANCE 7 PASS - parametric estimator at dx = 0 is bitwise "
          "identical to the plain two-point estimator (values, errors, CSV)")


def test_criterion_8_quadrature_convergence(analytic_headline):
    values_loose, errors_loose = analytic_headline
    worst = 0.0
    for j, g in enumerate(GAMMA_MAIN):
        for i, r in enumerate(R_GRID):
            tight = k_for_comparison(r, g, ETA_OVER_D, rtol=1e-7)
            assert tight.converged
            delta = abs(tight.value - values_loose[i, j])
            assert delta <= errors_loose[i, j]
            worst = max(worst, delta / errors_loose[i, j] if errors_loose[i, j] else 0.0)

    rng = np.random.default_rng(SEED + 7)
    p = KernelParams(r=1.2, gamma=1.0, regulator=1.0)
    for _ in range(300):
        l1, l2 = rng.exponential(2.0, size=2)
        l = rng.uniform(0.0, 1.0)
        assert integrand(l1, l2, l, p) == pytest.approx(
            integrand(l2, l1, l, p), rel=1e-13, abs=1e-300)
    print(f"\nACCEPTANCE 8 PASS - 30/30 grid points move <= prior error "
          f"estimate under 10x tighter tolerance (worst fraction {worst:.2f}); "
          f"integrand swap symmetry at machine precision")


def test_criterion_9_reproducibility(tmp_path):
    runs = {}
    for tag in ("a", "b"):
        out = tmp_path / f"corr_{tag}"
        assert cli_main(["correlate", "--class", "goe", "--n", "50",
                         "--samples", "15", "--seed", "99",
                         "--epsilon-grid", "0:2:4", "--gamma-grid", "0,1",
                         "--reproducible", "--out", str(out)]) == 0
        runs[tag] = (out / "correlator.csv").read_bytes()
    assert runs["a"] == runs["b"]

    for tag in ("a", "b"):
        out = tmp_path / f"an_{tag}"
        assert cli_main(["analytic", "--epsilon-grid", "0.9",
                         "--gamma-grid", "1", "--rtol", "1e-5",
                         "--out", str(out)]) == 0
        runs[tag] = (out / "analytic.csv").read_bytes()
    assert runs["a"] == runs["b"]

    for tag in ("a", "b"):
        out = tmp_path / f"sp_{tag}"
        assert cli_main(["sample", "--class", "gue", "--n", "24",
                         "--samples", "6", "--seed", "5",
                         "--out", str(out)]) == 0
        runs[tag] = (out / "spectra.csv").read_bytes()
    assert runs["a"] == runs["b"]
    print("\nACCEPTANCE 9 PASS - correlate, analytic and sample reruns are "
          "bitwise identical for fixed (config, seed)")
