r"""Monte Carlo estimation of the parametric spectral correlator.

For each realization a pair (H1, H2) seeds the trigonometric family; the
two family members at parameter offset dx are diagonalized and the
connected product of resolvent traces

    k_c(eps, dx) = < g+(E + eps/2; x) g-(E - eps/2; x') >
                   - < g+ > < g- >

is averaged over the ensemble and over center energies E inside a central
window of the band (where the semicircle is flat and the spacing is
``d = pi lam / n``).  Energies are booked in units of d: the estimator
takes a grid of ``eps/d`` values and a grid of ``gamma_down/d`` strengths,
realizing each gamma by ``dx = sqrt(pi gamma / (2 n))``.

Modes: ``"exact"`` evaluates the family members H(+-dx/2) themselves
(each is exactly an ensemble draw, so spectra are undistorted for any dx);
``"linearized"`` uses the first-order forms H0 +- (dx/2) V.  Both modes
coincide bit for bit at dx = 0, where the estimator reduces to the plain
two-point function of a single ensemble (see :func:`estimate_two_point`).

Errors are bootstrap standard deviations over realizations (resampling is
shared across grid points and gamma values, so paired comparisons benefit
from common random numbers).  Everything is deterministic given
(config, seed): realization i draws H1, H2 on Philox streams (seed, 2i)
and (seed, 2i+1), and the bootstrap uses the reserved stream (seed, 2^63).
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ensembles import RNG_METHOD, EnsembleSpec, mean_level_spacing, rng_for, sample
from .parametric import ParametricPair, build_h, delta_x_for_gamma, linearize
from .spectral import ADVANCED, RETARDED, eigenvalues, green_trace

__all__ = [
    "CorrelatorGrid",
    "ExactVsLinearized",
    "DecorrelationProfile",
    "estimate_k",
    "estimate_two_point",
    "compare_exact_vs_linearized",
    "decorrelation_profile",
]

BOOTSTRAP_STREAM = 2 ** 63
DEFAULT_WINDOW_FRACTION = 0.2
DEFAULT_ETA_OVER_D = 0.5
DEFAULT_ENERGY_POINTS = 13
DEFAULT_BOOTSTRAP = 200


@dataclass(frozen=True)
class CorrelatorGrid:
    """Connected correlator estimates on an (eps/d, gamma) grid.

    ``values[i, j]`` is the estimate at ``epsilon_over_d[i]``,
    ``gamma_over_d[j]``; ``std_err`` is the bootstrap standard deviation of
    the complex estimator, ``sqrt(Var Re + Var Im)``.
    """

    epsilon_over_d: np.ndarray
    gamma_over_d: np.ndarray
    values: np.ndarray
    std_err: np.ndarray
    samples: int
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExactVsLinearized:
    """Paired-seed difference between exact and linearized estimates."""

    exact: CorrelatorGrid
    linearized: CorrelatorGrid
    difference: np.ndarray
    diff_err: np.ndarray  # paired bootstrap std of the difference
    combined_err: np.ndarray  # quadrature sum of the two single-mode errors


@dataclass(frozen=True)
class DecorrelationProfile:
    """|k_c| at fixed eps as a function of the decorrelation strength."""

    epsilon_over_d: float
    gamma_over_d: np.ndarray
    magnitude: np.ndarray
    std_err: np.ndarray
    grid: CorrelatorGrid


def estimate_k(spec: EnsembleSpec, epsilon_over_d, gamma_over_d, *, samples, seed,
               eta_over_d=DEFAULT_ETA_OVER_D, mode="exact",
               window_fraction=DEFAULT_WINDOW_FRACTION,
               n_energy=DEFAULT_ENERGY_POINTS, n_boot=DEFAULT_BOOTSTRAP,
               threads=1):
    """Estimate the connected parametric correlator on an (eps/d, gamma) grid.

    Returns a :class:`CorrelatorGrid` with bootstrap errors.  Deterministic
    for fixed arguments, independent of ``threads``.
    """
    rs, gammas = _validate_grids(spec, epsilon_over_d, gamma_over_d,
                                 samples, eta_over_d, window_fraction, mode)
    gp, gm = _family_traces(spec, rs, gammas, samples, seed, mode, eta_over_d,
                            window_fraction, n_energy, threads)
    values = _connected_grid(gp, gm)
    boot = _bootstrap(gp, gm, seed, n_boot)
    std_err = _boot_std(boot)
    meta = _meta(spec, seed, samples, eta_over_d, window_fraction, n_energy,
                 n_boot, mode)
    return CorrelatorGrid(epsilon_over_d=rs, gamma_over_d=gammas, values=values,
                          std_err=std_err, samples=samples, meta=meta)


def estimate_two_point(spec: EnsembleSpec, epsilon_over_d, *, samples, seed,
                       eta_over_d=DEFAULT_ETA_OVER_D,
                       window_fraction=DEFAULT_WINDOW_FRACTION,
                       n_energy=DEFAULT_ENERGY_POINTS, n_boot=DEFAULT_BOOTSTRAP,
                       threads=1):
    """Plain two-point correlator of a single ensemble (no parameter offset).

    Draws one matrix per realization on the same stream the parametric
    estimator uses for H1, so at dx = 0 the two estimators agree bit for
    bit.  Returns a grid with the single column gamma_over_d = [0].
    """
    rs, _ = _validate_grids(spec, epsilon_over_d, [0.0], samples, eta_over_d,
                            window_fraction, "exact")
    d = mean_level_spacing(spec)
    energies = _energy_grid(spec, window_fraction, n_energy)
    gp = np.empty((1, samples, n_energy, rs.size), dtype=complex)
    gm = np.empty_like(gp)

    def work(i):
        h = sample(spec, seed, stream=2 * i)
        s = eigenvalues(h)
        gp[0, i], gm[0, i] = _branch_traces(s, s, energies, rs, d, eta_over_d * d)

    _run(work, samples, threads)
    values = _connected_grid(gp, gm)
    std_err = _boot_std(_bootstrap(gp, gm, seed, n_boot))
    meta = _meta(spec, seed, samples, eta_over_d, window_fraction, n_energy,
                 n_boot, "two-point")
    return CorrelatorGrid(epsilon_over_d=rs, gamma_over_d=np.array([0.0]),
                          values=values, std_err=std_err, samples=samples,
                          meta=meta)


def compare_exact_vs_linearized(spec: EnsembleSpec, epsilon_over_d, gamma_over_d,
                                *, samples, seed,
                                eta_over_d=DEFAULT_ETA_OVER_D,
                                window_fraction=DEFAULT_WINDOW_FRACTION,
                                n_energy=DEFAULT_ENERGY_POINTS,
                                n_boot=DEFAULT_BOOTSTRAP, threads=1):
    """Coupled-seed comparison of the exact and linearized estimators.

    Both modes run on identical (H1, H2) draws, so the difference estimate
    cancels the common statistical noise; its error bar comes from a paired
    bootstrap with shared resample indices.
    """
    rs, gammas = _validate_grids(spec, epsilon_over_d, gamma_over_d, samples,
                                 eta_over_d, window_fraction, "exact")
    traces = {}
    for mode in ("exact", "linearized"):
        traces[mode] = _family_traces(spec, rs, gammas, samples, seed, mode,
                                      eta_over_d, window_fraction, n_energy,
                                      threads)
    grids = {}
    boots = {}
    for mode, (gp, gm) in traces.items():
        values = _connected_grid(gp, gm)
        boot = _bootstrap(gp, gm, seed, n_boot)
        grids[mode] = CorrelatorGrid(
            epsilon_over_d=rs, gamma_over_d=gammas, values=values,
            std_err=_boot_std(boot), samples=samples,
            meta=_meta(spec, seed, samples, eta_over_d, window_fraction,
                       n_energy, n_boot, mode))
        boots[mode] = boot
    diff = grids["exact"].values - grids["linearized"].values
    boot_diff = boots["exact"] - boots["linearized"]
    diff_err = _boot_std(boot_diff)
    combined = np.sqrt(grids["exact"].std_err ** 2
                       + grids["linearized"].std_err ** 2)
    return ExactVsLinearized(exact=grids["exact"], linearized=grids["linearized"],
                             difference=diff, diff_err=diff_err,
                             combined_err=combined)


def decorrelation_profile(spec: EnsembleSpec, gamma_over_d, *, epsilon_over_d=0.0,
                          samples, seed, **kwargs):
    """|k_c| at fixed eps/d along a gamma grid (same estimator, one eps row)."""
    grid = estimate_k(spec, [epsilon_over_d], gamma_over_d, samples=samples,
                      seed=seed, **kwargs)
    return DecorrelationProfile(
        epsilon_over_d=float(epsilon_over_d),
        gamma_over_d=grid.gamma_over_d,
        magnitude=np.abs(grid.values[0]),
        std_err=grid.std_err[0],
        grid=grid,
    )


def _validate_grids(spec, epsilon_over_d, gamma_over_d, samples, eta_over_d,
                    window_fraction, mode):
    if not isinstance(spec, EnsembleSpec):
        raise TypeError(f"expected EnsembleSpec, got {type(spec).__name__}")
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    if not (eta_over_d > 0):
        raise ValueError("eta_over_d must be positive")
    if not (0 < window_fraction <= 1):
        raise ValueError("window_fraction must be in (0, 1]")
    if mode not in ("exact", "linearized"):
        raise ValueError(f"mode must be 'exact' or 'linearized', got {mode!r}")
    rs = np.atleast_1d(np.asarray(epsilon_over_d, dtype=float))
    gammas = np.atleast_1d(np.asarray(gamma_over_d, dtype=float))
    if np.any(gammas < 0):
        raise ValueError("gamma_over_d values must be nonnegative")
    if gammas.size and gammas.max() > 0.05 * spec.n:
        warnings.warn(
            f"gamma_over_d up to {gammas.max():g} at n = {spec.n} leaves the "
            "perturbative regime (dx^2 should be O(1/n)); results may not be "
            "universal",
            RuntimeWarning,
        )
    return rs, gammas


def _energy_grid(spec, window_fraction, n_energy):
    half = window_fraction * 2.0 * spec.lam
    return np.linspace(-half, half, n_energy)


def _branch_traces(sample_plus, sample_minus, energies, rs, d, eta):
    """Retarded/advanced trace arrays of shape (n_energy, n_r)."""
    e_plus = energies[:, None] + 0.5 * rs[None, :] * d
    e_minus = energies[:, None] - 0.5 * rs[None, :] * d
    gp = green_trace(sample_plus, e_plus, eta, RETARDED)
    gm = green_trace(sample_minus, e_minus, eta, ADVANCED)
    return gp, gm


def _family_traces(spec, rs, gammas, samples, seed, mode, eta_over_d,
                   window_fraction, n_energy, threads):
    """Per-realization branch traces, shape (n_gamma, samples, n_energy, n_r)."""
    d = mean_level_spacing(spec)
    eta = eta_over_d * d
    energies = _energy_grid(spec, window_fraction, n_energy)
    dxs = np.array([delta_x_for_gamma(g, spec) for g in gammas])
    gp = np.empty((gammas.size, samples, n_energy, rs.size), dtype=complex)
    gm = np.empty_like(gp)

    def work(i):
        h1 = sample(spec, seed, stream=2 * i)
        h2 = sample(spec, seed, stream=2 * i + 1)
        for j, dx in enumerate(dxs):
            pair = ParametricPair(h1=h1, h2=h2, x=0.5 * dx, x_prime=-0.5 * dx)
            if mode == "exact":
                h_plus = build_h(pair, pair.x)
                h_minus = build_h(pair, pair.x_prime)
            else:
                lin = linearize(pair)
                h_plus = lin.h_plus()
                h_minus = lin.h_minus()
            sp = eigenvalues(h_plus)
            sm = eigenvalues(h_minus)
            gp[j, i], gm[j, i] = _branch_traces(sp, sm, energies, rs, d, eta)

    _run(work, samples, threads)
    return gp, gm


def _connected(gp, gm):
    """Connected average: per-energy ensemble means, then energy average."""
    prod = (gp * gm).mean(axis=0)
    disc = gp.mean(axis=0) * gm.mean(axis=0)
    return (prod - disc).mean(axis=0)


def _connected_grid(gp, gm):
    values = np.empty((gp.shape[3], gp.shape[0]), dtype=complex)
    for j in range(gp.shape[0]):
        values[:, j] = _connected(gp[j], gm[j])
    return values


def _bootstrap(gp, gm, seed, n_boot):
    """Resampled connected estimates, shape (n_boot, n_gamma, n_r).

    The resample index stream depends only on (seed, samples, n_boot), so
    estimators sharing those values are resampled in lockstep.
    """
    n_gamma, samples = gp.shape[0], gp.shape[1]
    rng = rng_for(seed, BOOTSTRAP_STREAM)
    boot = np.empty((n_boot, n_gamma, gp.shape[3]), dtype=complex)
    for b in range(n_boot):
        idx = rng.integers(0, samples, size=samples)
        for g in range(n_gamma):
            boot[b, g] = _connected(gp[g, idx], gm[g, idx])
    return boot


def _boot_std(boot):
    """(n_r, n_gamma) std of complex resamples: sqrt(Var Re + Var Im)."""
    err = np.sqrt(boot.real.var(axis=0, ddof=1) + boot.imag.var(axis=0, ddof=1))
    return err.T


def _run(work, samples, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(samples)))
    else:
        for i in range(samples):
            work(i)


def _meta(spec, seed, samples, eta_over_d, window_fraction, n_energy, n_boot, mode):
    return {
        "symmetry": spec.symmetry,
        "n": spec.n,
        "lam": spec.lam,
        "seed": int(seed),
        "samples": int(samples),
        "eta_over_d": float(eta_over_d),
        "window_fraction": float(window_fraction),
        "n_energy": int(n_energy),
        "n_boot": int(n_boot),
        "mode": mode,
        "rng": RNG_METHOD,
    }
