"""Command-line front end: sample | correlate | analytic | compare | symbreak.

Runs are configured by a key-value file ([run] section) and/or flags; flags
win.  Every data file gets a JSON metadata sidecar with the effective
config, seed, version, timestamp and host.  Exit codes: 0 ok, 2 config or
parameter error, 3 numeric non-convergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .correlator import estimate_k
from .ensembles import EnsembleSpec, rng_for, sample as draw_matrix
from .kernel import (
    DAMPING_RADIAL,
    kernel_grid,
    regulator_for_eta,
)
from .report import check_smoothing_compatible, compare_grids, render_report
from .runio import (
    load_config,
    parse_grid,
    read_analytic_csv,
    read_correlator_csv,
    read_metadata,
    write_analytic_csv,
    write_correlator_csv,
    write_metadata,
    write_spectra_csv,
)
from .spectral import eigenvalues
from .superalgebra import (
    CASES,
    GRADING_ORTHO_8,
    SuperMatrix,
    grading_preserving_similarity,
    l_matrix,
    saddle_sigma,
    supertrace,
    symmetry_breaking_correlator,
    symmetry_breaking_residual,
    t_matrix,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _spec_from(cfg):
    return EnsembleSpec(symmetry=str(cfg["class"]).lower(), n=int(cfg["n"]),
                        lam=float(cfg.get("lambda", 1.0)))


def _effective_config(args, defaults):
    """Config-file values overridden by any explicitly set CLI flags."""
    cfg = dict(defaults)
    if args.config:
        cfg.update(load_config(args.config))
    for key, value in vars(args).items():
        if key in ("config", "func", "command") or value is None:
            continue
        cfg[key] = value
    return cfg


def _out_path(cfg, name):
    out = cfg.get("out", ".")
    os.makedirs(out, exist_ok=True)
    return os.path.join(out, name)


def _json_ready(cfg):
    return {k: (v.tolist() if isinstance(v, np.ndarray) else v)
            for k, v in cfg.items()}


def cmd_sample(args):
    cfg = _effective_config(args, {"lambda": 1.0, "samples": 10, "seed": 0,
                                   "out": "."})
    spec = _spec_from(cfg)
    samples = int(cfg["samples"])
    seed = int(cfg["seed"])
    rows = []
    for i in range(samples):
        h = draw_matrix(spec, seed, stream=i)
        s = eigenvalues(h, meta={"spec": spec, "seed": seed, "stream": i})
        rows.append((i, 0.0, s.eigenvalues))
    path = _out_path(cfg, "spectra.csv")
    write_spectra_csv(path, rows)
    write_metadata(path, _json_ready(cfg), seed)
    print(f"wrote {samples} spectra of {spec.symmetry}(n={spec.n}) to {path}")
    return EXIT_OK


def cmd_correlate(args):
    cfg = _effective_config(args, {
        "lambda": 1.0, "eta_over_d": 0.5, "window_fraction": 0.2,
        "epsilon_grid": "0.1:3:10", "gamma_grid": "0.5,1,2",
        "samples": 100, "seed": 0, "mode": "exact", "out": ".", "threads": 1,
    })
    spec = _spec_from(cfg)
    grid = estimate_k(
        spec,
        parse_grid(cfg["epsilon_grid"]),
        parse_grid(cfg["gamma_grid"]),
        samples=int(cfg["samples"]),
        seed=int(cfg["seed"]),
        eta_over_d=float(cfg["eta_over_d"]),
        mode=str(cfg["mode"]),
        window_fraction=float(cfg["window_fraction"]),
        threads=int(cfg.get("threads", 1)),
    )
    path = _out_path(cfg, "correlator.csv")
    write_correlator_csv(path, grid)
    meta_cfg = _json_ready(cfg)
    meta_cfg.update(grid.meta)
    write_metadata(path, meta_cfg, int(cfg["seed"]))
    if getattr(args, "plot", False):
        _plot_correlator(grid, _out_path(cfg, "correlator.svg"))
    print(f"wrote correlator grid "
          f"({grid.epsilon_over_d.size} x {grid.gamma_over_d.size}) to {path}")
    return EXIT_OK


def cmd_analytic(args):
    cfg = _effective_config(args, {
        "eta_over_d": 0.5, "epsilon_grid": "0.1:3:10", "gamma_grid": "0.5,1,2",
        "rtol": 1e-6, "damping": DAMPING_RADIAL, "out": ".",
    })
    rs = parse_grid(cfg["epsilon_grid"])
    gs = parse_grid(cfg["gamma_grid"])
    eta_over_d = float(cfg["eta_over_d"])
    values, errors, converged = kernel_grid(rs, gs, eta_over_d=eta_over_d,
                                            rtol=float(cfg["rtol"]),
                                            damping=str(cfg["damping"]))
    path = _out_path(cfg, "analytic.csv")
    write_analytic_csv(path, rs, gs, values, errors)
    meta_cfg = _json_ready(cfg)
    meta_cfg["regulator"] = regulator_for_eta(eta_over_d)
    meta_cfg["branch"] = "retarded-advanced"
    meta_cfg["unconverged_points"] = int(np.sum(~converged))
    write_metadata(path, meta_cfg, None)
    if getattr(args, "plot", False):
        _plot_analytic(rs, gs, values, _out_path(cfg, "analytic.svg"))
    n_bad = int(np.sum(~converged))
    print(f"wrote analytic grid ({rs.size} x {gs.size}) to {path}"
          + (f"; {n_bad} unconverged points" if n_bad else ""))
    return EXIT_NUMERIC if n_bad else EXIT_OK


def cmd_compare(args):
    mc = read_correlator_csv(args.mc)
    mc_meta = read_metadata(args.mc).get("config", {})
    an_meta = read_metadata(args.analytic).get("config", {})
    check_smoothing_compatible(mc_meta, an_meta)
    rs, gs, an_values, an_errors = read_analytic_csv(args.analytic)
    if rs.size != mc.epsilon_over_d.size or gs.size != mc.gamma_over_d.size \
            or not np.allclose(rs, mc.epsilon_over_d) \
            or not np.allclose(gs, mc.gamma_over_d):
        raise ValueError("analytic and MC files are on different grids")
    if not mc.meta.get("eta_over_d"):
        mc = _with_meta(mc, mc_meta)
    gammas = None
    if args.calibrate_gamma is not None:
        gammas = [float(args.calibrate_gamma)]
    report = compare_grids(mc, an_values, analytic_errors=an_errors,
                           calibration_gammas=gammas,
                           damping=str(an_meta.get("damping", DAMPING_RADIAL)))
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "comparison.json")
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
    print(render_report(report))
    print(f"wrote {path}")
    if getattr(args, "plot", False):
        _plot_compare(report, os.path.join(out, "comparison.svg"))
    return EXIT_OK


def cmd_symbreak(args):
    seed = int(args.seed or 0)
    spec = EnsembleSpec(symmetry="goe", n=int(args.n or 100), lam=1.0)
    delta_x = 0.05
    rng = rng_for(seed, 1)
    sigma0 = saddle_sigma(0.0, spec.lam, dim=8)
    residuals = []
    for _ in range(int(args.surrogates or 100)):
        sigma = grading_preserving_similarity(sigma0, rng)
        residuals.append(symmetry_breaking_residual(spec, delta_x, sigma))
    catalog = {}
    s_values = {}
    for case in CASES:
        t = t_matrix(case)
        catalog[case] = [float(x.real) for x in np.diag(t.entries)]
        sigma_d = saddle_sigma(0.0, spec.lam, dim=t.dim)
        s_values[case] = abs(symmetry_breaking_correlator(sigma_d, t))
    # commutator-square identity on a random supermatrix
    m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    sigma_r = SuperMatrix(m, GRADING_ORTHO_8)
    l8 = l_matrix(8)
    lhs = symmetry_breaking_correlator(sigma_r, l8)
    sl = sigma_r @ l8
    rhs = 2.0 * supertrace(sl @ sl) - 2.0 * supertrace(sigma_r @ sigma_r)
    payload = {
        "t_matrices": catalog,
        "identity_residual_max": float(max(residuals)),
        "identity_residual_count": len(residuals),
        "diagonal_saddle_correlator": {k: float(v) for k, v in s_values.items()},
        "commutator_square_identity_residual": abs(lhs - rhs),
        "seed": seed,
        "version": __version__,
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "symbreak.json")
        with open(path, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {path}")
    print(text)
    return EXIT_OK


def _with_meta(grid, meta):
    from .correlator import CorrelatorGrid

    merged = dict(grid.meta)
    merged.update(meta)
    return CorrelatorGrid(epsilon_over_d=grid.epsilon_over_d,
                          gamma_over_d=grid.gamma_over_d, values=grid.values,
                          std_err=grid.std_err, samples=grid.samples,
                          meta=merged)


def _plot_correlator(grid, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for j, g in enumerate(grid.gamma_over_d):
        ax.errorbar(grid.epsilon_over_d, grid.values[:, j].real,
                    yerr=grid.std_err[:, j], label=f"gamma={g:g}")
    ax.set_xlabel("eps / d")
    ax.set_ylabel("Re k_c")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_analytic(rs, gs, values, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for j, g in enumerate(gs):
        ax.plot(rs, values[:, j].real, label=f"gamma={g:g}")
    ax.set_xlabel("eps / d")
    ax.set_ylabel("Re k (analytic, uncalibrated)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_compare(report, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for j, g in enumerate(report.gamma_over_d):
        line = ax.errorbar(report.epsilon_over_d, report.mc_values[:, j].real,
                           yerr=report.std_err[:, j], fmt="o", ms=3,
                           label=f"MC gamma={g:g}")
        ax.plot(report.epsilon_over_d, report.analytic_values[:, j].real,
                "-", color=line.lines[0].get_color())
    ax.set_xlabel("eps / d")
    ax.set_ylabel("Re k_c")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="parlevel",
        description="parametric level correlations: sampling, Monte Carlo "
                    "correlators, analytic kernel, symmetry-breaking checks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key-value config file ([run] section)")
    common.add_argument("--seed", type=int, help="64-bit master seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads")
    common.add_argument("--reproducible", action="store_true",
                        help="record reproducible mode in metadata")

    p = sub.add_parser("sample", parents=[common],
                       help="draw ensembles and write spectra")
    p.add_argument("--class", dest="klass", help="goe or gue")
    p.add_argument("--n", type=int, help="matrix dimension")
    p.add_argument("--lambda", dest="lam", type=float, help="semicircle scale")
    p.add_argument("--samples", type=int, help="number of realizations")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("correlate", parents=[common],
                       help="Monte Carlo correlator grid")
    p.add_argument("--class", dest="klass", help="goe or gue")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--mode", choices=["exact", "linearized"])
    p.add_argument("--eta-over-d", dest="eta_over_d", type=float)
    p.add_argument("--window-fraction", dest="window_fraction", type=float)
    p.add_argument("--epsilon-grid", dest="epsilon_grid")
    p.add_argument("--gamma-grid", dest="gamma_grid")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("analytic", parents=[common],
                       help="analytic correlator grid")
    p.add_argument("--eta-over-d", dest="eta_over_d", type=float)
    p.add_argument("--epsilon-grid", dest="epsilon_grid")
    p.add_argument("--gamma-grid", dest="gamma_grid")
    p.add_argument("--rtol", type=float)
    p.add_argument("--damping", choices=["radial", "collective"])
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("compare", parents=[common],
                       help="calibrate and score MC vs analytic CSVs")
    p.add_argument("mc", help="correlator CSV from `correlate`")
    p.add_argument("analytic", help="analytic CSV from `analytic`")
    p.add_argument("--calibrate-gamma", dest="calibrate_gamma", type=float)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("symbreak", parents=[common],
                       help="symmetry-breaking matrix catalog and identity checks")
    p.add_argument("--n", type=int)
    p.add_argument("--surrogates", type=int)
    p.set_defaults(func=cmd_symbreak)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    # normalize alias flags into config keys
    if getattr(args, "klass", None) is not None:
        setattr(args, "class", args.klass)
    if getattr(args, "lam", None) is not None:
        setattr(args, "lambda", args.lam)
    for alias in ("klass", "lam"):
        if hasattr(args, alias):
            delattr(args, alias)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
