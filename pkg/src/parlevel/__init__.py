"""parlevel: parametric level correlations in Gaussian random-matrix ensembles.

A numerical laboratory with two independent routes to the band-center
parametric correlator of the trigonometric matrix family
``H(x) = H1 cos x + H2 sin x``:

* a seeded Monte Carlo estimator over sampled spectra
  (:mod:`parlevel.correlator`), and
* an analytic saddle-point triple integral (:mod:`parlevel.kernel`),

plus the graded-matrix algebra that underlies the symmetry-breaking
description (:mod:`parlevel.superalgebra`) and a CLI front end
(``parlevel sample|correlate|analytic|compare|symbreak``).
"""

__version__ = "0.1.0"

from .ensembles import (  # noqa: E402
    GOE,
    GUE,
    EnsembleSpec,
    mean_level_spacing,
    sample,
    semicircle_density,
)
from .parametric import (  # noqa: E402
    LinearizedPair,
    ParametricPair,
    build_h,
    delta_x_for_gamma,
    gamma_over_d,
    linearize,
    spreading_width,
)
from .spectral import (  # noqa: E402
    EmptyWindowError,
    NonHermitianError,
    SpectralSample,
    central_window,
    eigenvalues,
    green_trace,
)
from .superalgebra import (  # noqa: E402
    Grading,
    SuperMatrix,
    commutator,
    l_matrix,
    radial_sigma,
    saddle_sigma,
    supertrace,
    symmetry_breaking_correlator,
    t3_matrix,
    t_matrix,
)
from .kernel import (  # noqa: E402
    KernelParams,
    KernelResult,
    QuadratureError,
    calibrate_constant,
    efetov_exponent,
    integrand,
    k_analytic,
    k_for_comparison,
)
from .correlator import (  # noqa: E402
    CorrelatorGrid,
    compare_exact_vs_linearized,
    decorrelation_profile,
    estimate_k,
    estimate_two_point,
)
from .report import ComparisonReport, compare_grids  # noqa: E402

__all__ = [
    "__version__",
    "GOE",
    "GUE",
    "EnsembleSpec",
    "mean_level_spacing",
    "sample",
    "semicircle_density",
    "ParametricPair",
    "LinearizedPair",
    "build_h",
    "linearize",
    "spreading_width",
    "gamma_over_d",
    "delta_x_for_gamma",
    "SpectralSample",
    "eigenvalues",
    "green_trace",
    "central_window",
    "NonHermitianError",
    "EmptyWindowError",
    "Grading",
    "SuperMatrix",
    "supertrace",
    "commutator",
    "l_matrix",
    "t3_matrix",
    "t_matrix",
    "saddle_sigma",
    "radial_sigma",
    "symmetry_breaking_correlator",
    "KernelParams",
    "KernelResult",
    "QuadratureError",
    "integrand",
    "k_analytic",
    "k_for_comparison",
    "calibrate_constant",
    "efetov_exponent",
    "CorrelatorGrid",
    "estimate_k",
    "estimate_two_point",
    "compare_exact_vs_linearized",
    "decorrelation_profile",
    "ComparisonReport",
    "compare_grids",
]
