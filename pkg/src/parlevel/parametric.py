r"""Trigonometric parametric matrix family and its midpoint linearization.

The family is ``H(x) = H1*cos(x) + H2*sin(x)`` with independent draws
``H1, H2`` from one ensemble.  Because ``cos^2 + sin^2 = 1``, every member
is itself an exact draw from the same ensemble; moving the dimensionless
parameter ``x`` deforms the spectrum without changing its global statistics.

For two nearby parameter values (x, x') the family linearizes around the
midpoint ``x0 = (x + x')/2``:

    H(x)  ~ H0 + (dx/2) V ,   H(x') ~ H0 - (dx/2) V ,
    H0 = H(x0),  V = H2*cos(x0) - H1*sin(x0),  dx = x - x' .

V is distributed like a fresh ensemble draw and is uncorrelated with H0.
The strength of the decorrelation between the two spectra is measured by
the spreading width ``gamma_down = 2*dx**2*lam`` or, in units of the mean
level spacing, ``gamma_down/d = (2/pi)*n*dx**2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleSpec, mean_level_spacing, sample

__all__ = [
    "ParametricPair",
    "LinearizedPair",
    "build_h",
    "linearize",
    "spreading_width",
    "gamma_over_d",
    "delta_x_for_gamma",
]


@dataclass(frozen=True)
class ParametricPair:
    """Two family members H(x), H(x_prime) built from shared draws h1, h2."""

    h1: np.ndarray
    h2: np.ndarray
    x: float
    x_prime: float

    def __post_init__(self):
        if self.h1.shape != self.h2.shape or self.h1.ndim != 2:
            raise ValueError("h1 and h2 must be square matrices of equal shape")
        if self.h1.dtype != self.h2.dtype:
            raise ValueError("h1 and h2 must come from the same symmetry class")

    @property
    def x0(self):
        return 0.5 * (self.x + self.x_prime)

    @property
    def delta_x(self):
        return self.x - self.x_prime

    @classmethod
    def from_spec(cls, spec: EnsembleSpec, seed, x, x_prime, stream_base=0):
        """Draw h1, h2 on consecutive Philox streams of the given seed."""
        h1 = sample(spec, seed, stream=stream_base)
        h2 = sample(spec, seed, stream=stream_base + 1)
        return cls(h1=h1, h2=h2, x=float(x), x_prime=float(x_prime))


@dataclass(frozen=True)
class LinearizedPair:
    """Midpoint matrix H0, perturbation direction V and offset dx."""

    h0: np.ndarray
    v: np.ndarray
    delta_x: float

    def h_plus(self):
        """First-order reconstruction of H(x)."""
        return self.h0 + 0.5 * self.delta_x * self.v

    def h_minus(self):
        """First-order reconstruction of H(x_prime)."""
        return self.h0 - 0.5 * self.delta_x * self.v


def build_h(pair, at):
    """Evaluate the family member ``H1*cos(at) + H2*sin(at)``."""
    return pair.h1 * np.cos(at) + pair.h2 * np.sin(at)


def linearize(pair):
    """Expand the pair around its midpoint, keeping the first order in dx."""
    x0 = pair.x0
    h0 = build_h(pair, x0)
    v = pair.h2 * np.cos(x0) - pair.h1 * np.sin(x0)
    return LinearizedPair(h0=h0, v=v, delta_x=pair.delta_x)


def spreading_width(delta_x, spec):
    """Spreading width ``gamma_down = 2*dx**2*lam``.

    Equivalently ``2*pi*dx**2*<V^2>/d`` with the per-element second moment
    ``<V^2> = lam**2/n`` and ``d = pi*lam/n``; the two forms are identical
    under this normalization.
    """
    spec = _spec(spec)
    return 2.0 * float(delta_x) ** 2 * spec.lam


def gamma_over_d(delta_x, spec):
    """Dimensionless decorrelation strength ``(2/pi)*n*dx**2``."""
    spec = _spec(spec)
    return spreading_width(delta_x, spec) / mean_level_spacing(spec)


def delta_x_for_gamma(gamma, spec):
    """Parameter offset realizing a requested ``gamma_down/d`` (inverse map)."""
    spec = _spec(spec)
    if gamma < 0:
        raise ValueError("gamma_down/d must be nonnegative")
    return np.sqrt(np.pi * float(gamma) / (2.0 * spec.n))


def _spec(spec):
    if not isinstance(spec, EnsembleSpec):
        raise TypeError(f"expected EnsembleSpec, got {type(spec).__name__}")
    return spec
