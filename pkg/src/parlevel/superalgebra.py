r"""Graded (super)matrix algebra for the saddle-point description.

A :class:`SuperMatrix` is an ordinary complex matrix together with a
grading signature: +1 on commuting (bosonic) indices, -1 on anticommuting
(fermionic) ones.  The supertrace is the signed trace ``trg M = sum_a
signs[a] M[a, a]``.  All gradings used here are balanced (equal counts of
+1 and -1), so ``trg 1 = 0``.

Index arrangements follow the retarded/advanced doubling of the resolvent
field theory: the unitary-class two-point problem uses the 4-dim sequence
(c, a, c, a); the orthogonal class uses the 8-dim sequence
(c, c, a, a, c, c, a, a), first half retarded, second half advanced.  The
diagonal matrix L (+1 on retarded, -1 on advanced) breaks the symmetry
between the two branches; the parametric correlator term for every case
considered is ``trg([sigma, T_x]^2)`` with a case-specific diagonal T_x.

Entries are plain complex numbers.  Every identity exercised here holds at
that level for diagonal symmetry-breaking matrices, where no supertrace
cyclicity subtleties arise; no Grassmann algebra is needed or implemented.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleSpec, mean_level_spacing
from .parametric import spreading_width

__all__ = [
    "Grading",
    "SuperMatrix",
    "GRADING_ORTHO_8",
    "GRADING_UNITARY_4",
    "CASES",
    "supertrace",
    "commutator",
    "l_matrix",
    "t3_matrix",
    "t_matrix",
    "saddle_sigma",
    "radial_sigma",
    "symmetry_breaking_correlator",
    "symmetry_breaking_residual",
    "grading_preserving_similarity",
]


@dataclass(frozen=True)
class Grading:
    """Supertrace signature: +1 commuting, -1 anticommuting, balanced."""

    signs: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if any(s not in (1, -1) for s in signs):
            raise ValueError("grading signs must be +1 or -1")
        if signs.count(1) != signs.count(-1):
            raise ValueError("grading must be balanced (equal +1 and -1 counts)")
        object.__setattr__(self, "signs", signs)

    @property
    def dim(self):
        return len(self.signs)

    def as_array(self):
        return np.array(self.signs, dtype=float)


GRADING_ORTHO_8 = Grading((1, 1, -1, -1, 1, 1, -1, -1))
GRADING_UNITARY_4 = Grading((1, -1, 1, -1))

#: Symmetry-breaking catalog: which pair of ensembles each case correlates.
CASES = ("goe-goe", "gue-gue", "goe-gue", "goe-to-gue")


@dataclass(frozen=True)
class SuperMatrix:
    """Square complex matrix with a grading signature of matching length."""

    entries: np.ndarray
    grading: Grading

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"entries must be square, got shape {m.shape}")
        if m.shape[0] != self.grading.dim:
            raise ValueError("grading length does not match matrix dimension")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self):
        return self.grading.dim

    def __matmul__(self, other):
        _check_compatible(self, other)
        return SuperMatrix(self.entries @ other.entries, self.grading)

    def __add__(self, other):
        _check_compatible(self, other)
        return SuperMatrix(self.entries + other.entries, self.grading)

    def __sub__(self, other):
        _check_compatible(self, other)
        return SuperMatrix(self.entries - other.entries, self.grading)

    def __rmul__(self, scalar):
        return SuperMatrix(scalar * self.entries, self.grading)


def supertrace(m):
    """Signed trace ``sum_a signs[a] * M[a, a]``."""
    return complex(np.sum(m.grading.as_array() * np.diag(m.entries)))


def commutator(a, b):
    """``[A, B] = AB - BA`` on matching gradings."""
    _check_compatible(a, b)
    return SuperMatrix(a.entries @ b.entries - b.entries @ a.entries, a.grading)


def _grading_for_dim(dim):
    if dim == 8:
        return GRADING_ORTHO_8
    if dim == 4:
        return GRADING_UNITARY_4
    raise ValueError(f"supported dimensions are 4 and 8, got {dim}")


def l_matrix(dim=8):
    """Branch-breaking matrix L: +1 on the retarded half, -1 on the advanced."""
    grading = _grading_for_dim(dim)
    half = dim // 2
    diag = np.concatenate([np.ones(half), -np.ones(half)])
    return SuperMatrix(np.diag(diag).astype(complex), grading)


def t3_matrix():
    """Alternating diagonal diag(+1,-1,...) on the orthogonal 8-dim space."""
    diag = np.array([1, -1, 1, -1, 1, -1, 1, -1], dtype=complex)
    return SuperMatrix(np.diag(diag), GRADING_ORTHO_8)


def t_matrix(case):
    """Symmetry-breaking matrix T_x for each correlation case.

    ============  =====================================================
    case          T_x
    ============  =====================================================
    goe-goe       L (8-dim)
    gue-gue       L (4-dim)
    goe-gue       (1 - L) T3 = diag(0,0,0,0, 2,-2,2,-2)
    goe-to-gue    T3
    ============  =====================================================

    In the mixed case only the advanced branch carries the breaking, and
    the alternating signs suppress the time-reversed (Cooperon) mode.
    """
    if case == "goe-goe":
        return l_matrix(8)
    if case == "gue-gue":
        return l_matrix(4)
    if case == "goe-gue":
        one = np.eye(8, dtype=complex)
        l8 = l_matrix(8).entries
        return SuperMatrix((one - l8) @ t3_matrix().entries, GRADING_ORTHO_8)
    if case == "goe-to-gue":
        return t3_matrix()
    raise ValueError(f"unknown case {case!r}; expected one of {CASES}")


def saddle_sigma(energy, lam, dim=8):
    """Diagonal saddle point ``sigma = (E/2 lam) 1 - i Delta0 L``.

    ``Delta0 = sqrt(1 - (E/2 lam)^2)`` requires ``|E| < 2 lam``; at band
    center the saddle is ``-iL`` exactly.
    """
    if not (abs(energy) < 2.0 * lam):
        raise ValueError(f"|E| = {abs(energy):g} is outside the band (< {2*lam:g})")
    x = energy / (2.0 * lam)
    delta0 = np.sqrt(1.0 - x * x)
    l = l_matrix(dim)
    entries = x * np.eye(dim, dtype=complex) - 1j * delta0 * l.entries
    return SuperMatrix(entries, l.grading)


def radial_sigma(lam1, lam2, lam):
    """Band-center saddle manifold point at radial coordinates (lam1, lam2, lam).

    The bosonic retarded/advanced planes (0,4) and (1,5) are opened by
    hyperbolic angles with ``sinh^2 theta_i = lam_i`` (lam_i >= 0); the two
    fermionic planes (2,6) and (3,7) rotate together by a compact angle with
    ``sin^2 phi = lam`` (0 <= lam <= 1).  Returns ``sigma = U^-1 (-iL) U``.

    On this torus ``sigma^2 = -1`` and

        trg(sigma L)     = -4i (lam1 + lam2 + 2 lam)
        trg((sigma L)^2) = -16 [lam1(1+lam1) + lam2(1+lam2) + 2 lam(1-lam)]

    which fixes both exponent terms of the analytic correlator integral.
    """
    if lam1 < 0 or lam2 < 0:
        raise ValueError("noncompact coordinates lam1, lam2 must be >= 0")
    if not (0.0 <= lam <= 1.0):
        raise ValueError("compact coordinate lam must lie in [0, 1]")
    th1 = np.arcsinh(np.sqrt(lam1))
    th2 = np.arcsinh(np.sqrt(lam2))
    phi = np.arcsin(np.sqrt(lam))
    u = np.eye(8, dtype=complex)
    u_inv = np.eye(8, dtype=complex)
    for (i, j), th in (((0, 4), th1), ((1, 5), th2)):
        c, s = np.cosh(th), np.sinh(th)
        u[i, i] = u[j, j] = c
        u[i, j] = u[j, i] = s
        u_inv[i, i] = u_inv[j, j] = c
        u_inv[i, j] = u_inv[j, i] = -s
    for i, j in ((2, 6), (3, 7)):
        c, s = np.cos(phi), np.sin(phi)
        u[i, i] = u[j, j] = c
        u[i, j] = s
        u[j, i] = -s
        u_inv[i, i] = u_inv[j, j] = c
        u_inv[i, j] = -s
        u_inv[j, i] = s
    sigma = u_inv @ (-1j * l_matrix(8).entries) @ u
    return SuperMatrix(sigma, GRADING_ORTHO_8)


def symmetry_breaking_correlator(sigma, t):
    """Parametric correlator term ``trg([sigma, T]^2)``."""
    c = commutator(sigma, t)
    return supertrace(c @ c)


def symmetry_breaking_residual(spec: EnsembleSpec, delta_x, sigma):
    """Residual between the raw and commutator forms of the breaking term.

    Compares ``(n/16) dx^2 trg((sigma L)^2)`` against
    ``(pi gamma_down / 64 d) trg([sigma, L]^2)`` with ``gamma_down``
    from the spreading width and ``d`` the central spacing.  The two agree
    exactly whenever ``trg(sigma^2) = 0``, which holds on the saddle
    manifold and all its grading-preserving similarity images.
    """
    l = l_matrix(sigma.dim)
    sl = sigma @ l
    lhs = (spec.n / 16.0) * delta_x ** 2 * supertrace(sl @ sl)
    factor = np.pi * spreading_width(delta_x, spec) / (64.0 * mean_level_spacing(spec))
    rhs = factor * symmetry_breaking_correlator(sigma, l)
    return abs(lhs - rhs)


def grading_preserving_similarity(sigma, rng, scale=1.0):
    """Conjugate sigma by a random invertible A mixing only like-graded indices.

    Such A commutes with the grading signature, so supertraces (and in
    particular ``trg sigma^2``) are preserved; the result is a generic
    saddle-manifold surrogate.
    """
    signs = sigma.grading.as_array()
    dim = sigma.dim
    a = np.eye(dim, dtype=complex)
    for s in (1.0, -1.0):
        idx = np.nonzero(signs == s)[0]
        block = (
            rng.standard_normal((idx.size, idx.size))
            + 1j * rng.standard_normal((idx.size, idx.size))
        ) * scale
        a[np.ix_(idx, idx)] = np.eye(idx.size) + 0.3 * block
    a_inv = np.linalg.inv(a)
    return SuperMatrix(a @ sigma.entries @ a_inv, sigma.grading)


def _check_compatible(a, b):
    if a.grading != b.grading:
        raise ValueError("supermatrices have incompatible gradings")
