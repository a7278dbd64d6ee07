import numpy as np
import pytest

from parlevel import (
    EnsembleSpec,
    mean_level_spacing,
    sample,
    semicircle_density,
)
from parlevel.ensembles import dump_matrix


def collect_offdiag(spec, seed, n_matrices, conj_pair=False):
    """Flattened upper-triangle products H_uv * H_vu over several draws."""
    vals = []
    iu = np.triu_indices(spec.n, k=1)
    for i in range(n_matrices):
        h = sample(spec, seed, stream=i)
        if conj_pair:
            # H_uv * H_vu for Hermitian H (equals |H_uv|^2)
            vals.append((h[iu] * h.T[iu]).real)
        else:
            vals.append(h[iu] ** 2)
    return np.concatenate(vals)


class TestSampling:
    def test_goe_symmetric_exactly(self):
        spec = EnsembleSpec("goe", 2, 1.0)
        h = sample(spec, 123)
        assert h.shape == (2, 2)
        assert h[0, 1] == h[1, 0]
        assert np.max(np.abs(h - h.T)) == 0.0

    def test_gue_hermitian_exactly(self):
        spec = EnsembleSpec("gue", 5, 1.0)
        h = sample(spec, 123)
        assert np.max(np.abs(h - h.conj().T)) == 0.0
        assert np.iscomplexobj(h)

    def test_goe_offdiagonal_variance(self):
        # ~1e5 element draws across 21 matrices; tolerance 3 sigma of the
        # sample-variance estimator, sigma = (lam^2/n) sqrt(2/M)
        spec = EnsembleSpec("goe", 100, 1.0)
        draws = collect_offdiag(spec, 2024, 21)
        target = spec.lam ** 2 / spec.n
        sigma = target * np.sqrt(2.0 / draws.size)
        assert abs(draws.mean() - target) < 3 * sigma

    def test_gue_offdiagonal_second_moment(self):
        spec = EnsembleSpec("gue", 100, 1.0)
        draws = collect_offdiag(spec, 2025, 21, conj_pair=True)
        target = spec.lam ** 2 / spec.n
        sigma = target * np.sqrt(1.0 / draws.size)
        assert abs(draws.mean() - target) < 3 * sigma

    def test_variance_halves_when_n_doubles(self):
        v100 = collect_offdiag(EnsembleSpec("goe", 100, 1.0), 7, 20).mean()
        v200 = collect_offdiag(EnsembleSpec("goe", 200, 1.0), 7, 10).mean()
        assert v100 / v200 == pytest.approx(2.0, rel=0.05)

    def test_offdiagonal_pairs_uncorrelated(self):
        spec = EnsembleSpec("goe", 60, 1.0)
        a, b = [], []
        for i in range(40):
            h = sample(spec, 99, stream=i)
            a.append(h[0, 1])
            b.append(h[0, 2])
            a.append(h[2, 5])
            b.append(h[3, 4])
        a, b = np.array(a), np.array(b)
        r = np.corrcoef(a, b)[0, 1]
        assert abs(r) < 4.0 / np.sqrt(a.size)

    def test_seed_determinism_bitwise(self):
        spec = EnsembleSpec("gue", 30, 2.0)
        h1 = sample(spec, 555, stream=3)
        h2 = sample(spec, 555, stream=3)
        assert np.array_equal(h1, h2)

    def test_streams_differ(self):
        spec = EnsembleSpec("goe", 10, 1.0)
        assert not np.array_equal(sample(spec, 1, stream=0), sample(spec, 1, stream=1))

    @pytest.mark.parametrize("kwargs", [
        dict(symmetry="gse", n=10, lam=1.0),
        dict(symmetry="goe", n=1, lam=1.0),
        dict(symmetry="goe", n=10, lam=0.0),
        dict(symmetry="goe", n=10, lam=-2.0),
    ])
    def test_invalid_spec_rejected(self, kwargs):
        with pytest.raises(ValueError):
            EnsembleSpec(**kwargs)


class TestSpacingAndDensity:
    def test_mean_level_spacing_values(self):
        assert mean_level_spacing(EnsembleSpec("goe", 100, 1.0)) == pytest.approx(
            np.pi / 100)
        assert mean_level_spacing(EnsembleSpec("goe", 200, 2.0)) == pytest.approx(
            np.pi / 100)

    def test_central_spacing_matches_formula(self):
        # Monte Carlo oracle: mean spacing of levels with |E| < 0.2 lam over
        # 200 realizations, within 5% of pi lam / n
        spec = EnsembleSpec("goe", 200, 1.0)
        spacings = []
        for i in range(200):
            eigs = np.linalg.eigvalsh(sample(spec, 31, stream=i))
            central = eigs[np.abs(eigs) < 0.2 * spec.lam]
            spacings.append((central[-1] - central[0]) / (central.size - 1))
        assert np.mean(spacings) == pytest.approx(mean_level_spacing(spec), rel=0.05)

    def test_semicircle_edge_and_center(self):
        spec = EnsembleSpec("goe", 100, 1.0)
        assert semicircle_density(2.0 * spec.lam, spec) == 0.0
        assert semicircle_density(3.0, spec) == 0.0
        assert semicircle_density(0.0, spec) == pytest.approx(100 / np.pi)
        assert semicircle_density(0.0, spec) == pytest.approx(
            1.0 / mean_level_spacing(spec))

    def test_eigenvalue_histogram_matches_semicircle(self):
        # histogram oracle: per-bin counts vs the integrated density, central
        # bins within 5%
        spec = EnsembleSpec("goe", 200, 1.0)
        n_real = 200
        eigs = np.concatenate([
            np.linalg.eigvalsh(sample(spec, 17, stream=i)) for i in range(n_real)
        ])
        edges = np.linspace(-0.8 * spec.lam, 0.8 * spec.lam, 9)
        counts, _ = np.histogram(eigs, bins=edges)
        for lo, hi, count in zip(edges[:-1], edges[1:], counts):
            grid = np.linspace(lo, hi, 200)
            expected = n_real * np.trapezoid(semicircle_density(grid, spec), grid)
            assert count == pytest.approx(expected, rel=0.05)


def test_dump_matrix_roundtrip_header(tmp_path):
    spec = EnsembleSpec("goe", 4, 1.5)
    h = sample(spec, 9)
    path = tmp_path / "matrix.csv"
    dump_matrix(path, h, spec, 9)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# n=4 class=goe lam=1.5")
    data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert np.array_equal(data, h)
