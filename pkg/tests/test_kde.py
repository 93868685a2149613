import numpy as np
import pytest

from logsift.errors import EmptyInput
from logsift.kde import kde_density, silverman_bandwidth


class TestKdeDensity:
    def test_mass_is_one(self):
        rng = np.random.default_rng(5)
        pairs = [(float(x), float(y)) for x, y in rng.normal(size=(500, 2))]
        grid = kde_density(pairs, grid=(48, 40))
        assert grid.mass() == pytest.approx(1.0, abs=0.01)

    def test_non_negative(self):
        pairs = [(0.0, 0.0), (5.0, 5.0), (2.0, 8.0)]
        grid = kde_density(pairs, grid=(16, 16), bandwidth=(1.0, 1.0))
        assert np.all(grid.values >= 0.0)

    def test_single_point_symmetry(self):
        grid = kde_density([(10.0, 20.0)], grid=(21, 21), bandwidth=(2.0, 2.0))
        x, y = grid.argmax()
        # peak lands on the cell nearest the point
        assert abs(x - 10.0) <= grid.x_centers[1] - grid.x_centers[0]
        assert abs(y - 20.0) <= grid.y_centers[1] - grid.y_centers[0]
        # symmetric about the point in both axes
        assert np.allclose(grid.values, grid.values[::-1, :], rtol=1e-9)
        assert np.allclose(grid.values, grid.values[:, ::-1], rtol=1e-9)

    def test_two_equal_peaks(self):
        pairs = [(0.0, 0.0), (100.0, 100.0)]
        grid = kde_density(pairs, grid=(40, 40), bandwidth=(1.5, 1.5))
        values = grid.values
        top_two = np.sort(values.ravel())[-2:]
        assert top_two[0] == pytest.approx(top_two[1], rel=1e-6)

    def test_gaussian_argmax_near_true_mean(self):
        rng = np.random.default_rng(42)
        mean = (300.0, 700.0)
        xs = rng.normal(mean[0], 25.0, size=10_000)
        ys = rng.normal(mean[1], 40.0, size=10_000)
        grid = kde_density(list(zip(xs, ys)), grid=(64, 64))
        gx, gy = grid.argmax()
        dx = grid.x_centers[1] - grid.x_centers[0]
        dy = grid.y_centers[1] - grid.y_centers[0]
        assert abs(gx - mean[0]) <= dx
        assert abs(gy - mean[1]) <= dy

    def test_weights_shift_density(self):
        pairs = [(0.0, 0.0, 1.0), (10.0, 10.0, 99.0)]
        grid = kde_density(pairs, grid=(32, 32), bandwidth=(1.0, 1.0))
        gx, gy = grid.argmax()
        assert gx > 5.0 and gy > 5.0

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            kde_density([])

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            kde_density([(0.0, 0.0)], grid=(1, 8))

    def test_bad_bandwidth(self):
        with pytest.raises(ValueError):
            kde_density([(0.0, 0.0)], bandwidth=(0.0, 1.0))

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            kde_density([(0.0, 0.0, -1.0)])


class TestSilverman:
    def test_matches_formula_unweighted(self):
        rng = np.random.default_rng(0)
        values = rng.normal(0.0, 3.0, size=400)
        weights = np.ones_like(values)
        h = silverman_bandwidth(values, weights)
        sigma = float(values.std())
        assert h == pytest.approx(sigma * 400 ** (-1 / 6), rel=1e-9)

    def test_degenerate_axis_fallback(self):
        assert silverman_bandwidth([5.0, 5.0, 5.0], [1.0, 1.0, 1.0]) == 1.0

    def test_weighted_uses_effective_n(self):
        values = np.array([0.0, 1.0, 2.0, 3.0])
        flat = silverman_bandwidth(values, np.ones(4))
        # concentrating weight on two points shrinks the effective sample
        spiky = silverman_bandwidth(values, np.array([10.0, 0.01, 0.01, 10.0]))
        assert spiky != flat
