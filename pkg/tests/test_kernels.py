"""Both kernel variants (numba loop and numpy fallback) must agree."""

import numpy as np
import pytest

from locrate import _kernels


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(42)


class TestCapacityBatch:
    def test_variants_agree(self, rng):
        steer = (rng.standard_normal((21, 6))
                 + 1j * rng.standard_normal((21, 6)))
        phases = rng.uniform(-np.pi, np.pi, (500, 6))
        a = _kernels._capacity_batch_numpy(steer, phases, 1.7)
        b = _kernels.capacity_batch(steer, phases, 1.7)
        assert np.allclose(a, b, rtol=1e-12)

    def test_zero_phase_matches_direct_sum(self, rng):
        steer = (rng.standard_normal((7, 3))
                 + 1j * rng.standard_normal((7, 3)))
        phases = np.zeros((1, 3))
        got = _kernels.capacity_batch(steer, phases, 2.0)[0]
        h = steer.sum(axis=1)
        want = np.sum(np.log2(1 + 2.0 * np.abs(h) ** 2))
        assert got == pytest.approx(want, rel=1e-12)

    def test_chunking_boundary(self, rng):
        # more realizations than one numpy chunk for this subcarrier count
        n_sub = 64
        steer = (rng.standard_normal((n_sub, 2))
                 + 1j * rng.standard_normal((n_sub, 2)))
        n_real = 4_000_000 // n_sub + 10
        phases = rng.uniform(-np.pi, np.pi, (n_real, 2))
        out = _kernels._capacity_batch_numpy(steer, phases, 1.0)
        assert out.shape == (n_real,)
        assert np.all(np.isfinite(out))


class TestMinInEllipse:
    def grid(self, rng, n=40):
        xs = np.arange(n) * 2.0
        ys = np.arange(n) * 2.0
        values = rng.standard_normal((n, n))
        return xs, ys, values

    def test_variants_agree(self, rng):
        xs, ys, values = self.grid(rng)
        pts = rng.uniform(0, 78, (200, 2))
        args = (xs, ys, values, pts, 0.4, 0.1, 0.3, 16.0)
        assert np.array_equal(_kernels._min_in_ellipse_numpy(*args),
                              _kernels.min_in_ellipse(*args))

    def test_disk_matches_bruteforce(self, rng):
        xs, ys, values = self.grid(rng)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        centers = np.column_stack([gx.ravel(), gy.ravel()])
        pts = rng.uniform(0, 78, (50, 2))
        radius = 7.0
        got = _kernels.min_in_ellipse(xs, ys, values, pts, 1.0, 0.0, 1.0,
                                      radius**2)
        for i, p in enumerate(pts):
            inside = np.linalg.norm(centers - p, axis=1) <= radius
            want = values.ravel()[inside].min()
            assert got[i] == want

    def test_empty_region_falls_back_to_nearest(self, rng):
        xs, ys, values = self.grid(rng)
        pts = np.array([[10.7, 30.2]])
        got = _kernels.min_in_ellipse(xs, ys, values, pts, 1.0, 0.0, 1.0,
                                      0.01)  # radius 0.1: no grid point
        i = int(round(10.7 / 2))
        j = int(round(30.2 / 2))
        assert got[0] == values[i, j]

    def test_anisotropic_ellipse_matches_bruteforce(self, rng):
        xs, ys, values = self.grid(rng)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        centers = np.column_stack([gx.ravel(), gy.ravel()])
        cov = np.array([[25.0, 6.0], [6.0, 9.0]])
        inv = np.linalg.inv(cov)
        q2 = 4.0
        pts = rng.uniform(10, 70, (50, 2))
        got = _kernels.min_in_ellipse(xs, ys, values, pts,
                                      inv[0, 0], inv[0, 1], inv[1, 1], q2)
        for i, p in enumerate(pts):
            d = centers - p
            quad = np.einsum("ni,ij,nj->n", d, inv, d)
            want = values.ravel()[quad <= q2].min()
            assert got[i] == want
