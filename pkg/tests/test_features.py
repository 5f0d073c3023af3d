import math

import numpy as np
import pytest

from entropic.design import enumerate_sparse_grid
from entropic.errors import DimError, InvalidIndex, InvalidLevel
from entropic.features import (
    FeatureIndex,
    hierarchical_surplus,
    phi_1d,
    phi_1d_batch,
    phi_nd,
    phi_nd_batch,
    stencil,
    support_box,
    surplus_coefficients,
)
from entropic.kernels import CustomFamily, KernelSpec, kernel_eval, norm_const


class TestFeatureIndex:
    def test_even_position_rejected(self):
        with pytest.raises(InvalidIndex):
            FeatureIndex((2,), (2,))

    def test_position_out_of_range(self):
        with pytest.raises(InvalidIndex):
            FeatureIndex((1,), (3,))

    def test_level_zero_rejected(self):
        with pytest.raises(InvalidLevel):
            FeatureIndex((0,), (1,))

    def test_length_mismatch(self):
        with pytest.raises(DimError):
            FeatureIndex((1, 2), (1,))

    def test_support_box(self):
        assert support_box(FeatureIndex((2, 1), (3, 1))) == [(0.5, 1.0), (0.0, 1.0)]


class TestSupport:
    @pytest.mark.parametrize("kind", ["bb", "laplace", "sobolev"])
    def test_zero_outside_support_box(self, kind):
        spec = KernelSpec(kind=kind, omega=3.0, dim=2)
        rng = np.random.default_rng(7)
        X = rng.uniform(size=(400, 2))
        for idx in enumerate_sparse_grid(2, 3):
            box = support_box(idx)
            inside = np.all([(X[:, d] > lo) & (X[:, d] < hi) for d, (lo, hi) in enumerate(box)], axis=0)
            values = phi_nd_batch(spec, idx, X)
            assert np.all(values[~inside] == 0.0)
            assert np.all(values[inside] > 0.0)

    @pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
    def test_parent_support_splits_into_children(self, l):
        for i in range(1, 2 ** l, 2):
            [(lo, hi)] = support_box(FeatureIndex((l,), (i,)))
            [(left_lo, left_hi)] = support_box(FeatureIndex((l + 1,), (2 * i - 1,)))
            [(right_lo, right_hi)] = support_box(FeatureIndex((l + 1,), (2 * i + 1,)))
            assert (left_lo, left_hi, right_lo, right_hi) == (lo, (lo + hi) / 2, (lo + hi) / 2, hi)

    def test_children_nest_per_dimension(self):
        parent = support_box(FeatureIndex((1, 2), (1, 3)))
        child = support_box(FeatureIndex((1, 3), (1, 5)))
        assert child[0] == parent[0]
        assert parent[1][0] <= child[1][0] < child[1][1] <= parent[1][1]

    @pytest.mark.parametrize("l", [(1, 1), (2, 3), (3, 1), (1, 4)])
    def test_supports_of_one_level_tile_the_cube(self, l):
        boxes = [support_box(idx) for idx in enumerate_sparse_grid(2, sum(l) - 1) if idx.l == l]
        assert len(boxes) == 2 ** (sum(l) - 2)
        volumes = [math.prod(hi - lo for lo, hi in box) for box in boxes]
        assert sum(volumes) == pytest.approx(1.0)
        for a in range(len(boxes)):
            for b in range(a + 1, len(boxes)):
                assert any(max(boxes[a][d][0], boxes[b][d][0]) >= min(boxes[a][d][1], boxes[b][d][1])
                           for d in range(2))


class TestOneDimensional:
    def test_brownian_bridge_hat(self):
        spec = KernelSpec(kind="bb", dim=1)
        assert phi_1d(spec, 1, 1, 0.5) == pytest.approx(1.0)
        assert phi_1d(spec, 1, 1, 0.25) == pytest.approx(0.5)
        assert phi_1d(spec, 1, 1, 0.0) == 0.0
        assert phi_1d(spec, 2, 3, 0.3) == 0.0

    def test_laplace_sinh_shape(self):
        omega = 3.0
        spec = KernelSpec(kind="laplace", omega=omega, dim=1)
        assert phi_1d(spec, 1, 1, 0.5) == pytest.approx(1.0)
        assert phi_1d(spec, 1, 1, 0.25) == pytest.approx(math.sinh(0.75) / math.sinh(1.5))
        assert phi_1d(spec, 2, 1, 0.4) == pytest.approx(math.sinh(omega * 0.1) / math.sinh(omega * 0.25))

    def test_clamps_input(self):
        spec = KernelSpec(kind="bb", dim=1)
        assert phi_1d(spec, 1, 1, -3.0) == 0.0

    def test_invalid_position(self):
        spec = KernelSpec(kind="bb", dim=1)
        with pytest.raises(InvalidIndex):
            phi_1d(spec, 2, 4, 0.5)

    @pytest.mark.parametrize("omega", [0.5, 4.0])
    def test_general_formula_matches_closed_form(self, omega):
        closed = KernelSpec(kind="laplace", omega=omega, dim=1)
        general = KernelSpec(kind="custom", dim=1, custom=CustomFamily(
            lambda x: np.exp(omega * x), lambda x: np.exp(-omega * x)))
        x = np.linspace(0.0, 1.0, 257)
        for l in range(1, 5):
            for i in range(1, 2 ** l, 2):
                np.testing.assert_allclose(phi_1d_batch(general, l, i, x), phi_1d_batch(closed, l, i, x),
                                           atol=1e-12)

    def test_batch_accepts_position_array(self):
        spec = KernelSpec(kind="bb", dim=1)
        out = phi_1d_batch(spec, 2, np.array([1, 3]), np.array([0.25, 0.75]))
        np.testing.assert_allclose(out, [1.0, 1.0])


def test_brownian_bridge_features_are_orthogonal():
    """Gram of derivatives is diag(2^(l+1)); scaled by C it is the identity."""
    spec = KernelSpec(kind="bb", dim=1)
    S = enumerate_sparse_grid(1, 5)
    assert len(S) == 31
    edges = np.linspace(0.0, 1.0, 2 ** 6 + 1)
    width = edges[1] - edges[0]
    slopes = np.array([
        np.diff(phi_1d_batch(spec, idx.l[0], idx.i[0], edges)) / width for idx in S
    ])
    G = slopes @ slopes.T * width
    expected = np.diag([2.0 ** (idx.l[0] + 1) for idx in S])
    np.testing.assert_allclose(G, expected, atol=1e-10)
    C = np.array([norm_const(spec, idx.l, idx.i) for idx in S])
    np.testing.assert_allclose(np.sqrt(C)[:, None] * G * np.sqrt(C)[None, :], np.eye(31), atol=1e-10)


@pytest.mark.parametrize("omega", [1.0, 3.0])
def test_laplace_features_are_orthogonal(omega):
    """RKHS Gram from stencil evaluations: diagonal, with C_{l,i} <phi, phi> = 1."""
    spec = KernelSpec(kind="laplace", omega=omega, dim=2)
    S = enumerate_sparse_grid(2, 4)
    G = np.array([[hierarchical_surplus(spec, lambda x, b=b: phi_nd(spec, b, x), a) for b in S] for a in S])
    off = G - np.diag(np.diag(G))
    assert np.max(np.abs(off)) < 1e-8
    C = np.array([norm_const(spec, idx.l, idx.i) for idx in S])
    np.testing.assert_allclose(C * np.diag(G), 1.0, rtol=1e-10)


class TestStencil:
    def test_brownian_bridge_weights(self):
        spec = KernelSpec(kind="bb", dim=1)
        nodes, weights = stencil(spec, 1, 1)
        np.testing.assert_allclose(nodes, [0.0, 0.5, 1.0])
        np.testing.assert_allclose(weights, [-2.0, 4.0, -2.0])

    def test_surplus_of_a_feature_is_its_squared_norm(self):
        spec = KernelSpec(kind="bb", dim=1)
        idx = FeatureIndex((1,), (1,))
        value = hierarchical_surplus(spec, lambda x: phi_nd(spec, idx, x), idx)
        assert value == pytest.approx(1.0 / norm_const(spec, idx.l))

    @pytest.mark.parametrize("kind,omega", [("bb", 1.0), ("laplace", 1.0), ("laplace", 4.0), ("sobolev", 2.0)])
    def test_reproducing_property(self, kind, omega):
        """<k(., x0), phi> = phi(x0) computed from stencil evaluations only."""
        spec = KernelSpec(kind=kind, omega=omega, dim=2)
        rng = np.random.default_rng(3)
        S = enumerate_sparse_grid(2, 4)
        for x0 in rng.uniform(size=(5, 2)):
            for idx in S:
                surplus = hierarchical_surplus(spec, lambda x: kernel_eval(spec, x, x0), idx)
                assert surplus == pytest.approx(phi_nd(spec, idx, x0), abs=1e-9)

    def test_surplus_coefficients_interpolate_at_nodes(self):
        """Brownian bridge: sum a phi reproduces a function vanishing on the boundary at grid nodes."""
        spec = KernelSpec(kind="bb", dim=1)
        S = enumerate_sparse_grid(1, 4)

        def f(x):
            return float(np.sin(np.pi * x[0]) * (1.0 + x[0]))

        coef = surplus_coefficients(spec, f, S)
        for node in np.arange(1, 16) / 16:
            approx = sum(a * phi_nd(spec, idx, [node]) for a, idx in zip(coef, S))
            assert approx == pytest.approx(f(np.array([node])), abs=1e-12)
