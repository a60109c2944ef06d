import numpy as np
import pytest

from famkit.errors import DimMismatch, NotNormalized
from famkit.fam import (
    compose_fam,
    fam_pipeline,
    normalize_map,
    normalize_weights,
    upsample_bilinear,
)
from famkit.pooling import PoolingSpec, pool
from famkit.similarity import MetricSpec
from famkit.transform import ProjectionWeights
from famkit.types import ContributionWeights, validate_feature_map

from oracles import bilinear_point


def fmap(arr):
    return validate_feature_map(np.asarray(arr, dtype=float))


class TestNormalizeWeights:
    def test_endpoints(self):
        out = normalize_weights(ContributionWeights(np.array([-1.0, 0.0, 1.0])))
        assert out.normalized
        assert out.values == pytest.approx([0.0, 0.5, 1.0])

    def test_constant_degenerates_to_zeros(self):
        out = normalize_weights(ContributionWeights(np.array([5.0, 5.0, 5.0])))
        assert np.all(out.values == 0.0)

    def test_two_elements(self):
        out = normalize_weights(ContributionWeights(np.array([0.36, 0.64])))
        assert out.values == pytest.approx([0.0, 1.0])

    def test_random_contract(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            v = rng.normal(size=int(rng.integers(2, 20)))
            out = normalize_weights(ContributionWeights(v)).values
            assert out.min() == 0.0
            assert out.max() == 1.0 or np.all(out == 0.0)


class TestComposeFam:
    def test_selector_weights(self):
        a1 = np.arange(4.0).reshape(2, 2)
        a2 = np.arange(4.0, 8.0).reshape(2, 2)
        w = ContributionWeights(np.array([0.0, 1.0]), normalized=True)
        assert np.array_equal(compose_fam(fmap([a1, a2]), w), a2)

    def test_zero_weights(self):
        w = ContributionWeights(np.zeros(2), normalized=True)
        out = compose_fam(fmap(np.ones((2, 3, 3))), w)
        assert np.all(out == 0.0)

    def test_elementwise_sum(self):
        fm = fmap([np.ones((2, 2)), 2.0 * np.ones((2, 2))])
        w = ContributionWeights(np.array([1.0, 1.0]), normalized=True)
        assert np.all(compose_fam(fm, w) == 3.0)

    def test_requires_normalized_flag(self):
        with pytest.raises(NotNormalized):
            compose_fam(fmap(np.ones((1, 2, 2))), ContributionWeights(np.ones(1)))

    def test_dim_mismatch(self):
        w = ContributionWeights(np.ones(3), normalized=True)
        with pytest.raises(DimMismatch):
            compose_fam(fmap(np.ones((2, 2, 2))), w)

    def test_linearity_in_weights(self):
        rng = np.random.default_rng(22)
        fm = fmap(rng.normal(size=(4, 3, 3)))
        u = rng.normal(size=4)
        v = rng.normal(size=4)
        lhs = compose_fam(fm, ContributionWeights(u + v, normalized=True))
        rhs = compose_fam(fm, ContributionWeights(u, normalized=True)) + compose_fam(
            fm, ContributionWeights(v, normalized=True)
        )
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestUpsample:
    def test_single_source_pixel(self):
        out = upsample_bilinear(np.array([[7.0]]), 3, 5)
        assert out.shape == (3, 5)
        assert np.all(out == 7.0)

    def test_identity_resample(self):
        rng = np.random.default_rng(23)
        m = rng.normal(size=(4, 6))
        assert np.array_equal(upsample_bilinear(m, 4, 6), m)

    def test_two_by_two_case(self):
        out = upsample_bilinear(np.array([[0.0, 1.0], [0.0, 1.0]]), 4, 4)
        expected_row = [0.0, 0.25, 0.75, 1.0]
        for row in out:
            assert row == pytest.approx(expected_row, abs=1e-12)

    def test_matches_scalar_reference(self):
        rng = np.random.default_rng(24)
        m = rng.normal(size=(3, 5))
        out = upsample_bilinear(m, 7, 11)
        src = m.tolist()
        for i in range(7):
            for j in range(11):
                assert out[i, j] == pytest.approx(
                    bilinear_point(src, i, j, 7, 11), abs=1e-12
                )

    def test_downsample_matches_scalar_reference(self):
        rng = np.random.default_rng(25)
        m = rng.normal(size=(9, 8))
        out = upsample_bilinear(m, 4, 3)
        src = m.tolist()
        for i in range(4):
            for j in range(3):
                assert out[i, j] == pytest.approx(
                    bilinear_point(src, i, j, 4, 3), abs=1e-12
                )

    def test_range_preserved(self):
        rng = np.random.default_rng(26)
        m = rng.normal(size=(5, 5))
        out = upsample_bilinear(m, 17, 13)
        assert out.min() >= m.min() - 1e-12
        assert out.max() <= m.max() + 1e-12


class TestNormalizeMap:
    def test_endpoints(self):
        out = normalize_map(np.array([[0.0, 2.0], [4.0, 2.0]]))
        assert out == pytest.approx(np.array([[0.0, 0.5], [1.0, 0.5]]))

    def test_constant_to_zeros(self):
        assert np.all(normalize_map(np.full((3, 3), 9.0)) == 0.0)

    def test_idempotent_on_normalized(self):
        m = np.array([[0.0, 0.25], [1.0, 0.5]])
        assert np.array_equal(normalize_map(m), m)


class TestPipeline:
    def make_maps(self, seed=0, n=6, h=5, w=5, k=3):
        rng = np.random.default_rng(seed)
        q = fmap(rng.normal(size=(n, h, w)))
        supports = [fmap(rng.normal(size=(n, h, w))) for _ in range(k)]
        return q, supports

    def test_query_equals_support_closed_form(self):
        q, _ = self.make_maps(seed=31)
        res = fam_pipeline(q, [q], PoolingSpec("gap"), MetricSpec("cosine"), 10, 10)
        assert res.score == pytest.approx(1.0, abs=1e-12)
        z = pool(q, PoolingSpec("gap"))
        expected = z * z / float(z @ z)
        assert res.contributions.values == pytest.approx(expected, abs=1e-12)

    def test_identity_projection_matches_no_projection(self):
        q, supports = self.make_maps(seed=32)
        plain = fam_pipeline(q, supports, PoolingSpec("gap"), MetricSpec("cosine"), 8, 8)
        eye = fam_pipeline(
            q,
            supports,
            PoolingSpec("gap"),
            MetricSpec("cosine"),
            8,
            8,
            projection=ProjectionWeights(np.eye(q.channels)),
        )
        assert eye.score == pytest.approx(plain.score, abs=1e-12)
        assert eye.saliency == pytest.approx(plain.saliency, abs=1e-12)
        assert eye.contributions.values == pytest.approx(
            plain.contributions.values, abs=1e-12
        )

    def test_single_channel_uses_full_weight(self):
        rng = np.random.default_rng(33)
        q = fmap(rng.normal(size=(1, 4, 4)))
        s = fmap(rng.normal(size=(1, 4, 4)))
        for metric in (MetricSpec("cosine"), MetricSpec("neg_sq_euclidean")):
            res = fam_pipeline(q, [s], PoolingSpec("gap"), metric, 8, 8)
            assert res.single_channel
            expected = normalize_map(upsample_bilinear(q.values[0], 8, 8))
            assert res.saliency == pytest.approx(expected, abs=1e-12)

    def test_channel_permutation_equivariance(self):
        q, supports = self.make_maps(seed=34, n=5)
        perm = np.array([3, 0, 4, 1, 2])
        qp = fmap(q.values[perm])
        supportsp = [fmap(s.values[perm]) for s in supports]
        base = fam_pipeline(q, supports, PoolingSpec("gap"), MetricSpec("cosine"), 7, 9)
        permuted = fam_pipeline(qp, supportsp, PoolingSpec("gap"), MetricSpec("cosine"), 7, 9)
        assert permuted.contributions.values == pytest.approx(
            base.contributions.values[perm], rel=1e-12
        )
        assert permuted.saliency == pytest.approx(base.saliency, abs=1e-12)

    def test_determinism_bitwise(self):
        q, supports = self.make_maps(seed=35)
        a = fam_pipeline(q, supports, PoolingSpec("gap"), MetricSpec("cosine"), 12, 12)
        b = fam_pipeline(q, supports, PoolingSpec("gap"), MetricSpec("cosine"), 12, 12)
        assert a.saliency.tobytes() == b.saliency.tobytes()
        assert a.raw_upsampled.tobytes() == b.raw_upsampled.tobytes()

    def test_channel_count_mismatch(self):
        q, _ = self.make_maps(seed=36, n=4)
        bad = fmap(np.ones((3, 5, 5)))
        with pytest.raises(DimMismatch):
            fam_pipeline(q, [bad], PoolingSpec("gap"), MetricSpec("cosine"), 5, 5)

    def test_projection_row_mismatch(self):
        q, supports = self.make_maps(seed=37, n=4)
        with pytest.raises(DimMismatch):
            fam_pipeline(
                q,
                supports,
                PoolingSpec("gap"),
                MetricSpec("cosine"),
                5,
                5,
                projection=ProjectionWeights(np.ones((3, 2))),
            )

    def test_euclidean_metric_runs(self):
        q, supports = self.make_maps(seed=38)
        res = fam_pipeline(q, supports, PoolingSpec("gap"), MetricSpec("neg_sq_euclidean"), 6, 6)
        assert res.score <= 0.0
        assert res.saliency.shape == (6, 6)
