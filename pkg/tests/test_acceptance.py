"""Acceptance gate: one test per criterion, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -s` to see the lines. Tolerances
and runtime budgets are asserted, not just reported.
"""

import contextlib
import json
import math
import time

import numpy as np
import pytest

from famkit.cam import ClassifierWeights, cam
from famkit.cli import main
from famkit.fam import (
    compose_fam,
    fam_pipeline,
    normalize_map,
    normalize_weights,
    upsample_bilinear,
)
from famkit.metrics import (
    average_drop,
    binarize,
    energy_proportion,
    estimate_bbox,
    increase_confidence,
    iou,
    largest_component,
)
from famkit.npyio import write_tensor
from famkit.pooling import PoolingSpec, pool
from famkit.similarity import (
    MetricSpec,
    cosine,
    cosine_contributions,
    euclidean_contributions,
    mean_similarity,
)
from famkit.toynet import forward, make_toy_model, synth_image
from famkit.transform import ProjectionWeights, inverse_transform_contributions
from famkit.types import BoundingBox, ContributionWeights, validate_feature_map

from oracles import (
    bbox_of_pixels,
    energy_inside,
    iou_boxes,
    largest_component_pixels,
)


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def test_sign_sum_identity():
    with criterion("sign-sum identity"):
        rng = np.random.default_rng(20240)
        t0 = time.perf_counter()

        # general case: weight total equals the mean similarity sign
        for _ in range(1000):
            n = int(rng.integers(2, 65))
            k = int(rng.integers(1, 6))
            q = rng.normal(size=n)
            supports = [rng.normal(size=n) for _ in range(k)]
            signs = [math.copysign(1.0, cosine(q, s)) for s in supports]
            c = cosine_contributions(q, supports)
            assert abs(c.values.sum() - sum(signs) / k) <= 1e-9

        # all pairwise similarities positive: total is exactly one
        for _ in range(1000):
            n = int(rng.integers(2, 65))
            k = int(rng.integers(1, 6))
            q = rng.uniform(0.05, 1.0, size=n)
            supports = [rng.uniform(0.05, 1.0, size=n) for _ in range(k)]
            c = cosine_contributions(q, supports)
            assert abs(c.values.sum() - 1.0) <= 1e-9

        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0, f"took {elapsed:.2f}s, budget 1s"


def test_contribution_conservation():
    with criterion("contribution conservation"):
        rng = np.random.default_rng(20241)
        t0 = time.perf_counter()
        for _ in range(1000):
            n = int(rng.integers(1, 65))
            j = int(rng.integers(1, 33))
            z = rng.normal(size=n)
            w = ProjectionWeights(rng.normal(size=(n, j)))
            c_prime = ContributionWeights(rng.normal(size=j))
            c = inverse_transform_contributions(c_prime, w)
            lhs = float(z @ c.values)
            rhs = float((z @ w.matrix) @ c_prime.values)
            assert abs(lhs - rhs) <= 1e-9 * (1.0 + abs(lhs))
        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0, f"took {elapsed:.2f}s, budget 1s"


def test_euclidean_decomposition():
    with criterion("euclidean decomposition"):
        rng = np.random.default_rng(20242)
        metric = MetricSpec("neg_sq_euclidean")
        for _ in range(1000):
            n = int(rng.integers(1, 65))
            k = int(rng.integers(1, 6))
            q = rng.normal(size=n)
            supports = [rng.normal(size=n) for _ in range(k)]
            total = euclidean_contributions(q, supports).values.sum()
            assert abs(total - mean_similarity(q, supports, metric)) <= 1e-9


def test_metric_oracles():
    with criterion("metric oracles"):
        t0 = time.perf_counter()

        # every non-empty 4x4 mask, against flood-fill/pixel-count oracles
        bits = (
            ((np.arange(1, 65536)[:, None] >> np.arange(16)) & 1)
            .astype(bool)
            .reshape(-1, 4, 4)
        )
        gt = BoundingBox(1, 1, 3, 3)
        for mask in bits:
            comp = largest_component(mask)
            got_pixels = {(i, j) for i, j in zip(*np.nonzero(comp))}
            want_pixels = largest_component_pixels(mask.tolist())
            assert got_pixels == want_pixels
            box = estimate_bbox(comp)
            assert (box.x0, box.y0, box.x1, box.y1) == bbox_of_pixels(want_pixels)
            assert iou(box, gt) == iou_boxes(
                (box.x0, box.y0, box.x1, box.y1), (1, 1, 3, 3)
            )
            sal = mask.astype(float)
            want_energy = energy_inside(
                sal.tolist(), (box.x0, box.y0, box.x1, box.y1)
            )
            assert abs(energy_proportion(sal, box) - want_energy) <= 1e-12

        # 500 random 32x32 maps through the full estimation chain
        rng = np.random.default_rng(20243)
        gt32 = BoundingBox(5, 7, 21, 27)
        for _ in range(500):
            sal = rng.random((32, 32))
            mask = binarize(sal, 0.2)
            comp = largest_component(mask)
            got_pixels = {(i, j) for i, j in zip(*np.nonzero(comp))}
            assert got_pixels == largest_component_pixels(mask.tolist())
            box = estimate_bbox(comp)
            assert (box.x0, box.y0, box.x1, box.y1) == bbox_of_pixels(got_pixels)
            assert iou(box, gt32) == iou_boxes(
                (box.x0, box.y0, box.x1, box.y1), (5, 7, 21, 27)
            )
            want_energy = energy_inside(sal.tolist(), (5, 7, 21, 27))
            assert abs(energy_proportion(sal, gt32) - want_energy) <= 1e-12

        elapsed = time.perf_counter() - t0
        assert elapsed < 10.0, f"took {elapsed:.2f}s, budget 10s"


def test_faithfulness_formulas():
    with criterion("faithfulness formulas"):
        assert average_drop([1.0, 1.0], [0.5, 1.5]) == 25.0
        assert increase_confidence([1.0, 1.0], [0.5, 1.5]) == 50.0
        s = [0.3, 0.9, 0.45]
        assert average_drop(s, list(s)) == 0.0
        assert increase_confidence(s, list(s)) == 0.0


def test_normalization_contract():
    with criterion("normalization contract"):
        rng = np.random.default_rng(20244)
        for _ in range(1000):
            n = int(rng.integers(2, 64))
            v = rng.normal(scale=rng.uniform(0.1, 100.0), size=n)
            out = normalize_weights(ContributionWeights(v)).values
            assert out.min() >= 0.0 and out.max() <= 1.0
            assert out.min() == 0.0 and out.max() == 1.0

            m = rng.normal(size=(int(rng.integers(2, 12)), int(rng.integers(2, 12))))
            nm = normalize_map(m)
            assert nm.min() == 0.0 and nm.max() == 1.0

        # constants collapse to zeros
        assert np.all(normalize_weights(ContributionWeights(np.full(5, 3.3))).values == 0.0)
        assert np.all(normalize_map(np.full((4, 4), -2.0)) == 0.0)


def test_end_to_end_determinism(tmp_path):
    with criterion("end-to-end determinism"):
        model = make_toy_model(77, in_channels=3, widths=(4, 6))
        image = synth_image(770, 3, 16, 16)
        fmap = forward(model, image)
        write_tensor(fmap.values, tmp_path / "q.npy")
        write_tensor(image, tmp_path / "img.npy")
        manifest = {
            "query": {"features": "q.npy", "image": "img.npy"},
            "supports": ["q.npy"],
            "metric": "cosine",
            "pooling": "gap",
        }
        mpath = tmp_path / "m.json"
        mpath.write_text(json.dumps(manifest))

        assert main(["explain", "--manifest", str(mpath), "--out", str(tmp_path / "r1")]) == 0
        assert main(["explain", "--manifest", str(mpath), "--out", str(tmp_path / "r2")]) == 0
        b1 = (tmp_path / "r1" / "saliency.npy").read_bytes()
        b2 = (tmp_path / "r2" / "saliency.npy").read_bytes()
        assert b1 == b2

        meta = json.loads((tmp_path / "r1" / "metadata.json").read_text())
        assert abs(meta["score"] - 1.0) <= 1e-9

        res = fam_pipeline(
            fmap, [fmap], PoolingSpec("gap"), MetricSpec("cosine"), 16, 16
        )
        z = pool(fmap, PoolingSpec("gap"))
        expected = z * z / float(z @ z)
        assert np.max(np.abs(res.contributions.values - expected)) <= 1e-9


def test_cam_fam_composition_parity():
    with criterion("cam/fam composition parity"):
        rng = np.random.default_rng(20245)
        for _ in range(100):
            n = int(rng.integers(1, 24))
            fmap = validate_feature_map(rng.normal(size=(n, 6, 7)))
            row = rng.normal(size=n)
            via_cam = cam(fmap, ClassifierWeights(row[None, :]), 0)
            via_compose = compose_fam(fmap, ContributionWeights(row, normalized=True))
            assert np.max(np.abs(via_cam - via_compose)) <= 1e-12


def test_upsampling_oracle():
    with criterion("upsampling oracle"):
        out = upsample_bilinear(np.array([[0.0, 1.0], [0.0, 1.0]]), 4, 4)
        expected = [0.0, 0.25, 0.75, 1.0]
        for row in out:
            assert np.max(np.abs(row - expected)) <= 1e-12
