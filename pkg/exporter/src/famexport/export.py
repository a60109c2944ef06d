"""Activation export: images in, exchange-format corpus out.

For every image in a directory this dumps the last-conv feature map and
the pooled embedding as float32 NPY files, checks their consistency
(global average of the features must reproduce the embedding for
GAP-pooled backbones), and writes a corpus manifest the analysis tool's
eval command consumes directly.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass

import numpy as np
import torch

from .bboxes import convert_bboxes
from .preprocess import load_image
from .zoo import ActivationCapture, build_model, fold_projection

log = logging.getLogger("famexport")

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")
GAP_TOLERANCE = 1e-4


@dataclass
class ExportRecord:
    id: str
    features: str
    embedding: str
    original_size: list  # (w, h)
    resized_size: list
    bbox: list | None
    gap_max_abs_diff: float


def list_images(images_dir) -> list:
    names = [
        n for n in sorted(os.listdir(images_dir))
        if n.lower().endswith(IMAGE_SUFFIXES)
    ]
    return [(os.path.splitext(n)[0], os.path.join(images_dir, n)) for n in names]


def export_activations(
    model_id: str,
    images_dir,
    size: int,
    out_dir,
    weights: str = "pretrained",
    seed: int = 0,
    annotations=None,
    with_projection: bool = False,
) -> list:
    """Export one features/embedding NPY pair per image plus manifests.

    Returns the export records. Writes ``corpus.json`` (eval-compatible;
    entries default to self-support) and ``records.json`` (full export
    provenance) into ``out_dir``.
    """
    model, feature_mod, pool_mod = build_model(model_id, weights=weights, seed=seed)
    images = list_images(images_dir)
    if not images:
        raise FileNotFoundError(f"no images under {images_dir}")
    os.makedirs(out_dir, exist_ok=True)

    capture = ActivationCapture(model, feature_mod, pool_mod)

    records = []
    sizes = {}
    try:
        for image_id, path in images:
            tensor, original = load_image(path, size)
            feats, emb = capture.run(torch.from_numpy(tensor[None]))
            gap = feats.mean(axis=(1, 2))
            diff = float(np.max(np.abs(gap - emb)))
            if diff >= GAP_TOLERANCE:
                log.warning(
                    "%s: GAP(features) deviates from embedding by %.2e "
                    "(model may not pool by GAP)", image_id, diff,
                )
            f_name = f"{image_id}_features.npy"
            e_name = f"{image_id}_embedding.npy"
            np.save(os.path.join(out_dir, f_name), feats)
            np.save(os.path.join(out_dir, e_name), emb)
            records.append(
                ExportRecord(
                    id=image_id,
                    features=f_name,
                    embedding=e_name,
                    original_size=list(original),
                    resized_size=[size, size],
                    bbox=None,
                    gap_max_abs_diff=diff,
                )
            )
            sizes[image_id] = (original, (size, size))
            log.info("%s: features %s embedding %s", image_id, feats.shape, emb.shape)
    finally:
        capture.close()

    if annotations:
        scaled = convert_bboxes(annotations, sizes)
        for rec in records:
            rec.bbox = scaled.get(rec.id)

    corpus = {
        "metric": "cosine",
        "pooling": "gap",
        "images": [
            {
                "id": rec.id,
                "features": rec.features,
                # self-support by default; replace with same-class exports
                # for real evaluations
                "supports": [rec.features],
                "size": [size, size],
                **({"bbox": rec.bbox} if rec.bbox else {}),
            }
            for rec in records
        ],
    }

    if with_projection:
        weight, bias = fold_projection(model)
        np.save(os.path.join(out_dir, "projection.npy"), weight)
        corpus["projection"] = "projection.npy"
        if bias is not None:
            np.save(os.path.join(out_dir, "projection_bias.npy"), bias)
            corpus["projection_bias"] = "projection_bias.npy"
            corpus["projection_bias_present"] = True
            log.warning(
                "head carries a bias; eval needs --ignore-bias, and the "
                "contribution pull-back stays bias-free"
            )

    with open(os.path.join(out_dir, "corpus.json"), "w", encoding="utf-8") as fh:
        json.dump(corpus, fh, indent=2)
        fh.write("\n")
    with open(os.path.join(out_dir, "records.json"), "w", encoding="utf-8") as fh:
        json.dump(
            {"model": model_id, "weights": weights, "records": [asdict(r) for r in records]},
            fh,
            indent=2,
        )
        fh.write("\n")
    return records
