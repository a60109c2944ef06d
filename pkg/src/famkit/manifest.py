"""Experiment and corpus manifest parsing.

Manifests are JSON documents; every path inside one resolves relative to
the manifest file itself, so a manifest directory can be moved around as a
unit. Missing referenced files surface as FileNotFoundError (the CLI maps
that to the FileNotFound diagnostic).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import ManifestError
from .pooling import PoolingSpec
from .similarity import CONTRIBUTION_MODES, MetricSpec
from .types import BoundingBox


def _resolve(base: str, rel) -> str:
    if not isinstance(rel, str) or not rel:
        raise ManifestError(f"expected a file path, got {rel!r}")
    path = os.path.join(base, rel)
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    return path


def bbox_from_xywh(raw) -> BoundingBox:
    if (
        not isinstance(raw, (list, tuple))
        or len(raw) != 4
        or not all(isinstance(v, (int, float)) and float(v).is_integer() for v in raw)
    ):
        raise ManifestError(f"bbox must be [x, y, w, h] integers, got {raw!r}")
    x, y, w, h = (int(v) for v in raw)
    return BoundingBox.from_xywh(x, y, w, h)


def _size_from(raw) -> tuple[int, int] | None:
    if raw is None:
        return None
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ManifestError(f"size must be [height, width], got {raw!r}")
    h, w = int(raw[0]), int(raw[1])
    if h < 1 or w < 1:
        raise ManifestError(f"size must be positive, got {raw!r}")
    return h, w


def _settings(doc: dict, base: str) -> dict:
    mode = doc.get("contribution_mode", "eq15")
    if mode not in CONTRIBUTION_MODES:
        raise ManifestError(f"contribution_mode must be one of {CONTRIBUTION_MODES}")
    threshold = float(doc.get("threshold_fraction", 0.2))
    if not 0.0 < threshold <= 1.0:
        raise ManifestError(f"threshold_fraction must be in (0, 1], got {threshold}")
    return {
        "metric": MetricSpec.from_manifest(doc),
        "pooling": PoolingSpec.from_manifest(doc),
        "contribution_mode": mode,
        "threshold_fraction": threshold,
        "projection": _resolve(base, doc["projection"]) if doc.get("projection") else None,
        "projection_bias": (
            _resolve(base, doc["projection_bias"]) if doc.get("projection_bias") else None
        ),
    }


@dataclass(frozen=True)
class ExplainManifest:
    query_features: str
    supports: list
    metric: MetricSpec
    pooling: PoolingSpec
    contribution_mode: str
    threshold_fraction: float
    projection: str | None = None
    projection_bias: str | None = None
    query_image: str | None = None
    query_bbox: BoundingBox | None = None
    out_size: tuple | None = None
    output: str | None = None
    inject_weights: str | None = None


def load_explain_manifest(path) -> ExplainManifest:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: invalid JSON: {exc}") from exc
    base = os.path.dirname(os.path.abspath(path))

    query = doc.get("query")
    if not isinstance(query, dict) or "features" not in query:
        raise ManifestError(f"{path}: manifest needs query.features")
    supports_raw = doc.get("supports", [])
    inject = doc.get("inject_weights")
    if not supports_raw and not inject:
        raise ManifestError(f"{path}: manifest needs supports (or inject_weights)")

    shared = _settings(doc, base)
    return ExplainManifest(
        query_features=_resolve(base, query["features"]),
        supports=[_resolve(base, p) for p in supports_raw],
        query_image=_resolve(base, query["image"]) if query.get("image") else None,
        query_bbox=bbox_from_xywh(query["bbox"]) if query.get("bbox") else None,
        out_size=_size_from(doc.get("out_size")),
        output=doc.get("output"),
        inject_weights=_resolve(base, inject) if inject else None,
        **shared,
    )


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    features: str
    supports: list
    bbox: BoundingBox | None = None
    image: str | None = None
    size: tuple | None = None


@dataclass(frozen=True)
class Corpus:
    entries: list
    metric: MetricSpec
    pooling: PoolingSpec
    contribution_mode: str
    threshold_fraction: float
    projection: str | None = None
    projection_bias: str | None = None


def load_corpus(path) -> Corpus:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: invalid JSON: {exc}") from exc
    base = os.path.dirname(os.path.abspath(path))

    raw_entries = doc.get("images")
    if not isinstance(raw_entries, list) or not raw_entries:
        raise ManifestError(f"{path}: corpus needs a non-empty images list")

    entries = []
    for i, entry in enumerate(raw_entries):
        if not isinstance(entry, dict) or "features" not in entry or "supports" not in entry:
            raise ManifestError(f"{path}: images[{i}] needs features and supports")
        entries.append(
            CorpusEntry(
                id=str(entry.get("id", i)),
                features=_resolve(base, entry["features"]),
                supports=[_resolve(base, p) for p in entry["supports"]],
                bbox=bbox_from_xywh(entry["bbox"]) if entry.get("bbox") else None,
                image=_resolve(base, entry["image"]) if entry.get("image") else None,
                size=_size_from(entry.get("size")),
            )
        )
    shared = _settings(doc, base)
    return Corpus(entries=entries, **shared)
