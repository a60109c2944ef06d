"""Command-line surface: `fam explain`, `fam eval`, `fam cam`.

All diagnostics go to stderr; results are files (and the eval report on
stdout when no --out is given). Exit code 0 means every requested output
was written, 2 means a typed error; eval exits nonzero only when every
image fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import kernels
from .cam import ClassifierWeights, cam
from .errors import BiasUnsupported, FamError, ManifestError
from .fam import FamResult, compose_fam, fam_pipeline, normalize_map, upsample_bilinear
from .manifest import (
    Corpus,
    CorpusEntry,
    ExplainManifest,
    load_corpus,
    load_explain_manifest,
)
from .metrics import ImageRecord, evaluate_localization, mask_image, report_to_json
from .npyio import read_tensor, write_tensor
from .pooling import pool
from .render import colormap, load_image_chw, overlay, save_png, to_rgb_image
from .similarity import mean_similarity
from .toynet import forward, load_model
from .transform import ProjectionWeights, project_embedding
from .types import ContributionWeights, validate_feature_map

log = logging.getLogger("famkit")


def _setup_logging() -> None:
    level = os.environ.get("FAM_LOG", "warning").upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_projection(path, bias_path, ignore_bias):
    if path is None:
        return None, None
    proj = ProjectionWeights(read_tensor(path))
    bias = None
    if bias_path is not None:
        if not ignore_bias:
            raise BiasUnsupported(
                "manifest supplies a projection bias; rerun with --ignore-bias "
                "to apply it to embeddings only"
            )
        bias = np.asarray(read_tensor(bias_path), dtype=np.float64)
    return proj, bias


def _run_explain(man: ExplainManifest, ignore_bias: bool):
    qmap = validate_feature_map(read_tensor(man.query_features))
    image = load_image_chw(man.query_image) if man.query_image else None

    if man.out_size is not None:
        out_h, out_w = man.out_size
    elif image is not None:
        out_h, out_w = image.shape[1], image.shape[2]
    else:
        out_h, out_w = qmap.height, qmap.width

    if man.inject_weights:
        raw = np.asarray(read_tensor(man.inject_weights), dtype=np.float64)
        # deliberate flag bypass: injected weights go into the weighted sum
        # untouched so the output is comparable with the classifier baseline
        weights = ContributionWeights(raw, normalized=True)
        fam_map = compose_fam(qmap, weights)
        raw_up = upsample_bilinear(fam_map, out_h, out_w)
        result = FamResult(
            saliency=normalize_map(raw_up),
            raw_upsampled=raw_up,
            fam_map=fam_map,
            score=None,
            contributions=None,
            weights=weights,
        )
    else:
        supports = [validate_feature_map(read_tensor(p)) for p in man.supports]
        proj, bias = _load_projection(man.projection, man.projection_bias, ignore_bias)
        result = fam_pipeline(
            qmap,
            supports,
            man.pooling,
            man.metric,
            out_h,
            out_w,
            projection=proj,
            projection_bias=bias,
            contribution_mode=man.contribution_mode,
        )
    return result, image, (out_h, out_w)


def cmd_explain(args) -> int:
    man = load_explain_manifest(args.manifest)
    base = os.path.dirname(os.path.abspath(args.manifest))
    out_dir = args.out or (
        os.path.join(base, man.output) if man.output else os.path.join(base, "fam_out")
    )
    result, image, out_size = _run_explain(man, args.ignore_bias)

    os.makedirs(out_dir, exist_ok=True)
    write_tensor(result.raw_upsampled, os.path.join(out_dir, "saliency.npy"))

    heat = colormap(result.saliency)
    if image is not None:
        rgb = to_rgb_image(image)
        if rgb.shape[:2] == heat.shape[:2]:
            heat = overlay(heat, rgb)
        else:
            log.warning(
                "image size %s != output size %s, writing plain heatmap",
                rgb.shape[:2],
                heat.shape[:2],
            )
    save_png(heat, os.path.join(out_dir, "heatmap.png"))

    contrib = result.contributions
    meta = {
        "score": result.score,
        "metric": man.metric.kind,
        "pooling": man.pooling.kind,
        "lse_r": man.pooling.lse_r,
        "contribution_mode": man.contribution_mode,
        "out_size": list(out_size),
        "channels": len(result.weights),
        "weights_injected": man.inject_weights is not None,
        "degenerate_weights": result.degenerate_weights,
        "single_channel": result.single_channel,
        "contrib_min": float(contrib.values.min()) if contrib is not None else None,
        "contrib_max": float(contrib.values.max()) if contrib is not None else None,
        "contrib_sum": float(contrib.values.sum()) if contrib is not None else None,
        "kernel_backend": kernels.BACKEND,
    }
    if man.query_bbox is not None:
        meta["localization"] = evaluate_localization(
            result.raw_upsampled, man.query_bbox, man.threshold_fraction
        )
    with open(os.path.join(out_dir, "metadata.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    log.info("wrote saliency.npy, heatmap.png, metadata.json to %s", out_dir)
    return 0


def _eval_entry(entry: CorpusEntry, corpus: Corpus, model, proj, bias, threshold):
    fmap = validate_feature_map(read_tensor(entry.features))
    supports = [validate_feature_map(read_tensor(p)) for p in entry.supports]
    image = load_image_chw(entry.image) if entry.image else None

    if image is not None:
        out_h, out_w = image.shape[1], image.shape[2]
    elif entry.size is not None:
        out_h, out_w = entry.size
    else:
        raise ManifestError(f"{entry.id}: needs an image or a size entry")

    result = fam_pipeline(
        fmap,
        supports,
        corpus.pooling,
        corpus.metric,
        out_h,
        out_w,
        projection=proj,
        projection_bias=bias,
        contribution_mode=corpus.contribution_mode,
    )

    proportion = iou_val = None
    if entry.bbox is not None:
        loc = evaluate_localization(result.raw_upsampled, entry.bbox, threshold)
        proportion, iou_val = loc["proportion"], loc["iou"]

    s = s_masked = None
    if model is not None and image is not None:
        masked = mask_image(image, result.saliency)
        z2 = pool(forward(model, masked), corpus.pooling)
        if proj is not None:
            z2 = project_embedding(z2, proj, bias=bias)
        s_masked = mean_similarity(z2, result.support_embeddings, corpus.metric)
        s = result.score
    return ImageRecord(id=entry.id, proportion=proportion, iou=iou_val, s=s, s_masked=s_masked)


def cmd_eval(args) -> int:
    corpus = load_corpus(args.corpus)
    model = load_model(args.model) if args.model else None
    proj, bias = _load_projection(corpus.projection, corpus.projection_bias, args.ignore_bias)
    threshold = args.threshold if args.threshold is not None else corpus.threshold_fraction
    if not 0.0 < threshold <= 1.0:
        raise ManifestError(f"threshold must be in (0, 1], got {threshold}")
    jobs = args.jobs or os.cpu_count() or 1

    results: list = [None] * len(corpus.entries)

    def run(i_entry):
        i, entry = i_entry
        try:
            results[i] = _eval_entry(entry, corpus, model, proj, bias, threshold)
        except (FamError, FileNotFoundError, OSError) as exc:
            name = exc.name if isinstance(exc, FamError) else "FileNotFound"
            log.warning("image %s failed: %s: %s", entry.id, name, exc)
            results[i] = {"id": entry.id, "error": name}

    with ThreadPoolExecutor(max_workers=jobs) as pool_:
        list(pool_.map(run, enumerate(corpus.entries)))

    records = [r for r in results if isinstance(r, ImageRecord)]
    failures = [r for r in results if isinstance(r, dict)]
    report = report_to_json(records, failures)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        log.info("wrote report to %s", args.out)
    else:
        sys.stdout.write(text)
    if not records:
        print("error: all images failed", file=sys.stderr)
        return 2
    return 0


def cmd_cam(args) -> int:
    fmap = validate_feature_map(read_tensor(args.features))
    weights = ClassifierWeights(read_tensor(args.weights))
    m = cam(fmap, weights, args.class_index)
    os.makedirs(args.out, exist_ok=True)
    write_tensor(m, os.path.join(args.out, "cam.npy"))
    save_png(colormap(normalize_map(m)), os.path.join(args.out, "cam.png"))
    log.info("wrote cam.npy, cam.png to %s", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fam",
        description="Feature activation maps for similarity-comparison classifiers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explain", help="compute a saliency map from a manifest")
    p.add_argument("--manifest", required=True, help="experiment manifest JSON")
    p.add_argument("--out", help="output directory (overrides manifest)")
    p.add_argument("--ignore-bias", action="store_true",
                   help="apply projection bias to embeddings only")

    p = sub.add_parser("eval", help="evaluate localization/faithfulness over a corpus")
    p.add_argument("--corpus", required=True, help="corpus manifest JSON")
    p.add_argument("--model", help="model JSON for faithfulness re-scoring")
    p.add_argument("--jobs", type=int, help="worker threads (default: logical cores)")
    p.add_argument("--threshold", type=float,
                   help="binarization fraction of max (default from corpus, else 0.2)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--ignore-bias", action="store_true")

    p = sub.add_parser("cam", help="classic FC-weight activation map")
    p.add_argument("--features", required=True, help="feature map NPY")
    p.add_argument("--weights", required=True, help="classes x N weight NPY")
    p.add_argument("--class", dest="class_index", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging()
    handlers = {"explain": cmd_explain, "eval": cmd_eval, "cam": cmd_cam}
    try:
        return handlers[args.command](args)
    except FamError as exc:
        print(f"error: {exc.name}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: FileNotFound: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: IoFailure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
