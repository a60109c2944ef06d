"""Export CLI.

    export --model resnet18 --images photos/ --size 224 --out dump/

Also callable as `fam-export` (bash shadows `export` with its builtin) or
`python -m famexport`.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .errors import ExportError
from .export import export_activations
from .zoo import available_models


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="export",
        description="Dump last-conv features and embeddings into the exchange format",
    )
    parser.add_argument("--model", required=True,
                        help=f"zoo id ({', '.join(available_models())})")
    parser.add_argument("--images", required=True, help="directory of input images")
    parser.add_argument("--size", type=int, default=224, help="resize edge (default 224)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--weights", default="pretrained",
                        help="'pretrained', 'random', or a state-dict path")
    parser.add_argument("--seed", type=int, default=0, help="seed for --weights random")
    parser.add_argument("--bboxes", help="annotation file: 'image_id x y width height'")
    parser.add_argument("--with-projection", action="store_true",
                        help="fold the linear head into projection.npy")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, os.environ.get("FAM_LOG", "warning").upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        records = export_activations(
            args.model,
            args.images,
            args.size,
            args.out,
            weights=args.weights,
            seed=args.seed,
            annotations=args.bboxes,
            with_projection=args.with_projection,
        )
    except ExportError as exc:
        print(f"error: {exc.name}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: FileNotFound: {exc}", file=sys.stderr)
        return 2
    print(f"exported {len(records)} images to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
