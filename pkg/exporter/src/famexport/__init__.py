"""famexport: bridge torchvision backbones to the famkit exchange format."""

from .bboxes import convert_bboxes, parse_annotations, scale_box
from .export import ExportRecord, export_activations
from .zoo import available_models, build_model

__version__ = "0.1.0"

__all__ = [
    "ExportRecord",
    "available_models",
    "build_model",
    "convert_bboxes",
    "export_activations",
    "parse_annotations",
    "scale_box",
]
