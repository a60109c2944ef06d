"""Backbone registry and activation capture.

Each zoo entry names the module whose output is the last convolutional
feature map (post-activation) and the module whose output is the pooled
embedding the model actually compares with.
"""

from __future__ import annotations

import numpy as np
import torch
import torchvision.models

from .errors import HookFailure, UnknownModel

# model id -> (constructor, pretrained weight tag, feature module, pool module)
_REGISTRY = {
    "resnet18": (torchvision.models.resnet18, "IMAGENET1K_V1", "layer4", "avgpool"),
    "resnet34": (torchvision.models.resnet34, "IMAGENET1K_V1", "layer4", "avgpool"),
    "resnet50": (torchvision.models.resnet50, "IMAGENET1K_V2", "layer4", "avgpool"),
}


def available_models():
    return sorted(_REGISTRY)


def build_model(model_id: str, weights: str = "pretrained", seed: int = 0):
    """Instantiate a zoo backbone in eval mode.

    ``weights`` is "pretrained", "random" (seeded init, for offline runs),
    or a path to a state-dict file.
    """
    if model_id not in _REGISTRY:
        raise UnknownModel(f"{model_id!r}; available: {', '.join(available_models())}")
    ctor, tag, feature_mod, pool_mod = _REGISTRY[model_id]
    if weights == "pretrained":
        model = ctor(weights=tag)
    elif weights == "random":
        torch.manual_seed(seed)
        model = ctor(weights=None)
    else:
        model = ctor(weights=None)
        state = torch.load(weights, map_location="cpu")
        model.load_state_dict(state)
    model.eval()
    return model, feature_mod, pool_mod


def _module_by_name(model, name: str):
    mod = model
    try:
        for part in name.split("."):
            mod = getattr(mod, part)
    except AttributeError as exc:
        raise HookFailure(f"model has no module {name!r}") from exc
    return mod


class ActivationCapture:
    """Forward hooks grabbing the feature map and the pooled embedding."""

    def __init__(self, model, feature_mod: str, pool_mod: str):
        self.model = model
        self.features = None
        self.embedding = None
        self._handles = [
            _module_by_name(model, feature_mod).register_forward_hook(self._on_features),
            _module_by_name(model, pool_mod).register_forward_hook(self._on_pool),
        ]

    def _on_features(self, module, inputs, output):
        self.features = output.detach()

    def _on_pool(self, module, inputs, output):
        self.embedding = torch.flatten(output.detach(), start_dim=1)

    def run(self, batch: torch.Tensor):
        """Returns (features (C,h,w), embedding (N,)) as float32 numpy."""
        self.features = None
        self.embedding = None
        with torch.no_grad():
            self.model(batch)
        if self.features is None or self.embedding is None:
            raise HookFailure("hooks did not fire during forward")
        return (
            self.features[0].numpy().astype("float32", copy=False),
            self.embedding[0].numpy().astype("float32", copy=False),
        )

    def close(self):
        for h in self._handles:
            h.remove()
        self._handles = []


def fold_projection(model):
    """Collapse the model's linear head into one (N, J) matrix.

    Returns (weight, bias_or_None); a stack of bias-free linear layers is
    pre-multiplied, anything nonlinear raises HookFailure.
    """
    head = model.fc if hasattr(model, "fc") else None
    if head is None:
        raise HookFailure("model has no linear head to export")
    layers = list(head) if isinstance(head, torch.nn.Sequential) else [head]
    weight = None
    bias = None
    for layer in layers:
        if not isinstance(layer, torch.nn.Linear):
            raise HookFailure(f"non-linear head layer {type(layer).__name__}")
        w = layer.weight.detach().numpy().T  # (in, out)
        weight = w if weight is None else weight @ w
        if bias is not None:
            bias = bias @ w
        if layer.bias is not None:
            b = layer.bias.detach().numpy()
            bias = b if bias is None else bias + b
    # transposes are fortran-ordered; the exchange format is C-order only
    weight = np.ascontiguousarray(weight, dtype=np.float32)
    return weight, None if bias is None else bias.astype("float32")
