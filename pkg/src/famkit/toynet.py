"""Minimal deterministic convolutional forward engine.

Small enough to re-derive by hand, deterministic across platforms, and
driven by a JSON model description, so end-to-end faithfulness runs never
need an external framework. Convolution is cross-correlation (no kernel
flip), matching the export convention of mainstream frameworks so dumped
weights load directly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    BadLayerSpec,
    DimMismatch,
    KernelLargerThanPaddedInput,
    NonFinite,
    WindowTooLarge,
)
from .npyio import read_tensor, write_tensor
from .types import FeatureMap, validate_feature_map


@dataclass(frozen=True)
class ConvLayer:
    """Square-kernel convolution with zero padding.

    ``weights`` is (out_channels, in_channels, k, k); stored on disk as
    rank-3 (out, in, k*k) because the exchange format stops at rank 3.
    """

    out_channels: int
    kernel: int
    stride: int
    padding: int
    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        b = np.ascontiguousarray(self.bias, dtype=np.float64)
        if w.ndim != 4 or w.shape[0] != self.out_channels or w.shape[2:] != (self.kernel, self.kernel):
            raise BadLayerSpec(f"conv weights shape {w.shape} inconsistent with layer")
        if b.shape != (self.out_channels,):
            raise BadLayerSpec(f"conv bias shape {b.shape}, expected ({self.out_channels},)")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise NonFinite("conv parameters contain NaN or Inf")
        if self.stride < 1 or self.padding < 0 or self.kernel < 1:
            raise BadLayerSpec("conv needs kernel>=1, stride>=1, padding>=0")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class LeakyReLULayer:
    slope: float


@dataclass(frozen=True)
class MaxPoolLayer:
    kernel: int
    stride: int

    def __post_init__(self):
        if self.kernel < 1 or self.stride < 1:
            raise BadLayerSpec("maxpool needs kernel>=1 and stride>=1")


@dataclass(frozen=True)
class ModelSpec:
    input_channels: int
    layers: tuple
    seed: int | None = None


def conv2d(x: np.ndarray, layer: ConvLayer) -> np.ndarray:
    """Cross-correlate a (C,H,W) tensor with the layer's kernels."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise DimMismatch(f"conv input must be rank-3, got rank-{x.ndim}")
    if x.shape[0] != layer.in_channels:
        raise DimMismatch(
            f"input has {x.shape[0]} channels, layer expects {layer.in_channels}"
        )
    hp = x.shape[1] + 2 * layer.padding
    wp = x.shape[2] + 2 * layer.padding
    if layer.kernel > hp or layer.kernel > wp:
        raise KernelLargerThanPaddedInput(
            f"kernel {layer.kernel} vs padded input {hp}x{wp}"
        )
    return kernels.conv2d(x, layer.weights, layer.bias, layer.stride, layer.padding)


def leaky_relu(x: np.ndarray, slope: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= 0.0, x, slope * x)


def maxpool2d(x: np.ndarray, k: int, stride: int) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise DimMismatch(f"maxpool input must be rank-3, got rank-{x.ndim}")
    if k > x.shape[1] or k > x.shape[2]:
        raise WindowTooLarge(f"window {k} vs input {x.shape[1]}x{x.shape[2]}")
    return kernels.maxpool2d(x, k, stride)


def forward(spec: ModelSpec, image) -> FeatureMap:
    """Apply the layers in order; the result is the output feature map."""
    x = np.ascontiguousarray(image, dtype=np.float64)
    if x.ndim != 3:
        raise DimMismatch(f"image must be rank-3 (C,H,W), got rank-{x.ndim}")
    if x.shape[0] != spec.input_channels:
        raise DimMismatch(
            f"image has {x.shape[0]} channels, model expects {spec.input_channels}"
        )
    for layer in spec.layers:
        if isinstance(layer, ConvLayer):
            x = conv2d(x, layer)
        elif isinstance(layer, LeakyReLULayer):
            x = leaky_relu(x, layer.slope)
        elif isinstance(layer, MaxPoolLayer):
            x = maxpool2d(x, layer.kernel, layer.stride)
        else:
            raise BadLayerSpec(f"unknown layer {layer!r}")
    return validate_feature_map(x)


# ---- model description files ------------------------------------------


def load_model(path) -> ModelSpec:
    """Load a model JSON; weight paths resolve relative to the JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise BadLayerSpec(f"{path}: invalid JSON: {exc}") from exc
    base = os.path.dirname(os.path.abspath(path))

    try:
        in_channels = int(doc["input_channels"])
        raw_layers = doc["layers"]
    except (KeyError, TypeError, ValueError) as exc:
        raise BadLayerSpec(f"{path}: missing input_channels/layers") from exc

    layers = []
    for i, entry in enumerate(raw_layers):
        kind = entry.get("type")
        if kind == "conv":
            try:
                k = int(entry["kernel"])
                w = read_tensor(os.path.join(base, entry["weights"]))
                b = read_tensor(os.path.join(base, entry["bias"]))
            except KeyError as exc:
                raise BadLayerSpec(f"{path}: layer {i} missing {exc}") from exc
            if w.ndim != 3 or w.shape[2] != k * k:
                raise BadLayerSpec(
                    f"{path}: layer {i} weights {w.shape} do not match kernel {k}"
                )
            layers.append(
                ConvLayer(
                    out_channels=int(entry["out_channels"]),
                    kernel=k,
                    stride=int(entry.get("stride", 1)),
                    padding=int(entry.get("padding", 0)),
                    weights=np.asarray(w, dtype=np.float64).reshape(
                        w.shape[0], w.shape[1], k, k
                    ),
                    bias=b,
                )
            )
        elif kind == "leaky_relu":
            layers.append(LeakyReLULayer(slope=float(entry.get("slope", 0.1))))
        elif kind == "maxpool":
            layers.append(
                MaxPoolLayer(kernel=int(entry["kernel"]), stride=int(entry.get("stride", 1)))
            )
        else:
            raise BadLayerSpec(f"{path}: layer {i} has unknown type {kind!r}")
    seed = doc.get("seed")
    return ModelSpec(input_channels=in_channels, layers=tuple(layers), seed=seed)


def save_model(spec: ModelSpec, out_dir, name: str = "model.json") -> str:
    """Write the model JSON plus one weight/bias file per conv layer."""
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    conv_idx = 0
    for layer in spec.layers:
        if isinstance(layer, ConvLayer):
            wname = f"conv{conv_idx}_w.npy"
            bname = f"conv{conv_idx}_b.npy"
            flat = layer.weights.reshape(
                layer.out_channels, layer.in_channels, layer.kernel * layer.kernel
            )
            write_tensor(flat, os.path.join(out_dir, wname))
            write_tensor(layer.bias, os.path.join(out_dir, bname))
            entries.append(
                {
                    "type": "conv",
                    "out_channels": layer.out_channels,
                    "kernel": layer.kernel,
                    "stride": layer.stride,
                    "padding": layer.padding,
                    "weights": wname,
                    "bias": bname,
                }
            )
            conv_idx += 1
        elif isinstance(layer, LeakyReLULayer):
            entries.append({"type": "leaky_relu", "slope": layer.slope})
        elif isinstance(layer, MaxPoolLayer):
            entries.append({"type": "maxpool", "kernel": layer.kernel, "stride": layer.stride})
    doc = {"input_channels": spec.input_channels, "layers": entries}
    if spec.seed is not None:
        doc["seed"] = spec.seed
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return path


# ---- seeded synthesis ----------------------------------------------------


class Lcg:
    """32-bit linear congruential generator (Numerical Recipes constants).

    state' = (1664525 * state + 1013904223) mod 2^32, uniform = state / 2^32.
    Used for test fixtures so golden outputs are identical on every
    platform; not a statistical-quality generator.
    """

    def __init__(self, seed: int):
        self.state = seed & 0xFFFFFFFF

    def next_u32(self) -> int:
        self.state = (1664525 * self.state + 1013904223) & 0xFFFFFFFF
        return self.state

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * (self.next_u32() / 4294967296.0)

    def fill(self, shape, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        out = np.empty(int(np.prod(shape)))
        for i in range(out.size):
            out[i] = self.uniform(lo, hi)
        return out.reshape(shape)


def synth_image(seed: int, channels: int, height: int, width: int) -> np.ndarray:
    """Deterministic pseudo-random image with values in [0, 1)."""
    return Lcg(seed).fill((channels, height, width))


def make_toy_model(seed: int, in_channels: int = 3, widths: tuple = (8, 16),
                   slope: float = 0.1) -> ModelSpec:
    """Two seeded conv blocks (conv + leaky relu, maxpool between)."""
    rng = Lcg(seed)
    layers = []
    cin = in_channels
    for i, cout in enumerate(widths):
        w = rng.fill((cout, cin, 3, 3), -0.5, 0.5)
        b = rng.fill((cout,), -0.1, 0.1)
        layers.append(
            ConvLayer(out_channels=cout, kernel=3, stride=1, padding=1,
                      weights=w, bias=b)
        )
        layers.append(LeakyReLULayer(slope=slope))
        if i + 1 < len(widths):
            layers.append(MaxPoolLayer(kernel=2, stride=2))
        cin = cout
    return ModelSpec(input_channels=in_channels, layers=tuple(layers), seed=seed)
