"""Kernel backend selection.

Prefers the compiled extension and falls back to the numpy implementation
when it is not built. Set FAMKIT_PURE_PYTHON=1 to force the fallback (the
benchmark uses this to compare backends).
"""

import os

if os.environ.get("FAMKIT_PURE_PYTHON"):
    from famkit.kernels import _pure as _backend
else:
    try:
        from famkit.kernels import _native as _backend  # type: ignore[no-redef]
    except ImportError:
        from famkit.kernels import _pure as _backend

BACKEND = _backend.BACKEND
conv2d = _backend.conv2d
maxpool2d = _backend.maxpool2d
bilinear_resize = _backend.bilinear_resize
label_components = _backend.label_components
