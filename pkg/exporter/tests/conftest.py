import numpy as np
import pytest
from PIL import Image


@pytest.fixture(scope="session")
def image_dir(tmp_path_factory):
    """Three small synthetic photos with differing original sizes."""
    d = tmp_path_factory.mktemp("images")
    rng = np.random.default_rng(2024)
    for name, (w, h) in [("bird", (80, 60)), ("cat", (100, 100)), ("dog", (64, 96))]:
        arr = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
        Image.fromarray(arr).save(d / f"{name}.png")
    return d


@pytest.fixture(scope="session")
def annotation_file(tmp_path_factory):
    d = tmp_path_factory.mktemp("annotations")
    p = d / "boxes.txt"
    p.write_text(
        "bird 8 6 40 30\n"
        "cat 0 0 100 100\n"
        "dog 16 24 32 48\n"
    )
    return p
