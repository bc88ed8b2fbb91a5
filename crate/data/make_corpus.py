"""Regenerate the bundled desk-scale image corpus.

Sources are the freely licensed sample photographs shipped with
scikit-image, scikit-learn and matplotlib (see data/SOURCES.md).
"""
import os

import matplotlib
import numpy as np
import sklearn
import skimage
from PIL import Image

SK = os.path.join(os.path.dirname(skimage.__file__), "data")
SL = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "images")
MP = os.path.join(os.path.dirname(matplotlib.__file__), "mpl-data", "sample_data")

SOURCES = {
    "astronaut": os.path.join(SK, "astronaut.png"),
    "chelsea": os.path.join(SK, "chelsea.png"),
    "coffee": os.path.join(SK, "coffee.png"),
    "rocket": os.path.join(SK, "rocket.jpg"),
    "hubble": os.path.join(SK, "hubble_deep_field.jpg"),
    "china": os.path.join(SL, "china.jpg"),
    "flower": os.path.join(SL, "flower.jpg"),
    "hopper": os.path.join(MP, "grace_hopper.jpg"),
}
COMPRESS = ["astronaut", "coffee", "rocket", "china", "flower"]

CROP_W, CROP_H, CROPS_PER_SOURCE = 128, 96, 8

here = os.path.dirname(os.path.abspath(__file__))
natural = os.path.join(here, "natural")
compress = os.path.join(here, "compress")
os.makedirs(natural, exist_ok=True)
os.makedirs(compress, exist_ok=True)


def fit(img, w, h):
    """Resize to cover w x h, then center crop."""
    s = max(w / img.width, h / img.height)
    img = img.resize((round(img.width * s), round(img.height * s)), Image.LANCZOS)
    x0 = (img.width - w) // 2
    y0 = (img.height - h) // 2
    return img.crop((x0, y0, x0 + w, y0 + h))


rng = np.random.default_rng(20231015)
for name, path in SOURCES.items():
    img = Image.open(path).convert("RGB")
    base = fit(img, 512, 384)
    if name in COMPRESS:
        base.save(os.path.join(compress, f"{name}.png"))
    for k in range(CROPS_PER_SOURCE):
        x = int(rng.integers(0, 512 - CROP_W + 1))
        y = int(rng.integers(0, 384 - CROP_H + 1))
        base.crop((x, y, x + CROP_W, y + CROP_H)).save(
            os.path.join(natural, f"{name}_{k}.png")
        )
