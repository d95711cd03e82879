"""Writes the evaluation corpus (three 512x512 8-bit grayscale PGMs) from
scikit-image's bundled sample data."""

import pathlib
import sys

import numpy as np
from skimage import color, data


def luma(rgb):
    return np.clip(np.round(color.rgb2gray(rgb) * 255.0), 0, 255).astype(np.uint8)


def write_pgm(path, img):
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def main(out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    images = {
        "camera": data.camera(),
        "astronaut": luma(data.astronaut()),
        "moon": data.moon(),
    }
    for name, img in images.items():
        assert img.dtype == np.uint8 and img.shape == (512, 512), name
        write_pgm(out / f"{name}.pgm", img)
        print(out / f"{name}.pgm")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/corpus")
