#!/usr/bin/env python3
"""Regenerate the 128x128 natural test images under tests/data/.

Sources are the CC0 / public-domain sample images bundled with scikit-image
(astronaut, chelsea, coffee). Each is center-cropped to a square and
area-resampled to 128x128 8-bit RGB.
"""
import argparse
import pathlib

import numpy as np
from PIL import Image
from skimage import data

SOURCES = {"astronaut": data.astronaut, "chelsea": data.chelsea, "coffee": data.coffee}


def square_crop(img: np.ndarray) -> np.ndarray:
    h, w = img.shape[:2]
    s = min(h, w)
    top, left = (h - s) // 2, (w - s) // 2
    return img[top:top + s, left:left + s]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"))
    parser.add_argument("--size", type=int, default=128)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, loader in SOURCES.items():
        img = Image.fromarray(square_crop(loader()))
        img = img.resize((args.size, args.size), Image.BOX)
        img.convert("RGB").save(out / f"{name}_{args.size}.png")
        print(out / f"{name}_{args.size}.png")


if __name__ == "__main__":
    main()
