#!/usr/bin/env python3
"""Builds the USPS/MNIST cross-domain pair with shallow pixel features.

Follows the usual protocol for this pair: the first 1800 USPS training images
and the first 2000 MNIST training images, every image rescaled to 16x16 gray
pixels, giving 256-dimensional feature vectors. Downloads go through
torchvision; pass --root to reuse an existing torchvision data directory.

Outputs under <out>/usps_mnist/: usps_x.fbin (256 x 1800), usps_y.txt
(labels 1..10, digit d mapped to d+1), mnist_x.fbin (256 x 2000), mnist_y.txt.
The fbin digest of each matrix is printed for cross-machine comparison.

Usage: python3 scripts/convert_usps_mnist.py --out data
"""

import argparse
import os

import numpy as np
from PIL import Image

from fbin import fbin_digest, write_fbin, write_labels


def to_columns(images, count, side=16):
    columns = []
    labels = []
    for index in range(count):
        image, digit = images[index]
        if not isinstance(image, Image.Image):
            image = Image.fromarray(np.asarray(image))
        image = image.convert("L")
        if image.size != (side, side):
            image = image.resize((side, side), Image.BILINEAR)
        columns.append(np.asarray(image, dtype=np.float64).reshape(-1))
        labels.append(int(digit) + 1)
    return np.stack(columns, axis=1), labels


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output data directory")
    parser.add_argument("--root", default="torchvision_data",
                        help="torchvision download/cache directory")
    args = parser.parse_args()

    from torchvision import datasets  # deferred so --help works without torch

    usps = datasets.USPS(args.root, train=True, download=True)
    mnist = datasets.MNIST(args.root, train=True, download=True)

    out_dir = os.path.join(args.out, "usps_mnist")
    os.makedirs(out_dir, exist_ok=True)
    for name, data, count in (("usps", usps, 1800), ("mnist", mnist, 2000)):
        x, labels = to_columns(data, count)
        write_fbin(os.path.join(out_dir, f"{name}_x.fbin"), x)
        write_labels(os.path.join(out_dir, f"{name}_y.txt"), labels)
        print(f"{name}: {x.shape[0]}x{x.shape[1]}, digest {fbin_digest(x)}")
    print(f"wrote {out_dir}; run the acceptance suite with DOLLDA_DATA_DIR={args.out}")


if __name__ == "__main__":
    main()
