#!/usr/bin/env python3
"""Builds the COIL20 cross-domain pair from the processed COIL-20 images.

Downloads coil-20-proc.zip (1440 grayscale images, 20 objects x 72 poses at 5
degree steps), resizes each image to 32x32, and splits by viewing quadrant:

  coil1: poses in [0, 85] u [180, 265] degrees   (720 images)
  coil2: poses in [90, 175] u [270, 355] degrees (720 images)

Outputs under <out>/coil/: coil1_x.fbin (1024 x 720, raw gray levels),
coil1_y.txt (labels 1..20), and the same for coil2. Feature columns are
samples; the solver's z-scoring handles scaling. The fbin digest of each matrix
is printed so conversions can be compared across machines.

Usage: python3 scripts/convert_coil20.py --out data [--zip coil-20-proc.zip]
"""

import argparse
import io
import os
import re
import sys
import urllib.request
import zipfile

import numpy as np
from PIL import Image

from fbin import fbin_digest, write_fbin, write_labels

COIL_URL = ("https://www.cs.columbia.edu/CAVE/databases/SLAM_coil-20_coil-100/"
            "coil-20/coil-20-proc.zip")


def quadrant_split(pose_index):
    degrees = 5 * pose_index
    first = (0 <= degrees <= 85) or (180 <= degrees <= 265)
    return "coil1" if first else "coil2"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output data directory")
    parser.add_argument("--zip", help="already-downloaded coil-20-proc.zip")
    args = parser.parse_args()

    if args.zip:
        payload = open(args.zip, "rb").read()
    else:
        print(f"downloading {COIL_URL}")
        payload = urllib.request.urlopen(COIL_URL, timeout=120).read()

    pattern = re.compile(r"obj(\d+)__(\d+)\.png$")
    columns = {"coil1": [], "coil2": []}
    labels = {"coil1": [], "coil2": []}
    with zipfile.ZipFile(io.BytesIO(payload)) as archive:
        names = sorted(n for n in archive.namelist() if pattern.search(n))
        if len(names) != 1440:
            sys.exit(f"expected 1440 images in the archive, found {len(names)}")
        for name in names:
            match = pattern.search(name)
            obj = int(match.group(1))
            pose = int(match.group(2))
            image = Image.open(io.BytesIO(archive.read(name))).convert("L")
            image = image.resize((32, 32), Image.BILINEAR)
            side = quadrant_split(pose)
            columns[side].append(np.asarray(image, dtype=np.float64).reshape(-1))
            labels[side].append(obj)

    out_dir = os.path.join(args.out, "coil")
    os.makedirs(out_dir, exist_ok=True)
    for side in ("coil1", "coil2"):
        x = np.stack(columns[side], axis=1)  # 1024 features x 720 samples
        if x.shape != (1024, 720):
            sys.exit(f"{side}: unexpected shape {x.shape}")
        write_fbin(os.path.join(out_dir, f"{side}_x.fbin"), x)
        write_labels(os.path.join(out_dir, f"{side}_y.txt"), labels[side])
        print(f"{side}: {x.shape[0]}x{x.shape[1]}, digest {fbin_digest(x)}")
    print(f"wrote {out_dir}; run the acceptance suite with DOLLDA_DATA_DIR={args.out}")


if __name__ == "__main__":
    main()
