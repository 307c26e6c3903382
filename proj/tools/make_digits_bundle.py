#!/usr/bin/env python3
"""Regenerate data/digits1797.bin from scikit-learn's bundled digits set.

The bundle is the offline fallback when no MNIST IDX files are available
(see data/README inside the repo). Layout, all little-endian:

  magic   "HDIG"
  u32     sample count
  u32     feature count (64)
  u32     image rows (8)
  u32     image cols (8)
  u8[n*64]  pixel intensities 0..16, row-major per sample
  u8[n]     labels 0..9
"""
import struct
import sys

from sklearn.datasets import load_digits


def main(out_path: str) -> None:
    digits = load_digits()
    images = digits.images.astype(int)
    labels = digits.target.astype(int)
    n = len(labels)
    with open(out_path, "wb") as f:
        f.write(b"HDIG")
        f.write(struct.pack("<IIII", n, 64, 8, 8))
        for img in images:
            f.write(bytes(int(v) for v in img.reshape(-1)))
        f.write(bytes(int(v) for v in labels))
    print(f"wrote {out_path}: {n} samples")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/digits1797.bin")
