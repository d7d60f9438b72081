#!/usr/bin/env python3
"""Export scikit-learn's bundled handwritten-digits set as IDX files.

Writes MNIST-layout files (train-images-idx3-ubyte etc.) so the trainer can
run end to end in environments without network access. The 1797 8x8 images
are real scanned digits; they are upscaled here to 28x28 so the loader path
matches the MNIST geometry. A 80/20 train/test split keeps class balance via
interleaving.
"""

import struct
import sys
from pathlib import Path

import numpy as np
from sklearn.datasets import load_digits


def write_images(path: Path, images: np.ndarray) -> None:
    count, rows, cols = images.shape
    with path.open("wb") as handle:
        handle.write(struct.pack(">IIII", 2051, count, rows, cols))
        handle.write(images.astype(np.uint8).tobytes())


def write_labels(path: Path, labels: np.ndarray) -> None:
    with path.open("wb") as handle:
        handle.write(struct.pack(">II", 2049, len(labels)))
        handle.write(labels.astype(np.uint8).tobytes())


def upscale(images8: np.ndarray) -> np.ndarray:
    """8x8 -> 28x28 by pixel replication then edge padding (28 = 8*3 + 4)."""
    scaled = np.repeat(np.repeat(images8, 3, axis=1), 3, axis=2)  # 24x24
    return np.pad(scaled, ((0, 0), (2, 2), (2, 2)), mode="constant")


def main() -> int:
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "data/digits")
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle = load_digits()
    images8 = bundle.images  # (1797, 8, 8), values 0..16
    labels = bundle.target
    images = upscale((images8 / 16.0 * 255.0).round())

    test_mask = np.arange(len(labels)) % 5 == 0  # every 5th sample
    write_images(out_dir / "train-images-idx3-ubyte", images[~test_mask])
    write_labels(out_dir / "train-labels-idx1-ubyte", labels[~test_mask])
    write_images(out_dir / "t10k-images-idx3-ubyte", images[test_mask])
    write_labels(out_dir / "t10k-labels-idx1-ubyte", labels[test_mask])
    print(f"wrote {int((~test_mask).sum())} train / {int(test_mask.sum())} test "
          f"images to {out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
