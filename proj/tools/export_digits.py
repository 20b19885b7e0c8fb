"""Writes the scikit-learn 8x8 handwritten digits as a sparse data file.

Pixels are scaled to [0, 1]; the label is the digit (0-9). Usage:
    python tools/export_digits.py data/digits.txt
"""

import sys

from sklearn.datasets import load_digits


def main(path):
    x, y = load_digits(return_X_y=True)
    with open(path, "w") as out:
        out.write("#dim 64 #base 1\n")
        for row, label in zip(x, y):
            feats = " ".join(f"{j + 1}:{v / 16:.4g}" for j, v in enumerate(row) if v)
            out.write(f"{label} {feats}\n")


if __name__ == "__main__":
    main(sys.argv[1])
