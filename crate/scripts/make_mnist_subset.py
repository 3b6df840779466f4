"""Write a 1000-image MNIST subset in IDX format.

The images come from the 5000-sample MNIST extract bundled with the
`mlxtend` wheel (BSD-3).  Every fifth row is kept, giving 100 images per
digit class, and rows are interleaved so that the classes are mixed.

    pip download --no-deps -d /tmp/mn mlxtend
    python3 scripts/make_mnist_subset.py /tmp/mn/mlxtend-*.whl crates/core/tests/data
"""
import gzip
import io
import struct
import sys
import zipfile

import numpy as np


def main(wheel, out_dir):
    z = zipfile.ZipFile(wheel)
    raw = gzip.decompress(z.read("mlxtend/data/data/mnist_5k.csv.gz"))
    table = np.loadtxt(io.BytesIO(raw), delimiter=",")
    table = table[::5]
    # interleave classes: 0,1,...,9,0,1,...
    order = np.argsort(np.arange(len(table)) % 100, kind="stable")
    table = table[order]
    images = table[:, :-1].astype(np.uint8)
    labels = table[:, -1].astype(np.uint8)
    n = len(images)
    with open(f"{out_dir}/mnist-1k-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 2051, n, 28, 28))
        f.write(images.tobytes())
    with open(f"{out_dir}/mnist-1k-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 2049, n))
        f.write(labels.tobytes())


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
