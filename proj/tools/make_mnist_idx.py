#!/usr/bin/env python3
"""Build IDX-format MNIST files from the digit JSON shipped in the npm `mnist` package.

The package stores 10000 MNIST digits split into per-class files (src/digits/<d>.json), each
pixel rounded to three decimals in [0, 1]. Pixels are mapped back to bytes with
round(v * 255) and written as standard IDX image/label files, split into a
train and a test part with a fixed shuffle.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/make_mnist_idx.py package/src/digits data/mnist
"""
import argparse
import json
import pathlib
import random
import struct


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir")
    ap.add_argument("out_dir")
    ap.add_argument("--test", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=20200101)
    args = ap.parse_args()

    samples = []
    for digit in range(10):
        data = json.loads((pathlib.Path(args.digits_dir) / f"{digit}.json").read_text())["data"]
        assert len(data) % 784 == 0
        for k in range(len(data) // 784):
            px = [min(255, max(0, round(v * 255))) for v in data[k * 784:(k + 1) * 784]]
            samples.append((px, digit))

    random.Random(args.seed).shuffle(samples)
    test, train = samples[:args.test], samples[args.test:]
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_images(out / "train-images-idx3-ubyte", [s[0] for s in train])
    write_labels(out / "train-labels-idx1-ubyte", [s[1] for s in train])
    write_images(out / "t10k-images-idx3-ubyte", [s[0] for s in test])
    write_labels(out / "t10k-labels-idx1-ubyte", [s[1] for s in test])
    print(f"train={len(train)} test={len(test)} -> {out}")


if __name__ == "__main__":
    main()
