#!/usr/bin/env python3
"""Convert the digit JSON files shipped with the npm `mnist` package into IDX files.

The package stores each digit class as {"data": [...]} with 784 grayscale values
per image, scaled to [0, 1] and rounded to three decimals. Values are mapped back
to bytes with round(v * 255).

Images are interleaved round-robin across classes so any prefix is roughly
class-balanced. The first --train images go to the train files, the next
--heldout images to the held-out files.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/mnist_json_to_idx.py package/src/digits data/mnist-subset
"""

import argparse
import json
import pathlib
import struct


def load_digits(digits_dir):
    per_class = []
    for label in range(10):
        flat = json.loads((digits_dir / f"{label}.json").read_text())["data"]
        if len(flat) % 784:
            raise SystemExit(f"{label}.json: length {len(flat)} not a multiple of 784")
        images = [flat[i:i + 784] for i in range(0, len(flat), 784)]
        per_class.append(images)
    return per_class


def interleave(per_class):
    out = []
    depth = max(len(c) for c in per_class)
    for i in range(depth):
        for label, images in enumerate(per_class):
            if i < len(images):
                out.append((label, images[i]))
    return out


def write_idx(prefix, items):
    images = bytearray(struct.pack(">IIII", 0x00000803, len(items), 28, 28))
    labels = bytearray(struct.pack(">II", 0x00000801, len(items)))
    for label, pixels in items:
        images.extend(min(255, max(0, round(v * 255))) for v in pixels)
        labels.append(label)
    pathlib.Path(f"{prefix}-images-idx3-ubyte").write_bytes(images)
    pathlib.Path(f"{prefix}-labels-idx1-ubyte").write_bytes(labels)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir", type=pathlib.Path)
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--train", type=int, default=1000)
    ap.add_argument("--heldout", type=int, default=100)
    args = ap.parse_args()

    items = interleave(load_digits(args.digits_dir))
    if args.train + args.heldout > len(items):
        raise SystemExit("not enough images")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_idx(args.out_dir / "train", items[:args.train])
    write_idx(args.out_dir / "heldout", items[args.train:args.train + args.heldout])


if __name__ == "__main__":
    main()
