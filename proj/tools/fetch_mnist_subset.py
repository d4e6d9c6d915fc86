#!/usr/bin/env python3
# Copyright 2026 The WS-RAM Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes a 10k-digit MNIST subset as IDX files.

The digits come from the `mnist` npm package (src/digits/<d>.json, 784
floats in [0, 1] per image). Pass --package to an unpacked copy, or let the
script run `npm pack mnist` into a temporary directory.
"""

import argparse
import json
import pathlib
import random
import struct
import subprocess
import tarfile
import tempfile


def load_digits(package: pathlib.Path):
    images, labels = [], []
    for d in range(10):
        data = json.loads((package / "src" / "digits" / f"{d}.json").read_text())["data"]
        if len(data) % 784:
            raise SystemExit(f"digit file {d}.json is not a multiple of 784 values")
        for k in range(len(data) // 784):
            px = data[784 * k : 784 * (k + 1)]
            images.append(bytes(max(0, min(255, round(v * 255))) for v in px))
            labels.append(d)
    return images, labels


def write_idx(prefix: pathlib.Path, images, labels):
    with open(f"{prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(images), 28, 28))
        for img in images:
            f.write(img)
    with open(f"{prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(bytes(labels))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--package", type=pathlib.Path, help="unpacked npm package directory")
    ap.add_argument("--out", type=pathlib.Path, required=True)
    ap.add_argument("--test", type=int, default=2000, help="digits held out for testing")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        package = args.package
        if package is None:
            subprocess.run(["npm", "pack", "mnist", "--silent"], cwd=tmp, check=True)
            tgz = next(pathlib.Path(tmp).glob("mnist-*.tgz"))
            with tarfile.open(tgz) as t:
                t.extractall(tmp)
            package = pathlib.Path(tmp) / "package"
        images, labels = load_digits(package)

    order = list(range(len(images)))
    random.Random(args.seed).shuffle(order)
    test, train = order[: args.test], order[args.test :]
    args.out.mkdir(parents=True, exist_ok=True)
    write_idx(args.out / "train", [images[i] for i in train], [labels[i] for i in train])
    write_idx(args.out / "t10k", [images[i] for i in test], [labels[i] for i in test])
    print(f"train {len(train)}  test {len(test)}  -> {args.out}")


if __name__ == "__main__":
    main()
