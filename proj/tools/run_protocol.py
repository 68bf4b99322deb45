#!/usr/bin/env python3
"""Run the full benchmark protocol with the marginforge CLI.

Steps: tune on a small sample, full solve, local sampling, CGLQ, delta sweep
and indecision study. Without --train/--test a two-Gaussian dataset is
generated.
"""

import argparse
import json
import pathlib
import subprocess
import sys
import time

import numpy as np


def write_two_gaussians(path, n, seed, separation=3.0):
    rng = np.random.default_rng(seed)
    labels = np.where(rng.random(n) < 0.5, 1, -1)
    points = rng.normal(size=(n, 2)) + (separation / 2.0) * labels[:, None]
    with open(path, "w") as out:
        for y, (a, b) in zip(labels, points):
            out.write(f"{int(y):+d} 1:{float(a)!r} 2:{float(b)!r}\n")


def run(binary, args, log):
    cmd = [str(binary), *map(str, args)]
    print("$", " ".join(cmd), flush=True)
    start = time.monotonic()
    subprocess.run(cmd, check=True)
    log.append({"command": cmd, "seconds": round(time.monotonic() - start, 3)})


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--binary", default="build/marginforge")
    parser.add_argument("--train")
    parser.add_argument("--test")
    parser.add_argument("--out", default="bench-out")
    parser.add_argument("--kernel", default="rbf", choices=["linear", "poly", "rbf"])
    parser.add_argument("--n-train", type=int, default=20000)
    parser.add_argument("--n-test", type=int, default=4000)
    parser.add_argument("--reps", type=int, default=10)
    parser.add_argument("--indecision-reps", type=int, default=10)
    parser.add_argument("--sizes", default="5000,10000,20000")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--scale", action="store_true")
    opts = parser.parse_args()

    out = pathlib.Path(opts.out)
    out.mkdir(parents=True, exist_ok=True)
    train, test = opts.train, opts.test
    if train is None or test is None:
        train, test = out / "train.svm", out / "test.svm"
        write_two_gaussians(train, opts.n_train, opts.seed)
        write_two_gaussians(test, opts.n_test, opts.seed + 1)

    common = ["--train", train, "--test", test, "--seed", opts.seed]
    if opts.scale:
        common.append("--scale")
    log = []
    run(opts.binary, ["tune", "--train", train, "--kernel", opts.kernel, "--seed", opts.seed,
                      "--out", out / "tune"], log)
    best = json.loads((out / "tune" / "params.json").read_text())[opts.kernel]
    kernel = ["--kernel", opts.kernel, "--cost", best["cost"]]
    if "gamma" in best:
        kernel += ["--gamma", best["gamma"]]
    if "degree" in best:
        kernel += ["--degree", best["degree"]]

    run(opts.binary, ["train-full", *common, *kernel, "--out", out / "full"], log)
    run(opts.binary, ["train-local", *common, *kernel, "--reps", opts.reps,
                      "--out", out / "local"], log)
    run(opts.binary, ["train-cglq", *common, *kernel, "--reps", opts.reps,
                      "--out", out / "cglq"], log)
    run(opts.binary, ["sweep-delta", *common, *kernel, "--reps", opts.reps,
                      "--out", out / "sweep"], log)
    run(opts.binary, ["indecision", "--train", train, "--kernel", "linear", "--sizes", opts.sizes,
                      "--reps", opts.indecision_reps, "--seed", opts.seed,
                      "--out", out / "indecision"], log)
    (out / "protocol.json").write_text(json.dumps(log, indent=2, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
