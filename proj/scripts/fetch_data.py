#!/usr/bin/env python3
"""Regenerate the CSV files under data/.

iris, wine and breast_cancer are written from scikit-learn's bundled copies
of the UCI data. seeds is not bundled anywhere offline, so it is downloaded
from the UCI archive (needs network) and converted from its tab-separated
form to the same comma-separated layout: feature columns first, integer
class label last.
"""

import argparse
import csv
import os
import sys
import urllib.request

SEEDS_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/00236/seeds_dataset.txt"


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def sklearn_datasets(out_dir):
    from sklearn.datasets import load_breast_cancer, load_iris, load_wine

    for name, loader in [
        ("iris", load_iris),
        ("wine", load_wine),
        ("breast_cancer", load_breast_cancer),
    ]:
        ds = loader()
        header = [c.replace(" ", "_") for c in ds.feature_names] + ["label"]
        rows = [[repr(float(v)) for v in x] + [int(y)] for x, y in zip(ds.data, ds.target)]
        write_csv(os.path.join(out_dir, f"{name}.csv"), header, rows)


def seeds_dataset(out_dir):
    header = [
        "area", "perimeter", "compactness", "kernel_length",
        "kernel_width", "asymmetry_coefficient", "kernel_groove_length",
        "label",
    ]
    try:
        raw = urllib.request.urlopen(SEEDS_URL, timeout=30).read().decode()
    except Exception as e:
        print(f"seeds: download failed ({e}); data/seeds.csv not written", file=sys.stderr)
        return False
    rows = []
    for line in raw.splitlines():
        fields = line.split()
        if len(fields) != 8:
            continue
        # UCI labels varieties 1..3; the loader expects 0-based labels too,
        # but keep the raw 1..3 here (the loader normalizes by min).
        rows.append(fields[:7] + [int(float(fields[7]))])
    if len(rows) != 210:
        print(f"seeds: expected 210 rows, got {len(rows)}; refusing to write", file=sys.stderr)
        return False
    write_csv(os.path.join(out_dir, "seeds.csv"), header, rows)
    return True


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    ap.add_argument("--skip-seeds", action="store_true")
    args = ap.parse_args()
    out_dir = os.path.abspath(args.out)
    os.makedirs(out_dir, exist_ok=True)
    sklearn_datasets(out_dir)
    if not args.skip_seeds:
        seeds_dataset(out_dir)


if __name__ == "__main__":
    main()
