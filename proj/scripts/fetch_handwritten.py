#!/usr/bin/env python3
"""Fetch the UCI Multiple Features (handwritten digits) dataset and convert it
to an mvclust manifest under data/handwritten/.

The benchmark has 2000 samples, 10 classes (digits 0-9, 200 samples each, in
class order) and six views:

    mfeat-fac  216  profile correlations
    mfeat-fou   76  Fourier coefficients
    mfeat-kar   64  Karhunen-Loeve coefficients
    mfeat-mor    6  morphological features
    mfeat-pix  240  pixel averages
    mfeat-zer   47  Zernike moments

Usage: scripts/fetch_handwritten.py [--dest data/handwritten]
"""

import argparse
import io
import json
import os
import sys
import urllib.request
import zipfile

UCI_ZIP = "https://archive.ics.uci.edu/static/public/72/multiple+features.zip"

VIEWS = [
    ("fac", "mfeat-fac", 216),
    ("fou", "mfeat-fou", 76),
    ("kar", "mfeat-kar", 64),
    ("mor", "mfeat-mor", 6),
    ("pix", "mfeat-pix", 240),
    ("zer", "mfeat-zer", 47),
]


def convert(raw_text: str, dim: int) -> list[list[float]]:
    rows = []
    for line in raw_text.splitlines():
        line = line.strip()
        if not line:
            continue
        values = [float(x) for x in line.split()]
        if len(values) != dim:
            raise SystemExit(f"expected {dim} values per row, got {len(values)}")
        rows.append(values)
    if len(rows) != 2000:
        raise SystemExit(f"expected 2000 rows, got {len(rows)}")
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="data/handwritten")
    parser.add_argument("--zip", help="already-downloaded multiple+features.zip")
    args = parser.parse_args()

    if args.zip:
        blob = open(args.zip, "rb").read()
    else:
        print(f"downloading {UCI_ZIP} ...", file=sys.stderr)
        blob = urllib.request.urlopen(UCI_ZIP, timeout=120).read()

    archive = zipfile.ZipFile(io.BytesIO(blob))
    names = {os.path.basename(n): n for n in archive.namelist()}

    os.makedirs(args.dest, exist_ok=True)
    manifest = {"name": "handwritten", "n": 2000, "k": 10, "views": []}
    for short, fname, dim in VIEWS:
        if fname not in names:
            raise SystemExit(f"{fname} missing from the archive")
        rows = convert(archive.read(names[fname]).decode("ascii"), dim)
        out = os.path.join(args.dest, f"{short}.csv")
        with open(out, "w") as f:
            for row in rows:
                f.write(",".join(repr(v) for v in row) + "\n")
        manifest["views"].append(
            {"name": short, "path": f"{short}.csv", "dim": dim, "format": "csv"}
        )
        print(f"wrote {out}", file=sys.stderr)

    # samples are stored in class order: digits 0..9, 200 each
    with open(os.path.join(args.dest, "labels.txt"), "w") as f:
        for digit in range(10):
            f.write(("%d\n" % digit) * 200)
    manifest["labels_path"] = "labels.txt"

    with open(os.path.join(args.dest, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    print(f"wrote {os.path.join(args.dest, 'manifest.json')}", file=sys.stderr)


if __name__ == "__main__":
    main()
