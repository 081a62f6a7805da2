#!/usr/bin/env python3
# Copyright 2026 The itabnet Authors. All Rights Reserved.
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
"""Builds data/adult.csv from the UCI Adult training file.

The raw file (adult.data) has no header. The conventional loading used by
most TabNet reproductions reads it with the first record as header, which
leaves 32,560 rows; we keep that convention so row counts line up.

"?" cells become empty cells so the loader maps them to the missing token.

Usage:
  prepare_adult.py                 # fetch the file via pip (responsibly wheel)
  prepare_adult.py --raw adult.data
"""

import argparse
import csv
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "income",
]


def fetch_raw() -> str:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
             "-d", tmp, "responsibly==0.1.2"],
            check=True)
        wheel = next(pathlib.Path(tmp).glob("responsibly-*.whl"))
        with zipfile.ZipFile(wheel) as z:
            return z.read("responsibly/dataset/adult/adult.data").decode()


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--raw", type=pathlib.Path)
    ap.add_argument("--out", type=pathlib.Path,
                    default=pathlib.Path(__file__).resolve().parent.parent
                    / "data" / "adult.csv")
    args = ap.parse_args()

    text = args.raw.read_text() if args.raw else fetch_raw()
    records = []
    for row in csv.reader(io.StringIO(text), skipinitialspace=True):
        if not row:
            continue
        if len(row) != len(COLUMNS):
            raise SystemExit(f"unexpected column count: {row}")
        records.append(["" if c == "?" else c for c in row])
    # First record is consumed as a header by the reference loading.
    records = records[1:]

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(records)
    print(f"wrote {len(records)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
