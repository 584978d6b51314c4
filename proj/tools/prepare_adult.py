#!/usr/bin/env python3
"""Convert the raw UCI Adult files (adult.data + adult.test) into data/adult.csv.

Usage: prepare_adult.py ADULT_DATA ADULT_TEST OUT_CSV

The raw files have no header, use ", " separators, and the test split labels
carry a trailing period (">50K."). Both splits are concatenated (48,842 rows);
"?" is kept as an ordinary category value.
"""
import csv
import sys

COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "income",
]


def rows(path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("|"):
                continue
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != len(COLUMNS):
                continue
            fields[-1] = fields[-1].rstrip(".")
            yield fields


def main(argv):
    if len(argv) != 4:
        sys.exit(__doc__)
    with open(argv[3], "w", newline="", encoding="utf-8") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(COLUMNS)
        count = 0
        for path in argv[1:3]:
            for r in rows(path):
                writer.writerow(r)
                count += 1
    print(f"wrote {count} rows to {argv[3]}")


if __name__ == "__main__":
    main(sys.argv)
