#!/usr/bin/env python3
"""Export the Wisconsin diagnostic breast cancer dataset to CSV.

Usage: export_breast_cancer.py OUTPUT.csv

Columns: id, diagnosis (M = malignant, B = benign), then the 30 numeric
features. Source is scikit-learn's bundled copy of the UCI dataset, so the
build needs no network access. Output is deterministic.
"""

import sys
from pathlib import Path

from sklearn.datasets import load_breast_cancer


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    out_path = Path(sys.argv[1])
    out_path.parent.mkdir(parents=True, exist_ok=True)

    data = load_breast_cancer()
    names = [name.replace(" ", "_") for name in data.feature_names]
    label = {0: "M", 1: "B"}  # target 0 is malignant in scikit-learn's encoding

    with out_path.open("w", newline="\n") as out:
        out.write("id,diagnosis," + ",".join(names) + "\n")
        for idx, (row, target) in enumerate(zip(data.data, data.target)):
            values = ",".join(repr(float(v)) for v in row)
            out.write(f"{idx},{label[int(target)]},{values}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
