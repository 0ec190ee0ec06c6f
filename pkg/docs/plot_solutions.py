"""Plot the u(x) CSVs written by `fracbessel eval`.

    fracbessel eval specs/example_7_3.json --out out
    python3 docs/plot_solutions.py out solutions.png

Each u_root{i}_branch{l}.csv has the columns x,u.
"""

import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_xy(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [float(r["x"]) for r in rows], [float(r["u"]) for r in rows]


def main(out_dir, target):
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in sorted(Path(out_dir).glob("u_root*_branch*.csv")):
        x, u = read_xy(path)
        ax.plot(x, u, label=path.stem[2:])
    ax.set_xlabel("x")
    ax.set_ylabel("u(x)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(target, dpi=120)


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2] if len(sys.argv) > 2 else "solutions.png")
