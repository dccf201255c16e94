"""Rebuild the four comparison tables and write one CSV per table.

    python scripts/reproduce_tables.py [--out results/tables] [1 2 3 4]

Tables 1 and 2 include the J = 3200 and 6400 runs needed for the rate
column, so the full set takes about half a minute on one core.
"""
import argparse
from pathlib import Path

from hypstab import harness


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("tables", nargs="*", type=int, default=sorted(harness.TABLES))
    p.add_argument("--out", type=Path, default=Path("results/tables"))
    args = p.parse_args()
    for tid in args.tables:
        report = harness.reproduce_table(tid)
        path = harness.write_table_csv(report, args.out / f"table{tid}.csv")
        print(f"table {tid} -> {path}")
        print(harness.format_report(report))
        print()


if __name__ == "__main__":
    main()
