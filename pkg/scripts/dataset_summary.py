"""
Summarize the Stroke Dataset
Row counts, missing cells, class balance before and after SMOTE, correlation with stroke
"""

import os
import sys
from pathlib import Path

from dotenv import load_dotenv

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from stroke.config import load_settings
from stroke.core.rng import derive_stream
from stroke.experiment.runner import prepare
from stroke.ingestion.smote import SmoteConfig, class_balance, oversample

load_dotenv()


def banner(title):
    print("\n" + "=" * 60)
    print(title)
    print("=" * 60)


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else os.getenv("STROKE_DATA_PATH")
    if not path:
        print("Usage: python scripts/dataset_summary.py <stroke.csv>  (or set STROKE_DATA_PATH)")
        return 2

    settings = load_settings(overrides={"data_path": path})
    prepared = prepare(settings)
    report = prepared.report

    banner("ROWS")
    print(f"Read:            {report.input_rows:,}")
    print(f"After dropping:  {report.rows_after_drop:,}")
    print(f"Dropped columns: {', '.join(report.dropped_columns)}")

    banner("MISSING CELLS")
    for column, count in report.missing["counts"].items():
        if count:
            print(f"{column:<20} {count:>8,}  ({report.missing['percent'][column]:.2f}%)")
    print(f"Rows with any missing cell: {report.missing['rows_with_missing']:,}")

    banner("CLASS BALANCE")
    before = class_balance(prepared.dataset)
    balanced = oversample(prepared.dataset, SmoteConfig(k_neighbors=settings.smote_k), derive_stream(settings.seed, "smote"))
    after = class_balance(balanced)
    for key in before:
        print(f"{key:<20} {before[key]:>12,} -> {after[key]:,}")

    banner("CORRELATION WITH STROKE")
    for feature, r in sorted(report.correlation.items(), key=lambda item: item[1], reverse=True):
        print(f"{feature:<20} {r:+.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
