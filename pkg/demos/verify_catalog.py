"""Run the default verification catalog and print the CSV report.

Run with ``python3 demos/verify_catalog.py``.
"""

import sys

from domainconst.harness import format_report, run_catalog

report = run_catalog()
sys.stdout.write(format_report(report, "csv"))
for check in report.checks:
    if check.name == "mean_distance_hardy":
        print(f"{check.domain:>15}: {check.detail}")
print("global status:", report.global_status)
