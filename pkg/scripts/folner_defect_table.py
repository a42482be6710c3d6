#!/usr/bin/env python3
"""Invariance defect of window averages along the odometer, as a CSV table."""

import argparse

from dendrodyn.cli import ExperimentConfig, run_experiment, write_report, export_plot_data


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--depth", type=int, default=6)
    parser.add_argument("--max-n", type=int, default=16)
    parser.add_argument("--out", default="reports/defect")
    args = parser.parse_args()

    cfg = ExperimentConfig(
        command="defect",
        system=f"odometer:D={args.depth}",
        parameters={"ns": list(range(1, args.max_n + 1)),
                    "x": {"leaf": 0}},
        out=args.out,
        format="csv")
    report, code = run_experiment(cfg)
    path = write_report(cfg, report)
    print(export_plot_data(str(path), "defect"))
    print(f"report: {path}")
    raise SystemExit(code)


if __name__ == "__main__":
    main()
