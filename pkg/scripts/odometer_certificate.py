#!/usr/bin/env python3
"""Build the equicontinuity certificate for the binary odometer.

Writes the certificate JSON and the (n, mesh) CSV used for plots.
"""

import argparse

from dendrodyn.cli import ExperimentConfig, run_experiment, write_report, export_plot_data


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--depth", type=int, default=8)
    parser.add_argument("--levels", type=int, default=6)
    parser.add_argument("--mesh-target", default="1/16")
    parser.add_argument("--out", default="reports/odometer")
    args = parser.parse_args()

    cfg = ExperimentConfig(
        command="certify",
        system=f"odometer:D={args.depth}",
        parameters={"n_max": args.levels, "mesh_target": args.mesh_target},
        out=args.out,
        format="csv")
    report, code = run_experiment(cfg)
    path = write_report(cfg, report)
    print(f"verdict: {report['verdict']}")
    for level in report["levels"]:
        print(f"  n={level['n']}  mesh={level['mesh']}  "
              f"equivariant={level['equivariant']}")
    print(f"report: {path}")
    print(export_plot_data(str(path), "mesh"))
    raise SystemExit(code)


if __name__ == "__main__":
    main()
