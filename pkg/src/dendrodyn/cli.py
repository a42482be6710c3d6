"""Config-driven experiment runner.

One experiment = one JSON config: a system (zoo name or explicit files), a
command, and parameters.  Reports are deterministic JSON (sorted keys, exact
rationals as strings); ``--format csv`` additionally writes the two-column
plot table for commands that have one.  Exit codes: 0 success, 2 when a
verdict comes back Failed, 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import serialization as ser
from .action import (
    Word,
    classify_minimal_set,
    detect_finite_orbit,
    minimal_set_approx,
    orbit,
)
from .dendrite import hausdorff_distance
from .equicontinuity import (
    build_tree_tower,
    equicontinuity_certificate,
    frontier_cover,
    strong_proximality_scan,
    tamper_remove_edge,
    verify_cover_equivariance,
)
from .errors import ConfigInvalid, DendrodynError, ReportMissing
from .measure import (
    TestFunction,
    canonical_measure,
    dirac,
    folner_average,
    folner_ratio,
    invariance_defect,
    push_forward,
)
from .action import evaluate_word
from .util import frac, frac_str
from .zoo import (
    ZooSystem,
    folner_scheme_Z,
    get_system,
    leaf_point,
    list_systems,
    verify_paradox_partition,
)

log = logging.getLogger("dendrodyn")

COMMANDS = ("orbit", "finite-orbit", "minimal-set", "classify", "tower", "cover",
            "certify", "measure", "pushforward", "folner-average", "defect",
            "paradox-check", "folner-ratio", "proximality", "zoo")

SYSTEMLESS = {"paradox-check", "folner-ratio", "zoo"}


@dataclass
class ExperimentConfig:
    command: str
    system: object = None
    parameters: dict = field(default_factory=dict)
    out: str = "."
    format: str = "json"
    seed: int = 0
    threads: int = 1

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigInvalid("config must be a JSON object")
        command = doc.get("command")
        if command not in COMMANDS:
            raise ConfigInvalid(f"unknown command {command!r}; expected one of {COMMANDS}")
        cfg = cls(command=command,
                  system=doc.get("system"),
                  parameters=doc.get("parameters", {}) or {},
                  out=doc.get("out", "."),
                  format=doc.get("format", "json"),
                  seed=int(doc.get("seed", 0)),
                  threads=int(doc.get("threads", 1)))
        if cfg.format not in ("json", "csv"):
            raise ConfigInvalid(f"unknown format {cfg.format!r}")
        if cfg.command not in SYSTEMLESS and cfg.system is None:
            raise ConfigInvalid(f"command {command!r} needs a system")
        if cfg.threads < 1:
            raise ConfigInvalid("threads must be >= 1")
        return cfg


def _resolve_system(spec) -> ZooSystem:
    if isinstance(spec, str):
        return get_system(spec)
    if isinstance(spec, dict):
        from .action import GeneratorSet
        dpath = spec.get("dendrite")
        if dpath is None:
            raise ConfigInvalid("explicit system needs a 'dendrite' file path")
        if not os.path.exists(dpath):
            raise ConfigInvalid(f"dendrite file {dpath!r} does not exist")
        dendrite = ser.dendrite_from_json(ser.load_json(dpath))
        gens = []
        for row in spec.get("generators", ()):
            symbol = row.get("symbol")
            if symbol is None:
                raise ConfigInvalid("each generator needs a 'symbol'")
            if "file" in row:
                if not os.path.exists(row["file"]):
                    raise ConfigInvalid(f"homeo file {row['file']!r} does not exist")
                doc = ser.load_json(row["file"])
            else:
                doc = row.get("homeo")
            gens.append((symbol, ser.homeo_from_json(doc, dendrite)))
        return ZooSystem("custom", dendrite, GeneratorSet(dendrite, gens), {})
    raise ConfigInvalid(f"cannot interpret system spec {spec!r}")


def _resolve_point(spec, system: ZooSystem):
    X = system.dendrite
    if spec is None:
        depth = system.properties.get("depth")
        if depth is not None:
            return leaf_point(X, depth, 0)
        if len(X.edges) == 1:
            return X.point(X.edges[0].eid, Fraction(1, 2))
        raise ConfigInvalid("no default base point for this system; supply 'x'")
    if isinstance(spec, dict):
        if "leaf" in spec:
            depth = system.properties.get("depth")
            if depth is None:
                raise ConfigInvalid("'leaf' points only apply to tree systems")
            return leaf_point(X, depth, int(spec["leaf"]))
        return ser.point_from_json(spec, X)
    if isinstance(spec, (str, int)):
        if len(X.edges) != 1:
            raise ConfigInvalid("bare interval coordinates need a single-edge dendrite")
        return X.point(X.edges[0].eid, frac(spec))
    raise ConfigInvalid(f"cannot interpret point spec {spec!r}")


def _resolve_measure(spec, system: ZooSystem):
    if spec in (None, "canonical"):
        return canonical_measure(system.dendrite)
    if isinstance(spec, dict):
        if "dirac" in spec:
            return dirac(system.dendrite, _resolve_point(spec["dirac"], system))
        if "file" in spec:
            if not os.path.exists(spec["file"]):
                raise ConfigInvalid(f"measure file {spec['file']!r} does not exist")
            return ser.measure_from_json(ser.load_json(spec["file"]), system.dendrite)
        return ser.measure_from_json(spec, system.dendrite)
    raise ConfigInvalid(f"cannot interpret measure spec {spec!r}")


def _minimal_set(system: ZooSystem, params: dict):
    """Seed resolution: (approximate minimal set, certified flag, tower class).

    A truncated tree action certifies every orbit as finite, so the tower
    class follows the system's documented minimal-set character (or an
    explicit ``minimal_class`` parameter) rather than the closure flag alone.
    """
    x = _resolve_point(params.get("x"), system)
    depth = system.properties.get("depth")
    # tree systems have finite orbits closing within one sweep of the cycle;
    # elsewhere keep the look-ahead short since infinite orbit balls grow fast
    default_budget = 2 ** depth + 1 if depth is not None else 16
    budget = int(params.get("budget", default_budget))
    result = detect_finite_orbit(system.generators, x, budget)
    if result.found:
        points, certified = result.orbit, True
    else:
        radius = int(params.get("R", 6))
        approx = minimal_set_approx(system.generators, x, max(radius, 2),
                                    frac(params.get("eps", "1/16")))
        points, certified = approx.points, False
    minimal_class = params.get("minimal_class")
    if minimal_class is None:
        minimal_class = system.properties.get("expected_minimal_class")
    if minimal_class in ("cantor-like", "whole-space"):
        tower_class = "cantor-like"
    else:
        tower_class = "finite" if certified else "cantor-like"
    return points, certified, tower_class


def _default_dictionary(system: ZooSystem, params: dict) -> list[TestFunction]:
    X = system.dendrite
    probes = params.get("dictionary")
    if probes is not None:
        return [TestFunction.distance_to(X, _resolve_point(p, system)) for p in probes]
    depth = system.properties.get("depth")
    if depth is not None:
        points = [leaf_point(X, depth, 0), X.vertex_point("r"),
                  X.vertex_point("0"), X.vertex_point("1"),
                  leaf_point(X, depth, 2 ** depth - 1)]
    else:
        points = [X.point(X.edges[0].eid, Fraction(1, 2)),
                  list(X.vertices)[0]]
        points = [points[0]] + [X.vertex_point(v)
                                for v in sorted(X.vertices, key=str)]
    return [TestFunction.distance_to(X, p) for p in points]


def _pmap(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# -- command implementations -----------------------------------------------------


def _cmd_orbit(cfg, system):
    params = cfg.parameters
    x = _resolve_point(params.get("x"), system)
    radius = int(params.get("R", 4))
    report = orbit(system.generators, x, radius)
    return {
        "base": ser.point_to_json(report.base),
        "R": radius,
        "points": [ser.point_to_json(p) for p in report.points],
        "growth": [[r, size] for r, size in enumerate(report.growth)],
        "closed": report.closed,
    }, 0


def _cmd_finite_orbit(cfg, system):
    params = cfg.parameters
    x = _resolve_point(params.get("x"), system)
    budget = int(params.get("budget", params.get("R", 16)))
    result = detect_finite_orbit(system.generators, x, budget)
    doc = {
        "base": ser.point_to_json(system.dendrite.check_point(x)),
        "budget": budget,
        "found": result.found,
        "growth": [[r, size] for r, size in enumerate(result.growth)],
    }
    if result.found:
        doc["radius"] = result.radius
        doc["orbit"] = [ser.point_to_json(p) for p in result.orbit]
    return doc, 0


def _cmd_minimal_set(cfg, system):
    params = cfg.parameters
    x = _resolve_point(params.get("x"), system)
    radius = int(params.get("R", 4))
    eps = frac(params.get("eps", "1/16"))
    approx = minimal_set_approx(system.generators, x, radius, eps)
    return {
        "base": ser.point_to_json(system.dendrite.check_point(x)),
        "R": radius,
        "eps": frac_str(eps),
        "points": [ser.point_to_json(p) for p in approx.points],
        "increments": [[r + 1, frac_str(d)] for r, d in enumerate(approx.increments)],
        "converged": approx.converged,
        "certified_finite": approx.certified_finite,
    }, 0


def _cmd_classify(cfg, system):
    params = cfg.parameters
    eps = frac(params.get("eps", "1/8"))
    m, certified, _ = _minimal_set(system, params)
    minimal_class = params.get("minimal_class",
                               system.properties.get("expected_minimal_class"))
    treat_finite = certified and minimal_class not in ("cantor-like", "whole-space")
    verdict = classify_minimal_set(system.dendrite, m, eps,
                                   certified_finite=treat_finite)
    return {
        "eps": frac_str(eps),
        "size": len(m),
        "certified_finite": certified,
        "verdict": verdict.kind,
    }, 0


def _cmd_tower(cfg, system):
    params = cfg.parameters
    n_max = int(params.get("n_max", 4))
    m, _, tower_class = _minimal_set(system, params)
    tower = build_tree_tower(system.generators, m, n_max,
                             minimal_class=tower_class,
                             orbit_budget=params.get("orbit_budget"))
    levels = []
    for lvl in tower.levels:
        levels.append({
            "n": lvl.index,
            "orbit_size": len(lvl.orbit),
            "frontier_size": len(lvl.frontier),
            "strict": lvl.strict,
            "frontier_to_set": frac_str(hausdorff_distance(lvl.frontier, m)),
        })
    return {"n_max": n_max, "levels": levels, "set_size": len(m)}, 0


def _cmd_cover(cfg, system):
    params = cfg.parameters
    n = int(params.get("n", 1))
    m, _, tower_class = _minimal_set(system, params)
    tower = build_tree_tower(system.generators, m, n,
                             minimal_class=tower_class,
                             orbit_budget=params.get("orbit_budget"))
    level = tower.levels[-1]
    cover = frontier_cover(system.dendrite, m, level.tree, level.index)
    equi = verify_cover_equivariance(system.generators, cover)
    cells = [{"anchor": ser.point_to_json(a),
              "diameter": frac_str(c.diameter()),
              "edges": len(c.portions)} for a, c in cover.cells]
    return {
        "n": level.index,
        "mesh": frac_str(cover.mesh()),
        "cells": cells,
        "equivariant": equi.ok,
    }, 0


def _cmd_certify(cfg, system):
    params = cfg.parameters
    n_max = int(params.get("n_max", 4))
    m, _, tower_class = _minimal_set(system, params)
    eps_grid = params.get("eps_grid")
    if eps_grid is not None:
        eps_grid = [frac(e) for e in eps_grid]
    mesh_target = params.get("mesh_target")
    cert = equicontinuity_certificate(
        system.generators, m, n_max,
        mesh_target=frac(mesh_target) if mesh_target is not None else None,
        eps_grid=eps_grid,
        minimal_class=tower_class,
        orbit_budget=params.get("orbit_budget"),
        cover_tamper=tamper_remove_edge if system.corrupt_cover else None)
    doc = ser.certificate_to_json(cert)
    return doc, (2 if cert.verdict == "Failed" else 0)


def _cmd_measure(cfg, system):
    mu = canonical_measure(system.dendrite)
    return {"measure": ser.measure_to_json(mu),
            "total_mass": frac_str(mu.total_mass())}, 0


def _cmd_pushforward(cfg, system):
    params = cfg.parameters
    mu = _resolve_measure(params.get("measure"), system)
    w = Word.parse(params.get("word", "e"))
    h = evaluate_word(w, system.generators)
    pushed = push_forward(h, mu)
    return {"word": str(w),
            "measure": ser.measure_to_json(pushed),
            "total_mass": frac_str(pushed.total_mass())}, 0


def _cmd_folner_average(cfg, system):
    params = cfg.parameters
    scheme = folner_scheme_Z(params.get("scheme_symbol", system.generators.symbols[0]))
    mu0 = _resolve_measure(params.get("measure", {"dirac": params.get("x")}), system)
    n = int(params.get("n", 4))
    nu = folner_average(system.generators, scheme, mu0, n)
    fns = _default_dictionary(system, params)
    return {"n": n,
            "measure": ser.measure_to_json(nu),
            "defect": frac_str(invariance_defect(system.generators, nu, fns))}, 0


def _cmd_defect(cfg, system):
    params = cfg.parameters
    ns = [int(n) for n in params.get("ns", [1, 2, 4, 8, 16])]
    scheme = folner_scheme_Z(params.get("scheme_symbol", system.generators.symbols[0]))
    mu0 = _resolve_measure(params.get("measure", {"dirac": params.get("x")}), system)
    fns = _default_dictionary(system, params)
    sup = max(f.sup_norm() for f in fns)

    def row(n):
        nu = folner_average(system.generators, scheme, mu0, n)
        return [n, frac_str(invariance_defect(system.generators, nu, fns)),
                frac_str(2 * sup / (2 * n + 1))]

    rows = _pmap(row, ns, cfg.threads)
    return {"rows": rows, "sup_norm": frac_str(sup)}, 0


def _cmd_paradox(cfg, system):
    params = cfg.parameters
    max_length = int(params.get("L", 3))
    report = verify_paradox_partition(max_length)
    doc = {
        "L": max_length,
        "total_words": report.total_words,
        "bt1": {"counts": report.first_letter_counts, "ok": report.partition_ok},
        "two_piece": {"checked": report.two_piece_checked, "ok": report.two_piece_ok},
        "literal_bt2": {
            "missing_count": len(report.literal_missing),
            "missing_examples": list(report.literal_missing[:10]),
            "overlap_count": len(report.literal_overlap),
            "overlap_examples": list(report.literal_overlap[:10]),
        },
    }
    return doc, (0 if report.ok else 2)


def _cmd_folner_ratio(cfg, system):
    params = cfg.parameters
    ns = [int(n) for n in params.get("ns", [2, 10, 50])]
    symbol = params.get("scheme_symbol", "g")
    scheme = folner_scheme_Z(symbol)
    g = params.get("g", symbol)
    rows = [[n, frac_str(folner_ratio(scheme, g, n))] for n in ns]
    return {"g": g, "rows": rows}, 0


def _cmd_proximality(cfg, system):
    params = cfg.parameters
    mu0 = _resolve_measure(params.get("measure"), system)
    radius = int(params.get("R", 3))
    trace = strong_proximality_scan(system.generators, mu0, radius)
    return {"R": radius,
            "rows": [[k, frac_str(s), w] for k, s, w in trace.rows]}, 0


def _cmd_zoo(cfg, system):
    params = cfg.parameters
    action = params.get("action", "list")
    if action == "list":
        return {"systems": list_systems()}, 0
    if action == "export":
        name = params.get("name")
        if not name:
            raise ConfigInvalid("zoo export needs a 'name'")
        target = get_system(name)
        return {
            "name": target.name,
            "dendrite": ser.dendrite_to_json(target.dendrite),
            "generators": [{"symbol": sym, "homeo": ser.homeo_to_json(h)}
                           for sym, h in target.generators.items],
            "properties": {k: v for k, v in sorted(target.properties.items())},
        }, 0
    raise ConfigInvalid(f"unknown zoo action {action!r}")


_HANDLERS = {
    "orbit": _cmd_orbit,
    "finite-orbit": _cmd_finite_orbit,
    "minimal-set": _cmd_minimal_set,
    "classify": _cmd_classify,
    "tower": _cmd_tower,
    "cover": _cmd_cover,
    "certify": _cmd_certify,
    "measure": _cmd_measure,
    "pushforward": _cmd_pushforward,
    "folner-average": _cmd_folner_average,
    "defect": _cmd_defect,
    "paradox-check": _cmd_paradox,
    "folner-ratio": _cmd_folner_ratio,
    "proximality": _cmd_proximality,
    "zoo": _cmd_zoo,
}

_PLOT_KINDS = {
    "mesh": ("levels", "n", "mesh", "n,mesh"),
    "defect": ("rows", 0, 1, "n,defect"),
    "orbit": ("growth", 0, 1, "R,orbit"),
    "delta": ("delta_table", 0, 1, "eps,delta"),
}


def export_plot_data(report_path: str, kind: str) -> str:
    """Two-column CSV extracted from a report file."""
    if kind not in _PLOT_KINDS:
        raise ConfigInvalid(f"unknown plot kind {kind!r}; expected {sorted(_PLOT_KINDS)}")
    if not os.path.exists(report_path):
        raise ReportMissing(f"report {report_path!r} does not exist")
    doc = ser.load_json(report_path)
    key, xk, yk, header = _PLOT_KINDS[kind]
    if key not in doc:
        raise ReportMissing(f"report has no {key!r} table for kind {kind!r}")
    lines = [header]
    for row in doc[key]:
        if isinstance(row, dict):
            lines.append(f"{row[xk]},{row[yk]}")
        else:
            lines.append(f"{row[xk]},{row[yk]}")
    return "\n".join(lines) + "\n"


def run_experiment(cfg: ExperimentConfig):
    """Execute one command; returns (report dict, exit code)."""
    system = _resolve_system(cfg.system) if cfg.command not in SYSTEMLESS else None
    if cfg.command in SYSTEMLESS and cfg.system is not None:
        system = _resolve_system(cfg.system)
    handler = _HANDLERS[cfg.command]
    body, code = handler(cfg, system)
    report = {
        "command": cfg.command,
        "system": cfg.system if isinstance(cfg.system, str) else
                  ("custom" if cfg.system else None),
        "seed": cfg.seed,
    }
    report.update(body)
    return report, code


_CSV_FOR_COMMAND = {"certify": "mesh", "defect": "defect", "orbit": "orbit"}


def write_report(cfg: ExperimentConfig, report: dict) -> Path:
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{cfg.command}.json"
    ser.dump_json(report, path)
    if cfg.format == "csv" and cfg.command in _CSV_FOR_COMMAND:
        kind = _CSV_FOR_COMMAND[cfg.command]
        csv_path = out_dir / f"{cfg.command}.{kind}.csv"
        csv_path.write_text(export_plot_data(str(path), kind), encoding="utf-8")
    return path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dendrodyn",
        description="exact experiments with group actions on tree-like spaces")
    sub = parser.add_subparsers(dest="mode", required=True)

    run = sub.add_parser("run", help="run a config-driven experiment")
    run.add_argument("--config", required=True, help="experiment JSON file")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--format", default=None, choices=("json", "csv"))
    run.add_argument("--threads", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)

    zoo = sub.add_parser("zoo", help="inspect the bundled systems")
    zoo_sub = zoo.add_subparsers(dest="zoo_action", required=True)
    lst = zoo_sub.add_parser("list", help="list bundled systems")
    lst.add_argument("--out", default=None, help="output directory")
    exp = zoo_sub.add_parser("export", help="export one system as JSON")
    exp.add_argument("name")
    exp.add_argument("--out", default=None, help="output directory")

    plot = sub.add_parser("export-plot", help="extract a CSV table from a report")
    plot.add_argument("report")
    plot.add_argument("--kind", required=True, choices=sorted(_PLOT_KINDS))
    plot.add_argument("--out", default=None, help="CSV output path (default stdout)")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("DENDRODYN_LOG", "WARNING").upper())
    args = _build_parser().parse_args(argv)
    try:
        if args.mode == "run":
            if not os.path.exists(args.config):
                raise ConfigInvalid(f"config file {args.config!r} does not exist")
            doc = ser.load_json(args.config)
            for flag in ("out", "format", "threads", "seed"):
                value = getattr(args, flag)
                if value is not None:
                    doc[flag] = value
            cfg = ExperimentConfig.from_dict(doc)
            report, code = run_experiment(cfg)
            path = write_report(cfg, report)
            log.info("report written to %s", path)
            print(path)
            return code
        if args.mode == "zoo":
            cfg = ExperimentConfig(command="zoo", parameters=(
                {"action": "list"} if args.zoo_action == "list"
                else {"action": "export", "name": args.name}))
            if args.out is not None:
                cfg.out = args.out
                report, code = run_experiment(cfg)
                path = write_report(cfg, report)
                print(path)
                return code
            report, code = run_experiment(cfg)
            print(json.dumps(report, sort_keys=True, indent=2))
            return code
        if args.mode == "export-plot":
            text = export_plot_data(args.report, args.kind)
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
                print(args.out)
            else:
                sys.stdout.write(text)
            return 0
    except DendrodynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


def console_entry():
    raise SystemExit(main())
