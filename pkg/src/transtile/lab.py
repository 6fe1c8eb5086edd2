"""Batch experiment runner and its command-line surface.

A config names one scenario, one instance source, and a seed; `run`
executes the scenario over the instance list and returns one record
per instance.  Records serialize to CSV plus a lossless JSON mirror,
and `emit_plot` renders them to SVG.  Everything derived from the same
config is byte-identical across runs: worker threads own RNG streams
keyed by (seed, instance index), so parallelism cannot reorder or
perturb results, and wall-clock times stay out of the files.

Per-instance failures (a refused exact cap, an unsatisfiable pipeline
stage) are recorded as rows with `failed=true` and the run continues;
the CLI signals them with exit code 2.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from transtile.absorbing import (
    AbsorbParams,
    build_absorbing_set,
    disjoint_absorbers,
    find_absorber,
    verify_absorbing_property,
)
from transtile.core import PartiteGraph, delta_star
from transtile.generators import GenSpec, complete_blowup, random_spanning_subgraph, subseed
from transtile.holes import alpha_star_exact
from transtile.svg import heatmap, line_plot
from transtile.tiling import (
    check_appendix_invariants,
    exact_transversal_factor_search,
    greedy_clique_tiling,
    greedy_cycle_tiling,
    maximal_mixed_tiling,
)

ARTIFACT_VERSION = "lab-v1"

SCENARIOS = (
    "hole_scan",
    "greedy_tiling",
    "factor_decision",
    "absorber_census",
    "absorbing_pipeline",
    "appendix_invariants",
    "threshold_sweep",
)

# fixed CSV schema per scenario; metrics not in this list never appear
METRIC_COLUMNS = {
    "hole_scan": ("r", "alpha", "method", "explored"),
    "greedy_tiling": ("copies", "leftover_per_part"),
    "factor_decision": ("exists", "copies", "nodes", "max_depth"),
    "absorber_census": ("found", "requested", "vertices_used"),
    "absorbing_pipeline": (
        "built",
        "total_size",
        "per_part",
        "verify_ok",
        "verify_checks",
    ),
    "appendix_invariants": (
        "maximal",
        "vacuous",
        "violations",
        "copies_checked",
        "leftover_per_part",
    ),
    "threshold_sweep": ("p", "delta_star", "exists", "greedy_leftover"),
}


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ExperimentConfig:
    """One scenario run: instance source, scenario knobs, seed, outputs."""

    scenario: str
    gen: GenSpec | str
    params: dict = field(default_factory=dict)
    seed: int = 0
    out_csv: Optional[str] = None
    out_json: Optional[str] = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(
                f"unknown scenario {self.scenario!r}; pick from {SCENARIOS}"
            )
        if isinstance(self.gen, str) and not os.path.exists(self.gen):
            raise ValueError(f"graph file not found: {self.gen}")
        if self.scenario == "threshold_sweep":
            if isinstance(self.gen, str):
                raise ValueError("threshold_sweep varies a generator, not a file")
            grid = self.params.get("p_grid")
            if not grid or not all(0 <= float(p) <= 1 for p in grid):
                raise ValueError("threshold_sweep needs params.p_grid in [0,1]")
            if int(self.params.get("seeds_per_p", 1)) < 1:
                raise ValueError("threshold_sweep needs seeds_per_p >= 1")
        else:
            if int(self.params.get("instances", 1)) < 1:
                raise ValueError("params.instances must be >= 1")

    def gen_descriptor(self) -> dict:
        if isinstance(self.gen, str):
            return {"path": self.gen}
        return self.gen.to_json_dict()

    def config_hash(self) -> str:
        body = {
            "scenario": self.scenario,
            "gen": self.gen_descriptor(),
            "params": self.params,
            "seed": self.seed,
        }
        return hashlib.sha256(canonical_json(body).encode()).hexdigest()

    @staticmethod
    def from_json_dict(data: dict, base_dir: str = ".") -> "ExperimentConfig":
        if "scenario" not in data or "gen" not in data:
            raise ValueError("config needs scenario and gen")
        raw_gen = data["gen"]
        if isinstance(raw_gen, str):
            gen: GenSpec | str = os.path.join(base_dir, raw_gen)
        elif isinstance(raw_gen, dict) and "path" in raw_gen:
            gen = os.path.join(base_dir, raw_gen["path"])
        else:
            gen = GenSpec.from_json_dict(raw_gen)
        out = data.get("out", {})
        return ExperimentConfig(
            scenario=data["scenario"],
            gen=gen,
            params=dict(data.get("params", {})),
            seed=int(data.get("seed", 0)),
            out_csv=os.path.join(base_dir, out["csv"]) if "csv" in out else None,
            out_json=os.path.join(base_dir, out["json"]) if "json" in out else None,
        )


@dataclass
class ResultRecord:
    """One instance outcome.  Wall time is kept for interactive use but
    never serialized; files must not depend on machine speed."""

    config_hash: str
    scenario: str
    index: int
    instance: dict
    metrics: dict
    wall_ms: float = 0.0
    artifact_version: str = ARTIFACT_VERSION

    @property
    def failed(self) -> bool:
        return bool(self.metrics.get("failed"))

    def to_json_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "scenario": self.scenario,
            "index": self.index,
            "instance": self.instance,
            "metrics": self.metrics,
            "artifact_version": self.artifact_version,
        }

    @staticmethod
    def from_json_dict(data: dict) -> "ResultRecord":
        return ResultRecord(
            config_hash=data["config_hash"],
            scenario=data["scenario"],
            index=data["index"],
            instance=data["instance"],
            metrics=data["metrics"],
            artifact_version=data.get("artifact_version", ARTIFACT_VERSION),
        )


# -- scenario bodies ------------------------------------------------------------


def _load_instance(desc: dict) -> PartiteGraph:
    if "path" in desc:
        with open(desc["path"]) as fh:
            return PartiteGraph.from_json_dict(json.load(fh))
    return GenSpec.from_json_dict(desc).build().graph


def _greedy_by_pattern(G: PartiteGraph):
    if G.pattern.is_complete:
        return greedy_clique_tiling(G)
    if G.pattern.is_cycle:
        return greedy_cycle_tiling(G)
    raise ValueError("greedy tiling needs a complete or cycle pattern")


def _scn_hole_scan(G: PartiteGraph, params: dict, seed: int) -> dict:
    r = int(params.get("r", 2))
    report = alpha_star_exact(G, r, cap=int(params.get("cap", 10)))
    return {
        "r": r,
        "alpha": report.alpha,
        "method": report.method,
        "explored": report.explored,
    }


def _scn_greedy_tiling(G: PartiteGraph, params: dict, seed: int) -> dict:
    tiling = _greedy_by_pattern(G)
    return {"copies": len(tiling.copies), "leftover_per_part": tiling.leftover_per_part}


def _scn_factor_decision(G: PartiteGraph, params: dict, seed: int) -> dict:
    cap = params.get("cap", 12)
    tiling, stats = exact_transversal_factor_search(
        G, cap=None if cap is None else int(cap)
    )
    return {
        "exists": tiling is not None,
        "copies": 0 if tiling is None else len(tiling.copies),
        "nodes": stats.nodes,
        "max_depth": stats.max_depth,
    }


def _scn_absorber_census(G: PartiteGraph, params: dict, seed: int) -> dict:
    target = [tuple(v) for v in params.get("target", [[p, 0] for p in range(1, G.k + 1)])]
    requested = int(params.get("count_target", 8))
    fam = disjoint_absorbers(
        G, target, requested, connector_t=int(params.get("connector_t", 1))
    )
    return {
        "found": len(fam),
        "requested": requested,
        "vertices_used": sum(len(a.verts) for a in fam),
    }


def _scn_absorbing_pipeline(G: PartiteGraph, params: dict, seed: int) -> dict:
    absorb = AbsorbParams(
        q=float(params["q"]),
        tau=float(params["tau"]),
        beta_prime=float(params["beta_prime"]),
        m=int(params["m"]),
        beta_m=int(params.get("beta_m", 1)),
        seed=seed,
        connector_t=int(params.get("connector_t", 1)),
    )
    out = build_absorbing_set(G, absorb)
    verdict = verify_absorbing_property(
        G, out, xi=out.xi, trials=int(params.get("verify_trials", 16)), seed=seed
    )
    return {
        "built": True,
        "total_size": out.total_size(),
        "per_part": out.size_per_part(),
        "verify_ok": verdict.ok,
        "verify_checks": verdict.checks,
    }


def _scn_appendix_invariants(G: PartiteGraph, params: dict, seed: int) -> dict:
    tiling = maximal_mixed_tiling(G, seed=seed)
    report = check_appendix_invariants(G, tiling)
    return {
        "maximal": report.maximal,
        "vacuous": report.vacuous,
        "violations": len(report.violations),
        "copies_checked": report.copies_checked,
        "leftover_per_part": tiling.leftover_per_part,
    }


def _scn_threshold_sweep(G: PartiteGraph, params: dict, seed: int) -> dict:
    # instance already carries its keep-probability; measure the
    # degree floor, the exact factor decision, and the greedy leftover
    cap = params.get("cap", 12)
    tiling, _stats = exact_transversal_factor_search(
        G, cap=None if cap is None else int(cap)
    )
    greedy = _greedy_by_pattern(G)
    return {
        "delta_star": delta_star(G),
        "exists": tiling is not None,
        "greedy_leftover": greedy.leftover_per_part,
    }


_SCENARIO_FN: dict[str, Callable[[PartiteGraph, dict, int], dict]] = {
    "hole_scan": _scn_hole_scan,
    "greedy_tiling": _scn_greedy_tiling,
    "factor_decision": _scn_factor_decision,
    "absorber_census": _scn_absorber_census,
    "absorbing_pipeline": _scn_absorbing_pipeline,
    "appendix_invariants": _scn_appendix_invariants,
    "threshold_sweep": _scn_threshold_sweep,
}


def _worklist(config: ExperimentConfig) -> list[tuple[int, dict, dict]]:
    """(index, instance descriptor, extra metrics) triples, pre-seeded."""
    if config.scenario == "threshold_sweep":
        assert isinstance(config.gen, GenSpec)
        grid = [float(p) for p in config.params["p_grid"]]
        per_p = int(config.params.get("seeds_per_p", 1))
        out = []
        for pi, p in enumerate(grid):
            for si in range(per_p):
                index = pi * per_p + si
                desc = {
                    "family": "random_subgraph",
                    "pattern": config.gen.pattern.to_json_dict(),
                    "n": config.gen.n,
                    "seed": subseed(config.seed, "instance", index),
                    "params": {"p": p},
                }
                out.append((index, desc, {"p": p}))
        return out
    count = int(config.params.get("instances", 1))
    out = []
    for index in range(count):
        if isinstance(config.gen, str):
            desc: dict = {"path": config.gen}
        else:
            desc = config.gen.to_json_dict()
            desc["seed"] = subseed(config.seed, "instance", index)
        out.append((index, desc, {}))
    return out


def run(config: ExperimentConfig) -> list[ResultRecord]:
    """Execute the scenario; one record per instance, failures recorded.

    Raises ValueError only for configuration problems; anything an
    individual instance throws lands in that instance's metrics.
    """
    fn = _SCENARIO_FN[config.scenario]
    chash = config.config_hash()
    work = _worklist(config)

    def one(item: tuple[int, dict, dict]) -> ResultRecord:
        index, desc, extra = item
        started = time.perf_counter()
        try:
            G = _load_instance(desc)
            metrics = {**extra, **fn(G, config.params, subseed(config.seed, "run", index))}
        except (ValueError, KeyError, OSError, RecursionError) as exc:
            metrics = {**extra, "failed": True, "error": str(exc)}
        return ResultRecord(
            config_hash=chash,
            scenario=config.scenario,
            index=index,
            instance=desc,
            metrics=metrics,
            wall_ms=(time.perf_counter() - started) * 1000.0,
        )

    workers = int(os.environ.get("LAB_THREADS", "0") or "0")
    if workers <= 0:
        workers = min(8, os.cpu_count() or 1)
    if workers == 1 or len(work) == 1:
        records = [one(item) for item in work]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, work))
    records.sort(key=lambda r: r.index)
    if config.out_csv:
        write_csv(records, config.out_csv)
    if config.out_json:
        write_json(records, config.out_json)
    return records


# -- serialization ---------------------------------------------------------------


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(records: Sequence[ResultRecord]) -> str:
    if not records:
        raise ValueError("no records to serialize")
    scenario = records[0].scenario
    if any(r.scenario != scenario for r in records):
        raise ValueError("records mix scenarios")
    columns = METRIC_COLUMNS[scenario]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["config_hash", "scenario", "index", "instance", *columns, "failed", "error"]
    )
    for r in records:
        writer.writerow(
            [
                r.config_hash,
                r.scenario,
                r.index,
                canonical_json(r.instance),
                *(_csv_cell(r.metrics.get(c)) for c in columns),
                _csv_cell(bool(r.metrics.get("failed", False))),
                _csv_cell(r.metrics.get("error", "")),
            ]
        )
    return buf.getvalue()


def write_csv(records: Sequence[ResultRecord], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render_csv(records))


def render_json(records: Sequence[ResultRecord]) -> str:
    if not records:
        raise ValueError("no records to serialize")
    body = {
        "artifact_version": ARTIFACT_VERSION,
        "config_hash": records[0].config_hash,
        "scenario": records[0].scenario,
        "records": [r.to_json_dict() for r in records],
    }
    return canonical_json(body) + "\n"


def write_json(records: Sequence[ResultRecord], path: str) -> None:
    with open(path, "w") as fh:
        fh.write(render_json(records))


def load_records(path: str) -> list[ResultRecord]:
    with open(path) as fh:
        body = json.load(fh)
    return [ResultRecord.from_json_dict(d) for d in body["records"]]


# -- plotting --------------------------------------------------------------------


def _first_numeric_column(scenario: str, records: Sequence[ResultRecord]) -> str:
    for col in METRIC_COLUMNS[scenario]:
        for r in records:
            v = r.metrics.get(col)
            if isinstance(v, (bool, int, float)):
                return col
    raise ValueError("records carry no numeric metric to plot")


def emit_plot(records: Sequence[ResultRecord], kind: str, path: str) -> str:
    """Render records to a self-contained SVG file; returns the path."""
    if not records:
        raise ValueError("no records to plot")
    scenario = records[0].scenario
    if any(r.scenario != scenario for r in records):
        raise ValueError("records mix scenarios")
    if kind not in ("line", "heatmap"):
        raise ValueError(f"unknown plot kind {kind!r}")
    if kind == "line":
        if scenario == "threshold_sweep":
            by_p: dict[float, list[bool]] = {}
            for r in records:
                if r.failed:
                    continue
                by_p.setdefault(float(r.metrics["p"]), []).append(
                    bool(r.metrics["exists"])
                )
            if not by_p:
                raise ValueError("records carry no numeric metric to plot")
            points = [
                (p, sum(flags) / len(flags)) for p, flags in sorted(by_p.items())
            ]
            svg = line_plot(points, "keep probability p", "factor rate", scenario)
        else:
            col = _first_numeric_column(scenario, records)
            points = [
                (r.index, float(r.metrics[col]))
                for r in records
                if isinstance(r.metrics.get(col), (bool, int, float))
            ]
            svg = line_plot(points, "instance", col, scenario)
    else:
        if scenario == "threshold_sweep":
            ps = sorted({float(r.metrics["p"]) for r in records if not r.failed})
            per_p: dict[float, list[float]] = {p: [] for p in ps}
            for r in records:
                if not r.failed:
                    per_p[float(r.metrics["p"])].append(float(r.metrics["exists"]))
            if not ps:
                raise ValueError("records carry no numeric metric to plot")
            width = max(len(v) for v in per_p.values())
            grid = [v + [0.0] * (width - len(v)) for _, v in sorted(per_p.items())]
            svg = heatmap(
                grid,
                "seed slot",
                "keep probability p",
                y_ticks=[f"{p:g}" for p in ps],
                title=scenario,
            )
        else:
            cols = [
                c
                for c in METRIC_COLUMNS[scenario]
                if any(isinstance(r.metrics.get(c), (bool, int, float)) for r in records)
            ]
            if not cols:
                raise ValueError("records carry no numeric metric to plot")
            grid = [
                [float(r.metrics.get(c) or 0) for c in cols] for r in records
            ]
            svg = heatmap(
                grid,
                "metric",
                "instance",
                x_ticks=cols,
                y_ticks=[str(r.index) for r in records],
                title=scenario,
            )
    with open(path, "w") as fh:
        fh.write(svg)
    return path


# -- CLI ------------------------------------------------------------------------


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            data = json.load(fh)
        config = ExperimentConfig.from_json_dict(
            data, base_dir=os.path.dirname(os.path.abspath(args.config))
        )
    except (OSError, ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    records = run(config)
    failures = sum(1 for r in records if r.failed)
    print(
        f"{config.scenario}: {len(records)} instances, {failures} failed, "
        f"hash {config.config_hash()[:12]}"
    )
    for target in (config.out_csv, config.out_json):
        if target:
            print(f"wrote {target}")
    return 2 if failures else 0


def _cmd_plot(args) -> int:
    try:
        records = load_records(args.results)
        emit_plot(records, args.kind, args.out)
    except (OSError, ValueError, KeyError) as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


def _cmd_verify(args) -> int:
    try:
        with open(args.graph) as fh:
            G = PartiteGraph.from_json_dict(json.load(fh))
    except (OSError, ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.what == "holes":
            report = alpha_star_exact(G, 2, cap=args.cap)
            print(f"holes: alpha_star_2 = {report.alpha} ({report.method})")
        elif args.what == "factor":
            tiling, stats = exact_transversal_factor_search(G, cap=args.cap)
            verdict = "exists" if tiling is not None else "none (proof)"
            print(f"factor: {verdict}, {stats.nodes} nodes")
        else:
            target = [(p, 0) for p in range(1, G.k + 1)]
            a = find_absorber(G, target, connector_t=1)
            if a is None:
                print("absorber: none found for the lowest-index target")
            else:
                print(f"absorber: found, {len(a.verts)} vertices (t={a.t})")
    except ValueError as exc:
        print(f"verify failed: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lab", description="Batch experiments over blow-up instances."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario config")
    p_run.add_argument("config", help="experiment config JSON")
    p_run.set_defaults(fn=_cmd_run)

    p_plot = sub.add_parser("plot", help="render a results file to SVG")
    p_plot.add_argument("results", help="results JSON written by `lab run`")
    p_plot.add_argument("--kind", choices=("line", "heatmap"), default="line")
    p_plot.add_argument("--out", required=True, help="output SVG path")
    p_plot.set_defaults(fn=_cmd_plot)

    p_verify = sub.add_parser("verify", help="one-off checks on a graph file")
    p_verify.add_argument("graph", help="graph JSON file")
    p_verify.add_argument(
        "--what", choices=("holes", "factor", "absorber"), default="factor"
    )
    p_verify.add_argument("--cap", type=int, default=12)
    p_verify.set_defaults(fn=_cmd_verify)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
