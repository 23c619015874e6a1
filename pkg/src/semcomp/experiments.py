"""Parameter sweeps over the allocation model, with CSV/JSON emission."""

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .errors import ValidationError
from .optimizer import (AllocationResult, solve, solve_simplified,
                        solve_traditional)
from .resource import LinkModel, OmissionProfile

ALGORITHMS = ("jccpg", "simplified", "traditional")
DEFAULT_Q = (0.3, 0.2, 0.1)
SWEEP_VARIABLES = ("m_total", "bandwidth", "latency_budget")
CSV_HEADER = ("var", "algo", "e_total_j", "e1_j", "e2_j", "p_w", "e_omit",
              "feasible")


@dataclass
class SweepSpec:
    variable: str
    grid: Sequence[float]
    link: LinkModel = field(default_factory=LinkModel)
    q: Sequence[float] = DEFAULT_Q
    m_total: int = 100
    algorithms: Sequence[str] = ALGORITHMS
    seed: int = 0

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValidationError("unknown sweep variable %r (expected one of %s)"
                                  % (self.variable, ", ".join(SWEEP_VARIABLES)))
        if not self.grid:
            raise ValidationError("sweep grid must be non-empty")
        if any(b >= a for a, b in zip(self.grid[1:], self.grid)):
            raise ValidationError("sweep grid must be strictly increasing")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValidationError("unknown algorithms: %s" % sorted(unknown))


@dataclass
class SweepRow:
    value: float
    results: Dict[str, AllocationResult]


def _point(spec: SweepSpec, value) -> SweepRow:
    link = spec.link
    m = spec.m_total
    if spec.variable == "m_total":
        m = int(value)
    elif spec.variable == "bandwidth":
        link = dataclasses.replace(link, bandwidth_hz=float(value))
    else:
        link = dataclasses.replace(link, latency_budget_s=float(value))
    profile = OmissionProfile(m, spec.q)

    results = {}
    for algo in spec.algorithms:
        if algo == "jccpg":
            results[algo] = solve(link, profile, m)
        elif algo == "simplified":
            results[algo] = solve_simplified(link, profile, m)
        else:
            results[algo] = solve_traditional(link, m)
    return SweepRow(value=value, results=results)


def run_sweep(spec: SweepSpec) -> List[SweepRow]:
    """Evaluate every algorithm at every grid point, in grid order."""
    return [_point(spec, value) for value in spec.grid]


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_csv(rows: List[SweepRow], path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            for algo, result in row.results.items():
                if result.feasible:
                    writer.writerow([_fmt(row.value), algo,
                                     _fmt(result.e_total), _fmt(result.e1),
                                     _fmt(result.e2), _fmt(result.p_opt),
                                     result.e_opt, "true"])
                else:
                    writer.writerow([_fmt(row.value), algo,
                                     "", "", "", "", "", "false"])


def emit_plotdata(rows: List[SweepRow], path):
    """x/y series JSON keyed by algorithm; infeasible points become null."""
    algos = list(rows[0].results) if rows else []
    series = {}
    for algo in algos:
        ys = []
        for row in rows:
            result = row.results[algo]
            ys.append(result.e_total if result.feasible else None)
        series[algo] = ys
    payload = {"x": [float(r.value) for r in rows], "series": series}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def spec_from_config(cfg: dict, variable: str, grid: Sequence[float],
                     algorithms: Optional[Sequence[str]] = None) -> SweepSpec:
    link = LinkModel.from_config(cfg)
    kwargs = {}
    if "q" in cfg:
        kwargs["q"] = [float(v) for v in cfg["q"]]
    if "m_total" in cfg:
        kwargs["m_total"] = int(cfg["m_total"])
    if algorithms:
        kwargs["algorithms"] = tuple(algorithms)
    if "seed" in cfg:
        kwargs["seed"] = int(cfg["seed"])
    return SweepSpec(variable=variable, grid=list(grid), link=link, **kwargs)
