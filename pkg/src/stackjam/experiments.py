"""Replicated experiments and their CSV reports.

Every report has the fixed header ``config_param,config_value,metric,mean,sd,ci95,reps``.
Replication ``r`` of a plan with master seed ``s`` runs with seed ``s + r``;
from that seed two independent streams are derived, one for the random
placement (topology configs only) and one for the learning dynamics.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import power_game as pg
from .config import section
from .errors import ConfigError, OutputError, UnknownKindError
from .hla import LearningParams, Trajectory, hla_run, random_baseline_run
from .scenario import NetworkScenario, scenario_from_doc

HEADER = ("config_param", "config_value", "metric", "mean", "sd", "ci95", "reps")
Z95 = 1.96
NO_SWEEP = "none"

KINDS = ("channel-hla", "channel-random", "power-bayesian", "power-average", "sweep")
CHANNEL_PARAMS = ("N", "M", "P_j", "P_n")
POWER_PARAMS = ("epsilon", "user_cost", "jammer_cost", "noise_power", "user_power_max", "jammer_power_max")
CHANNEL_METRICS = ("ewaij", "rate", "sum_rate", "jammer_utility")
POWER_METRICS = ("rate", "user_utility", "jammer_utility", "user_power", "jammer_power")
DEFAULT_TAIL = 0.5


@dataclass(frozen=True)
class ExperimentPlan:
    kind: str
    sweep_param: str = NO_SWEEP
    sweep_values: tuple[float, ...] = (0.0,)
    reps: int = 1
    master_seed: int = 0
    out: str | None = None
    tail_fraction: float = DEFAULT_TAIL
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))
        if self.kind not in KINDS:
            raise UnknownKindError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if not self.sweep_values:
            raise ConfigError("sweep_values must be nonempty")
        if not 0 < self.tail_fraction <= 1:
            raise ConfigError("tail_fraction must lie in (0, 1]")
        if self.sweep_param != NO_SWEEP and self.sweep_param not in CHANNEL_PARAMS + POWER_PARAMS:
            raise UnknownKindError(f"unknown sweep parameter {self.sweep_param!r}")
        if self.family == "channel" and self.sweep_param in POWER_PARAMS:
            raise UnknownKindError(f"{self.sweep_param!r} is a power-game parameter")
        if self.family == "power" and self.sweep_param in CHANNEL_PARAMS:
            raise UnknownKindError(f"{self.sweep_param!r} is a channel-game parameter")

    @property
    def family(self) -> str:
        if self.kind.startswith("channel"):
            return "channel"
        if self.kind.startswith("power"):
            return "power"
        return "power" if self.sweep_param in POWER_PARAMS else "channel"

    @property
    def arms(self) -> tuple[str, ...]:
        if self.kind == "sweep":
            return ("hla", "random") if self.family == "channel" else ("bayesian", "average")
        return (self.kind.split("-", 1)[1],)

    @property
    def metrics(self) -> tuple[str, ...]:
        base = CHANNEL_METRICS if self.family == "channel" else POWER_METRICS
        if len(self.arms) == 1:
            return base
        return tuple(f"{arm}.{m}" for arm in self.arms for m in base)

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any], **overrides) -> "ExperimentPlan":
        sec = dict(section(doc, "experiment", required=False))
        values = dict(
            kind=sec.get("kind", "sweep"),
            sweep_param=sec.get("sweep_param", NO_SWEEP),
            sweep_values=tuple(float(v) for v in sec.get("sweep_values", (0.0,))),
            reps=int(sec.get("reps", 1)),
            master_seed=int(sec.get("seed", 0)),
            out=sec.get("out"),
            tail_fraction=float(sec.get("tail_fraction", DEFAULT_TAIL)),
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    sd: float
    ci95: float
    reps: int

    @classmethod
    def of(cls, samples: Sequence[float]) -> "SummaryStats":
        x = np.asarray(samples, dtype=float)
        n = x.size
        if n == 0:
            raise ValueError("no samples")
        if np.all(x == x[0]):
            # identical replications: report the value itself, not a rounded mean
            return cls(float(x[0]), 0.0, 0.0, n)
        sd = float(x.std(ddof=1))
        return cls(float(x.mean()), sd, Z95 * sd / math.sqrt(n), n)


# -- replications ------------------------------------------------------------

def derive_seeds(seed: int) -> tuple[int, int]:
    """(placement seed, learning seed) for one replication seed."""
    a, b = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    return int(a), int(b)


def channel_scenario(doc: Mapping[str, Any], param: str, value: float, seed: int) -> NetworkScenario:
    """Scenario for one sweep point; topology configs are re-placed with ``seed``."""
    net = dict(section(doc, "network"))
    if any(k in net for k in ("cross_gain", "jam_gain", "direct_gain")):
        if param in ("N", "M"):
            raise ConfigError(f"cannot sweep {param} on an explicit-gain scenario")
        sc = scenario_from_doc(doc)
    else:
        if param == "N":
            net["num_users"] = int(value)
        elif param == "M":
            net["num_channels"] = int(value)
        topo = dict(section(doc, "topology"))
        topo["seed"] = seed
        sc = scenario_from_doc({**doc, "network": net, "topology": topo})
    if param == "P_j":
        sc = sc.with_powers(jammer_power=value)
    elif param == "P_n":
        sc = sc.with_powers(user_power=value)
    return sc


def trajectory_metrics(traj: Trajectory, tail_fraction: float) -> dict[str, float]:
    """Means over the final ``tail_fraction`` of epochs."""
    sl = traj.tail(tail_fraction)
    return {
        "ewaij": float(traj.ewaij[sl].mean()),
        "rate": float(traj.mean_user_rate[sl].mean()),
        "sum_rate": float(traj.sum_rate[sl].mean()),
        "jammer_utility": float(traj.jammer_utility[sl].mean()),
    }


def run_channel_arm(arm: str, scenario: NetworkScenario, params: LearningParams, seed: int) -> Trajectory:
    if arm == "hla":
        return hla_run(scenario, params, seed)
    if arm == "random":
        return random_baseline_run(scenario, params.epochs * params.slots_per_epoch, seed, params)
    raise UnknownKindError(f"unknown channel arm {arm!r}")


def _channel_replication(job) -> dict[str, float]:
    doc, plan, value, rep = job
    place_seed, learn_seed = derive_seeds(plan.master_seed + rep)
    sc = channel_scenario(doc, plan.sweep_param, value, place_seed)
    params = LearningParams.from_doc(doc)
    out = {}
    for arm in plan.arms:
        metrics = trajectory_metrics(run_channel_arm(arm, sc, params, learn_seed), plan.tail_fraction)
        for name, v in metrics.items():
            out[name if len(plan.arms) == 1 else f"{arm}.{name}"] = v
    return out


def power_spec(doc: Mapping[str, Any], param: str, value: float) -> pg.PowerGameSpec:
    spec = pg.PowerGameSpec.from_doc(doc)
    if param == NO_SWEEP:
        return spec
    return replace(spec, **{param: float(value)})


def power_metrics(arm: str, spec: pg.PowerGameSpec) -> dict[str, float]:
    if arm == "bayesian":
        rep = pg.leader_optimize(spec)
    elif arm == "average":
        rep = pg.average_game_baseline(spec)
    else:
        raise UnknownKindError(f"unknown power arm {arm!r}")
    return {
        "rate": rep.rate,
        "user_utility": rep.user_utility,
        "jammer_utility": rep.jammer_utility,
        "user_power": rep.user_power,
        "jammer_power": rep.jammer_power,
    }


def _power_replication(job) -> dict[str, float]:
    doc, plan, value, _rep = job
    spec = power_spec(doc, plan.sweep_param, value)
    out = {}
    for arm in plan.arms:
        for name, v in power_metrics(arm, spec).items():
            out[name if len(plan.arms) == 1 else f"{arm}.{name}"] = v
    return out


# -- plans -------------------------------------------------------------------

def format_value(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def run_plan_rows(plan: ExperimentPlan, doc: Mapping[str, Any]) -> list[tuple]:
    """Rows in plan order: sweep value outer, metric inner."""
    worker = _channel_replication if plan.family == "channel" else _power_replication
    jobs = [(doc, plan, v, r) for v in plan.sweep_values for r in range(plan.reps)]
    if plan.jobs > 1:
        with ProcessPoolExecutor(plan.jobs) as pool:
            results = list(pool.map(worker, jobs))
    else:
        results = [worker(j) for j in jobs]

    rows = []
    for i, value in enumerate(plan.sweep_values):
        reps = results[i * plan.reps:(i + 1) * plan.reps]
        cfg_value = "-" if plan.sweep_param == NO_SWEEP else format_value(value)
        for metric in plan.metrics:
            st = SummaryStats.of([r[metric] for r in reps])
            rows.append((plan.sweep_param, cfg_value, metric, st.mean, st.sd, st.ci95, st.reps))
    return rows


def rows_to_csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for row in rows:
        writer.writerow([repr(float(c)) if isinstance(c, (float, np.floating)) else c for c in row])
    return buf.getvalue()


def run_plan(plan: ExperimentPlan, doc: Mapping[str, Any]) -> str:
    """Run every replication of ``plan`` and return the CSV document.

    Also writes it to ``plan.out`` when set.
    """
    text = rows_to_csv(run_plan_rows(plan, doc))
    if plan.out:
        write_text(plan.out, text)
    return text


def write_text(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


# -- reading reports back ----------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    config_param: str
    config_value: str
    metric: str
    mean: float
    sd: float
    ci95: float
    reps: int


def parse_csv(text: str) -> list[ReportRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != HEADER:
        raise ConfigError(f"not a report: header {header!r}")
    return [
        ReportRow(p, v, m, float(mean), float(sd), float(ci), int(n))
        for p, v, m, mean, sd, ci, n in reader
    ]


@dataclass(frozen=True)
class Improvement:
    config_param: str
    config_value: str
    improvement: float
    ci95: float


def compare(arm_a: str, arm_b: str, metric: str, metric_b: str | None = None) -> list[Improvement]:
    """Relative improvement ``(mean_a - mean_b) / mean_b`` per matching configuration.

    The half-width follows from first-order propagation of the two
    independent confidence half-widths through the ratio.
    """
    metric_b = metric_b or metric
    rows_b = {(r.config_param, r.config_value): r for r in parse_csv(arm_b) if r.metric == metric_b}
    out = []
    for ra in parse_csv(arm_a):
        if ra.metric != metric:
            continue
        rb = rows_b.get((ra.config_param, ra.config_value))
        if rb is None:
            continue
        ratio = ra.mean / rb.mean
        rel_a = ra.ci95 / ra.mean if ra.mean else 0.0
        rel_b = rb.ci95 / rb.mean
        half = abs(ratio) * math.hypot(rel_a, rel_b)
        out.append(Improvement(ra.config_param, ra.config_value, ratio - 1.0, half))
    return out


def improvements_to_csv(items: Sequence[Improvement]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("config_param", "config_value", "improvement", "ci95"))
    for it in items:
        writer.writerow((it.config_param, it.config_value, repr(it.improvement), repr(it.ci95)))
    return buf.getvalue()
