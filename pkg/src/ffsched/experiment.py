"""Wiring of kernel, plants, controllers and scheduler into one run.

A run couples three layers at exact integer-nanosecond instants. The kernel
decides who computes when; each control job latches its reference and plant
measurement at its release instant (time-triggered sampling), computes once
it gets the CPU, and actuates when it completes. Queueing delay therefore
reaches the control loop as genuine input-output latency: a backlogged task
keeps actuating on ever-staler samples, which is exactly how sustained
overload destabilizes a loop. The feedback scheduler runs as the
highest-priority task: on every invocation it measures the utilization of
the window just ended, picks a rescaling factor according to the configured
mode, and re-periods the control tasks.

Every invocation appends one trace record, stamped at the invocation instant
with the measurement, the factor, the periods just applied and both the
reference and actual positions. Runs with equal configuration and seed
produce byte-identical traces.
"""

from __future__ import annotations

import math
import os
import time
from collections import deque
from dataclasses import dataclass, field, replace
from statistics import fmean
from typing import Mapping

import numpy as np

from .control import (
    PidState,
    PlantState,
    ReferencePath,
    pid_compute,
    plant_step,
    reference_at,
    tracking_error,
)
from .errors import EmitError
from .rtsim import (
    ExecSchedule,
    Kernel,
    TaskKind,
    TaskSpec,
    TaskStats,
    measure_utilization,
    sample_execution_time,
)
from .scenario import SCHEDULER_TASK, ScenarioConfig
from .schedulers import FuzzyFeedbackScheduler, apply_periods, ideal_eta, open_loop_step

NS = 1_000_000_000


def _ns(seconds: float) -> int:
    return int(round(seconds * NS))


@dataclass(frozen=True)
class TraceRecord:
    """One feedback-scheduler invocation, stamped at its start instant."""

    t_s: float
    u_meas: float  # utilization measurement after clamping to [0, 1]
    u_raw: float  # the same measurement before clamping: the true demand estimate
    eta: float
    periods_s: tuple[float, float]  # control periods just applied (x axis, y axis)
    ref: tuple[float, float]
    act: tuple[float, float]
    err: float


@dataclass(frozen=True)
class RunSummary:
    mode: str
    seed: int
    horizon_s: float
    invocations: int
    mean_tracking_error: float
    max_tracking_error: float
    mean_utilization: float
    mean_utilization_final: float  # over invocations in the last simulated second
    final_periods_s: tuple[float, float]
    task_stats: Mapping[str, TaskStats]
    wall_clock_s: float = field(compare=False, default=0.0)


@dataclass(frozen=True)
class ExperimentResult:
    control_names: tuple[str, str]
    records: tuple[TraceRecord, ...]
    summary: RunSummary


def run_experiment(cfg: ScenarioConfig, seed: int) -> ExperimentResult:
    """Simulate one scenario to its horizon and return trace plus summary."""

    if seed < 0:
        raise ValueError("seed must be non-negative")
    started = time.perf_counter()

    ctrl = cfg.control_tasks()
    ctrl_names: tuple[str, str] = (ctrl[0].name, ctrl[1].name)
    axis_of = {ctrl_names[0]: 0, ctrl_names[1]: 1}
    load_names = [t.name for t in cfg.tasks if t.kind is TaskKind.LOAD]
    h_min_ns, h_max_ns = _ns(cfg.h_min_s), _ns(cfg.h_max_s)
    horizon_ns = _ns(cfg.horizon_s)

    specs = {t.name: _spec_of(t) for t in cfg.tasks}
    fs_spec = TaskSpec(
        name=SCHEDULER_TASK,
        kind=TaskKind.SCHEDULER,
        priority=1,
        period_ns=_ns(cfg.fs_period_s),
        exec_schedule=ExecSchedule.constant(_ns(cfg.fs_exec_s)),
    )

    # one private noise stream per user task, one more for the measurement
    exec_rngs = {
        t.name: np.random.default_rng(np.random.SeedSequence([seed, i]))
        for i, t in enumerate(cfg.tasks)
    }
    util_rng = np.random.default_rng(np.random.SeedSequence([seed, len(cfg.tasks)]))

    def exec_time_of(spec: TaskSpec, release_ns: int) -> int:
        mean = spec.exec_schedule.mean_at(release_ns)
        if spec.name == SCHEDULER_TASK:
            return mean  # the scheduler's own cost is fixed by assumption
        return sample_execution_time(mean, exec_rngs[spec.name], cfg.exec_std)

    path = ReferencePath(duration=cfg.ref_duration_s)
    plants = [PlantState(), PlantState()]
    plant_clock = [0, 0]
    pids = [PidState(gains=cfg.pid, period=t.period_s) for t in ctrl]
    pending_u: list[float] = [0.0, 0.0]
    latched: list[deque[tuple[float, float, float]]] = [deque(), deque()]
    prev_release: list[int | None] = [None, None]

    fuzzy = FuzzyFeedbackScheduler(target=cfg.target)
    records: list[TraceRecord] = []
    warmed_up = False  # the very first invocation only starts the first window

    def advance_plant(axis: int, t_ns: int) -> None:
        dt_ns = t_ns - plant_clock[axis]
        if dt_ns > 0:
            plants[axis] = plant_step(plants[axis], plants[axis].command, dt_ns / NS, cfg.plant)
        plant_clock[axis] = t_ns

    def schedule_step(t_inv_ns: int) -> None:
        nonlocal warmed_up
        if not warmed_up:
            warmed_up = True
            return
        window = kernel.window_snapshot(t_inv_ns)
        periods_now = {name: kernel.period_of(name) for name in specs}
        sample = measure_utilization(window, periods_now, util_rng, cfg.util_std)
        current = tuple(kernel.period_of(name) for name in ctrl_names)
        if cfg.mode == "fuzzy":
            eta = fuzzy.step(sample.value)
        elif cfg.mode == "open":
            eta = open_loop_step()
        else:
            true_means = tuple(float(specs[name].exec_schedule.mean_at(t_inv_ns)) for name in ctrl_names)
            u_others = sum(
                specs[name].exec_schedule.mean_at(t_inv_ns) / kernel.period_of(name)
                for name in load_names
            )
            eta = ideal_eta(true_means, tuple(float(h) for h in current), u_others, cfg.target)
        decision = apply_periods(eta, current, h_min_ns, h_max_ns)
        for name, h_ns in zip(ctrl_names, decision.periods_ns):
            kernel.set_period(name, h_ns)
        advance_plant(0, t_inv_ns)
        advance_plant(1, t_inv_ns)
        t_s = t_inv_ns / NS
        ref = reference_at(path, t_s)
        act = (plants[0].position, plants[1].position)
        records.append(
            TraceRecord(
                t_s=t_s,
                u_meas=sample.value,
                u_raw=sample.raw,
                eta=eta,
                periods_s=(decision.periods_ns[0] / NS, decision.periods_ns[1] / NS),
                ref=ref,
                act=act,
                err=tracking_error(act, ref),
            )
        )

    def on_release(name: str, release_ns: int) -> None:
        axis = axis_of.get(name)
        if axis is None:
            return
        advance_plant(axis, release_ns)
        if prev_release[axis] is None:
            spacing_ns = kernel.period_of(name)
        else:
            spacing_ns = release_ns - prev_release[axis]
        prev_release[axis] = release_ns
        ref = reference_at(path, release_ns / NS)[axis]
        latched[axis].append((ref, plants[axis].position, spacing_ns / NS))

    def on_start(name: str, release_ns: int, start_ns: int) -> None:
        if name == SCHEDULER_TASK:
            schedule_step(start_ns)
            return
        axis = axis_of.get(name)
        if axis is None:
            return
        # consume the sample latched at this job's release (queues are FIFO,
        # so under backlog the computation runs on proportionally stale data)
        ref, meas, spacing_s = latched[axis].popleft()
        u, pids[axis] = pid_compute(pids[axis].with_period(spacing_s), ref, meas)
        pending_u[axis] = u

    def on_finish(rec) -> None:
        axis = axis_of.get(rec.task)
        if axis is None:
            return
        advance_plant(axis, rec.finish_ns)
        plants[axis] = replace(plants[axis], command=pending_u[axis])

    kernel = Kernel(
        list(specs.values()) + [fs_spec],
        exec_time_of=exec_time_of,
        on_job_release=on_release,
        on_job_start=on_start,
        on_job_finish=on_finish,
    )
    kernel.run(horizon_ns)

    summary = summarize(
        records,
        cfg,
        seed,
        task_stats={name: kernel.stats(name) for name in [*specs, SCHEDULER_TASK]},
        wall_clock_s=time.perf_counter() - started,
    )
    return ExperimentResult(control_names=ctrl_names, records=tuple(records), summary=summary)


def _spec_of(task) -> TaskSpec:
    segments = []
    for start_s, end_s, mean_s in task.exec_segments:
        end_ns = ExecSchedule.FOREVER if math.isinf(end_s) else _ns(end_s)
        segments.append((_ns(start_s), end_ns, _ns(mean_s)))
    return TaskSpec(
        name=task.name,
        kind=task.kind,
        priority=task.priority,
        period_ns=_ns(task.period_s),
        exec_schedule=ExecSchedule(tuple(segments)),
    )


def summarize(
    records,
    cfg: ScenarioConfig,
    seed: int,
    task_stats: Mapping[str, TaskStats],
    wall_clock_s: float = 0.0,
) -> RunSummary:
    """Aggregate a run's records; invocations fall on a uniform grid, so the
    time-weighted tracking-error mean reduces to the plain mean over records."""

    if not records:
        raise ValueError("no scheduler invocations recorded; horizon too short")
    errs = [r.err for r in records]
    final_start = cfg.horizon_s - 1.0
    finals = [r.u_meas for r in records if r.t_s > final_start] or [records[-1].u_meas]
    return RunSummary(
        mode=cfg.mode,
        seed=seed,
        horizon_s=cfg.horizon_s,
        invocations=len(records),
        mean_tracking_error=fmean(errs),
        max_tracking_error=max(errs),
        mean_utilization=fmean(r.u_meas for r in records),
        mean_utilization_final=fmean(finals),
        final_periods_s=records[-1].periods_s,
        task_stats=dict(task_stats),
        wall_clock_s=wall_clock_s,
    )


def trace_header(control_names: tuple[str, str]) -> str:
    a, b = control_names
    return f"t,u_meas,u_raw,eta,h_{a},h_{b},x_ref,y_ref,x_act,y_act,err"


def format_trace_csv(result: ExperimentResult) -> str:
    lines = [trace_header(result.control_names)]
    for r in result.records:
        cells = (
            r.t_s,
            r.u_meas,
            r.u_raw,
            r.eta,
            r.periods_s[0],
            r.periods_s[1],
            r.ref[0],
            r.ref[1],
            r.act[0],
            r.act[1],
            r.err,
        )
        lines.append(",".join(repr(c) for c in cells))
    return "\n".join(lines) + "\n"


def format_summary(summary: RunSummary) -> str:
    lines = [
        f"mode = {summary.mode}",
        f"seed = {summary.seed}",
        f"horizon_s = {summary.horizon_s!r}",
        f"invocations = {summary.invocations}",
        f"mean_tracking_error = {summary.mean_tracking_error!r}",
        f"max_tracking_error = {summary.max_tracking_error!r}",
        f"mean_utilization = {summary.mean_utilization!r}",
        f"mean_utilization_final = {summary.mean_utilization_final!r}",
        f"final_period_x = {summary.final_periods_s[0]!r}",
        f"final_period_y = {summary.final_periods_s[1]!r}",
    ]
    for name in sorted(summary.task_stats):
        s = summary.task_stats[name]
        lines.append(
            f"{name}.released = {s.released}\n{name}.completed = {s.completed}\n"
            f"{name}.missed = {s.missed}\n{name}.preemptions = {s.preemptions}"
        )
    return "\n".join(lines) + "\n"


def emit_traces(out_dir: str, result: ExperimentResult) -> tuple[str, str]:
    """Write trace.csv and summary.txt under `out_dir`; returns their paths."""

    try:
        os.makedirs(out_dir, exist_ok=True)
        trace_path = os.path.join(out_dir, "trace.csv")
        summary_path = os.path.join(out_dir, "summary.txt")
        with open(trace_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_trace_csv(result))
        with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_summary(result.summary))
    except OSError as exc:
        raise EmitError(f"cannot write traces under {out_dir}: {exc}") from exc
    return trace_path, summary_path


def read_trace_csv(path: str) -> ExperimentResult:
    """Parse a trace.csv written by emit_traces back into records.

    The summary is not stored in the CSV, so the returned result carries the
    records and control names only; summary-dependent fields must be
    recomputed by the caller if needed.
    """

    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    header = lines[0].split(",")
    a, b = header[4].removeprefix("h_"), header[5].removeprefix("h_")
    records = []
    for line in lines[1:]:
        c = [float(x) for x in line.split(",")]
        records.append(
            TraceRecord(
                t_s=c[0],
                u_meas=c[1],
                u_raw=c[2],
                eta=c[3],
                periods_s=(c[4], c[5]),
                ref=(c[6], c[7]),
                act=(c[8], c[9]),
                err=c[10],
            )
        )
    dummy = RunSummary(
        mode="unknown",
        seed=-1,
        horizon_s=records[-1].t_s if records else 0.0,
        invocations=len(records),
        mean_tracking_error=float("nan"),
        max_tracking_error=float("nan"),
        mean_utilization=float("nan"),
        mean_utilization_final=float("nan"),
        final_periods_s=records[-1].periods_s if records else (0.0, 0.0),
        task_stats={},
    )
    return ExperimentResult(control_names=(a, b), records=tuple(records), summary=dummy)
