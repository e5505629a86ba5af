"""Fixed-priority preemptive simulation of a small task set.

The kernel is a discrete-event simulator over integer nanoseconds: releases,
preemptions and completions all happen at exact integer instants, so runs are
reproducible bit for bit. Tasks release periodically starting at t = 0, queue
their own jobs FIFO (an overrunning job is never aborted; its successor waits),
and compete for one CPU by static priority. Period changes requested mid-flight
take effect at the task's next release.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from statistics import fmean
from typing import Callable, Iterable, Mapping, NamedTuple

import numpy as np


class TaskKind(enum.Enum):
    """What a task does in the co-simulation; the kernel itself ignores this."""

    CONTROL = "control"
    LOAD = "load"
    SCHEDULER = "scheduler"


@dataclass(frozen=True)
class ExecSchedule:
    """Piecewise-constant mean execution time over simulated time.

    Segments are (start_ns, end_ns, mean_ns), contiguous from t = 0. Releases
    past the final segment hold its value.
    """

    segments: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("execution schedule needs at least one segment")
        expected_start = 0
        for start, end, mean in self.segments:
            if start != expected_start:
                raise ValueError(f"execution segments must be contiguous from 0, got start {start}")
            if end <= start:
                raise ValueError(f"empty execution segment [{start}, {end})")
            if mean <= 0:
                raise ValueError("mean execution time must be positive")
            expected_start = end

    FOREVER = 2**63 - 1

    @classmethod
    def constant(cls, mean_ns: int) -> "ExecSchedule":
        return cls(((0, cls.FOREVER, int(mean_ns)),))

    def mean_at(self, t_ns: int) -> int:
        for start, end, mean in self.segments:
            if start <= t_ns < end:
                return mean
        return self.segments[-1][2]


@dataclass(frozen=True)
class TaskSpec:
    name: str
    kind: TaskKind
    priority: int  # lower number preempts higher
    period_ns: int
    exec_schedule: ExecSchedule

    def __post_init__(self):
        if not self.name:
            raise ValueError("task name must be non-empty")
        if self.period_ns <= 0:
            raise ValueError(f"task {self.name}: period must be positive")
        if self.priority <= 0:
            raise ValueError(f"task {self.name}: priority must be a positive integer")


@dataclass(frozen=True)
class JobRecord:
    """One completed job, as handed to the finish hook."""

    task: str
    index: int
    release_ns: int
    deadline_ns: int
    exec_ns: int
    start_ns: int
    finish_ns: int
    missed: bool


@dataclass(frozen=True)
class TaskStats:
    released: int
    completed: int
    missed: int
    preemptions: int


class Segment(NamedTuple):
    """A contiguous stretch of CPU given to one job (recorded on request)."""

    task: str
    index: int
    start_ns: int
    end_ns: int


@dataclass(frozen=True)
class WindowData:
    """Execution-time samples of the jobs released inside one sampling window."""

    end_ns: int
    samples: Mapping[str, tuple[int, ...]]


@dataclass(frozen=True)
class UtilizationSample:
    """A utilization measurement; `value` is `raw` clamped to the unit interval."""

    value: float
    raw: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"clamped utilization out of range: {self.value}")


def sample_execution_time(
    mean_ns: int,
    rng: np.random.Generator,
    rel_std: float,
    floor_frac: float = 0.01,
) -> int:
    """Draw one job's execution time around its mean.

    The draw is Gaussian with standard deviation `rel_std * mean_ns` and is
    floored at `floor_frac * mean_ns` so a job can never run backwards or for
    free. With `rel_std == 0` the mean is returned without consuming a draw,
    keeping noise-free runs aligned with the noisy stream layout.
    """

    if mean_ns <= 0:
        raise ValueError("mean execution time must be positive")
    if rel_std < 0:
        raise ValueError("rel_std must be non-negative")
    if rel_std == 0:
        return int(mean_ns)
    drawn = mean_ns * (1.0 + rel_std * float(rng.standard_normal()))
    floor = max(1, round(floor_frac * mean_ns))
    return max(int(round(drawn)), floor)


def measure_utilization(
    window: WindowData,
    periods_ns: Mapping[str, int],
    rng: np.random.Generator | None = None,
    noise_std: float = 0.0,
) -> UtilizationSample:
    """Estimate CPU utilization from one window of released jobs.

    Each task named in `periods_ns` contributes the mean sampled execution
    time of its window jobs divided by its current period; tasks absent from
    the mapping (e.g. the scheduler itself) are ignored. Measurement noise,
    when enabled, is additive Gaussian on the total before clamping to [0, 1].
    """

    total = 0.0
    for name, period_ns in periods_ns.items():
        if period_ns <= 0:
            raise ValueError(f"task {name}: period must be positive")
        samples = window.samples.get(name, ())
        if samples:
            total += fmean(samples) / period_ns
    raw = total
    if noise_std > 0:
        if rng is None:
            raise ValueError("noise_std > 0 requires an rng")
        raw += noise_std * float(rng.standard_normal())
    return UtilizationSample(value=min(1.0, max(0.0, raw)), raw=raw)


@dataclass
class _Job:
    index: int
    release_ns: int
    deadline_ns: int
    exec_ns: int
    remaining_ns: int
    started: bool = False
    start_ns: int = -1


@dataclass
class _TaskRuntime:
    spec: TaskSpec
    period_ns: int
    next_release_ns: int = 0
    queue: deque[_Job] = field(default_factory=deque)
    released: int = 0
    completed: int = 0
    missed: int = 0
    preemptions: int = 0
    pending_samples: list[tuple[int, int]] = field(default_factory=list)


ReleaseHook = Callable[[str, int], None]  # (task name, release_ns)
StartHook = Callable[[str, int, int], None]  # (task name, release_ns, start_ns)
FinishHook = Callable[[JobRecord], None]
ExecTimeFn = Callable[[TaskSpec, int], int]  # (spec, release_ns) -> exec_ns


class Kernel:
    """Single-CPU fixed-priority preemptive kernel.

    `exec_time_of` decides each job's execution time at its release (this is
    where callers inject sampling noise); the default uses the task's mean
    schedule unchanged. `on_job_release` fires at the release instant (the
    time-triggered point where a control job latches its inputs),
    `on_job_start` the first time a job gets the CPU, `on_job_finish` when it
    completes. A deadline equals the release plus the period in force at
    that release, and a miss is counted when the job completes after it.
    """

    def __init__(
        self,
        tasks: Iterable[TaskSpec],
        *,
        exec_time_of: ExecTimeFn | None = None,
        on_job_release: ReleaseHook | None = None,
        on_job_start: StartHook | None = None,
        on_job_finish: FinishHook | None = None,
        record_segments: bool = False,
    ):
        specs = list(tasks)
        if not specs:
            raise ValueError("kernel needs at least one task")
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            raise ValueError("task names must be unique")
        if len({s.priority for s in specs}) != len(specs):
            raise ValueError("task priorities must be unique")
        self._tasks = {s.name: _TaskRuntime(spec=s, period_ns=s.period_ns) for s in specs}
        self._by_priority = sorted(self._tasks.values(), key=lambda rt: rt.spec.priority)
        self._exec_time_of = exec_time_of or (lambda spec, release_ns: spec.exec_schedule.mean_at(release_ns))
        self._on_job_release = on_job_release
        self._on_job_start = on_job_start
        self._on_job_finish = on_job_finish
        self._record_segments = record_segments
        self.segments: list[Segment] = []
        self._running: _TaskRuntime | None = None
        self.now_ns = 0

    def period_of(self, name: str) -> int:
        return self._tasks[name].period_ns

    def set_period(self, name: str, period_ns: int) -> None:
        """Change a task's period, effective from its next release on."""
        if period_ns <= 0:
            raise ValueError(f"task {name}: period must be positive")
        self._tasks[name].period_ns = int(period_ns)

    def stats(self, name: str) -> TaskStats:
        rt = self._tasks[name]
        return TaskStats(rt.released, rt.completed, rt.missed, rt.preemptions)

    def window_snapshot(self, window_end_ns: int) -> WindowData:
        """Take (and clear) the execution samples of jobs released before `window_end_ns`.

        Jobs released at or after the boundary stay filed for the next window,
        so back-to-back snapshots partition the release timeline exactly.
        """

        samples: dict[str, tuple[int, ...]] = {}
        for rt in self._by_priority:
            taken = [c for r, c in rt.pending_samples if r < window_end_ns]
            rt.pending_samples = [(r, c) for r, c in rt.pending_samples if r >= window_end_ns]
            samples[rt.spec.name] = tuple(taken)
        return WindowData(end_ns=window_end_ns, samples=samples)

    def run(self, until_ns: int) -> None:
        """Advance simulated time to exactly `until_ns`.

        Releases falling on `until_ns` itself are queued (so a follow-up call
        resumes seamlessly) but get no CPU.
        """

        if until_ns < self.now_ns:
            raise ValueError("cannot run backwards")
        while True:
            self._drain_releases()
            if self.now_ns >= until_ns:
                return
            rt = self._pick_ready()
            if rt is None:
                self._running = None
                self.now_ns = min(self._next_release(), until_ns)
                continue
            job = rt.queue[0]
            prev = self._running
            if prev is not None and prev is not rt:
                head = prev.queue[0] if prev.queue else None
                if head is not None and head.started and head.remaining_ns > 0:
                    prev.preemptions += 1
            self._running = rt
            if not job.started:
                job.started = True
                job.start_ns = self.now_ns
                if self._on_job_start is not None:
                    self._on_job_start(rt.spec.name, job.release_ns, self.now_ns)
            slice_end = min(self.now_ns + job.remaining_ns, self._next_release(), until_ns)
            if self._record_segments and slice_end > self.now_ns:
                self._append_segment(rt.spec.name, job.index, self.now_ns, slice_end)
            job.remaining_ns -= slice_end - self.now_ns
            self.now_ns = slice_end
            if job.remaining_ns == 0:
                self._complete(rt, job)
                self._running = None

    def _drain_releases(self) -> None:
        for rt in self._by_priority:
            while rt.next_release_ns <= self.now_ns:
                self._release(rt, rt.next_release_ns)

    def _release(self, rt: _TaskRuntime, release_ns: int) -> None:
        period = rt.period_ns  # the period in force at release fixes deadline and successor
        exec_ns = int(self._exec_time_of(rt.spec, release_ns))
        if exec_ns <= 0:
            raise ValueError(f"task {rt.spec.name}: sampled execution time must be positive")
        rt.queue.append(
            _Job(
                index=rt.released,
                release_ns=release_ns,
                deadline_ns=release_ns + period,
                exec_ns=exec_ns,
                remaining_ns=exec_ns,
            )
        )
        rt.released += 1
        rt.pending_samples.append((release_ns, exec_ns))
        rt.next_release_ns = release_ns + period
        if self._on_job_release is not None:
            self._on_job_release(rt.spec.name, release_ns)

    def _pick_ready(self) -> _TaskRuntime | None:
        for rt in self._by_priority:
            if rt.queue:
                return rt
        return None

    def _next_release(self) -> int:
        return min(rt.next_release_ns for rt in self._by_priority)

    def _complete(self, rt: _TaskRuntime, job: _Job) -> None:
        rt.queue.popleft()
        rt.completed += 1
        missed = self.now_ns > job.deadline_ns
        if missed:
            rt.missed += 1
        if self._on_job_finish is not None:
            self._on_job_finish(
                JobRecord(
                    task=rt.spec.name,
                    index=job.index,
                    release_ns=job.release_ns,
                    deadline_ns=job.deadline_ns,
                    exec_ns=job.exec_ns,
                    start_ns=job.start_ns,
                    finish_ns=self.now_ns,
                    missed=missed,
                )
            )

    def _append_segment(self, task: str, index: int, start_ns: int, end_ns: int) -> None:
        if self.segments:
            last = self.segments[-1]
            if last.task == task and last.index == index and last.end_ns == start_ns:
                self.segments[-1] = last._replace(end_ns=end_ns)
                return
        self.segments.append(Segment(task, index, start_ns, end_ns))
