"""
Discrete-event simulation of a deployed holistic plan over many runs.

Every device has three computation units (processor, accelerator, radio),
each with a FIFO queue of ready task instances.  A radio transfer occupies
the sender's and the receiver's radio together, from one start to one
finish.

.. autosummary::

    ~Event
    ~EventQueue
    ~simulate
    ~Simulator
    ~SimMode
    ~SimReport
    ~validate_trace
    ~write_trace
"""

import collections
import enum
import heapq
import json
import logging
import pathlib
import typing

from .cost_model import _device_map
from .cost_model import task_cost
from .operations.device import ComputationUnitKind
from .operations.misc import NS_PER_S
from .operations.misc import DeadlockDetected
from .operations.misc import InvalidWindow
from .operations.misc import SimulatorError
from .operations.misc import TraceViolation
from .operations.plan import TaskKind

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 4
"""Most runs of one pipeline in flight at once (inter-run mode)."""

TRACE_FIELDS = "pipeline run task_index kind device unit start_ns end_ns".split()


class SimMode(enum.Enum):
    """How task instances of different pipelines and runs may overlap."""

    SEQUENTIAL = "sequential"
    INTER_PIPELINE = "inter-pipeline"
    INTER_RUN = "inter-run"


class Event(typing.NamedTuple):
    """
    Completion of a job.  Events order by time, then run, pipeline id, job.
    """

    time_ns: int
    run: int
    pipeline: str
    job: int


class EventQueue:
    """Events in simulated-time order."""

    def __init__(self):
        self._event_queue = []

    def __len__(self) -> int:
        return len(self._event_queue)

    def add_event(self, event: Event):
        heapq.heappush(self._event_queue, event)

    def next(self) -> Event:
        return heapq.heappop(self._event_queue)

    def peek(self) -> typing.Optional[Event]:
        return self._event_queue[0] if self._event_queue else None


class _Job(typing.NamedTuple):
    # a task, or a Tx with its Rx; units in the same order as tasks
    tasks: tuple
    units: tuple
    latency_ns: int
    preds: tuple


def _jobs(plan, devices) -> list:
    job_of, jobs = {}, []
    tasks = plan.tasks
    for i, (task, preds) in enumerate(zip(tasks, plan.predecessors)):
        if task.kind == TaskKind.RX:
            job_of[i] = job_of[i - 1]
            continue
        cost = task_cost(task, plan, devices)
        members, units = [i], [(task.device, cost.unit.value)]
        if task.kind == TaskKind.TX:
            members.append(i + 1)
            units.append((tasks[i + 1].device, ComputationUnitKind.RADIO.value))
        job_of[i] = len(jobs)
        jobs.append(_Job(tuple(members), tuple(units), cost.latency_ns, tuple(sorted({job_of[p] for p in preds}))))
    return jobs


class SimReport(typing.NamedTuple):
    """
    Outcome of a simulation.

    .. rubric:: Fields

    * ``completions``: finish time (ns) of every run, by pipeline id
    * ``makespan_ns``: first start to last finish of runs ``warmup..runs-1``
    * ``throughput``: completions per second after warmup, all pipelines together
    * ``utilization``: busy fraction of the makespan, by ``(device, unit)``
    * ``trace``: one record per task instance (or ``None``)
    * ``predecessors``: within-run predecessors, by pipeline id
    """

    mode: SimMode
    runs: int
    warmup: int
    window: int
    completions: dict
    makespan_ns: int
    throughput: float
    utilization: dict
    trace: typing.Optional[list]
    predecessors: dict

    @property
    def makespan(self) -> float:
        """Makespan, seconds."""
        return self.makespan_ns / NS_PER_S


class Simulator:
    """
    Simulate ``runs`` executions of every pipeline of a holistic plan.

    .. rubric:: Parameters

    * ``holistic`` (HolisticPlan): Plan to deploy.
    * ``devices`` ([DeviceProfile]): Devices of the plan.
    * ``mode`` (str or SimMode): ``sequential`` (default), ``inter-pipeline``
      or ``inter-run``.
    * ``runs`` (int): Runs of every pipeline.
    * ``warmup`` (int): Leading runs excluded from the measurements.
    * ``window`` (int): Most runs of one pipeline in flight (inter-run).
    * ``trace`` (bool): Record every task instance.

    Sequential mode runs the pipelines back to back in plan order, run
    after run.  Inter-pipeline mode lets pipelines overlap while each one
    finishes a run before starting the next.  Inter-run mode starts the
    next run's sensing as soon as the previous sensing finished; an
    instance also waits for the same task of the previous run, so runs of
    one pipeline never overtake each other on a task.

    Events at the same time are handled in (run, pipeline id, task) order.
    Throughput counts the completions of runs ``warmup..runs-1`` of every
    pipeline over the time from the last warmup completion to the last
    completion.
    """

    def __init__(
        self, holistic, devices, mode=SimMode.SEQUENTIAL, runs=1, warmup=0, window=DEFAULT_WINDOW, trace=True
    ):
        if not (isinstance(runs, int) and isinstance(warmup, int) and runs > warmup >= 0):
            raise InvalidWindow(f"Need runs > warmup >= 0, received {runs=}, {warmup=}.")
        if not (isinstance(window, int) and window >= 1):
            raise InvalidWindow(f"In-flight window must be >= 1, received {window=}.")
        if len(holistic) == 0:
            raise SimulatorError("Cannot simulate an empty holistic plan.")
        devices = _device_map(devices)
        self.holistic = holistic
        self.mode = SimMode(mode)
        self.runs = runs
        self.warmup = warmup
        self.window = window
        self.record = trace
        self.plans = list(holistic)
        self.index = {plan.pipeline_id: p for p, plan in enumerate(self.plans)}
        self.id_order = [self.index[pid] for pid in sorted(self.index)]
        self.jobs = [_jobs(plan, devices) for plan in self.plans]
        self.successors = []
        for jobs in self.jobs:
            after = [[] for _ in jobs]
            for j, job in enumerate(jobs):
                for q in job.preds:
                    after[q].append(j)
            self.successors.append(after)
        self.units = sorted({u for jobs in self.jobs for job in jobs for u in job.units})

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(mode={self.mode.value!r}, runs={self.runs}, warmup={self.warmup})"

    def _complete(self, p, r) -> bool:
        return (p, r, len(self.jobs[p]) - 1) in self.finish

    def _may_start(self, p, r) -> bool:
        if self.mode == SimMode.SEQUENTIAL:
            k = r * len(self.plans) + p
            if k == 0:
                return True
            previous_run, previous_pipeline = divmod(k - 1, len(self.plans))
            return self._complete(previous_pipeline, previous_run)
        if self.mode == SimMode.INTER_PIPELINE:
            return r == 0 or self._complete(p, r - 1)
        return r < self.window or self._complete(p, r - self.window)

    def _try_release(self, p, r, j) -> bool:
        key = (p, r, j)
        if r >= self.runs or key in self.released:
            return False
        if any((p, r, q) not in self.finish for q in self.jobs[p][j].preds):
            return False
        if self.mode == SimMode.INTER_RUN and r > 0 and (p, r - 1, j) not in self.finish:
            return False
        if j == 0 and not self._may_start(p, r):
            return False
        self.released.add(key)
        self.sequence[key] = len(self.sequence)
        for unit in self.jobs[p][j].units:
            self.queues[unit].append(key)
        return True

    def _release_starts(self):
        for p in self.id_order:
            while self._try_release(p, self.next_run[p], 0):
                self.next_run[p] += 1

    def _dispatch(self, now):
        progress = True
        while progress:
            progress = False
            for unit in self.units:
                queue = self.queues[unit]
                if self.busy[unit] or len(queue) == 0:
                    continue
                key = queue[0]
                p, r, j = key
                job = self.jobs[p][j]
                if all(not self.busy[u] and self.queues[u][0] == key for u in job.units):
                    for u in job.units:
                        self.queues[u].popleft()
                        self.busy[u] = True
                    self.start[key] = now
                    self.events.add_event(Event(now + job.latency_ns, r, self.plans[p].pipeline_id, j))
                    progress = True

    def _finish(self, event):
        p, r, j = self.index[event.pipeline], event.run, event.job
        key = (p, r, j)
        job = self.jobs[p][j]
        self.finish[key] = event.time_ns
        for u in job.units:
            self.busy[u] = False
        plan = self.plans[p]
        for i, (device, unit) in zip(job.tasks, job.units):
            self.intervals[(device, unit)].append((r, self.start[key], event.time_ns))
            if self.record:
                self.trace.append(
                    {
                        "pipeline": plan.pipeline_id,
                        "run": r,
                        "task_index": i,
                        "kind": plan.tasks[i].kind.value,
                        "device": device,
                        "unit": unit,
                        "start_ns": self.start[key],
                        "end_ns": event.time_ns,
                        "seq": self.sequence[key],
                    }
                )

    def run(self) -> SimReport:
        """Simulate until every run of every pipeline has finished."""
        self.events = EventQueue()
        self.queues = {u: collections.deque() for u in self.units}
        self.busy = {u: False for u in self.units}
        self.intervals = {u: [] for u in self.units}
        self.released, self.sequence = set(), {}
        self.start, self.finish = {}, {}
        self.next_run = [0] * len(self.plans)
        self.trace = [] if self.record else None

        now = 0
        self._release_starts()
        self._dispatch(now)
        while len(self.events) > 0:
            now = self.events.peek().time_ns
            batch = []
            while len(self.events) > 0 and self.events.peek().time_ns == now:
                batch.append(self.events.next())
            for event in batch:
                self._finish(event)
            for event in batch:
                p, r, j = self.index[event.pipeline], event.run, event.job
                for k in self.successors[p][j]:
                    self._try_release(p, r, k)
                if self.mode == SimMode.INTER_RUN:
                    self._try_release(p, r + 1, j)
            self._release_starts()
            self._dispatch(now)

        pending = [
            (self.plans[p].pipeline_id, r)
            for p in range(len(self.plans))
            for r in range(self.runs)
            if not self._complete(p, r)
        ]
        if pending:
            raise DeadlockDetected(f"Runs never finished at t={now} ns: {pending[:5]!r}")
        return self._report()

    def _report(self) -> SimReport:
        W, R = self.warmup, self.runs
        completions = {}
        for p, plan in enumerate(self.plans):
            last = len(self.jobs[p]) - 1
            completions[plan.pipeline_id] = tuple(self.finish[(p, r, last)] for r in range(R))
        # measured from the moment every pipeline finished its warmup runs
        warmed_up = max(done[W - 1] for done in completions.values()) if W > 0 else 0
        last_completion = max(done[R - 1] for done in completions.values())
        elapsed = last_completion - warmed_up
        completed = (R - W) * len(self.plans)
        throughput = completed * NS_PER_S / elapsed if elapsed > 0 else 0.0

        measured = [(s, e) for spans in self.intervals.values() for r, s, e in spans if r >= W]
        begin = min(s for s, _ in measured)
        end = max(e for _, e in measured)
        makespan = end - begin
        utilization = {}
        for unit, spans in self.intervals.items():
            busy = sum(max(0, min(e, end) - max(s, begin)) for _, s, e in spans)
            utilization[unit] = busy / makespan if makespan > 0 else 0.0

        report = SimReport(
            self.mode,
            R,
            W,
            self.window,
            completions,
            makespan,
            throughput,
            utilization,
            self.trace,
            {plan.pipeline_id: plan.predecessors for plan in self.plans},
        )
        logger.debug("%r makespan=%d throughput=%r", self, makespan, throughput)
        return report


def simulate(holistic, devices, mode=SimMode.SEQUENTIAL, runs=1, warmup=0, window=DEFAULT_WINDOW, trace=True):
    """Simulate a holistic plan; see :class:`Simulator`."""
    return Simulator(holistic, devices, mode, runs, warmup, window, trace).run()


def validate_trace(report: SimReport) -> bool:
    """
    Check a recorded trace.

    No unit runs two instances at once, every instance starts after its
    within-run predecessors finished, and every unit starts instances in
    the order they became ready.  Raises :class:`TraceViolation` naming
    the first offending record.
    """
    if report.trace is None:
        raise SimulatorError("Trace recording was disabled for this simulation.")
    for record in report.trace:
        if record["end_ns"] < record["start_ns"]:
            raise TraceViolation(record, "finishes before it starts")

    by_unit = collections.defaultdict(list)
    for record in report.trace:
        by_unit[(record["device"], record["unit"])].append(record)
    for records in by_unit.values():
        records.sort(key=lambda rec: (rec["start_ns"], rec["seq"]))
        for before, after in zip(records, records[1:]):
            if after["start_ns"] < before["end_ns"]:
                raise TraceViolation(after, f"overlaps {before!r} on the same unit")
            if after["seq"] < before["seq"]:
                raise TraceViolation(after, f"overtook {before!r} in the unit's queue")

    finished = {(rec["pipeline"], rec["run"], rec["task_index"]): rec["end_ns"] for rec in report.trace}
    for record in report.trace:
        for i in report.predecessors[record["pipeline"]][record["task_index"]]:
            end = finished.get((record["pipeline"], record["run"], i))
            if end is None or record["start_ns"] < end:
                raise TraceViolation(record, f"starts before predecessor task {i} finished")
    return True


def write_trace(report: SimReport, file):
    """Write the trace as JSON lines, one instance per line."""
    if report.trace is None:
        raise SimulatorError("Trace recording was disabled for this simulation.")
    path = pathlib.Path(file)
    with open(path, "w", newline="\n") as f:
        for record in report.trace:
            f.write(json.dumps({k: record[k] for k in TRACE_FIELDS}) + "\n")
