import queue
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .model import NetworkHop, NetworkPath
from .netsim import GapReport, compare_models, gap_summary
from .offload_config import DEFAULT_MTU_BITS, DEFAULT_WORKERS, offload_log
from .timing import packetize

EQUAL_RATE = "equal_rate"
SINGLE_PACKET = "single_packet"
HETEROGENEOUS = "heterogeneous"
TRIAL_KINDS = (EQUAL_RATE, SINGLE_PACKET, HETEROGENEOUS)

IDENTITY_RTOL = 1e-12
MIN_RATE_EXP, MAX_RATE_EXP = 3.0, 9.0  # rates drawn from 1e3..1e9 bits/sec

# -----------------------------------------------------------------------------
# Task/result payloads
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialTask:
    trial_index: int
    kind: str
    file_bits: float
    rates: Tuple[float, ...]
    mtu_bits: float = DEFAULT_MTU_BITS


@dataclass
class TrialResult:
    trial_index: int
    kind: str
    success: bool
    hop_count: int
    packet_count: int
    report: Optional[GapReport] = None
    expected_gap: Optional[float] = None
    identity_ok: Optional[bool] = None
    error: Optional[str] = None


# -----------------------------------------------------------------------------
# Trial generation
# -----------------------------------------------------------------------------


def _draw_rate(rng: np.random.Generator) -> float:
    return float(10.0 ** rng.uniform(MIN_RATE_EXP, MAX_RATE_EXP))


def build_trials(count: int, seed: int, mtu_bits: float = DEFAULT_MTU_BITS) -> List[TrialTask]:
    """Seeded model-vs-simulation cases, `count` of each kind.

    Equal-rate trains are whole multiples of the MTU, so the last packet is
    full size. Heterogeneous trains end with a partial packet.
    """
    if count < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    tasks: List[TrialTask] = []
    for _ in range(count):
        hops = int(rng.integers(1, 11))
        packets = int(rng.integers(2, 101))
        rate = _draw_rate(rng)
        tasks.append(TrialTask(len(tasks), EQUAL_RATE, packets * mtu_bits, (rate,) * hops, mtu_bits))

        hops = int(rng.integers(1, 11))
        size = float(rng.uniform(1.0, mtu_bits))
        rates = tuple(_draw_rate(rng) for _ in range(hops))
        tasks.append(TrialTask(len(tasks), SINGLE_PACKET, size, rates, mtu_bits))

        hops = int(rng.integers(1, 11))
        packets = int(rng.integers(2, 101))
        remainder = float(rng.uniform(1.0, mtu_bits))
        rates = tuple(_draw_rate(rng) for _ in range(hops))
        tasks.append(TrialTask(len(tasks), HETEROGENEOUS, (packets - 1) * mtu_bits + remainder, rates, mtu_bits))
    return tasks


def run_trial(task: TrialTask) -> TrialResult:
    path = NetworkPath(tuple(NetworkHop(rate) for rate in task.rates))
    train = packetize(task.file_bits, task.mtu_bits)
    report = compare_models(task.file_bits, path, task.mtu_bits)

    expected: Optional[float] = None
    identity_ok: Optional[bool] = None
    if task.kind == EQUAL_RATE:
        expected = train.last_packet_bits / task.rates[0]
        identity_ok = abs(report.gap - expected) <= IDENTITY_RTOL * report.closed_form
    elif task.kind == SINGLE_PACKET:
        expected = 0.0
        identity_ok = report.gap == 0.0

    return TrialResult(
        trial_index=task.trial_index,
        kind=task.kind,
        success=True,
        hop_count=len(task.rates),
        packet_count=train.packet_count,
        report=report,
        expected_gap=expected,
        identity_ok=identity_ok,
    )


# -----------------------------------------------------------------------------
# Worker loop
# -----------------------------------------------------------------------------


def _worker_loop(task_queue: queue.Queue, result_queue: queue.Queue, stop_event: threading.Event) -> None:
    while not stop_event.is_set():
        try:
            task: Optional[TrialTask] = task_queue.get(timeout=1.0)
        except queue.Empty:
            continue

        if task is None:
            break

        started = time.time()
        try:
            result_queue.put(run_trial(task))
        except Exception as exc:
            offload_log(f"TrialWorker: trial {task.trial_index} ({task.kind}) failed: {exc}")
            result_queue.put(
                TrialResult(
                    trial_index=task.trial_index,
                    kind=task.kind,
                    success=False,
                    hop_count=len(task.rates),
                    packet_count=0,
                    error=str(exc),
                )
            )
        finally:
            duration = (time.time() - started) * 1000
            offload_log(f"TrialWorker: processed trial {task.trial_index} in {duration:.1f}ms")


# -----------------------------------------------------------------------------
# Parent side manager
# -----------------------------------------------------------------------------


class TrialWorkerManager:
    """Runs model-vs-simulation trials on worker threads."""

    def __init__(self, num_workers: int = DEFAULT_WORKERS) -> None:
        self._num_workers = max(1, num_workers)
        self._task_queue: queue.Queue = queue.Queue()
        self._result_queue: queue.Queue = queue.Queue()
        self._threads: List[threading.Thread] = []
        self._stop_event = threading.Event()
        self._started = False

    # Lifecycle ----------------------------------------------------------------

    def start(self) -> None:
        if self._started:
            return
        self._started = True
        self._stop_event.clear()

        for i in range(self._num_workers):
            thread = threading.Thread(
                target=_worker_loop,
                args=(self._task_queue, self._result_queue, self._stop_event),
                name=f"OffloadTrialWorker-{i}",
                daemon=True,
            )
            thread.start()
            self._threads.append(thread)
        offload_log(f"TrialWorker: started with {len(self._threads)} worker threads.")

    def shutdown(self) -> None:
        if not self._started:
            return
        self._started = False
        self._stop_event.set()

        for _ in self._threads:
            self._task_queue.put(None)

        for thread in self._threads:
            thread.join(timeout=1.0)

        self._threads.clear()

    def __enter__(self) -> "TrialWorkerManager":
        self.start()
        return self

    def __exit__(self, *exc_info) -> None:
        self.shutdown()

    # Running ------------------------------------------------------------------

    def run(self, tasks: List[TrialTask]) -> List[TrialResult]:
        """Run every task and return results in trial order."""
        if not self._started:
            self.start()
        for task in tasks:
            self._task_queue.put(task)
        results = [self._result_queue.get() for _ in tasks]
        results.sort(key=lambda r: r.trial_index)
        return results


# -----------------------------------------------------------------------------
# Report
# -----------------------------------------------------------------------------


@dataclass
class ValidationReport:
    trials: int
    seed: int
    mtu_bits: float
    summaries: Dict[str, Dict[str, Any]]
    identity_failures: List[int]
    errors: List[str]
    observations: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.identity_failures and not self.errors

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "mtu_bits": self.mtu_bits,
            "passed": self.passed,
            "summaries": self.summaries,
            "identity_failures": list(self.identity_failures),
            "errors": list(self.errors),
            "heterogeneous_gaps": list(self.observations),
        }


def summarize(results: List[TrialResult], trials: int, seed: int, mtu_bits: float) -> ValidationReport:
    summaries: Dict[str, Dict[str, Any]] = {}
    for kind in TRIAL_KINDS:
        reports = [r.report for r in results if r.kind == kind and r.report is not None]
        summaries[kind] = gap_summary(reports)

    identity_failures = [r.trial_index for r in results if r.identity_ok is False]
    errors = [f"trial {r.trial_index}: {r.error}" for r in results if not r.success]
    observations = [
        {
            "trial": r.trial_index,
            "hops": r.hop_count,
            "packets": r.packet_count,
            "closed_form": r.report.closed_form,
            "simulated": r.report.simulated,
            "gap": r.report.gap,
        }
        for r in results
        if r.kind == HETEROGENEOUS and r.report is not None
    ]
    return ValidationReport(trials, seed, mtu_bits, summaries, identity_failures, errors, observations)


def run_validation(
    trials: int,
    seed: int,
    workers: int = DEFAULT_WORKERS,
    mtu_bits: float = DEFAULT_MTU_BITS,
) -> ValidationReport:
    tasks = build_trials(trials, seed, mtu_bits)
    with TrialWorkerManager(workers) as manager:
        results = manager.run(tasks)
    return summarize(results, trials, seed, mtu_bits)
