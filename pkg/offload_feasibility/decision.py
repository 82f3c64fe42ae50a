import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .catalog import LOCAL_PRESETS, PRESETS, REMOTE_PRESETS
from .model import (
    ComputeJob,
    CloudResource,
    InfeasibleError,
    NetworkPath,
    OffloadDecision,
    OffloadError,
    Placement,
    Processor,
)
from .offload_config import DEFAULT_MTU_BITS, DEFAULT_SWEEP_POINTS
from .timing import completion_time_local, completion_time_remote, compute_time, end_to_end_packet_time, transfer_components

TABLE1_CCR_VALUES = (1e-6, 1e-3, 0.01, 0.1, 1.0, 1e3, 1e6)
SWEEP_AXES = ("rate", "remote", "intensity")


@dataclass(frozen=True)
class CapacityReport:
    capacity: float  # bits/instruction the offloading system can absorb
    bottleneck_rate: float
    local_rate: float
    remote_rate: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "capacity": self.capacity,
            "bottleneck_rate": self.bottleneck_rate,
            "local_rate": self.local_rate,
            "remote_rate": self.remote_rate,
        }


@dataclass(frozen=True)
class HopOverhead:
    value: float  # sec

    def __post_init__(self) -> None:
        if not self.value >= 0:
            raise OffloadError("hop overhead must be >= 0")


# Ratios ------------------------------------------------------------------------------


def ccr(compute_time: float, comm_time: float) -> float:
    """Computing-to-communication ratio."""
    if comm_time == 0:
        raise OffloadError("infinite CCR")
    if compute_time <= 0 or comm_time < 0:
        raise OffloadError("compute_time and comm_time must be > 0")
    return compute_time / comm_time


def rlr(remote: Processor, local: Processor) -> float:
    """Remote-to-local execution rate ratio."""
    return remote.exec_rate / local.exec_rate


def rlr_threshold(ccr_value: float) -> float:
    """Smallest RLR (exclusive) that makes offloading pay off at this CCR."""
    if not ccr_value > 0:
        raise OffloadError("ccr must be > 0")
    return 1.0 / ccr_value + 1.0


def ccr_threshold(rlr_value: float) -> float:
    """Smallest CCR (exclusive) that makes offloading pay off at this RLR."""
    if not rlr_value > 1:
        raise InfeasibleError("remote not faster: no CCR suffices")
    return 1.0 / (rlr_value - 1.0)


# The favorability inequality in its three equivalent forms ---------------------------


def offload_favorable(
    job: ComputeJob,
    local: Processor,
    resource: CloudResource,
    mtu_bits: float = DEFAULT_MTU_BITS,
) -> OffloadDecision:
    """Compare C/e against the full remote completion time; ties stay local."""
    local_time = completion_time_local(job, local).total
    remote_time = completion_time_remote(job, resource, mtu_bits).total
    return OffloadDecision.compare(local_time, remote_time)


def _communication_time(job: ComputeJob, resource: CloudResource, mtu_bits: float) -> float:
    transfer, overhead = transfer_components(job.total_bits, resource.path, mtu_bits)
    return transfer + overhead


def ineq1_favorable(
    job: ComputeJob,
    local: Processor,
    resource: CloudResource,
    mtu_bits: float = DEFAULT_MTU_BITS,
) -> bool:
    """C(E/e - 1) > E(F/Gamma + H)."""
    e = local.exec_rate
    big_e = resource.processor.exec_rate
    comm = _communication_time(job, resource, mtu_bits)
    return job.instructions * (big_e / e - 1.0) > big_e * comm


def rlrccr_favorable(
    job: ComputeJob,
    local: Processor,
    resource: CloudResource,
    mtu_bits: float = DEFAULT_MTU_BITS,
) -> bool:
    """RLR > 1/CCR + 1, with CCR taken against the remote computation time."""
    ratio = rlr(resource.processor, local)
    comm = _communication_time(job, resource, mtu_bits)
    if comm == 0:
        return ratio > 1.0
    return ratio > rlr_threshold(ccr(compute_time(job, resource.processor), comm))


def hop_overhead(path: NetworkPath, mtu_bits: float = DEFAULT_MTU_BITS) -> HopOverhead:
    """H: the per-hop delay with the last packet pinned at a full MTU."""
    return HopOverhead(end_to_end_packet_time(mtu_bits, path))


# Capacity against inverse arithmetic intensity ---------------------------------------


def rate_delta(local: Processor, remote: Processor) -> float:
    """1/e - 1/E in seconds per instruction."""
    return 1.0 / local.exec_rate - 1.0 / remote.exec_rate


def capacity(local: Processor, remote: Processor, bottleneck_rate: float) -> CapacityReport:
    """Gamma(1/e - 1/E); negative when the remote is slower than the local device."""
    if not bottleneck_rate > 0:
        raise OffloadError("bottleneck_rate must be > 0")
    return CapacityReport(
        capacity=bottleneck_rate * rate_delta(local, remote),
        bottleneck_rate=bottleneck_rate,
        local_rate=local.exec_rate,
        remote_rate=remote.exec_rate,
    )


def inverse_intensity(job: ComputeJob) -> float:
    """F/C, bits moved over the network per instruction executed."""
    return job.total_bits / job.instructions


def simplified_favorable(job: ComputeJob, local: Processor, remote: Processor, bottleneck_rate: float) -> bool:
    return capacity(local, remote, bottleneck_rate).capacity > inverse_intensity(job)


def congested_capacity(
    local: Processor,
    remote: Processor,
    bottleneck_rate: float,
    overhead: HopOverhead,
    instructions: float,
) -> float:
    """Gamma(1/e - 1/E - H/C), the capacity before H is dropped."""
    return bottleneck_rate * (rate_delta(local, remote) - overhead.value / instructions)


def congested_favorable(
    job: ComputeJob,
    local: Processor,
    resource: CloudResource,
    mtu_bits: float = DEFAULT_MTU_BITS,
) -> bool:
    overhead = hop_overhead(resource.path, mtu_bits)
    lhs = congested_capacity(local, resource.processor, resource.path.bottleneck_rate, overhead, job.instructions)
    return lhs > inverse_intensity(job)


def required_bottleneck_rate(job: ComputeJob, local: Processor, remote: Processor) -> float:
    """Infimum bottleneck rate at which the simplified inequality holds."""
    delta = rate_delta(local, remote)
    if remote.exec_rate <= local.exec_rate or delta <= 0:
        raise InfeasibleError("remote not faster: no finite rate suffices")
    return inverse_intensity(job) / delta


def required_remote_rate(job: ComputeJob, local: Processor, bottleneck_rate: float) -> float:
    """Infimum remote execution rate at which the simplified inequality holds."""
    if not bottleneck_rate > 0:
        raise OffloadError("bottleneck_rate must be > 0")
    headroom = 1.0 / local.exec_rate - inverse_intensity(job) / bottleneck_rate
    if headroom <= 0:
        raise InfeasibleError("transfer alone exceeds local compute time")
    return 1.0 / headroom


# Tier selection ----------------------------------------------------------------------


def best_placement(
    job: ComputeJob,
    local: Processor,
    resources: Sequence[CloudResource],
    mtu_bits: float = DEFAULT_MTU_BITS,
) -> Placement:
    """Pick the fastest place to run the job; ties go local, then to the nearest tier."""
    best = Placement(None, completion_time_local(job, local))
    for resource in sorted(resources, key=lambda r: r.tier_index):
        breakdown = completion_time_remote(job, resource, mtu_bits)
        if breakdown.total < best.breakdown.total:
            best = Placement(resource.tier_index, breakdown)
    return best


def evaluate_placements(
    job: ComputeJob,
    local: Processor,
    resources: Sequence[CloudResource],
    mtu_bits: float = DEFAULT_MTU_BITS,
) -> List[Placement]:
    placements = [Placement(None, completion_time_local(job, local))]
    placements.extend(Placement(r.tier_index, completion_time_remote(job, r, mtu_bits)) for r in resources)
    return placements


# Sweeps ------------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    value: float
    capacity: float
    favorable: bool
    crossover: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "capacity": self.capacity,
            "favorable": self.favorable,
            "crossover": self.crossover,
        }


@dataclass
class SweepResult:
    axis: str
    rows: List[SweepRow]
    crossover: Optional[float]
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "axis": self.axis,
            "crossover": self.crossover,
            "rows": [row.to_dict() for row in self.rows],
        }


def log_grid(start: float, stop: float, points: int = DEFAULT_SWEEP_POINTS) -> List[float]:
    if not (start > 0 and stop > 0 and start < stop):
        raise OffloadError("sweep range must satisfy 0 < min < max")
    if points < 2:
        raise OffloadError("sweep needs at least 2 points")
    return [float(v) for v in np.logspace(math.log10(start), math.log10(stop), points)]


def sweep(
    axis: str,
    start: float,
    stop: float,
    local: Processor,
    remote: Optional[Processor] = None,
    bottleneck_rate: Optional[float] = None,
    intensity: Optional[float] = None,
    points: int = DEFAULT_SWEEP_POINTS,
) -> SweepResult:
    """Capacity and verdict over a log-spaced grid of one parameter.

    axis "rate" varies Gamma (needs remote, intensity); "remote" varies E
    (needs bottleneck_rate, intensity); "intensity" varies F/C against a fixed
    capacity (needs remote, bottleneck_rate).
    """
    grid = log_grid(start, stop, points)
    warnings: List[str] = []
    crossover: Optional[float] = None

    if axis == "rate":
        if remote is None or intensity is None:
            raise OffloadError("rate sweep needs a remote processor and an intensity")
        unit_job = ComputeJob.from_intensity(intensity, 1.0)
        try:
            crossover = required_bottleneck_rate(unit_job, local, remote)
        except InfeasibleError as exc:
            raise InfeasibleError(
                f"{exc}: remote {remote.exec_rate:g} IPS is not faster than local {local.exec_rate:g} IPS, "
                "so raising the bottleneck rate can never make offloading favorable"
            ) from None

        def row(value: float) -> Tuple[float, bool]:
            cap = capacity(local, remote, value).capacity
            return cap, cap > intensity

    elif axis == "remote":
        if bottleneck_rate is None or intensity is None:
            raise OffloadError("remote sweep needs a bottleneck rate and an intensity")
        unit_job = ComputeJob.from_intensity(intensity, 1.0)
        try:
            crossover = required_remote_rate(unit_job, local, bottleneck_rate)
        except InfeasibleError as exc:
            bound = bottleneck_rate / local.exec_rate
            warnings.append(f"{exc}: F/C {intensity:g} >= Gamma/e {bound:g}, no remote rate helps")

        def row(value: float) -> Tuple[float, bool]:
            cap = capacity(local, Processor("sweep", value), bottleneck_rate).capacity
            return cap, cap > intensity

    elif axis == "intensity":
        if remote is None or bottleneck_rate is None:
            raise OffloadError("intensity sweep needs a remote processor and a bottleneck rate")
        fixed = capacity(local, remote, bottleneck_rate).capacity
        if fixed > 0:
            crossover = fixed
        else:
            warnings.append(f"capacity {fixed:g} <= 0, no job benefits")

        def row(value: float) -> Tuple[float, bool]:
            return fixed, fixed > value

    else:
        raise OffloadError(f"unknown sweep axis '{axis}' (expected one of {', '.join(SWEEP_AXES)})")

    rows = []
    for value in grid:
        cap, verdict = row(value)
        rows.append(SweepRow(value, cap, verdict))
    if crossover is not None and grid[0] <= crossover <= grid[-1]:
        cap, verdict = row(crossover)
        rows.append(SweepRow(crossover, cap, verdict, crossover=True))
        rows.sort(key=lambda r: (r.value, r.crossover))
    elif crossover is not None:
        warnings.append(f"crossover {crossover:g} lies outside the swept range")
    return SweepResult(axis, rows, crossover, warnings)


# Reference tables --------------------------------------------------------------------


def table1_rows() -> List[Dict[str, Any]]:
    rows = []
    for value in TABLE1_CCR_VALUES:
        entry: Dict[str, Any] = {"ccr": value, "rlr": rlr_threshold(value)}
        if value == 1e-6:
            entry["note"] = "printed as approximately 1e6"
        rows.append(entry)
    return rows


def table2_rows() -> List[Dict[str, Any]]:
    return [{"key": key, "name": proc.name, "ips": proc.exec_rate} for key, proc in PRESETS.items()]


def _cross_table(metric) -> List[Dict[str, Any]]:
    cells = []
    for local_key in LOCAL_PRESETS:
        for remote_key in REMOTE_PRESETS:
            cells.append(
                {
                    "local": local_key,
                    "remote": remote_key,
                    "value": metric(PRESETS[local_key], PRESETS[remote_key]),
                }
            )
    return cells


# Significant figures each RLR cell is conventionally quoted at.
TABLE3_PRINTED_DIGITS: Dict[Tuple[str, str], int] = {
    ("msp430", "celeron"): 6,
    ("msp430", "i3"): 4,
    ("msp430", "xeon"): 5,
    ("a9", "celeron"): 6,
    ("a9", "i3"): 5,
    ("a9", "xeon"): 5,
}


def table3_cells() -> List[Dict[str, Any]]:
    cells = _cross_table(lambda local, remote: rlr(remote, local))
    for cell in cells:
        cell["printed_digits"] = TABLE3_PRINTED_DIGITS[(cell["local"], cell["remote"])]
    return cells


def table5_cells() -> List[Dict[str, Any]]:
    return _cross_table(rate_delta)


def all_tables() -> Dict[str, Any]:
    return {
        "table1": table1_rows(),
        "table2": table2_rows(),
        "table3": table3_cells(),
        "table5": table5_cells(),
    }


# Reporting ---------------------------------------------------------------------------


def explain_decision(
    job: ComputeJob,
    local: Processor,
    resource: CloudResource,
    mtu_bits: float = DEFAULT_MTU_BITS,
) -> Dict[str, Any]:
    """Verdict, both completion times and the RLR/CCR view of the same question."""
    local_breakdown = completion_time_local(job, local)
    remote_breakdown = completion_time_remote(job, resource, mtu_bits)
    decision = OffloadDecision.compare(local_breakdown.total, remote_breakdown.total)
    comm = remote_breakdown.transfer + remote_breakdown.per_hop_overhead
    ratio = rlr(resource.processor, local)
    if comm > 0:
        ccr_value: Optional[float] = ccr(remote_breakdown.compute, comm)
        threshold = rlr_threshold(ccr_value)
    else:
        ccr_value = None
        threshold = 1.0
    return {
        "verdict": "OFFLOAD" if decision.favorable else "LOCAL",
        "decision": decision.to_dict(),
        "local": local_breakdown.to_dict(),
        "remote": remote_breakdown.to_dict(),
        "ccr": ccr_value,
        "rlr": ratio,
        "rlr_threshold": threshold,
        "rlr_check": ratio > threshold,
        "inverse_intensity": inverse_intensity(job),
        "capacity": capacity(local, resource.processor, resource.path.bottleneck_rate).capacity,
    }
