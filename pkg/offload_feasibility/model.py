import math
import numbers
from dataclasses import dataclass, fields
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Type, Union

# Canonical units throughout: instructions, bits, seconds, meters,
# bits/sec and instructions/sec. Human units are parsed by the CLI only.


class OffloadError(ValueError):
    """An operation was asked for something its inputs cannot provide."""


class InfeasibleError(OffloadError):
    """No parameter value can satisfy the requested condition."""


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


class ValidationError(OffloadError):
    def __init__(self, type_name: str, violations: List[Violation]) -> None:
        self.type_name = type_name
        self.violations = list(violations)
        details = "; ".join(v.message for v in self.violations)
        super().__init__(f"invalid {type_name}: {details}")


# Field checks ------------------------------------------------------------------------


def _real(value: Any) -> bool:
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _positive(values: Mapping[str, Any], name: str) -> List[Violation]:
    value = values.get(name)
    if not _real(value):
        return [Violation(name, f"{name} must be a number")]
    if not math.isfinite(value):
        return [Violation(name, f"{name} must be finite")]
    if value <= 0:
        return [Violation(name, f"{name} must be > 0")]
    return []


def _non_negative(values: Mapping[str, Any], name: str) -> List[Violation]:
    value = values.get(name)
    if not _real(value):
        return [Violation(name, f"{name} must be a number")]
    if not math.isfinite(value):
        return [Violation(name, f"{name} must be finite")]
    if value < 0:
        return [Violation(name, f"{name} must be >= 0")]
    return []


def _integer_at_least(values: Mapping[str, Any], name: str, minimum: int) -> List[Violation]:
    value = values.get(name)
    if not isinstance(value, numbers.Integral) or isinstance(value, bool):
        return [Violation(name, f"{name} must be an integer")]
    if value < minimum:
        return [Violation(name, f"{name} must be >= {minimum}")]
    return []


def _check_processor(values: Mapping[str, Any]) -> List[Violation]:
    violations = []
    if not isinstance(values.get("name"), str):
        violations.append(Violation("name", "name must be text"))
    violations.extend(_positive(values, "exec_rate"))
    return violations


def _check_hop(values: Mapping[str, Any]) -> List[Violation]:
    violations = _positive(values, "trans_rate")
    for name in ("queue_delay", "proc_delay", "length"):
        violations.extend(_non_negative(values, name))
    return violations


def _check_path(values: Mapping[str, Any]) -> List[Violation]:
    hops = values.get("hops")
    if not isinstance(hops, tuple) or not hops:
        return [Violation("hops", "path must have at least one hop")]
    violations = []
    for index, hop in enumerate(hops):
        if not isinstance(hop, NetworkHop):
            violations.append(Violation(f"hops[{index}]", "hop must be a NetworkHop"))
    return violations


def _check_job(values: Mapping[str, Any]) -> List[Violation]:
    violations = _positive(values, "instructions")
    violations.extend(_non_negative(values, "input_bits"))
    violations.extend(_non_negative(values, "output_bits"))
    return violations


def _check_train(values: Mapping[str, Any]) -> List[Violation]:
    violations = _positive(values, "full_packet_bits")
    violations.extend(_integer_at_least(values, "full_packet_count", 0))
    last = _positive(values, "last_packet_bits")
    violations.extend(last)
    if not last and not violations:
        if values["last_packet_bits"] > values["full_packet_bits"]:
            violations.append(Violation("last_packet_bits", "last_packet_bits must be <= full_packet_bits"))
    return violations


def _check_resource(values: Mapping[str, Any]) -> List[Violation]:
    violations = []
    if not isinstance(values.get("processor"), Processor):
        violations.append(Violation("processor", "processor must be a Processor"))
    if not isinstance(values.get("path"), NetworkPath):
        violations.append(Violation("path", "path must be a NetworkPath"))
    violations.extend(_integer_at_least(values, "tier_index", 1))
    return violations


def _check_breakdown(values: Mapping[str, Any]) -> List[Violation]:
    violations = []
    for name in ("compute", "transfer", "per_hop_overhead", "total"):
        violations.extend(_non_negative(values, name))
    if not violations:
        expected = values["compute"] + values["transfer"] + values["per_hop_overhead"]
        if values["total"] != expected:
            violations.append(Violation("total", "total must equal compute + transfer + per_hop_overhead"))
    return violations


def _check_decision(values: Mapping[str, Any]) -> List[Violation]:
    violations = _non_negative(values, "local_time")
    violations.extend(_non_negative(values, "remote_time"))
    margin = values.get("margin")
    if not _real(margin) or math.isnan(margin):
        violations.append(Violation("margin", "margin must be a number"))
    elif bool(values.get("favorable")) != bool(margin > 0):
        violations.append(Violation("favorable", "favorable must hold exactly when margin > 0"))
    return violations


# Domain types ------------------------------------------------------------------------


def _raise_if_invalid(entity: Any) -> None:
    violations = validate(entity)
    if violations:
        raise ValidationError(type(entity).__name__, violations)


@dataclass(frozen=True)
class Processor:
    name: str
    exec_rate: float  # instructions/sec

    def __post_init__(self) -> None:
        _raise_if_invalid(self)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "exec_rate": self.exec_rate}


@dataclass(frozen=True)
class NetworkHop:
    trans_rate: float  # gamma, bits/sec
    queue_delay: float = 0.0  # beta, sec
    proc_delay: float = 0.0  # alpha, sec
    length: float = 0.0  # l, meters

    def __post_init__(self) -> None:
        _raise_if_invalid(self)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trans_rate": self.trans_rate,
            "queue_delay": self.queue_delay,
            "proc_delay": self.proc_delay,
            "length": self.length,
        }


@dataclass(frozen=True)
class NetworkPath:
    hops: Tuple[NetworkHop, ...]

    def __post_init__(self) -> None:
        if isinstance(self.hops, list):
            object.__setattr__(self, "hops", tuple(self.hops))
        _raise_if_invalid(self)

    @classmethod
    def of(cls, *hops: NetworkHop) -> "NetworkPath":
        return cls(tuple(hops))

    @classmethod
    def uniform(cls, hop_count: int, trans_rate: float, queue_delay: float = 0.0) -> "NetworkPath":
        return cls(tuple(NetworkHop(trans_rate, queue_delay) for _ in range(hop_count)))

    @property
    def hop_count(self) -> int:
        return len(self.hops)

    @property
    def bottleneck_rate(self) -> float:
        return min(hop.trans_rate for hop in self.hops)

    @property
    def queue_delay_total(self) -> float:
        total = 0.0
        for hop in self.hops:
            total += hop.queue_delay
        return total

    def append(self, hop: NetworkHop) -> "NetworkPath":
        return NetworkPath(self.hops + (hop,))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hops": [hop.to_dict() for hop in self.hops],
            "hop_count": self.hop_count,
            "bottleneck_rate": self.bottleneck_rate,
        }


@dataclass(frozen=True)
class ComputeJob:
    instructions: float  # C
    input_bits: float = 0.0  # I
    output_bits: float = 0.0  # O

    def __post_init__(self) -> None:
        _raise_if_invalid(self)

    @classmethod
    def from_intensity(cls, bits_per_instruction: float, instructions: float) -> "ComputeJob":
        """Job with the given F/C, all of F counted as input."""
        return cls(instructions=instructions, input_bits=bits_per_instruction * instructions)

    @property
    def total_bits(self) -> float:
        return self.input_bits + self.output_bits

    def to_dict(self) -> Dict[str, Any]:
        return {
            "instructions": self.instructions,
            "input_bits": self.input_bits,
            "output_bits": self.output_bits,
            "total_bits": self.total_bits,
        }


@dataclass(frozen=True)
class PacketTrain:
    full_packet_bits: float  # S
    full_packet_count: int
    last_packet_bits: float  # N

    def __post_init__(self) -> None:
        _raise_if_invalid(self)

    @property
    def packet_count(self) -> int:
        return self.full_packet_count + 1

    @property
    def total_bits(self) -> float:
        return self.full_packet_count * self.full_packet_bits + self.last_packet_bits

    def packet_sizes(self) -> List[float]:
        return [self.full_packet_bits] * self.full_packet_count + [self.last_packet_bits]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "full_packet_bits": self.full_packet_bits,
            "full_packet_count": self.full_packet_count,
            "last_packet_bits": self.last_packet_bits,
        }


@dataclass(frozen=True)
class CloudResource:
    processor: Processor
    path: NetworkPath
    tier_index: int = 1  # 1 = nearest tier

    def __post_init__(self) -> None:
        _raise_if_invalid(self)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "processor": self.processor.to_dict(),
            "path": self.path.to_dict(),
            "tier_index": self.tier_index,
        }


@dataclass(frozen=True)
class TimeBreakdown:
    compute: float
    transfer: float
    per_hop_overhead: float
    total: float

    def __post_init__(self) -> None:
        _raise_if_invalid(self)

    @classmethod
    def of(cls, compute: float, transfer: float = 0.0, per_hop_overhead: float = 0.0) -> "TimeBreakdown":
        total = compute + transfer + per_hop_overhead
        if math.isinf(total):
            raise InfeasibleError("completion time overflows the floating-point range; rescale the inputs")
        return cls(compute, transfer, per_hop_overhead, total)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "compute": self.compute,
            "transfer": self.transfer,
            "per_hop_overhead": self.per_hop_overhead,
            "total": self.total,
        }


@dataclass(frozen=True)
class OffloadDecision:
    favorable: bool
    local_time: float
    remote_time: float
    margin: float  # local_time - remote_time

    def __post_init__(self) -> None:
        _raise_if_invalid(self)

    @classmethod
    def compare(cls, local_time: float, remote_time: float) -> "OffloadDecision":
        margin = local_time - remote_time
        return cls(bool(margin > 0), local_time, remote_time, margin)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "favorable": self.favorable,
            "local_time": self.local_time,
            "remote_time": self.remote_time,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class Placement:
    tier_index: Optional[int]  # None = run locally
    breakdown: TimeBreakdown

    @property
    def is_local(self) -> bool:
        return self.tier_index is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "placement": "local" if self.tier_index is None else self.tier_index,
            "breakdown": self.breakdown.to_dict(),
        }


_CHECKS: Dict[type, Callable[[Mapping[str, Any]], List[Violation]]] = {
    Processor: _check_processor,
    NetworkHop: _check_hop,
    NetworkPath: _check_path,
    ComputeJob: _check_job,
    PacketTrain: _check_train,
    CloudResource: _check_resource,
    TimeBreakdown: _check_breakdown,
    OffloadDecision: _check_decision,
}


def validate(entity: Union[Any, Type[Any]], values: Optional[Mapping[str, Any]] = None) -> List[Violation]:
    """Return every violated invariant; an empty list means ok.

    Accepts a constructed instance, or a domain type plus a mapping of raw
    field values to check before construction.
    """
    if isinstance(entity, type):
        kind = entity
        raw = dict(values or {})
    else:
        kind = type(entity)
        raw = {f.name: getattr(entity, f.name) for f in fields(entity)}
    check = _CHECKS.get(kind)
    if check is None:
        return [Violation("type", f"{kind.__name__} is not a validated domain type")]
    if kind is NetworkPath and isinstance(raw.get("hops"), list):
        raw["hops"] = tuple(raw["hops"])
    return check(raw)
