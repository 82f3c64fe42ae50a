import json
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, TextIO, Tuple

import numpy as np
import simpy

from .model import NetworkPath, OffloadError
from .offload_config import DEFAULT_MTU_BITS
from .timing import packetize, train_transfer_time

ARRIVAL = "arrival"  # packet fully received at the node feeding a hop
DEPARTURE = "departure"  # last bit of the packet has crossed the hop
_KIND_ORDER = {ARRIVAL: 0, DEPARTURE: 1}


@dataclass(frozen=True)
class SimEvent:
    time: float
    kind: str
    packet_index: int
    hop_index: int

    def sort_key(self) -> Tuple[float, int, int, int]:
        return (self.time, self.hop_index, self.packet_index, _KIND_ORDER[self.kind])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "time": self.time,
            "kind": self.kind,
            "packet_index": self.packet_index,
            "hop_index": self.hop_index,
        }


@dataclass(frozen=True)
class SimResult:
    completion: float
    per_packet_arrivals: Tuple[float, ...]
    event_count: int
    delivered_bits: float
    events: Tuple[SimEvent, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "completion": self.completion,
            "per_packet_arrivals": list(self.per_packet_arrivals),
            "event_count": self.event_count,
            "delivered_bits": self.delivered_bits,
        }


@dataclass(frozen=True)
class GapReport:
    closed_form: float
    simulated: float
    gap: float  # closed_form - simulated

    def to_dict(self) -> Dict[str, Any]:
        return {"closed_form": self.closed_form, "simulated": self.simulated, "gap": self.gap}


class _TrainRun:
    """One store-and-forward run: a FIFO link per hop and a process per packet."""

    def __init__(self, path: NetworkPath, sizes: Sequence[float], record_events: bool) -> None:
        self.env = simpy.Environment()
        self.path = path
        self.sizes = list(sizes)
        self.links = [simpy.Resource(self.env, capacity=1) for _ in path.hops]
        self.arrivals: List[float] = [0.0] * len(self.sizes)
        self.record_events = record_events
        self.events: List[SimEvent] = []
        self.event_count = 0
        self.delivered_bits = 0.0

    def _note(self, kind: str, packet_index: int, hop_index: int) -> None:
        self.event_count += 1
        if self.record_events:
            self.events.append(SimEvent(self.env.now, kind, packet_index, hop_index))

    def _packet(self, packet_index: int, size: float):
        for hop_index, hop in enumerate(self.path.hops):
            self._note(ARRIVAL, packet_index, hop_index)
            if hop.queue_delay > 0:
                yield self.env.timeout(hop.queue_delay)
            with self.links[hop_index].request() as request:
                yield request
                yield self.env.timeout(size / hop.trans_rate)
            self._note(DEPARTURE, packet_index, hop_index)
        self.arrivals[packet_index] = self.env.now
        self.delivered_bits += size

    def run(self) -> SimResult:
        # processes are registered in packet order, so simultaneous link
        # requests are served first packet first
        for packet_index, size in enumerate(self.sizes):
            self.env.process(self._packet(packet_index, size))
        self.env.run()
        events = tuple(sorted(self.events, key=SimEvent.sort_key))
        return SimResult(
            completion=self.arrivals[-1],
            per_packet_arrivals=tuple(self.arrivals),
            event_count=self.event_count,
            delivered_bits=self.delivered_bits,
            events=events,
        )


def simulate_train(
    file_bits: float,
    path: NetworkPath,
    mtu_bits: float = DEFAULT_MTU_BITS,
    record_events: bool = False,
) -> SimResult:
    """Push a file's packet train through the path packet by packet.

    A packet starts on hop j+1 only once it has fully crossed hop j, waited
    hop j+1's queueing delay, and found the link free.
    """
    if file_bits <= 0:
        raise OffloadError("empty file")
    train = packetize(file_bits, mtu_bits)
    return _TrainRun(path, train.packet_sizes(), record_events).run()


def compare_models(file_bits: float, path: NetworkPath, mtu_bits: float = DEFAULT_MTU_BITS) -> GapReport:
    if file_bits <= 0:
        raise OffloadError("empty file")
    if any(hop.queue_delay != 0 for hop in path.hops):
        raise OffloadError("compare_models requires zero queue delay on every hop")
    closed_form = train_transfer_time(file_bits, path, mtu_bits)
    simulated = simulate_train(file_bits, path, mtu_bits).completion
    return GapReport(closed_form, simulated, closed_form - simulated)


def gap_summary(reports: Sequence[GapReport]) -> Dict[str, Any]:
    if not reports:
        return {"count": 0, "min": None, "mean": None, "max": None, "negative": 0}
    gaps = np.array([r.gap for r in reports], dtype=float)
    return {
        "count": int(gaps.size),
        "min": float(gaps.min()),
        "mean": float(gaps.mean()),
        "max": float(gaps.max()),
        "negative": int((gaps < 0).sum()),
    }


def write_event_trace(result: SimResult, stream: TextIO) -> int:
    """Dump recorded events as one JSON object per line; returns lines written."""
    for event in result.events:
        stream.write(json.dumps(event.to_dict(), separators=(",", ":")))
        stream.write("\n")
    return len(result.events)
