import math
from typing import Tuple

from .model import ComputeJob, CloudResource, NetworkHop, NetworkPath, OffloadError, PacketTrain, Processor, TimeBreakdown
from .offload_config import DEFAULT_MTU_BITS

SPEED_OF_LIGHT = 299_792_458.0  # m/s
PROPAGATION_SPEED = 2.0 * SPEED_OF_LIGHT / 3.0


# Computation time --------------------------------------------------------------------


def compute_time(job: ComputeJob, proc: Processor) -> float:
    """C/e on the local device, C/E on a cloud resource."""
    return job.instructions / proc.exec_rate


# Per-packet communication time -------------------------------------------------------


def single_packet_hop_time(packet_bits: float, hop: NetworkHop, include_minor: bool = False) -> float:
    """Time for one packet to cross one hop.

    With include_minor the full alpha + beta + S/gamma + l/(2c/3) sum is
    returned; otherwise processing and propagation are treated as negligible.
    """
    if packet_bits < 0:
        raise OffloadError("packet_bits must be >= 0")
    if include_minor:
        return hop.proc_delay + hop.queue_delay + packet_bits / hop.trans_rate + hop.length / PROPAGATION_SPEED
    return hop.queue_delay + packet_bits / hop.trans_rate


def end_to_end_packet_time(packet_bits: float, path: NetworkPath) -> float:
    total = 0.0
    for hop in path.hops:
        total += single_packet_hop_time(packet_bits, hop)
    return total


def full_path_packet_time(packet_bits: float, path: NetworkPath) -> float:
    """End-to-end single packet time keeping processing and propagation delays."""
    total = 0.0
    for hop in path.hops:
        total += single_packet_hop_time(packet_bits, hop, include_minor=True)
    return total


def path_propagation_time(path: NetworkPath) -> float:
    total = 0.0
    for hop in path.hops:
        total += hop.length / PROPAGATION_SPEED
    return total


# Packet trains -----------------------------------------------------------------------


def packetize(file_bits: float, mtu_bits: float = DEFAULT_MTU_BITS) -> PacketTrain:
    """Split a file into maximum-size packets followed by one remainder packet.

    An exact multiple of the MTU ends with a full-size packet.
    """
    if mtu_bits <= 0:
        raise OffloadError("mtu_bits must be > 0")
    if file_bits < 0:
        raise OffloadError("file_bits must be >= 0")
    if file_bits == 0:
        raise OffloadError("empty file")

    count = math.ceil(file_bits / mtu_bits) - 1
    last = file_bits - count * mtu_bits
    # float division can land one packet off near exact multiples
    if last <= 0:
        count -= 1
        last += mtu_bits
    elif last > mtu_bits:
        count += 1
        last -= mtu_bits
    return PacketTrain(full_packet_bits=mtu_bits, full_packet_count=int(count), last_packet_bits=last)


def transfer_components(file_bits: float, path: NetworkPath, mtu_bits: float = DEFAULT_MTU_BITS) -> Tuple[float, float]:
    """Return (bottleneck transfer, per-hop overhead) for moving a file.

    Trains pay F/min(gamma) plus sum(beta + N/gamma). A single-packet file has
    no bottleneck term, only sum(beta + F/gamma). An empty file still pays
    every hop's queueing delay.
    """
    if file_bits < 0:
        raise OffloadError("file_bits must be >= 0")
    if file_bits == 0:
        return 0.0, path.queue_delay_total

    train = packetize(file_bits, mtu_bits)
    if train.full_packet_count == 0:
        return 0.0, end_to_end_packet_time(file_bits, path)

    overhead = end_to_end_packet_time(train.last_packet_bits, path)
    return file_bits / path.bottleneck_rate, overhead


def train_transfer_time(file_bits: float, path: NetworkPath, mtu_bits: float = DEFAULT_MTU_BITS) -> float:
    transfer, overhead = transfer_components(file_bits, path, mtu_bits)
    return transfer + overhead


# Completion time ---------------------------------------------------------------------


def completion_time_local(job: ComputeJob, local: Processor) -> TimeBreakdown:
    return TimeBreakdown.of(compute_time(job, local))


def completion_time_remote(job: ComputeJob, resource: CloudResource, mtu_bits: float = DEFAULT_MTU_BITS) -> TimeBreakdown:
    transfer, overhead = transfer_components(job.total_bits, resource.path, mtu_bits)
    return TimeBreakdown.of(compute_time(job, resource.processor), transfer, overhead)
