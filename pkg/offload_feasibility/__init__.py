# __init__.py

from .model import (
    CloudResource,
    ComputeJob,
    InfeasibleError,
    NetworkHop,
    NetworkPath,
    OffloadDecision,
    OffloadError,
    PacketTrain,
    Placement,
    Processor,
    TimeBreakdown,
    ValidationError,
    Violation,
    validate,
)
from .timing import completion_time_local, completion_time_remote, packetize, train_transfer_time
from .decision import best_placement, capacity, ccr, offload_favorable, rlr, rlr_threshold, sweep
from .catalog import PRESETS, get_processor, reference_deployment

__version__ = "0.1.0"

__all__ = [
    "CloudResource",
    "ComputeJob",
    "InfeasibleError",
    "NetworkHop",
    "NetworkPath",
    "OffloadDecision",
    "OffloadError",
    "PacketTrain",
    "Placement",
    "Processor",
    "TimeBreakdown",
    "ValidationError",
    "Violation",
    "validate",
    "completion_time_local",
    "completion_time_remote",
    "packetize",
    "train_transfer_time",
    "best_placement",
    "capacity",
    "ccr",
    "offload_favorable",
    "rlr",
    "rlr_threshold",
    "sweep",
    "PRESETS",
    "get_processor",
    "reference_deployment",
]
