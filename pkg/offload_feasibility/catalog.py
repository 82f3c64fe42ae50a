from typing import Dict, List, Tuple

from .model import CloudResource, NetworkHop, NetworkPath, OffloadError, Processor

# Instructions-per-second ratings of handheld, laptop, desktop and server processors.
PRESETS: Dict[str, Processor] = {
    "msp430": Processor("MSP430", 16e6),
    "a9": Processor("A9", 3.6e9),
    "celeron": Processor("Celeron", 6.43e9),
    "i3": Processor("Core i3", 36.8e9),
    "xeon": Processor("Xeon", 136.2e9),
}

LOCAL_PRESETS: Tuple[str, ...] = ("msp430", "a9")
REMOTE_PRESETS: Tuple[str, ...] = ("celeron", "i3", "xeon")

TIER_NAMES: Dict[int, str] = {
    1: "plug computer",
    2: "server access point",
    3: "neighborhood rack",
    4: "ISP point-of-presence",
    5: "remote data center",
}

# (processor preset, execution-rate multiplier, hop count) per tier
_REFERENCE_TIERS: Tuple[Tuple[str, float, int], ...] = (
    ("a9", 2.0, 1),
    ("celeron", 4.0, 2),
    ("i3", 8.0, 3),
    ("xeon", 16.0, 5),
    ("xeon", 64.0, 8),
)


def preset_names() -> List[str]:
    return list(PRESETS.keys())


def get_processor(name: str) -> Processor:
    key = name.strip().lower()
    try:
        return PRESETS[key]
    except KeyError:
        known = ", ".join(PRESETS)
        raise OffloadError(f"unknown processor preset '{name}' (known: {known})") from None


def reference_deployment(
    access_rate: float = 1e6,
    core_rate: float = 1e9,
    queue_delay: float = 0.0,
) -> List[CloudResource]:
    """Five tiers from an in-room plug computer out to a remote data center.

    Each tier sits behind the client's access link plus a growing number of
    core hops, and runs a multi-core machine built from a catalog processor.
    """
    resources = []
    for tier_index, (preset, cores, hop_count) in enumerate(_REFERENCE_TIERS, start=1):
        base = PRESETS[preset]
        hops = [NetworkHop(access_rate, queue_delay)]
        hops.extend(NetworkHop(core_rate, queue_delay) for _ in range(hop_count - 1))
        processor = Processor(f"{TIER_NAMES[tier_index]} ({cores:g}x {base.name})", base.exec_rate * cores)
        resources.append(CloudResource(processor, NetworkPath(tuple(hops)), tier_index))
    return resources
