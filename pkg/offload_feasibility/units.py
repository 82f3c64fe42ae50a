import math
import re
from typing import Any, Mapping, Union

from .catalog import PRESETS, get_processor
from .model import NetworkHop, OffloadError, Processor

SI_SUFFIXES = {"": 1.0, "k": 1e3, "K": 1e3, "M": 1e6, "G": 1e9}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([kKMG]?)\s*$")


def parse_quantity(value: Union[str, float, int]) -> float:
    """Parse '16M', '6.43G', '1e3' or a plain number into canonical units."""
    if isinstance(value, bool):
        raise OffloadError(f"not a number: {value!r}")
    if isinstance(value, (int, float)):
        number = float(value)
    else:
        match = _QUANTITY.match(str(value))
        if not match:
            raise OffloadError(f"not a number: {value!r}")
        number = float(match.group(1)) * SI_SUFFIXES[match.group(2)]
    if not math.isfinite(number):
        raise OffloadError(f"not a finite number: {value!r}")
    return number


def resolve_processor(spec: Union[str, float, int], label: str = "custom") -> Processor:
    """A preset name (msp430, a9, celeron, i3, xeon) or an IPS rating."""
    if isinstance(spec, str) and spec.strip().lower() in PRESETS:
        return get_processor(spec)
    rate = parse_quantity(spec)
    return Processor(label, rate)


def parse_hop(spec: str) -> NetworkHop:
    """'rate[:queue_delay]', e.g. '1M' or '1M:0.005'."""
    rate_part, _, delay_part = str(spec).partition(":")
    rate = parse_quantity(rate_part)
    delay = parse_quantity(delay_part) if delay_part.strip() else 0.0
    return NetworkHop(rate, delay)


def hop_from_mapping(data: Mapping[str, Any]) -> NetworkHop:
    return NetworkHop(
        trans_rate=parse_quantity(data["trans_rate"]),
        queue_delay=float(data.get("queue_delay", 0.0)),
        proc_delay=float(data.get("proc_delay", 0.0)),
        length=float(data.get("length", 0.0)),
    )
