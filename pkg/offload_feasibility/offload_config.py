# offload_config.py

import json
import os
import sys
from typing import Any, Dict, Mapping, Optional

disable_logs = False
use_polling_observer = False

DEFAULT_MTU_BITS = 12000.0  # 1500-byte Ethernet frame
DEFAULT_SWEEP_POINTS = 25
DEFAULT_TRIALS = 100
DEFAULT_SEED = 42
DEFAULT_WORKERS = 2
DEFAULT_DEBOUNCE_SECONDS = 2.0
DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8188

SETTINGS_FILENAME = "offload_settings.json"

# settings-file key -> (resolved name, module default)
SETTING_KEYS = {
    "mtuBits": ("mtu_bits", DEFAULT_MTU_BITS),
    "sweepPoints": ("sweep_points", DEFAULT_SWEEP_POINTS),
    "workers": ("workers", DEFAULT_WORKERS),
    "disableLogs": ("disable_logs", False),
    "usePollingObserver": ("use_polling_observer", False),
}


def offload_log(*args, **kwargs):
    if not disable_logs:
        kwargs.setdefault("file", sys.stderr)
        print(*args, **kwargs)


def default_settings_path() -> str:
    return os.path.join(os.getcwd(), SETTINGS_FILENAME)


def load_settings(path: Optional[str] = None) -> Dict[str, Any]:
    settings_path = path or default_settings_path()
    if os.path.exists(settings_path):
        try:
            with open(settings_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except Exception as e:
            offload_log(f"Error loading settings: {e}")
            return {}
        if not isinstance(data, dict):
            offload_log(f"Error loading settings: {settings_path} is not a JSON object")
            return {}
        return data
    return {}


def save_settings_to_file(settings: Mapping[str, Any], path: Optional[str] = None) -> bool:
    settings_path = path or default_settings_path()
    try:
        with open(settings_path, "w", encoding="utf-8") as f:
            json.dump(dict(settings), f, indent=4)
    except Exception as e:
        offload_log(f"Error saving settings: {e}")
        return False
    return True


def resolve_settings(
    cli_overrides: Optional[Mapping[str, Any]] = None,
    settings: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Any]:
    """Merge CLI flags over the settings file over module defaults."""
    cli_overrides = cli_overrides or {}
    settings = settings or {}
    resolved: Dict[str, Any] = {}
    for key, (name, default) in SETTING_KEYS.items():
        value = cli_overrides.get(name)
        if value is None:
            value = settings.get(key, default)
        resolved[name] = value
    resolved["mtu_bits"] = float(resolved["mtu_bits"])
    resolved["sweep_points"] = int(resolved["sweep_points"])
    resolved["workers"] = max(1, int(resolved["workers"]))
    resolved["disable_logs"] = bool(resolved["disable_logs"])
    resolved["use_polling_observer"] = bool(resolved["use_polling_observer"])
    return resolved


def apply_settings(resolved: Mapping[str, Any]) -> None:
    global disable_logs, use_polling_observer
    disable_logs = bool(resolved.get("disable_logs", disable_logs))
    use_polling_observer = bool(resolved.get("use_polling_observer", use_polling_observer))
