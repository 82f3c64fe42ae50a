import io
import math
from typing import Any, Dict, Optional

from aiohttp import web

from .decision import all_tables, capacity, explain_decision, table2_rows
from .model import CloudResource, ComputeJob, NetworkPath, OffloadError
from . import offload_config
from .offload_config import DEFAULT_HOST, DEFAULT_MTU_BITS, DEFAULT_PORT, offload_log
from .units import hop_from_mapping, parse_quantity, resolve_processor
from .workload import parse_trace, summarize_trace

MTU_KEY = web.AppKey("mtu_bits", float)
SETTINGS_PATH_KEY = web.AppKey("settings_path", str)
routes = web.RouteTableDef()


def sanitize_json_data(data):
    """Recursively sanitizes data to be JSON serializable."""
    if isinstance(data, dict):
        return {k: sanitize_json_data(v) for k, v in data.items()}
    elif isinstance(data, (list, tuple)):
        return [sanitize_json_data(item) for item in data]
    elif isinstance(data, float):
        if math.isnan(data) or math.isinf(data):
            return None
        return data
    elif isinstance(data, (int, str, bool, type(None))):
        return data
    else:
        return str(data)


def _bad_request(message: str) -> web.Response:
    return web.Response(status=400, text=message)


def _job_from_mapping(data: Dict[str, Any]) -> ComputeJob:
    if "intensity" in data:
        return ComputeJob.from_intensity(parse_quantity(data["intensity"]), parse_quantity(data.get("instructions", 1e9)))
    return ComputeJob(
        instructions=parse_quantity(data["instructions"]),
        input_bits=parse_quantity(data.get("input_bits", 0)),
        output_bits=parse_quantity(data.get("output_bits", 0)),
    )


async def _read_json(request: web.Request) -> Dict[str, Any]:
    try:
        data = await request.json()
    except ValueError:
        raise OffloadError("request body must be JSON") from None
    if not isinstance(data, dict):
        raise OffloadError("request body must be a JSON object")
    return data


@routes.get("/offload/presets")
async def get_presets(request: web.Request) -> web.Response:
    return web.json_response(sanitize_json_data({"presets": table2_rows()}))


@routes.get("/offload/tables")
async def get_tables(request: web.Request) -> web.Response:
    return web.json_response(sanitize_json_data(all_tables()))


@routes.post("/offload/decide")
async def post_decide(request: web.Request) -> web.Response:
    try:
        data = await _read_json(request)
        local = resolve_processor(data["local"], "local")
        remote = resolve_processor(data["remote"], "remote")
        hops = data.get("hops") or []
        path = NetworkPath(tuple(hop_from_mapping(h) for h in hops))
        job = _job_from_mapping(data["job"])
        mtu_bits = parse_quantity(data.get("mtu_bits", request.app[MTU_KEY]))
        resource = CloudResource(remote, path, int(data.get("tier_index", 1)))
        payload = explain_decision(job, local, resource, mtu_bits)
    except KeyError as exc:
        return _bad_request(f"missing field {exc}")
    except (OffloadError, TypeError, ValueError) as exc:
        return _bad_request(str(exc))
    except Exception as exc:
        offload_log(f"Error in /offload/decide: {exc}")
        return web.Response(status=500, text=str(exc))
    return web.json_response(sanitize_json_data(payload))


@routes.post("/offload/capacity")
async def post_capacity(request: web.Request) -> web.Response:
    try:
        data = await _read_json(request)
        local = resolve_processor(data["local"], "local")
        remote = resolve_processor(data["remote"], "remote")
        report = capacity(local, remote, parse_quantity(data["bottleneck_rate"]))
    except KeyError as exc:
        return _bad_request(f"missing field {exc}")
    except (OffloadError, TypeError, ValueError) as exc:
        return _bad_request(str(exc))
    except Exception as exc:
        offload_log(f"Error in /offload/capacity: {exc}")
        return web.Response(status=500, text=str(exc))
    return web.json_response(sanitize_json_data(report.to_dict()))


@routes.post("/offload/trace")
async def post_trace(request: web.Request) -> web.Response:
    query = request.rel_url.query
    try:
        if "assumed_rate" not in query:
            raise OffloadError("assumed_rate query parameter is required")
        assumed_rate = parse_quantity(query["assumed_rate"])
        capacity_value: Optional[float] = parse_quantity(query["capacity"]) if "capacity" in query else None
        text = await request.text()
        result = parse_trace(io.StringIO(text))
        if not result.records:
            raise OffloadError("no valid trace rows")
        payload = summarize_trace(result, assumed_rate, capacity_value)
    except OffloadError as exc:
        return _bad_request(str(exc))
    except Exception as exc:
        offload_log(f"Error in /offload/trace: {exc}")
        return web.Response(status=500, text=str(exc))
    return web.json_response(sanitize_json_data(payload))


@routes.get("/offload/settings")
async def get_settings(request: web.Request) -> web.Response:
    return web.json_response(offload_config.load_settings(request.app[SETTINGS_PATH_KEY]))


@routes.post("/offload/settings")
async def save_settings(request: web.Request) -> web.Response:
    try:
        data = await _read_json(request)
        unknown = sorted(set(data) - set(offload_config.SETTING_KEYS))
        if unknown:
            raise OffloadError(f"unknown settings: {', '.join(unknown)}")
        path = request.app[SETTINGS_PATH_KEY]
        merged = {**offload_config.load_settings(path), **data}
        resolved = offload_config.resolve_settings({}, merged)
        if resolved["mtu_bits"] <= 0 or resolved["sweep_points"] < 2:
            raise OffloadError("mtuBits must be > 0 and sweepPoints >= 2")
        if not offload_config.save_settings_to_file(merged, path):
            return web.Response(status=500, text="could not write settings")
    except (OffloadError, TypeError, ValueError) as exc:
        return _bad_request(str(exc))
    except Exception as exc:
        offload_log(f"Error in /offload/settings: {exc}")
        return web.Response(status=500, text=str(exc))
    return web.Response(text="Settings saved")


def create_app(mtu_bits: float = DEFAULT_MTU_BITS, settings_path: Optional[str] = None) -> web.Application:
    app = web.Application()
    app[MTU_KEY] = float(mtu_bits)
    app[SETTINGS_PATH_KEY] = settings_path or offload_config.default_settings_path()
    app.add_routes(routes)
    return app


def run_server(
    host: str = DEFAULT_HOST,
    port: int = DEFAULT_PORT,
    mtu_bits: float = DEFAULT_MTU_BITS,
    settings_path: Optional[str] = None,
) -> None:
    offload_log(f"OffloadServer: listening on http://{host}:{port}")
    web.run_app(create_app(mtu_bits, settings_path), host=host, port=port, print=None)
