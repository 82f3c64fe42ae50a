import asyncio
import json

from aiohttp import test_utils

from offload_feasibility import server
from offload_feasibility.server import create_app, sanitize_json_data

TRACE = "job_id,app_name,job_size,bytes_written,bytes_read,exec_time_s\n1,namd2,8,125000,0,1\n2,namd2,8,0,0,0\n"


def run(scenario, app=None):
    async def wrapper():
        client = test_utils.TestClient(test_utils.TestServer(app if app is not None else create_app()))
        await client.start_server()
        try:
            return await scenario(client)
        finally:
            await client.close()

    return asyncio.run(wrapper())


def test_sanitize_json_data():
    data = {"a": float("inf"), "b": [float("nan"), 1.5, (2, "x")], "c": None, "d": object}
    clean = sanitize_json_data(data)
    assert clean["a"] is None
    assert clean["b"] == [None, 1.5, [2, "x"]]
    assert clean["c"] is None
    assert isinstance(clean["d"], str)


def test_presets_and_tables():
    async def scenario(client):
        presets = await client.get("/offload/presets")
        tables = await client.get("/offload/tables")
        return presets.status, await presets.json(), tables.status, await tables.json()

    presets_status, presets, tables_status, tables = run(scenario)
    assert presets_status == 200
    assert [p["key"] for p in presets["presets"]] == ["msp430", "a9", "celeron", "i3", "xeon"]
    assert tables_status == 200
    assert {row["ccr"]: row["rlr"] for row in tables["table1"]}[0.01] == 101


def test_decide_endpoint():
    body = {
        "local": "msp430",
        "remote": "celeron",
        "hops": [{"trans_rate": "1M"}],
        "job": {"intensity": 1.01e-3, "instructions": 1e9},
    }

    async def scenario(client):
        response = await client.post("/offload/decide", json=body)
        return response.status, await response.json()

    status, payload = run(scenario)
    assert status == 200
    assert payload["verdict"] == "OFFLOAD"
    assert payload["rlr"] == 401.875


def test_decide_rejects_bad_input():
    async def scenario(client):
        missing = await client.post("/offload/decide", json={"local": "msp430"})
        bad_rate = await client.post(
            "/offload/decide",
            json={"local": "msp430", "remote": "abc", "hops": [{"trans_rate": 1e6}], "job": {"instructions": 1e9}},
        )
        no_hops = await client.post(
            "/offload/decide",
            json={"local": "msp430", "remote": "celeron", "hops": [], "job": {"instructions": 1e9}},
        )
        not_json = await client.post("/offload/decide", data="nope")
        return missing.status, bad_rate.status, no_hops.status, not_json.status

    assert run(scenario) == (400, 400, 400, 400)


def test_capacity_endpoint():
    async def scenario(client):
        response = await client.post("/offload/capacity", json={"local": "msp430", "remote": "celeron", "bottleneck_rate": "1k"})
        return response.status, await response.json()

    status, payload = run(scenario)
    assert status == 200
    assert round(payload["capacity"], 7) == 6.23e-5


def test_trace_endpoint():
    async def scenario(client):
        ok = await client.post("/offload/trace?assumed_rate=1G&capacity=1e-2", data=TRACE)
        missing_rate = await client.post("/offload/trace", data=TRACE)
        return ok.status, await ok.json(), missing_rate.status

    status, payload, missing_status = run(scenario)
    assert status == 200
    assert payload["records"] == 1
    assert payload["apps"][0]["verdict"] == "all"
    assert payload["diagnostics"] == ["line 3: exec_time must be > 0"]
    assert missing_status == 400


def test_capacity_unexpected_failure_is_logged(monkeypatch, capsys):
    def explode(*args):
        raise RuntimeError("boom")

    monkeypatch.setattr(server, "capacity", explode)

    async def scenario(client):
        response = await client.post("/offload/capacity", json={"local": "msp430", "remote": "celeron", "bottleneck_rate": "1k"})
        return response.status, await response.text()

    assert run(scenario) == (500, "boom")
    assert "Error in /offload/capacity: boom" in capsys.readouterr().err


def test_settings_are_saved_and_merged(tmp_path):
    path = tmp_path / "offload_settings.json"
    path.write_text(json.dumps({"workers": 4}), encoding="utf-8")

    async def scenario(client):
        saved = await client.post("/offload/settings", json={"mtuBits": 8000})
        fetched = await client.get("/offload/settings")
        return saved.status, fetched.status, await fetched.json()

    saved_status, fetched_status, settings = run(scenario, create_app(settings_path=str(path)))
    assert saved_status == 200
    assert fetched_status == 200
    assert settings == {"workers": 4, "mtuBits": 8000}
    assert json.loads(path.read_text(encoding="utf-8")) == settings


def test_settings_reject_bad_values(tmp_path):
    path = tmp_path / "offload_settings.json"

    async def scenario(client):
        unknown = await client.post("/offload/settings", json={"colour": "red"})
        bad_mtu = await client.post("/offload/settings", json={"mtuBits": 0})
        not_a_number = await client.post("/offload/settings", json={"sweepPoints": "many"})
        return unknown.status, bad_mtu.status, not_a_number.status

    assert run(scenario, create_app(settings_path=str(path))) == (400, 400, 400)
    assert not path.exists()
