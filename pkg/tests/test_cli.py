import json

import pytest

from offload_feasibility import offload_config
from offload_feasibility.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main

TRACE = (
    "job_id,app_name,job_size,bytes_written,bytes_read,exec_time_s\n"
    "1,namd2,64,125000,0,1000\n"
    "2,namd2,64,250000,125000,1000\n"
    "3,fvcom,32,0,1250000,10\n"
)


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    yield
    offload_config.disable_logs = False


def run_json(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


# decide ------------------------------------------------------------------------------


def test_decide_offloads_scientific_job(capsys):
    code, doc = run_json(capsys, "decide", "--local", "msp430", "--remote", "celeron", "--hop", "1M", "--intensity", "1.01e-3")
    assert code == EXIT_OK
    assert doc["command"] == "decide"
    assert doc["results"]["verdict"] == "OFFLOAD"
    assert doc["inputs"]["mtu_bits"] == 12000.0
    assert doc["inputs"]["local"]["exec_rate"] == 16e6


def test_decide_equal_processors_stay_local(capsys):
    code, doc = run_json(capsys, "decide", "--local", "a9", "--remote", "a9", "--hop", "1G", "-C", "1e9", "-i", "8")
    assert code == EXIT_OK
    assert doc["results"]["verdict"] == "LOCAL"


def test_decide_text_output_has_units(capsys):
    assert main(["decide", "--local", "msp430", "--remote", "6.43G", "--hop", "1M:0.001", "--hop", "1G", "-C", "1e9", "-i", "36k"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "verdict:        OFFLOAD" in out
    assert "local time:     62.5 s" in out
    assert "bits/instruction" in out


def test_decide_malformed_output_bits(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["decide", "--local", "msp430", "--remote", "celeron", "--hop", "1M", "-o", "abc"])
    assert excinfo.value.code == 2
    assert "-o/--output-bits" in capsys.readouterr().err


@pytest.mark.parametrize("flag, label", [("--input-bits=-5", "-i/--input-bits"), ("--output-bits=-1k", "-o/--output-bits")])
def test_decide_negative_bits_name_the_flag(capsys, flag, label):
    with pytest.raises(SystemExit) as excinfo:
        main(["decide", "--local", "msp430", "--remote", "celeron", "--hop", "1M", flag])
    assert excinfo.value.code == 2
    err = capsys.readouterr().err
    assert label in err
    assert "must be >= 0" in err


def test_decide_unknown_preset(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["decide", "--local", "pentium", "--remote", "celeron", "--hop", "1M"])
    assert excinfo.value.code == 2


def test_decide_needs_a_path(capsys):
    assert main(["decide", "--local", "msp430", "--remote", "celeron"]) == EXIT_USAGE
    assert "--hop" in capsys.readouterr().err


def test_decide_across_tiers(capsys):
    code, doc = run_json(capsys, "decide", "--local", "msp430", "--tiers", "-C", "1e11", "-i", "8M")
    assert code == EXIT_OK
    placement = doc["results"]["placement"]
    totals = [option["breakdown"]["total"] for option in placement["options"]]
    assert len(totals) == 6
    assert placement["best"]["breakdown"]["total"] == min(totals)


def test_mtu_override_is_echoed(capsys):
    _, doc = run_json(capsys, "decide", "--local", "msp430", "--remote", "celeron", "--hop", "1M", "-i", "36000", "--mtu-bits", "1500")
    assert doc["inputs"]["mtu_bits"] == 1500.0


def test_settings_file_supplies_defaults(tmp_path, capsys):
    (tmp_path / "offload_settings.json").write_text(json.dumps({"mtuBits": 8000}), encoding="utf-8")
    _, doc = run_json(capsys, "decide", "--local", "msp430", "--remote", "celeron", "--hop", "1M", "-i", "36000")
    assert doc["inputs"]["mtu_bits"] == 8000.0
    _, doc = run_json(capsys, "decide", "--local", "msp430", "--remote", "celeron", "--hop", "1M", "-i", "36000", "--mtu-bits", "4000")
    assert doc["inputs"]["mtu_bits"] == 4000.0


# sweep -------------------------------------------------------------------------------


def test_rate_sweep_endpoints(capsys):
    code, doc = run_json(
        capsys, "sweep", "--axis", "rate", "--min", "1k", "--max", "1M", "--local", "msp430", "--remote", "celeron", "--intensity", "1e-3"
    )
    assert code == EXIT_OK
    rows = doc["results"]["rows"]
    assert f"{rows[0]['capacity']:.2e}" == "6.23e-05"
    assert f"{rows[-1]['capacity']:.2e}" == "6.23e-02"


def test_rate_sweep_infeasible(capsys):
    code = main(["sweep", "--axis", "rate", "--min", "1k", "--max", "1M", "--local", "celeron", "--remote", "msp430", "--intensity", "1e-3"])
    assert code == EXIT_FAILED
    assert "remote not faster" in capsys.readouterr().err


def test_sweep_bad_range(capsys):
    code = main(["sweep", "--axis", "rate", "--min", "1M", "--max", "1k", "--local", "msp430", "--remote", "celeron", "--intensity", "1e-3"])
    assert code == EXIT_USAGE


def test_sweep_points_flag(capsys):
    _, doc = run_json(
        capsys, "sweep", "--axis", "intensity", "--min", "1e-3", "--max", "1", "--points", "5",
        "--local", "msp430", "--remote", "celeron", "--bottleneck-rate", "1k",
    )
    assert len(doc["results"]["rows"]) == 5
    assert doc["inputs"]["points"] == 5


# tables ------------------------------------------------------------------------------


def test_tables_text_at_printed_precision(capsys):
    assert main(["tables"]) == EXIT_OK
    out = capsys.readouterr().out
    for printed in ("401.875 (401.875)", "2300 (2300)", "8512.5 (8512.5)", "1.78611 (1.78611)", "10.222 (10.2222)", "37.833 (37.8333)"):
        assert printed in out
    assert "6.25e-8" in out
    assert "1000001" in out


def test_tables_json_matches_values(capsys):
    _, doc = run_json(capsys, "tables")
    table1 = {row["ccr"]: row["rlr"] for row in doc["results"]["table1"]}
    assert table1[0.01] == pytest.approx(101)


def test_presets(capsys):
    _, doc = run_json(capsys, "presets")
    assert {p["key"]: p["ips"] for p in doc["results"]["presets"]}["i3"] == 36.8e9


# trace -------------------------------------------------------------------------------


def test_trace_stats_and_verdicts(tmp_path, capsys):
    path = tmp_path / "jobs.csv"
    path.write_text(TRACE, encoding="utf-8")
    code, doc = run_json(capsys, "trace", str(path), "--assumed-rate", "1G", "--capacity", "6.23e-5")
    assert code == EXIT_OK
    apps = {app["app_name"]: app for app in doc["results"]["apps"]}
    # namd2: 1e6 and 3e6 bits over 1e12 instructions
    assert apps["namd2"]["min_fc"] == pytest.approx(1e-6)
    assert apps["namd2"]["avg_fc"] == pytest.approx(2e-6)
    assert apps["namd2"]["max_fc"] == pytest.approx(3e-6)
    assert apps["namd2"]["verdict"] == "all"
    # fvcom: 1e7 bits over 1e10 instructions
    assert apps["fvcom"]["max_fc"] == pytest.approx(1e-3)
    assert apps["fvcom"]["verdict"] == "none"


def test_trace_capacity_from_system(tmp_path, capsys):
    path = tmp_path / "jobs.csv"
    path.write_text(TRACE, encoding="utf-8")
    _, doc = run_json(
        capsys, "trace", str(path), "--assumed-rate", "1G", "--local", "msp430", "--remote", "celeron", "--bottleneck-rate", "1M"
    )
    assert f"{doc['results']['capacity']:.2e}" == "6.23e-02"
    assert {app["verdict"] for app in doc["results"]["apps"]} == {"all"}


def test_trace_missing_file(tmp_path, capsys):
    code = main(["trace", str(tmp_path / "absent.csv"), "--assumed-rate", "1G"])
    assert code == EXIT_USAGE
    assert "not found" in capsys.readouterr().err


def test_trace_without_valid_rows(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text("job_id,app_name,job_size,bytes_written,bytes_read,exec_time_s\n1,x,1,1,1,0\n", encoding="utf-8")
    assert main(["trace", str(path), "--assumed-rate", "1G"]) != EXIT_OK


# validate ----------------------------------------------------------------------------


def test_validate_is_deterministic(capsys):
    code_a, first = run_json(capsys, "validate", "--trials", "100", "--seed", "42", "--quiet")
    code_b, second = run_json(capsys, "validate", "--trials", "100", "--seed", "42", "--workers", "1", "--quiet")
    assert code_a == code_b == EXIT_OK
    assert first["results"] == second["results"]
    summaries = first["results"]["summaries"]
    assert summaries["single_packet"]["min"] == summaries["single_packet"]["max"] == 0.0
    assert first["results"]["identity_failures"] == []


def test_validate_writes_event_trace(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    assert main(["validate", "--trials", "3", "--trace-events", str(events), "--quiet"]) == EXIT_OK
    lines = events.read_text(encoding="utf-8").splitlines()
    assert lines
    assert json.loads(lines[0])["kind"] == "arrival"


def test_validate_needs_a_trial(capsys):
    assert main(["validate", "--trials", "0"]) == EXIT_USAGE


def test_quiet_silences_logs(capsys):
    main(["validate", "--trials", "2", "--quiet"])
    assert capsys.readouterr().err == ""
