import io
import json

import pytest

from offload_feasibility.model import NetworkHop, NetworkPath, OffloadError
from offload_feasibility.netsim import (
    ARRIVAL,
    DEPARTURE,
    GapReport,
    compare_models,
    gap_summary,
    simulate_train,
    write_event_trace,
)


def test_single_packet_single_hop():
    result = simulate_train(12000, NetworkPath.of(NetworkHop(1e6)), 12000)
    assert result.completion == pytest.approx(0.012, rel=1e-12)
    assert result.delivered_bits == 12000


def test_three_packets_over_two_equal_hops():
    result = simulate_train(36000, NetworkPath.uniform(2, 1e6), 12000)
    assert result.completion == pytest.approx(0.048, rel=1e-12)
    assert result.per_packet_arrivals == pytest.approx((0.024, 0.036, 0.048))


def test_slow_second_hop_dominates():
    # hop 1 releases packets at 0.012, 0.024 and 0.036; hop 2 takes 12 s each
    result = simulate_train(36000, NetworkPath.of(NetworkHop(1e6), NetworkHop(1e3)), 12000)
    assert result.completion == pytest.approx(0.012 + 36.0, rel=1e-12)


def test_queue_delay_is_paid_per_packet_per_hop():
    result = simulate_train(24000, NetworkPath.of(NetworkHop(1e6, 0.005)), 12000)
    # both packets wait 5 ms, then share the link in order
    assert result.completion == pytest.approx(0.005 + 0.024, rel=1e-12)


def test_delivered_bits_equal_file_size():
    result = simulate_train(30001, NetworkPath.uniform(3, 2e6), 12000)
    assert result.delivered_bits == pytest.approx(30001)
    assert len(result.per_packet_arrivals) == 3


def test_arrivals_are_in_packet_order():
    path = NetworkPath.of(NetworkHop(3e6), NetworkHop(1e5), NetworkHop(7e6))
    arrivals = simulate_train(100_000, path, 12000).per_packet_arrivals
    assert list(arrivals) == sorted(arrivals)


def test_simulate_empty_file():
    with pytest.raises(OffloadError, match="empty file"):
        simulate_train(0, NetworkPath.of(NetworkHop(1e6)))


def test_event_recording_and_trace():
    result = simulate_train(24000, NetworkPath.uniform(2, 1e6), 12000, record_events=True)
    # two packets x two hops x (arrival + departure)
    assert result.event_count == 8
    assert len(result.events) == 8
    assert [e.time for e in result.events] == sorted(e.time for e in result.events)
    assert {e.kind for e in result.events} == {ARRIVAL, DEPARTURE}

    stream = io.StringIO()
    assert write_event_trace(result, stream) == 8
    lines = [json.loads(line) for line in stream.getvalue().splitlines()]
    assert lines[0] == {"time": 0.0, "kind": "arrival", "packet_index": 0, "hop_index": 0}
    assert lines[-1]["kind"] == "departure"
    assert lines[-1]["time"] == pytest.approx(0.036)


def test_events_not_kept_unless_asked():
    result = simulate_train(24000, NetworkPath.uniform(2, 1e6), 12000)
    assert result.events == ()
    assert result.event_count == 8


def test_equal_rate_gap_is_last_packet_time():
    report = compare_models(36000, NetworkPath.uniform(2, 1e6), 12000)
    assert report.closed_form == pytest.approx(0.06, rel=1e-12)
    assert report.simulated == pytest.approx(0.048, rel=1e-12)
    assert report.gap == pytest.approx(0.012, rel=1e-9)


def test_single_packet_gap_is_zero():
    path = NetworkPath.of(NetworkHop(3.3e6), NetworkHop(1.7e4), NetworkHop(9.1e8))
    assert compare_models(5000, path, 12000).gap == 0.0


def test_compare_models_rejects_queue_delay():
    with pytest.raises(OffloadError):
        compare_models(36000, NetworkPath.uniform(2, 1e6, 0.001))


def test_gap_summary():
    reports = [GapReport(1.0, 0.5, 0.5), GapReport(1.0, 1.25, -0.25), GapReport(2.0, 1.0, 1.0)]
    summary = gap_summary(reports)
    assert summary["count"] == 3
    assert summary["min"] == -0.25
    assert summary["max"] == 1.0
    assert summary["mean"] == pytest.approx(1.25 / 3)
    assert summary["negative"] == 1
    assert gap_summary([])["count"] == 0
