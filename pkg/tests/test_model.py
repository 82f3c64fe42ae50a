import math

import numpy as np
import pytest

from offload_feasibility.model import (
    CloudResource,
    ComputeJob,
    NetworkHop,
    NetworkPath,
    OffloadDecision,
    PacketTrain,
    Placement,
    Processor,
    TimeBreakdown,
    ValidationError,
    Violation,
    validate,
)


def test_processor_from_catalog_rating_is_valid():
    assert validate(Processor("MSP430", 16e6)) == []


def test_zero_exec_rate_is_reported():
    violations = validate(Processor, {"name": "dead", "exec_rate": 0})
    assert violations == [Violation("exec_rate", "exec_rate must be > 0")]


def test_negative_trans_rate_is_reported():
    violations = validate(NetworkHop, {"trans_rate": -1, "queue_delay": 0.0, "proc_delay": 0.0, "length": 0.0})
    assert [v.message for v in violations] == ["trans_rate must be > 0"]


def test_validate_collects_every_violation():
    violations = validate(NetworkHop, {"trans_rate": 0, "queue_delay": -1, "proc_delay": math.nan, "length": "far"})
    assert [v.field for v in violations] == ["trans_rate", "queue_delay", "proc_delay", "length"]


def test_construction_raises_with_violations():
    with pytest.raises(ValidationError) as excinfo:
        Processor("broken", -5)
    assert excinfo.value.type_name == "Processor"
    assert excinfo.value.violations[0].field == "exec_rate"
    assert "exec_rate must be > 0" in str(excinfo.value)


def test_bool_is_not_a_rate():
    with pytest.raises(ValidationError):
        NetworkHop(True)


def test_infinite_rate_rejected():
    with pytest.raises(ValidationError):
        Processor("fast", math.inf)


def test_numpy_scalars_are_accepted():
    hop = NetworkHop(np.float64(1e6))
    train = PacketTrain(12000.0, np.int64(3), 5.0)
    assert hop.trans_rate == 1e6
    assert train.packet_count == 4


def test_path_requires_a_hop():
    with pytest.raises(ValidationError):
        NetworkPath(())


def test_path_accepts_a_list_and_derives_aggregates():
    path = NetworkPath([NetworkHop(1e6, 0.01), NetworkHop(1e3, 0.02), NetworkHop(1e9)])
    assert isinstance(path.hops, tuple)
    assert path.hop_count == 3
    assert path.bottleneck_rate == 1e3
    assert path.queue_delay_total == pytest.approx(0.03)


def test_path_helpers():
    path = NetworkPath.uniform(2, 1e6, 0.005)
    longer = path.append(NetworkHop(1e3))
    assert path.hop_count == 2
    assert longer.hop_count == 3
    assert longer.bottleneck_rate == 1e3
    assert NetworkPath.of(NetworkHop(5.0)).bottleneck_rate == 5.0


def test_job_total_bits_and_intensity_constructor():
    job = ComputeJob(1e9, 1000.0, 500.0)
    assert job.total_bits == 1500.0
    probe = ComputeJob.from_intensity(1.01e-3, 1e9)
    assert probe.total_bits == pytest.approx(1.01e6)
    assert probe.output_bits == 0.0


def test_job_rejects_zero_instructions():
    with pytest.raises(ValidationError):
        ComputeJob(0)


def test_train_last_packet_cannot_exceed_mtu():
    assert validate(PacketTrain, {"full_packet_bits": 12000.0, "full_packet_count": 1, "last_packet_bits": 12001.0}) == [
        Violation("last_packet_bits", "last_packet_bits must be <= full_packet_bits")
    ]


def test_train_sizes():
    train = PacketTrain(12000.0, 2, 6000.0)
    assert train.packet_sizes() == [12000.0, 12000.0, 6000.0]
    assert train.total_bits == 30000.0


def test_resource_tier_index_starts_at_one():
    path = NetworkPath.of(NetworkHop(1e6))
    with pytest.raises(ValidationError):
        CloudResource(Processor("Celeron", 6.43e9), path, tier_index=0)


def test_breakdown_total_must_add_up():
    assert validate(TimeBreakdown.of(1.0, 2.0, 3.0)) == []
    violations = validate(TimeBreakdown, {"compute": 1.0, "transfer": 2.0, "per_hop_overhead": 3.0, "total": 7.0})
    assert [v.field for v in violations] == ["total"]


def test_decision_favorable_iff_margin_positive():
    assert OffloadDecision.compare(2.0, 1.0).favorable
    tie = OffloadDecision.compare(1.0, 1.0)
    assert not tie.favorable
    assert tie.margin == 0.0
    with pytest.raises(ValidationError):
        OffloadDecision(True, 1.0, 2.0, -1.0)


def test_placement_rendering():
    local = Placement(None, TimeBreakdown.of(62.5))
    remote = Placement(3, TimeBreakdown.of(0.1, 0.2, 0.3))
    assert local.is_local
    assert local.to_dict()["placement"] == "local"
    assert remote.to_dict()["placement"] == 3


def test_unknown_type_is_a_violation():
    assert validate(Placement(None, TimeBreakdown.of(1.0)))[0].field == "type"


def test_to_dict_nests():
    resource = CloudResource(Processor("Celeron", 6.43e9), NetworkPath.uniform(2, 1e6))
    data = resource.to_dict()
    assert data["processor"]["exec_rate"] == 6.43e9
    assert data["path"]["hop_count"] == 2
    assert data["path"]["hops"][0]["trans_rate"] == 1e6
