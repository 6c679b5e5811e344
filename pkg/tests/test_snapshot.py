from collections.abc import Callable
from fractions import Fraction
from pathlib import Path

import pytest
from conftest import SMALL_MEMORY

from internal.big_nat import BigNat
from internal.errors import ConfigurationError, UsageError
from internal.exponentiation import exp_montgomery_ladder
from internal.key_bits import KeyBits
from internal.operand_region import RegionLabel, VictimLayout
from internal.sim_memory import SimMemory
from internal.snapshot import Snapshot, SnapshotBudget, SnapshotFile, take_snapshot
from internal.snapshot_scheduler import (
    SnapshotPlan,
    SnapshotRequest,
    periodic_plan,
    run_interleaved,
)
from internal.trace_log import TraceLogFile, TraceRecord

N = 0xFFFFFFFFFFFFFFC5
R0 = RegionLabel.R0
R1 = RegionLabel.R1


def _ladder_victim(
    mem: SimMemory, layout: VictimLayout, key: KeyBits
) -> Callable[[], BigNat]:
    def victim() -> BigNat:
        return exp_montgomery_ladder(
            BigNat.from_int(7), key, BigNat.from_int(N), mem, layout
        )

    return victim


def test_snapshots_without_events_are_identical() -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY)
    budget = SnapshotBudget()
    s1 = take_snapshot(0, 4096, budget, mem)
    s2 = take_snapshot(0, 4096, budget, mem)
    assert s1.data == s2.data
    assert s1.changed_offsets(s2).size == 0


def test_snapshot_diff_is_localized_and_immutable() -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY)
    budget = SnapshotBudget()
    before = take_snapshot(0, 4096, budget, mem)
    mem.write_raw(192, b"\xaa" * 128)
    after = take_snapshot(0, 4096, budget, mem)

    offsets = before.changed_offsets(after)
    assert offsets.min() == 192 and offsets.max() == 319 and offsets.size == 128
    assert before.data == bytes(4096)


def test_snapshot_does_not_advance_clock() -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY)
    take_snapshot(0, 4096, SnapshotBudget(), mem)
    assert mem.event_clock == 0 and mem.victim_time == 0


def test_mismatched_ranges_are_rejected() -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY)
    budget = SnapshotBudget()
    with pytest.raises(UsageError):
        take_snapshot(0, 4096, budget, mem).changed_offsets(
            take_snapshot(4096, 4096, budget, mem)
        )


def test_infeasible_budget() -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY)
    with pytest.raises(ConfigurationError):
        run_interleaved(
            lambda: None,
            periodic_plan(0, 4096, SnapshotBudget()),
            SnapshotBudget(oversampling=0),
            mem,
        )


def test_sampling_period_follows_oversampling() -> None:
    assert SnapshotBudget(oversampling=2).sampling_period() == Fraction(2)
    assert SnapshotBudget(oversampling=1).sampling_period() == Fraction(4)
    assert SnapshotBudget(oversampling=4).sampling_period() == Fraction(1)


def test_ladder_run_gives_4t_plus_1_snapshots() -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY)
    layout = VictimLayout.plan(0, 64)
    key = KeyBits.from_int(0xB5C3, 16)
    budget = SnapshotBudget(oversampling=2)
    run = run_interleaved(
        _ladder_victim(mem, layout, key), periodic_plan(0, 4096, budget), budget, mem
    )

    assert run.output is not None and run.output.to_int() == pow(7, 0xB5C3, N)
    assert len(run.snapshots) == 4 * key.t + 1
    assert run.stats.victim_events == 2 * key.t + 2


def test_oversampling_two_separates_every_update() -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY)
    layout = VictimLayout.plan(0, 64)
    budget = SnapshotBudget(oversampling=2)
    run = run_interleaved(
        _ladder_victim(mem, layout, KeyBits.from_int(0xFFFF0F0F, 32)),
        periodic_plan(0, 4096, budget),
        budget,
        mem,
    )

    for s_i, s_next in zip(run.snapshots, run.snapshots[1:]):
        offsets = s_i.changed_offsets(s_next)
        labels = {layout.label_of(int(offset)) for offset in offsets}
        assert not {R0, R1} <= labels


def test_oversampling_one_merges_updates() -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY)
    layout = VictimLayout.plan(0, 64)
    budget = SnapshotBudget(oversampling=1)
    run = run_interleaved(
        _ladder_victim(mem, layout, KeyBits.from_int(0xFFFF, 16)),
        periodic_plan(0, 4096, budget),
        budget,
        mem,
    )

    both = 0
    for s_i, s_next in zip(run.snapshots, run.snapshots[1:]):
        offsets = s_i.changed_offsets(s_next)
        if (offsets < layout.r0.end).any() and (offsets >= layout.r1.base_addr).any():
            both += 1
    assert both > 0


def test_interleaving_is_deterministic() -> None:
    def run_once() -> list[bytes]:
        mem = SimMemory(size_bytes=SMALL_MEMORY)
        layout = VictimLayout.plan(0, 64)
        budget = SnapshotBudget()
        run = run_interleaved(
            _ladder_victim(mem, layout, KeyBits.from_int(0x1234, 16)),
            periodic_plan(0, 4096, budget),
            budget,
            mem,
        )
        return [s.data for s in run.snapshots]

    assert run_once() == run_once()


def test_finished_plan_stops_victim() -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY)
    layout = VictimLayout.plan(0, 64)
    budget = SnapshotBudget()

    def plan() -> SnapshotPlan:
        first: Snapshot = yield SnapshotRequest(
            base_addr=0, length=4096, at_time=Fraction(0)
        )
        second: Snapshot = yield SnapshotRequest(
            base_addr=0, length=4096, at_time=Fraction(9)
        )
        return len(first.changed_offsets(second))

    run = run_interleaved(
        _ladder_victim(mem, layout, KeyBits.from_int(0xFFFF, 16)), plan(), budget, mem
    )
    assert run.output is None
    assert run.plan_result > 0
    # 時刻13の更新を確定する前に止まる
    assert mem.victim_time == 8


def test_snapshot_file_has_fixed_header(tmp_path: Path) -> None:
    snapshot = Snapshot(
        base_addr=0xD271C000, length=4, data=b"\x01\x02\x03\x04", taken_at=7
    )
    dump = SnapshotFile(filepath=tmp_path / "page.bin")
    dump.save(snapshot)

    raw = (tmp_path / "page.bin").read_bytes()
    assert raw[:8] == b"WLSNAP01"
    assert len(raw) == 24 + 4
    assert dump.load() == snapshot

    dump.clean()
    assert not (tmp_path / "page.bin").exists()


def test_snapshot_file_rejects_other_data(tmp_path: Path) -> None:
    path = tmp_path / "other.bin"
    path.write_bytes(b"NOTASNAP" + bytes(16))
    with pytest.raises(UsageError):
        SnapshotFile(filepath=path).load()


def test_trace_log_lines(tmp_path: Path) -> None:
    records = [
        TraceRecord.of(0, "store", 0x40, 64),
        TraceRecord.of(1, "evict", 0x80, 64, dirty=True),
    ]
    log = TraceLogFile(filepath=tmp_path / "trace.jsonl")
    log.save(records)

    lines = (tmp_path / "trace.jsonl").read_text().splitlines()
    assert lines[0] == '{"t":0,"kind":"store","addr":"0x40","len":64}'
    assert lines[1] == '{"t":1,"kind":"evict","addr":"0x80","len":64,"dirty":true}'
    assert log.get_record_list() == records
