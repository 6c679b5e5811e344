import logging
from collections.abc import Callable, Generator
from fractions import Fraction
from typing import Any, Generic, TypeVar

from pydantic import BaseModel, ConfigDict, Field, field_validator

from internal.sim_memory import SimMemory
from internal.snapshot import Snapshot, SnapshotBudget, take_snapshot

_logger = logging.getLogger(__name__)

T = TypeVar("T")


class SnapshotRequest(BaseModel):
    """攻撃者が指定時刻に取得したい領域."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base_addr: int
    length: int
    at_time: Fraction

    @field_validator("at_time", mode="before")
    @classmethod
    def _as_fraction(cls, value: int | Fraction) -> Fraction:
        return Fraction(value)


SnapshotPlan = Generator[SnapshotRequest, Snapshot, Any]


class SnapshotStats(BaseModel):
    """帯域の記録. 正しさの判定には使わない."""

    snapshot_count: int = 0
    bytes_transferred: int = 0
    victim_events: int = 0


class InterleavedRun(BaseModel, Generic[T]):
    """run_interleavedの結果."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    output: T | None
    snapshots: list[Snapshot]
    plan_result: Any = None
    stats: SnapshotStats = Field(default_factory=SnapshotStats)


class _PlanFinished(Exception):
    """攻撃計画が終わったので被害者を止める."""


class _Scheduler:
    def __init__(
        self,
        mem: SimMemory,
        plan: SnapshotPlan,
        budget: SnapshotBudget,
        keep_snapshots: bool,
    ) -> None:
        self._mem = mem
        self._plan = plan
        self._budget = budget
        self._keep = keep_snapshots
        self._pending: SnapshotRequest | None = None
        self.done = False
        self.result: Any = None
        self.snapshots: list[Snapshot] = list()
        self.stats = SnapshotStats()

    def start(self) -> None:
        self._advance(lambda: next(self._plan))

    def on_event(self, commit_time: int) -> None:
        """確定予定時刻より前の要求をすべて処理してから被害者を進める."""
        self.serve(until=Fraction(commit_time), inclusive=False)
        if self.done:
            raise _PlanFinished()

    def serve(self, until: Fraction | None, inclusive: bool = True) -> None:
        while self._pending is not None:
            at_time = self._pending.at_time
            if until is not None and (
                at_time > until or (not inclusive and at_time == until)
            ):
                return
            request = self._pending
            snapshot = take_snapshot(
                request.base_addr, request.length, self._budget, self._mem
            )
            self.stats.snapshot_count += 1
            self.stats.bytes_transferred += request.length
            if self._keep:
                self.snapshots.append(snapshot)
            self._advance(lambda: self._plan.send(snapshot))

    def _advance(self, step: Callable[[], SnapshotRequest]) -> None:
        try:
            self._pending = step()
        except StopIteration as stop:
            self._pending = None
            self.done = True
            self.result = stop.value


def run_interleaved(
    victim: Callable[[], T],
    plan: SnapshotPlan,
    budget: SnapshotBudget,
    mem: SimMemory,
    drain: bool = False,
    keep_snapshots: bool = True,
) -> InterleavedRun[T]:
    """被害者と攻撃者のスナップショット計画を決定的に交互実行する.

    Notes
    -----
    被害者の更新イベントは確定予定時刻τを持ち、時刻Tのスナップショットは
    τ <= Tのイベントをすべて含む。被害者が先に終了した場合、終了時刻までの
    要求を処理する。drainを指定した場合は静止したメモリに対して残りの要求も処理する。
    """
    budget.validate_feasible()
    scheduler = _Scheduler(mem, plan, budget, keep_snapshots)
    clock_before = mem.event_clock
    scheduler.start()

    output: T | None = None
    mem.add_listener(scheduler.on_event)
    try:
        if not scheduler.done:
            output = victim()
    except _PlanFinished:
        _logger.debug("snapshot plan finished, victim stopped.")
    finally:
        mem.remove_listener(scheduler.on_event)

    if not scheduler.done:
        scheduler.serve(until=None if drain else Fraction(mem.victim_time))
    plan.close()

    scheduler.stats.victim_events = mem.event_clock - clock_before
    _logger.info(
        f"interleaved run: {scheduler.stats.victim_events} victim events,"
        f" {scheduler.stats.snapshot_count} snapshots,"
        f" {scheduler.stats.bytes_transferred} bytes"
    )
    return InterleavedRun(
        output=output,
        snapshots=scheduler.snapshots,
        plan_result=scheduler.result,
        stats=scheduler.stats,
    )


def periodic_plan(
    base_addr: int, length: int, budget: SnapshotBudget, start_time: int = 0
) -> SnapshotPlan:
    """oversamplingで決まる一定間隔で同じ領域を取り続ける."""
    period = budget.sampling_period()
    k = 0
    while True:
        yield SnapshotRequest(
            base_addr=base_addr,
            length=length,
            at_time=Fraction(start_time) + k * period,
        )
        k += 1
