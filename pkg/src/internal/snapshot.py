import struct
from fractions import Fraction
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict

from internal.errors import ConfigurationError, UsageError
from internal.sim_memory import SimMemory
from internal.trace_log import TraceRecord

# 乗算結果の書き込みと二乗結果の書き込みにかかる模擬時間
MUL_COST = 5
SQR_COST = 3

_DUMP_MAGIC = b"WLSNAP01"
_DUMP_HEADER = struct.Struct("<8sQII")


class Snapshot(BaseModel):
    """ある時点でのメモリ領域の不変なコピー."""

    model_config = ConfigDict(frozen=True)

    base_addr: int
    length: int
    data: bytes
    taken_at: int  # 取得時点のevent_clock

    def same_range(self, other: "Snapshot") -> bool:
        return self.base_addr == other.base_addr and self.length == other.length

    def changed_offsets(self, other: "Snapshot") -> np.ndarray:
        """2つのスナップショットで値が異なるバイトのオフセット."""
        if not self.same_range(other):
            raise UsageError("snapshots cover different ranges.")
        return np.flatnonzero(self.changed_mask(other))

    def changed_mask(self, other: "Snapshot") -> np.ndarray:
        if not self.same_range(other):
            raise UsageError("snapshots cover different ranges.")
        a = np.frombuffer(self.data, dtype=np.uint8)
        b = np.frombuffer(other.data, dtype=np.uint8)
        return a != b


class SnapshotBudget(BaseModel):
    """DMAによるスナップショット取得の制約."""

    model_config = ConfigDict(frozen=True)

    bytes_per_tick: int = 1024 * 1024
    oversampling: int = 2
    scan_gap_ticks: int = 2 * (MUL_COST + SQR_COST)

    def validate_feasible(self) -> None:
        if self.oversampling < 1:
            raise ConfigurationError("oversampling must be at least 1.")
        if self.bytes_per_tick < 1:
            raise ConfigurationError("bytes_per_tick must be positive.")

    def sampling_period(self) -> Fraction:
        """更新イベント1回分の平均時間をoversamplingで割った取得間隔."""
        return Fraction(MUL_COST + SQR_COST, 2 * self.oversampling)

    def transfer_ticks(self, length: int) -> int:
        return -(-length // self.bytes_per_tick)


def take_snapshot(
    base_addr: int, length: int, budget: SnapshotBudget, mem: SimMemory
) -> Snapshot:
    budget.validate_feasible()
    data = mem.read(base_addr, length)
    mem.record(TraceRecord.of(mem.event_clock, "snapshot", base_addr, length))
    return Snapshot(
        base_addr=base_addr, length=length, data=data, taken_at=mem.event_clock
    )


class SnapshotFile:
    """スナップショットを固定長ヘッダ付きのバイナリで保存する."""

    def __init__(self, filepath: Path) -> None:
        self._filepath = filepath

    def save(self, snapshot: Snapshot) -> None:
        header = _DUMP_HEADER.pack(
            _DUMP_MAGIC, snapshot.base_addr, snapshot.length, snapshot.taken_at
        )
        self._filepath.write_bytes(header + snapshot.data)

    def load(self) -> Snapshot:
        raw = self._filepath.read_bytes()
        magic, base_addr, length, taken_at = _DUMP_HEADER.unpack_from(raw)
        if magic != _DUMP_MAGIC:
            raise UsageError(f"not a snapshot dump: {self._filepath}")
        data = raw[_DUMP_HEADER.size :]
        if len(data) != length:
            raise UsageError(f"truncated snapshot dump: {self._filepath}")
        return Snapshot(
            base_addr=base_addr, length=length, data=data, taken_at=taken_at
        )

    def clean(self) -> None:
        if not self._filepath.exists():
            return

        self._filepath.unlink()
