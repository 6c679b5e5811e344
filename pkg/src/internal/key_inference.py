import logging
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from internal.errors import AmbiguousUpdate, DecodeError, UsageError
from internal.key_bits import KeyBits
from internal.operand_region import RegionLabel
from internal.sim_memory import SimMemory
from internal.snapshot import Snapshot, SnapshotBudget
from internal.snapshot_scheduler import InterleavedRun, periodic_plan, run_interleaved
from internal.write_histogram import RegionThreshold

_logger = logging.getLogger(__name__)


class UpdateSequence(BaseModel):
    """スナップショット対ごとに更新された領域の並び."""

    model_config = ConfigDict(frozen=True)

    labels: tuple[RegionLabel, ...]

    def __len__(self) -> int:
        return len(self.labels)


def remove_unchanged(snapshots: Sequence[Snapshot]) -> list[Snapshot]:
    """直前に残したスナップショットと同一のものを取り除く."""
    kept: list[Snapshot] = list()
    for snapshot in snapshots:
        if kept and kept[-1].data == snapshot.data:
            continue
        kept.append(snapshot)
    return kept


def _in_spans(offsets: np.ndarray, threshold: RegionThreshold) -> np.ndarray:
    inside = np.zeros(offsets.shape, dtype=bool)
    for start, end in (threshold.r0_span, threshold.r1_span):
        inside |= (offsets >= start) & (offsets < end)
    return offsets[inside]


def correlate(
    s_i: Snapshot, s_next: Snapshot, threshold: RegionThreshold
) -> RegionLabel:
    """2つのスナップショットの差分がどちらの領域に属するかを返す.

    Notes
    -----
    R0, R1のクラスタ外の変更(退避領域など)は判定に使わない。
    クラスタ内に変更が無い場合のみ全変更バイトで判定する。
    """
    offsets = s_i.changed_offsets(s_next)
    if offsets.size < 1:
        raise UsageError("snapshot pair shows no change.")
    relevant = _in_spans(offsets, threshold)
    if relevant.size > 0:
        offsets = relevant

    below = offsets < threshold.boundary_offset
    if below.all():
        return RegionLabel.R0
    if not below.any():
        return RegionLabel.R1
    raise AmbiguousUpdate(
        "both regions changed between two snapshots; increase oversampling."
    )


def build_update_sequence(
    snapshots: Sequence[Snapshot], threshold: RegionThreshold
) -> UpdateSequence:
    labels: list[RegionLabel] = list()
    for i, (s_i, s_next) in enumerate(zip(snapshots, snapshots[1:])):
        try:
            labels.append(correlate(s_i, s_next, threshold))
        except AmbiguousUpdate as e:
            raise AmbiguousUpdate(f"snapshot pair {i}: {e}", pair_index=i) from e
    _logger.debug(f"update sequence of {len(labels)} labels")
    return UpdateSequence(labels=tuple(labels))


def infer_key(updates: UpdateSequence, t: int | None = None) -> KeyBits:
    """更新順序の組から鍵ビットを上位から順に復元する.

    Notes
    -----
    (R0, R1)は1、(R1, R0)は0。最初の1より前の0ビットではR0=1, R1=gが
    同じ値で書き直されるだけなので差分に現れない。tを指定した場合は
    その分を上位の0で補う。
    """
    labels = updates.labels
    if len(labels) % 2 != 0:
        raise DecodeError(f"update sequence has odd length {len(labels)}.")

    bits: list[bool] = list()
    for i in range(0, len(labels), 2):
        first, second = labels[i], labels[i + 1]
        if first == second:
            raise DecodeError(
                f"pair {i // 2} updates {first.value} twice; not a ladder trace."
            )
        bits.append(first == RegionLabel.R0)

    if t is not None:
        if len(bits) > t:
            raise DecodeError(f"{len(bits)} bits decoded for a {t} bit key.")
        bits = [False] * (t - len(bits)) + bits
    if len(bits) < 1:
        raise DecodeError("update sequence is empty.")
    return KeyBits(bits=tuple(bits))


def observe_encryption(
    victim: Callable[[], Any],
    mem: SimMemory,
    page_addr: int,
    page_size: int,
    budget: SnapshotBudget,
) -> InterleavedRun[Any]:
    """被害者のページを一定間隔で取得しながら1回分の処理を走らせる."""
    plan = periodic_plan(page_addr, page_size, budget, start_time=mem.victim_time)
    return run_interleaved(victim, plan, budget, mem)
