import csv
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict

from internal.errors import ThresholdError, UsageError
from internal.snapshot import Snapshot

_logger = logging.getLogger(__name__)

DEFAULT_NOISE_FLOOR = 0.05


class WriteHistogram(BaseModel):
    """連続するスナップショット対の差分から数えたバイトごとの更新回数."""

    model_config = ConfigDict(frozen=True)

    base_addr: int
    counts: tuple[int, ...]

    @classmethod
    def from_snapshots(cls, snapshots: Sequence[Snapshot]) -> "WriteHistogram":
        if len(snapshots) < 2:
            raise UsageError("at least two snapshots are required.")
        first = snapshots[0]
        counts = np.zeros(first.length, dtype=np.int64)
        for prev, cur in zip(snapshots, snapshots[1:]):
            counts += prev.changed_mask(cur)
        return cls(base_addr=first.base_addr, counts=tuple(int(c) for c in counts))

    @property
    def total_mass(self) -> int:
        return sum(self.counts)

    def clusters(
        self, noise_floor: float = DEFAULT_NOISE_FLOOR, merge_gap: int = 0
    ) -> list[tuple[int, int, int]]:
        """非ゼロ区間の極大ランを(開始, 終了, 質量)で返す.

        Notes
        -----
        最大値のnoise_floor倍未満のオフセットは0とみなす。
        merge_gapバイト未満の隙間で隔てられたランは1つにまとめる。
        """
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.size < 1 or counts.max() == 0:
            return list()
        active = counts >= max(1.0, noise_floor * counts.max())

        edges = np.diff(np.concatenate([[0], active.astype(np.int8), [0]]))
        runs = list(zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)))
        merged: list[list[int]] = list()
        for start, end in runs:
            if merged and start - merged[-1][1] < merge_gap:
                merged[-1][1] = int(end)
            else:
                merged.append([int(start), int(end)])
        return [
            (start, end, int(counts[start:end][active[start:end]].sum()))
            for start, end in merged
        ]


class RegionThreshold(BaseModel):
    """R0とR1を分ける境界."""

    model_config = ConfigDict(frozen=True)

    boundary_offset: int
    r0_span: tuple[int, int]  # [start, end)
    r1_span: tuple[int, int]


def compute_threshold(
    snapshots: Sequence[Snapshot],
    noise_floor: float = DEFAULT_NOISE_FLOOR,
    merge_gap: int = 0,
) -> RegionThreshold:
    histogram = WriteHistogram.from_snapshots(snapshots)
    clusters = histogram.clusters(noise_floor=noise_floor, merge_gap=merge_gap)
    if len(clusters) < 2:
        raise ThresholdError(
            f"cannot disambiguate variables: {len(clusters)} write cluster(s) found."
        )

    top = sorted(clusters, key=lambda c: (-c[2], c[0]))[:2]
    lower, upper = sorted(top)
    threshold = RegionThreshold(
        boundary_offset=(lower[1] + upper[0]) // 2,
        r0_span=(lower[0], lower[1]),
        r1_span=(upper[0], upper[1]),
    )
    _logger.info(f"threshold: {threshold}")
    return threshold


class HistogramCsvWriter:
    """ヒストグラムを`offset,count`形式のCSVで保存する."""

    def __init__(self, filepath: Path) -> None:
        self._filepath = filepath

    def save(self, histogram: WriteHistogram) -> None:
        with self._filepath.open("w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["offset", "count"])
            for offset, count in enumerate(histogram.counts):
                writer.writerow([offset, count])

    def clean(self) -> None:
        if not self._filepath.exists():
            return

        self._filepath.unlink()
