import numpy as np
from pydantic import BaseModel, ConfigDict

from internal.snapshot import Snapshot


class RegionPattern(BaseModel):
    """被害者の足跡とみなす差分パターン.

    Notes
    -----
    lenient_extra_linesが0なら、オペランド2つ分のラン以外の変更を許さない。
    """

    model_config = ConfigDict(frozen=True)

    operand_bytes: int = 128
    line_size: int = 64
    lenient_extra_lines: int = 0

    @property
    def lines_per_operand(self) -> int:
        return -(-self.operand_bytes // self.line_size)


def modified_line_runs(
    s1: Snapshot, s2: Snapshot, line_size: int
) -> list[tuple[int, int]]:
    """変更されたキャッシュラインの極大ランを(開始ライン, 本数)で返す."""
    mask = s1.changed_mask(s2)
    pad = (-len(mask)) % line_size
    if pad:
        mask = np.concatenate([mask, np.zeros(pad, dtype=bool)])
    lines = mask.reshape(-1, line_size).any(axis=1)
    if not lines.any():
        return list()

    edges = np.diff(np.concatenate([[0], lines.astype(np.int8), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return [(int(s), int(e - s)) for s, e in zip(starts, ends)]


def compare_match(s1: Snapshot, s2: Snapshot, pattern: RegionPattern) -> bool:
    runs = modified_line_runs(s1, s2, pattern.line_size)
    width = pattern.lines_per_operand
    operand_runs = [i for i, (_, length) in enumerate(runs) if length == width]
    if len(operand_runs) < 2:
        return False

    # 極大ランなので隣り合うラン同士の間には必ず未変更ラインがある
    for first, second in zip(operand_runs, operand_runs[1:]):
        extra = sum(
            length for i, (_, length) in enumerate(runs) if i not in (first, second)
        )
        if extra <= pattern.lenient_extra_lines:
            return True
    return False
