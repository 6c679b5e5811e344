import bisect
import logging
from collections.abc import Sequence
from typing import Literal

from pydantic import BaseModel, ConfigDict

from internal.cache_model import EvictionEvent
from internal.errors import TraceError, UsageError
from internal.gauss_jordan import MatrixLayout

_logger = logging.getLogger(__name__)

AttributionMode = Literal["strong", "weak"]


class RowOpTrace(BaseModel):
    """ピボットステップごとに加算先となった行の並び."""

    model_config = ConfigDict(frozen=True)

    steps: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.steps)

    def one_indexed(self) -> list[list[int]]:
        return [[row + 1 for row in step] for step in self.steps]


def _locate_all(
    evictions: Sequence[EvictionEvent], layout: MatrixLayout
) -> list[tuple[int, int]]:
    located: list[tuple[int, int]] = list()
    for event in evictions:
        position = layout.locate(event.addr)
        if position is None:
            raise TraceError(f"eviction at 0x{event.addr:x} is outside the matrix.")
        located.append(position)
    return located


def observe_row_updates(
    evictions: Sequence[EvictionEvent],
    layout: MatrixLayout,
    ways: int = 2,
    mode: AttributionMode = "strong",
    step_starts: Sequence[int] | None = None,
) -> RowOpTrace:
    """dirtyな追い出しから行加算の対象行を読み取り、ステップに振り分ける.

    Notes
    -----
    1回の行加算では対象行の先頭2n-ways列が演算中に追い出される。残りの列は
    後で追い出されるので数えない。
    strongでは被害者のステップ境界を使う。weakでは演算中に追い出しが起きた
    もう1つのセット(ピボット行)をステップとみなす。
    """
    if mode == "strong" and step_starts is None:
        raise UsageError("strong attribution needs the victim step boundaries.")

    located = _locate_all(evictions, layout)
    per_op = layout.columns - ways
    if per_op < 1:
        raise UsageError(f"{ways} ways leave no evictions to observe.")
    hits = [
        i
        for i, (event, (_, col)) in enumerate(zip(evictions, located))
        if event.dirty and col < per_op
    ]
    if len(hits) % per_op != 0:
        raise TraceError(
            f"{len(hits)} row-update evictions do not split into operations"
            f" of {per_op}."
        )

    steps: list[list[int]] = [list() for _ in range(layout.n)]
    for k in range(0, len(hits), per_op):
        chunk = hits[k : k + per_op]
        rows = {located[i][0] for i in chunk}
        if len(rows) != 1:
            raise TraceError(f"one row operation touched rows {sorted(rows)}.")
        target = rows.pop()

        if mode == "strong":
            assert step_starts is not None
            step = bisect.bisect_right(step_starts, chunk[0]) - 1
        else:
            others = {
                located[i][0]
                for i in range(chunk[0] + 1, chunk[-1])
                if located[i][0] != target
            }
            if len(others) != 1:
                raise TraceError(
                    f"cannot attribute update of row {target}: sets {sorted(others)}."
                )
            step = others.pop()

        if step < 0 or step == target:
            raise TraceError(f"row {target} cannot be updated at step {step}.")
        steps[step].append(target)

    trace = RowOpTrace(steps=tuple(tuple(step) for step in steps))
    _logger.debug(f"{mode} attribution: {trace.one_indexed()}")
    return trace
