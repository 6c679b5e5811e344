import logging
from collections.abc import Sequence

from pydantic import BaseModel, ConfigDict, field_validator

from internal.bit_matrix import BitMatrix, columns_to_matrix
from internal.cache_model import CacheModel, CachePolicy
from internal.gauss_jordan import MatrixLayout, gauss_jordan_invert
from internal.row_op_observer import RowOpTrace, observe_row_updates
from internal.sim_memory import SimMemory

_logger = logging.getLogger(__name__)


class ObservedColumns(BaseModel):
    """各ステップ開始時点のピボット列の推定値."""

    model_config = ConfigDict(frozen=True)

    columns: tuple[tuple[int, ...], ...]

    @field_validator("columns")
    @classmethod
    def _pivot_is_one(
        cls, columns: tuple[tuple[int, ...], ...]
    ) -> tuple[tuple[int, ...], ...]:
        for p, column in enumerate(columns):
            if column[p] != 1:
                raise ValueError(f"pivot of column {p} must be 1.")
        return columns


def infer_pivot_columns(ops: RowOpTrace, n: int) -> ObservedColumns:
    columns: list[tuple[int, ...]] = list()
    for p in range(n):
        targets = set(ops.steps[p]) if p < ops.n else set()
        columns.append(tuple(int(r in targets or r == p) for r in range(n)))
    return ObservedColumns(columns=tuple(columns))


def apply_row_step(
    values: Sequence[int], pivot: int, targets: Sequence[int]
) -> list[int]:
    """列の値に対して、ピボット行をtargetsの各行へ加える1ステップ分の操作.

    Notes
    -----
    GF(2)の行加算は自己逆元なので、同じステップを2回適用すると元に戻る。
    targetsにpivot自身は含まれない。
    """
    result = list(values)
    for target in targets:
        result[target] ^= result[pivot]
    return result


def back_substitute(cols: ObservedColumns, ops: RowOpTrace) -> BitMatrix:
    """各列に、それ以前のステップの行加算を逆順に適用して元の列に戻す."""
    recovered: list[list[int]] = list()
    for i, column in enumerate(cols.columns):
        values = list(column)
        for s in range(i - 1, -1, -1):
            values = apply_row_step(values, s, ops.steps[s])
        recovered.append(values)
    return columns_to_matrix(recovered)


class LeakDemoResult(BaseModel):
    """行列復元デモの結果."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    recovered: BitMatrix
    inverse: BitMatrix
    steps: RowOpTrace
    weak_steps: RowOpTrace
    columns: ObservedColumns
    eviction_count: int
    row_updates: int

    @property
    def modes_agree(self) -> bool:
        return self.steps == self.weak_steps


def mceliece_decrypt_leak_demo(
    s: BitMatrix,
    ways: int = 2,
    line_size: int = 64,
    mem: SimMemory | None = None,
    base_addr: int = 0,
) -> LeakDemoResult:
    """秘密行列Sの逆行列計算を観測し、Sを復元する."""
    n = s.n
    if mem is None:
        layout = MatrixLayout(base_addr=0, n=n, line_size=line_size)
        page = 4096
        size = max(page, -(-layout.size_bytes // page) * page)
        mem = SimMemory(size_bytes=size, page_size=page, line_size=line_size)
    cache = CacheModel(
        sets=n, ways=ways, line_size=line_size, policy=CachePolicy.WRITE_BACK
    )

    inverse, victim_trace = gauss_jordan_invert(s, cache, mem, base_addr)
    if s.matmul(inverse) != BitMatrix.identity(n):
        _logger.warning("victim produced a wrong inverse.")

    steps = observe_row_updates(
        victim_trace.evictions,
        victim_trace.layout,
        ways=ways,
        mode="strong",
        step_starts=victim_trace.step_starts,
    )
    weak_steps = observe_row_updates(
        victim_trace.evictions, victim_trace.layout, ways=ways, mode="weak"
    )
    if steps != weak_steps:
        _logger.warning(
            f"step attribution differs: strong {steps.one_indexed()},"
            f" weak {weak_steps.one_indexed()}"
        )

    columns = infer_pivot_columns(steps, n)
    recovered = back_substitute(columns, steps)
    row_updates = sum(len(step) for step in steps.steps)
    _logger.info(
        f"recovered {n}x{n} matrix from {row_updates} row updates,"
        f" {len(victim_trace.evictions)} evictions"
    )
    return LeakDemoResult(
        recovered=recovered,
        inverse=inverse,
        steps=steps,
        weak_steps=weak_steps,
        columns=columns,
        eviction_count=len(victim_trace.evictions),
        row_updates=row_updates,
    )
