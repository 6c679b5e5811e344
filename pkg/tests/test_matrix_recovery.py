import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from internal.bit_matrix import BitMatrix
from internal.matrix_recovery import (
    ObservedColumns,
    apply_row_step,
    back_substitute,
    infer_pivot_columns,
    mceliece_decrypt_leak_demo,
)
from internal.row_op_observer import RowOpTrace

WORKED_ROWS = ["1010", "1101", "0100", "1011"]
WORKED_STEPS = RowOpTrace(steps=((1, 3), (2,), (0, 1), (0, 2)))


def test_pivot_columns_of_worked_example() -> None:
    columns = infer_pivot_columns(WORKED_STEPS, 4)
    assert columns.columns == (
        (1, 1, 0, 1),
        (0, 1, 1, 0),
        (1, 1, 1, 0),
        (1, 0, 1, 1),
    )


def test_back_substitution_of_worked_example() -> None:
    recovered = back_substitute(infer_pivot_columns(WORKED_STEPS, 4), WORKED_STEPS)
    assert recovered.column(1) == (0, 1, 1, 0)
    assert recovered.column(2) == (1, 0, 0, 1)
    assert recovered.column(3) == (0, 1, 0, 1)
    assert recovered == BitMatrix.from_rows(WORKED_ROWS)


@st.composite
def _steps_and_column(draw: st.DrawFn) -> tuple[RowOpTrace, list[int]]:
    n = draw(st.integers(2, 12))
    steps: list[tuple[int, ...]] = list()
    for p in range(n):
        others = [r for r in range(n) if r != p]
        steps.append(tuple(sorted(draw(st.sets(st.sampled_from(others))))))
    column = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    return RowOpTrace(steps=tuple(steps)), column


@given(_steps_and_column())
def test_row_steps_are_self_inverse(case: tuple[RowOpTrace, list[int]]) -> None:
    ops, column = case
    for p, targets in enumerate(ops.steps):
        once = apply_row_step(column, p, targets)
        assert apply_row_step(once, p, targets) == column

    # 全ステップを順に適用した後、逆順に適用すると元の列に戻る
    values = column
    for p, targets in enumerate(ops.steps):
        values = apply_row_step(values, p, targets)
    for p in reversed(range(ops.n)):
        values = apply_row_step(values, p, ops.steps[p])
    assert values == column


def test_pivot_entry_must_be_one() -> None:
    with pytest.raises(ValidationError):
        ObservedColumns(columns=((0, 1), (0, 1)))


def test_demo_on_worked_example() -> None:
    result = mceliece_decrypt_leak_demo(BitMatrix.from_rows(WORKED_ROWS))
    assert result.steps.one_indexed() == [[2, 4], [3], [1, 2], [1, 3]]
    assert result.modes_agree
    assert result.row_updates == 6
    assert result.recovered == BitMatrix.from_rows(WORKED_ROWS)
    assert result.inverse.matmul(result.recovered) == BitMatrix.identity(4)


def test_demo_on_identity() -> None:
    result = mceliece_decrypt_leak_demo(BitMatrix.identity(6))
    assert result.row_updates == 0
    assert result.recovered == BitMatrix.identity(6)


@pytest.mark.parametrize("ways", [1, 2, 4])
def test_demo_with_other_associativity(ways: int) -> None:
    s = BitMatrix.random_swap_free(8, np.random.default_rng(ways))
    result = mceliece_decrypt_leak_demo(s, ways=ways)
    assert result.recovered == s
    assert result.modes_agree


@pytest.mark.parametrize("n", [8, 16])
def test_random_matrices_are_recovered(n: int) -> None:
    rng = np.random.default_rng(n)
    for _ in range(50):
        s = BitMatrix.random_swap_free(n, rng)
        result = mceliece_decrypt_leak_demo(s)
        assert result.recovered == s
        assert result.modes_agree


@pytest.mark.slow
@pytest.mark.parametrize("n", [32, 64])
def test_large_random_matrices_are_recovered(n: int) -> None:
    rng = np.random.default_rng(n)
    for _ in range(50):
        s = BitMatrix.random_swap_free(n, rng)
        result = mceliece_decrypt_leak_demo(s)
        assert result.recovered == s
        assert result.modes_agree
