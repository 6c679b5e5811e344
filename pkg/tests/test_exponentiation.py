import numpy as np
import pytest
from conftest import SMALL_MEMORY, store_labels
from hypothesis import given, settings
from hypothesis import strategies as st

from internal.big_nat import BigNat
from internal.errors import ConfigurationError, DomainError
from internal.exponentiation import (
    SPILL_INTERVAL,
    ContinuousVictim,
    exp_montgomery_ladder,
    exp_square_multiply,
)
from internal.key_bits import KeyBits
from internal.operand_region import RegionLabel, VictimLayout
from internal.sim_memory import SimMemory

R0 = RegionLabel.R0
R1 = RegionLabel.R1


def _random_int(rng: np.random.Generator, bits: int) -> int:
    data = rng.integers(0, 256, size=(bits + 7) // 8, dtype=np.uint8).tobytes()
    return int.from_bytes(data, "big") >> ((-bits) % 8)


def _ladder(
    g: int, k: KeyBits, n: int, mem: SimMemory, layout: VictimLayout
) -> tuple[int, list[RegionLabel]]:
    result = exp_montgomery_ladder(
        BigNat.from_int(g), k, BigNat.from_int(n), mem, layout
    )
    # 先頭2回は初期化の書き込み
    return result.to_int(), store_labels(mem, layout)[2:]


def test_ladder_small_example(traced_memory: SimMemory) -> None:
    layout = VictimLayout.plan(0, 10)
    result, labels = _ladder(2, KeyBits.from_int(5, 3), 1000, traced_memory, layout)
    assert result == 32
    assert labels == [R0, R1, R1, R0, R0, R1]


def test_ladder_identity_base_keeps_write_count(traced_memory: SimMemory) -> None:
    layout = VictimLayout.plan(0, 10)
    key = KeyBits.from_int(0b1100101, 7)
    result, labels = _ladder(1, key, 1000, traced_memory, layout)
    assert result == 1
    assert len(labels) == 2 * key.t


def test_ladder_writes_through_to_memory(traced_memory: SimMemory) -> None:
    layout = VictimLayout.plan(0, 64)
    n = 0xFFFFFFFFFFFFFFC5
    result, _ = _ladder(12345, KeyBits.from_int(0xBEEF, 16), n, traced_memory, layout)
    stored = traced_memory.read(layout.r0.base_addr, layout.r0.length)
    assert int.from_bytes(stored, "little") == result == pow(12345, 0xBEEF, n)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**16 - 1))
def test_ladder_write_order_encodes_key(value: int) -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY, record_trace=True)
    layout = VictimLayout.plan(0, 64)
    key = KeyBits.from_int(value, 16)
    _, labels = _ladder(3, key, 0xFFFFFFFFFFFFFFC5, mem, layout)

    assert len(labels) == 2 * key.t
    decoded = [labels[i] == R0 and labels[i + 1] == R1 for i in range(0, 32, 2)]
    assert all(labels[i] != labels[i + 1] for i in range(0, 32, 2))
    assert tuple(decoded) == key.bits


def test_square_multiply_small_example(traced_memory: SimMemory) -> None:
    layout = VictimLayout.plan(0, 10)
    result = exp_square_multiply(
        BigNat.from_int(2),
        KeyBits.from_int(5, 3),
        BigNat.from_int(1000),
        traced_memory,
        layout,
    )
    labels = store_labels(traced_memory, layout)[2:]
    assert result.to_int() == 32
    # ビットごとにR0へ(2, 1, 2)回書き込む
    assert labels == [R0] * 5


def test_square_multiply_zero_key(traced_memory: SimMemory) -> None:
    layout = VictimLayout.plan(0, 10)
    result = exp_square_multiply(
        BigNat.from_int(7),
        KeyBits.from_int(0, 9),
        BigNat.from_int(1000),
        traced_memory,
        layout,
    )
    assert result.to_int() == 1
    assert store_labels(traced_memory, layout)[2:] == [R0] * 9


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**24 - 1))
def test_square_multiply_write_count(value: int) -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY, record_trace=True)
    layout = VictimLayout.plan(0, 64)
    key = KeyBits.from_int(value, 24)
    exp_square_multiply(
        BigNat.from_int(5), key, BigNat.from_int(0xFFFFFFFFFFFFFFC5), mem, layout
    )
    labels = store_labels(mem, layout)
    assert labels[:2] == [R0, R1]
    assert labels[2:] == [R0] * (key.t + key.hamming_weight())


def test_both_victims_match_pow_oracle() -> None:
    rng = np.random.default_rng(1)
    layout = VictimLayout.plan(0, 64)
    for _ in range(1000):
        n = _random_int(rng, 64) | (1 << 63) | 1
        g = _random_int(rng, 64) % n
        k = KeyBits.from_int(_random_int(rng, 32), 32)
        expected = pow(g, k.to_int(), n)
        for victim in (exp_montgomery_ladder, exp_square_multiply):
            mem = SimMemory(size_bytes=SMALL_MEMORY)
            result = victim(BigNat.from_int(g), k, BigNat.from_int(n), mem, layout)
            assert result.to_int() == expected


def test_full_size_victims_agree() -> None:
    rng = np.random.default_rng(2)
    layout = VictimLayout.plan(0, 1024)
    n = _random_int(rng, 1024) | (1 << 1023) | 1
    g = _random_int(rng, 1024) % n
    k = KeyBits.from_int(_random_int(rng, 512), 512)

    mem = SimMemory(size_bytes=SMALL_MEMORY)
    ladder = exp_montgomery_ladder(
        BigNat.from_int(g), k, BigNat.from_int(n), mem, layout
    )
    square = exp_square_multiply(
        BigNat.from_int(g), k, BigNat.from_int(n), mem, layout
    )
    assert ladder == square
    assert ladder.to_int() == pow(g, k.to_int(), n)


def test_region_too_small_for_modulus(traced_memory: SimMemory) -> None:
    layout = VictimLayout.plan(0, 512)
    n = BigNat.from_int((1 << 1023) + 1)
    with pytest.raises(ConfigurationError):
        exp_montgomery_ladder(
            BigNat.from_int(2), KeyBits.from_int(1, 1), n, traced_memory, layout
        )


def test_base_must_be_below_modulus(traced_memory: SimMemory) -> None:
    layout = VictimLayout.plan(0, 10)
    with pytest.raises(DomainError):
        exp_montgomery_ladder(
            BigNat.from_int(1000),
            KeyBits.from_int(1, 1),
            BigNat.from_int(1000),
            traced_memory,
            layout,
        )


def test_scratch_spill_lands_in_page(traced_memory: SimMemory) -> None:
    layout = VictimLayout.plan(0, 64, scratch_in_page=True)
    assert layout.scratch_addr == 4096 - 64
    key = KeyBits.from_int(0xA5A5A5A5, 32)
    exp_montgomery_ladder(
        BigNat.from_int(3),
        key,
        BigNat.from_int(0xFFFFFFFFFFFFFFC5),
        traced_memory,
        layout,
    )
    assert traced_memory.trace is not None
    spills = [
        r
        for r in traced_memory.trace
        if r.kind == "store" and r.address == layout.scratch_addr
    ]
    assert len(spills) == (2 * key.t) // SPILL_INTERVAL


def test_continuous_victim_processes_every_message() -> None:
    mem = SimMemory(size_bytes=SMALL_MEMORY)
    layout = VictimLayout.plan(0, 64)
    n = 0xFFFFFFFFFFFFFFC5
    key = KeyBits.from_int(0xC0FFEE, 24)
    messages = [BigNat.from_int(g) for g in (2, 3, 0x123456789)]
    victim = ContinuousVictim(
        exp_montgomery_ladder, key, BigNat.from_int(n), messages, mem, layout
    )
    outputs = victim()
    assert [o.to_int() for o in outputs] == [
        pow(m.to_int(), key.to_int(), n) for m in messages
    ]
    assert mem.victim_time == len(messages) * 8 * key.t
