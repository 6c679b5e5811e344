import pytest
from hypothesis import given
from hypothesis import strategies as st

from internal.big_nat import LIMB_BITS, BigNat, compare, divmod_nat, mod_mul, mul
from internal.errors import DomainError

_naturals = st.integers(min_value=0, max_value=2**1100)


def test_zero_has_one_limb() -> None:
    zero = BigNat.from_int(0)
    assert zero.limbs == (0,)
    assert zero.is_zero()
    assert BigNat([0, 0, 0]).limbs == (0,)


def test_canonical_form_drops_leading_zero_limbs() -> None:
    value = BigNat([5, 0, 0])
    assert value.limbs == (5,)
    assert value.bit_len == 3


def test_negative_is_rejected() -> None:
    with pytest.raises(DomainError):
        BigNat.from_int(-1)


@pytest.mark.parametrize(
    "a, b, n, expected",
    [
        (3, 4, 7, 5),
        (0, 123456789, 1000003, 0),
        (2**64 - 1, 2**64 - 1, 2**64 + 13, ((2**64 - 1) ** 2) % (2**64 + 13)),
    ],
)
def test_mod_mul_examples(a: int, b: int, n: int, expected: int) -> None:
    result = mod_mul(BigNat.from_int(a), BigNat.from_int(b), BigNat.from_int(n))
    assert result.to_int() == expected


@pytest.mark.parametrize("n", [0, 1])
def test_mod_mul_rejects_small_modulus(n: int) -> None:
    with pytest.raises(DomainError):
        mod_mul(BigNat.from_int(1), BigNat.from_int(1), BigNat.from_int(n))


@given(_naturals)
def test_int_round_trip(value: int) -> None:
    nat = BigNat.from_int(value)
    assert nat.to_int() == value
    assert nat.bit_len == value.bit_length()
    assert nat.limbs[-1] != 0 or nat.limbs == (0,)


@given(_naturals, _naturals)
def test_compare_matches_int(a: int, b: int) -> None:
    expected = (a > b) - (a < b)
    assert compare(BigNat.from_int(a), BigNat.from_int(b)) == expected


@given(_naturals, _naturals)
def test_mul_matches_int(a: int, b: int) -> None:
    assert mul(BigNat.from_int(a), BigNat.from_int(b)).to_int() == a * b


@given(_naturals, st.integers(min_value=1, max_value=2**1100))
def test_divmod_matches_int(a: int, b: int) -> None:
    q, r = divmod_nat(BigNat.from_int(a), BigNat.from_int(b))
    assert (q.to_int(), r.to_int()) == divmod(a, b)


@given(
    st.integers(min_value=2**1023, max_value=2**1024 - 1),
    st.integers(min_value=0, max_value=2**1024 - 1),
    st.integers(min_value=0, max_value=2**1024 - 1),
)
def test_mod_mul_1024_bits_matches_int(n: int, a: int, b: int) -> None:
    a, b = a % n, b % n
    result = mod_mul(BigNat.from_int(a), BigNat.from_int(b), BigNat.from_int(n))
    assert result.to_int() == (a * b) % n
    assert 0 <= result.to_int() < n


def test_divmod_near_word_boundary() -> None:
    """全ビットが立った被除数とワード境界付近の除数."""
    b = (1 << (2 * LIMB_BITS)) - (1 << LIMB_BITS) + 1
    a = (1 << (4 * LIMB_BITS)) - 1
    q, r = divmod_nat(BigNat.from_int(a), BigNat.from_int(b))
    assert (q.to_int(), r.to_int()) == divmod(a, b)


def test_to_bytes_is_little_endian_and_padded() -> None:
    value = BigNat.from_int(0x0102)
    assert value.to_bytes(4) == b"\x02\x01\x00\x00"
    with pytest.raises(DomainError):
        BigNat.from_int(1 << 40).to_bytes(4)


def test_from_bytes_big_endian() -> None:
    data = bytes(range(1, 20))
    assert BigNat.from_bytes(data).to_int() == int.from_bytes(data, "big")
    assert BigNat.from_bytes(data, "little").to_int() == int.from_bytes(
        data, "little"
    )
