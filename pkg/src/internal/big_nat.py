from collections.abc import Sequence

from internal.errors import DomainError

LIMB_BITS = 64
LIMB_BASE = 1 << LIMB_BITS
LIMB_MASK = LIMB_BASE - 1
LIMB_BYTES = LIMB_BITS // 8


class BigNat:
    """固定幅ワードのリトルエンディアン列で表す多倍長の符号なし整数."""

    __slots__ = ("_limbs",)

    def __init__(self, limbs: Sequence[int]) -> None:
        for limb in limbs:
            if limb < 0 or limb > LIMB_MASK:
                raise DomainError(f"limb out of range: {limb}")
        self._limbs = _normalize(list(limbs))

    @classmethod
    def from_int(cls, value: int) -> "BigNat":
        if value < 0:
            raise DomainError("BigNat is unsigned.")
        limbs: list[int] = list()
        while value > 0:
            limbs.append(value & LIMB_MASK)
            value >>= LIMB_BITS
        return cls(limbs)

    @classmethod
    def from_bytes(cls, data: bytes, byteorder: str = "big") -> "BigNat":
        raw = data if byteorder == "little" else data[::-1]
        limbs = [
            int.from_bytes(raw[i : i + LIMB_BYTES], "little")
            for i in range(0, len(raw), LIMB_BYTES)
        ]
        return cls(limbs)

    @classmethod
    def one(cls) -> "BigNat":
        return cls([1])

    @property
    def limbs(self) -> tuple[int, ...]:
        return tuple(self._limbs)

    @property
    def bit_len(self) -> int:
        return (len(self._limbs) - 1) * LIMB_BITS + self._limbs[-1].bit_length()

    def is_zero(self) -> bool:
        return self._limbs == [0]

    def to_int(self) -> int:
        value = 0
        for limb in reversed(self._limbs):
            value = (value << LIMB_BITS) | limb
        return value

    def to_bytes(self, length: int) -> bytes:
        """リトルエンディアンでlengthバイトに詰める(領域への書き込み形式)."""
        raw = b"".join(limb.to_bytes(LIMB_BYTES, "little") for limb in self._limbs)
        if len(raw.rstrip(b"\x00")) > length:
            raise DomainError(f"value does not fit in {length} bytes.")
        return raw[:length].ljust(length, b"\x00")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BigNat):
            return NotImplemented
        return self._limbs == other._limbs

    def __lt__(self, other: "BigNat") -> bool:
        return compare(self, other) < 0

    def __le__(self, other: "BigNat") -> bool:
        return compare(self, other) <= 0

    def __hash__(self) -> int:
        return hash(tuple(self._limbs))

    def __repr__(self) -> str:
        return f"BigNat(0x{self.to_int():x})"


def compare(a: BigNat, b: BigNat) -> int:
    la, lb = a._limbs, b._limbs
    if len(la) != len(lb):
        return -1 if len(la) < len(lb) else 1
    for x, y in zip(reversed(la), reversed(lb)):
        if x != y:
            return -1 if x < y else 1
    return 0


def mul(a: BigNat, b: BigNat) -> BigNat:
    """筆算による乗算."""
    return BigNat(_mul_limbs(a._limbs, b._limbs))


def divmod_nat(a: BigNat, b: BigNat) -> tuple[BigNat, BigNat]:
    """KnuthのアルゴリズムDによる除算."""
    if b.is_zero():
        raise DomainError("division by zero.")
    q, r = _divmod_limbs(a._limbs, b._limbs)
    return BigNat(q), BigNat(r)


def mod_mul(a: BigNat, b: BigNat, n: BigNat) -> BigNat:
    if compare(n, BigNat.one()) <= 0:
        raise DomainError("modulus must be greater than 1.")
    _, r = divmod_nat(mul(a, b), n)
    return r


def _normalize(limbs: list[int]) -> list[int]:
    while len(limbs) > 1 and limbs[-1] == 0:
        limbs.pop()
    if len(limbs) < 1:
        limbs.append(0)
    return limbs


def _mul_limbs(a: list[int], b: list[int]) -> list[int]:
    result = [0] * (len(a) + len(b))
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        carry = 0
        for j, bj in enumerate(b):
            t = result[i + j] + ai * bj + carry
            result[i + j] = t & LIMB_MASK
            carry = t >> LIMB_BITS
        result[i + len(b)] = carry
    return _normalize(result)


def _shift_left(x: list[int], shift: int, extra: int) -> list[int]:
    if shift == 0:
        return list(x) + [0] * extra
    out: list[int] = list()
    carry = 0
    for limb in x:
        out.append(((limb << shift) & LIMB_MASK) | carry)
        carry = limb >> (LIMB_BITS - shift)
    if extra:
        out.append(carry)
    return out


def _shift_right(x: list[int], shift: int) -> list[int]:
    if shift == 0:
        return list(x)
    out: list[int] = list()
    for i, limb in enumerate(x):
        high = x[i + 1] if i + 1 < len(x) else 0
        out.append((limb >> shift) | ((high << (LIMB_BITS - shift)) & LIMB_MASK))
    return out


def _divmod_short(u: list[int], d: int) -> tuple[list[int], list[int]]:
    q = [0] * len(u)
    rem = 0
    for i in range(len(u) - 1, -1, -1):
        cur = (rem << LIMB_BITS) | u[i]
        q[i], rem = divmod(cur, d)
    return _normalize(q), [rem]


def _divmod_limbs(u: list[int], v: list[int]) -> tuple[list[int], list[int]]:
    u = _normalize(list(u))
    v = _normalize(list(v))
    if len(u) < len(v) or (len(u) == len(v) and u[::-1] < v[::-1]):
        return [0], u
    if len(v) == 1:
        return _divmod_short(u, v[0])

    # 除数の最上位ワードの最上位ビットが立つように正規化する
    shift = LIMB_BITS - v[-1].bit_length()
    vn = _shift_left(v, shift, 0)
    un = _shift_left(u, shift, 1)
    n = len(vn)
    m = len(u) - n
    q = [0] * (m + 1)

    for j in range(m, -1, -1):
        num = (un[j + n] << LIMB_BITS) | un[j + n - 1]
        qhat, rhat = divmod(num, vn[n - 1])
        while qhat >= LIMB_BASE or qhat * vn[n - 2] > (
            (rhat << LIMB_BITS) | un[j + n - 2]
        ):
            qhat -= 1
            rhat += vn[n - 1]
            if rhat >= LIMB_BASE:
                break

        borrow = 0
        carry = 0
        for i in range(n):
            p = qhat * vn[i] + carry
            carry = p >> LIMB_BITS
            t = un[i + j] - (p & LIMB_MASK) - borrow
            un[i + j] = t & LIMB_MASK
            borrow = 1 if t < 0 else 0
        t = un[j + n] - carry - borrow
        un[j + n] = t & LIMB_MASK

        if t < 0:
            # 引きすぎたので1回分足し戻す
            qhat -= 1
            carry = 0
            for i in range(n):
                s = un[i + j] + vn[i] + carry
                un[i + j] = s & LIMB_MASK
                carry = s >> LIMB_BITS
            un[j + n] = (un[j + n] + carry) & LIMB_MASK
        q[j] = qhat

    return _normalize(q), _normalize(_shift_right(un[:n], shift))
