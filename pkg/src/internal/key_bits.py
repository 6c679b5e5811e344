from pydantic import BaseModel, ConfigDict, field_validator

from internal.errors import DomainError

BYTES_PER_LINE = 8


class KeyBits(BaseModel):
    """秘密指数k. bitsは実行順(MSBであるk_{t-1}が先頭)に並べる."""

    model_config = ConfigDict(frozen=True)

    bits: tuple[bool, ...]

    @field_validator("bits")
    @classmethod
    def _not_empty(cls, bits: tuple[bool, ...]) -> tuple[bool, ...]:
        if len(bits) < 1:
            raise ValueError("key must have at least one bit.")
        return bits

    @classmethod
    def from_int(cls, value: int, t: int) -> "KeyBits":
        if value < 0 or value.bit_length() > t:
            raise DomainError(f"key value does not fit in {t} bits.")
        return cls(bits=tuple(bool((value >> j) & 1) for j in range(t - 1, -1, -1)))

    @classmethod
    def from_bytes(cls, data: bytes) -> "KeyBits":
        return cls.from_int(int.from_bytes(data, "big"), len(data) * 8)

    @classmethod
    def from_hex(cls, text: str) -> "KeyBits":
        """`1a 4b 28 ...`のような空白区切りのダンプも受け付ける."""
        try:
            data = bytes.fromhex("".join(text.split()))
        except ValueError as e:
            raise DomainError(f"key is not hexadecimal: {text!r}") from e
        if len(data) < 1:
            raise DomainError("key must have at least one byte.")
        return cls.from_bytes(data)

    @property
    def t(self) -> int:
        return len(self.bits)

    def bit(self, j: int) -> bool:
        """k_jを返す(j=0が最下位)."""
        return self.bits[self.t - 1 - j]

    def to_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | int(b)
        return value

    def hamming_weight(self) -> int:
        return sum(self.bits)

    def byte_view(self) -> bytes:
        return self.to_int().to_bytes((self.t + 7) // 8, "big")

    def hex_lines(self) -> list[str]:
        data = self.byte_view()
        return [
            " ".join(f"{b:02x}" for b in data[i : i + BYTES_PER_LINE])
            for i in range(0, len(data), BYTES_PER_LINE)
        ]

    def flip(self, j: int) -> "KeyBits":
        bits = list(self.bits)
        bits[self.t - 1 - j] = not bits[self.t - 1 - j]
        return KeyBits(bits=tuple(bits))
