from collections.abc import Mapping
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from internal.cache_model import CachePolicy
from internal.errors import ConfigurationError
from internal.key_bits import KeyBits
from internal.sim_memory import DEFAULT_MEMORY_SIZE, MiB


class VictimKind(Enum):
    """シナリオで走らせる被害者."""

    LADDER = "ladder"
    SQUARE_MULTIPLY = "square_multiply"
    GAUSS_JORDAN = "gauss_jordan"


class ScenarioConfig(BaseModel):
    """1回のシミュレーションの設定.

    Notes
    -----
    cache_policyはべき乗剰余の被害者に適用する。
    gauss_jordanは常にライトバックで、セット数はmatrix_nになる。
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=0, ge=0, lt=2**64)
    victim: VictimKind = VictimKind.LADDER
    key_bits: int = Field(default=512, gt=0)
    modulus_bits: int = Field(default=1024, gt=1)
    message_bytes: int = Field(default=128, gt=0)
    messages: int = Field(default=4, gt=0)
    memory_size: int = Field(default=DEFAULT_MEMORY_SIZE, gt=0)
    page_size: int = Field(default=4096, gt=0)
    line_size: int = Field(default=64, gt=0)
    block_size: int = Field(default=4 * MiB, gt=0)
    oversampling: int = Field(default=2, ge=1)
    bytes_per_tick: int = Field(default=1 * MiB, gt=0)
    cache_sets: int = Field(default=64, gt=0)
    cache_ways: int = Field(default=2, gt=0)
    cache_policy: CachePolicy = CachePolicy.WRITE_THROUGH
    matrix_n: int = Field(default=4, gt=1)
    paper_example: bool = False
    scratch_in_page: bool = False
    noise_floor: float = Field(default=0.05, ge=0.0, lt=1.0)
    lenient_lines: int = Field(default=0, ge=0)
    decoys: int = Field(default=0, ge=0)
    planted_key: str | None = None  # 16進数. 未指定ならseedから生成する
    victim_page: int | None = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _consistent(self) -> "ScenarioConfig":
        if self.page_size % self.line_size != 0:
            raise ValueError("page_size must be a multiple of line_size.")
        if self.block_size % self.page_size != 0:
            raise ValueError("block_size must be a multiple of page_size.")
        if self.memory_size % self.block_size != 0:
            raise ValueError("memory_size must be a multiple of block_size.")
        if self.key_bits > self.modulus_bits:
            raise ValueError("key_bits must not exceed modulus_bits.")
        if self.message_bytes * 8 > self.modulus_bits:
            raise ValueError("messages must be smaller than the modulus.")
        if self.paper_example and self.matrix_n != 4:
            raise ValueError("the worked example matrix is 4x4.")
        if self.victim_page is not None and (
            self.victim_page % self.page_size != 0
            or self.victim_page >= self.memory_size
        ):
            raise ValueError("victim_page must be a page inside memory.")
        if self.planted_key is not None:
            t = KeyBits.from_hex(self.planted_key).t
            if t != self.key_bits:
                raise ValueError(f"planted key has {t} bits, expected {self.key_bits}.")
        return self

    @field_validator("planted_key")
    @classmethod
    def _hex_key(cls, value: str | None) -> str | None:
        if value is not None:
            KeyBits.from_hex(value)
        return value

    def to_text(self) -> str:
        lines: list[str] = list()
        for name, value in self.model_dump(mode="json").items():
            if value is None:
                continue
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{name}={value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ScenarioConfig":
        values: dict[str, str] = dict()
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if len(line) < 1:
                continue
            if "=" not in line:
                raise ConfigurationError(f"line {number}: expected key=value: {raw}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in cls.model_fields:
                raise ConfigurationError(f"line {number}: unknown key {key}")
            values[key] = value
        return cls.build(values)

    @classmethod
    def build(cls, values: Mapping[str, Any]) -> "ScenarioConfig":
        """検証エラーをConfigurationErrorとして返す."""
        try:
            return cls.model_validate(dict(values))
        except ValidationError as e:
            raise ConfigurationError(str(e)) from e

    def override(self, **changes: object) -> "ScenarioConfig":
        """Noneでない値だけを上書きした設定を作る."""
        values = self.model_dump()
        values.update({k: v for k, v in changes.items() if v is not None})
        return self.build(values)


class ScenarioConfigFile:
    """シナリオ設定をkey=value形式のテキストで保存する."""

    def __init__(self, filepath: Path) -> None:
        self._filepath = filepath

    def save(self, config: ScenarioConfig) -> None:
        self._filepath.write_text(config.to_text())

    def load(self) -> ScenarioConfig:
        if not self._filepath.exists():
            raise ConfigurationError(f"config file not found: {self._filepath}")

        return ScenarioConfig.from_text(self._filepath.read_text())

    def clean(self) -> None:
        if not self._filepath.exists():
            return

        self._filepath.unlink()
