from enum import Enum

from pydantic import BaseModel, ConfigDict

from internal.errors import ConfigurationError


class RegionLabel(Enum):
    """観測対象となるオペランド変数."""

    R0 = "R0"
    R1 = "R1"


class OperandRegion(BaseModel):
    """R0またはR1を格納するメモリ領域."""

    model_config = ConfigDict(frozen=True)

    base_addr: int
    length: int
    label: RegionLabel

    @property
    def end(self) -> int:
        return self.base_addr + self.length

    def overlaps(self, addr: int, length: int) -> bool:
        return addr < self.end and self.base_addr < addr + length


def operand_region_length(modulus_bits: int, line_size: int) -> int:
    """剰余のバイト数をキャッシュライン単位に切り上げる."""
    operand_bytes = (modulus_bits + 7) // 8
    return -(-operand_bytes // line_size) * line_size


class VictimLayout(BaseModel):
    """被害者ページ内の変数配置.

    Notes
    -----
    宣言順にR0, R1を並べ、間に書き込まれないラインを1本以上空ける。
    scratch_addrがNoneのときレジスタ退避はページ外扱いで観測されない。
    """

    model_config = ConfigDict(frozen=True)

    page_addr: int
    page_size: int
    r0: OperandRegion
    r1: OperandRegion
    scratch_addr: int | None = None

    @classmethod
    def plan(
        cls,
        page_addr: int,
        modulus_bits: int,
        line_size: int = 64,
        page_size: int = 4096,
        gap_lines: int = 1,
        scratch_in_page: bool = False,
    ) -> "VictimLayout":
        length = operand_region_length(modulus_bits, line_size)
        if gap_lines < 1:
            raise ConfigurationError("R0 and R1 must be separated by a free line.")
        r1_offset = length + gap_lines * line_size
        scratch_offset = page_size - line_size
        needed = r1_offset + length + (line_size if scratch_in_page else 0)
        if needed > page_size:
            raise ConfigurationError(
                f"operands of {modulus_bits} bits do not fit in a"
                f" {page_size} byte page."
            )
        return cls(
            page_addr=page_addr,
            page_size=page_size,
            r0=OperandRegion(base_addr=page_addr, length=length, label=RegionLabel.R0),
            r1=OperandRegion(
                base_addr=page_addr + r1_offset, length=length, label=RegionLabel.R1
            ),
            scratch_addr=(page_addr + scratch_offset) if scratch_in_page else None,
        )

    def region(self, label: RegionLabel) -> OperandRegion:
        return self.r0 if label is RegionLabel.R0 else self.r1

    def label_of(self, addr: int) -> RegionLabel | None:
        for region in (self.r0, self.r1):
            if region.base_addr <= addr < region.end:
                return region.label
        return None
