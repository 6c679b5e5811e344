from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict


class TraceRecord(BaseModel):
    """トレースログの1イベント分."""

    model_config = ConfigDict(frozen=True)

    t: int  # イベントクロック
    kind: Literal["store", "snapshot", "evict"]
    addr: str  # 16進表記
    len: int
    dirty: bool | None = None  # evictのときのみ

    @classmethod
    def of(
        cls, t: int, kind: str, addr: int, length: int, dirty: bool | None = None
    ) -> "TraceRecord":
        return cls(t=t, kind=kind, addr=f"0x{addr:x}", len=length, dirty=dirty)

    @property
    def address(self) -> int:
        return int(self.addr, 16)


class TraceLogFile:
    """トレースをJSON-lines形式で保存する."""

    def __init__(self, filepath: Path) -> None:
        self._filepath = filepath

    def save(self, records: list[TraceRecord]) -> None:
        lines = [record.model_dump_json(exclude_none=True) for record in records]
        self._filepath.write_text("".join(f"{line}\n" for line in lines))

    def get_record_list(self) -> list[TraceRecord]:
        if not self._filepath.exists():
            return list()

        return [
            TraceRecord.model_validate_json(line)
            for line in self._filepath.read_text().splitlines()
            if line.strip() != ""
        ]

    def clean(self) -> None:
        if not self._filepath.exists():
            return

        self._filepath.unlink()
