import os
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, computed_field


class PhaseStats(BaseModel):
    """攻撃の1段階で消費した模擬コスト."""

    name: str
    victim_events: int = 0
    snapshots: int = 0
    bytes_scanned: int = 0


class AttackReport(BaseModel):
    """シナリオ1回分の攻撃結果."""

    victim: str
    seed: int
    secret_kind: Literal["key", "matrix"]
    planted: list[str]
    recovered: list[str] | None = None
    page_addr: int | None = None
    phases: list[PhaseStats] = list()
    failure: str | None = None
    details: list[str] = list()

    @computed_field  # type: ignore[prop-decorator]
    @property
    def success(self) -> bool:
        return self.recovered is not None and self.recovered == self.planted

    def to_text(self) -> str:
        """攻撃ツールのコンソール出力と同じ並びで整形する."""
        lines: list[str] = list()
        if self.secret_kind == "key":
            lines.append("Matching Pattern ...")
            if self.page_addr is None:
                lines.append("Page Finding: Failed.")
            else:
                lines.append("Page Finding: Successful.")
                lines.append(f"Victim Page Address : 0x{self.page_addr:x}")

        lines.extend(self.details)
        if self.success:
            lines.append("Attack Successful.")
        elif self.failure is not None:
            lines.append(f"Attack Failed: {self.failure}")
        else:
            lines.append("Attack Failed: recovered secret does not match.")

        if self.recovered is not None:
            is_key = self.secret_kind == "key"
            lines.append("Inferred Key is:" if is_key else "Recovered S is:")
            lines.extend(self.recovered)

        for phase in self.phases:
            lines.append(
                f"Phase {phase.name}: {phase.victim_events} victim events,"
                f" {phase.snapshots} snapshots, {phase.bytes_scanned} bytes scanned"
            )
        return os.linesep.join(lines) + os.linesep


class AttackReportWriter:
    """攻撃結果をテキストで保存する."""

    def __init__(self, filepath: Path) -> None:
        self._filepath = filepath

    def save(self, report: AttackReport) -> None:
        self._filepath.write_text(report.to_text())

    def clean(self) -> None:
        if not self._filepath.exists():
            return

        self._filepath.unlink()


class AttackReportFile:
    """攻撃結果をJSONで保存する."""

    def __init__(self, filepath: Path) -> None:
        self._filepath = filepath

    def save(self, report: AttackReport) -> None:
        self._filepath.write_text(report.model_dump_json(indent=2))

    def load(self) -> AttackReport | None:
        if not self._filepath.exists():
            return None

        return AttackReport.model_validate_json(self._filepath.read_text())

    def clean(self) -> None:
        if not self._filepath.exists():
            return

        self._filepath.unlink()
