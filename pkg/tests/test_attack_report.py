import os
from pathlib import Path

from internal.attack_report import (
    AttackReport,
    AttackReportFile,
    AttackReportWriter,
    PhaseStats,
)


def _key_report(**changes: object) -> AttackReport:
    values: dict[str, object] = dict(
        victim="ladder",
        seed=1,
        secret_kind="key",
        planted=["1a 4b 28 41 e6 27 d4 7d"],
        recovered=["1a 4b 28 41 e6 27 d4 7d"],
        page_addr=0xD271C000,
        phases=[PhaseStats(name="identify", victim_events=10, snapshots=4)],
    )
    values.update(changes)
    return AttackReport.model_validate(values)


def test_successful_key_report_text() -> None:
    lines = _key_report().to_text().split(os.linesep)
    assert lines[:6] == [
        "Matching Pattern ...",
        "Page Finding: Successful.",
        "Victim Page Address : 0xd271c000",
        "Attack Successful.",
        "Inferred Key is:",
        "1a 4b 28 41 e6 27 d4 7d",
    ]
    assert lines[6] == "Phase identify: 10 victim events, 4 snapshots, 0 bytes scanned"


def test_wrong_key_is_a_failure() -> None:
    report = _key_report(recovered=["00 00 00 00 00 00 00 00"])
    assert not report.success
    assert "Attack Failed: recovered secret does not match." in report.to_text()


def test_page_finding_failure() -> None:
    report = _key_report(
        recovered=None, page_addr=None, failure="IdentificationFailed: no block"
    )
    text = report.to_text()
    assert "Page Finding: Failed." in text
    assert "Attack Failed: IdentificationFailed: no block" in text
    assert "Inferred Key is:" not in text


def test_matrix_report_has_no_page_lines() -> None:
    report = AttackReport(
        victim="gauss_jordan",
        seed=0,
        secret_kind="matrix",
        planted=["10", "11"],
        recovered=["10", "11"],
        details=["Steps: {2}, {}"],
    )
    lines = report.to_text().split(os.linesep)
    assert lines[:5] == [
        "Steps: {2}, {}",
        "Attack Successful.",
        "Recovered S is:",
        "10",
        "11",
    ]


def test_json_round_trip(tmp_path: Path) -> None:
    file = AttackReportFile(filepath=tmp_path / "report.json")
    assert file.load() is None

    report = _key_report()
    file.save(report)
    assert '"success": true' in (tmp_path / "report.json").read_text()
    assert file.load() == report

    file.clean()
    assert file.load() is None


def test_text_writer(tmp_path: Path) -> None:
    writer = AttackReportWriter(filepath=tmp_path / "report.txt")
    writer.save(_key_report())
    assert (tmp_path / "report.txt").read_text().startswith("Matching Pattern ...")
    writer.clean()
    assert not (tmp_path / "report.txt").exists()
