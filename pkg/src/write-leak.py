"""書き込みアクセスパターンの漏洩を模擬し、攻撃を実行する."""
import logging
import os
import sys
from argparse import ArgumentParser, Namespace
from enum import Enum
from logging import Formatter, StreamHandler
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from internal import (
    AttackReportFile,
    AttackReportWriter,
    CachePolicy,
    ConfigurationError,
    HistogramCsvWriter,
    IdentificationFailed,
    ScenarioConfig,
    ScenarioConfigFile,
    ScenarioRunner,
    SnapshotFile,
    TraceLogFile,
    VictimKind,
)

_logger = logging.getLogger(__name__)

# シード値を上書きする環境変数
SEED_ENV = "WRITELEAK_SEED"

EXIT_SUCCESS = 0
EXIT_ATTACK_FAILED = 1
EXIT_CONFIG_ERROR = 2


class _Command(Enum):
    """サブコマンド."""

    RUN = "run"
    IDENTIFY = "identify"
    HISTOGRAM = "histogram"
    TRACE = "trace"
    GF2 = "gf2"


class _RunConfig(BaseModel):
    """スクリプト実行のためのオプション."""

    command: _Command
    config_path: Path | None  # key=value形式のシナリオ設定
    overrides: dict[str, Any]  # コマンドラインで指定した設定値
    json_path: Path | None  # 攻撃結果のJSON出力先
    report_path: Path | None  # 攻撃結果のテキスト出力先
    csv_path: Path | None  # ヒストグラムの出力先
    out_path: Path | None  # トレースの出力先
    dump_dir: Path | None  # スナップショットのダンプ先フォルダ

    verbose: int  # ログレベル


def _main() -> int:
    """スクリプトのエントリポイント."""
    # 実行時引数の読み込み
    config = _parse_args()

    # ログ設定
    loglevel = {
        0: logging.ERROR,
        1: logging.WARNING,
        2: logging.INFO,
        3: logging.DEBUG,
    }.get(config.verbose, logging.DEBUG)
    script_filepath = Path(__file__)
    log_filepath = Path("data/interim") / f"{script_filepath.stem}.log"
    log_filepath.parent.mkdir(parents=True, exist_ok=True)
    _setup_logger(log_filepath, loglevel=loglevel)
    _logger.info(config)

    try:
        scenario = _load_scenario(config)
        return _dispatch(config, scenario)
    except ConfigurationError as e:
        _logger.error(f"invalid configuration: {e}")
        return EXIT_CONFIG_ERROR


def _load_scenario(config: _RunConfig) -> ScenarioConfig:
    """設定ファイル、コマンドライン、環境変数の順に上書きする."""
    scenario = ScenarioConfig()
    if config.config_path is not None:
        scenario = ScenarioConfigFile(filepath=config.config_path).load()
    scenario = scenario.override(**config.overrides)

    seed = os.environ.get(SEED_ENV)
    if seed is not None:
        if not seed.strip().isdigit():
            raise ConfigurationError(f"{SEED_ENV} must be an unsigned integer: {seed}")
        scenario = scenario.override(seed=int(seed))
    _logger.info(f"scenario: {scenario}")
    return scenario


def _dispatch(config: _RunConfig, scenario: ScenarioConfig) -> int:
    if config.command is _Command.GF2:
        scenario = scenario.override(victim=VictimKind.GAUSS_JORDAN)

    if config.command is _Command.HISTOGRAM:
        histogram = ScenarioRunner(scenario).histogram()
        csv_path = config.csv_path or Path("data/processed/histogram.csv")
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        HistogramCsvWriter(filepath=csv_path).save(histogram)
        _logger.info(f"histogram saved: {csv_path}")
        return EXIT_SUCCESS

    if config.command is _Command.TRACE:
        runner = ScenarioRunner(scenario, record_trace=True)
        records, snapshots = runner.capture_trace()
        out_path = config.out_path or Path("data/processed/trace.jsonl")
        out_path.parent.mkdir(parents=True, exist_ok=True)
        TraceLogFile(filepath=out_path).save(records)
        _logger.info(f"{len(records)} trace records saved: {out_path}")

        if config.dump_dir is not None:
            config.dump_dir.mkdir(parents=True, exist_ok=True)
            for i, snapshot in enumerate(snapshots):
                dump_path = config.dump_dir / f"{i:05d}.wlsnap"
                SnapshotFile(filepath=dump_path).save(snapshot)
            _logger.info(f"{len(snapshots)} snapshots saved: {config.dump_dir}")
        return EXIT_SUCCESS

    runner = ScenarioRunner(scenario)
    if config.command is _Command.IDENTIFY:
        planted = runner.plant()
        try:
            found = runner.identify(planted)
        except IdentificationFailed as e:
            sys.stdout.write(f"Page Finding: Failed. {e}{os.linesep}")
            return EXIT_ATTACK_FAILED
        sys.stdout.write(f"Page Finding: Successful.{os.linesep}")
        sys.stdout.write(f"Victim Page Address : 0x{found.page_addr:x}{os.linesep}")
        return EXIT_SUCCESS

    report = runner.run()
    sys.stdout.write(report.to_text())
    if config.json_path is not None:
        config.json_path.parent.mkdir(parents=True, exist_ok=True)
        AttackReportFile(filepath=config.json_path).save(report)
    if config.report_path is not None:
        config.report_path.parent.mkdir(parents=True, exist_ok=True)
        AttackReportWriter(filepath=config.report_path).save(report)
    return EXIT_SUCCESS if report.success else EXIT_ATTACK_FAILED


def _add_scenario_arguments(parser: ArgumentParser) -> None:
    """シナリオ設定を上書きする引数. 未指定のものは設定ファイルの値を使う."""
    parser.add_argument("--config", dest="config_path", help="シナリオ設定ファイル.")
    parser.add_argument("--seed", type=int, help="乱数シード.")
    parser.add_argument(
        "--victim", choices=[v.value for v in VictimKind], help="被害者の処理."
    )
    parser.add_argument("--key-bits", type=int, help="秘密鍵のビット数.")
    parser.add_argument("--modulus-bits", type=int, help="剰余のビット数.")
    parser.add_argument("--messages", type=int, help="被害者が処理する入力の数.")
    parser.add_argument("--memory-size", type=int, help="メモリサイズ(バイト).")
    parser.add_argument("--block-size", type=int, help="最初の走査ブロックサイズ.")
    parser.add_argument("--oversampling", type=int, help="更新1回あたりの取得回数.")
    parser.add_argument(
        "--cache-policy", choices=[v.value for v in CachePolicy], help="書き込み方式."
    )
    parser.add_argument("--cache-ways", type=int, help="キャッシュのウェイ数.")
    parser.add_argument("--n", dest="matrix_n", type=int, help="秘密行列の次数.")
    parser.add_argument(
        "--paper-example",
        action="store_const",
        const=True,
        help="例題の4x4行列を使う.",
    )
    parser.add_argument(
        "--scratch-in-page",
        action="store_const",
        const=True,
        help="レジスタ退避をページ内に書き込む.",
    )
    parser.add_argument("--decoys", type=int, help="おとりプロセスの数.")
    parser.add_argument("--planted-key", help="埋め込む鍵(16進数).")
    parser.add_argument("--noise-floor", type=float, help="ヒストグラムの雑音閾値.")
    parser.add_argument("--lenient-lines", type=int, help="許容する余分な変更ライン数.")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="詳細メッセージのレベルを設定."
    )


_OVERRIDE_KEYS = (
    "seed",
    "victim",
    "key_bits",
    "modulus_bits",
    "messages",
    "memory_size",
    "block_size",
    "oversampling",
    "cache_policy",
    "cache_ways",
    "matrix_n",
    "paper_example",
    "scratch_in_page",
    "decoys",
    "planted_key",
    "noise_floor",
    "lenient_lines",
)


def _parse_args(argv: list[str] | None = None) -> _RunConfig:
    """スクリプト実行のための引数を読み込む."""
    parser = ArgumentParser(description="書き込みアクセスパターンの漏洩を模擬する.")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="被害者を配置して攻撃全体を実行する.")
    _add_scenario_arguments(run)
    run.add_argument("--json", dest="json_path", help="攻撃結果のJSON出力先.")
    run.add_argument("--report", dest="report_path", help="攻撃結果のテキスト出力先.")

    identify = commands.add_parser("identify", help="被害者のページを特定する.")
    _add_scenario_arguments(identify)

    histogram = commands.add_parser("histogram", help="書き込みヒストグラムを出力する.")
    _add_scenario_arguments(histogram)
    histogram.add_argument("--csv", dest="csv_path", help="CSVの出力先.")

    trace = commands.add_parser("trace", help="アクセストレースを出力する.")
    _add_scenario_arguments(trace)
    trace.add_argument("--out", dest="out_path", help="JSON-linesの出力先.")
    trace.add_argument(
        "--dump-dir", dest="dump_dir", help="スナップショットを1件ずつ保存するフォルダ."
    )

    gf2 = commands.add_parser("gf2", help="GF(2)行列の逆行列計算からの漏洩.")
    gf2.add_argument("action", choices=["demo"], help="実行する処理.")
    _add_scenario_arguments(gf2)
    gf2.add_argument("--json", dest="json_path", help="攻撃結果のJSON出力先.")
    gf2.add_argument("--report", dest="report_path", help="攻撃結果のテキスト出力先.")

    args = parser.parse_args(argv)
    return _to_run_config(args)


def _to_run_config(args: Namespace) -> _RunConfig:
    values = vars(args)
    overrides = {
        key: values[key] for key in _OVERRIDE_KEYS if values.get(key) is not None
    }
    config = _RunConfig(
        command=values["command"],
        config_path=values.get("config_path"),
        overrides=overrides,
        json_path=values.get("json_path"),
        report_path=values.get("report_path"),
        csv_path=values.get("csv_path"),
        out_path=values.get("out_path"),
        dump_dir=values.get("dump_dir"),
        verbose=values["verbose"],
    )

    return config


def _setup_logger(
    filepath: Path | None,  # ログ出力するファイルパス. Noneの場合はファイル出力しない.
    loglevel: int,  # 出力するログレベル
) -> None:
    """ログ出力設定

    Notes
    -----
    ファイル出力とコンソール出力を行うように設定する。
    """
    lib_logger = logging.getLogger("internal")

    _logger.setLevel(loglevel)
    lib_logger.setLevel(loglevel)

    # consoleログ
    console_handler = StreamHandler()
    console_handler.setLevel(loglevel)
    console_handler.setFormatter(
        Formatter("[%(levelname)7s] %(asctime)s (%(name)s) %(message)s")
    )
    _logger.addHandler(console_handler)
    lib_logger.addHandler(console_handler)

    # ファイル出力するログ
    if filepath is not None:
        file_handler = RotatingFileHandler(
            filepath,
            encoding="utf-8",
            mode="a",
            maxBytes=10 * 1024 * 1024,  # 10 MB
            backupCount=1,
        )
        file_handler.setLevel(loglevel)
        file_handler.setFormatter(
            Formatter("[%(levelname)7s] %(asctime)s (%(name)s) %(message)s")
        )
        _logger.addHandler(file_handler)
        lib_logger.addHandler(file_handler)


if __name__ == "__main__":
    try:
        sys.exit(_main())
    except Exception:
        _logger.exception("Exception")
        sys.exit(EXIT_ATTACK_FAILED)
