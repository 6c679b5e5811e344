import logging
from collections.abc import Callable
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from internal.address_space_finder import IdentificationResult, identify_address_space
from internal.attack_report import AttackReport, PhaseStats
from internal.big_nat import BigNat
from internal.bit_matrix import BitMatrix
from internal.cache_model import CacheModel
from internal.decoy_process import DecoyProcess
from internal.errors import ConfigurationError, WriteLeakError
from internal.exponentiation import (
    ContinuousVictim,
    Exponentiation,
    exp_montgomery_ladder,
    exp_square_multiply,
)
from internal.key_bits import KeyBits
from internal.key_inference import (
    build_update_sequence,
    infer_key,
    observe_encryption,
    remove_unchanged,
)
from internal.matrix_recovery import mceliece_decrypt_leak_demo
from internal.operand_region import VictimLayout
from internal.region_pattern import RegionPattern
from internal.scenario_config import ScenarioConfig, VictimKind
from internal.sim_memory import SimMemory
from internal.snapshot import Snapshot, SnapshotBudget
from internal.snapshot_scheduler import InterleavedRun
from internal.trace_log import TraceRecord
from internal.write_histogram import WriteHistogram, compute_threshold

_logger = logging.getLogger(__name__)

# 例題として使う4x4の秘密行列
WORKED_EXAMPLE_ROWS = ("1010", "1101", "0100", "1011")


class PlantedScenario(BaseModel):
    """シナリオの正解情報. 攻撃者側の処理からは参照しない."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    key: KeyBits
    modulus: BigNat
    messages: list[BigNat]
    layout: VictimLayout
    mem: SimMemory
    cache: CacheModel
    decoy_pages: list[int]
    hooks: list[Callable[[SimMemory], None]]


class ScenarioRunner:
    """設定に従って被害者を配置し、攻撃を実行する."""

    def __init__(self, config: ScenarioConfig, record_trace: bool = False) -> None:
        self._config = config
        self._record_trace = record_trace
        self._rng = np.random.default_rng(config.seed)

    @property
    def config(self) -> ScenarioConfig:
        return self._config

    def _random_int(self, bits: int) -> int:
        data = self._rng.integers(0, 256, size=(bits + 7) // 8, dtype=np.uint8)
        return int.from_bytes(data.tobytes(), "big") >> ((-bits) % 8)

    def _exponentiation(self) -> Exponentiation:
        if self._config.victim is VictimKind.SQUARE_MULTIPLY:
            return exp_square_multiply
        if self._config.victim is VictimKind.LADDER:
            return exp_montgomery_ladder
        raise ConfigurationError(
            f"{self._config.victim.value} is not an exponentiation."
        )

    def plant(self) -> PlantedScenario:
        """鍵、剰余、入力、被害者ページ、おとりを決める."""
        config = self._config
        if config.planted_key is not None:
            key = KeyBits.from_hex(config.planted_key)
        else:
            key = KeyBits.from_int(self._random_int(config.key_bits), config.key_bits)

        top = 1 << (config.modulus_bits - 1)
        n = self._random_int(config.modulus_bits) | top | 1
        messages: list[BigNat] = list()
        while len(messages) < config.messages:
            g = self._random_int(config.message_bytes * 8) % n
            if g > 1:
                messages.append(BigNat.from_int(g))

        pages = config.memory_size // config.page_size
        if config.victim_page is not None:
            page_addr = config.victim_page
        else:
            page_addr = int(self._rng.integers(0, pages)) * config.page_size

        mem = SimMemory(
            size_bytes=config.memory_size,
            page_size=config.page_size,
            line_size=config.line_size,
            record_trace=self._record_trace,
        )
        # 被害者ページには以前の処理の残りデータが入っている
        stale = self._rng.integers(0, 256, size=config.page_size, dtype=np.uint8)
        mem.write_raw(page_addr, stale.tobytes())
        layout = VictimLayout.plan(
            page_addr,
            config.modulus_bits,
            line_size=config.line_size,
            page_size=config.page_size,
            scratch_in_page=config.scratch_in_page,
        )
        cache = CacheModel(
            sets=config.cache_sets,
            ways=config.cache_ways,
            line_size=config.line_size,
            policy=config.cache_policy,
        )

        decoy_pages = self._decoy_pages(page_addr)
        lines_per_operand = layout.r0.length // config.line_size
        hooks: list[Callable[[SimMemory], None]] = [
            DecoyProcess(
                decoy,
                run_lines=lines_per_operand + 1 if i % 2 == 0 else lines_per_operand,
                line_size=config.line_size,
            )
            for i, decoy in enumerate(decoy_pages)
        ]
        _logger.info(
            f"planted {key.t} bit key at page 0x{page_addr:x}"
            f" with {len(decoy_pages)} decoys"
        )
        return PlantedScenario(
            key=key,
            modulus=BigNat.from_int(n),
            messages=messages,
            layout=layout,
            mem=mem,
            cache=cache,
            decoy_pages=decoy_pages,
            hooks=hooks,
        )

    def _decoy_pages(self, victim_page: int) -> list[int]:
        """被害者とは別のブロックからおとりのページを選ぶ."""
        config = self._config
        blocks = config.memory_size // config.block_size
        victim_block = victim_page // config.block_size
        candidates = [b for b in range(blocks) if b != victim_block]
        if config.decoys > len(candidates):
            raise ConfigurationError(f"no room for {config.decoys} decoys.")
        chosen = self._rng.choice(candidates, size=config.decoys, replace=False)
        pages_per_block = config.block_size // config.page_size
        return [
            int(b) * config.block_size
            + int(self._rng.integers(0, pages_per_block)) * config.page_size
            for b in chosen
        ]

    def _budget(self) -> SnapshotBudget:
        return SnapshotBudget(
            bytes_per_tick=self._config.bytes_per_tick,
            oversampling=self._config.oversampling,
        )

    def _pattern(self, planted: PlantedScenario) -> RegionPattern:
        return RegionPattern(
            operand_bytes=planted.layout.r0.length,
            line_size=self._config.line_size,
            lenient_extra_lines=self._config.lenient_lines,
        )

    def identify(self, planted: PlantedScenario) -> IdentificationResult:
        victim = ContinuousVictim(
            self._exponentiation(),
            planted.key,
            planted.modulus,
            planted.messages,
            planted.mem,
            planted.layout,
            cache=planted.cache,
            hooks=planted.hooks,
        )
        return identify_address_space(
            victim,
            planted.mem,
            self._budget(),
            self._pattern(planted),
            block_size=self._config.block_size,
        )

    def capture(self, planted: PlantedScenario, page_addr: int) -> InterleavedRun[Any]:
        """1回分のべき乗剰余を、ページを一定間隔で取得しながら実行する."""
        exponentiation = self._exponentiation()

        def victim() -> BigNat:
            return exponentiation(
                planted.messages[0],
                planted.key,
                planted.modulus,
                planted.mem,
                planted.layout,
                cache=planted.cache,
                hooks=planted.hooks,
            )

        return observe_encryption(
            victim, planted.mem, page_addr, self._config.page_size, self._budget()
        )

    def histogram(self) -> WriteHistogram:
        planted = self.plant()
        run = self.capture(planted, planted.layout.page_addr)
        return WriteHistogram.from_snapshots(run.snapshots)

    def trace(self) -> list[TraceRecord]:
        """被害者1回分の書き込み、スナップショット、追い出しの記録."""
        records, _ = self.capture_trace()
        return records

    def capture_trace(self) -> tuple[list[TraceRecord], list[Snapshot]]:
        """トレースと、その間に取得したスナップショットを返す.

        Notes
        -----
        gauss_jordanはキャッシュの追い出しだけを観測するのでスナップショットは空になる。
        """
        snapshots: list[Snapshot] = list()
        if self._config.victim is VictimKind.GAUSS_JORDAN:
            mem = SimMemory(
                size_bytes=self._config.memory_size,
                page_size=self._config.page_size,
                line_size=self._config.line_size,
                record_trace=True,
            )
            mceliece_decrypt_leak_demo(
                self._secret_matrix(),
                ways=self._config.cache_ways,
                line_size=self._config.line_size,
                mem=mem,
            )
        else:
            planted = self.plant()
            run = self.capture(planted, planted.layout.page_addr)
            snapshots = run.snapshots
            mem = planted.mem
        if mem.trace is None:
            raise ConfigurationError("trace recording is disabled.")
        return mem.trace, snapshots

    def run(self) -> AttackReport:
        if self._config.victim is VictimKind.GAUSS_JORDAN:
            return self.gf2_demo()
        return self._run_key_recovery()

    def _run_key_recovery(self) -> AttackReport:
        planted = self.plant()
        report = AttackReport(
            victim=self._config.victim.value,
            seed=self._config.seed,
            secret_kind="key",
            planted=planted.key.hex_lines(),
        )

        try:
            found = self.identify(planted)
        except WriteLeakError as e:
            if isinstance(e, ConfigurationError):
                raise
            report.failure = f"{type(e).__name__}: {e}"
            return report
        report.page_addr = found.page_addr
        report.phases.append(
            PhaseStats(
                name="identify",
                victim_events=found.victim_events,
                snapshots=found.snapshot_count,
                bytes_scanned=found.bytes_scanned,
            )
        )

        try:
            recovered = self._infer(planted, found.page_addr, report)
        except WriteLeakError as e:
            if isinstance(e, ConfigurationError):
                raise
            report.failure = f"{type(e).__name__}: {e}"
            return report
        report.recovered = recovered.hex_lines()
        _logger.info(f"attack success: {report.success}")
        return report

    def _infer(
        self, planted: PlantedScenario, page_addr: int, report: AttackReport
    ) -> KeyBits:
        run = self.capture(planted, page_addr)
        report.phases.append(
            PhaseStats(
                name="threshold",
                victim_events=run.stats.victim_events,
                snapshots=run.stats.snapshot_count,
                bytes_scanned=run.stats.bytes_transferred,
            )
        )
        threshold = compute_threshold(
            run.snapshots,
            noise_floor=self._config.noise_floor,
            merge_gap=self._config.line_size,
        )
        changed: list[Snapshot] = remove_unchanged(run.snapshots)
        report.phases.append(PhaseStats(name="infer", snapshots=len(changed)))
        updates = build_update_sequence(changed, threshold)
        return infer_key(updates, t=self._config.key_bits)

    def _secret_matrix(self) -> BitMatrix:
        if self._config.paper_example:
            return BitMatrix.from_rows(WORKED_EXAMPLE_ROWS)
        return BitMatrix.random_swap_free(self._config.matrix_n, self._rng)

    def gf2_demo(self) -> AttackReport:
        secret = self._secret_matrix()
        report = AttackReport(
            victim=VictimKind.GAUSS_JORDAN.value,
            seed=self._config.seed,
            secret_kind="matrix",
            planted=secret.to_grid(),
        )
        try:
            result = mceliece_decrypt_leak_demo(
                secret, ways=self._config.cache_ways, line_size=self._config.line_size
            )
        except WriteLeakError as e:
            if isinstance(e, ConfigurationError):
                raise
            report.failure = f"{type(e).__name__}: {e}"
            return report

        steps = result.steps.one_indexed()
        report.details.append(
            "Steps: " + ", ".join("{" + ",".join(map(str, s)) + "}" for s in steps)
        )
        for i, column in enumerate(result.columns.columns, start=1):
            report.details.append(f"C{i} = {{{','.join(map(str, column))}}}")
        for i in range(1, result.recovered.n):
            column = result.recovered.column(i)
            report.details.append(f"S{i + 1} = {{{','.join(map(str, column))}}}")
        report.phases.append(
            PhaseStats(name="observe", victim_events=result.eviction_count)
        )
        report.recovered = result.recovered.to_grid()
        return report
