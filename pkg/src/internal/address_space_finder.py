import logging
from collections.abc import Callable
from fractions import Fraction
from typing import Any

from pydantic import BaseModel, ConfigDict, model_validator

from internal.errors import ConfigurationError, IdentificationFailed
from internal.region_pattern import RegionPattern, compare_match
from internal.sim_memory import MiB, SimMemory
from internal.snapshot import SnapshotBudget
from internal.snapshot_scheduler import SnapshotPlan, SnapshotRequest, run_interleaved

_logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 4 * MiB
# 1ブロックあたりに取るスナップショット対の上限
DEFAULT_SCAN_ATTEMPTS = 4


class BlockSet(BaseModel):
    """走査対象のメモリブロック集合."""

    model_config = ConfigDict(frozen=True)

    blocks: tuple[tuple[int, int], ...]  # (base_addr, length)
    block_size: int

    @model_validator(mode="after")
    def _disjoint(self) -> "BlockSet":
        ordered = sorted(self.blocks)
        for (a, la), (b, _) in zip(ordered, ordered[1:]):
            if a + la > b:
                raise ValueError("blocks must be disjoint.")
        return self

    @classmethod
    def covering(cls, mem: SimMemory, block_size: int) -> "BlockSet":
        if block_size % mem.page_size != 0 or mem.size_bytes % block_size != 0:
            raise ConfigurationError(
                "block size must be a page multiple that divides the memory size."
            )
        blocks = tuple(
            (base, block_size) for base in range(0, mem.size_bytes, block_size)
        )
        return cls(blocks=blocks, block_size=block_size)

    def halved(self) -> "BlockSet":
        half = self.block_size // 2
        blocks = tuple(
            (base + offset, half) for base, _ in self.blocks for offset in (0, half)
        )
        return BlockSet(blocks=blocks, block_size=half)


class IdentificationResult(BaseModel):
    """アドレス空間特定の結果."""

    page_addr: int
    rounds: int
    snapshot_count: int = 0
    bytes_scanned: int = 0
    victim_events: int = 0


class AddressSpaceFinder:
    """ブロックを半分ずつ絞り込み、被害者のページを1つに特定する."""

    def __init__(
        self,
        mem: SimMemory,
        budget: SnapshotBudget,
        pattern: RegionPattern,
        block_size: int = DEFAULT_BLOCK_SIZE,
        scan_attempts: int = DEFAULT_SCAN_ATTEMPTS,
    ) -> None:
        if scan_attempts < 1:
            raise ConfigurationError("scan_attempts must be at least 1.")
        self._mem = mem
        self._budget = budget
        self._pattern = pattern
        self._block_size = block_size
        self._scan_attempts = scan_attempts

    def plan(self) -> SnapshotPlan:
        blocks = BlockSet.covering(self._mem, self._block_size)
        rounds = 0
        while True:
            rounds += 1
            survivors: list[tuple[int, int]] = list()
            for base, length in blocks.blocks:
                gap = max(
                    self._budget.scan_gap_ticks, self._budget.transfer_ticks(length)
                )
                for _ in range(self._scan_attempts):
                    now = Fraction(self._mem.victim_time)
                    s1 = yield SnapshotRequest(
                        base_addr=base, length=length, at_time=now
                    )
                    s2 = yield SnapshotRequest(
                        base_addr=base, length=length, at_time=now + gap
                    )
                    if compare_match(s1, s2, self._pattern):
                        survivors.append((base, length))
                        break
            _logger.info(
                f"round {rounds}: {len(survivors)} of {len(blocks.blocks)} blocks"
                f" of {blocks.block_size} bytes match"
            )

            if len(survivors) < 1:
                raise IdentificationFailed("no block shows the victim pattern.", [])
            blocks = BlockSet(blocks=tuple(survivors), block_size=blocks.block_size)
            if blocks.block_size <= self._mem.page_size:
                break
            blocks = blocks.halved()

        if len(blocks.blocks) != 1:
            raise IdentificationFailed(
                f"{len(blocks.blocks)} pages remain.", list(blocks.blocks)
            )
        return IdentificationResult(page_addr=blocks.blocks[0][0], rounds=rounds)


def identify_address_space(
    victim: Callable[[], Any],
    mem: SimMemory,
    budget: SnapshotBudget,
    pattern: RegionPattern,
    block_size: int = DEFAULT_BLOCK_SIZE,
    scan_attempts: int = DEFAULT_SCAN_ATTEMPTS,
) -> IdentificationResult:
    finder = AddressSpaceFinder(mem, budget, pattern, block_size, scan_attempts)
    run = run_interleaved(
        victim, finder.plan(), budget, mem, drain=True, keep_snapshots=False
    )
    result: IdentificationResult = run.plan_result
    result.snapshot_count = run.stats.snapshot_count
    result.bytes_scanned = run.stats.bytes_transferred
    result.victim_events = run.stats.victim_events
    _logger.info(f"victim page address: 0x{result.page_addr:x}")
    return result
