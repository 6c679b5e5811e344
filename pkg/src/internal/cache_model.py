import logging
from collections import OrderedDict
from enum import Enum

from pydantic import BaseModel, ConfigDict

from internal.errors import ConfigurationError
from internal.sim_memory import SimMemory
from internal.trace_log import TraceRecord

_logger = logging.getLogger(__name__)


class CachePolicy(Enum):
    """書き込み方式."""

    WRITE_THROUGH = "write_through"
    WRITE_BACK = "write_back"


class EvictionEvent(BaseModel):
    """有効なラインが追い出されたことを表す."""

    model_config = ConfigDict(frozen=True)

    addr: int  # 追い出されたラインの先頭アドレス
    dirty: bool
    at: int  # event_clock


class _CacheLine:
    __slots__ = ("line_no", "dirty", "data")

    def __init__(self, line_no: int, data: bytearray) -> None:
        self.line_no = line_no
        self.dirty = False
        self.data = data


class CacheModel:
    """LRU置換のセットアソシアティブキャッシュ."""

    def __init__(
        self,
        sets: int,
        ways: int,
        line_size: int = 64,
        policy: CachePolicy = CachePolicy.WRITE_BACK,
    ) -> None:
        if sets < 1 or ways < 1 or line_size < 1:
            raise ConfigurationError("cache geometry must be positive.")
        self.sets = sets
        self.ways = ways
        self.line_size = line_size
        self.policy = policy
        # 各セットは先頭がLRU、末尾がMRU
        self._sets: list[OrderedDict[int, _CacheLine]] = [
            OrderedDict() for _ in range(sets)
        ]

    def set_index(self, addr: int) -> int:
        return (addr // self.line_size) % self.sets

    def resident_lines(self, set_index: int) -> list[tuple[int, bool]]:
        """(ライン先頭アドレス, dirty)をLRU順に返す."""
        return [
            (line.line_no * self.line_size, line.dirty)
            for line in self._sets[set_index].values()
        ]

    def access(
        self, addr: int, mem: SimMemory, evictions: list[EvictionEvent]
    ) -> _CacheLine:
        """addrを含むラインを参照し、ミスなら割り当てる."""
        line_no = addr // self.line_size
        cache_set = self._sets[line_no % self.sets]
        line = cache_set.get(line_no)
        if line is not None:
            cache_set.move_to_end(line_no)
            return line

        if len(cache_set) >= self.ways:
            _, victim = cache_set.popitem(last=False)
            victim_addr = victim.line_no * self.line_size
            if victim.dirty:
                mem.write_raw(victim_addr, bytes(victim.data))
            event = EvictionEvent(
                addr=victim_addr, dirty=victim.dirty, at=mem.event_clock
            )
            mem.record(
                TraceRecord.of(
                    mem.event_clock, "evict", victim_addr, self.line_size, victim.dirty
                )
            )
            evictions.append(event)

        base = line_no * self.line_size
        line = _CacheLine(line_no, bytearray(mem.read(base, self.line_size)))
        cache_set[line_no] = line
        return line

    def update_resident(self, addr: int, data: bytes) -> None:
        """ライトスルー時にキャッシュ上のコピーを書き込みに追従させる."""
        for line_no, lo, hi in self.split(addr, len(data)):
            line = self._sets[line_no % self.sets].get(line_no)
            if line is None:
                continue
            start = line_no * self.line_size
            line.data[lo - start : hi - start] = data[lo - addr : hi - addr]

    def flush(self, mem: SimMemory) -> list[EvictionEvent]:
        """全dirtyラインを書き戻してクリーンにする."""
        written: list[EvictionEvent] = list()
        for cache_set in self._sets:
            for line in cache_set.values():
                if not line.dirty:
                    continue
                line_addr = line.line_no * self.line_size
                mem.write_raw(line_addr, bytes(line.data))
                line.dirty = False
                written.append(
                    EvictionEvent(addr=line_addr, dirty=True, at=mem.event_clock)
                )
        return written

    def split(self, addr: int, length: int) -> list[tuple[int, int, int]]:
        spans: list[tuple[int, int, int]] = list()
        pos = addr
        while pos < addr + length:
            line_no = pos // self.line_size
            hi = min((line_no + 1) * self.line_size, addr + length)
            spans.append((line_no, pos, hi))
            pos = hi
        return spans


def victim_store(
    addr: int,
    data: bytes,
    cache: CacheModel | None,
    mem: SimMemory,
    cost: int = 1,
) -> list[EvictionEvent]:
    """被害者による1回分の更新イベント.

    Notes
    -----
    ライトスルー(またはキャッシュなし)では即座にメモリへ反映し、書き込み時の
    割り当ては行わない。ライトバックでは書き込み割り当てを行い、メモリは
    dirtyラインの追い出しでのみ変化する。
    """
    mem.check_range(addr, len(data))
    mem.begin_event(cost)

    evictions: list[EvictionEvent] = list()
    if cache is None or cache.policy is CachePolicy.WRITE_THROUGH:
        mem.write_raw(addr, data)
        if cache is not None:
            cache.update_resident(addr, data)
    else:
        for line_no, lo, hi in cache.split(addr, len(data)):
            line = cache.access(lo, mem, evictions)
            start = line_no * cache.line_size
            line.data[lo - start : hi - start] = data[lo - addr : hi - addr]
            line.dirty = True

    mem.end_event(addr, len(data))
    return evictions


def victim_load(
    addr: int, length: int, cache: CacheModel | None, mem: SimMemory
) -> tuple[bytes, list[EvictionEvent]]:
    """被害者による読み出し. 更新イベントではないのでクロックは進まない."""
    mem.check_range(addr, length)
    if cache is None:
        return mem.read(addr, length), list()

    evictions: list[EvictionEvent] = list()
    chunks: list[bytes] = list()
    for line_no, lo, hi in cache.split(addr, length):
        line = cache.access(lo, mem, evictions)
        start = line_no * cache.line_size
        chunks.append(bytes(line.data[lo - start : hi - start]))
    return b"".join(chunks), evictions
