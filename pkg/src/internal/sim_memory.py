import logging
from collections.abc import Callable

from internal.errors import ConfigurationError, MemoryFault
from internal.trace_log import TraceRecord

_logger = logging.getLogger(__name__)

MiB = 1024 * 1024
DEFAULT_MEMORY_SIZE = 64 * MiB

EventListener = Callable[[int], None]


class SimMemory:
    """バイト単位でアドレス指定するシミュレーション上のDRAM.

    Notes
    -----
    event_clockは被害者の更新イベントごとに1だけ進む。
    victim_timeは更新イベントのコストを積算した模擬時間で、スナップショットの
    スケジューリングに利用する。
    """

    def __init__(
        self,
        size_bytes: int = DEFAULT_MEMORY_SIZE,
        page_size: int = 4096,
        line_size: int = 64,
        record_trace: bool = False,
    ) -> None:
        if line_size <= 0 or page_size <= 0 or size_bytes <= 0:
            raise ConfigurationError("memory geometry must be positive.")
        if page_size % line_size != 0:
            raise ConfigurationError("page_size must be a multiple of line_size.")
        if size_bytes % page_size != 0:
            raise ConfigurationError("size_bytes must be a multiple of page_size.")

        self.size_bytes = size_bytes
        self.page_size = page_size
        self.line_size = line_size
        self.contents = bytearray(size_bytes)
        self.trace: list[TraceRecord] | None = list() if record_trace else None

        self._event_clock = 0
        self._victim_time = 0
        self._listeners: list[EventListener] = list()

    @property
    def event_clock(self) -> int:
        return self._event_clock

    @property
    def victim_time(self) -> int:
        return self._victim_time

    def add_listener(self, listener: EventListener) -> None:
        self._listeners.append(listener)

    def remove_listener(self, listener: EventListener) -> None:
        self._listeners.remove(listener)

    def check_range(self, addr: int, length: int) -> None:
        if addr < 0 or length < 0 or addr + length > self.size_bytes:
            raise MemoryFault(
                f"access [0x{addr:x}, 0x{addr + length:x}) outside memory"
                f" of {self.size_bytes} bytes."
            )

    def read(self, addr: int, length: int) -> bytes:
        self.check_range(addr, length)
        return bytes(self.contents[addr : addr + length])

    def write_raw(self, addr: int, data: bytes) -> None:
        """イベントを発生させずに書き込む(初期配置やライトバック用)."""
        self.check_range(addr, len(data))
        self.contents[addr : addr + len(data)] = data

    def begin_event(self, cost: int) -> None:
        """更新イベントの確定前に呼ぶ. リスナーは確定予定時刻を受け取る."""
        commit_time = self._victim_time + cost
        for listener in list(self._listeners):
            listener(commit_time)
        self._victim_time = commit_time

    def end_event(self, addr: int, length: int) -> None:
        if self.trace is not None:
            self.trace.append(TraceRecord.of(self._event_clock, "store", addr, length))
        self._event_clock += 1

    def record(self, record: TraceRecord) -> None:
        if self.trace is not None:
            self.trace.append(record)
