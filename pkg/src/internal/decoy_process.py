from internal.cache_model import victim_store
from internal.sim_memory import SimMemory


class DecoyProcess:
    """被害者とは異なる差分パターンでページを書き換え続ける別プロセス.

    Notes
    -----
    被害者の領域更新ごとに呼ばれ、run_lines本の連続ラインをinterval回に1回書き換える。
    """

    def __init__(
        self, page_addr: int, run_lines: int, line_size: int = 64, interval: int = 1
    ) -> None:
        self._page_addr = page_addr
        self._run_lines = run_lines
        self._line_size = line_size
        self._interval = interval
        self._calls = 0

    def __call__(self, mem: SimMemory) -> None:
        self._calls += 1
        if self._calls % self._interval != 0:
            return
        fill = (self._calls // self._interval) % 255 + 1
        data = bytes([fill]) * (self._run_lines * self._line_size)
        victim_store(self._page_addr, data, None, mem, 0)
