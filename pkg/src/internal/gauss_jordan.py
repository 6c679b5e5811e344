import logging

from pydantic import BaseModel, ConfigDict, Field

from internal.bit_matrix import BitMatrix
from internal.cache_model import (
    CacheModel,
    CachePolicy,
    EvictionEvent,
    victim_load,
    victim_store,
)
from internal.errors import ConfigurationError, NotInvertible, SwapRequired
from internal.sim_memory import SimMemory

_logger = logging.getLogger(__name__)


class MatrixLayout(BaseModel):
    """拡大行列[S | I]の列優先配置. 各要素が1本のキャッシュラインを占める."""

    model_config = ConfigDict(frozen=True)

    base_addr: int
    n: int
    line_size: int = 64

    @property
    def columns(self) -> int:
        return 2 * self.n

    @property
    def size_bytes(self) -> int:
        return self.n * self.columns * self.line_size

    def addr(self, row: int, col: int) -> int:
        return self.base_addr + (col * self.n + row) * self.line_size

    def locate(self, addr: int) -> tuple[int, int] | None:
        """アドレスを(行, 列)に戻す. 配置外ならNone."""
        offset = addr - self.base_addr
        if offset < 0 or offset >= self.size_bytes or offset % self.line_size != 0:
            return None
        index = offset // self.line_size
        return index % self.n, index // self.n


class VictimTrace(BaseModel):
    """掃き出し中に観測された追い出しと、被害者側の正解記録."""

    layout: MatrixLayout
    evictions: list[EvictionEvent] = Field(default_factory=list)
    # 各ステップ開始時点のevictionsの長さ(強い攻撃者が使うステップ境界)
    step_starts: list[int] = Field(default_factory=list)
    # 各ステップで加算先となった行
    row_log: list[list[int]] = Field(default_factory=list)


def _check_cache(cache: CacheModel, layout: MatrixLayout) -> None:
    if cache.policy is not CachePolicy.WRITE_BACK:
        raise ConfigurationError("the eviction channel needs a write-back cache.")
    if cache.sets != layout.n:
        raise ConfigurationError(
            f"cache must have one set per row: {cache.sets} sets for n={layout.n}."
        )
    if cache.line_size != layout.line_size:
        raise ConfigurationError("cache and matrix line sizes differ.")
    if layout.columns - cache.ways < 2:
        raise ConfigurationError(
            f"{cache.ways} ways hold a whole row of {layout.columns} elements."
        )
    if (layout.base_addr // layout.line_size) % layout.n != 0:
        raise ConfigurationError("matrix base must map row 0 to cache set 0.")


def gauss_jordan_invert(
    s: BitMatrix, cache: CacheModel, mem: SimMemory, base_addr: int = 0
) -> tuple[BitMatrix, VictimTrace]:
    """行交換なしのGauss-Jordan法で逆行列を求める.

    Notes
    -----
    各ステップpで第p列を全行読み、第p列が1の他の行rに対してピボット行を
    加算する(r = r xor p)。加算は全列にわたり、1要素ごとにvictim_storeする。
    """
    n = s.n
    if not s.is_invertible():
        raise NotInvertible(f"matrix of rank {s.rank()} is singular.")
    layout = MatrixLayout(base_addr=base_addr, n=n, line_size=cache.line_size)
    _check_cache(cache, layout)
    mem.check_range(base_addr, layout.size_bytes)

    augmented = s.to_array()
    for row in range(n):
        for col in range(layout.columns):
            value = int(augmented[row, col]) if col < n else int(col - n == row)
            mem.write_raw(layout.addr(row, col), bytes([value]))

    trace = VictimTrace(layout=layout)

    def load(row: int, col: int) -> int:
        data, evicted = victim_load(layout.addr(row, col), 1, cache, mem)
        trace.evictions.extend(evicted)
        return data[0] & 1

    for p in range(n):
        trace.step_starts.append(len(trace.evictions))
        column = [load(row, p) for row in range(n)]
        if column[p] == 0:
            raise SwapRequired(f"pivot {p} is zero; a row swap is required.")

        targets = [row for row in range(n) if row != p and column[row] == 1]
        for target in targets:
            for col in range(layout.columns):
                value = load(p, col) ^ load(target, col)
                trace.evictions.extend(
                    victim_store(
                        layout.addr(target, col), bytes([value]), cache, mem, 1
                    )
                )
        trace.row_log.append(targets)
        _logger.debug(f"step {p}: rows {targets} updated")

    cache.flush(mem)
    inverse = [
        [mem.read(layout.addr(row, n + col), 1)[0] & 1 for col in range(n)]
        for row in range(n)
    ]
    _logger.info(
        f"inverted {n}x{n} matrix with {len(trace.evictions)} evictions observed"
    )
    return BitMatrix.from_rows(inverse), trace
