import logging
from collections.abc import Callable, Sequence

from internal.big_nat import BigNat, compare, mod_mul
from internal.cache_model import CacheModel, victim_store
from internal.errors import ConfigurationError, DomainError
from internal.key_bits import KeyBits
from internal.operand_region import RegionLabel, VictimLayout
from internal.sim_memory import SimMemory
from internal.snapshot import MUL_COST, SQR_COST

_logger = logging.getLogger(__name__)

# レジスタ退避がページ内に書き出される間隔(領域更新の回数)
SPILL_INTERVAL = 64
SPILL_BYTES = 8

StoreHook = Callable[[SimMemory], None]


class _RegionWriter:
    """演算結果を対応する領域へ書き込む."""

    def __init__(
        self,
        mem: SimMemory,
        layout: VictimLayout,
        n: BigNat,
        cache: CacheModel | None,
        hooks: Sequence[StoreHook],
    ) -> None:
        for region in (layout.r0, layout.r1):
            if region.length * 8 < n.bit_len:
                raise ConfigurationError(
                    f"region {region.label.value} of {region.length} bytes is too"
                    f" small for a {n.bit_len} bit modulus."
                )
        self._mem = mem
        self._layout = layout
        self._cache = cache
        self._hooks = hooks
        self._updates = 0

    def store(self, label: RegionLabel, value: BigNat, cost: int) -> None:
        region = self._layout.region(label)
        data = value.to_bytes(region.length)
        victim_store(region.base_addr, data, self._cache, self._mem, cost)
        if cost == 0:
            return

        self._updates += 1
        scratch_addr = self._layout.scratch_addr
        if scratch_addr is not None and self._updates % SPILL_INTERVAL == 0:
            victim_store(scratch_addr, data[:SPILL_BYTES], self._cache, self._mem, 0)
        for hook in self._hooks:
            hook(self._mem)


def _check_inputs(g: BigNat, n: BigNat) -> None:
    if compare(n, BigNat.one()) <= 0:
        raise DomainError("modulus must be greater than 1.")
    if compare(g, n) >= 0:
        raise DomainError("base must be smaller than the modulus.")


def exp_montgomery_ladder(
    g: BigNat,
    k: KeyBits,
    n: BigNat,
    mem: SimMemory,
    layout: VictimLayout,
    cache: CacheModel | None = None,
    hooks: Sequence[StoreHook] = (),
) -> BigNat:
    """モンゴメリラダーでg^k mod nを計算する.

    Notes
    -----
    k_j=1ならR0, R1の順、k_j=0ならR1, R0の順に領域が更新される。
    初期化の2回の書き込みはコスト0で、暗号化の観測区間には含まれない。
    """
    _check_inputs(g, n)
    writer = _RegionWriter(mem, layout, n, cache, hooks)

    r0 = BigNat.one()
    r1 = g
    writer.store(RegionLabel.R0, r0, 0)
    writer.store(RegionLabel.R1, r1, 0)
    for bit in k.bits:
        if bit:
            r0 = mod_mul(r0, r1, n)
            writer.store(RegionLabel.R0, r0, MUL_COST)
            r1 = mod_mul(r1, r1, n)
            writer.store(RegionLabel.R1, r1, SQR_COST)
        else:
            r1 = mod_mul(r0, r1, n)
            writer.store(RegionLabel.R1, r1, MUL_COST)
            r0 = mod_mul(r0, r0, n)
            writer.store(RegionLabel.R0, r0, SQR_COST)
    return r0


def exp_square_multiply(
    g: BigNat,
    k: KeyBits,
    n: BigNat,
    mem: SimMemory,
    layout: VictimLayout,
    cache: CacheModel | None = None,
    hooks: Sequence[StoreHook] = (),
) -> BigNat:
    """左から右への二乗乗算法でg^k mod nを計算する."""
    _check_inputs(g, n)
    writer = _RegionWriter(mem, layout, n, cache, hooks)

    r0 = BigNat.one()
    r1 = g
    writer.store(RegionLabel.R0, r0, 0)
    writer.store(RegionLabel.R1, r1, 0)
    for bit in k.bits:
        r0 = mod_mul(r0, r0, n)
        writer.store(RegionLabel.R0, r0, SQR_COST)
        if bit:
            r0 = mod_mul(r0, r1, n)
            writer.store(RegionLabel.R0, r0, MUL_COST)
    return r0


Exponentiation = Callable[..., BigNat]


class ContinuousVictim:
    """同じ鍵と配置のまま入力g_iを順に処理し続ける被害者."""

    def __init__(
        self,
        exponentiation: Exponentiation,
        key: KeyBits,
        modulus: BigNat,
        messages: Sequence[BigNat],
        mem: SimMemory,
        layout: VictimLayout,
        cache: CacheModel | None = None,
        hooks: Sequence[StoreHook] = (),
    ) -> None:
        self._exponentiation = exponentiation
        self._key = key
        self._modulus = modulus
        self._messages = messages
        self._mem = mem
        self._layout = layout
        self._cache = cache
        self._hooks = hooks

    def __call__(self) -> list[BigNat]:
        outputs: list[BigNat] = list()
        for i, message in enumerate(self._messages):
            _logger.debug(f"victim starts message {i}")
            outputs.append(
                self._exponentiation(
                    message,
                    self._key,
                    self._modulus,
                    self._mem,
                    self._layout,
                    cache=self._cache,
                    hooks=self._hooks,
                )
            )
        return outputs
