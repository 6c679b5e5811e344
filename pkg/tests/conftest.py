import pytest

from internal.operand_region import RegionLabel, VictimLayout
from internal.sim_memory import SimMemory

# 書き込み順序の検証に使う小さなメモリ
SMALL_MEMORY = 64 * 1024


@pytest.fixture
def traced_memory() -> SimMemory:
    return SimMemory(size_bytes=SMALL_MEMORY, record_trace=True)


def store_labels(mem: SimMemory, layout: VictimLayout) -> list[RegionLabel]:
    """トレース中のR0/R1への書き込みを順に並べる."""
    assert mem.trace is not None
    labels = list()
    for record in mem.trace:
        if record.kind != "store":
            continue
        label = layout.label_of(record.address)
        if label is not None:
            labels.append(label)
    return labels


# 回帰用に植え込む512ビット鍵
REGRESSION_KEY_LINES = [
    "1a 4b 28 41 e6 27 d4 7d",
    "72 c3 40 79 be 1f 6c 35",
    "ca 3b 58 b1 96 17 04 ed",
    "22 b3 70 e9 6e 0f 9c a5",
    "7a 2b 88 21 46 07 34 5d",
    "d2 a3 a0 59 1e ff cc 15",
    "2a 1b b8 91 f6 f7 64 cd",
    "82 93 d0 c9 ce ef fc 85",
]
