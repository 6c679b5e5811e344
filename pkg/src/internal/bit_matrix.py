from collections.abc import Iterable, Sequence

import numpy as np

from internal.errors import DomainError


class BitMatrix:
    """GF(2)上の正方行列.

    Notes
    -----
    値は0/1のnp.uint8で保持し、外部に渡す配列は常にコピーする。
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: np.ndarray) -> None:
        array = np.asarray(bits, dtype=np.uint8) % 2
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
            raise DomainError(f"matrix must be square and non-empty: {array.shape}")
        self._bits = array.copy()
        self._bits.flags.writeable = False

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows: Sequence[str | Sequence[int]]) -> "BitMatrix":
        """0/1の文字列(例: "1010")または0/1の列から作る."""
        parsed = [
            [int(c) for c in row] if isinstance(row, str) else list(row)
            for row in rows
        ]
        return cls(np.array(parsed, dtype=np.uint8))

    @classmethod
    def random_swap_free(cls, n: int, rng: np.random.Generator) -> "BitMatrix":
        """行交換なしで掃き出せる正則行列を一様に生成する.

        Notes
        -----
        単位下三角Lと単位上三角Uの積は、すべての首座小行列式が1になる。
        """
        lower = np.tril(rng.integers(0, 2, size=(n, n), dtype=np.uint8), k=-1)
        upper = np.triu(rng.integers(0, 2, size=(n, n), dtype=np.uint8), k=1)
        np.fill_diagonal(lower, 1)
        np.fill_diagonal(upper, 1)
        return cls((lower.astype(np.int64) @ upper.astype(np.int64)) % 2)

    @property
    def n(self) -> int:
        return self._bits.shape[0]

    def to_array(self) -> np.ndarray:
        return self._bits.copy()

    def get(self, row: int, col: int) -> int:
        return int(self._bits[row, col])

    def column(self, col: int) -> tuple[int, ...]:
        return tuple(int(b) for b in self._bits[:, col])

    def matmul(self, other: "BitMatrix") -> "BitMatrix":
        if self.n != other.n:
            raise DomainError(f"dimension mismatch: {self.n} and {other.n}")
        product = self._bits.astype(np.int64) @ other._bits.astype(np.int64)
        return BitMatrix(product % 2)

    def rank(self) -> int:
        work = self._bits.copy()
        rank = 0
        for col in range(self.n):
            rows = np.flatnonzero(work[rank:, col]) + rank
            if rows.size < 1:
                continue
            pivot = rows[0]
            if pivot != rank:
                work[[rank, pivot]] = work[[pivot, rank]]
            for row in np.flatnonzero(work[:, col]):
                if row != rank:
                    work[row] ^= work[rank]
            rank += 1
            if rank == self.n:
                break
        return rank

    def is_invertible(self) -> bool:
        return self.rank() == self.n

    def is_swap_free(self) -> bool:
        """行交換なしの掃き出しで常に対角成分が1になるか."""
        work = self._bits.copy()
        for p in range(self.n):
            if work[p, p] == 0:
                return False
            for row in np.flatnonzero(work[:, p]):
                if row != p:
                    work[row] ^= work[p]
        return True

    def to_grid(self) -> list[str]:
        return ["".join(str(int(b)) for b in row) for row in self._bits]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash(self._bits.tobytes())

    def __repr__(self) -> str:
        return f"BitMatrix({self.to_grid()})"


def columns_to_matrix(columns: Iterable[Sequence[int]]) -> BitMatrix:
    return BitMatrix(np.array(list(columns), dtype=np.uint8).T)
