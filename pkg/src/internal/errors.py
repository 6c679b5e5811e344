class WriteLeakError(ValueError):
    """シミュレータ全体で共通の基底例外."""


class ConfigurationError(WriteLeakError):
    """サイズやキャッシュ構成などの設定が不正."""


class DomainError(WriteLeakError):
    """演算の定義域外の入力."""


class MemoryFault(WriteLeakError):
    """シミュレーションメモリの範囲外アクセス."""


class UsageError(WriteLeakError):
    """関数の呼び出し方が事前条件を満たしていない."""


class IdentificationFailed(WriteLeakError):
    """被害者ページを一意に特定できなかった."""

    def __init__(self, message: str, survivors: list[tuple[int, int]]) -> None:
        super().__init__(message)
        self.survivors = survivors


class ThresholdError(WriteLeakError):
    """ヒストグラムから二つの変数領域を分離できなかった."""


class AmbiguousUpdate(WriteLeakError):
    """スナップショット対の差分が境界をまたいでいる."""

    def __init__(self, message: str, pair_index: int | None = None) -> None:
        super().__init__(message)
        self.pair_index = pair_index


class DecodeError(WriteLeakError):
    """更新系列から鍵ビットを復元できない."""


class SwapRequired(WriteLeakError):
    """ピボットが0で行交換が必要になった."""


class NotInvertible(WriteLeakError):
    """GF(2)上で正則でない行列."""


class TraceError(WriteLeakError):
    """追い出しトレースを行に対応付けられない."""
