from .address_space_finder import (
    AddressSpaceFinder,
    BlockSet,
    IdentificationResult,
    identify_address_space,
)
from .attack_report import (
    AttackReport,
    AttackReportFile,
    AttackReportWriter,
    PhaseStats,
)
from .big_nat import BigNat, compare, divmod_nat, mod_mul, mul
from .bit_matrix import BitMatrix
from .cache_model import (
    CacheModel,
    CachePolicy,
    EvictionEvent,
    victim_load,
    victim_store,
)
from .decoy_process import DecoyProcess
from .errors import (
    AmbiguousUpdate,
    ConfigurationError,
    DecodeError,
    DomainError,
    IdentificationFailed,
    MemoryFault,
    NotInvertible,
    SwapRequired,
    ThresholdError,
    TraceError,
    UsageError,
    WriteLeakError,
)
from .exponentiation import (
    ContinuousVictim,
    exp_montgomery_ladder,
    exp_square_multiply,
)
from .gauss_jordan import MatrixLayout, VictimTrace, gauss_jordan_invert
from .key_bits import KeyBits
from .key_inference import (
    UpdateSequence,
    build_update_sequence,
    correlate,
    infer_key,
    observe_encryption,
    remove_unchanged,
)
from .matrix_recovery import (
    LeakDemoResult,
    ObservedColumns,
    apply_row_step,
    back_substitute,
    infer_pivot_columns,
    mceliece_decrypt_leak_demo,
)
from .operand_region import OperandRegion, RegionLabel, VictimLayout
from .region_pattern import RegionPattern, compare_match
from .row_op_observer import RowOpTrace, observe_row_updates
from .scenario_config import ScenarioConfig, ScenarioConfigFile, VictimKind
from .scenario_runner import ScenarioRunner
from .sim_memory import SimMemory
from .snapshot import Snapshot, SnapshotBudget, SnapshotFile, take_snapshot
from .snapshot_scheduler import SnapshotRequest, periodic_plan, run_interleaved
from .trace_log import TraceLogFile, TraceRecord
from .write_histogram import (
    HistogramCsvWriter,
    RegionThreshold,
    WriteHistogram,
    compute_threshold,
)

__all__ = [
    "AddressSpaceFinder",
    "AmbiguousUpdate",
    "AttackReport",
    "AttackReportFile",
    "AttackReportWriter",
    "BigNat",
    "BitMatrix",
    "BlockSet",
    "CacheModel",
    "CachePolicy",
    "ConfigurationError",
    "ContinuousVictim",
    "DecodeError",
    "DecoyProcess",
    "DomainError",
    "EvictionEvent",
    "HistogramCsvWriter",
    "IdentificationFailed",
    "IdentificationResult",
    "KeyBits",
    "LeakDemoResult",
    "MatrixLayout",
    "MemoryFault",
    "NotInvertible",
    "ObservedColumns",
    "OperandRegion",
    "PhaseStats",
    "RegionLabel",
    "RegionPattern",
    "RegionThreshold",
    "RowOpTrace",
    "ScenarioConfig",
    "ScenarioConfigFile",
    "ScenarioRunner",
    "SimMemory",
    "Snapshot",
    "SnapshotBudget",
    "SnapshotFile",
    "SnapshotRequest",
    "SwapRequired",
    "ThresholdError",
    "TraceError",
    "TraceLogFile",
    "TraceRecord",
    "UpdateSequence",
    "UsageError",
    "VictimKind",
    "VictimLayout",
    "VictimTrace",
    "WriteHistogram",
    "WriteLeakError",
    "apply_row_step",
    "back_substitute",
    "build_update_sequence",
    "compare",
    "compare_match",
    "compute_threshold",
    "correlate",
    "divmod_nat",
    "exp_montgomery_ladder",
    "exp_square_multiply",
    "gauss_jordan_invert",
    "identify_address_space",
    "infer_key",
    "infer_pivot_columns",
    "mceliece_decrypt_leak_demo",
    "mod_mul",
    "mul",
    "observe_encryption",
    "observe_row_updates",
    "periodic_plan",
    "remove_unchanged",
    "run_interleaved",
    "take_snapshot",
    "victim_load",
    "victim_store",
]
