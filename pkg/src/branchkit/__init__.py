"""Density-matrix branching, decoherence, and credence-derivation toolkit."""

from .config import DEFAULT_TOLS, Tolerances
from .hilbert import (
    DensityMatrix,
    Ket,
    SubsystemLayout,
    Unitary,
    ValidationReport,
    apply_unitary,
    dump_matrix,
    eigh_descending,
    load_matrix,
    partial_trace,
    purity,
    spectrum,
    tensor,
    tensor_all,
    tensor_kets,
    validate,
    vn_entropy,
)
from .branching import (
    Branch,
    BranchDecomposition,
    MacrostatePartition,
    branch_report,
    ct_norm,
    decompose,
    merge_macrostates,
)
from .decoherence import (
    DecayParams,
    PointerMap,
    decay_curve_csv,
    dephase,
    fit_exponential_envelope,
    gaussian_packet,
    overlap_decay,
    premeasurement_unitary,
    spin_bath_overlap,
)
from .scenario_sc import (
    CredenceSolution,
    DerivationStep,
    SetupColumn,
    SetupTable,
    build_setup,
    esp_equal,
    general_strategy_tables,
    reduced_display_state,
    same_branch_classes,
    solve_credences,
)
from .scenario_mv import (
    StationScenario,
    build_symmetric,
    build_weighted,
    check_symmetry,
    derive_credences,
    measure_stations,
    merge_remote_stations,
    remote_invariance,
    remote_unitary,
    station_partition,
)
from .scenario_dw import (
    EquivalenceReport,
    ErasureVerdict,
    RewardedState,
    construct_erasure,
    equivalence_demo,
    erasure_exists,
    erasure_report,
    expected_utility,
    sector_of,
)

__version__ = "0.1.0"
