"""Erasure feasibility by spectrum comparison, explicit erasure unitaries,
the equal-weight indifference demonstration, and expected utility.

Unitary acts preserve eigenvalues, so two states can be mapped to a common
state exactly when their sorted spectra coincide; the sorted spectrum is
therefore the sector label under which betting arguments proceed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .branching import BranchDecomposition, MacrostatePartition, decompose
from .config import DEFAULT_TOLS, Tolerances
from .errors import DomainError, InfeasibilityError, LayoutError, ParameterError
from .hilbert import (
    DensityMatrix,
    SubsystemLayout,
    Unitary,
    apply_unitary,
    eigh_descending,
    spectrum,
)

__all__ = [
    "ErasureVerdict",
    "RewardedState",
    "EquivalenceReport",
    "erasure_exists",
    "construct_erasure",
    "equivalence_demo",
    "expected_utility",
    "sector_of",
    "erasure_report",
    "REPORT_NOTES",
]

REPORT_NOTES = (
    "non-unitary acts would erase any pair by state replacement; only unitary acts are modeled",
    "whether erasure acts must respect reward macrostates is left open; witnesses act on the full space",
)


@dataclass(frozen=True, eq=False)
class ErasureVerdict:
    feasible: bool
    spectral_distance: float
    witnesses: tuple[Unitary, Unitary] | None = None
    witness_residual: float | None = None


@dataclass(frozen=True, eq=False)
class RewardedState:
    """A state with a designated reward factor and its macrostate partition."""

    state: DensityMatrix
    layout: SubsystemLayout
    reward_factor: str
    reward_partition: MacrostatePartition

    def __post_init__(self):
        self.layout.check_state(self.state.dim)
        if self.reward_partition.dim != self.state.dim:
            raise LayoutError(
                f"reward partition dim {self.reward_partition.dim} does not match state dim {self.state.dim}")


def erasure_exists(rho1: DensityMatrix, rho2: DensityMatrix,
                   tol: float | None = None,
                   tols: Tolerances = DEFAULT_TOLS) -> ErasureVerdict:
    """Decide whether two states are unitarily mappable to a common state.

    Feasible exactly when the sorted spectra agree within tol (L-infinity);
    when they do, explicit witness unitaries are constructed and their
    residual reported.
    """
    if rho1.dim != rho2.dim:
        raise LayoutError(f"state dims differ: {rho1.dim} vs {rho2.dim}")
    tol = tols.tol_erasure if tol is None else tol
    distance = float(np.max(np.abs(spectrum(rho1, tols) - spectrum(rho2, tols))))
    if distance > tol:
        return ErasureVerdict(feasible=False, spectral_distance=distance)
    u, v = construct_erasure(rho1, rho2, tols=tols)
    residual = float(np.linalg.norm(
        u.entries @ rho1.entries @ u.entries.conj().T
        - v.entries @ rho2.entries @ v.entries.conj().T))
    return ErasureVerdict(feasible=True, spectral_distance=distance,
                          witnesses=(u, v), witness_residual=residual)


def construct_erasure(rho1: DensityMatrix, rho2: DensityMatrix,
                      tols: Tolerances = DEFAULT_TOLS) -> tuple[Unitary, Unitary]:
    """Witness unitaries mapping both states onto the shared diagonal frame.

    With eigendecompositions rho_i = W_i L W_i^dag (eigenvalues descending,
    ties resolved by the deterministic ordering of eigh_descending), the
    witnesses are U = W_1^dag and V = W_2^dag, so both conjugations land on
    diag(L) regardless of how degenerate eigenspaces were spanned.
    """
    if rho1.dim != rho2.dim:
        raise LayoutError(f"state dims differ: {rho1.dim} vs {rho2.dim}")
    distance = float(np.max(np.abs(spectrum(rho1, tols) - spectrum(rho2, tols))))
    if distance > tols.tol_erasure:
        raise InfeasibilityError(
            f"spectra differ by {distance:.3e} (> {tols.tol_erasure}); no unitary pair can erase")
    _, w1 = eigh_descending(rho1)
    _, w2 = eigh_descending(rho2)
    return Unitary(w1.conj().T, tols=tols), Unitary(w2.conj().T, tols=tols)


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    """Outcome of the two-act erasure demonstration."""

    reward_weight_a: float
    reward_weight_b: float
    state_a_post: DensityMatrix
    state_b_post: DensityMatrix
    post_erasure_equal: bool
    verdict: str | None
    reward_branch_spectral_distance: float | None
    notes: tuple[str, ...] = REPORT_NOTES


def _act_states(alpha: complex, beta: complex,
                tols: Tolerances) -> tuple[RewardedState, RewardedState]:
    """The two bets: act A rewards the alpha component, act B the beta one.

    Factors: a two-state pointer (basis index 0 is the "plus" component and
    doubles as the erased target state, index 1 likewise) and a two-state
    reward register (0: reward, 1: no reward).
    """
    layout = SubsystemLayout([("pointer", 2), ("reward", 2)])
    partition = MacrostatePartition.from_factor_basis(
        layout, "reward", {"reward": [0], "no-reward": [1]}, tols=tols)
    ket_a = np.array([alpha, 0.0, 0.0, beta], dtype=np.complex128)
    ket_b = np.array([0.0, alpha, beta, 0.0], dtype=np.complex128)
    a = RewardedState(DensityMatrix(np.outer(ket_a, ket_a.conj()), tols=tols),
                      layout, "reward", partition)
    b = RewardedState(DensityMatrix(np.outer(ket_b, ket_b.conj()), tols=tols),
                      layout, "reward", partition)
    return a, b


def equivalence_demo(alpha: complex, beta: complex,
                     tols: Tolerances = DEFAULT_TOLS) -> EquivalenceReport:
    """Erase branch records of two opposite bets and compare the results.

    Act A rewards the alpha branch, act B the beta branch. Branch-wise
    erasure unitaries (controlled on the reward register, with a phase chosen
    to cancel the relative phase of the amplitudes) map both to states over
    the standard erased pointer states. With equal amplitude magnitudes the
    two post-erasure states coincide element-wise and indifference follows;
    with unequal magnitudes the states and reward weights are reported
    without a verdict.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-12:
        raise ParameterError(
            f"amplitudes must be normalized: |alpha|^2 + |beta|^2 = {abs(alpha)**2 + abs(beta)**2!r}")
    act_a, act_b = _act_states(alpha, beta, tols)

    # act A is already expressed over the erased pointer states; act B needs
    # the pointer swapped in both reward sectors, with the reward-sector
    # phase chosen so equal magnitudes give identical matrices
    theta = 2.0 * (cmath.phase(alpha) - cmath.phase(beta)) if alpha != 0 and beta != 0 else 0.0
    u_a = Unitary(np.eye(4, dtype=np.complex128), tols=tols)
    swap_reward = np.array([[0.0, cmath.exp(1j * theta)], [1.0, 0.0]], dtype=np.complex128)
    swap_plain = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    u_b_entries = np.zeros((4, 4), dtype=np.complex128)
    for r, block in ((0, swap_reward), (1, swap_plain)):
        for p_out in range(2):
            for p_in in range(2):
                u_b_entries[p_out * 2 + r, p_in * 2 + r] = block[p_out, p_in]
    u_b = Unitary(u_b_entries, tols=tols)

    post_a = apply_unitary(act_a.state, u_a, tols=tols)
    post_b = apply_unitary(act_b.state, u_b, tols=tols)
    equal = bool(np.max(np.abs(post_a.entries - post_b.entries)) <= 1e-10)

    weight_a = float(abs(alpha) ** 2)
    weight_b = float(abs(beta) ** 2)

    reward_distance = None
    dec_a = decompose(post_a, act_a.reward_partition, tols=tols)
    dec_b = decompose(post_b, act_b.reward_partition, tols=tols)
    branch_a = {b.label: b for b in dec_a.branches}
    branch_b = {b.label: b for b in dec_b.branches}
    if "reward" in branch_a and "reward" in branch_b:
        reward_distance = erasure_exists(branch_a["reward"].state,
                                         branch_b["reward"].state, tols=tols).spectral_distance

    return EquivalenceReport(
        reward_weight_a=weight_a,
        reward_weight_b=weight_b,
        state_a_post=post_a,
        state_b_post=post_b,
        post_erasure_equal=equal,
        verdict="indifferent" if equal else None,
        reward_branch_spectral_distance=reward_distance,
    )


def expected_utility(branches: BranchDecomposition, utility: Mapping[str, float]) -> float:
    """Sum of branch weight times utility over the decomposition."""
    total = 0.0
    for b in branches.branches:
        if b.label not in utility:
            raise DomainError(f"no utility assigned to branch {b.label!r} with weight {b.weight}")
        total += b.weight * float(utility[b.label])
    return total


def sector_of(rho: DensityMatrix, tol: float | None = None,
              tols: Tolerances = DEFAULT_TOLS) -> tuple[int, ...]:
    """Sector key: the sorted spectrum rounded to tol resolution.

    Two states share a sector exactly when erasure between them is feasible
    at that resolution.
    """
    tol = tols.tol_erasure if tol is None else tol
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    lam = spectrum(rho, tols)
    return tuple(int(round(x / tol)) for x in lam)


def erasure_report(verdict: ErasureVerdict, rho1: DensityMatrix, rho2: DensityMatrix,
                   tols: Tolerances = DEFAULT_TOLS) -> str:
    """Text report: both sorted spectra, distance, feasibility, residual."""
    lines = [
        "spectrum 1: " + " ".join(f"{x:.12g}" for x in spectrum(rho1, tols)),
        "spectrum 2: " + " ".join(f"{x:.12g}" for x in spectrum(rho2, tols)),
        f"spectral distance (L-inf): {verdict.spectral_distance:.12g}",
        f"erasure feasible: {verdict.feasible}",
    ]
    if verdict.witness_residual is not None:
        lines.append(f"witness residual: {verdict.witness_residual:.3e}")
    lines += [f"note: {note}" for note in REPORT_NOTES]
    return "\n".join(lines) + "\n"
