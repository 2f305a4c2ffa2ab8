"""Canonical scenario constructions shared by golden tests and the CLI registry.

Position-space packets are discretized onto a small grid; environments are
compressed to one orthonormal record state per macroscopically distinct
outcome. Two packets count as macroscopically disjoint when their overlap is
below ``MACRO_OVERLAP_MAX`` and as microscopically close (same macrostate)
when it exceeds ``MICRO_OVERLAP_MIN``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .branching import MacrostatePartition
from .config import DEFAULT_TOLS, Tolerances
from .decoherence import gaussian_packet
from .errors import ConstructionError
from .hilbert import DensityMatrix, Ket, SubsystemLayout
from .scenario_sc import SetupTable

__all__ = [
    "MACRO_OVERLAP_MAX",
    "MICRO_OVERLAP_MIN",
    "recorded_packet_state",
    "two_branch_recorded_scenario",
    "PacketMixtureScenario",
    "three_branch_mixture",
    "equal_split_setup_pair",
    "quarter_split_setup_pair",
]

MACRO_OVERLAP_MAX = 1e-6
MICRO_OVERLAP_MIN = 0.95


def recorded_packet_state(components: Sequence[tuple[float, Ket, int]], n_records: int,
                          tols: Tolerances = DEFAULT_TOLS,
                          ) -> tuple[DensityMatrix, SubsystemLayout]:
    """Pure state sum_i a_i |packet_i> (x) |record_i> on grid x records."""
    if not components:
        raise ConstructionError("need at least one packet component")
    grid = components[0][1].dim
    layout = SubsystemLayout([("x", grid), ("record", n_records)])
    psi = np.zeros(layout.dim, dtype=np.complex128)
    for amp, packet, record in components:
        if packet.dim != grid:
            raise ConstructionError("packet grids differ")
        if not 0 <= record < n_records:
            raise ConstructionError(f"record index {record} outside 0..{n_records - 1}")
        psi += amp * np.kron(packet.amplitudes, np.eye(n_records)[record])
    psi /= np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()), tols=tols), layout


def two_branch_recorded_scenario(n_grid: int = 32, width: float = 1.0,
                                 centers: tuple[float, float] = (5.0, 16.0),
                                 tols: Tolerances = DEFAULT_TOLS,
                                 ) -> tuple[DensityMatrix, SubsystemLayout, MacrostatePartition]:
    """Equal superposition of two recorded, macroscopically disjoint packets."""
    a = gaussian_packet(n_grid, centers[0], width, tols=tols)
    b = gaussian_packet(n_grid, centers[1], width, tols=tols)
    if abs(a.overlap(b)) > MACRO_OVERLAP_MAX:
        raise ConstructionError(f"packet overlap {abs(a.overlap(b)):.3e} is not macroscopically disjoint")
    amp = 1.0 / math.sqrt(2.0)
    rho, layout = recorded_packet_state([(amp, a, 0), (amp, b, 1)], 2, tols=tols)
    partition = MacrostatePartition.from_factor_basis(layout, "record", {"A": [0], "B": [1]}, tols=tols)
    return rho, layout, partition


@dataclass(frozen=True, eq=False)
class PacketMixtureScenario:
    """The three-branch mixed-state construction.

    An equal mixture of two recorded two-packet superpositions that share one
    record: the shared-record branch is a rank-2 mixed state of two slightly
    shifted packets (weight 1/2), the other two branches are pure (1/4 each).
    The fine partition splits the shared branch along the symmetric packet
    combination, giving four branches instead of three.
    """

    state: DensityMatrix
    layout: SubsystemLayout
    coarse: MacrostatePartition
    fine: MacrostatePartition
    structural_weights: dict[str, Fraction]
    micro_overlap: float
    component_states: tuple[DensityMatrix, DensityMatrix]
    packets: dict[str, Ket]


def three_branch_mixture(n_grid: int = 32, width: float = 1.0, shift: float = 0.5,
                         centers: tuple[float, float, float] = (5.0, 16.0, 27.0),
                         tols: Tolerances = DEFAULT_TOLS) -> PacketMixtureScenario:
    """Build the equal mixture of two recorded superpositions sharing record A.

    Component one superposes packet A (record A) with packet B (record B);
    component two superposes the shifted packet A' = A(x - shift) (record A,
    same macrostate as A) with packet C (record C).
    """
    a = gaussian_packet(n_grid, centers[0], width, tols=tols)
    a_shift = gaussian_packet(n_grid, centers[0] - shift, width, tols=tols)
    b = gaussian_packet(n_grid, centers[1], width, tols=tols)
    c = gaussian_packet(n_grid, centers[2], width, tols=tols)

    micro = abs(a.overlap(a_shift))
    if micro <= MICRO_OVERLAP_MIN:
        raise ConstructionError(
            f"shifted packet overlap {micro:.4f} <= {MICRO_OVERLAP_MIN}; the shift leaves the macrostate")
    for x, y, names in ((a, b, "A/B"), (a, c, "A/C"), (b, c, "B/C"),
                        (a_shift, b, "A'/B"), (a_shift, c, "A'/C")):
        ov = abs(x.overlap(y))
        if ov > MACRO_OVERLAP_MAX:
            raise ConstructionError(f"packets {names} overlap {ov:.3e}; not macroscopically disjoint")

    amp = 1.0 / math.sqrt(2.0)
    rho2, layout = recorded_packet_state([(amp, a, 0), (amp, b, 1)], 3, tols=tols)
    rho3, _ = recorded_packet_state([(amp, a_shift, 0), (amp, c, 2)], 3, tols=tols)
    state = DensityMatrix.mixture([(0.5, rho2), (0.5, rho3)], tols=tols)

    coarse = MacrostatePartition.from_factor_basis(
        layout, "record", {"A": [0], "B": [1], "C": [2]}, tols=tols)

    # fine split of the A block along the symmetric combination of A and A'
    sym = Ket.normalized(a.amplitudes + a_shift.amplitudes, tols=tols)
    pi_sym = np.outer(sym.amplitudes, sym.amplitudes.conj())
    e_a = np.zeros((3, 3), dtype=np.complex128)
    e_a[0, 0] = 1.0
    p_a_sym = np.kron(pi_sym, e_a)
    p_a_rest = np.kron(np.eye(n_grid) - pi_sym, e_a)
    others = {label: proj for label, proj in coarse.projectors if label != "A"}
    fine = MacrostatePartition(
        [("A-sym", p_a_sym), ("A-rest", p_a_rest),
         ("B", others["B"]), ("C", others["C"])], tols=tols)

    return PacketMixtureScenario(
        state=state,
        layout=layout,
        coarse=coarse,
        fine=fine,
        structural_weights={"A": Fraction(1, 2), "B": Fraction(1, 4), "C": Fraction(1, 4)},
        micro_overlap=micro,
        component_states=(rho2, rho3),
        packets={"A": a, "A_shift": a_shift, "B": b, "C": c},
    )


def equal_split_setup_pair() -> tuple[SetupTable, SetupTable]:
    """The two-branch spin measurement with one auxiliary display.

    Both set-ups display the measurement outcome on D1; the auxiliary display
    D2 is wired oppositely in the two set-ups, which is what makes the two
    branch credences provably equal.
    """
    displays = ["electron", "D1", "D2"]
    half = [Fraction(1, 2)] * 2
    alpha = SetupTable(
        "alpha", displays,
        [{"electron": "up_z", "D1": "up", "D2": "heart"},
         {"electron": "down_z", "D1": "down", "D2": "diamond"}],
        weights=half, outcome_display="D1")
    beta = SetupTable(
        "beta", displays,
        [{"electron": "up_z", "D1": "up", "D2": "diamond"},
         {"electron": "down_z", "D1": "down", "D2": "heart"}],
        weights=half, outcome_display="D1")
    return alpha, beta


def quarter_split_setup_pair() -> tuple[SetupTable, SetupTable]:
    """The mixed-preparation measurement split into four equal branches.

    In the first set-up each of the symbols up/heart/spade/cross picks out
    its own branch; in the second they all pick out the first branch. The
    derived credences are 1/4 for the up outcome and 3/4 for down.
    """
    displays = ["electron", "D1", "D2", "D3", "D4"]
    quarters = [Fraction(1, 4)] * 4
    mu = SetupTable(
        "mu", displays,
        [{"electron": "up_x", "D1": "up", "D2": "diamond", "D3": "club", "D4": "star"},
         {"electron": "down_x", "D1": "down", "D2": "heart", "D3": "club", "D4": "star"},
         {"electron": "down_x", "D1": "down", "D2": "diamond", "D3": "spade", "D4": "star"},
         {"electron": "down_x", "D1": "down", "D2": "diamond", "D3": "club", "D4": "cross"}],
        weights=quarters, outcome_display="D1")
    nu = SetupTable(
        "nu", displays,
        [{"electron": "up_x", "D1": "up", "D2": "heart", "D3": "spade", "D4": "cross"},
         {"electron": "down_x", "D1": "down", "D2": "diamond", "D3": "club", "D4": "star"},
         {"electron": "down_x", "D1": "down", "D2": "diamond", "D3": "club", "D4": "star"},
         {"electron": "down_x", "D1": "down", "D2": "diamond", "D3": "club", "D4": "star"}],
        weights=quarters, outcome_display="D1")
    return mu, nu
