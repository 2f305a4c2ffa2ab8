"""Symmetric station scenarios: permutation symmetry, locality, and credences.

A particle spread over n locations faces n identical stations, each with an
agent and a measurement device. Measurement decoheres the state into one
branch per station. Credences follow from symmetry (equal for permutation
invariant situations) and from the invariance of the local reduced state
under remote operations, never from the weights directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .branching import MacrostatePartition
from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    CapacityError,
    LayoutError,
    ParameterError,
    SupportViolationError,
)
from .hilbert import DensityMatrix, SubsystemLayout, Unitary, apply_unitary, partial_trace
from .scenario_sc import CredenceSolution, DerivationStep, as_fraction

__all__ = [
    "StationScenario",
    "build_symmetric",
    "build_weighted",
    "measure_stations",
    "station_partition",
    "check_symmetry",
    "remote_unitary",
    "merge_remote_stations",
    "remote_invariance",
    "derive_credences",
]

LOCATION_LABEL = "loc"
ENV_LABEL = "E"

# basis conventions: agents and devices are {0: ready, 1: found}; the
# environment record for the branch of station i (1-based) is basis index
# i - 1, with index 0 doubling as the pre-measurement ready record


def _agent(i: int) -> str:
    return f"A{i}"


def _device(i: int) -> str:
    return f"M{i}"


@dataclass(frozen=True, eq=False)
class StationScenario:
    """State, layout, and provenance of an n-station scenario.

    ``merged_stations`` and ``remote_transform`` record a remote act applied
    to a symmetric parent (kept in ``parent_state``); credences for such a
    scenario are derived from the parent plus the invariance certificate.
    """

    n: int
    layout: SubsystemLayout
    state: DensityMatrix
    weights: tuple[Fraction, ...]
    measured: bool = False
    merged_stations: tuple[int, ...] = ()
    remote_transform: Unitary | None = None
    parent_state: DensityMatrix | None = None

    @property
    def label(self) -> str:
        return f"stations-{self.n}"


def _station_layout(n: int) -> SubsystemLayout:
    factors = [(LOCATION_LABEL, n)]
    factors += [(_agent(i), 2) for i in range(1, n + 1)]
    factors += [(_device(i), 2) for i in range(1, n + 1)]
    factors.append((ENV_LABEL, n))
    return SubsystemLayout(factors)


def build_weighted(weights: Sequence[object], tols: Tolerances = DEFAULT_TOLS) -> StationScenario:
    """Pre-measurement scenario with given per-location packet weights."""
    fracs = tuple(as_fraction(w) for w in weights)
    n = len(fracs)
    if n < 2:
        raise ParameterError(f"need at least 2 stations, got {n}")
    if any(w <= 0 for w in fracs) or sum(fracs, Fraction(0)) != 1:
        raise ParameterError(f"location weights must be positive rationals summing to 1, got {fracs}")
    layout = _station_layout(n)
    if layout.dim > tols.max_dim:
        raise CapacityError(f"scenario dimension {layout.dim} exceeds cap {tols.max_dim}")
    psi = np.zeros(layout.dim, dtype=np.complex128)
    # all agents/devices ready (index 0), environment ready (index 0):
    # those trailing factors contribute stride layout.dim // n per location
    stride = layout.dim // n
    for i, w in enumerate(fracs):
        psi[i * stride] = math.sqrt(float(w))
    psi /= np.linalg.norm(psi)
    rho = DensityMatrix(np.outer(psi, psi.conj()), tols=tols)
    return StationScenario(n=n, layout=layout, state=rho, weights=fracs)


def build_symmetric(n: int, tols: Tolerances = DEFAULT_TOLS) -> StationScenario:
    """Equal-weight n-station scenario (a pure state; purity 1)."""
    if n < 2:
        raise ParameterError(f"need at least 2 stations, got {n}")
    return build_weighted([Fraction(1, n)] * n, tols=tols)


def _measurement_permutation(layout: SubsystemLayout, n: int) -> Unitary:
    """Permutation unitary flipping device i and stamping record i when the
    particle sits at location i; a disjoint set of transpositions, completed
    by the identity elsewhere."""
    dims = layout.dims
    dim = layout.dim
    perm = np.arange(dim)

    def flat(multi: Sequence[int]) -> int:
        idx = 0
        for d, i in zip(dims, multi):
            idx = idx * d + i
        return idx

    for loc in range(n):
        src = [0] * len(dims)
        src[0] = loc
        dst = list(src)
        dst[1 + n + loc] = 1        # device M_{loc+1} flips to found
        dst[-1] = loc               # environment record for this branch
        a, b = flat(src), flat(dst)
        perm[a], perm[b] = perm[b], perm[a]
    u = np.zeros((dim, dim), dtype=np.complex128)
    u[perm, np.arange(dim)] = 1.0
    return Unitary(u)


def measure_stations(s: StationScenario, tols: Tolerances = DEFAULT_TOLS) -> StationScenario:
    """Run the premeasurement interaction: one decohered branch per station.

    Branch i carries device i in its found state and record i in the
    environment; every agent stays ready (post-measurement, pre-observation).
    """
    if s.measured:
        raise ParameterError("scenario is already measured")
    u = _measurement_permutation(s.layout, s.n)
    return replace(s, state=apply_unitary(s.state, u, tols=tols), measured=True)


def station_partition(s: StationScenario, tols: Tolerances = DEFAULT_TOLS) -> MacrostatePartition:
    """Macrostates cut along the environment records, one per station."""
    groups = {f"station{i + 1}": [i] for i in range(s.n)}
    return MacrostatePartition.from_factor_basis(s.layout, ENV_LABEL, groups, tols=tols)


def _permutation_unitary(s: StationScenario, perm: Sequence[int]) -> Unitary:
    """Joint permutation of location components, agent and device factors,
    and environment records, implementing a relabeling of the stations."""
    image = [int(p) for p in perm]
    if sorted(image) != list(range(1, s.n + 1)):
        raise ParameterError(f"{perm} is not a permutation of stations 1..{s.n}")
    dims = s.layout.dims
    n = s.n
    multi = np.array(np.unravel_index(np.arange(s.layout.dim), dims)).T
    mapped = multi.copy()
    mapped[:, 0] = np.array([image[l] - 1 for l in range(n)])[multi[:, 0]]
    for i in range(1, n + 1):
        mapped[:, image[i - 1]] = multi[:, i]                  # agent factor i -> image
        mapped[:, n + image[i - 1]] = multi[:, n + i]          # device factor i -> image
    mapped[:, -1] = np.array([image[e] - 1 for e in range(n)])[multi[:, -1]]
    flat = np.ravel_multi_index(mapped.T, dims)
    u = np.zeros((s.layout.dim, s.layout.dim), dtype=np.complex128)
    u[flat, np.arange(s.layout.dim)] = 1.0
    return Unitary(u)


def check_symmetry(s: StationScenario, perm: Sequence[int],
                   tols: Tolerances = DEFAULT_TOLS) -> bool:
    """Whether relabeling the stations by ``perm`` leaves the state unchanged."""
    u = _permutation_unitary(s, perm)
    conjugated = u.entries @ s.state.entries @ u.entries.conj().T
    return bool(np.max(np.abs(conjugated - s.state.entries)) <= tols.tol_esp)


def _local_sector_projector_mask(s: StationScenario, local_station: int) -> np.ndarray:
    """Boolean mask of basis states whose location component is the local packet."""
    dims = s.layout.dims
    multi = np.array(np.unravel_index(np.arange(s.layout.dim), dims)).T
    return multi[:, 0] == (local_station - 1)


def _check_remote_support(s: StationScenario, local_station: int, remote_u: Unitary) -> None:
    """The act must fix the local wave-packet sector pointwise and act as the
    identity on the local agent and device factors elsewhere."""
    if remote_u.dim != s.layout.dim:
        raise LayoutError(f"remote unitary dim {remote_u.dim} does not match scenario dim {s.layout.dim}")
    if not 1 <= local_station <= s.n:
        raise ParameterError(f"no station {local_station} in a {s.n}-station scenario")
    mask = _local_sector_projector_mask(s, local_station)
    u = remote_u.entries
    identity = np.eye(s.layout.dim)
    if np.max(np.abs(u[:, mask] - identity[:, mask])) > 1e-12:
        raise SupportViolationError(
            f"remote act moves the local wave packet of station {local_station}")

    # on the complement sector, demand u = I_{A_loc, M_loc} (x) W
    dims = s.layout.dims
    n = s.n
    rest_idx = np.where(~mask)[0]
    multi = np.array(np.unravel_index(rest_idx, dims)).T
    a_axis, m_axis = local_station, n + local_station
    lab = multi[:, a_axis] * 2 + multi[:, m_axis]
    other_axes = [ax for ax in range(len(dims)) if ax not in (a_axis, m_axis)]
    key = np.zeros(len(rest_idx), dtype=np.int64)
    for ax in other_axes:
        key = key * dims[ax] + multi[:, ax]
    order = np.lexsort((key,))
    by_lab = {l: rest_idx[order][lab[order] == l] for l in range(4)}
    sizes = {l: len(v) for l, v in by_lab.items()}
    if len(set(sizes.values())) != 1:
        raise SupportViolationError("complement sector does not factor over the local lab")
    ref = None
    for l in range(4):
        rows = by_lab[l]
        block = u[np.ix_(rows, rows)]
        if ref is None:
            ref = block
        elif np.max(np.abs(block - ref)) > 1e-12:
            raise SupportViolationError(
                f"remote act distinguishes states of station {local_station}'s lab")
        for l2 in range(4):
            if l2 != l:
                off = u[np.ix_(rows, by_lab[l2])]
                if np.max(np.abs(off)) > 1e-12:
                    raise SupportViolationError(
                        f"remote act couples to station {local_station}'s lab")


def local_reduced_block(s: StationScenario, state: DensityMatrix, local_station: int,
                        tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Unnormalized reduced state on (local packet, local agent, local device).

    Every remote factor is traced out and the location factor is restricted
    to the local packet component; the trace of the block is the probability
    that the particle is local.
    """
    keep = [LOCATION_LABEL, _agent(local_station), _device(local_station)]
    sigma = partial_trace(state, s.layout, keep, tols=tols)
    n = s.n
    li = local_station - 1
    block = sigma.entries.reshape(n, 4, n, 4)[li, :, li, :]
    return block.copy()


def remote_unitary(s: StationScenario, local_station: int, action: np.ndarray,
                   tols: Tolerances = DEFAULT_TOLS) -> Unitary:
    """Embed a unitary acting on everything except station ``local_station``.

    ``action`` is a unitary on the complement sector, ordered as
    (remote locations) x (local agent, local device held fixed is implied)
    x (other agents/devices, environment); concretely it must be given on
    the subspace of dimension (n-1) * dim / (4 n) and is tensored with the
    identity on the local lab.
    """
    dims = s.layout.dims
    n = s.n
    dim = s.layout.dim
    mask = _local_sector_projector_mask(s, local_station)
    rest_idx = np.where(~mask)[0]
    multi = np.array(np.unravel_index(rest_idx, dims)).T
    a_axis, m_axis = local_station, n + local_station
    lab = multi[:, a_axis] * 2 + multi[:, m_axis]
    other_axes = [ax for ax in range(len(dims)) if ax not in (a_axis, m_axis)]
    key = np.zeros(len(rest_idx), dtype=np.int64)
    for ax in other_axes:
        key = key * dims[ax] + multi[:, ax]

    block_size = (n - 1) * dim // (4 * n)
    if action.shape != (block_size, block_size):
        raise LayoutError(f"action must be {block_size}x{block_size}, got {action.shape}")

    u = np.eye(dim, dtype=np.complex128)
    for l in range(4):
        rows = rest_idx[lab == l]
        rows = rows[np.argsort(key[lab == l])]
        u[np.ix_(rows, rows)] = action
    return Unitary(u, tols=tols)


def remote_invariance(s: StationScenario, local_station: int, remote_u: Unitary,
                      tols: Tolerances = DEFAULT_TOLS) -> bool:
    """Whether a remote act leaves the local reduced block unchanged.

    The act's support is validated first (SupportViolationError otherwise);
    then the reduced state on (local packet, local agent, local device) is
    compared element-wise before and after the act.
    """
    _check_remote_support(s, local_station, remote_u)
    before = local_reduced_block(s, s.state, local_station, tols=tols)
    after_state = apply_unitary(s.state, remote_u, tols=tols)
    after = local_reduced_block(s, after_state, local_station, tols=tols)
    return bool(np.max(np.abs(after - before)) <= tols.tol_esp)


def merge_remote_stations(s: StationScenario, stations: Sequence[int],
                          tols: Tolerances = DEFAULT_TOLS) -> StationScenario:
    """Remotely fuse the wave packets of the named stations into one.

    Applies a location-factor unitary supported on the merged packets only
    (sending their equal superposition onto the lowest merged location) and
    records the act so credences can be certified against the symmetric
    parent. The local stations' packets and labs are untouched.
    """
    merged = tuple(sorted(int(i) for i in stations))
    if len(merged) < 2:
        raise ParameterError("merging needs at least two stations")
    if len(set(merged)) != len(merged) or not all(1 <= i <= s.n for i in merged):
        raise ParameterError(f"{stations} is not a set of stations in 1..{s.n}")
    if len(merged) == s.n:
        raise ParameterError("at least one station must remain local")
    if s.merged_stations:
        raise ParameterError("scenario already carries a remote merge")

    k = len(merged)
    v = np.eye(s.n, dtype=np.complex128)
    # unitary on the merged span: first row maps the equal superposition onto
    # the lowest merged location; the rest is any orthonormal completion
    sub = np.zeros((k, k), dtype=np.complex128)
    sub[:, 0] = 1.0 / math.sqrt(k)
    for col in range(1, k):
        vec = np.zeros(k, dtype=np.complex128)
        vec[0] = 1.0
        vec[col] = -1.0
        for prev in range(col):
            vec -= np.vdot(sub[:, prev], vec) * sub[:, prev]
        sub[:, col] = vec / np.linalg.norm(vec)
    # sub maps e_0 -> equal superposition; we need the inverse direction
    sub = sub.conj().T
    for a, ia in enumerate(merged):
        for b, ib in enumerate(merged):
            v[ia - 1, ib - 1] = sub[a, b]
    rest_dim = s.layout.dim // s.n
    u = Unitary(np.kron(v, np.eye(rest_dim)), tols=tols)
    return replace(
        s,
        state=apply_unitary(s.state, u, tols=tols),
        merged_stations=merged,
        remote_transform=u,
        parent_state=s.state,
    )


def derive_credences(s: StationScenario, tols: Tolerances = DEFAULT_TOLS) -> CredenceSolution:
    """Assign per-station credences from symmetry and locality alone.

    Symmetric case: every cyclic relabeling must leave the state invariant,
    and each station then receives exactly 1/n. A scenario carrying a remote
    merge is certified against its symmetric parent: each remaining local
    station keeps 1/n, the merged remainder is reported as one outcome.
    Anything else is returned with status "underived" rather than guessed.
    """
    if not s.measured:
        raise ParameterError("credences are derived post-measurement, pre-observation")

    steps: list[DerivationStep] = []
    if s.merged_stations:
        if s.remote_transform is None or s.parent_state is None:
            raise ParameterError("merged scenario lacks its recorded remote act")
        parent = StationScenario(n=s.n, layout=s.layout,
                                 state=s.parent_state, weights=s.weights)
        parent_measured = measure_stations(parent, tols=tols)
        locals_ = [i for i in range(1, s.n + 1) if i not in s.merged_stations]
        for i in locals_:
            _check_remote_support(parent, i, s.remote_transform)
            before = local_reduced_block(s, parent_measured.state, i, tols=tols)
            after = local_reduced_block(s, s.state, i, tols=tols)
            if np.max(np.abs(after - before)) > tols.tol_esp:
                return CredenceSolution({}, {}, [DerivationStep(
                    kind="remote-invariance",
                    statement=f"local reduced block of station {i} changed under the remote act",
                    justification="locality certificate failed")], status="underived")
            steps.append(DerivationStep(
                kind="remote-invariance",
                statement=f"station {i} reduced block is unchanged by the remote act",
                justification="no-FTL and locality"))
        steps.append(DerivationStep(
            kind="symmetry",
            statement=f"the parent scenario is invariant under all cyclic relabelings",
            justification="symmetric situations get equal credences"))
        credences: list[tuple[str, Fraction]] = []
        for i in locals_:
            credences.append((str(i), Fraction(1, s.n)))
        credences.append(("merged", Fraction(len(s.merged_stations), s.n)))
        steps.append(DerivationStep(
            kind="normalization",
            statement=" + ".join(f"P(station {lbl}|{s.label})" for lbl, _ in credences) + " = 1",
            justification="outcomes are exclusive and exhaustive"))
        branch = {s.label: tuple(c for _, c in credences)}
        symbols = {(s.label, "station", lbl): c for lbl, c in credences}
        return CredenceSolution(branch, symbols, steps)

    if len(set(s.weights)) != 1:
        return CredenceSolution({}, {}, [DerivationStep(
            kind="symmetry",
            statement="station weights are unequal and no remote certificate is recorded",
            justification="refusing to assign without a symmetry or locality derivation")],
            status="underived")

    shift = list(range(2, s.n + 1)) + [1]
    perm = list(range(1, s.n + 1))
    for _ in range(s.n - 1):
        perm = [shift[p - 1] for p in perm]
        if not check_symmetry(s, perm, tols=tols):
            return CredenceSolution({}, {}, [DerivationStep(
                kind="symmetry",
                statement=f"state is not invariant under the station relabeling {perm}",
                justification="symmetry certificate failed")], status="underived")
        steps.append(DerivationStep(
            kind="symmetry",
            statement=f"state is invariant under the station relabeling {perm}",
            justification="symmetric situations get equal credences"))
    steps.append(DerivationStep(
        kind="normalization",
        statement=" + ".join(f"P(station {i}|{s.label})" for i in range(1, s.n + 1))
        + f" = 1, giving 1/{s.n} each",
        justification="outcomes are exclusive and exhaustive"))
    branch = {s.label: tuple(Fraction(1, s.n) for _ in range(s.n))}
    symbols = {(s.label, "station", str(i)): Fraction(1, s.n) for i in range(1, s.n + 1)}
    return CredenceSolution(branch, symbols, steps)
