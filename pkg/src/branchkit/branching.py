"""Branch decomposition of a universal state against a macrostate partition.

A complete set of orthogonal projectors defines the branches; sandwiching
P rho P extracts each branch (which may itself be mixed), and the off-block
remainder quantifies the residual interference between macrostates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import LayoutError, ParameterError, PartitionError, StateInvariantError
from .hilbert import DensityMatrix, SubsystemLayout, purity

__all__ = [
    "MacrostatePartition",
    "Branch",
    "BranchDecomposition",
    "decompose",
    "ct_norm",
    "merge_macrostates",
    "branch_report",
]


@dataclass(frozen=True, eq=False)
class MacrostatePartition:
    """Labeled orthogonal projectors summing to the identity."""

    projectors: tuple[tuple[str, np.ndarray], ...]

    def __init__(self, projectors: Iterable[tuple[str, np.ndarray]],
                 tols: Tolerances = DEFAULT_TOLS):
        items = []
        for label, proj in projectors:
            arr = np.array(proj, dtype=np.complex128)
            arr.setflags(write=False)
            items.append((str(label), arr))
        if not items:
            raise PartitionError("a partition needs at least one projector")
        labels = [label for label, _ in items]
        if len(set(labels)) != len(labels):
            raise PartitionError(f"duplicate macrostate labels in {labels}")
        dim = items[0][1].shape[0]
        tol = tols.tol_projector
        for label, p in items:
            if p.ndim != 2 or p.shape != (dim, dim):
                raise PartitionError(f"projector {label!r} has shape {p.shape}, expected ({dim}, {dim})")
            if np.max(np.abs(p - p.conj().T)) > tol:
                raise PartitionError(f"projector {label!r} is not Hermitian within {tol}")
            if np.max(np.abs(p @ p - p)) > tol:
                raise PartitionError(f"projector {label!r} is not idempotent within {tol}")
        for i, (la, pa) in enumerate(items):
            for lb, pb in items[i + 1:]:
                if np.max(np.abs(pa @ pb)) > tol:
                    raise PartitionError(f"projectors {la!r} and {lb!r} are not orthogonal within {tol}")
        total = sum(p for _, p in items)
        if np.max(np.abs(total - np.eye(dim))) > tol:
            raise PartitionError(f"projectors do not sum to the identity within {tol}")
        object.__setattr__(self, "projectors", tuple(items))

    @property
    def dim(self) -> int:
        return self.projectors[0][1].shape[0]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.projectors)

    @staticmethod
    def from_factor_basis(layout: SubsystemLayout, factor: str,
                          groups: Mapping[str, Iterable[int]],
                          tols: Tolerances = DEFAULT_TOLS) -> "MacrostatePartition":
        """Partition projecting one factor onto groups of its basis indices.

        Every basis index of the factor must appear in exactly one group, so
        the resulting projectors are complete on the whole space.
        """
        idx = layout.index(factor)
        fdim = layout.dims[idx]
        seen: set[int] = set()
        for label, indices in groups.items():
            for i in indices:
                if not 0 <= i < fdim:
                    raise PartitionError(f"group {label!r} refers to basis index {i} outside factor dim {fdim}")
                if i in seen:
                    raise PartitionError(f"basis index {i} appears in more than one group")
                seen.add(i)
        if seen != set(range(fdim)):
            raise PartitionError(f"groups cover {sorted(seen)} but the factor has dim {fdim}")
        before = math.prod(layout.dims[:idx])
        after = math.prod(layout.dims[idx + 1:])
        projectors = []
        for label, indices in groups.items():
            block = np.zeros((fdim, fdim), dtype=np.complex128)
            for i in indices:
                block[i, i] = 1.0
            p = np.kron(np.kron(np.eye(before), block), np.eye(after))
            projectors.append((label, p))
        return MacrostatePartition(projectors, tols=tols)


@dataclass(frozen=True, eq=False)
class Branch:
    label: str
    weight: float
    state: DensityMatrix


@dataclass(frozen=True, eq=False)
class BranchDecomposition:
    """Branches with weights, plus the mass of omitted sub-threshold branches
    and the Frobenius norm of the cross-term remainder."""

    branches: tuple[Branch, ...]
    ct_norm: float
    omitted_weight: float = 0.0

    def __init__(self, branches: Iterable[Branch], ct_norm: float,
                 omitted_weight: float = 0.0, tols: Tolerances = DEFAULT_TOLS):
        branches = tuple(branches)
        for b in branches:
            if b.weight < 0:
                raise StateInvariantError(f"branch {b.label!r} has negative weight {b.weight}")
        total = sum(b.weight for b in branches) + omitted_weight
        if abs(total - 1.0) > tols.tol_trace:
            raise StateInvariantError(f"branch weights sum to {total!r}, not 1")
        object.__setattr__(self, "branches", branches)
        object.__setattr__(self, "ct_norm", float(ct_norm))
        object.__setattr__(self, "omitted_weight", float(omitted_weight))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(b.label for b in self.branches)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(b.weight for b in self.branches)

    def weight_of(self, label: str) -> float:
        for b in self.branches:
            if b.label == label:
                return b.weight
        raise ParameterError(f"no branch labeled {label!r}; have {self.labels}")


def _check_partition_against(rho: DensityMatrix, part: MacrostatePartition) -> None:
    if part.dim != rho.dim:
        raise PartitionError(f"partition dim {part.dim} does not match state dim {rho.dim}")


def decompose(rho: DensityMatrix, part: MacrostatePartition,
              tols: Tolerances = DEFAULT_TOLS) -> BranchDecomposition:
    """Split a state into normalized macrostate branches.

    Branch weight is tr(P rho P); branch state is the normalized sandwich
    P rho P / weight. Branches below tol_branch are omitted (their mass is
    retained in omitted_weight), since numerical dust is not a world.
    """
    _check_partition_against(rho, part)
    blocks = []
    branches = []
    omitted = 0.0
    for label, p in part.projectors:
        sandwich = p @ rho.entries @ p
        blocks.append(sandwich)
        weight = float(np.real(np.trace(sandwich)))
        if weight <= tols.tol_branch:
            omitted += max(weight, 0.0)
            continue
        branches.append(Branch(label, weight, DensityMatrix(sandwich / weight, tols=tols)))
    remainder = rho.entries - sum(blocks)
    return BranchDecomposition(branches, ct_norm=float(np.linalg.norm(remainder)),
                               omitted_weight=omitted, tols=tols)


def ct_norm(rho: DensityMatrix, part: MacrostatePartition, norm: str = "fro") -> float:
    """Norm of the off-block part rho - sum_m P_m rho P_m.

    Frobenius by default; "trace" gives the sum of singular values. The
    remainder is traceless and not a state, so it is reported as a scalar.
    """
    _check_partition_against(rho, part)
    remainder = rho.entries.copy()
    for _, p in part.projectors:
        remainder -= p @ rho.entries @ p
    if norm == "fro":
        return float(np.linalg.norm(remainder))
    if norm == "trace":
        return float(np.sum(np.linalg.svd(remainder, compute_uv=False)))
    raise ParameterError(f"unknown norm {norm!r}; use 'fro' or 'trace'")


def merge_macrostates(part: MacrostatePartition, coarsening: Mapping[str, str],
                      tols: Tolerances = DEFAULT_TOLS) -> MacrostatePartition:
    """Sum projectors whose labels map to the same target label.

    The coarsening must be total on the partition's labels. Target labels
    keep the order of first appearance.
    """
    missing = [label for label in part.labels if label not in coarsening]
    if missing:
        raise PartitionError(f"coarsening does not map labels {missing}")
    merged: dict[str, np.ndarray] = {}
    order: list[str] = []
    for label, p in part.projectors:
        target = str(coarsening[label])
        if target not in merged:
            merged[target] = np.zeros_like(p)
            order.append(target)
        merged[target] = merged[target] + p
    return MacrostatePartition([(t, merged[t]) for t in order], tols=tols)


def _rational_label(weight: float, max_denominator: int = 1000, tol: float = 1e-9) -> str:
    frac = Fraction(weight).limit_denominator(max_denominator)
    if abs(float(frac) - weight) <= tol:
        return str(frac)
    return "-"


def branch_report(decomp: BranchDecomposition) -> str:
    """Human-readable branch table: label, weight (decimal and nearest
    small-denominator rational when one matches within 1e-9), purity."""
    lines = ["label  weight  rational  purity"]
    for b in decomp.branches:
        lines.append(f"{b.label}  {b.weight:.12g}  {_rational_label(b.weight)}  {purity(b.state):.12g}")
    lines.append(f"cross-term norm: {decomp.ct_norm:.12g}")
    if decomp.omitted_weight:
        lines.append(f"omitted sub-threshold weight: {decomp.omitted_weight:.3e}")
    return "\n".join(lines) + "\n"
