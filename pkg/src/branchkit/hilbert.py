"""Finite-dimensional state representation and core linear algebra.

Kets, density matrices, labeled tensor layouts, unitaries, partial traces,
spectra, and entropy. All values are immutable after construction and every
operation is a pure function, so everything here is safe to share across
threads without synchronization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    CapacityError,
    LayoutError,
    ParameterError,
    StateInvariantError,
)

__all__ = [
    "Ket",
    "DensityMatrix",
    "SubsystemLayout",
    "Unitary",
    "ValidationReport",
    "validate",
    "tensor",
    "tensor_all",
    "tensor_kets",
    "partial_trace",
    "apply_unitary",
    "spectrum",
    "eigh_descending",
    "vn_entropy",
    "purity",
    "dump_matrix",
    "load_matrix",
]


def _frozen_complex(values, shape_kind: str) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if shape_kind == "vector":
        if arr.ndim != 1 or arr.size == 0:
            raise StateInvariantError(f"expected a nonempty vector, got shape {arr.shape}")
    else:
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise StateInvariantError(f"expected a nonempty square matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ket:
    """A normalized state vector."""

    amplitudes: np.ndarray

    def __init__(self, amplitudes, tols: Tolerances = DEFAULT_TOLS):
        arr = _frozen_complex(amplitudes, "vector")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > tols.tol_norm:
            raise StateInvariantError(f"ket norm {norm!r} deviates from 1 beyond {tols.tol_norm}")
        object.__setattr__(self, "amplitudes", arr)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @staticmethod
    def basis(dim: int, index: int) -> "Ket":
        """Computational basis vector |index> in the given dimension."""
        vec = np.zeros(dim, dtype=np.complex128)
        vec[index] = 1.0
        return Ket(vec)

    @staticmethod
    def normalized(amplitudes, tols: Tolerances = DEFAULT_TOLS) -> "Ket":
        """Normalize an arbitrary nonzero vector into a Ket."""
        arr = np.asarray(amplitudes, dtype=np.complex128)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise StateInvariantError("cannot normalize the zero vector")
        return Ket(arr / norm, tols=tols)

    def overlap(self, other: "Ket") -> complex:
        """Inner product <self|other>."""
        if self.dim != other.dim:
            raise LayoutError(f"ket dims differ: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class ValidationReport:
    """Per-invariant residuals and pass/fail flags for a candidate state."""

    herm_residual: float
    trace_residual: float
    min_eigenvalue: float
    herm_ok: bool
    trace_ok: bool
    psd_ok: bool

    @property
    def ok(self) -> bool:
        return self.herm_ok and self.trace_ok and self.psd_ok


def validate(entries, tols: Tolerances = DEFAULT_TOLS) -> ValidationReport:
    """Report how far an arbitrary complex square matrix is from a valid state.

    Never raises: the report is the result. The minimum eigenvalue is taken
    from the Hermitian part so the check is meaningful even when the
    Hermiticity test itself fails.
    """
    arr = np.asarray(entries, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise StateInvariantError(f"expected a square matrix, got shape {arr.shape}")
    herm_residual = float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0
    trace_residual = float(abs(np.trace(arr) - 1.0))
    hermitian_part = (arr + arr.conj().T) / 2.0
    min_eig = float(np.linalg.eigvalsh(hermitian_part)[0])
    return ValidationReport(
        herm_residual=herm_residual,
        trace_residual=trace_residual,
        min_eigenvalue=min_eig,
        herm_ok=herm_residual <= tols.tol_herm,
        trace_ok=trace_residual <= tols.tol_trace,
        psd_ok=min_eig >= -tols.tol_psd,
    )


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A Hermitian, unit-trace, positive-semidefinite complex matrix."""

    entries: np.ndarray

    def __init__(self, entries, tols: Tolerances = DEFAULT_TOLS):
        arr = _frozen_complex(entries, "matrix")
        report = validate(arr, tols)
        if not report.ok:
            raise StateInvariantError(
                "invalid density matrix: "
                f"herm_residual={report.herm_residual:.3e} (ok={report.herm_ok}), "
                f"trace_residual={report.trace_residual:.3e} (ok={report.trace_ok}), "
                f"min_eigenvalue={report.min_eigenvalue:.3e} (ok={report.psd_ok})"
            )
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @staticmethod
    def from_ket(ket: Ket) -> "DensityMatrix":
        """Rank-one projector |k><k|."""
        v = ket.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))

    @staticmethod
    def maximally_mixed(dim: int) -> "DensityMatrix":
        return DensityMatrix(np.eye(dim, dtype=np.complex128) / dim)

    @staticmethod
    def mixture(components: Sequence[tuple[float, "DensityMatrix"]],
                tols: Tolerances = DEFAULT_TOLS) -> "DensityMatrix":
        """Convex combination sum_i p_i rho_i; the p_i must sum to 1."""
        if not components:
            raise ParameterError("a mixture needs at least one component")
        dim = components[0][1].dim
        acc = np.zeros((dim, dim), dtype=np.complex128)
        for p, rho in components:
            if rho.dim != dim:
                raise LayoutError("mixture components have mismatched dimensions")
            if p < 0:
                raise ParameterError(f"mixture weight {p} is negative")
            acc += p * rho.entries
        return DensityMatrix(acc, tols=tols)

    @staticmethod
    def diagonal(values, tols: Tolerances = DEFAULT_TOLS) -> "DensityMatrix":
        return DensityMatrix(np.diag(np.asarray(values, dtype=np.complex128)), tols=tols)


@dataclass(frozen=True, eq=False)
class Unitary:
    """A matrix U with U^dag U = I within tolerance."""

    entries: np.ndarray

    def __init__(self, entries, tols: Tolerances = DEFAULT_TOLS):
        arr = _frozen_complex(entries, "matrix")
        residual = float(np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0]))))
        if residual > tols.tol_unitary:
            raise StateInvariantError(f"unitarity residual {residual:.3e} exceeds {tols.tol_unitary}")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @staticmethod
    def identity(dim: int) -> "Unitary":
        return Unitary(np.eye(dim, dtype=np.complex128))


@dataclass(frozen=True)
class SubsystemLayout:
    """An ordered list of labeled tensor factors.

    Defines what "trace out y" means: partial traces and factor-local
    projectors are expressed against these labels.
    """

    factors: tuple[tuple[str, int], ...]

    def __init__(self, factors: Iterable[tuple[str, int]]):
        factors = tuple((str(label), int(dim)) for label, dim in factors)
        labels = [label for label, _ in factors]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate factor labels in {labels}")
        if any(dim <= 0 for _, dim in factors):
            raise LayoutError("factor dimensions must be positive")
        object.__setattr__(self, "factors", factors)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def dim(self) -> int:
        return int(math.prod(self.dims))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown factor label {label!r}; have {self.labels}") from None

    def dim_of(self, label: str) -> int:
        return self.factors[self.index(label)][1]

    def check_state(self, dim: int) -> None:
        if self.dim != dim:
            raise LayoutError(f"layout dimension {self.dim} does not match state dimension {dim}")


def tensor(a: DensityMatrix, b: DensityMatrix, tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """Kronecker product of two states; total dimension capped by tols.max_dim."""
    total = a.dim * b.dim
    if total > tols.max_dim:
        raise CapacityError(f"tensor dimension {total} exceeds cap {tols.max_dim}")
    return DensityMatrix(np.kron(a.entries, b.entries), tols=tols)


def tensor_all(states: Sequence[DensityMatrix], tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """Left-to-right Kronecker product of several states."""
    if not states:
        raise ParameterError("tensor_all needs at least one state")
    acc = states[0]
    for s in states[1:]:
        acc = tensor(acc, s, tols=tols)
    return acc


def tensor_kets(kets: Sequence[Ket], tols: Tolerances = DEFAULT_TOLS) -> Ket:
    """Kronecker product of kets; same dimension cap as tensor()."""
    if not kets:
        raise ParameterError("tensor_kets needs at least one ket")
    total = math.prod(k.dim for k in kets)
    if total > tols.max_dim:
        raise CapacityError(f"tensor dimension {total} exceeds cap {tols.max_dim}")
    acc = kets[0].amplitudes
    for k in kets[1:]:
        acc = np.kron(acc, k.amplitudes)
    return Ket(acc, tols=tols)


def partial_trace(rho: DensityMatrix, layout: SubsystemLayout, keep: Iterable[str],
                  tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """Trace out every factor not named in ``keep``.

    The result's factor order follows the layout order of the kept labels.
    Keeping every label returns the state unchanged.
    """
    layout.check_state(rho.dim)
    keep_set = set(keep)
    if not keep_set:
        raise LayoutError("keep must name at least one factor")
    unknown = keep_set - set(layout.labels)
    if unknown:
        raise LayoutError(f"unknown labels in keep: {sorted(unknown)}; have {layout.labels}")
    if keep_set == set(layout.labels):
        return rho

    dims = list(layout.dims)
    reshaped = rho.entries.reshape(dims + dims)
    remaining = list(layout.labels)
    for label in [lb for lb in layout.labels if lb not in keep_set]:
        axis = remaining.index(label)
        n = len(remaining)
        reshaped = np.trace(reshaped, axis1=axis, axis2=axis + n)
        remaining.pop(axis)
    kept_dim = math.prod(layout.dim_of(lb) for lb in remaining)
    return DensityMatrix(reshaped.reshape(kept_dim, kept_dim), tols=tols)


def apply_unitary(rho: DensityMatrix, u: Unitary, tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """Conjugate: U rho U^dag. Preserves the spectrum."""
    if rho.dim != u.dim:
        raise LayoutError(f"state dim {rho.dim} does not match unitary dim {u.dim}")
    return DensityMatrix(u.entries @ rho.entries @ u.entries.conj().T, tols=tols)


def eigh_descending(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with eigenvalues sorted in descending order.

    Ties among degenerate eigenvalues are broken by the stable reversal of
    numpy's ascending eigh output, which is deterministic for a given input
    matrix. Erasure-unitary construction relies on this consistency.
    """
    vals, vecs = np.linalg.eigh(rho.entries)
    order = np.arange(len(vals))[::-1]
    return vals[order].copy(), vecs[:, order].copy()


def spectrum(rho: DensityMatrix, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Real eigenvalues sorted descending, clamped into [0, 1].

    Values within tol_psd of the interval are clamped onto it; anything
    further out would have failed state validation already.
    """
    vals = np.linalg.eigvalsh(rho.entries)[::-1].copy()
    vals[(vals < 0.0) & (vals >= -tols.tol_psd)] = 0.0
    vals[(vals > 1.0) & (vals <= 1.0 + tols.tol_psd)] = 1.0
    return vals


def vn_entropy(rho: DensityMatrix, log_base: float = math.e,
               tols: Tolerances = DEFAULT_TOLS) -> float:
    """-sum_i lambda_i log(lambda_i) over eigenvalues above tol_zero.

    The log base is a parameter (default natural log); zero eigenvalues
    contribute nothing.
    """
    if log_base <= 1.0:
        raise ParameterError(f"log base must exceed 1, got {log_base}")
    lam = spectrum(rho, tols=tols)
    lam = lam[lam > tols.tol_zero]
    return float(-np.sum(lam * np.log(lam)) / math.log(log_base))


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2); equals 1 exactly for rank-one states, 1/d when maximally mixed."""
    return float(np.real(np.trace(rho.entries @ rho.entries)))


# --- matrix interchange format -------------------------------------------------
#
# A small line-oriented text document used by the CLI for state dumps and
# golden tests:
#
#   dim <d>
#   (<re>,<im>) ... d entries          one line per row, row-major
#
# Floats are written with repr so the round trip is exact.

def dump_matrix(rho: DensityMatrix) -> str:
    lines = [f"dim {rho.dim}"]
    for row in rho.entries:
        lines.append(" ".join(f"({z.real!r},{z.imag!r})" for z in row))
    return "\n".join(lines) + "\n"


def load_matrix(text: str, tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("dim "):
        raise StateInvariantError("matrix document must start with a 'dim <d>' line")
    try:
        dim = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise StateInvariantError(f"unreadable dimension line: {lines[0]!r}") from exc
    if len(lines) - 1 != dim:
        raise StateInvariantError(f"expected {dim} rows, found {len(lines) - 1}")
    entries = np.zeros((dim, dim), dtype=np.complex128)
    for i, line in enumerate(lines[1:]):
        cells = line.split()
        if len(cells) != dim:
            raise StateInvariantError(f"row {i} has {len(cells)} entries, expected {dim}")
        for j, cell in enumerate(cells):
            if not (cell.startswith("(") and cell.endswith(")")):
                raise StateInvariantError(f"unreadable entry {cell!r} at row {i}, column {j}")
            re_s, _, im_s = cell[1:-1].partition(",")
            try:
                entries[i, j] = complex(float(re_s), float(im_s))
            except ValueError as exc:
                raise StateInvariantError(f"unreadable entry {cell!r} at row {i}, column {j}") from exc
    return DensityMatrix(entries, tols=tols)
