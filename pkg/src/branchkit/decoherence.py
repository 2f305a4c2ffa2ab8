"""Environment-induced suppression of interference.

Two routes are provided: a phenomenological one (exponential overlap decay
applied to off-macrostate blocks) and a mechanistic one (a bath of two-level
systems acquiring conditional phases, plus an explicit premeasurement
unitary correlating system states with orthogonal records).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .branching import MacrostatePartition
from .config import DEFAULT_TOLS, Tolerances
from .errors import ConstructionError, LayoutError, ParameterError
from .hilbert import DensityMatrix, Ket, SubsystemLayout, Unitary

__all__ = [
    "DecayParams",
    "PointerMap",
    "overlap_decay",
    "premeasurement_unitary",
    "spin_bath_overlap",
    "dephase",
    "gaussian_packet",
    "ExponentialFit",
    "fit_exponential_envelope",
    "decay_curve_csv",
]


@dataclass(frozen=True)
class DecayParams:
    """Elapsed time and the characteristic decoherence timescale."""

    tau_d: float
    t: float

    def __post_init__(self):
        if self.tau_d <= 0:
            raise ParameterError(f"tau_d must be positive, got {self.tau_d}")
        if self.t < 0:
            raise ParameterError(f"t must be non-negative, got {self.t}")


def overlap_decay(p: DecayParams) -> float:
    """Residual record overlap exp(-t / tau_d), in (0, 1]."""
    return math.exp(-p.t / p.tau_d)


@dataclass(frozen=True)
class PointerMap:
    """Correlation between a measured basis and environment record states.

    Every system basis label has exactly one record ket and all record kets
    share one dimension.
    """

    system_basis: tuple[str, ...]
    environment_states: dict[str, Ket]

    def __init__(self, system_basis: Sequence[str], environment_states: Mapping[str, Ket]):
        labels = tuple(str(s) for s in system_basis)
        if len(set(labels)) != len(labels):
            raise ConstructionError(f"duplicate system basis labels in {labels}")
        missing = [s for s in labels if s not in environment_states]
        extra = [s for s in environment_states if s not in labels]
        if missing or extra:
            raise ConstructionError(
                f"pointer map labels mismatch: missing records for {missing}, unused records {extra}")
        dims = {environment_states[s].dim for s in labels}
        if len(dims) != 1:
            raise ConstructionError(f"record kets have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "system_basis", labels)
        object.__setattr__(self, "environment_states", dict(environment_states))

    @property
    def environment_dim(self) -> int:
        return next(iter(self.environment_states.values())).dim


def _completion_unitary(source: np.ndarray, target: np.ndarray) -> np.ndarray:
    """A unitary mapping the source vector to the target vector.

    Both bases are completed from the canonical vectors by Gram-Schmidt in a
    fixed order, so identical source and target yield the identity exactly.
    """
    dim = source.shape[0]
    if np.allclose(source, target, atol=0.0):
        return np.eye(dim, dtype=np.complex128)

    def complete(first: np.ndarray) -> np.ndarray:
        cols = [first]
        for i in range(dim):
            cand = np.zeros(dim, dtype=np.complex128)
            cand[i] = 1.0
            for c in cols:
                cand = cand - np.vdot(c, cand) * c
            norm = np.linalg.norm(cand)
            if norm > 1e-7:
                cols.append(cand / norm)
            if len(cols) == dim:
                break
        return np.column_stack(cols)

    return complete(target) @ complete(source).conj().T


def premeasurement_unitary(layout: SubsystemLayout, pm: PointerMap, ready: Ket,
                           tols: Tolerances = DEFAULT_TOLS) -> Unitary:
    """Unitary on system x environment sending |S_n>|ready> to |S_n>|E_n>.

    The measured system is the first factor of the layout; the environment is
    the joint of all remaining factors (which is where the record kets and the
    ready ket live). The records must be linearly independent, otherwise the
    interaction cannot resolve the system states.
    """
    if len(layout.factors) < 2:
        raise LayoutError("layout needs a system factor and at least one environment factor")
    sys_dim = layout.dims[0]
    env_dim = math.prod(layout.dims[1:])
    if sys_dim != len(pm.system_basis):
        raise LayoutError(
            f"system factor dim {sys_dim} does not match {len(pm.system_basis)} pointer labels")
    if pm.environment_dim != env_dim or ready.dim != env_dim:
        raise LayoutError(
            f"environment dim {env_dim} does not match records ({pm.environment_dim}) "
            f"or ready state ({ready.dim})")
    if env_dim < sys_dim:
        raise LayoutError(f"environment dim {env_dim} cannot record {sys_dim} outcomes")

    records = np.column_stack([pm.environment_states[s].amplitudes for s in pm.system_basis])
    smallest_sv = np.linalg.svd(records, compute_uv=False)[-1]
    if smallest_sv < 1e-10:
        raise ConstructionError("pointer record states are not linearly independent")

    blocks = np.zeros((sys_dim * env_dim, sys_dim * env_dim), dtype=np.complex128)
    for n in range(sys_dim):
        u_n = _completion_unitary(ready.amplitudes, records[:, n])
        blocks[n * env_dim:(n + 1) * env_dim, n * env_dim:(n + 1) * env_dim] = u_n
    return Unitary(blocks, tols=tols)


def spin_bath_overlap(n_env: int, couplings: Sequence[float], t: float) -> float:
    """Record overlap for a bath of two-level systems, prod_k cos(g_k t).

    Each bath spin starts aligned and is conditionally rotated one way or the
    other depending on the branch, opening a relative angle g_k t; the branch
    records' inner product is then the product of per-spin cosines. An empty
    bath resolves nothing and returns 1.
    """
    if n_env < 0:
        raise ParameterError(f"n_env must be non-negative, got {n_env}")
    if len(couplings) != n_env:
        raise ParameterError(f"expected {n_env} couplings, got {len(couplings)}")
    return float(np.prod(np.cos(np.asarray(couplings, dtype=float) * t))) if n_env else 1.0


def dephase(rho: DensityMatrix, part: MacrostatePartition, decay: float,
            tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """Scale off-macrostate blocks by a residual overlap factor.

    Diagonal blocks P_m rho P_m are untouched; every off-diagonal block is
    multiplied by decay in [0, 1]. The result is the convex combination
    decay * rho + (1 - decay) * pinched(rho), so positivity and trace are
    preserved by construction.
    """
    if not 0.0 <= decay <= 1.0:
        raise ParameterError(f"decay must lie in [0, 1], got {decay}")
    if part.dim != rho.dim:
        raise LayoutError(f"partition dim {part.dim} does not match state dim {rho.dim}")
    pinched = np.zeros_like(rho.entries)
    for _, p in part.projectors:
        pinched += p @ rho.entries @ p
    return DensityMatrix(decay * rho.entries + (1.0 - decay) * pinched, tols=tols)


def gaussian_packet(n_points: int, center: float, width: float,
                    tols: Tolerances = DEFAULT_TOLS) -> Ket:
    """A real Gaussian wave packet discretized on an n-point grid.

    The packet is exp(-(x - center)^2 / (4 width^2)) on grid points
    x = 0..n-1, renormalized after truncation at the grid edges. Two packets
    count as macroscopically disjoint when their overlap is below 1e-6 and as
    microscopically close when it exceeds 0.95 (the package-wide reading of
    "same macrostate").
    """
    if n_points < 2:
        raise ParameterError(f"grid needs at least 2 points, got {n_points}")
    if width <= 0:
        raise ParameterError(f"width must be positive, got {width}")
    x = np.arange(n_points, dtype=float)
    return Ket.normalized(np.exp(-((x - center) ** 2) / (4.0 * width ** 2)), tols=tols)


@dataclass(frozen=True)
class ExponentialFit:
    tau: float
    amplitude: float
    r_squared: float


def fit_exponential_envelope(ts: Sequence[float], overlaps: Sequence[float],
                             floor: float = 1e-9) -> ExponentialFit:
    """Least-squares fit of |overlap| to amplitude * exp(-t / tau).

    Fitted on log|overlap| against t; samples with magnitude below the floor
    are dropped before taking the log. R^2 is reported for the log-linear fit.
    """
    ts = np.asarray(ts, dtype=float)
    mags = np.abs(np.asarray(overlaps, dtype=float))
    mask = mags > floor
    if int(np.count_nonzero(mask)) < 3:
        raise ParameterError("need at least 3 samples above the floor to fit a decay time")
    t, y = ts[mask], np.log(mags[mask])
    slope, intercept = np.polyfit(t, y, 1)
    if slope >= 0:
        raise ParameterError("overlap magnitudes do not decay; cannot fit a positive tau")
    predicted = slope * t + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ExponentialFit(tau=-1.0 / slope, amplitude=math.exp(intercept), r_squared=r2)


def decay_curve_csv(ts: Sequence[float], overlaps: Sequence[float], fitted_tau: float) -> str:
    """CSV document with columns (t, overlap, fitted tau_d)."""
    lines = ["t,overlap,fitted_tau_d"]
    for t, o in zip(ts, overlaps):
        lines.append(f"{float(t)!r},{float(o)!r},{float(fitted_tau)!r}")
    return "\n".join(lines) + "\n"
