"""Central numeric configuration.

Every tolerance used by the validation and comparison routines lives in one
frozen record so that CLI overrides and tests can pin them explicitly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ParameterError


@dataclass(frozen=True)
class Tolerances:
    tol_norm: float = 1e-12      # ket normalization residual
    tol_herm: float = 1e-12      # max-entry Hermiticity residual
    tol_trace: float = 1e-10     # |tr - 1| residual
    tol_psd: float = 1e-10       # admissible negative eigenvalue magnitude
    tol_unitary: float = 1e-10   # max-entry |U^dag U - I| residual
    tol_spec: float = 1e-10      # spectrum comparison resolution
    tol_zero: float = 1e-14      # eigenvalues below this contribute no entropy
    tol_branch: float = 1e-12    # branches below this weight are omitted
    tol_projector: float = 1e-10 # partition projector / completeness residual
    tol_esp: float = 1e-10       # reduced-state equality resolution
    tol_erasure: float = 1e-9    # sorted-spectrum distance for erasure feasibility
    max_dim: int = 4096          # dense total-dimension cap
    max_denominator: int = 64    # bound on N for generated equal-split set-ups

    def override(self, **changes: float | int) -> "Tolerances":
        """Return a copy with the named fields replaced."""
        names = {f.name for f in dataclasses.fields(self)}
        unknown = set(changes) - names
        if unknown:
            raise ParameterError(f"unknown tolerance name(s): {sorted(unknown)}")
        return dataclasses.replace(self, **changes)


DEFAULT_TOLS = Tolerances()
