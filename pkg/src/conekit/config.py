"""Numerical tolerances and resource limits.

All thresholds live here so borderline scenarios can be re-run with
tighter or looser settings without touching library code.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    herm_tol: float = 1e-10      # max |M - M^dagger| entry for Hermitian inputs
    psd_tol: float = 1e-9        # eigenvalues below -psd_tol fail positivity
    trace_tol: float = 1e-9      # |Tr[rho] - 1| allowed for states
    ortho_tol: float = 1e-12     # Gram-matrix deviation for orthonormal bases
    rank_tol: float = 1e-9       # relative singular-value cutoff for numerical rank
    povm_tol: float = 1e-9       # ||sum E_k - I|| allowed for POVM groups
    polar_tol: float = 1e-9      # slack allowed on polar-cone inequalities (float mode)
    verdict_tol: float = 1e-8    # |<J, Gamma>| below this is boundary-near
    margin_tol: float = 1e-6     # classical verdicts with margin below this get flagged
    recon_tol: float = 1e-8      # ||sum F x sigma - J|| allowed for extracted models

    def with_overrides(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT = Tolerances()

#: Hard cap on dim(R)^2; the witness enumeration runs in a space of this
#: dimension and becomes intractable quickly beyond it.
DEFAULT_MAX_TENSOR_DIM = 36


def max_tensor_dim() -> int:
    raw = os.environ.get("CONEKIT_MAX_TENSOR_DIM")
    if raw is None:
        return DEFAULT_MAX_TENSOR_DIM
    return int(raw)
