"""Condition-number computations for the phaseless and phased inversions.

kappa(T o E) is reported with the explicit conjugate-symmetry block basis E
(an upper bound for the infimum over all kernel parametrizations).  For the
phased problem the operator is only R-linear once the constraint basis is
composed in, so its condition number is computed from the realified matrix
stacking real and imaginary parts of the complex rows.

The phaseless T o E is structurally rank-deficient whenever the band
contains odd modes (their columns vanish identically for transmission-type
data; see the note in :mod:`scatshape.phaseless`), and the report flags
this instead of inventing a finite number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .forward import kernel_p
from .measurement import MeasurementPlan
from .phased import phased_operator_Ttilde
from .phaseless import conjugate_symmetry_basis, t_matrix

__all__ = [
    "ConditionReport",
    "KSumResult",
    "cond_T_E",
    "cond_L",
    "k_sum",
    "cond_phased",
]

RANK_DEFICIENCY_RTOL = 1e-12


@dataclass(frozen=True)
class ConditionReport:
    """Largest/smallest singular values and their ratio for one operator."""

    s_max: float
    s_min: float
    kappa: float
    plan_kind: str
    N: int
    m0: int | None = None
    rank_deficient: bool = False


def _report(A: np.ndarray, plan: MeasurementPlan, N: int) -> ConditionReport:
    if A.shape[0] < A.shape[1]:
        raise ValueError(f"underdetermined operator: {A.shape[0]} rows < {A.shape[1]} columns")
    s = np.linalg.svd(A, compute_uv=False)
    deficient = bool(s[-1] < RANK_DEFICIENCY_RTOL * s[0])
    kappa = float("inf") if s[-1] == 0.0 else float(s[0] / s[-1])
    return ConditionReport(s_max=float(s[0]), s_min=float(s[-1]), kappa=kappa,
                           plan_kind=plan.kind, N=N,
                           m0=plan.params.get("m0"), rank_deficient=deficient)


def cond_T_E(plan: MeasurementPlan, R: float, N: int) -> ConditionReport:
    """Condition number of the phaseless T o E (band N, explicit block E)."""
    A = t_matrix(plan, R, N) @ conjugate_symmetry_basis(N)
    return _report(A, plan, N)


def cond_phased(plan: MeasurementPlan, R: float, N: int,
                variant: str = "complex") -> ConditionReport:
    """Condition number of the phased operator restricted to the constraint.

    variant="complex": realified T~ o E (rows carry both real and imaginary
    parts of the complex measurements).  variant="real_part": the real-part
    operator, whose matrix coincides with the phaseless T on the same plan.
    """
    E = conjugate_symmetry_basis(N)
    if variant == "complex":
        Tc = phased_operator_Ttilde(plan, R, N, variant="complex")
        ls = [l for l in range(-N, N + 1) if l != 0]
        M = Tc.shape[0]
        A = np.zeros((2 * M, 2 * N))
        for col in range(2 * N):
            zc = Tc @ E[:, col].reshape(len(ls), 2) @ np.array([1.0, 1.0j])
            A[:M, col] = zc.real
            A[M:, col] = zc.imag
        return _report(A, plan, N)
    if variant == "real_part":
        A = phased_operator_Ttilde(plan, R, N, variant="real_part") @ E
        return _report(A, plan, N)
    raise ValueError(f"unknown variant {variant!r}")


def cond_L(plan: MeasurementPlan, R: float, alpha: float = 1e-3) -> tuple[float, float]:
    """(kappa of the plain diagonal inverse, kappa of the regularized one).

    Both derive from the P_R values over the plan.  An exactly-zero P_R maps
    the plain number to +inf; the regularized number is bounded by 2/alpha.
    """
    p = np.abs(kernel_p(R, plan.theta_inc, plan.theta_obs, plan.k))
    if len(p) == 0:
        raise ValueError("empty plan")
    kappa_plain = float("inf") if np.any(p == 0.0) else float(p.max() / p.min())
    w = np.where(p > alpha, 1.0 / np.where(p == 0.0, 1.0, p), 1.0 / alpha)
    kappa_reg = float(w.max() / w.min())
    return kappa_plain, kappa_reg


@dataclass(frozen=True)
class KSumResult:
    """The parity-split harmonic sum and its logarithmic bracket."""

    value: float
    lower: float
    upper: float
    bounds_ok: bool


def k_sum(parity: int, m0: int, Mtilde: int) -> KSumResult:
    """K_{C, m0, M~} = sum_{J=1}^{M~} 1 / (4 m0 + 1 + 4 J + 2 C) with bound check.

    The bracket checked is (1/4) log(1 + M~/(m0+2)) <= K <= (1/4) log(1 + M~/(m0+1)).
    The lower bound always holds; the upper one holds for parity 1 but fails
    for parity 0 (term-by-term, 1/(4x+1) > (1/4) log(1 + 1/x)), which the
    result reports honestly via ``bounds_ok``.
    """
    if parity not in (0, 1):
        raise ValueError("parity must be 0 or 1")
    if m0 < 1 or Mtilde < 1:
        raise ValueError("m0 and Mtilde must be >= 1")
    value = sum(1.0 / (4 * m0 + 1 + 4 * J + 2 * parity) for J in range(1, Mtilde + 1))
    lower = 0.25 * math.log(1.0 + Mtilde / (m0 + 2.0))
    upper = 0.25 * math.log(1.0 + Mtilde / (m0 + 1.0))
    return KSumResult(value=value, lower=lower, upper=upper,
                      bounds_ok=bool(lower <= value <= upper))
