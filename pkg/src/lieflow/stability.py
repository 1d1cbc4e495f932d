"""Lyapunov exponents at the identity and stability of the identity."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import FlowOverflow, ZeroVector
from .lie_core import LieAlgebra, is_nilpotent
from .matrix_flow import ContractionEstimate, LinearFlow, contraction_constants
from .spectral import (DEFAULT_SEMISIMPLE_TOL, Derivation, SpectralDecomposition,
                       is_semisimple_on, spectral_decompose)

COMPONENT_TOL = 1e-10


def lyapunov_exact(sd: SpectralDecomposition, v, tol: float = COMPONENT_TOL) -> float:
    """Largest layer real part among the layers where ``v`` has a component
    above ``tol * |v|``."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ZeroVector("Lyapunov exponent is undefined for the zero vector")
    support = [layer.real_part for layer, comp in zip(sd.layers, sd.layer_components(v))
               if np.linalg.norm(comp) > tol * norm]
    return max(support)


@dataclass
class LyapunovResult:
    exact: float
    estimate_curve: list
    v: np.ndarray
    gap_constant: float
    truncated: bool = False

    @property
    def final_estimate(self) -> Optional[float]:
        return self.estimate_curve[-1][1] if self.estimate_curve else None

    def to_dict(self) -> dict:
        return {
            "exact": self.exact,
            "estimate_curve": [[T, est] for T, est in self.estimate_curve],
            "final_estimate": self.final_estimate,
            "gap_constant": self.gap_constant,
            "truncated": self.truncated,
            "vector": [float(x) for x in self.v],
        }


def lyapunov_estimate(lf, v, T_grid, sd: Optional[SpectralDecomposition] = None) -> LyapunovResult:
    """Sample ``(1/T) log |e^{TD} v|`` on ``T_grid``.

    The exact exponent comes from the spectral splitting; the curve is
    corroboration. ``gap_constant`` is the smallest ``C`` with
    ``|estimate(T) - exact| <= C (1 + log T) / T`` on the grid (``log T``
    clipped at zero for ``T < 1``).
    """
    lf = LinearFlow.of(lf)
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise ZeroVector("Lyapunov exponent is undefined for the zero vector")
    T_grid = [float(T) for T in T_grid]
    if any(T <= 0 for T in T_grid) or any(b <= a for a, b in zip(T_grid, T_grid[1:])):
        raise ValueError("T_grid must be positive and increasing")
    if sd is None:
        sd = spectral_decompose(Derivation(lf.matrix, LieAlgebra.abelian(lf.dim)))
    exact = lyapunov_exact(sd, v)
    curve = []
    truncated = False
    for T in T_grid:
        try:
            w = lf.at(T) @ v
        except FlowOverflow:
            w = None
        if w is None or not np.all(np.isfinite(w)) or not np.any(w):
            warnings.warn(f"flow leaves the floating-point range at T={T}; grid truncated",
                          RuntimeWarning, stacklevel=2)
            truncated = True
            break
        curve.append((T, float(np.log(np.linalg.norm(w)) / T)))
    gap = max((abs(est - exact) * T / max(1.0 + np.log(T), 1.0) for T, est in curve),
              default=0.0)
    return LyapunovResult(exact, curve, v, float(gap), truncated)


class Verdict(str, enum.Enum):
    ASYMPTOTIC = "asymptotically_and_exponentially_stable"
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNVERIFIED = "stable_condition_met_converse_unverified"


@dataclass
class StabilityCertificate:
    verdict: Verdict
    d_plus: int
    d_zero: int
    d_minus: int
    zero_semisimple: bool
    nilpotent: bool
    spectrum: list
    layer_real_parts: list
    contraction: Optional[ContractionEstimate] = None
    reason: str = field(default="")

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "reason": self.reason,
            "d_plus": self.d_plus,
            "d_zero": self.d_zero,
            "d_minus": self.d_minus,
            "zero_semisimple": self.zero_semisimple,
            "nilpotent": self.nilpotent,
            "spectrum": self.spectrum,
            "layer_real_parts": self.layer_real_parts,
            "contraction": self.contraction.to_dict() if self.contraction else None,
        }


def verdict_from_evidence(d_plus: int, d_zero: int, zero_semisimple: bool, nilpotent: bool) -> Verdict:
    if d_plus == 0 and d_zero == 0:
        return Verdict.ASYMPTOTIC
    if d_plus == 0 and zero_semisimple:
        return Verdict.STABLE
    if d_plus > 0:
        return Verdict.UNSTABLE
    return Verdict.UNSTABLE if nilpotent else Verdict.UNVERIFIED


_REASONS = {
    Verdict.ASYMPTOTIC: "all eigenvalues have negative real part",
    Verdict.STABLE: "no unstable directions and the derivation is semisimple on the center",
    Verdict.UNVERIFIED: ("no unstable directions but the center part is not semisimple; "
                         "the algebra is not nilpotent, so instability is not established"),
}


def classify_identity_stability(alg: LieAlgebra, D: Derivation,
                                sd: Optional[SpectralDecomposition] = None,
                                semisimple_tol: float = DEFAULT_SEMISIMPLE_TOL) -> StabilityCertificate:
    if sd is None:
        sd = spectral_decompose(D)
    d_plus, d_zero, d_minus = sd.dims
    semisimple = is_semisimple_on(D, sd.zero_basis, semisimple_tol)
    nilpotent = is_nilpotent(alg)
    verdict = verdict_from_evidence(d_plus, d_zero, semisimple, nilpotent)
    if verdict is Verdict.UNSTABLE:
        reason = ("the unstable subgroup is nontrivial" if d_plus > 0
                  else "nilpotent algebra with non-semisimple center part")
    else:
        reason = _REASONS[verdict]
    contraction = contraction_constants(LinearFlow.of(D)) if verdict is Verdict.ASYMPTOTIC else None
    return StabilityCertificate(
        verdict, d_plus, d_zero, d_minus, semisimple, nilpotent,
        [[z.real, z.imag] for z in sd.eigenvalues], sd.layer_real_parts, contraction, reason)
