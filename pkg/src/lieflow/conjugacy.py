"""Topological conjugacies between hyperbolic linear flows.

On a contracting layer the conjugacy between ``e^{tA}`` and ``e^{tB}`` is
built from adapted quadratic forms ``Q_A`` and ``Q_B``: every nonzero
orbit of ``A`` crosses the unit level set of ``Q_A`` exactly once, at time
``tau(x)``, and ``zeta(x) = e^{-tau B} h0(e^{tau A} x)`` where ``h0``
radially rescales that crossing point onto the unit level set of ``Q_B``.
Expanding layers reuse the construction for ``(-A, -B)``.

The group conjugacy factors ``g = g_plus g_minus`` and maps each factor
through the layer conjugacy in exponential coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from .errors import DimensionMismatch, NotHyperbolic, NotNilpotent, ZeroVector
from .lie_core import LieAlgebra, is_nilpotent
from .matrix_flow import AdaptedForm, LinearFlow, adapted_form
from .nilpotent_group import (GroupElement, flow_group, gauge, inverse, multiply,
                              split_plus_minus)
from .spectral import Derivation, SpectralDecomposition, is_hyperbolic, spectral_decompose

UNDERFLOW_GUARD = 1e-300
CROSSING_TOL = 1e-12
_HUGE = 1e300


@dataclass(frozen=True, eq=False)
class EuclideanConjugacy:
    """Conjugacy ``zeta`` with ``zeta(e^{tA} x) = e^{tB} zeta(x)`` for
    contracting ``A`` and ``B`` of the same size."""

    A: np.ndarray
    B: np.ndarray
    form_A: AdaptedForm = field(repr=False)
    form_B: AdaptedForm = field(repr=False)
    flow_A: LinearFlow = field(repr=False)
    flow_B: LinearFlow = field(repr=False)

    @classmethod
    def build(cls, A, B) -> "EuclideanConjugacy":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        if A.shape != B.shape:
            raise DimensionMismatch("layers have different dimensions",
                                    source=list(A.shape), target=list(B.shape))
        if A.size == 0:
            A = B = np.zeros((0, 0))
        return cls(A, B, adapted_form(A), adapted_form(B), LinearFlow(A), LinearFlow(B))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def inverse(self) -> "EuclideanConjugacy":
        return EuclideanConjugacy(self.B, self.A, self.form_B, self.form_A,
                                  self.flow_B, self.flow_A)

    @property
    def is_identity(self) -> bool:
        # same matrix gives the same form, and the construction collapses to x
        return bool(np.array_equal(self.A, self.B))

    def __call__(self, x) -> np.ndarray:
        return evaluate_zeta(self, x)


def _level(form: AdaptedForm, flow: LinearFlow, x: np.ndarray, t: float) -> tuple:
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            y = flow.at(t) @ x
        except OverflowError:
            return None, _HUGE
        q = form.Q(y)
    if not np.isfinite(q):
        return None, _HUGE
    return y, float(q)


def crossing_time(ec: EuclideanConjugacy, x, tol: float = CROSSING_TOL) -> float:
    """Unique ``tau`` with ``Q_A(e^{tau A} x) = 1``.

    ``t -> Q_A(e^{tA}x)`` is strictly decreasing (its derivative is
    ``-|e^{tA}x|^2``), so a doubling bracket plus Brent's method finds it;
    Newton steps on ``Q`` then polish the root.
    """
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ZeroVector("crossing time is undefined at the origin")
    form, flow = ec.form_A, ec.flow_A

    def f(t):
        _, q = _level(form, flow, x, t)
        return np.log(max(q, 1e-300))

    f0 = f(0.0)
    if f0 == 0.0:
        return 0.0
    direction = 1.0 if f0 > 0 else -1.0
    a, b = 0.0, direction
    while np.sign(f(b)) == np.sign(f0):
        a, b = b, 2 * b
        if abs(b) > 1e6:
            raise OverflowError("crossing time bracket diverged")
    lo, hi = min(a, b), max(a, b)
    tau = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    for _ in range(3):
        y, q = _level(form, flow, x, tau)
        if abs(q - 1.0) <= tol * 0.01:
            break
        tau += (q - 1.0) / float(y @ y)
    return float(tau)


def evaluate_zeta(ec: EuclideanConjugacy, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if ec.dim == 0:
        return np.zeros(0)
    if np.linalg.norm(x) <= UNDERFLOW_GUARD:
        return np.zeros_like(x)
    if ec.is_identity:
        return x.copy()
    tau = crossing_time(ec, x)
    u = ec.flow_A.at(tau) @ x
    u = u / np.sqrt(ec.form_B.Q(u))
    return ec.flow_B.at(-tau) @ u


def evaluate_zeta_inverse(ec: EuclideanConjugacy, y) -> np.ndarray:
    return evaluate_zeta(ec.inverse(), y)


# ---------------------------------------------------------------------------
# group level
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlowSystem:
    """A Lie algebra with a derivation and its spectral splitting."""

    algebra: LieAlgebra
    derivation: Derivation
    sd: SpectralDecomposition
    flow: LinearFlow

    @classmethod
    def of(cls, alg: LieAlgebra, D: Derivation, sd: Optional[SpectralDecomposition] = None) -> "FlowSystem":
        return cls(alg, D, sd if sd is not None else spectral_decompose(D), LinearFlow.of(D))

    @property
    def signature(self) -> dict:
        d_plus, d_zero, d_minus = self.sd.dims
        return {"d_plus": d_plus, "d_zero": d_zero, "d_minus": d_minus}


@dataclass(frozen=True, eq=False)
class GroupConjugacy:
    source: FlowSystem
    target: FlowSystem
    xi_plus: EuclideanConjugacy
    xi_minus: EuclideanConjugacy

    @property
    def is_identity(self) -> bool:
        """Same system on both sides: split then recompose is the identity."""
        return (self.source.algebra is self.target.algebra
                and getattr(self.xi_plus, "is_identity", False)
                and getattr(self.xi_minus, "is_identity", False)
                and np.array_equal(self.source.sd.plus_basis, self.target.sd.plus_basis)
                and np.array_equal(self.source.sd.minus_basis, self.target.sd.minus_basis))

    def __call__(self, g: GroupElement) -> GroupElement:
        return evaluate_pi(self, g)


def _restricted(system: FlowSystem, basis: np.ndarray) -> np.ndarray:
    return basis.T @ system.derivation.matrix @ basis


def build_group_conjugacy(src: FlowSystem, dst: FlowSystem) -> GroupConjugacy:
    for name, system in (("source", src), ("target", dst)):
        if not is_hyperbolic(system.sd):
            raise NotHyperbolic(f"{name} derivation is not hyperbolic", side=name,
                                **system.signature)
    if (src.sd.dims[0], src.sd.dims[2]) != (dst.sd.dims[0], dst.sd.dims[2]):
        raise DimensionMismatch("stable/unstable dimensions differ; no conjugacy exists",
                                source=src.signature, target=dst.signature)
    for name, system in (("source", src), ("target", dst)):
        if not is_nilpotent(system.algebra):
            raise NotNilpotent(f"{name} algebra is not nilpotent", side=name)
    xi_minus = EuclideanConjugacy.build(_restricted(src, src.sd.minus_basis),
                                        _restricted(dst, dst.sd.minus_basis))
    # the expanding layers contract in reversed time
    xi_plus = EuclideanConjugacy.build(-_restricted(src, src.sd.plus_basis),
                                       -_restricted(dst, dst.sd.plus_basis))
    return GroupConjugacy(src, dst, xi_plus, xi_minus)


def _map(g: GroupElement, a: FlowSystem, b: FlowSystem, xi_plus, xi_minus) -> GroupElement:
    g_plus, g_minus = split_plus_minus(g, a.sd)
    y_plus = b.sd.plus_basis @ xi_plus(a.sd.plus_basis.T @ g_plus.coords)
    y_minus = b.sd.minus_basis @ xi_minus(a.sd.minus_basis.T @ g_minus.coords)
    return multiply(GroupElement(y_plus, b.algebra), GroupElement(y_minus, b.algebra))


def evaluate_pi(gc: GroupConjugacy, g: GroupElement) -> GroupElement:
    if not np.any(g.coords):
        return GroupElement.identity(gc.target.algebra)
    if gc.is_identity:
        return g
    return _map(g, gc.source, gc.target, gc.xi_plus, gc.xi_minus)


def evaluate_pi_inverse(gc: GroupConjugacy, h: GroupElement) -> GroupElement:
    if not np.any(h.coords):
        return GroupElement.identity(gc.source.algebra)
    if gc.is_identity:
        return h
    return _map(h, gc.target, gc.source, gc.xi_plus.inverse(), gc.xi_minus.inverse())


@dataclass
class VerificationReport:
    passed: bool
    samples: int
    seed: int
    t_range: tuple
    tol: float
    max_residual: float
    median_residual: float
    worst: dict
    roundtrip_max: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "samples": self.samples,
            "seed": self.seed,
            "t_range": list(self.t_range),
            "tol": self.tol,
            "max_residual": self.max_residual,
            "median_residual": self.median_residual,
            "roundtrip_max": self.roundtrip_max,
            "worst": self.worst,
        }


def conjugacy_residual(gc: GroupConjugacy, g: GroupElement, t: float) -> float:
    """``gauge(pi(phi_t g)^{-1} psi_t(pi g))``."""
    lhs = evaluate_pi(gc, flow_group(gc.source.flow, t, g))
    rhs = flow_group(gc.target.flow, t, evaluate_pi(gc, g))
    return gauge(multiply(inverse(lhs), rhs))


def verify_conjugacy(gc: GroupConjugacy, samples: int = 100, t_range=(-5.0, 5.0),
                     tol: float = 1e-6, seed: int = 0, scale: float = 1.0) -> VerificationReport:
    """Sample ``(g, t)`` and measure how far ``pi`` is from conjugating.

    ``g`` has exponential coordinates uniform in ``[-scale, scale]`` and
    ``t`` is uniform in ``t_range``.
    """
    rng = np.random.default_rng(seed)
    alg = gc.source.algebra
    coords = rng.uniform(-scale, scale, size=(samples, alg.dim))
    times = rng.uniform(t_range[0], t_range[1], size=samples)
    residuals = np.empty(samples)
    roundtrip = 0.0
    for k in range(samples):
        g = GroupElement(coords[k], alg)
        residuals[k] = conjugacy_residual(gc, g, float(times[k]))
        back = evaluate_pi_inverse(gc, evaluate_pi(gc, g))
        roundtrip = max(roundtrip, float(np.abs(back.coords - g.coords).max()))
    if samples:
        k = int(np.argmax(residuals))
        worst = {"coords": coords[k].tolist(), "t": float(times[k]), "residual": float(residuals[k])}
        mx, med = float(residuals.max()), float(np.median(residuals))
    else:
        worst, mx, med = {}, 0.0, 0.0
    return VerificationReport(mx <= tol, samples, seed, (float(t_range[0]), float(t_range[1])),
                              tol, mx, med, worst, roundtrip)
