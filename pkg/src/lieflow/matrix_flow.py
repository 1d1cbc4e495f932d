"""Linear flows ``t -> e^{tD}``, adapted quadratic forms and contraction
constants."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import FlowOverflow, InputError, NotContracting
from .spectral import DEFAULT_TOL_REALPART, Derivation

DEFAULT_SLACK = 1e-3
CONTRACTION_HORIZON = 50.0


def expm(M) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Padé approximants)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError("expm needs a square matrix", shape=list(M.shape))
    if not np.all(np.isfinite(M)):
        raise InputError("matrix has non-finite entries")
    with np.errstate(over="ignore", invalid="ignore"):
        E = linalg.expm(M)
    if not np.all(np.isfinite(E)):
        raise FlowOverflow("matrix exponential overflows", norm=float(np.linalg.norm(M, 1)))
    return E


def spectral_abscissa(A) -> float:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return -np.inf
    return float(np.max(np.linalg.eigvals(A).real))


@dataclass(frozen=True, eq=False)
class LinearFlow:
    """The one-parameter group ``e^{tD}``.

    The real Schur form of ``D`` is computed once; ``e^{tD}`` is then
    ``Z e^{tT} Z^T``, which keeps repeated evaluations well conditioned.
    """

    matrix: np.ndarray
    _schur: tuple = field(init=False, repr=False)

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        T, Z = linalg.schur(M, output="real")
        object.__setattr__(self, "_schur", (T, Z))

    @classmethod
    def of(cls, D) -> "LinearFlow":
        if isinstance(D, LinearFlow):
            return D
        if isinstance(D, Derivation):
            return cls(D.matrix)
        return cls(np.asarray(D, dtype=float))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def at(self, t: float) -> np.ndarray:
        T, Z = self._schur
        return Z @ expm(t * T) @ Z.T

    def __call__(self, t: float, v) -> np.ndarray:
        return flow_linear(self, t, v)


def flow_linear(lf: LinearFlow, t: float, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != lf.dim:
        raise InputError("vector length does not match flow dimension", expected=lf.dim,
                         got=int(v.shape[-1]))
    out = v @ lf.at(t).T
    if not np.all(np.isfinite(out)):
        raise FlowOverflow("flow value overflows", t=float(t))
    return out


@dataclass(frozen=True, eq=False)
class AdaptedForm:
    """``Q(x) = x^T P x`` with ``A^T P + P A = -I``.

    ``Q`` equals ``∫_0^∞ |e^{sA}x|^2 ds`` and decreases along the flow with
    ``d/dt Q(e^{tA}x) = -|e^{tA}x|^2``.
    """

    A: np.ndarray
    P: np.ndarray

    @property
    def dim(self) -> int:
        return self.P.shape[0]

    def Q(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.P, x)

    def residual(self) -> float:
        R = self.A.T @ self.P + self.P @ self.A + np.eye(self.dim)
        return float(np.abs(R).max()) if R.size else 0.0

    def eigen_bounds(self) -> tuple:
        w = np.linalg.eigvalsh(self.P)
        return float(w[0]), float(w[-1])


def adapted_form(A, tol_realpart: float = DEFAULT_TOL_REALPART) -> AdaptedForm:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise InputError("adapted form needs a square matrix", shape=list(A.shape))
    if A.size == 0:
        return AdaptedForm(A, np.zeros((0, 0)))
    abscissa = spectral_abscissa(A)
    if abscissa >= -tol_realpart:
        raise NotContracting("matrix is not contracting", spectral_abscissa=abscissa)
    # Bartels-Stewart: A^T P + P A = -I
    P = linalg.solve_continuous_lyapunov(A.T, -np.eye(A.shape[0]))
    P = 0.5 * (P + P.T)
    return AdaptedForm(A, P)


@dataclass(frozen=True)
class ContractionEstimate:
    """``|e^{tA}v| <= c^{-1} e^{-mu t} |v|`` for ``t`` in ``[0, horizon]``."""

    c: float
    mu: float
    spectral_abscissa: float
    horizon: float = CONTRACTION_HORIZON

    def bound(self, t) -> np.ndarray:
        return np.exp(-self.mu * np.asarray(t, dtype=float)) / self.c

    def to_dict(self) -> dict:
        return {"c": self.c, "mu": self.mu, "spectral_abscissa": self.spectral_abscissa,
                "horizon": self.horizon}


def _contraction(A: np.ndarray, slack: float, tol_realpart: float,
                 horizon: float, samples: int) -> ContractionEstimate:
    form = adapted_form(A, tol_realpart)
    abscissa = spectral_abscissa(A)
    mu = -abscissa - slack
    if mu <= 0:
        raise NotContracting("slack exceeds the contraction rate", spectral_abscissa=abscissa,
                             slack=slack)
    lo, hi = form.eigen_bounds()
    c = float(np.sqrt(lo / hi))
    lf = LinearFlow(A)
    ts = np.linspace(0.0, horizon, samples)
    worst = max(np.exp(mu * t) * np.linalg.norm(lf.at(t), 2) for t in ts)
    if c * worst > 1.0:
        # keep a margin for the gaps between grid points
        c = 1.0 / (worst * (1.0 + 1e-6))
    return ContractionEstimate(c, mu, abscissa, horizon)


def contraction_constants(lf, minus_basis=None, slack: float = DEFAULT_SLACK,
                          tol_realpart: float = DEFAULT_TOL_REALPART,
                          horizon: float = CONTRACTION_HORIZON,
                          samples: int = 2001) -> ContractionEstimate:
    """Constants ``(c, mu)`` for the flow restricted to ``span(minus_basis)``.

    ``mu`` is the contraction rate minus ``slack``. ``c`` starts from the
    eigenvalue ratio of the adapted form and is lowered until the
    operator-norm inequality holds on a grid over ``[0, horizon]``.
    """
    lf = LinearFlow.of(lf)
    B = np.eye(lf.dim) if minus_basis is None else np.asarray(minus_basis, dtype=float)
    if B.shape[1] == 0:
        raise NotContracting("empty subspace")
    A = np.linalg.pinv(B) @ lf.matrix @ B
    return _contraction(A, slack, tol_realpart, horizon, samples)


def expansion_constants(lf, plus_basis=None, slack: float = DEFAULT_SLACK,
                        tol_realpart: float = DEFAULT_TOL_REALPART,
                        horizon: float = CONTRACTION_HORIZON,
                        samples: int = 2001) -> ContractionEstimate:
    """Constants with ``|e^{tA}v| >= c e^{mu t} |v|`` on ``span(plus_basis)``."""
    lf = LinearFlow.of(lf)
    B = np.eye(lf.dim) if plus_basis is None else np.asarray(plus_basis, dtype=float)
    if B.shape[1] == 0:
        raise NotContracting("empty subspace")
    A = np.linalg.pinv(B) @ lf.matrix @ B
    return _contraction(-A, slack, tol_realpart, horizon, samples)
