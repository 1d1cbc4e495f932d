"""Derivations and their real-part spectral splitting.

Invariant subspaces come from a real Schur form reordered so that a chosen
eigenvalue cluster leads. The spectral projector onto that cluster along
the complementary invariant subspace is read off the block-triangular form
after one Sylvester solve, so no eigenvector matrix is ever inverted.
Complex-conjugate pairs stay inside real 2x2 blocks throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import linalg

from .errors import (ClusterAmbiguity, InputError, InvariantSubspaceViolation,
                     LeibnizViolation)
from .lie_core import LieAlgebra, bracket

DEFAULT_LEIBNIZ_TOL = 1e-9
DEFAULT_TOL_REALPART = 1e-8
DEFAULT_GRADING_TOL = 1e-8
DEFAULT_SEMISIMPLE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Derivation:
    matrix: np.ndarray
    parent: LieAlgebra
    leibniz_residual: float = 0.0

    @property
    def dim(self) -> int:
        return self.parent.dim


def leibniz_residuals(D, alg: LieAlgebra) -> np.ndarray:
    """``r[i, j] = |D[e_i,e_j] - [De_i,e_j] - [e_i,De_j]|`` in the max-norm."""
    D = np.asarray(D, dtype=float)
    c = alg.structure_constants
    lhs = np.einsum("ijk,mk->ijm", c, D)
    # [De_i, e_j] = sum_a D[a, i] c[a, j, :]
    t1 = np.einsum("ai,ajm->ijm", D, c)
    t2 = np.einsum("aj,iam->ijm", D, c)
    return np.abs(lhs - t1 - t2).max(axis=-1)


def validate_leibniz(D, alg: LieAlgebra, tol: float = DEFAULT_LEIBNIZ_TOL) -> Derivation:
    D = np.array(D, dtype=float)
    if D.shape != (alg.dim, alg.dim):
        raise InputError("derivation must be a square matrix of the algebra dimension",
                         expected=[alg.dim, alg.dim], got=list(D.shape))
    if not np.all(np.isfinite(D)):
        raise InputError("derivation entries must be finite")
    res = leibniz_residuals(D, alg)
    worst = float(res.max())
    if worst > tol:
        i, j = np.unravel_index(np.argmax(res), res.shape)
        raise LeibnizViolation(
            f"Leibniz rule fails on pair ({alg.basis_labels[i]}, {alg.basis_labels[j]})",
            pair=[int(i), int(j)], residual=worst, tol=tol)
    D.setflags(write=False)
    return Derivation(D, alg, worst)


# ---------------------------------------------------------------------------
# invariant subspaces
# ---------------------------------------------------------------------------

def _schur_split(M: np.ndarray, select: Callable[[complex], bool]):
    """Reorder the real Schur form of ``M`` so eigenvalues with
    ``select(λ)`` come first.

    Returns ``(basis, projector)``: an orthonormal basis of the selected
    invariant subspace and the spectral projector onto it.
    """
    n = M.shape[0]
    T, Z, k = linalg.schur(M, output="real",
                           sort=lambda re, im: bool(select(complex(re, im))))
    if k == 0:
        return np.zeros((n, 0)), np.zeros((n, n))
    if k == n:
        return Z.copy(), np.eye(n)
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    # T11 X - X T22 = -T12 block-diagonalizes T
    X = linalg.solve_sylvester(T11, -T22, -T12)
    Z1 = Z[:, :k]
    P = Z1 @ (Z1.T - X @ Z[:, k:].T)
    return Z1.copy(), P


@dataclass(frozen=True)
class Layer:
    real_part: float
    basis: np.ndarray
    projector: np.ndarray
    eigenvalues: tuple

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: tuple
    layers: tuple
    plus_basis: np.ndarray
    zero_basis: np.ndarray
    minus_basis: np.ndarray
    P_plus: np.ndarray
    P_zero: np.ndarray
    P_minus: np.ndarray
    tol_realpart: float
    derivation: Optional[Derivation] = field(default=None, repr=False)

    @property
    def dims(self) -> tuple:
        """``(d_plus, d_zero, d_minus)``."""
        return (self.plus_basis.shape[1], self.zero_basis.shape[1], self.minus_basis.shape[1])

    @property
    def layer_real_parts(self) -> list:
        return [layer.real_part for layer in self.layers]

    def split_vector(self, v) -> tuple:
        """``(v_plus, v_zero, v_minus)``; the center part is the remainder."""
        v = np.asarray(v, dtype=float)
        plus = self.P_plus @ v
        minus = self.P_minus @ v
        return plus, v - plus - minus, minus

    def layer_components(self, v) -> list:
        v = np.asarray(v, dtype=float)
        return [layer.projector @ v for layer in self.layers]

    def summary(self) -> dict:
        d_plus, d_zero, d_minus = self.dims
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "layers": [{"real_part": L.real_part, "dim": L.dim} for L in self.layers],
            "d_plus": d_plus,
            "d_zero": d_zero,
            "d_minus": d_minus,
            "hyperbolic": d_zero == 0,
        }


def _cluster_real_parts(real_parts, tol: float) -> list:
    """Single-linkage clusters of sorted real parts, links of length <= tol.

    Neighbouring clusters closer than ``2 tol`` cannot be separated with
    confidence and raise :class:`ClusterAmbiguity`.
    """
    xs = sorted(real_parts)
    clusters = [[xs[0]]]
    for x in xs[1:]:
        if x - clusters[-1][-1] <= tol:
            clusters[-1].append(x)
        else:
            clusters.append([x])
    for a, b in zip(clusters, clusters[1:]):
        if b[0] - a[-1] <= 2 * tol:
            raise ClusterAmbiguity("eigenvalue real parts too close to classify",
                                   left=a[-1], right=b[0], tol_realpart=tol)
    return clusters


def spectral_decompose(D: Derivation, tol_realpart: float = DEFAULT_TOL_REALPART) -> SpectralDecomposition:
    M = np.asarray(D.matrix, dtype=float)
    n = M.shape[0]
    eig = np.linalg.eigvals(M)
    eig = tuple(sorted((complex(z) for z in eig), key=lambda z: (-z.real, -z.imag)))
    re = [z.real for z in eig]

    ambiguous = [x for x in re if tol_realpart < abs(x) <= 2 * tol_realpart]
    if ambiguous:
        raise ClusterAmbiguity("eigenvalue real part inside the ambiguity band around zero",
                               real_part=ambiguous[0], tol_realpart=tol_realpart)

    clusters = _cluster_real_parts(re, tol_realpart)
    # descending order of real part; the zero-band cluster gets real part 0
    layers = []
    for cl in reversed(clusters):
        lo, hi = cl[0], cl[-1]
        members = tuple(z for z in eig if lo <= z.real <= hi)
        basis, proj = _schur_split(M, lambda z, lo=lo, hi=hi: lo - tol_realpart / 2 <= z.real <= hi + tol_realpart / 2)
        if basis.shape[1] != len(members):
            raise ClusterAmbiguity("Schur reordering disagrees with eigenvalue count",
                                   cluster=[lo, hi], expected=len(members), got=basis.shape[1])
        lam = float(np.mean(cl))
        if abs(lam) <= tol_realpart:
            lam = 0.0
        layers.append(Layer(lam, basis, proj, members))

    plus_basis, P_plus = _schur_split(M, lambda z: z.real > tol_realpart)
    minus_basis, P_minus = _schur_split(M, lambda z: z.real < -tol_realpart)
    zero_basis, _ = _schur_split(M, lambda z: abs(z.real) <= tol_realpart)
    P_zero = np.eye(n) - P_plus - P_minus
    return SpectralDecomposition(eig, tuple(layers), plus_basis, zero_basis, minus_basis,
                                 P_plus, P_zero, P_minus, tol_realpart, D)


def is_hyperbolic(sd: SpectralDecomposition) -> bool:
    return sd.dims[1] == 0


@dataclass
class GradingReport:
    pairs: list
    passed: bool
    tol: float

    @property
    def max_residual(self) -> float:
        return max((p["residual"] for p in self.pairs), default=0.0)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "tol": self.tol, "max_residual": self.max_residual,
                "pairs": self.pairs}


def grading_check(sd: SpectralDecomposition, alg: LieAlgebra,
                  tol: float = DEFAULT_GRADING_TOL) -> GradingReport:
    """Check that brackets of layer ``a`` with layer ``b`` land in the layer
    whose real part is ``a + b`` (or vanish when there is no such layer)."""
    n = alg.dim
    pairs = []
    for ia, la in enumerate(sd.layers):
        for ib, lb in enumerate(sd.layers):
            if ib < ia:
                continue
            target = la.real_part + lb.real_part
            hits = [L for L in sd.layers if abs(L.real_part - target) <= 2 * sd.tol_realpart]
            complement = np.eye(n) - hits[0].projector if hits else np.eye(n)
            # all brackets of basis vectors: shape (da, db, n)
            br = bracket(la.basis.T[:, None, :], lb.basis.T[None, :, :], alg)
            r = float(np.abs(br @ complement.T).max()) if br.size else 0.0
            pairs.append({"alpha": la.real_part, "beta": lb.real_part,
                          "target_is_layer": bool(hits), "residual": r})
    passed = all(p["residual"] <= tol for p in pairs)
    return GradingReport(pairs, passed, tol)


def restrict(M, basis: np.ndarray, tol: float = DEFAULT_SEMISIMPLE_TOL) -> np.ndarray:
    """Matrix of ``M`` restricted to ``span(basis)`` in that basis."""
    M = np.asarray(M, dtype=float)
    pinv = np.linalg.pinv(basis)
    MB = M @ basis
    leak = MB - basis @ (pinv @ MB)
    norms = np.linalg.norm(leak, axis=0) if leak.size else np.zeros(0)
    scale = max(1.0, float(np.linalg.norm(M, 2)))
    if norms.size and norms.max() > tol * scale:
        raise InvariantSubspaceViolation("subspace is not invariant under the map",
                                         residual=float(norms.max()), tol=tol)
    return pinv @ MB


def is_semisimple_on(D, subspace_basis: np.ndarray, tol: float = DEFAULT_SEMISIMPLE_TOL) -> bool:
    """Whether ``D`` restricted to the subspace is diagonalizable over C.

    For every eigenvalue cluster the rank of ``D_r - αI`` must drop by the
    algebraic multiplicity. Clustering uses ``sqrt(tol)`` since a defective
    eigenvalue is only determined to about the square root of the working
    precision.
    """
    M = D.matrix if isinstance(D, Derivation) else np.asarray(D, dtype=float)
    B = np.asarray(subspace_basis, dtype=float)
    if B.ndim != 2 or B.shape[0] != M.shape[0]:
        raise InputError("subspace basis has wrong shape", shape=list(B.shape))
    d = B.shape[1]
    if d == 0:
        return True
    R = restrict(M, B, tol)
    eig = np.linalg.eigvals(R)
    scale = max(1.0, float(np.linalg.norm(R, 2)))
    cluster_tol = np.sqrt(tol) * scale
    clusters: list = []
    for z in eig:
        for cl in clusters:
            if abs(z - np.mean(cl)) <= cluster_tol:
                cl.append(z)
                break
        else:
            clusters.append([z])
    for cl in clusters:
        alpha = np.mean(cl)
        s = np.linalg.svd(R - alpha * np.eye(d), compute_uv=False)
        rank = int(np.sum(s > cluster_tol))
        if rank != d - len(cl):
            return False
    return True
