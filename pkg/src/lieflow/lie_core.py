"""Finite-dimensional real Lie algebras given by structure constants.

The bracket is ``[e_i, e_j] = sum_k c[i, j, k] e_k`` in a declared ordered
basis. Constants are antisymmetrized when an algebra is built; whatever
asymmetry the raw input carried is kept as ``antisymmetry_defect`` so that
:func:`validate_jacobi` can report it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InputError

DEFAULT_JACOBI_TOL = 1e-9
DEFAULT_RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A real Lie algebra of dimension ``dim``.

    Build instances with :meth:`from_constants` or :meth:`from_brackets`;
    the raw constructor assumes ``structure_constants`` is already
    antisymmetric.
    """

    dim: int
    basis_labels: tuple
    structure_constants: np.ndarray
    antisymmetry_defect: float = 0.0
    antisymmetry_worst: Optional[tuple] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_constants(cls, c, basis_labels: Optional[Sequence[str]] = None) -> "LieAlgebra":
        c = np.array(c, dtype=float)
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[1] != c.shape[2]:
            raise InputError("structure constants must have shape (n, n, n)", shape=list(c.shape))
        n = c.shape[0]
        if n == 0:
            raise InputError("dimension must be positive", dim=0)
        if not np.all(np.isfinite(c)):
            raise InputError("structure constants must be finite")
        labels = tuple(basis_labels) if basis_labels is not None else tuple(f"e{i + 1}" for i in range(n))
        if len(labels) != n:
            raise InputError("need one basis label per dimension", dim=n, labels=len(labels))
        defect = np.abs(c + c.transpose(1, 0, 2))
        worst = None
        if defect.max() > 0:
            worst = tuple(int(x) for x in np.unravel_index(np.argmax(defect), defect.shape))
        sym = 0.5 * (c - c.transpose(1, 0, 2))
        sym.setflags(write=False)
        return cls(n, labels, sym, float(defect.max()), worst)

    @classmethod
    def from_brackets(cls, dim: int, brackets, basis_labels=None) -> "LieAlgebra":
        """Build from a sparse list of ``(i, j, result_vector)`` triples.

        A pair given only once as ``(i, j)`` implies ``[e_j, e_i] = -result``.
        Both orientations may be given; inconsistencies then show up as an
        antisymmetry defect.
        """
        if dim <= 0:
            raise InputError("dimension must be positive", dim=dim)
        c = np.zeros((dim, dim, dim))
        given = np.zeros((dim, dim), dtype=bool)
        for i, j, result in brackets:
            result = np.asarray(result, dtype=float)
            if result.shape != (dim,):
                raise InputError("bracket result has wrong length", i=i, j=j, length=int(result.size))
            if not (0 <= i < dim and 0 <= j < dim):
                raise InputError("bracket index out of range", i=i, j=j)
            c[i, j] = result
            given[i, j] = True
        for i in range(dim):
            for j in range(dim):
                if given[i, j] and not given[j, i]:
                    c[j, i] = -c[i, j]
        return cls.from_constants(c, basis_labels)

    @classmethod
    def abelian(cls, dim: int) -> "LieAlgebra":
        return cls.from_constants(np.zeros((dim, dim, dim)))

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim)
        v[i] = 1.0
        return v

    def sparse_brackets(self) -> list:
        """Nonzero brackets ``(i, j, result)`` with ``i < j``."""
        out = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if np.any(self.structure_constants[i, j] != 0):
                    out.append((i, j, self.structure_constants[i, j].copy()))
        return out

    def ad(self, x) -> np.ndarray:
        """Matrix of ``ad_x = [x, .]`` acting on coordinate columns."""
        x = self._check(x)
        # (ad_x)[k, j] = sum_i x_i c[i, j, k]
        return np.einsum("i,ijk->kj", x, self.structure_constants)

    def _check(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[-1:] != (self.dim,):
            raise InputError("vector length does not match algebra dimension",
                             expected=self.dim, got=list(v.shape))
        return v


def bracket(a, b, alg: LieAlgebra) -> np.ndarray:
    """Return ``[a, b]``. Leading axes broadcast, so stacks of vectors work."""
    a = alg._check(a)
    b = alg._check(b)
    return np.einsum("...i,...j,ijk->...k", a, b, alg.structure_constants)


@dataclass
class ValidationReport:
    passed: bool
    tol: float
    max_jacobi_residual: float
    antisymmetry_defect: float
    failures: list

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "max_jacobi_residual": self.max_jacobi_residual,
            "antisymmetry_defect": self.antisymmetry_defect,
            "failures": self.failures,
        }


def jacobi_residuals(alg: LieAlgebra) -> np.ndarray:
    """Array ``r[x, y, z]`` of ``|[[e_x,e_y],e_z] + cyclic|`` (max-norm)."""
    c = alg.structure_constants
    # [[e_x, e_y], e_z]_m = sum_k c[x,y,k] c[k,z,m]
    dbl = np.einsum("xyk,kzm->xyzm", c, c)
    total = dbl + dbl.transpose(1, 2, 0, 3) + dbl.transpose(2, 0, 1, 3)
    return np.abs(total).max(axis=-1)


def validate_jacobi(alg: LieAlgebra, tol: float = DEFAULT_JACOBI_TOL) -> ValidationReport:
    if tol <= 0:
        raise InputError("tol must be positive", tol=tol)
    failures = []
    if alg.antisymmetry_defect > tol:
        i, j, k = alg.antisymmetry_worst
        failures.append({"axiom": "antisymmetry", "indices": [i, j, k],
                         "residual": alg.antisymmetry_defect})
    res = jacobi_residuals(alg)
    worst = float(res.max()) if res.size else 0.0
    if worst > tol:
        x, y, z = np.unravel_index(np.argmax(res), res.shape)
        failures.append({"axiom": "jacobi", "indices": [int(x), int(y), int(z)],
                         "residual": worst})
    return ValidationReport(not failures, tol, worst, alg.antisymmetry_defect, failures)


@dataclass(frozen=True)
class Filtration:
    """Lower central series ``g = g_1 >= g_2 >= ...`` as orthonormal bases."""

    terms: tuple
    step: Optional[int]

    @property
    def dims(self) -> list:
        return [t.shape[1] for t in self.terms]

    @property
    def nilpotent(self) -> bool:
        return self.step is not None


def _span_basis(vectors: np.ndarray, threshold: float) -> np.ndarray:
    """Orthonormal basis (columns) of the column span, ranks by SVD."""
    n = vectors.shape[0]
    if vectors.size == 0:
        return np.zeros((n, 0))
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    r = int(np.sum(s > threshold))
    return u[:, :r]


def lower_central_series(alg: LieAlgebra, rank_tol: float = DEFAULT_RANK_TOL) -> Filtration:
    key = ("lcs", rank_tol)
    if key in alg._cache:
        return alg._cache[key]
    n = alg.dim
    c = alg.structure_constants
    scale = max(float(np.abs(c).max()), 1e-300)
    terms = [np.eye(n)]
    step = None
    while True:
        prev = terms[-1]
        # columns [e_i, b] for all basis vectors e_i and all b in prev
        gens = np.einsum("ijk,jb->kib", c, prev).reshape(n, -1)
        s_max = np.linalg.norm(gens, 2) if gens.size else 0.0
        nxt = _span_basis(gens, rank_tol * max(s_max, scale))
        terms.append(nxt)
        if nxt.shape[1] == 0:
            step = len(terms) - 1
            break
        if nxt.shape[1] == prev.shape[1]:
            break
    filt = Filtration(tuple(terms), step)
    alg._cache[key] = filt
    return filt


def is_nilpotent(alg: LieAlgebra, rank_tol: float = DEFAULT_RANK_TOL) -> bool:
    return lower_central_series(alg, rank_tol).nilpotent


def nilpotency_step(alg: LieAlgebra, rank_tol: float = DEFAULT_RANK_TOL) -> Optional[int]:
    return lower_central_series(alg, rank_tol).step
