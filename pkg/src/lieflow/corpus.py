"""Small named algebras and derivations used in examples and tests."""

from __future__ import annotations

import numpy as np

from .lie_core import LieAlgebra


def heisenberg() -> LieAlgebra:
    """``[e1, e2] = e3``."""
    return LieAlgebra.from_brackets(3, [(0, 1, [0, 0, 1])], ["X", "Y", "Z"])


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra.abelian(n)


def filiform4() -> LieAlgebra:
    """Step-3 filiform: ``[e1, e2] = e3``, ``[e1, e3] = e4``."""
    return LieAlgebra.from_brackets(4, [(0, 1, [0, 0, 1, 0]), (0, 2, [0, 0, 0, 1])])


def sl2() -> LieAlgebra:
    """Basis ``(h, e, f)``: ``[h,e] = 2e``, ``[h,f] = -2f``, ``[e,f] = h``."""
    return LieAlgebra.from_brackets(
        3, [(0, 1, [0, 2, 0]), (0, 2, [0, 0, -2]), (1, 2, [1, 0, 0])], ["h", "e", "f"])


def aff1() -> LieAlgebra:
    """Affine algebra of the line: ``[e1, e2] = e2``."""
    return LieAlgebra.from_brackets(2, [(0, 1, [0, 1])])


def aff1_plus_plane() -> LieAlgebra:
    """``aff(1) + R^2``, solvable and not nilpotent."""
    return LieAlgebra.from_brackets(4, [(0, 1, [0, 1, 0, 0])])


def filiform_derivation(a: float, b: float) -> np.ndarray:
    """Diagonal derivation ``diag(a, b, a+b, 2a+b)`` of :func:`filiform4`."""
    return np.diag([a, b, a + b, 2 * a + b]).astype(float)


def systems() -> dict:
    """Named ``(algebra, derivation matrix)`` pairs."""
    H = heisenberg()
    return {
        "heisenberg_hyperbolic": (H, np.diag([1.0, -2.0, -1.0])),
        "heisenberg_hyperbolic_b": (H, np.diag([2.0, -3.0, -1.0])),
        "heisenberg_swapped": (H, np.diag([3.0, -1.0, 2.0])),
        "heisenberg_neg": (H, np.diag([-1.0, -2.0, -3.0])),
        "heisenberg_shear": (H, np.array([[2.0, 0, 0], [0, -3.0, 0], [1.0, 1.0, -1.0]])),
        "heisenberg_center": (H, np.array([[0.0, 1.0, 0], [-1.0, 0.0, 0], [0, 0, 0.0]])),
        "abelian_rotation": (abelian(2), np.array([[0.0, 1.0], [-1.0, 0.0]])),
        "abelian_jordan": (abelian(2), np.array([[0.0, 1.0], [0.0, 0.0]])),
        "abelian_saddle": (abelian(2), np.diag([1.0, -1.0])),
        "abelian_stable_jordan": (abelian(2), np.array([[-1.0, 1.0], [0.0, -1.0]])),
        "abelian3_mixed": (abelian(3), np.array([[0.0, 1.0, 0], [-1.0, 0.0, 0], [0, 0, -0.5]])),
        "filiform_hyperbolic": (filiform4(), filiform_derivation(1.0, -3.0)),
        "aff1_center": (aff1(), np.array([[0.0, 0.0], [1.0, -1.0]])),
        "aff1_plane_jordan": (aff1_plus_plane(), np.array([
            [0.0, 0, 0, 0], [1.0, -1.0, 0, 0], [0, 0, 0.0, 1.0], [0, 0, 0, 0.0]])),
        "sl2_zero": (sl2(), np.zeros((3, 3))),
    }
