import numpy as np
import pytest

from lieflow import corpus
from lieflow.lie_core import LieAlgebra
from lieflow.spectral import validate_leibniz


def change_basis(alg: LieAlgebra, G: np.ndarray) -> LieAlgebra:
    """Same algebra in the basis whose vectors are the columns of ``G``."""
    Ginv = np.linalg.inv(G)
    c = np.einsum("ai,bj,abm,km->ijk", G, G, alg.structure_constants, Ginv)
    return LieAlgebra.from_constants(c)


def random_algebra(rng: np.random.Generator) -> LieAlgebra:
    base = [corpus.heisenberg(), corpus.filiform4(), corpus.sl2(), corpus.aff1_plus_plane(),
            corpus.abelian(3)][rng.integers(5)]
    G = rng.normal(size=(base.dim, base.dim)) + 2 * np.eye(base.dim)
    return change_basis(base, G)


def derivation_space(alg: LieAlgebra) -> np.ndarray:
    """Orthonormal basis (rows, flattened matrices) of Der(g) from the linear
    Leibniz constraints. Test oracle only."""
    n = alg.dim
    c = alg.structure_constants
    rows = []
    for k in range(n * n):
        E = np.zeros(n * n)
        E[k] = 1
        M = E.reshape(n, n)
        lhs = np.einsum("ijk,mk->ijm", c, M)
        t1 = np.einsum("ai,ajm->ijm", M, c)
        t2 = np.einsum("aj,iam->ijm", M, c)
        rows.append((lhs - t1 - t2).ravel())
    L = np.array(rows).T
    _, s, vt = np.linalg.svd(L)
    rank = int(np.sum(s > 1e-10 * max(s.max(), 1.0))) if s.size else 0
    return vt[rank:]


def distance_to_derivations(M: np.ndarray, alg: LieAlgebra) -> float:
    basis = derivation_space(alg)
    m = M.ravel()
    return float(np.linalg.norm(m - basis.T @ (basis @ m)))


def heisenberg_derivation(a, b, c, d, e, f) -> np.ndarray:
    return np.array([[a, b, 0.0], [c, d, 0.0], [e, f, a + d]])


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture
def heis():
    return corpus.heisenberg()


@pytest.fixture
def heis_D(heis):
    return validate_leibniz(np.diag([1.0, -2.0, -1.0]), heis)


@pytest.fixture
def filiform():
    return corpus.filiform4()


@pytest.fixture
def filiform_D(filiform):
    return validate_leibniz(corpus.filiform_derivation(1.0, -3.0), filiform)


# acceptance criteria report: one line per criterion at the end of the run
ACCEPTANCE: list = []


def record_criterion(label: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
