import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lieflow import corpus
from lieflow.errors import InputError
from lieflow.lie_core import (LieAlgebra, bracket, is_nilpotent, lower_central_series,
                              nilpotency_step, validate_jacobi)

from conftest import random_algebra


def test_heisenberg_bracket(heis):
    e1, e2, e3 = np.eye(3)
    assert np.array_equal(bracket(e1, e2, heis), e3)
    assert np.array_equal(bracket(e2, e1, heis), -e3)


def test_bracket_self_vanishes(heis, rng):
    v = rng.normal(size=3)
    assert np.allclose(bracket(v, v, heis), 0, atol=1e-15)


def test_abelian_bracket_is_zero():
    e1, e2 = np.eye(2)
    assert not np.any(bracket(e1, e2, LieAlgebra.abelian(2)))


def test_bracket_dimension_mismatch(heis):
    with pytest.raises(InputError):
        bracket(np.ones(2), np.ones(3), heis)


def test_bracket_matches_structure_constant_expansion(rng):
    alg = random_algebra(rng)
    a, b = rng.normal(size=(2, alg.dim))
    expected = sum(a[i] * b[j] * alg.structure_constants[i, j]
                   for i in range(alg.dim) for j in range(alg.dim))
    assert np.allclose(bracket(a, b, alg), expected, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_bracket_bilinear_antisymmetric(seed):
    rng = np.random.default_rng(seed)
    alg = random_algebra(rng)
    u, v, w = rng.normal(size=(3, alg.dim))
    s, t = rng.normal(size=2)
    lhs = bracket(s * u + t * v, w, alg)
    rhs = s * bracket(u, w, alg) + t * bracket(v, w, alg)
    scale = 1 + np.abs(lhs).max()
    assert np.abs(lhs - rhs).max() <= 1e-12 * scale * 10
    assert np.abs(bracket(u, v, alg) + bracket(v, u, alg)).max() <= 1e-12 * scale


def test_jacobi_examples(heis):
    rep = validate_jacobi(heis, 1e-9)
    assert rep.passed and rep.max_jacobi_residual == 0.0
    assert validate_jacobi(LieAlgebra.abelian(4)).passed


def test_jacobi_detects_single_entry_antisymmetry_defect(heis):
    c = heis.structure_constants.copy()
    c[0, 1, 2] += 1e-3
    rep = validate_jacobi(LieAlgebra.from_constants(c), 1e-9)
    assert not rep.passed
    fail = rep.failures[0]
    assert fail["axiom"] == "antisymmetry"
    assert sorted(fail["indices"][:2]) == [0, 1] and fail["indices"][2] == 2
    assert fail["residual"] == pytest.approx(1e-3, rel=1e-9)


def test_jacobi_detects_genuine_jacobi_failure():
    # antisymmetric but not a Lie bracket: [e1,e2]=e3, [e2,e3]=e1, [e1,e3]=e1
    alg = LieAlgebra.from_brackets(3, [(0, 1, [0, 0, 1]), (1, 2, [1, 0, 0]), (0, 2, [1, 0, 0])])
    rep = validate_jacobi(alg, 1e-9)
    assert not rep.passed
    assert rep.failures[-1]["axiom"] == "jacobi"


def test_random_valid_algebras_pass_jacobi(rng):
    for _ in range(20):
        assert validate_jacobi(random_algebra(rng), 1e-9).passed


@pytest.mark.parametrize("build", [corpus.heisenberg, corpus.filiform4, corpus.sl2,
                                   lambda: corpus.abelian(3)])
def test_every_single_entry_perturbation_flagged(build):
    alg = build()
    tol = 1e-9
    n = alg.dim
    for idx in np.ndindex(n, n, n):
        c = alg.structure_constants.copy()
        c[idx] += 10 * tol
        assert not validate_jacobi(LieAlgebra.from_constants(c), tol).passed, idx


def test_zero_dimension_rejected():
    with pytest.raises(InputError):
        LieAlgebra.from_constants(np.zeros((0, 0, 0)))
    assert LieAlgebra.abelian(1).dim == 1


def test_lower_central_series_examples(heis):
    assert lower_central_series(heis).dims == [3, 1, 0]
    assert nilpotency_step(heis) == 2
    filt = lower_central_series(LieAlgebra.abelian(2))
    assert filt.dims == [2, 0] and filt.step == 1
    sl2 = lower_central_series(corpus.sl2())
    assert sl2.dims == [3, 3] and not sl2.nilpotent


def test_filiform_is_step_three(filiform):
    assert lower_central_series(filiform).dims == [4, 2, 1, 0]
    assert nilpotency_step(filiform) == 3


def test_is_nilpotent(heis):
    assert is_nilpotent(heis)
    assert is_nilpotent(LieAlgebra.abelian(3))
    assert not is_nilpotent(corpus.sl2())
    assert not is_nilpotent(corpus.aff1())


def test_filtration_terms_nested(rng):
    for _ in range(20):
        alg = random_algebra(rng)
        terms = lower_central_series(alg).terms
        for big, small in zip(terms, terms[1:]):
            if small.shape[1] == 0:
                continue
            resid = small - big @ (big.T @ small)
            assert np.abs(resid).max() <= 1e-10


def test_nilpotency_invariant_under_basis_change(rng):
    from conftest import change_basis
    G = rng.normal(size=(4, 4)) + 3 * np.eye(4)
    assert nilpotency_step(change_basis(corpus.filiform4(), G)) == 3
    assert not is_nilpotent(change_basis(corpus.aff1_plus_plane(), G))


def test_from_brackets_validation():
    with pytest.raises(InputError):
        LieAlgebra.from_brackets(2, [(0, 2, [0, 1])])
    with pytest.raises(InputError):
        LieAlgebra.from_brackets(2, [(0, 1, [0, 1, 0])])
