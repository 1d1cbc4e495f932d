from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lieflow import corpus
from lieflow.errors import NotNilpotent, ParentMismatch, StepTooLarge
from lieflow.lie_core import LieAlgebra
from lieflow.matrix_flow import LinearFlow
from lieflow.nilpotent_group import (Classification, GroupElement, attractor_test, bch,
                                     bch_coefficients, flow_group, gauge, inverse, multiply,
                                     random_elements, split_plus_minus)
from lieflow.spectral import spectral_decompose, validate_leibniz

E1, E2, E3 = np.eye(3)


def nil_expm(N):
    """Exact exponential of a nilpotent matrix (finite series)."""
    out, term = np.eye(len(N)), np.eye(len(N))
    for k in range(1, len(N)):
        term = term @ N / k
        out = out + term
    return out


def nil_logm(U):
    """Exact logarithm of a unipotent matrix (finite series)."""
    N = U - np.eye(len(U))
    out, term = np.zeros_like(U), np.eye(len(U))
    for k in range(1, len(U)):
        term = term @ N
        out = out + (-1) ** (k + 1) * term / k
    return out


def heis_matrix(x):
    a, b, c = x
    return np.array([[0.0, a, c], [0.0, 0.0, b], [0.0, 0.0, 0.0]])


def _split_system(name):
    alg, M = corpus.systems()[name]
    D = validate_leibniz(M, alg)
    return alg, D, spectral_decompose(D)


# ---- BCH -----------------------------------------------------------------

def test_bch_examples(heis):
    assert np.allclose(bch(E1, E2, heis), [1.0, 1.0, 0.5], atol=0)
    X = np.array([0.3, -2.0, 1.1])
    assert np.array_equal(bch(X, np.zeros(3), heis), X)
    ab = LieAlgebra.abelian(3)
    assert np.array_equal(bch(X, E2, ab), X + E2)


def _series(terms, X, Y):
    letters = {"X": X, "Y": Y}
    Z = np.zeros_like(X)
    for word, coef in terms:
        v = letters[word[-1]]
        for ch in reversed(word[:-1]):
            v = letters[ch] @ v - v @ letters[ch]
        Z = Z + float(coef) * v
    return Z


def test_bch_leading_coefficients(rng):
    """Depth 4 agrees with the textbook terms in a step-4 matrix algebra."""
    def c(a, b):
        return a @ b - b @ a

    assert all(isinstance(coef, Fraction) for _, coef in bch_coefficients(4))
    for _ in range(5):
        X = np.triu(rng.normal(size=(5, 5)), 1)
        Y = np.triu(rng.normal(size=(5, 5)), 1)
        ref = (X + Y + c(X, Y) / 2 + (c(X, c(X, Y)) + c(Y, c(Y, X))) / 12
               - c(Y, c(X, c(X, Y))) / 24)
        assert np.abs(_series(bch_coefficients(4), X, Y) - ref).max() <= 1e-12


def test_bch_series_matches_matrix_logarithm(rng):
    """Depth-6 series against log(e^X e^Y) in the free step-6 setting."""
    terms = bch_coefficients(6)
    for _ in range(10):
        X = np.triu(rng.normal(size=(7, 7)), 1)
        Y = np.triu(rng.normal(size=(7, 7)), 1)
        Z = _series(terms, X, Y)
        ref = nil_logm(nil_expm(X) @ nil_expm(Y))
        assert np.abs(Z - ref).max() <= 1e-10 * max(1.0, np.abs(ref).max())


def test_bch_matches_heisenberg_matrices(heis, rng):
    for _ in range(20):
        X, Y = rng.normal(size=(2, 3))
        Z = bch(X, Y, heis)
        assert np.allclose(heis_matrix(Z), nil_logm(nil_expm(heis_matrix(X)) @ nil_expm(heis_matrix(Y))),
                           atol=1e-12)


def test_step_too_large():
    # free-ish chain e1 -> e2 -> ... -> e8 via [e1, e_k] = e_{k+1}: step 7
    n = 8
    alg = LieAlgebra.from_brackets(n, [(0, k, np.eye(n)[k + 1]) for k in range(1, n - 1)])
    with pytest.raises(StepTooLarge):
        bch(np.eye(n)[0], np.eye(n)[1], alg)
    with pytest.raises(StepTooLarge):
        bch_coefficients(7)


def test_group_needs_nilpotent():
    with pytest.raises(NotNilpotent):
        GroupElement.exp([1.0, 0.0, 0.0], corpus.sl2())


# ---- group structure -------------------------------------------------------

def test_inverse_and_commutator(heis):
    g = GroupElement.exp([0.4, -1.0, 2.0], heis)
    assert not np.any(multiply(g, inverse(g)).coords)
    a, b = GroupElement.exp(E1, heis), GroupElement.exp(E2, heis)
    ab, ba = multiply(a, b), multiply(b, a)
    assert not np.allclose(ab.coords, ba.coords)
    comm = multiply(multiply(a, b), multiply(inverse(a), inverse(b)))
    assert np.allclose(comm.coords, E3, atol=1e-15)
    assert np.allclose(ab.coords - ba.coords, E3, atol=1e-15)


def test_parent_mismatch(heis):
    other = corpus.heisenberg()
    with pytest.raises(ParentMismatch):
        multiply(GroupElement.identity(heis), GroupElement.identity(other))


@pytest.mark.parametrize("build", [corpus.heisenberg, corpus.filiform4])
def test_associativity(build, rng):
    alg = build()
    els = random_elements(alg, 300, rng, scale=2.0)
    for g, h, k in zip(els[0::3], els[1::3], els[2::3]):
        lhs = multiply(multiply(g, h), k).coords
        rhs = multiply(g, multiply(h, k)).coords
        assert np.abs(lhs - rhs).max() <= 1e-10


@pytest.mark.parametrize("name", ["heisenberg_hyperbolic", "heisenberg_shear", "filiform_hyperbolic"])
def test_flow_is_automorphism(name, rng):
    alg, D, _ = _split_system(name)
    lf = LinearFlow.of(D)
    els = random_elements(alg, 200, rng)
    for g, h in zip(els[0::2], els[1::2]):
        t = rng.uniform(-2, 2)
        lhs = flow_group(lf, t, multiply(g, h)).coords
        rhs = multiply(flow_group(lf, t, g), flow_group(lf, t, h)).coords
        assert np.abs(lhs - rhs).max() <= 1e-8


def test_flow_group_examples(heis, heis_D):
    lf = LinearFlow.of(heis_D)
    g = GroupElement.exp(E2, heis)
    assert np.array_equal(flow_group(lf, 0.0, g).coords, g.coords)
    assert np.allclose(flow_group(lf, 1.0, g).coords, np.exp(-2) * E2, rtol=1e-14, atol=0)


def test_gauge_examples(heis, heis_D):
    assert gauge(GroupElement.identity(heis)) == 0.0
    assert gauge(GroupElement.exp(E2, heis)) == 1.0
    lf = LinearFlow.of(heis_D)
    g = GroupElement.exp(E2 + E3, heis)
    for t in (0.0, 0.5, 3.0, 10.0):
        assert gauge(flow_group(lf, t, g)) == pytest.approx(np.sqrt(np.exp(-4 * t) + np.exp(-2 * t)),
                                                            rel=1e-13)


# ---- splitter --------------------------------------------------------------

def test_split_examples(heis, heis_D):
    sd = spectral_decompose(heis_D)
    gp, gm = split_plus_minus(GroupElement.exp(E1 + E2, heis), sd)
    assert np.abs(gp.coords - E1).max() <= 1e-10
    assert np.abs(gm.coords - (E2 - 0.5 * E3)).max() <= 1e-10
    gp, gm = split_plus_minus(GroupElement.identity(heis), sd)
    assert not np.any(gp.coords) and not np.any(gm.coords)
    g = GroupElement.exp([0.0, 1.5, -0.7], heis)
    gp, gm = split_plus_minus(g, sd)
    assert not np.any(gp.coords)
    assert np.array_equal(gm.coords, g.coords)


def _in_span(v, B):
    if B.shape[1] == 0:
        return float(np.abs(v).max())
    return float(np.abs(v - B @ np.linalg.lstsq(B, v, rcond=None)[0]).max())


@pytest.mark.parametrize("name", ["heisenberg_hyperbolic", "heisenberg_shear", "filiform_hyperbolic"])
def test_split_recomposition(name, rng):
    alg, _, sd = _split_system(name)
    for g in random_elements(alg, 500, rng, scale=2.0):
        gp, gm = split_plus_minus(g, sd)
        assert np.abs(multiply(gp, gm).coords - g.coords).max() <= 1e-10
        assert _in_span(gp.coords, sd.plus_basis) <= 1e-10
        assert _in_span(gm.coords, sd.minus_basis) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(-3, 3))
def test_split_equivariance(seed, t):
    rng = np.random.default_rng(seed)
    name = ["heisenberg_hyperbolic", "heisenberg_shear", "filiform_hyperbolic"][seed % 3]
    alg, D, sd = _split_system(name)
    lf = LinearFlow.of(D)
    g = random_elements(alg, 1, rng)[0]
    gp, gm = split_plus_minus(g, sd)
    fp, fm = split_plus_minus(flow_group(lf, t, g), sd)
    assert np.abs(fp.coords - flow_group(lf, t, gp).coords).max() <= 1e-8
    assert np.abs(fm.coords - flow_group(lf, t, gm).coords).max() <= 1e-8


def test_split_lipschitz(rng):
    alg, _, sd = _split_system("filiform_hyperbolic")
    for g in random_elements(alg, 20, rng):
        gp, gm = split_plus_minus(g, sd)
        ratios = []
        for h in (1e-4, 1e-5, 1e-6):
            delta = rng.normal(size=alg.dim)
            delta *= h / np.linalg.norm(delta)
            hp, hm = split_plus_minus(GroupElement(g.coords + delta, alg), sd)
            moved = np.linalg.norm(np.concatenate([hp.coords - gp.coords, hm.coords - gm.coords]))
            ratios.append(moved / h)
        # a finite constant that does not blow up as the perturbation shrinks
        assert max(ratios) <= 10 * ratios[0] + 1.0
        assert max(ratios) < 1e3


# ---- attractor -------------------------------------------------------------

def test_attractor_examples(heis, heis_D):
    sd = spectral_decompose(heis_D)
    lf = LinearFlow.of(heis_D)
    stable = attractor_test(lf, sd, GroupElement.exp(E2 - 0.5 * E3, heis))
    assert stable.classification is Classification.STABLE_POINT
    unstable = attractor_test(lf, sd, GroupElement.exp(E1, heis))
    assert unstable.classification is Classification.UNSTABLE_COMPONENT
    ident = attractor_test(lf, sd, GroupElement.identity(heis))
    assert ident.classification is Classification.STABLE_POINT
    assert ident.final_gauge == 0.0


@pytest.mark.parametrize("name", ["heisenberg_hyperbolic", "heisenberg_shear", "filiform_hyperbolic"])
def test_attractor_dichotomy(name, rng):
    alg, D, sd = _split_system(name)
    lf = LinearFlow.of(D)
    for g in random_elements(alg, 30, rng):
        gp, gm = split_plus_minus(g, sd)
        assert attractor_test(lf, sd, gm).classification is Classification.STABLE_POINT
        if gauge(gp) >= 0.1:
            assert attractor_test(lf, sd, g).classification is Classification.UNSTABLE_COMPONENT
