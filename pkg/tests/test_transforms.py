import numpy as np
import pytest
from hypothesis import given, strategies as st

from ncball.fock import EMPTY, enumerate_words
from ncball.freeseries import FreeSeries, TruncationError, radial_eval
from ncball.linalg import adj, herm, min_eig
from ncball.sampling import cgauss, random_schur, random_series
from ncball.transforms import (cayley, herglotz_moments, herglotz_series, inverse_cayley, operator_poisson,
                               poisson_kernel, poisson_transform, vacuum_functional)

seeds = st.integers(0, 2**32 - 1)


def jordan(k):
    return np.diag(np.ones(k - 1), -1)


def words_to_ops(b, S):
    ops = {EMPTY: np.eye(S[0].shape[0])}
    for w in b.words[1:]:
        ops[w] = S[w[0] - 1] @ ops[w[1:]]
    return ops


def test_kernel_at_zero_embeds_vacuum():
    b = enumerate_words(2, 2)
    k = poisson_kernel([np.zeros((2, 2))] * 2, b)
    expected = np.zeros((b.dim * 2, 2))
    expected[:2] = np.eye(2)
    assert np.allclose(k.K, expected)
    assert k.exact


def test_kernel_scalar_geometric_sum():
    k = poisson_kernel([np.array([[0.5]])], enumerate_words(1, 30))
    assert not k.exact
    assert abs((adj(k.K) @ k.K)[0, 0] - 1.0) <= 1e-10


def test_kernel_nilpotent_is_isometric():
    k = poisson_kernel([jordan(4)], enumerate_words(1, 5))
    assert k.exact
    assert np.array_equal(adj(k.K) @ k.K, np.eye(4))


def test_kernel_refuses_non_nilpotent_unit_row():
    with pytest.raises(TruncationError):
        poisson_kernel([np.eye(2)], enumerate_words(1, 3))


def test_moments_at_nilpotent_pair():
    b = enumerate_words(2, 3)
    rng = np.random.default_rng(3)
    # a generic strictly lower triangular pair is nilpotent of order <= 4
    X = [np.tril(cgauss(rng, 4, 4), -1) for _ in range(2)]
    X = [x * 0.9 / np.linalg.norm(np.hstack(X), 2) for x in X]
    S = words_to_ops(b, b.creation_tuple("left"))
    XX = words_to_ops(b, X)
    k = poisson_kernel(X, b)
    assert k.exact
    for a in b.words:
        for c in b.words:
            got = k.transform(S[a] @ adj(S[c]))
            assert np.allclose(got, XX[a] @ adj(XX[c]), atol=1e-12)


def test_transform_examples():
    b = enumerate_words(2, 3)
    S = b.creation_tuple("left")
    assert np.allclose(poisson_transform(np.eye(b.dim), S, b), np.eye(b.dim))
    assert np.allclose(poisson_transform(S[0], [np.zeros((1, 1))] * 2, b), 0)


def test_operator_transform_examples(rng):
    b = enumerate_words(2, 3)
    S = b.creation_tuple("left")
    X = [0.7 * s for s in S]
    E = cgauss(rng, 2, 2)
    assert np.allclose(operator_poisson(np.eye(2 * b.dim), X, b), np.eye(2 * b.dim))
    u = np.kron(E, S[0] @ S[1] @ adj(S[1]))
    assert np.allclose(operator_poisson(u, X, b), np.kron(E, X[0] @ X[1] @ adj(X[1])), atol=1e-12)


@given(seeds, st.floats(0.1, 1.0), st.floats(0.1, 1.0))
def test_semigroup(seed, g1, g2):
    rng = np.random.default_rng(seed)
    b = enumerate_words(2, 3)
    S = b.creation_tuple("left")
    u = cgauss(rng, 2 * b.dim, 2 * b.dim)
    lhs = operator_poisson(u, [g1 * g2 * s for s in S], b)
    rhs = operator_poisson(operator_poisson(u, [g2 * s for s in S], b), [g1 * s for s in S], b)
    assert np.allclose(lhs, rhs, atol=1e-9)


@given(seeds)
def test_transform_is_positive_and_unital(seed):
    rng = np.random.default_rng(seed)
    b = enumerate_words(2, 2)
    X = [np.tril(cgauss(rng, 3, 3), -1) for _ in range(2)]
    X = [x * 0.9 / np.linalg.norm(np.hstack(X), 2) for x in X]
    a = cgauss(rng, b.dim, b.dim)
    assert min_eig(poisson_transform(a @ adj(a), X, b)) >= -1e-10
    assert np.allclose(poisson_transform(np.eye(b.dim), X, b), np.eye(3), atol=1e-12)


def test_vacuum_functional_examples(rng):
    b = enumerate_words(2, 3)
    A = cgauss(rng, 2, 2)
    S1 = b.creation(1)
    assert np.allclose(vacuum_functional(np.eye(2 * b.dim), b), np.eye(2))
    assert np.allclose(vacuum_functional(np.kron(A, S1), b), 0)
    assert np.allclose(vacuum_functional(np.kron(A, S1 @ S1.T), b), 0)


def test_cayley_examples():
    m = 5
    I = FreeSeries.identity(1, m, 1)
    assert not cayley(I).coeffs
    z = FreeSeries.monomial(1, m, (1,), 1.0)
    # (1+z)(1-z)^{-1} = 1 + 2z + 2z^2 + ...
    f = FreeSeries.from_terms(1, m, {(): 1, **{(1,) * k: 2 for k in range(1, m + 1)}})
    assert cayley(f).max_coeff_diff(z) <= 1e-14
    assert inverse_cayley(z).max_coeff_diff(f) <= 1e-14


def test_inverse_cayley_examples():
    m = 3
    assert inverse_cayley(FreeSeries.zero(2, m, 1, 1)).max_coeff_diff(FreeSeries.identity(2, m, 1)) == 0
    g = FreeSeries.from_terms(2, m, {(1,): 0.5, (2,): 0.5})
    f = inverse_cayley(g)
    assert f.coeff(EMPTY)[0, 0] == 1
    assert f.coeff((1,))[0, 0] == pytest.approx(1.0) and f.coeff((2,))[0, 0] == pytest.approx(1.0)


def test_cayley_checks_constant():
    with pytest.raises(ValueError):
        cayley(FreeSeries.zero(1, 2, 1, 1))
    with pytest.raises(ValueError):
        inverse_cayley(FreeSeries.identity(1, 2, 1))


@given(seeds)
def test_cayley_round_trips(seed):
    rng = np.random.default_rng(seed)
    g = random_series(rng, 2, 3, 2, 2, zero_constant=True)
    assert cayley(inverse_cayley(g)).max_coeff_diff(g) <= 1e-10
    f = FreeSeries.identity(2, 3, 2) + g
    assert inverse_cayley(cayley(f)).max_coeff_diff(f) <= 1e-10


@given(seeds)
def test_inverse_cayley_of_schur_has_positive_real_part(seed):
    rng = np.random.default_rng(seed)
    b = enumerate_words(2, 3)
    g = random_schur(rng, b, 2, 2, level=0.95, zero_constant=True)
    assert min_eig(herm(radial_eval(inverse_cayley(g), 1.0, b))) >= -1e-9


def test_herglotz_moment_examples():
    b = enumerate_words(1, 3)
    z = FreeSeries.monomial(1, 3, (1,), 1.0)
    mu = herglotz_moments(z, b).as_series()
    assert mu.coeff(EMPTY)[0, 0] == 1 and mu.coeff((1,))[0, 0] == 0
    half = FreeSeries.from_terms(1, 3, {(): 0.5, (1,): 0.5})
    mu = herglotz_moments(half, b).as_series()
    assert mu.coeff(EMPTY)[0, 0] == 0.5 and mu.coeff((1,))[0, 0] == 0.25
    assert not herglotz_moments(FreeSeries.zero(1, 3, 1, 1), b).values


def test_herglotz_series_examples():
    b = enumerate_words(1, 3)
    half = FreeSeries.from_terms(1, 3, {(): 0.5, (1,): 0.5})
    W = herglotz_series(herglotz_moments(half, b))
    assert W.max_coeff_diff(FreeSeries.from_terms(1, 3, {(): 0.5, (1,): 0.5})) == 0
    z = FreeSeries.monomial(1, 3, (1,), 1.0)
    assert herglotz_series(herglotz_moments(z, b)).max_coeff_diff(FreeSeries.identity(1, 3, 1)) == 0


def test_kernel_refuses_non_contraction():
    with pytest.raises(ValueError):
        poisson_kernel([2.0 * jordan(3)], enumerate_words(1, 3))
