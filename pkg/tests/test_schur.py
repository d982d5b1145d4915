import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncball.fock import EMPTY, enumerate_words
from ncball.freeseries import FreeSeries, h2_norm, vstack
from ncball.majorant import least_majorant, majorant_setup
from ncball.sampling import cgauss, random_schur, random_schur_params, random_series, random_theta
from ncball.schur import (InconsistentColumn, SchurColumn, j_forward, j_inverse, left_letter_join,
                          left_letter_split, reconstruct_theta, schur_membership)
from ncball.transforms import cayley

seeds = st.integers(0, 2**32 - 1)
GRID = (0.0, 0.5, 1.0)


def test_split_examples(rng):
    A, B = cgauss(rng, 2, 2), cgauss(rng, 2, 2)
    M = left_letter_split(FreeSeries.monomial(2, 3, (1,), A))
    assert np.array_equal(M[0].coeff(EMPTY), A) and not M[1].coeffs
    M = left_letter_split(FreeSeries.monomial(2, 3, (1, 2), B))
    assert list(M[0].coeffs) == [(2,)] and np.array_equal(M[0].coeff((2,)), B)
    with pytest.raises(ValueError):
        left_letter_split(FreeSeries.identity(2, 3, 2))


@given(seeds)
def test_split_join_inverse(seed):
    rng = np.random.default_rng(seed)
    psi = random_series(rng, 2, 4, 2, 2, zero_constant=True)
    assert left_letter_join(left_letter_split(psi)).max_coeff_diff(psi) == 0


def test_isometric_symbol_unique_column():
    b = enumerate_words(1, 4)
    z = FreeSeries.monomial(1, 4, (1,), 1.0)
    assert majorant_setup(z, b).k == 0
    col = j_forward(z, [FreeSeries.zero(1, 4, 0, 0)], b)
    assert reconstruct_theta(col, b).max_coeff_diff(z, b.m - 1) <= 1e-10
    F = least_majorant(z, b)
    M = left_letter_split(cayley(F))
    assert col.M[0].max_coeff_diff(M[0]) <= 1e-12
    assert j_inverse(z, col, b)[0].shape == (0, 0)


def test_zero_theta_column_carries_parameter(rng):
    b = enumerate_words(2, 3)
    theta = FreeSeries.zero(2, 3, 1, 2)
    phi = random_schur_params(rng, b, 2)
    col = j_forward(theta, phi, b)
    assert not col.L.coeffs
    for Mi, p in zip(col.M, phi):
        assert Mi.max_coeff_diff(p, b.m - 1) <= 1e-12
    L0 = SchurColumn(FreeSeries.zero(2, 3, 1, 2), col.M)
    back = j_inverse(theta, L0, b)
    assert max(a.max_coeff_diff(p, b.m - 1) for a, p in zip(back, phi)) <= 1e-12


def test_reconstruct_examples(rng):
    b = enumerate_words(2, 3)
    A = cgauss(rng, 2, 2)
    A /= 2 * np.linalg.norm(A, 2)
    col = SchurColumn(FreeSeries.constant(2, 3, A), tuple(FreeSeries.zero(2, 3, 2, 2) for _ in range(2)))
    assert reconstruct_theta(col, b).max_coeff_diff(FreeSeries.constant(2, 3, A)) == 0
    b1 = enumerate_words(1, 6)
    c = 2 ** -0.5
    col = SchurColumn(FreeSeries.monomial(1, 6, (1,), c), (FreeSeries.constant(1, 6, c),))
    theta = reconstruct_theta(col, b1)
    expected = FreeSeries.from_terms(1, 6, {(1,) * k: c ** k for k in range(1, 7)})
    assert theta.max_coeff_diff(expected) <= 1e-15
    assert h2_norm(theta) <= 1.0


def test_column_shape_checks():
    L = FreeSeries.zero(2, 3, 1, 2)
    with pytest.raises(ValueError):
        SchurColumn(L, (FreeSeries.zero(2, 3, 2, 2),))
    with pytest.raises(ValueError):
        SchurColumn(L, (FreeSeries.zero(2, 3, 1, 2), FreeSeries.zero(2, 3, 2, 2)))


@settings(max_examples=10)
@given(seeds)
def test_bijection_round_trips(seed):
    rng = np.random.default_rng(seed)
    b = enumerate_words(2, 3)
    theta = random_theta(rng, 2, 3, 2, 2, degree=2)
    k = majorant_setup(theta, b).k
    phi = random_schur_params(rng, b, k, level=0.9)
    col = j_forward(theta, phi, b)
    upto = b.m - 1
    assert reconstruct_theta(col, b).max_coeff_diff(theta, upto) <= 1e-8
    assert col.norm_estimate(b) <= 1 + 1e-9
    back = j_inverse(theta, col, b)
    assert max(a.max_coeff_diff(p, upto) for a, p in zip(back, phi)) <= 1e-8
    assert j_forward(theta, back, b).max_coeff_diff(col, upto) <= 1e-8


def test_inverse_rejects_foreign_column(rng):
    b = enumerate_words(2, 3)
    theta = random_theta(rng, 2, 3, 1, 2, degree=2)
    other = random_theta(rng, 2, 3, 1, 2, degree=2)
    col = j_forward(other, random_schur_params(rng, b, 2), b)
    with pytest.raises(InconsistentColumn):
        j_inverse(theta, col, b)


def test_forward_rejects_large_parameter(rng):
    b = enumerate_words(2, 3)
    theta = random_theta(rng, 2, 3, 1, 2, degree=2)
    phi = random_schur_params(rng, b, 2, level=1.5)
    with pytest.raises(ValueError):
        j_forward(theta, phi, b)


@given(seeds)
def test_schur_columns_give_h2_ball(seed):
    rng = np.random.default_rng(seed)
    b = enumerate_words(2, 3)
    stacked = random_schur(rng, b, 1 + 2 * 2, 2, level=1.0)
    L = stacked.map_coeffs(lambda A: A[:1], 1, 2)
    M = tuple(stacked.map_coeffs(lambda A, i=i: A[1 + 2 * i:3 + 2 * i], 2, 2) for i in range(2))
    assert h2_norm(reconstruct_theta(SchurColumn(L, M), b)) <= 1 + 1e-6


def test_membership_examples():
    b = enumerate_words(2, 3)
    U = np.linalg.qr(cgauss(np.random.default_rng(0), 2, 2))[0]
    assert schur_membership(FreeSeries.constant(2, 3, U), b, GRID).passed
    assert not schur_membership(FreeSeries.monomial(2, 3, (1,), 2.0), b, GRID).passed
    rep = schur_membership(FreeSeries.from_terms(2, 3, {(1,): 2 ** -0.5, (2,): 2 ** -0.5}), b, GRID)
    assert rep.passed and rep.values["sup_norm_estimate"] == pytest.approx(1.0)


def test_column_json_round_trip(rng):
    b = enumerate_words(2, 3)
    theta = random_theta(rng, 2, 3, 1, 2, degree=2)
    col = j_forward(theta, random_schur_params(rng, b, 2), b)
    back = SchurColumn.from_dict(col.to_dict())
    assert back.max_coeff_diff(col) == 0
    assert vstack([back.L, *back.M]).shape == col.stacked().shape
