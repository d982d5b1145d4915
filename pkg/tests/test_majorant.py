import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncball.fock import EMPTY, compress, enumerate_words
from ncball.freeseries import FreeSeries, eval_tuple, h2_norm, radial_eval
from ncball.linalg import herm, min_eig
from ncball.majorant import (InconsistentMajorant, defect_residual, is_subpluriharmonic, least_majorant,
                             majorant_existence, majorant_from_param, majorant_setup, param_from_majorant,
                             real_part_curve, state_space_eval, symbol, theta_curve)
from ncball.sampling import cgauss, random_schur, random_theta
from ncball.transforms import herglotz_moments, herglotz_series

seeds = st.integers(0, 2**32 - 1)
GRID = (0.0, 0.5, 0.9, 1.0)

z = FreeSeries.monomial(1, 4, (1,), 1.0)
half = FreeSeries.from_terms(1, 4, {(): 0.5, (1,): 0.5})


def test_symbol_of_constant(rng):
    b = enumerate_words(2, 3)
    A = cgauss(rng, 2, 3)
    blk = symbol(FreeSeries.constant(2, 3, A), b).block()
    assert np.array_equal(blk[:, 0, :], A)
    assert not blk[:, 1:, :].any()


def test_symbol_of_z():
    b = enumerate_words(1, 4)
    s = symbol(z, b)
    assert s.block()[0, 1, 0] == 1 and np.count_nonzero(s.gamma) == 1
    assert (s.gamma.conj().T @ s.gamma)[0, 0] == 1


def test_symbol_places_reversed_words(rng):
    b = enumerate_words(2, 3)
    theta = FreeSeries.monomial(2, 3, (1, 2, 2), np.ones((1, 1)))
    assert symbol(theta, b).block()[0, b.index[(2, 2, 1)], 0] == 1
    f = random_theta(rng, 2, 3, 2, 2, degree=3)
    s = symbol(f, b)
    for w in b.words:
        assert np.allclose(s.coefficient(w), f.coeff(w))


def test_symbol_refuses_high_degree():
    with pytest.raises(ValueError):
        symbol(FreeSeries.monomial(1, 5, (1,) * 5, 1.0), enumerate_words(1, 3))


@given(seeds)
def test_symbol_norm_is_h2_norm(seed):
    rng = np.random.default_rng(seed)
    f = random_theta(rng, 2, 3, 2, 2, degree=3)
    s = symbol(f, enumerate_words(2, 3))
    assert abs(np.linalg.norm(s.gamma, 2) ** 2 - h2_norm(f) ** 2) <= 1e-12


def test_state_space_examples(rng):
    b = enumerate_words(2, 3)
    f = random_theta(rng, 2, 3, 2, 2)
    assert np.allclose(state_space_eval(symbol(f, b), [np.zeros((3, 3))] * 2), np.kron(f.coeff(EMPTY), np.eye(3)))
    b1 = enumerate_words(1, 4)
    X = [cgauss(rng, 2, 2) * 0.3]
    assert np.allclose(state_space_eval(symbol(z, b1), X), X[0])


@given(seeds)
def test_state_space_matches_direct_evaluation(seed):
    rng = np.random.default_rng(seed)
    b = enumerate_words(2, 3)
    f = random_theta(rng, 2, 3, 2, 1, degree=3)
    X = [np.tril(cgauss(rng, 3, 3), -1) for _ in range(2)]
    assert np.allclose(state_space_eval(symbol(f, b), X), eval_tuple(f, X, nilpotent=True), atol=1e-10)


def test_least_majorant_examples():
    b = enumerate_words(1, 4)
    assert least_majorant(z, b).max_coeff_diff(FreeSeries.identity(1, 4, 1)) <= 1e-15
    assert least_majorant(half, b).max_coeff_diff(half) <= 1e-15
    assert not least_majorant(FreeSeries.zero(1, 4, 1, 1), b).coeffs


@given(seeds)
def test_two_formulas_agree(seed):
    rng = np.random.default_rng(seed)
    b = enumerate_words(2, 3)
    f = random_theta(rng, 2, 3, 2, 2, degree=3)
    W = least_majorant(f, b)
    assert W.max_coeff_diff(herglotz_series(herglotz_moments(f, b))) <= 1e-12


def test_defect_examples(rng):
    b = enumerate_words(2, 4)
    c = FreeSeries.constant(2, 4, cgauss(rng, 2, 2) * 0.4)
    assert defect_residual(c, 0.7, b) <= 1e-14
    f = FreeSeries.from_terms(2, 4, {(1,): 2 ** -0.5, (2,): 2 ** -0.5})
    assert defect_residual(f, 0.5, b) <= 1e-10


def test_boundary_equality_on_exact_block():
    b = enumerate_words(2, 4)
    f = random_theta(np.random.default_rng(7), 2, 4, 2, 2, degree=2)
    d = b.m - f.degree - 1
    reW = herm(radial_eval(least_majorant(f, b), 1.0, b))
    gap = compress(reW - theta_curve(f)(1.0, b), b, d)
    assert np.linalg.norm(gap) <= 1e-12


@settings(max_examples=10)
@given(seeds, st.floats(0.0, 1.0))
def test_defect_identity_holds(seed, r):
    rng = np.random.default_rng(seed)
    f = random_theta(rng, 2, 4, 2, 2, degree=2)
    assert defect_residual(f, r, enumerate_words(2, 4)) <= 1e-8


def test_theta_curve_is_subpluriharmonic(rng):
    b = enumerate_words(2, 3)
    f = random_theta(rng, 2, 3, 2, 2, degree=2)
    assert is_subpluriharmonic(theta_curve(f), GRID, None, b).passed


def test_pluriharmonic_curve_attains_equality(rng):
    b = enumerate_words(2, 3)
    f = random_theta(rng, 2, 3, 2, 2, degree=2)
    rep = is_subpluriharmonic(real_part_curve(least_majorant(f, b)), GRID, None, b)
    assert rep.passed and rep.values["max_equality_gap"] <= 1e-9


def test_negated_curve_fails():
    b = enumerate_words(1, 4)
    assert not is_subpluriharmonic(theta_curve(z, sign=-1.0), GRID, None, b).passed


def test_fixed_gamma_and_bad_grid(rng):
    b = enumerate_words(1, 4)
    rep = is_subpluriharmonic(theta_curve(half), GRID, 0.9, b)
    assert rep.passed and len([c for c in rep.checks if c.name.startswith("poisson")]) == 2
    with pytest.raises(ValueError):
        is_subpluriharmonic(theta_curve(half), (0.5, 1.5), None, b)


def test_existence_examples(rng):
    b = enumerate_words(2, 3)
    f = random_theta(rng, 2, 3, 2, 2, degree=2)
    rep = majorant_existence(theta_curve(f), GRID, b)
    assert rep.passed and rep.values["vacuum_sup"] == pytest.approx(h2_norm(f) ** 2, abs=1e-12)
    zero = FreeSeries.zero(2, 3, 1, 1)
    assert majorant_existence(theta_curve(zero), GRID, b).values["vacuum_sup"] == 0
    W = least_majorant(f, b)
    rep = majorant_existence(real_part_curve(W), GRID, b)
    assert rep.values["vacuum_sup"] == pytest.approx(np.linalg.norm(herm(W.coeff(EMPTY)), 2), abs=1e-12)


def test_zero_parameter_gives_dressed_w(rng):
    b = enumerate_words(2, 3)
    f = random_theta(rng, 2, 3, 2, 2, degree=2)
    s = majorant_setup(f, b)
    F = majorant_from_param(f, FreeSeries.zero(2, 3, s.k, s.k), b)
    D2 = s.D.op @ s.D.op
    assert F.max_coeff_diff(s.W + FreeSeries.constant(2, 3, D2)) <= 1e-12
    assert not param_from_majorant(f, F, b).coeffs


def test_isometric_symbol_has_only_w():
    b = enumerate_words(1, 4)
    s = majorant_setup(z, b)
    assert s.k == 0
    G = FreeSeries.zero(1, 4, 0, 0)
    F = majorant_from_param(z, G, b)
    assert F.max_coeff_diff(s.W) == 0
    assert param_from_majorant(z, F, b).shape == (0, 0)
    with pytest.raises(InconsistentMajorant):
        param_from_majorant(z, F + FreeSeries.monomial(1, 4, (1,), 0.1), b)


@settings(max_examples=10)
@given(seeds)
def test_family_dominates_and_round_trips(seed):
    rng = np.random.default_rng(seed)
    b = enumerate_words(2, 3)
    f = random_theta(rng, 2, 3, 2, 2, degree=2)
    s = majorant_setup(f, b)
    G = random_schur(rng, b, s.k, s.k, level=0.95, zero_constant=True)
    F = majorant_from_param(f, G, b)
    for r in GRID:
        reF = compress(herm(radial_eval(F, r, b)), b, b.m)
        assert min_eig(reF - theta_curve(f)(r, b)) >= -1e-9
    assert param_from_majorant(f, F, b).max_coeff_diff(G) <= 1e-8


def test_param_rejects_bad_majorants(rng):
    b = enumerate_words(2, 3)
    f = random_theta(rng, 2, 3, 2, 2, degree=2)
    W = least_majorant(f, b)
    with pytest.raises(InconsistentMajorant):
        param_from_majorant(f, W.scale(2.0), b)
    with pytest.raises(InconsistentMajorant):
        param_from_majorant(f, W - FreeSeries.monomial(2, 3, (1,), np.eye(2)).scale(5.0), b)
    s = majorant_setup(f, b)
    with pytest.raises(ValueError):
        majorant_from_param(f, FreeSeries.identity(2, 3, s.k).scale(0.5), b)
