import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xyquench.correlators import CorrelatorSet, correlator_set
from xyquench.entanglement import negativity
from xyquench.errors import BadSize, DimensionMismatch, TooLarge, ValidationFailure, ConfigError
from xyquench.model import ModelParams, Temperature, dispersion
from xyquench.oracle.exact_diag import exact_diag_reference, spin_hamiltonian
from xyquench.oracle.freefermion import (
    CovarianceState,
    _parity_of,
    build_quadratic_form,
    covariance_observables,
    evolve_covariance,
    free_fermion_correlators,
    gaussian_energy,
    momentum_observables,
    normal_form,
    sector_momenta,
    thermal_covariance,
)
from xyquench.oracle.majorana import canonical_word, pfaffian
from xyquench.oracle.validate import PANEL, cross_validate, finite_size_tolerance, validate_panel
from xyquench.rdm import build_two_site_matrix

ZERO = Temperature.zero()


# -- Majorana algebra ------------------------------------------------------------


def _pfaffian_by_expansion(a):
    n = a.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    for j in range(1, n):
        keep = [k for k in range(1, n) if k != j]
        total += (-1) ** (j - 1) * a[0, j] * _pfaffian_by_expansion(a[np.ix_(keep, keep)])
    return total


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_pfaffian_matches_expansion(n):
    rng = np.random.default_rng(n)
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = m - m.T
    assert pfaffian(a) == pytest.approx(_pfaffian_by_expansion(a), rel=1e-12)
    assert pfaffian(a) ** 2 == pytest.approx(np.linalg.det(a), rel=1e-10)


def test_pfaffian_odd_is_zero():
    assert pfaffian(np.zeros((3, 3))) == 0


def test_canonical_word():
    assert canonical_word((1, 0)) == (-1, (0, 1))
    assert canonical_word((2, 0, 2)) == (-1, (0,))
    assert canonical_word((3, 1, 2, 1)) == (1, (2, 3))


# -- quadratic forms ---------------------------------------------------------------


def test_bad_sizes():
    for n in (2, 5):
        with pytest.raises(BadSize):
            build_quadratic_form(n, 0.5, 0.5)


@pytest.mark.parametrize("sector", ["even", "odd"])
def test_generator_antisymmetric_and_translation_invariant(sector):
    q = build_quadratic_form(8, 0.5, 0.3, sector)
    a = q.generator
    assert np.max(np.abs(a + a.T)) <= 1e-12
    bulk = a[2:4, 4:6]
    for j in range(1, 6):
        np.testing.assert_array_equal(a[2 * j:2 * j + 2, 2 * j + 2:2 * j + 4], bulk)


def test_one_particle_spectrum_is_dispersion():
    q = build_quadratic_form(8, 0.5, 0.5, "even")
    _, eps = normal_form(q.generator)
    expected = dispersion(0.5, 0.5, sector_momenta(8, "even"))
    np.testing.assert_allclose(np.sort(eps), np.sort(expected), atol=1e-12)


def test_strong_field_energies():
    _, eps = normal_form(build_quadratic_form(6, 0.5, 200.0).generator)
    assert np.all(np.abs(eps - 200.0) <= 1.5)


def _many_body_levels(n, gamma, h):
    levels = []
    for sector, s in (("even", 1), ("odd", -1)):
        w, eps = normal_form(build_quadratic_form(n, gamma, h, sector).generator)
        for occ in itertools.product((0, 1), repeat=n):
            occ = np.array(occ)
            if _parity_of(w, np.where(occ == 1, -1.0, 1.0)) == s:
                levels.append(float(eps @ (occ - 0.5)))
    return np.sort(levels)


@pytest.mark.parametrize("n,gamma,h", [(4, 1.0, 0.0), (4, 0.5, 0.3), (6, 0.5, 0.7)])
def test_many_body_spectrum_matches_spin_hamiltonian(n, gamma, h):
    ed = np.linalg.eigvalsh(np.asarray(spin_hamiltonian(n, gamma, h).todense()
                                       if hasattr(spin_hamiltonian(n, gamma, h), "todense")
                                       else spin_hamiltonian(n, gamma, h)))
    np.testing.assert_allclose(ed, _many_body_levels(n, gamma, h), atol=1e-12)


# -- Gaussian states ---------------------------------------------------------------


def test_infinite_temperature_covariance_vanishes():
    st_ = thermal_covariance(build_quadratic_form(8, 0.5, 0.5), Temperature(1e-14))
    assert np.max(np.abs(st_.matrix)) <= 1e-13
    assert covariance_observables(CovarianceState(np.zeros((16, 16)))) == CorrelatorSet.zero()


def test_polarised_covariance():
    h = 100.0
    c = covariance_observables(thermal_covariance(build_quadratic_form(8, 0.5, h), ZERO))
    assert 0.5 - c.m_z <= 1e-4 and 0.5 - c.m_z > 0
    assert c.t_zz == pytest.approx(1.0, abs=1e-3)
    assert max(abs(c.t_xx), abs(c.t_yy), abs(c.t_xy)) <= 1e-2


def test_evolution_basics():
    q0 = build_quadratic_form(8, 0.5, 0.0)
    qa = build_quadratic_form(8, 0.5, 0.5)
    g0 = thermal_covariance(qa, Temperature(1.0))
    assert evolve_covariance(g0, q0, 0.0) is g0
    gt = evolve_covariance(g0, q0, 2.5)
    np.testing.assert_allclose(np.linalg.eigvalsh(1j * gt.matrix), np.linalg.eigvalsh(1j * g0.matrix),
                               atol=1e-10)
    assert gt.spectral_radius() <= 1 + 1e-10
    assert gaussian_energy(gt, q0) == pytest.approx(gaussian_energy(g0, q0), abs=1e-10)
    stationary = thermal_covariance(q0, Temperature(1.0))
    np.testing.assert_allclose(evolve_covariance(stationary, q0, 7.0).matrix, stationary.matrix, atol=1e-10)
    with pytest.raises(DimensionMismatch):
        evolve_covariance(g0, build_quadratic_form(6, 0.5, 0.0), 1.0)


def test_momentum_path_matches_real_space_even_sector():
    n, g, a, t = 16, 0.5, 0.6, 1.7
    for T in (ZERO, Temperature(1.3)):
        q0 = build_quadratic_form(n, g, 0.0, "even")
        state = evolve_covariance(thermal_covariance(build_quadratic_form(n, g, a, "even"), T), q0, t)
        real_space = covariance_observables(state)
        momentum = CorrelatorSet.from_pauli(momentum_observables(n, g, a, T, t, "even"))
        assert real_space.max_abs_diff(momentum) <= 1e-12


# -- exact diagonalization -----------------------------------------------------------


def test_exact_diag_limits():
    with pytest.raises(TooLarge):
        exact_diag_reference(12, 0.5, 0.5, ZERO, 1.0)
    with pytest.raises(BadSize):
        exact_diag_reference(1, 0.5, 0.5, ZERO, 1.0)
    for n in (2, 6):
        ref = exact_diag_reference(n, 0.5, 0.5, Temperature(1e-14), 1.0)
        np.testing.assert_allclose(ref["rho12"], np.eye(4) / 4, atol=1e-12)
        assert ref["log_negativity"] == 0.0


def test_exact_diag_energy_conserved():
    e0 = exact_diag_reference(6, 0.5, 0.7, Temperature(1.0), 0.0)["energy"]
    for t in (0.5, 3.0, 10.0):
        assert exact_diag_reference(6, 0.5, 0.7, Temperature(1.0), t)["energy"] == pytest.approx(e0, abs=1e-10)


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([4, 6, 8]), st.floats(0.2, 1.5), st.floats(0.0, 2.0),
       st.sampled_from([None, 0.5, 2.0, 8.0]), st.floats(0.0, 10.0))
def test_free_fermion_equals_exact_diag(n, gamma, a, beta, t):
    T = ZERO if beta is None else Temperature(beta)
    ed = exact_diag_reference(n, gamma, a, T, t)
    ff = free_fermion_correlators(n, gamma, a, T, t, "exact")
    for k in ("m_z", "t_xx", "t_yy", "t_zz", "t_xy"):
        assert abs(getattr(ed["correlators"], k) - getattr(ff, k)) <= 1e-10
    assert abs(ed["log_negativity"] - negativity(build_two_site_matrix(ff)).log_negativity) <= 1e-10


def test_finite_size_convergence():
    # gapless initial state (a = 1, ground state): power-law finite-size corrections
    p = (0.5, 1.0, ZERO, 1.0)
    sets = {n: free_fermion_correlators(n, *p, projection="even") for n in (256, 512, 1024, 2048)}
    diffs = [sets[n].max_abs_diff(sets[2 * n]) for n in (256, 512, 1024)]
    assert diffs[0] > diffs[1] > diffs[2]
    assert correlator_set(ModelParams(*p)).max_abs_diff(sets[2048]) <= 1e-3


# -- cross validation ---------------------------------------------------------------


def test_panel_shape():
    assert len(PANEL) == 9
    assert {p.field_a for p in PANEL} == {0.5, 0.78, 1.0}
    assert {p.time_t for p in PANEL} == {0.0, 1.0, 10.0}
    assert {str(p.temperature) for p in PANEL} == {"inf", "1.0"}


def test_cross_validate_examples():
    rep = cross_validate(ModelParams(0.5, 0.5, ZERO, 1.0))
    assert rep.passed and len(rep.comparisons) == 6 + 9
    sep = cross_validate(ModelParams(0.5, 0.78, ZERO, 1.0))
    en = {c.routes: c for c in sep.comparisons if c.observable == "E_N"}
    assert en["FF2048~INF"].right == 0.0 and en["FF2048~INF"].left <= 1e-3
    assert cross_validate(ModelParams(0.5, 1.0, ZERO, 1.0)).passed
    assert all(line.startswith("PASS") for line in rep.lines())


def test_cross_validate_relaxed_size():
    assert finite_size_tolerance(512) == pytest.approx(4e-3)
    assert all(r.passed for r in validate_panel(n_ff=512, n_ed=8))


def test_cross_validate_rejects_and_fails():
    p = ModelParams(0.5, 0.5, ZERO, 1.0)
    with pytest.raises(TooLarge):
        cross_validate(p, n_ed=12)
    with pytest.raises(ConfigError):
        cross_validate(p, n_ff=8)
    with pytest.raises(ValidationFailure) as exc:
        cross_validate(p, n_ff=16, ff_tol=1e-9)
    assert exc.value.failures and "FF16~INF" in str(exc.value)
    assert math.isfinite(exc.value.failures[0].diff)
