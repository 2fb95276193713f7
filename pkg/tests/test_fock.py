import math
import warnings

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from kerrpol.errors import BoundaryWarning, TruncationError
from kerrpol.fock import (
    FockCutoff,
    TwoModeState,
    auto_cutoff,
    build_stokes_matrices,
    coherent_state,
    fock_state,
    kerr_evolve,
    stokes_moments,
    stokes_theta,
    total_photon_basis,
)
from kerrpol.params import KerrParams

amplitudes = st.builds(
    lambda r, ph: r * complex(math.cos(ph), math.sin(ph)),
    st.floats(0, 2.5),
    st.floats(0, 2 * math.pi),
)
rates = st.floats(-0.3, 0.3)
kerr_params = st.builds(KerrParams, rates, rates, rates, st.floats(0, 2))


def _poisson_tail_by_summation(mean, n_max, terms=200):
    # sum the tail terms directly instead of 1 - cdf
    return math.fsum(math.exp(k * math.log(mean) - math.lgamma(k + 1) - mean)
                     for k in range(n_max + 1, n_max + terms))


# -- construction ------------------------------------------------------------


def test_vacuum_state():
    state = coherent_state(0, 0, 10)
    expected = np.zeros((11, 11))
    expected[0, 0] = 1
    np.testing.assert_array_equal(state.probabilities(), expected)


def test_coherent_mean_photon_number():
    state = coherent_state(2.0, 0.0, 40)
    # Poisson(4) tail beyond 40 is negligible at this level
    assert _poisson_tail_by_summation(4.0, 40) < 1e-20
    n_h, n_v = state.mean_photon_numbers()
    assert n_h == pytest.approx(4.0, abs=1e-10)
    assert n_v == 0.0


def test_truncation_error_for_small_cutoff():
    tail = _poisson_tail_by_summation(1.0, 8)
    assert tail == pytest.approx(1.1252e-6, rel=1e-3)
    assert tail > 1e-12
    with pytest.raises(TruncationError, match="mode h"):
        coherent_state(1.0, 1.0, 8, tail_tol=1e-12)


@pytest.mark.parametrize("tail_tol", [0.0, 1.0, -1e-3])
def test_tail_tol_domain(tail_tol):
    with pytest.raises(ValueError):
        coherent_state(1.0, 1.0, 20, tail_tol=tail_tol)


def test_cutoff_must_be_positive():
    with pytest.raises(ValueError):
        FockCutoff(0)


@given(amplitudes, amplitudes)
def test_coherent_state_normalized(a_h, a_v):
    state = coherent_state(a_h, a_v, 45)
    assert state.norm() == pytest.approx(1.0, abs=1e-12)


def test_auto_cutoff_is_minimal():
    cutoff = auto_cutoff([3.0, 0.5], tail_tol=1e-12)
    assert _poisson_tail_by_summation(9.0, cutoff.n_max) < 1e-12
    assert _poisson_tail_by_summation(9.0, cutoff.n_max - 1) >= 1e-12


def test_auto_cutoff_hard_max():
    with pytest.raises(TruncationError, match="hard maximum"):
        auto_cutoff(20.0, hard_max=255)


def test_states_are_immutable():
    state = coherent_state(1.0, 0.5, 20)
    with pytest.raises(ValueError):
        state.magnitudes[0, 0] = 0.0


# -- evolution ---------------------------------------------------------------


def test_zero_rates_leave_state_unchanged():
    state = coherent_state(1.2 + 0.3j, 0.7j, 30)
    after = kerr_evolve(state, KerrParams(0.0, 0.0, 0.0, 1.0))
    np.testing.assert_array_equal(after.amplitudes, state.amplitudes)


def test_basis_state_phase():
    state = fock_state(2, 3, 6)
    after = kerr_evolve(state, KerrParams(0.1, 0.2, 0.05, 1.0))
    # E = [0.1*2*1 + 0.2*3*2 + 2*0.05*2*3] / 2 = 1.0
    assert after.amplitudes[2, 3] == pytest.approx(np.exp(-1j * 1.0), abs=1e-15)


@given(amplitudes, amplitudes, kerr_params)
def test_evolution_is_unitary_and_number_conserving(a_h, a_v, params):
    state = coherent_state(a_h, a_v, 40)
    after = kerr_evolve(state, params)
    assert abs(after.norm() - state.norm()) <= 1e-14
    for before_marginal, after_marginal in zip(state.marginals(), after.marginals()):
        np.testing.assert_array_equal(before_marginal, after_marginal)


def _dense_oracle(a_h, a_v, params, n_max):
    """Independent dense-matrix route: displacement and Kerr propagators by expm."""
    d = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    eye = np.eye(d)
    ah, av = np.kron(a, eye), np.kron(eye, a)
    vac = np.zeros(d * d)
    vac[0] = 1
    gen = a_h * ah.conj().T - np.conj(a_h) * ah + a_v * av.conj().T - np.conj(a_v) * av
    psi = scipy.linalg.expm(gen) @ vac
    psi = psi / np.linalg.norm(psi)
    ahd, avd = ah.conj().T, av.conj().T
    ham = 0.5 * (params.gamma_h * ahd @ ahd @ ah @ ah + params.gamma_v * avd @ avd @ av @ av
                 + 2 * params.gamma * ahd @ ah @ avd @ av)
    psi = scipy.linalg.expm(-1j * params.t * ham) @ psi
    s2 = ahd @ av + avd @ ah
    s3 = 1j * (avd @ ah - ahd @ av)
    out = []
    for s in (s2, s3):
        mean = np.vdot(psi, s @ psi).real
        out.append((mean, np.vdot(psi, s @ s @ psi).real - mean**2))
    return out


def test_moments_match_dense_matrix_oracle():
    a_h, a_v = 1.1 * np.exp(0.4j), 0.6 * np.exp(-0.9j)
    params = KerrParams(0.17, -0.08, 0.05, 1.3)
    # dense expm needs a generous cutoff for the displacement to converge
    (m2, v2), (m3, v3) = _dense_oracle(a_h, a_v, params, n_max=24)
    moments = stokes_moments(kerr_evolve(coherent_state(a_h, a_v, 24), params))
    np.testing.assert_allclose([moments.mean[2], moments.variance[2]], [m2, v2], rtol=1e-9, atol=1e-11)
    np.testing.assert_allclose([moments.mean[3], moments.variance[3]], [m3, v3], rtol=1e-9, atol=1e-11)


# -- moments -----------------------------------------------------------------


def test_vacuum_moments():
    m = stokes_moments(coherent_state(0, 0, 10))
    np.testing.assert_array_equal(m.mean, 0)
    np.testing.assert_array_equal(m.variance, 0)


@given(amplitudes, amplitudes)
def test_coherent_variances_equal_total_photon_number(a_h, a_v):
    m = stokes_moments(coherent_state(a_h, a_v, 50))
    total = abs(a_h) ** 2 + abs(a_v) ** 2
    np.testing.assert_allclose(m.variance, total, atol=1e-10)


def test_no_seed_means_no_squeezing():
    state = kerr_evolve(coherent_state(2.0, 0.0, 40), KerrParams(0.05, 0.01, 0.02))
    m = stokes_moments(state)
    assert m.variance[2] == pytest.approx(4.0, abs=1e-8)
    assert m.variance[3] == pytest.approx(4.0, abs=1e-8)


@given(amplitudes, amplitudes, kerr_params)
def test_v0_v1_invariant_under_evolution(a_h, a_v, params):
    state = coherent_state(a_h, a_v, 45)
    before = stokes_moments(state)
    after = stokes_moments(kerr_evolve(state, params))
    np.testing.assert_allclose(after.variance[:2], before.variance[:2], rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(after.mean[:2], before.mean[:2], rtol=1e-10, atol=1e-10)


@given(amplitudes, amplitudes, kerr_params)
def test_uncertainty_triplet(a_h, a_v, params):
    m = stokes_moments(kerr_evolve(coherent_state(a_h, a_v, 45), params))
    rhs = (m.mean[3] ** 2, m.mean[1] ** 2, m.mean[2] ** 2)
    for slack, r in zip(m.uncertainty_residuals(), rhs):
        assert slack >= -1e-8 * max(r, 1.0)


@given(amplitudes, amplitudes, kerr_params)
def test_label_swap_symmetry(a_h, a_v, params):
    m = stokes_moments(kerr_evolve(coherent_state(a_h, a_v, 45), params))
    s = stokes_moments(kerr_evolve(coherent_state(a_v, a_h, 45), params.swapped()))
    np.testing.assert_allclose(s.mean * [1, -1, 1, -1], m.mean, atol=1e-9)
    np.testing.assert_allclose(s.variance, m.variance, atol=1e-9)


def test_boundary_warning():
    # cutoff meets a loose tail_tol but leaves real mass in the top shells
    state = coherent_state(2.0, 0.0, 10, tail_tol=1e-2)
    with pytest.warns(BoundaryWarning):
        stokes_moments(state)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        stokes_moments(coherent_state(2.0, 0.0, 40))


# -- S_theta -----------------------------------------------------------------


def test_stokes_theta_endpoints():
    state = kerr_evolve(coherent_state(1.5, 0.8 * np.exp(0.3j), 40), KerrParams(0.1, 0.02, 0.04))
    m = stokes_moments(state)
    assert stokes_theta(state, 0.0) == pytest.approx((m.mean[2], m.variance[2]), abs=1e-12)
    assert stokes_theta(state, math.pi / 2) == pytest.approx((m.mean[3], m.variance[3]), abs=1e-12)


def test_theta_scan_beats_both_axes():
    state = kerr_evolve(coherent_state(2.0, 0.7, 40), KerrParams(0.08, 0.01, 0.03))
    m = stokes_moments(state)
    scan = [stokes_theta(state, th)[1] for th in np.linspace(0, math.pi, 2001, endpoint=False)]
    assert min(scan) <= min(m.variance[2], m.variance[3]) + 1e-12
    # the covariance matters here: the scan strictly improves on the axes
    assert min(scan) < min(m.variance[2], m.variance[3]) - 1e-3


def test_theta_variance_matches_moment_formula():
    state = kerr_evolve(coherent_state(1.4, 0.9j, 40), KerrParams(0.12, -0.05, 0.02))
    m = stokes_moments(state)
    for th in np.linspace(0, math.pi, 7):
        assert stokes_theta(state, th)[1] == pytest.approx(m.variance_theta(th), abs=1e-10)


# -- explicit matrices ---------------------------------------------------------


def test_matrices_hermitian():
    for s in build_stokes_matrices(4):
        assert abs(s - s.conj().T).max() == 0


def test_commutator_small_cutoff():
    s0, s1, s2, s3 = build_stokes_matrices(2)
    comm = (s1 @ s2 - s2 @ s1 - 2j * s3).toarray()
    cols = total_photon_basis(2, 1)
    np.testing.assert_allclose(comm[:, cols], 0, atol=1e-14)


def test_commutator_fails_at_boundary():
    # truncation breaks the algebra only in the top shell
    s0, s1, s2, s3 = build_stokes_matrices(2)
    comm = (s2 @ s3 - s3 @ s2 - 2j * s1).toarray()
    assert np.abs(comm).max() > 1e-6


def test_s0_commutes_on_interior():
    mats = build_stokes_matrices(5)
    cols = total_photon_basis(5, 4)
    for s in mats[1:]:
        comm = (mats[0] @ s - s @ mats[0]).toarray()
        np.testing.assert_allclose(comm[:, cols], 0, atol=1e-12)


def test_matrices_agree_with_grid_moments():
    state = kerr_evolve(coherent_state(1.0, 0.6j, 12, tail_tol=1e-6), KerrParams(0.2, 0.1, -0.05))
    psi = state.amplitudes.ravel()
    m = stokes_moments(state)
    for k, s in enumerate(build_stokes_matrices(12)):
        assert np.vdot(psi, s @ psi).real == pytest.approx(m.mean[k], abs=1e-12)
        assert np.vdot(psi, s @ (s @ psi)).real == pytest.approx(m.second[k], abs=1e-10)


def test_matrices_need_n_max_two():
    with pytest.raises(ValueError):
        build_stokes_matrices(1)


def test_from_amplitudes_round_trip():
    amps = np.array([[0.6, 0.0], [0.0, 0.8j]])
    state = TwoModeState.from_amplitudes(amps)
    np.testing.assert_allclose(state.amplitudes, amps, atol=1e-16)
