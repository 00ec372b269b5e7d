"""Property-based checks of the physical invariants."""
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from rotomode.atom import AtomConfig, StorageResult, absorb, raman_amplitude, stored_entanglement
from rotomode.fields import circular_to_linear, detection_amplitude, linear_to_circular, mode_function
from rotomode.fock import Observable, annihilate, closed_form_expectations, expect, inner, single_photon_state
from rotomode.interference import hom_analytic, hom_bruteforce, make_gaussian_spectrum
from rotomode.modes import ModeBasis, ModeLabel, TransverseIndex, theta_weights
from rotomode.protocols import Bb84Config, SingletSpec, bb84_simulate, build_singlet
from rotomode.transforms import SuperpositionMode, build_b_pair, build_g_pair, build_pair, commutator, verify_unitary

settings.register_profile("physics", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("physics")

omegas = st.floats(0.5, 200.0)
ratios = st.floats(1e-3, 0.3)
helicities = st.sampled_from([1, -1])
orbitals = st.integers(-3, 3)


@st.composite
def family_pairs(draw):
    """(basis, pair, family, omega, Omega, m, s) for any buildable family."""
    family = draw(st.sampled_from("bcdefgh"))
    omega = draw(omegas)
    s = draw(helicities)
    m = draw(orbitals)
    # keep every frequency shift below 0.45 omega
    Omega = omega * draw(ratios) / (abs(m) + 1)
    Omega2 = omega * draw(ratios) / 2 if family == "e" else None
    assume(family not in "ch" or m != 0)
    assume(family != "d" or m + s != 0)
    assume(family != "e" or m * Omega + s * Omega2 != 0)
    basis = ModeBasis()
    pair = build_pair(basis, family, omega, Omega, m=m, s=s, Omega2=Omega2)
    return basis, pair, family, omega, Omega, pair.plus.labels[0].m, pair.plus.labels[0].s


@given(st.floats(0.01, 1e3), st.floats(-1.0, 1.0))
def test_theta_identities(omega, frac):
    # below ~1e-16 relative shift, omega +- delta rounds to omega
    assume(frac == 0 or abs(frac) > 1e-15)
    tw = theta_weights(omega, frac * omega)
    assert tw.cos_theta ** 2 + tw.sin_theta ** 2 == pytest.approx(1.0, abs=1e-14)
    assert tw.cos_theta ** 2 - tw.sin_theta ** 2 == pytest.approx(frac, abs=1e-14)
    assert (tw.cos_theta >= tw.sin_theta) == (frac >= 0)


@given(family_pairs())
def test_pairs_orthonormal_and_commute(data):
    basis, pair, *_ = data
    assert verify_unitary(list(pair)) < 1e-12
    for u in pair:
        for v in pair:
            assert abs(commutator(u, v) - (1.0 if u is v else 0.0)) < 1e-12


@given(family_pairs(), st.sampled_from([1, -1]))
def test_closed_form_expectations(data, sign):
    basis, pair, family, omega, Omega, m, s = data
    if family == "e":
        return
    mode = pair.plus if sign > 0 else pair.minus
    state = single_photon_state(basis, mode)
    closed = closed_form_expectations(family, sign, omega, Omega, m=m, s=s)
    scale = max(1.0, omega)
    assert expect(state, Observable.SZ) == pytest.approx(closed["Sz"], abs=1e-12)
    assert expect(state, Observable.LZ) == pytest.approx(closed["Lz"], abs=1e-12)
    assert expect(state, Observable.ENERGY) == pytest.approx(closed["E"], abs=1e-12 * scale)


@given(omegas, ratios, st.floats(0.0, 1.0))
def test_b_translation_closure(omega, ratio, phase_frac):
    Omega = omega * ratio
    b = build_b_pair(ModeBasis(), omega, Omega)
    tau = math.pi / (2 * Omega)
    phase = -1j * np.exp(-1j * math.pi * omega / (2 * Omega))
    np.testing.assert_allclose(b.plus.evolve(tau).coefficients, phase * b.minus.coefficients, atol=1e-12)
    t = phase_frac * 2 * math.pi / Omega
    ev = b.plus.evolve(t).coefficients
    # frequencies are keyed to 15 significant digits, so phase error grows like omega t 1e-14
    tol = 1e-12 + 1e-14 * omega * t
    assert abs(np.vdot(b.plus.coefficients, ev)) == pytest.approx(abs(math.cos(Omega * t)), abs=tol)
    assert abs(np.vdot(b.minus.coefficients, ev)) == pytest.approx(abs(math.sin(Omega * t)), abs=tol)


@given(family_pairs())
def test_inner_product_axioms(data):
    basis, pair, *_ = data
    other = build_pair(basis, "b", 1.0, 0.01)
    a = single_photon_state(basis, pair.plus)
    b = single_photon_state(basis, other.plus)
    assert inner(a, b) == pytest.approx(np.conj(inner(b, a)), abs=1e-15)
    assert inner(a, a).real == pytest.approx(1.0, abs=1e-12) and abs(inner(a, a).imag) < 1e-15


@given(family_pairs(), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_detection_probabilities_sum(data, a, b):
    basis, pair, *_ = data
    assume(abs(a) + abs(b) > 1e-3)
    terms = ((pair.plus.terms[0][0], a), (pair.plus.terms[1][0], b))
    state = single_photon_state(basis, SuperpositionMode(basis, terms, pair.plus.nominal_omega))
    total = sum(annihilate(state, mode).norm ** 2 for mode in pair)
    assert total == pytest.approx(1.0, abs=1e-12)


@given(omegas, ratios, st.floats(-2, 2), st.floats(-2, 2), helicities, st.integers(0, 3))
def test_constant_shape_rotation(omega, ratio, x, y, s, m):
    Omega = omega * ratio
    pair = build_g_pair(ModeBasis(), omega, Omega, m=m, s=s)
    times = np.linspace(0, 2 * math.pi / Omega, 16, endpoint=False)
    e_plus = np.array([np.linalg.norm(detection_amplitude(pair.plus, x, y, t)) for t in times])
    a_minus = np.array([np.linalg.norm(detection_amplitude(pair.minus, x, y, t, quantity="A")) for t in times])
    for mag in (e_plus, a_minus):
        if mag.max() > 1e-200:
            assert np.ptp(mag) < 1e-10 * mag.max()


@given(st.integers(-5, 5), st.floats(0.0, 6.0), st.integers(0, 2))
def test_profile_depends_on_abs_m(m, rho, nT):
    for tr in (TransverseIndex.laguerre_gauss(nT, 1.2), TransverseIndex.bessel(0.05)):
        assert mode_function(ModeLabel(1.0, m, 1, tr), rho) == mode_function(ModeLabel(2.0, -m, -1, tr), rho)


@given(st.complex_numbers(max_magnitude=1e3), st.complex_numbers(max_magnitude=1e3))
def test_circular_linear_inverse(ex, ey):
    circ = linear_to_circular(ex, ey)
    back = circular_to_linear(circ[0], circ[1])
    assert back[0] == pytest.approx(ex, abs=1e-12 * (1 + abs(ex)))
    assert back[1] == pytest.approx(ey, abs=1e-12 * (1 + abs(ey)))


@given(st.floats(0.0, 1.0), st.floats(1e-3, 0.1))
def test_hom_bruteforce_matches_closed_form(frac, Omega):
    tau = frac * 2 * math.pi / Omega
    expected = hom_analytic(Omega, math.pi / 4, tau).coincidence
    assert hom_bruteforce(tau, Omega) == pytest.approx(float(expected), abs=1e-10)


@settings(max_examples=15)
@given(st.floats(5.0, 200.0), st.floats(1e-3, 0.2), st.sampled_from(["polarization", "orbital"]))
def test_singlet_basis_invariance(omega, ratio, flavor):
    spec = SingletSpec(flavor, omega, omega * ratio)
    basis = ModeBasis()
    states = [build_singlet(basis, spec, c) for c in spec.choices]
    for other in states[1:]:
        assert abs(inner(states[0], other)) == pytest.approx(1.0, abs=1e-12)
    assert expect(states[0], Observable.ENERGY) == pytest.approx(2 * omega, abs=1e-12 * omega)


@given(st.floats(0.0, 1.0), st.floats(0.0, 2 * math.pi))
def test_entropy_bounds_and_monotone(weight, phase):
    cp = math.sqrt(weight)
    cm = math.sqrt(1 - weight) * complex(math.cos(phase), math.sin(phase))
    ent = [stored_entanglement(StorageResult(cp, cm, ov, 0.0, 1.0, 0.0)) for ov in np.linspace(0, 1, 20)]
    assert all(0.0 <= e <= 1.0 for e in ent)
    assert all(a >= b for a, b in zip(ent, ent[1:]))
    assert ent[-1] == 0.0


@given(st.floats(-3.0, 3.0), st.floats(0.05, 2.0), st.floats(0.1, 2.0), st.floats(-5.0, 5.0))
def test_absorption_ratio_and_position(detuning, gamma, Omega, dz):
    cfg = AtomConfig(100.0 + detuning, gamma)
    sp = make_gaussian_spectrum(100.0, 1.0)
    r0 = absorb(sp, Omega, cfg)
    r1 = absorb(sp, Omega, AtomConfig(100.0 + detuning, gamma, z_prime=dz))
    ratio = abs(raman_amplitude(100.0 + Omega, cfg)) / abs(raman_amplitude(100.0 - Omega, cfg))
    assert abs(r0.c_plus) / abs(r0.c_minus) == pytest.approx(ratio, rel=1e-10)
    assert abs(r1.c_plus) == pytest.approx(abs(r0.c_plus), rel=1e-12)


@settings(max_examples=20)
@given(st.integers(0, 2 ** 32 - 1))
def test_bb84_without_eavesdropper_is_error_free(seed):
    assert bb84_simulate(Bb84Config(trials=500, seed=seed)).qber == 0.0


@given(st.floats(1.0, 1e3), st.floats(1e-3, 0.19))
def test_gaussian_parseval(omega0, frac):
    sp = make_gaussian_spectrum(omega0, frac * omega0)
    assert sp.spectral_norm() == pytest.approx(1.0, abs=1e-8)
    assert sp.temporal_norm() == pytest.approx(1.0, abs=1e-8)
