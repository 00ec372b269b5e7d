"""Acceptance criteria AC1-AC12, one test each.

Every test prints a single ``ACn PASS`` or ``ACn FAIL`` line (visible with
``pytest -s`` or in the captured report) before asserting.
"""
import math
import time

import numpy as np
import pytest

from rotomode.atom import AtomConfig, StorageResult, absorb, stored_entanglement
from rotomode.fields import (
    Grid,
    detection_amplitude,
    estimate_pattern_rotation,
    estimate_polarization_rotation,
    polarization_ellipse,
    snapshot,
)
from rotomode.fock import Observable, closed_form_expectations, expect, inner, single_photon_state
from rotomode.interference import (
    dominant_frequency,
    hom_analytic,
    hom_bruteforce,
    make_gaussian_spectrum,
    wavepacket_amplitude,
    wavepacket_detection_amplitude,
)
from rotomode.modes import ModeBasis
from rotomode.protocols import (
    Bb84Config,
    SingletSpec,
    bb84_simulate,
    build_singlet,
    conditional_correlations,
    mub_overlap_matrix,
)
from rotomode.transforms import FAMILIES, build_pair, commutator, verify_unitary


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n{name} {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, f"{name}: {detail}"
    return emit


def test_ac1_closed_form_expectations(report):
    start = time.perf_counter()
    basis = ModeBasis()
    g = build_pair(basis, "g", 100.0, 1.0, s=1)
    h = build_pair(basis, "h", 100.0, 1.0, m=2, s=1)
    got, want = [], []
    for sign, mode in ((1, g.plus), (-1, g.minus)):
        st = single_photon_state(basis, mode)
        got += [expect(st, Observable.SZ), expect(st, Observable.ENERGY)]
        want += [-sign * 0.01, 100.0 - sign * 0.01]
    for sign, mode in ((1, h.plus), (-1, h.minus)):
        st = single_photon_state(basis, mode)
        got += [expect(st, Observable.LZ), expect(st, Observable.ENERGY)]
        want += [-sign * 0.04, 100.0 - sign * 0.04]
    closed = closed_form_expectations("h", 1, 100.0, 1.0, m=2, s=1)
    elapsed = time.perf_counter() - start
    err = float(np.max(np.abs(np.subtract(got, want))))
    ok = err < 1e-12 and elapsed < 1.0 and abs(closed["Lz"] + 0.04) < 1e-15
    report("AC1", ok, f"max_err={err:.2e} runtime={elapsed:.3f}s")


def test_ac2_zero_angular_momentum_families(report):
    omega, Omega = 100.0, 1.0
    worst = 0.0
    cases = {"b": {}, "c": {"m": 2}, "d": {"m": 2}, "e": {"m": 2, "Omega2": 0.7}, "f": {}}
    relevant = {"b": Observable.SZ, "c": Observable.LZ, "d": Observable.JZ, "e": Observable.JZ,
                "f": Observable.JZ}
    for family, kw in cases.items():
        basis = ModeBasis()
        for mode in build_pair(basis, family, omega, Omega, **kw):
            st = single_photon_state(basis, mode)
            worst = max(worst, abs(expect(st, relevant[family])), abs(expect(st, Observable.ENERGY) - omega))
    report("AC2", worst < 1e-12, f"max_err={worst:.2e}")


def test_ac3_unitarity_and_commutators(report):
    basis = ModeBasis()
    pairs = []
    for family in (f for f in FAMILIES if f != "a"):
        kw = {"m": 2} if family in "cdeh" else {}
        if family == "e":
            kw["Omega2"] = 0.7
        pairs.append(build_pair(basis, family, 100.0, 1.0, **kw))
    gram = max(verify_unitary(list(p)) for p in pairs)
    cross = max(abs(commutator(p.plus, p.minus)) for p in pairs)
    cross = max(cross, max(abs(commutator(p.minus, p.plus)) for p in pairs))
    ok = gram < 1e-12 and cross < 1e-12
    report("AC3", ok, f"gram_residual={gram:.2e} cross_commutator={cross:.2e}")


def _shift_residual(family, m, tau, omega, Omega):
    basis = ModeBasis()
    pair = build_pair(basis, family, omega, Omega, m=m)
    axis = Grid(129, 4.0).axis
    X, Y = np.meshgrid(axis, axis)
    phase = -1j * np.exp(-1j * omega * tau)
    worst = 0.0
    for a, b in ((pair.plus, pair.minus), (pair.minus, pair.plus)):
        for t in (0.0, 13.7):
            lhs = detection_amplitude(a, X, Y, t + tau)
            rhs = phase * detection_amplitude(b, X, Y, t)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def test_ac4_time_shift_identities(report):
    omega, Omega = 1.0, 0.01
    res_b = _shift_residual("b", None, math.pi / (2 * Omega), omega, Omega)
    res_c = max(_shift_residual("c", m, math.pi / (2 * m * Omega), omega, Omega) for m in (1, 2))
    ok = res_b < 1e-10 and res_c < 1e-10
    report("AC4", ok, f"b_residual={res_b:.2e} c_residual={res_c:.2e}")


def test_ac5_constant_shape_rotation(report):
    omega, Omega = 1.0, 0.01
    pair = build_pair(ModeBasis(), "g", omega, Omega, m=1)
    rng = np.random.default_rng(5)
    points = rng.uniform(-2.0, 2.0, size=(16, 2))
    times = np.linspace(0.0, 2 * math.pi / Omega, 33)
    worst = 0.0
    for mode, quantity in ((pair.plus, "E"), (pair.minus, "A")):
        for x, y in points:
            mags = np.array([np.linalg.norm(detection_amplitude(mode, x, y, t, quantity=quantity))
                             for t in times])
            worst = max(worst, np.ptp(mags) / mags.max())
    report("AC5", worst < 1e-10, f"max_relative_variation={worst:.2e}")


def test_ac6_counter_rotation(report):
    omega, Omega = 1.0, 0.01
    mode = build_pair(ModeBasis(), "f", omega, Omega).plus
    times = np.arange(6) * math.pi / 5 / Omega
    seq = [snapshot(mode, Grid(129, 4.0), t) for t in times]
    pattern = [estimate_pattern_rotation(seq, c) for c in ("x", "y")]
    steps = [estimate_pattern_rotation([a, b], "x") for a, b in zip(seq[:-1], seq[1:])]
    polar = [estimate_polarization_rotation(mode, p, times) for p in ((0.5, 0.3), (-0.8, 1.1))]
    pat_err = max(abs(r / Omega - 1) for r in pattern + steps)
    pol_err = max(abs(r / -Omega - 1) for r in polar)
    ok = pat_err < 0.01 and pol_err < 0.01
    report("AC6", ok, f"pattern_rate={pattern[0]:.6g} polarization_rate={polar[0]:.6g} "
                      f"rel_err=({pat_err:.1e}, {pol_err:.1e})")


def test_ac7_hong_ou_mandel(report):
    Omega = 0.01
    taus = np.linspace(0.0, 2 * math.pi / Omega, 64, endpoint=False)
    brute = hom_bruteforce(taus, Omega)
    closed = (1 - np.cos(Omega * taus) ** 2) / 2
    err = float(np.max(np.abs(brute - closed)))
    analytic_err = float(np.max(np.abs(hom_analytic(Omega, math.pi / 4, taus).coincidence - closed)))
    peak = dominant_frequency(taus, brute)
    ok = err < 1e-10 and analytic_err < 1e-10 and abs(peak / (2 * Omega) - 1) < 1e-9
    report("AC7", ok, f"max_err={err:.2e} dft_peak={peak:.6g} (2 Omega={2 * Omega:g})")


def _singlet_check(flavor, m, sign_obs, local_family):
    spec = SingletSpec(flavor, 100.0, 1.0, m=m)
    basis = ModeBasis()
    choices = spec.choices
    states = {c: build_singlet(basis, spec, c) for c in choices}
    ref = states[choices[0]]
    overlap_err = max(abs(abs(inner(ref, states[c])) - 1.0) for c in choices[1:])
    # both orbital photons share helicity s, so there the vanishing total is Lz
    jz = abs(expect(ref, Observable.JZ if flavor == "polarization" else Observable.LZ))
    energy = abs(expect(ref, Observable.ENERGY) - 200.0)
    cond_err, same_sense = 0.0, True
    for sign in (1, -1):
        local = spec.pair(basis, local_family, "A")
        local = local.plus if sign > 0 else local.minus
        rep = conditional_correlations(ref, spec, "A", local)
        remote = rep.remote_sz if sign_obs == "sz" else rep.remote_lz
        # the local photon carries -+Omega/omega, its partner the opposite
        cond_err = max(cond_err, abs(remote - sign * 0.01 * (m if flavor == "orbital" else 1)))
        same_sense &= rep.local_rotation * rep.remote_rotation > 0
    return max(overlap_err, jz, energy, cond_err), same_sense


def test_ac8_singlet_equivalence(report):
    pol_err, pol_sense = _singlet_check("polarization", 0, "sz", "g")
    orb_err, orb_sense = _singlet_check("orbital", 1, "lz", "h")
    ok = pol_err < 1e-12 and orb_err < 1e-12 and pol_sense and orb_sense
    report("AC8", ok, f"polarization_err={pol_err:.2e} orbital_err={orb_err:.2e} "
                      f"same_sense=({pol_sense}, {orb_sense})")


def test_ac9_qkd(report):
    start = time.perf_counter()
    mub = float(np.max(np.abs(mub_overlap_matrix(Bb84Config()) - 0.5)))
    eve = bb84_simulate(Bb84Config(trials=100_000, eavesdrop="intercept_resend", seed=2024))
    clean = bb84_simulate(Bb84Config(trials=100_000, seed=2024))
    elapsed = time.perf_counter() - start
    ok = (mub < 1e-12 and 0.24 <= eve.qber <= 0.26 and 0.49 <= eve.sifted_fraction <= 0.51
          and clean.qber == 0.0 and elapsed < 10.0)
    report("AC9", ok, f"mub_err={mub:.2e} qber={eve.qber:.4f} sifted={eve.sifted_fraction:.4f} "
                      f"clean_qber={clean.qber} runtime={elapsed:.2f}s")


def test_ac10_atom_storage(report):
    sp = make_gaussian_spectrum(100.0, 1.0)
    static = absorb(sp, 0.0, AtomConfig(100.3, 0.5))
    resonant = absorb(sp, 1.0, AtomConfig(100.0, 0.5))
    balance = abs(abs(resonant.c_plus) - abs(resonant.c_minus))
    h = math.sqrt(0.5)
    ends = (stored_entanglement(StorageResult(h, h, 0.0, 0.0, 1.0, 0.0)),
            stored_entanglement(StorageResult(h, h, 1.0, 0.0, 1.0, 0.0)))
    sweep = [stored_entanglement(StorageResult(resonant.c_plus, resonant.c_minus, ov, 0.0, 1.0, 0.0))
             for ov in np.linspace(0.0, 1.0, 20)]
    monotone = all(a > b for a, b in zip(sweep, sweep[1:]))
    ok = static.c_plus == static.c_minus and balance < 1e-10 and ends == (1.0, 0.0) and monotone
    report("AC10", ok, f"static_equal={static.c_plus == static.c_minus} balance={balance:.2e} "
                       f"endpoints={ends} monotone={monotone}")


def test_ac11_wavepackets(report):
    omega0, sigma, Omega = 100.0, 0.01, 1.0
    sp = make_gaussian_spectrum(omega0, sigma)
    parseval = max(abs(sp.spectral_norm() - 1.0), abs(sp.temporal_norm() - 1.0))
    half = sp.fwhm_duration / 2
    wide_enough = sp.fwhm_duration > 2 * math.pi / Omega
    t = np.linspace(-half, half, 401)
    rates = []
    for amp in (wavepacket_amplitude(sp, Omega, t),
                wavepacket_detection_amplitude(sp, Omega, t, point=(0.2, 0.1))):
        psi, _ = polarization_ellipse(amp[:, 0], amp[:, 1])
        rates.append(float(np.polyfit(t, np.unwrap(2 * psi) / 2, 1)[0]))
    rate_err = max(abs(r / Omega - 1) for r in rates)
    ok = parseval < 1e-8 and wide_enough and rate_err < 1e-3
    report("AC11", ok, f"parseval_err={parseval:.2e} fwhm={sp.fwhm_duration:.4g} "
                       f"rates={rates[0]:.8f},{rates[1]:.8f}")


def test_ac12_determinism(report, cli, tmp_path):
    runs = {
        "snapshot": ["snapshot", "--family", "f", "--omega", 1, "--Omega", 0.01, "--grid", 33],
        "hom": ["hom", "--Omega", 0.01],
        "qkd": ["qkd", "--trials", 20000, "--seed", 9, "--eavesdrop", "intercept_resend",
                "--eve-basis", "random"],
        "singlet": ["singlet"],
        "atom": ["atom", "--omega-A", 100.2],
        "expect": ["expect", "--family", "h", "--m", 2],
        "modes": ["modes-list", "--family", "g", "--format", "csv"],
    }
    mismatched = []
    for name, args in runs.items():
        blobs = []
        for rep in range(2):
            out = tmp_path / f"{name}{rep}"
            if name == "snapshot":
                proc = cli(*args, "--out-dir", out)
                blob = b"".join(p.read_bytes() for p in sorted(out.iterdir()))
            else:
                proc = cli(*args, "--out", out)
                blob = out.read_bytes()
            assert proc.returncode == 0, proc.stderr
            blobs.append(blob)
        if blobs[0] != blobs[1] or not blobs[0]:
            mismatched.append(name)
    report("AC12", not mismatched, f"commands={len(runs)} mismatched={mismatched}")
