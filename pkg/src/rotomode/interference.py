"""Wavepackets of rotating photons and Hong-Ou-Mandel interference.

Spectral amplitudes use the convention

    F~(t) = (2 pi)^(-1/2) int F(w) exp(-i w t) dw,   int |F|^2 dw = int |F~|^2 dt = 1.

The HOM simulation is done twice: in closed form (the standard dip multiplied
by the rotation modulation factor cos^2(Omega tau)) and by brute force on the
two-photon Fock state sent through a 50/50 beam splitter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import trapezoid

from .errors import SupportCrossesZero
from .fields import detection_amplitude
from .fock import FockState, apply_creation, site_photon_counts, transform_modes, vacuum
from .modes import ModeBasis
from .transforms import ModePair, SuperpositionMode, build_g_pair, build_pair

GAUSS_HERMITE_NODES = 96
TRAPEZOID_POINTS = 2048


class SpectralAmplitude:
    """Normalized spectral envelope F(w) and its time-domain transform."""

    omega0: float

    def spectral(self, omega):
        raise NotImplementedError

    def temporal(self, t):
        raise NotImplementedError

    def spectral_norm(self) -> float:
        raise NotImplementedError

    def temporal_norm(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianSpectrum(SpectralAmplitude):
    """|F(w)|^2 is a normal density with mean ``omega0`` and rms width ``sigma``."""

    omega0: float
    sigma: float

    def spectral(self, omega):
        omega = np.asarray(omega, dtype=float)
        return ((2.0 * np.pi * self.sigma ** 2) ** -0.25
                * np.exp(-((omega - self.omega0) ** 2) / (4.0 * self.sigma ** 2))).astype(complex)

    def temporal(self, t):
        t = np.asarray(t, dtype=float)
        return ((2.0 * self.sigma ** 2 / np.pi) ** 0.25 * np.exp(-(self.sigma * t) ** 2)
                * np.exp(-1j * self.omega0 * t))

    def _hermite(self, fn, center, scale):
        # int fn(u) du with u = center + scale x, weight exp(-x^2) divided back out
        x, w = np.polynomial.hermite.hermgauss(GAUSS_HERMITE_NODES)
        u = center + scale * x
        return float(np.sum(w * np.exp(x * x) * fn(u)) * scale)

    def spectral_norm(self) -> float:
        return self._hermite(lambda w: np.abs(self.spectral(w)) ** 2,
                             self.omega0, math.sqrt(2.0) * self.sigma)

    def temporal_norm(self) -> float:
        return self._hermite(lambda t: np.abs(self.temporal(t)) ** 2,
                             0.0, 1.0 / (math.sqrt(2.0) * self.sigma))

    @property
    def temporal_rms(self) -> float:
        return 1.0 / (2.0 * self.sigma)

    @property
    def fwhm_duration(self) -> float:
        """Full width at half maximum of |F~(t)|^2."""
        return 2.0 * math.sqrt(2.0 * math.log(2.0)) * self.temporal_rms

    def rotation_visible(self, Omega: float) -> bool:
        """True when the packet lasts longer than one full rotation period."""
        return self.fwhm_duration > 2.0 * math.pi / abs(Omega)

    def quadrature(self, n: int = GAUSS_HERMITE_NODES):
        """Nodes and weights for int F(w) g(w) dw (the F factor is folded into the weights)."""
        x, w = np.polynomial.hermite.hermgauss(n)
        scale = 2.0 * self.sigma
        omegas = self.omega0 + scale * x
        weights = w * np.exp(x * x) * self.spectral(omegas) * scale
        return omegas, weights


class SampledSpectrum(SpectralAmplitude):
    """Spectrum given on a uniform frequency grid; normalized on construction."""

    def __init__(self, omegas, values):
        omegas = np.asarray(omegas, dtype=float)
        values = np.asarray(values, dtype=complex)
        if omegas.ndim != 1 or omegas.shape != values.shape or len(omegas) < 3:
            raise ValueError("need matching 1-D arrays of at least 3 samples")
        if np.any(omegas <= 0):
            raise SupportCrossesZero("sampled spectrum must have positive support")
        if len(omegas) < TRAPEZOID_POINTS:
            fine = np.linspace(omegas[0], omegas[-1], TRAPEZOID_POINTS)
            values = np.interp(fine, omegas, values.real) + 1j * np.interp(fine, omegas, values.imag)
            omegas = fine
        if not np.allclose(np.diff(omegas), omegas[1] - omegas[0], rtol=1e-9, atol=0):
            raise ValueError("sampled spectrum must be on a uniform grid")
        self.omegas = omegas
        self.dw = omegas[1] - omegas[0]
        norm = math.sqrt(trapezoid(np.abs(values) ** 2, dx=self.dw))
        if norm == 0:
            raise ValueError("spectrum is identically zero")
        self.values = values / norm
        weights = np.abs(self.values) ** 2
        self.omega0 = float(np.sum(omegas * weights) / np.sum(weights))

    def spectral(self, omega):
        omega = np.asarray(omega, dtype=float)
        re = np.interp(omega, self.omegas, self.values.real, left=0.0, right=0.0)
        im = np.interp(omega, self.omegas, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im

    def _weights(self):
        w = np.full(len(self.omegas), self.dw)
        w[0] = w[-1] = 0.5 * self.dw
        return w

    def temporal(self, t):
        t = np.asarray(t, dtype=float)
        phase = np.exp(-1j * np.multiply.outer(t, self.omegas))
        return phase @ (self.values * self._weights()) / math.sqrt(2.0 * math.pi)

    def spectral_norm(self) -> float:
        return float(trapezoid(np.abs(self.values) ** 2, dx=self.dw))

    def temporal_norm(self) -> float:
        # F~ is periodic with period 2 pi / dw; integrate one period
        n = len(self.omegas)
        period = 2.0 * math.pi / self.dw
        t = -0.5 * period + period * np.arange(n) / n
        return float(np.sum(np.abs(self.temporal(t)) ** 2) * period / n)

    def quadrature(self, n: Optional[int] = None):
        return self.omegas, self.values * self._weights()


def make_gaussian_spectrum(omega0: float, sigma: float) -> GaussianSpectrum:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not omega0 - 5.0 * sigma > 0:
        raise SupportCrossesZero(
            f"omega0 - 5 sigma = {omega0 - 5.0 * sigma} leaves the positive axis")
    return GaussianSpectrum(float(omega0), float(sigma))


def wavepacket_amplitude(spectrum: SpectralAmplitude, Omega: float, t) -> np.ndarray:
    """Closed-form packet field F~(t) (cos Omega t, sin Omega t) of a g+ wavepacket."""
    t = np.asarray(t, dtype=float)
    env = spectrum.temporal(t)
    return np.stack([env * np.cos(Omega * t), env * np.sin(Omega * t)], axis=-1)


def wavepacket_detection_amplitude(spectrum: SpectralAmplitude, Omega: float, t,
                                   point=(0.0, 0.0), m: int = 0, s: int = 1) -> np.ndarray:
    """Packet field by explicit superposition of g+ modes: int dw F(w) E^g_{+,w}(t).

    Each frequency node gets its own g+ pair, so the result includes the exact
    sqrt(w) weights rather than the narrow-band closed form.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    omegas, weights = spectrum.quadrature()
    basis = ModeBasis()
    out = np.zeros(t.shape + (2,), dtype=complex)
    for w_node, q in zip(omegas, weights):
        if q == 0:
            continue
        g_plus = build_g_pair(basis, float(w_node), Omega, m=m, s=s).plus
        for j, tj in enumerate(t):
            out[j] += q * detection_amplitude(g_plus, point[0], point[1], tj)
    return out


# -- Hong-Ou-Mandel ------------------------------------------------------------

@dataclass(frozen=True)
class HomResult:
    tau: np.ndarray
    modulation: np.ndarray
    polarization_overlap: np.ndarray
    envelope_overlap: float
    coincidence: np.ndarray


def hom_analytic(Omega: float, theta: float, tau, envelope_overlap: float = 1.0) -> HomResult:
    """Closed-form HOM coincidence probability for two b+ photons delayed by ``tau``.

    ``modulation`` is cos^2(Omega tau); ``polarization_overlap`` is the overlap
    |e(t) . e*(t + tau)|^2 of the two time-dependent polarization vectors, which
    equals the modulation factor only for theta = pi/4.
    """
    if not 0.0 <= envelope_overlap <= 1.0:
        raise ValueError("envelope_overlap must lie in [0, 1]")
    tau = np.asarray(tau, dtype=float)
    modulation = 0.5 + 0.5 * np.cos(2.0 * Omega * tau)
    s2, c2 = math.sin(theta) ** 2, math.cos(theta) ** 2
    pol = s2 * s2 + c2 * c2 + 2.0 * s2 * c2 * np.cos(2.0 * Omega * tau)
    coincidence = 0.5 * (1.0 - modulation * envelope_overlap)
    return HomResult(tau, modulation, pol, float(envelope_overlap), coincidence)


def beam_splitter(state: FockState, port_a: str = "A", port_b: str = "B") -> FockState:
    """Symmetric 50/50 beam splitter acting identically on every monochromatic mode.

    a_A^dagger -> (a_A^dagger + i a_B^dagger)/sqrt 2,  a_B^dagger -> (i a_A^dagger + a_B^dagger)/sqrt 2.
    Mode labels present on one port only get their partner registered.
    """
    basis = state.basis
    r = 1.0 / math.sqrt(2.0)
    images = {}
    for k in range(len(basis)):
        lab = basis[k]
        if lab.site == port_a:
            other = basis.register(lab.with_(site=port_b))
            images[k] = SuperpositionMode(basis, ((k, r + 0j), (other, 1j * r)), lab.omega)
        elif lab.site == port_b:
            other = basis.register(lab.with_(site=port_a))
            images[k] = SuperpositionMode(basis, ((other, 1j * r), (k, r + 0j)), lab.omega)
    return transform_modes(state, images.get)


def coincidence_probability(state: FockState, port_a: str = "A", port_b: str = "B") -> float:
    """Probability of one photon in each output port."""
    total = 0.0
    for occ, amp in state.items():
        counts = site_photon_counts(occ, state.basis)
        if counts.get(port_a, 0) == 1 and counts.get(port_b, 0) == 1:
            total += abs(amp) ** 2
    return total


PairFactory = Callable[[ModeBasis, str], ModePair]


def hom_bruteforce(tau, Omega: float, omega: float = 1.0, family: str = "b", m=None, s: int = 1,
                   pair_factory: Optional[PairFactory] = None) -> np.ndarray:
    """Coincidence probability from the explicit two-photon state (CW limit).

    One '+' photon enters port A, a second '+' photon delayed by ``tau`` (free
    evolution of its mode function) enters port B.  ``pair_factory(basis, site)``
    overrides the family builder.
    """
    if pair_factory is None:
        def pair_factory(basis, site):
            return build_pair(basis, family, omega, Omega, m=m, s=s, site=site)

    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty(taus.shape)
    for j, tj in enumerate(taus):
        basis = ModeBasis()
        first = pair_factory(basis, "A").plus
        second = pair_factory(basis, "B").plus.evolve(tj)
        state = apply_creation(apply_creation(vacuum(basis, 2), first), second)
        out[j] = coincidence_probability(beam_splitter(state))
    return out if np.ndim(tau) else out[0]


def dominant_frequency(times, values) -> float:
    """Angular frequency of the strongest non-DC Fourier component of uniform samples."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    spec = np.abs(np.fft.rfft(values - values.mean()))
    k = int(np.argmax(spec[1:])) + 1
    dt = times[1] - times[0]
    return 2.0 * math.pi * k / (len(values) * dt)
