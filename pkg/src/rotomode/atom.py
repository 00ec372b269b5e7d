"""Storage of a rotating-polarization photon in a single atom.

A photon in a g+ wavepacket carries equal sigma+/sigma- field amplitudes at the
frequencies w0 + Omega and w0 - Omega.  A stimulated Raman transition from
|m_A = 0> to |m_A = +-1> absorbs them with amplitude

    P(w) = 1 / (w - w_A - i Gamma),

and, when the atomic motion is quantized, also shifts the motional state to
|E +- Omega>.  We model those motional states as Gaussians in energy of width
``motional_sigma``; their overlap decides how entangled the internal and
external degrees of freedom end up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroAbsorption
from .interference import SpectralAmplitude

ZERO_TOL = 1e-300


@dataclass(frozen=True)
class AtomConfig:
    omega_A: float
    gamma: float
    z_prime: float = 0.0
    p0: float = 0.0
    motional_sigma: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0.0 <= self.p0 < 1.0:
            raise ValueError(f"p0 must lie in [0, 1), got {self.p0}")
        if not self.motional_sigma > 0:
            raise ValueError(f"motional_sigma must be positive, got {self.motional_sigma}")


@dataclass(frozen=True)
class StorageResult:
    c_plus: complex
    c_minus: complex
    motional_overlap: float
    entanglement_entropy: float
    absorbed_weight: float  # squared norm of the absorbed branch before renormalization
    p0: float


def raman_amplitude(omega, config: AtomConfig):
    return 1.0 / (np.asarray(omega, dtype=float) - config.omega_A - 1j * config.gamma)


def motional_overlap(Omega: float, config: AtomConfig) -> float:
    """<E - Omega|E + Omega> for Gaussian motional states of energy width sigma_E."""
    return math.exp(-Omega ** 2 / (2.0 * config.motional_sigma ** 2))


def internal_density_matrix(c_plus: complex, c_minus: complex, overlap: complex) -> np.ndarray:
    """Reduced 2x2 state of |+1>, |-1> after tracing out the motional states."""
    return np.array([[abs(c_plus) ** 2, c_plus * np.conj(c_minus) * overlap],
                     [c_minus * np.conj(c_plus) * np.conj(overlap), abs(c_minus) ** 2]])


def von_neumann_entropy(rho: np.ndarray) -> float:
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-15]
    return float(max(0.0, -np.sum(evals * np.log2(evals))))


def _internal_entropy(c_plus: complex, c_minus: complex, overlap: complex) -> float:
    # eigenvalues of the 2x2 reduced state from its trace and determinant
    a, d = abs(c_plus) ** 2, abs(c_minus) ** 2
    trace = a + d
    det = a * d * (1.0 - abs(overlap) ** 2)
    disc = max(0.0, 1.0 - 4.0 * det / trace ** 2)
    lam = 0.5 * (1.0 - math.sqrt(disc))
    if lam <= 0.0:
        return 0.0
    return float(-lam * math.log2(lam) - (1.0 - lam) * math.log2(1.0 - lam))


def stored_entanglement(result: StorageResult) -> float:
    """Von Neumann entropy (bits) of the internal state; 1 bit is maximal."""
    return _internal_entropy(result.c_plus, result.c_minus, result.motional_overlap)


def absorb(spectrum: SpectralAmplitude, Omega: float, config: AtomConfig) -> StorageResult:
    """Internal-state amplitudes after absorbing a g+ wavepacket centred at ``spectrum.omega0``.

    The time integral over the packet reduces to the spectral amplitude at the two
    shifted frequencies, so

        c+- ~ P(w0 +- Omega) F(w0 +- Omega) exp(+-i Omega z'/c)

    up to a common phase.  The absorbed branch is renormalized; ``p0`` is carried
    along unchanged.  The magnitudes do not depend on the atom position z'.
    """
    w0 = spectrum.omega0
    phase = Omega * config.z_prime / config.c
    amp_plus = complex(raman_amplitude(w0 + Omega, config) * spectrum.spectral(w0 + Omega)) \
        * complex(np.exp(1j * phase))
    amp_minus = complex(raman_amplitude(w0 - Omega, config) * spectrum.spectral(w0 - Omega)) \
        * complex(np.exp(-1j * phase))
    weight = abs(amp_plus) ** 2 + abs(amp_minus) ** 2
    if weight <= ZERO_TOL:
        raise ZeroAbsorption("neither sigma+ nor sigma- component is absorbed")
    norm = math.sqrt(weight)
    c_plus, c_minus = amp_plus / norm, amp_minus / norm
    overlap = motional_overlap(Omega, config)
    entropy = _internal_entropy(c_plus, c_minus, overlap)
    return StorageResult(c_plus, c_minus, overlap, entropy, weight, config.p0)
