"""Two-photon rotating singlets and rotating-basis BB84."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .fields import default_grid, estimate_pattern_rotation, estimate_polarization_rotation, snapshot
from .fock import (
    FockState,
    Observable,
    apply_creation,
    as_mode,
    expect,
    inner,
    project_mode,
    single_photon_state,
    vacuum,
)
from .modes import DEFAULT_TRANSVERSE, ModeBasis
from .transforms import ModePair, SuperpositionMode, build_pair, single_mode

POLARIZATION = "polarization"
ORBITAL = "orbital"
_CHOICES = {POLARIZATION: ("g", "b", "a"), ORBITAL: ("h", "c", "a")}


@dataclass(frozen=True)
class SingletSpec:
    flavor: str = POLARIZATION
    omega: float = 1.0
    Omega: float = 0.01
    m: Optional[int] = None
    s: int = 1
    transverse: object = DEFAULT_TRANSVERSE

    def __post_init__(self):
        if self.flavor not in _CHOICES:
            raise ValueError(f"flavor must be one of {tuple(_CHOICES)}, got {self.flavor!r}")
        if self.m is None:
            object.__setattr__(self, "m", 0 if self.flavor == POLARIZATION else 1)

    @property
    def choices(self) -> tuple:
        return _CHOICES[self.flavor]

    def pair(self, basis: ModeBasis, choice: str, site: str) -> ModePair:
        """The (plus, minus) mode pair at ``site`` for a given basis choice.

        Choice ``"a"`` yields the two underlying monochromatic modes, in the
        order (higher frequency, lower frequency).
        """
        if choice not in self.choices:
            raise ValueError(f"basis choice for {self.flavor} must be one of {self.choices}")
        family = choice if choice != "a" else ("b" if self.flavor == POLARIZATION else "c")
        pair = build_pair(basis, family, self.omega, self.Omega, m=self.m, s=self.s,
                          site=site, transverse=self.transverse)
        if choice != "a":
            return pair
        first, second = pair.plus.labels
        return ModePair(single_mode(basis, first), single_mode(basis, second))


def antisymmetric_state(basis: ModeBasis, pair_a: ModePair, pair_b: ModePair,
                        n_max: int = 2) -> FockState:
    """(p_A^dag m_B^dag - m_A^dag p_B^dag)/sqrt 2 |vac>, normalized."""
    vac = vacuum(basis, n_max)
    first = apply_creation(apply_creation(vac, pair_a.plus), pair_b.minus)
    second = apply_creation(apply_creation(vac, pair_a.minus), pair_b.plus)
    return ((first - second) / math.sqrt(2.0)).normalized()


def build_singlet(basis: ModeBasis, spec: SingletSpec, basis_choice: str,
                  n_max: int = 2) -> FockState:
    """Rotating singlet written in one of three bases (g/b/a or h/c/a).

    All three choices give the same physical state up to a global phase.
    """
    return antisymmetric_state(basis, spec.pair(basis, basis_choice, "A"),
                               spec.pair(basis, basis_choice, "B"), n_max)


@dataclass(frozen=True)
class CorrelationReport:
    probability: float
    remote_state: FockState
    remote_sz: float
    remote_lz: float
    remote_jz: float
    remote_energy: float
    local_rotation: Optional[float]
    remote_rotation: Optional[float]


def _rotation_rate(mode: SuperpositionMode, flavor: str, Omega: float) -> float:
    times = np.arange(6) * math.pi / (5.0 * Omega)
    if flavor == POLARIZATION:
        scale = mode.basis[mode.terms[0][0]].transverse.length_scale
        return estimate_polarization_rotation(mode, (0.5 * scale, 0.3 * scale), times)
    grid = default_grid(mode, 97)
    snaps = [snapshot(mode, grid, t) for t in times]
    return estimate_pattern_rotation(snaps, "intensity")


def conditional_correlations(singlet: FockState, spec: SingletSpec, site: str,
                             mode: SuperpositionMode) -> CorrelationReport:
    """Detect one photon of the singlet in ``mode`` at ``site`` and describe the other photon.

    Rotation rates (polarization orientation for the polarization flavor,
    intensity pattern for the orbital flavor) are estimated for rotating modes
    only; a monochromatic detection mode reports ``None``.
    """
    if mode.labels[0].site != site:
        raise ValueError(f"detection mode does not live at site {site}")
    p, remote = project_mode(singlet, mode)
    remote_mode = as_mode(remote, tol=1e-14)
    rotating = mode.family not in (None, "a")
    local_rate = _rotation_rate(mode, spec.flavor, spec.Omega) if rotating else None
    remote_rate = _rotation_rate(remote_mode, spec.flavor, spec.Omega) if rotating else None
    return CorrelationReport(
        probability=p,
        remote_state=remote,
        remote_sz=expect(remote, Observable.SZ),
        remote_lz=expect(remote, Observable.LZ),
        remote_jz=expect(remote, Observable.JZ),
        remote_energy=expect(remote, Observable.ENERGY),
        local_rotation=local_rate,
        remote_rotation=remote_rate,
    )


# -- BB84 ----------------------------------------------------------------------

EAVESDROP = ("none", "intercept_resend")


@dataclass(frozen=True)
class Bb84Config:
    """basis 1 = {b+, b-} (rotating), basis 2 = {a[w+O,+], a[w-O,-]} (frequency eigenmodes)."""

    omega: float = 1.0
    Omega: float = 0.01
    m: int = 0
    trials: int = 10_000
    eavesdrop: str = "none"
    eve_basis: object = 1  # 1, 2 or "random"
    seed: int = 0

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials}")
        if self.eavesdrop not in EAVESDROP:
            raise ValueError(f"eavesdrop must be one of {EAVESDROP}, got {self.eavesdrop!r}")
        if self.eve_basis not in (1, 2, "random"):
            raise ValueError(f"eve_basis must be 1, 2 or 'random', got {self.eve_basis!r}")


def bb84_bases(config: Bb84Config) -> Tuple[ModeBasis, List[SuperpositionMode], List[SuperpositionMode]]:
    basis = ModeBasis()
    b = build_pair(basis, "b", config.omega, config.Omega, m=config.m, s=1)
    first, second = b.plus.labels
    return basis, [b.plus, b.minus], [single_mode(basis, first), single_mode(basis, second)]


def overlap_matrix(basis: ModeBasis, xs, ys) -> np.ndarray:
    """|<x_i|y_j>|^2 between single-photon states in the modes xs and ys."""
    sx = [single_photon_state(basis, x) for x in xs]
    sy = [single_photon_state(basis, y) for y in ys]
    return np.array([[abs(inner(a, b)) ** 2 for b in sy] for a in sx])


def mub_overlap_matrix(config: Bb84Config) -> np.ndarray:
    basis, one, two = bb84_bases(config)
    return overlap_matrix(basis, one, two)


@dataclass(frozen=True)
class Bb84Stats:
    trials: int
    sifted: int
    errors: int
    sifted_fraction: float
    qber: float


def _outcome0_table(config: Bb84Config) -> np.ndarray:
    """P(outcome 0 | prepared state, measurement basis); states indexed basis*2 + bit."""
    basis, one, two = bb84_bases(config)
    states = one + two
    table = np.empty((4, 2))
    for k, prepared in enumerate(states):
        for mb, meas in enumerate((one, two)):
            p = overlap_matrix(basis, meas, [prepared])[:, 0]
            p = np.clip(p, 0.0, None)
            table[k, mb] = p[0] / p.sum()
    return table


def bb84_simulate(config: Bb84Config) -> Bb84Stats:
    """Monte-Carlo prepare-and-measure run; deterministic for a fixed seed.

    Outcome probabilities come from the single-photon overlaps of the actual
    basis modes, so the statistics follow from the mode algebra.
    """
    table = _outcome0_table(config)
    rng = np.random.default_rng(config.seed)
    n = int(config.trials)
    alice_bits = rng.integers(0, 2, n)
    alice_basis = rng.integers(0, 2, n)
    bob_basis = rng.integers(0, 2, n)
    state = alice_basis * 2 + alice_bits
    if config.eavesdrop == "intercept_resend":
        if config.eve_basis == "random":
            eve_basis = rng.integers(0, 2, n)
        else:
            eve_basis = np.full(n, int(config.eve_basis) - 1)
        eve_bits = (rng.random(n) >= table[state, eve_basis]).astype(int)
        state = eve_basis * 2 + eve_bits
    bob_bits = (rng.random(n) >= table[state, bob_basis]).astype(int)
    sifted = alice_basis == bob_basis
    n_sifted = int(np.count_nonzero(sifted))
    errors = int(np.count_nonzero(sifted & (bob_bits != alice_bits)))
    return Bb84Stats(
        trials=n,
        sifted=n_sifted,
        errors=errors,
        sifted_fraction=n_sifted / n,
        qber=errors / n_sifted if n_sifted else 0.0,
    )


@dataclass(frozen=True)
class ComplementarityReport:
    frequency_resolution: float
    timing_resolution: float
    basis2_frequency_gap: float
    b_time_shift: float
    b_shift_residual: float


def measurement_complementarity(config: Bb84Config) -> ComplementarityReport:
    """Resolution needed to tell the states of each basis apart.

    Basis 2 needs a frequency measurement finer than Omega (its states sit 2 Omega
    apart); basis 1 needs timing finer than pi/(4 Omega), since b- is b+ delayed by
    pi/(2 Omega) up to a fixed phase.
    """
    basis, one, two = bb84_bases(config)
    O, w = config.Omega, config.omega
    shift = math.pi / (2.0 * O)
    phase = -1j * np.exp(-1j * math.pi * w / (2.0 * O))
    residual = float(np.max(np.abs(one[0].evolve(shift).coefficients - phase * one[1].coefficients)))
    gap = abs(two[0].labels[0].omega - two[1].labels[0].omega)
    return ComplementarityReport(
        frequency_resolution=O,
        timing_resolution=math.pi / (4.0 * O),
        basis2_frequency_gap=gap,
        b_time_shift=shift,
        b_shift_residual=residual,
    )
