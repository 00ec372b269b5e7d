"""Truncated bosonic Fock space over a mode registry.

States are sparse maps from occupation configurations to amplitudes.  A
configuration is a sorted tuple of ``(registry index, photon count)`` pairs with
nonzero counts, so the vacuum is ``()``.  Only configurations with at most
``n_max`` photons are representable.

Reductions iterate over configurations in sorted order, so sums are bit-stable
regardless of how a state was assembled.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from .errors import BasisMismatch, TruncationOverflow, UnnormalizedState, ZeroProbabilityBranch
from .modes import ModeBasis, ModeLabel
from .transforms import SuperpositionMode

Occupation = Tuple[Tuple[int, int], ...]

NORM_TOL = 1e-10
ZERO_BRANCH_TOL = 1e-24


class Observable(enum.Enum):
    """Diagonal single-particle observables and their per-mode eigenvalues."""

    ENERGY = "energy"
    SZ = "sz"
    LZ = "lz"
    JZ = "jz"
    NUMBER = "number"

    def eigenvalue(self, label: ModeLabel) -> float:
        if self is Observable.ENERGY:
            return label.omega
        if self is Observable.SZ:
            return float(label.s)
        if self is Observable.LZ:
            return float(label.m)
        if self is Observable.JZ:
            return float(label.m + label.s)
        return 1.0


@dataclass(frozen=True)
class FockState:
    basis: ModeBasis = field(repr=False, compare=False)
    amplitudes: Mapping[Occupation, complex]
    n_max: int = 2
    # norm before the last renormalization (1.0 when no renormalization happened)
    prenorm: float = field(default=1.0, compare=False)

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def norm(self) -> float:
        return math.sqrt(math.fsum(abs(a) ** 2 for _, a in self.items()))

    def items(self):
        return sorted(self.amplitudes.items())

    def normalized(self) -> "FockState":
        n = self.norm
        if n <= math.sqrt(ZERO_BRANCH_TOL):
            raise ZeroProbabilityBranch("cannot normalize a (numerically) zero vector")
        return FockState(self.basis, {k: a / n for k, a in self.amplitudes.items()},
                         self.n_max, prenorm=n)

    def photon_numbers(self) -> set:
        return {sum(n for _, n in occ) for occ, a in self.amplitudes.items() if a != 0}

    def _combine(self, other: "FockState", sign: float) -> "FockState":
        _check_compatible(self, other)
        amps = dict(self.amplitudes)
        for k, a in other.amplitudes.items():
            amps[k] = amps.get(k, 0j) + sign * a
        return FockState(self.basis, amps, self.n_max)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, factor):
        return FockState(self.basis, {k: factor * a for k, a in self.amplitudes.items()},
                         self.n_max)

    __rmul__ = __mul__

    def __truediv__(self, factor):
        return self * (1.0 / factor)

    def describe(self, tol: float = 1e-12) -> list:
        """Human-readable ``(amplitude, [labels...])`` listing of significant terms."""
        out = []
        for occ, a in self.items():
            if abs(a) > tol:
                out.append((a, [(str(self.basis[i]), n) for i, n in occ]))
        return out


def vacuum(basis: ModeBasis, n_max: int = 2) -> FockState:
    return FockState(basis, {(): 1.0 + 0j}, n_max)


def _check_compatible(a: FockState, b: FockState):
    if a.basis is not b.basis or a.n_max != b.n_max:
        raise BasisMismatch("states live in different registries or truncations")


def _shift(occ: Occupation, k: int, delta: int) -> Tuple[Occupation, int]:
    """Return the configuration with mode k changed by delta and the old count of k."""
    counts = dict(occ)
    old = counts.get(k, 0)
    new = old + delta
    if new:
        counts[k] = new
    else:
        counts.pop(k, None)
    return tuple(sorted(counts.items())), old


def apply_creation(state: FockState, mode: SuperpositionMode) -> FockState:
    """Unnormalized ``sum_k c_k a_k^dagger |state>``."""
    if mode.basis is not state.basis:
        raise BasisMismatch("mode and state use different registries")
    out: Dict[Occupation, complex] = {}
    for occ, amp in state.items():
        if amp == 0:
            continue
        total = sum(n for _, n in occ)
        for k, c in mode.terms:
            if c == 0:
                continue
            if total + 1 > state.n_max:
                raise TruncationOverflow(
                    f"creating a photon would exceed n_max={state.n_max}")
            new, old = _shift(occ, k, +1)
            out[new] = out.get(new, 0j) + amp * c * math.sqrt(old + 1)
    return FockState(state.basis, out, state.n_max)


def create(state: FockState, mode: SuperpositionMode) -> FockState:
    """Add one photon in ``mode`` and renormalize; the old norm is kept in ``prenorm``."""
    return apply_creation(state, mode).normalized()


def annihilate(state: FockState, mode: SuperpositionMode) -> FockState:
    """Unnormalized ``sum_k conj(c_k) a_k |state>``; may be the zero vector."""
    if mode.basis is not state.basis:
        raise BasisMismatch("mode and state use different registries")
    out: Dict[Occupation, complex] = {}
    for occ, amp in state.items():
        if amp == 0:
            continue
        counts = dict(occ)
        for k, c in mode.terms:
            n = counts.get(k, 0)
            if n == 0 or c == 0:
                continue
            new, _ = _shift(occ, k, -1)
            out[new] = out.get(new, 0j) + amp * np.conj(c) * math.sqrt(n)
    return FockState(state.basis, out, state.n_max)


def inner(a: FockState, b: FockState) -> complex:
    """<a|b>, antilinear in the first argument."""
    _check_compatible(a, b)
    terms = [np.conj(amp) * b.amplitudes[k] for k, amp in a.items() if k in b.amplitudes]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def expect(state: FockState, observable: Observable) -> float:
    """Expectation of a diagonal one-body observable in a normalized state."""
    observable = Observable(observable)
    if abs(state.norm - 1.0) > NORM_TOL:
        raise UnnormalizedState(f"state norm is {state.norm}")
    eig = [observable.eigenvalue(label) for label in state.basis]
    return math.fsum(abs(amp) ** 2 * sum(n * eig[k] for k, n in occ)
                     for occ, amp in state.items())


def project_mode(state: FockState, mode: SuperpositionMode) -> Tuple[float, FockState]:
    """Destructive detection of one photon in ``mode``.

    Returns the detection probability ``||a_mode |state>||^2`` and the normalized
    post-detection state of the remaining photons.
    """
    if abs(state.norm - 1.0) > NORM_TOL:
        raise UnnormalizedState(f"state norm is {state.norm}")
    reduced = annihilate(state, mode)
    p = reduced.norm ** 2
    if p <= ZERO_BRANCH_TOL:
        raise ZeroProbabilityBranch(f"detection probability {p:.3g} is zero")
    return p, reduced.normalized()


def single_photon_state(basis: ModeBasis, mode: SuperpositionMode, n_max: int = 2) -> FockState:
    return create(vacuum(basis, n_max), mode)


def as_mode(state: FockState, tol: float = 0.0) -> SuperpositionMode:
    """Read a one-photon state back as a superposition mode (coefficients = amplitudes)."""
    terms = []
    for occ, amp in state.items():
        if abs(amp) <= tol:
            continue
        if len(occ) != 1 or occ[0][1] != 1:
            raise ValueError("state is not a single-photon state")
        terms.append((occ[0][0], complex(amp)))
    omegas = [state.basis[i].omega for i, _ in terms]
    weights = [abs(c) ** 2 for _, c in terms]
    nominal = float(np.average(omegas, weights=weights)) if terms else float("nan")
    return SuperpositionMode(state.basis, tuple(terms), nominal, None)


def transform_modes(state: FockState,
                    image: Callable[[int], Optional[SuperpositionMode]]) -> FockState:
    """Apply a passive linear mode transformation ``a_k^dagger -> image(k)``.

    ``image`` returns the output superposition for creation operator ``k`` or
    ``None`` to leave it unchanged.  Each configuration
    ``prod_k (a_k^dagger)^n_k / sqrt(n_k!) |vac>`` is expanded term by term.
    """
    basis = state.basis
    out = FockState(basis, {}, state.n_max)
    for occ, amp in state.items():
        if amp == 0:
            continue
        branch = vacuum(basis, state.n_max)
        scale = amp
        for k, n in occ:
            img = image(k)
            if img is None:
                img = SuperpositionMode(basis, ((k, 1.0 + 0j),), basis[k].omega, "a")
            for _ in range(n):
                branch = apply_creation(branch, img)
            scale /= math.sqrt(math.factorial(n))
        out = out + branch * scale
    return out


def site_photon_counts(occ: Occupation, basis: ModeBasis) -> Dict[Optional[str], int]:
    counts: Dict[Optional[str], int] = {}
    for k, n in occ:
        site = basis[k].site
        counts[site] = counts.get(site, 0) + n
    return counts


def closed_form_expectations(family: str, sign: int, omega: float, Omega: float,
                             m: int = 0, s: int = 1, Omega2: Optional[float] = None) -> Dict[str, float]:
    """Analytic <Sz>, <Lz>, <Jz>, <E> for one photon in a '+' (sign=1) or '-' mode.

    ``m`` and ``s`` are the labels of the first monochromatic component.
    Equal-weight pairs average the two components; the theta-weighted g and h
    pairs tilt the balance by Delta/omega.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if family == "b":
        sz, lz, energy = 0.0, float(m), omega
    elif family == "c":
        sz, lz, energy = float(s), 0.0, omega
    elif family in ("d", "e", "f"):
        sz, lz, energy = 0.0, 0.0, omega
    elif family == "g":
        delta = Omega * s
        sz = -sign * s * delta / omega
        lz = float(m)
        energy = omega - sign * delta ** 2 / omega
    elif family == "h":
        delta = Omega * m
        sz = float(s)
        lz = -sign * m * delta / omega
        energy = omega - sign * delta ** 2 / omega
    else:
        raise ValueError(f"no closed form for family {family!r}")
    return {"Sz": sz, "Lz": lz, "Jz": sz + lz, "E": energy}
