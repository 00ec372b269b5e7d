"""Rotating-mode families as unitary superpositions of monochromatic modes.

Each builder returns a ``ModePair`` (plus, minus) of :class:`SuperpositionMode`
rows over a shared :class:`~rotomode.modes.ModeBasis`; missing labels are
registered on the fly.  Coefficients are the rows ``U_ij`` of the mode map, so
the creation operator of a built mode is ``sum_j U_ij a_j^dagger`` and its
detection amplitude is ``sum_j U_ij E_j(t)``.

Frequency shifts per family (``delta`` feeds :func:`theta_weights`):

====== ===================================== ==========================
family labels (omega, m, s)                   shift
====== ===================================== ==========================
b, g   (w+D, m, s), (w-D, m, -s)              D = Omega * s
c, h   (w+D, m, s), (w-D, -m, s)              D = Omega * m
d      (w+D, m, s), (w-D, -m, -s)             D = Omega * (m + s)
e      (w+D, m, s), (w-D, -m, -s)             D = Omega * m + Omega2 * s
f      (w+Omega, +1, -1), (w-Omega, -1, +1)   Omega
====== ===================================== ==========================
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import (
    DegenerateOrbitalPair,
    DegeneratePair,
    NonPositiveFrequency,
    ShiftExceedsFrequency,
)
from .modes import DEFAULT_TRANSVERSE, ModeBasis, ModeLabel, theta_weights

FAMILIES = ("a", "b", "c", "d", "e", "f", "g", "h")
_SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class SuperpositionMode:
    basis: ModeBasis = field(compare=False, repr=False)
    terms: tuple  # ((registry index, complex coefficient), ...)
    nominal_omega: float
    family: Optional[str] = None
    sign: Optional[int] = None
    rotation_rate: float = 0.0
    rotation_rate2: Optional[float] = None

    @property
    def indices(self) -> list:
        return [i for i, _ in self.terms]

    @property
    def labels(self) -> list:
        return [self.basis[i] for i, _ in self.terms]

    @property
    def coefficients(self) -> np.ndarray:
        """Dense coefficient vector over the current registry."""
        v = np.zeros(len(self.basis), dtype=complex)
        for i, c in self.terms:
            v[i] += c
        return v

    @property
    def norm2(self) -> float:
        return float(sum(abs(c) ** 2 for _, c in self.terms))

    def evolve(self, tau: float) -> "SuperpositionMode":
        """Free evolution of the mode function by ``tau`` (each term gains exp(-i w_k tau))."""
        terms = tuple((i, c * np.exp(-1j * self.basis[i].omega * tau)) for i, c in self.terms)
        return SuperpositionMode(self.basis, terms, self.nominal_omega, self.family,
                                 self.sign, self.rotation_rate, self.rotation_rate2)

    def scaled(self, factor: complex) -> "SuperpositionMode":
        terms = tuple((i, c * factor) for i, c in self.terms)
        return SuperpositionMode(self.basis, terms, self.nominal_omega, None)

    def __str__(self):
        name = self.family or "mode"
        sign = {1: "+", -1: "-", None: ""}[self.sign]
        body = " ".join(f"({c.real:+.6g}{c.imag:+.6g}j)*{self.basis[i]}" for i, c in self.terms)
        return f"{name}{sign}: {body}"


class ModePair(NamedTuple):
    plus: SuperpositionMode
    minus: SuperpositionMode


def single_mode(basis: ModeBasis, label: ModeLabel) -> SuperpositionMode:
    """A monochromatic mode (family ``a``) as a one-term superposition."""
    idx = basis.register(label)
    return SuperpositionMode(basis, ((idx, 1.0 + 0j),), label.omega, "a")


def commutator(u: SuperpositionMode, v: SuperpositionMode) -> complex:
    """[u, v^dagger] for two modes over the same registry: sum_k conj(u_k) v_k."""
    if u.basis is not v.basis:
        raise ValueError("modes live in different registries")
    cu = dict(u.terms)
    return complex(sum(np.conj(cu[i]) * c for i, c in v.terms if i in cu))


def _check_shift(omega, delta):
    if not omega > 0:
        raise NonPositiveFrequency(f"omega must be > 0, got {omega}")
    if abs(delta) >= omega:
        raise ShiftExceedsFrequency(
            f"shift |{delta}| must stay below the nominal frequency {omega}")


def _pair(basis, family, omega, first, second, w_plus, w_minus, Omega, Omega2=None):
    i1 = basis.register(first)
    i2 = basis.register(second)
    plus = SuperpositionMode(basis, ((i1, complex(w_plus[0])), (i2, complex(w_plus[1]))),
                             float(omega), family, +1, float(Omega), Omega2)
    minus = SuperpositionMode(basis, ((i1, complex(w_minus[0])), (i2, complex(w_minus[1]))),
                              float(omega), family, -1, float(Omega), Omega2)
    return ModePair(plus, minus)


def _equal_pair(basis, family, omega, first, second, Omega, Omega2=None):
    h = _SQRT_HALF
    return _pair(basis, family, omega, first, second, (h, h), (h, -h), Omega, Omega2)


def build_b_pair(basis, omega, Omega, m=0, s=1, site=None,
                 transverse=DEFAULT_TRANSVERSE) -> ModePair:
    """Rotating polarization, zero average spin: b+- = (a[w+Os,m,s] +- a[w-Os,m,-s]) / sqrt 2."""
    delta = Omega * s
    _check_shift(omega, delta)
    first = basis.label(omega + delta, m, s, transverse, site)
    second = basis.label(omega - delta, m, -s, transverse, site)
    return _equal_pair(basis, "b", omega, first, second, Omega)


def build_c_pair(basis, omega, Omega, m=1, s=1, site=None,
                 transverse=DEFAULT_TRANSVERSE) -> ModePair:
    """Rotating transverse pattern, zero average orbital angular momentum."""
    if m == 0:
        raise DegenerateOrbitalPair("m = 0 makes both labels of the c pair identical")
    delta = Omega * m
    _check_shift(omega, delta)
    first = basis.label(omega + delta, m, s, transverse, site)
    second = basis.label(omega - delta, -m, s, transverse, site)
    return _equal_pair(basis, "c", omega, first, second, Omega)


def _build_opposite_pair(basis, family, omega, delta, m, s, site, transverse, Omega, Omega2=None):
    if delta == 0:
        raise DegeneratePair(
            f"family {family} with zero frequency shift does not rotate (m={m}, s={s})")
    _check_shift(omega, delta)
    first = basis.label(omega + delta, m, s, transverse, site)
    second = basis.label(omega - delta, -m, -s, transverse, site)
    if first == second:
        raise DegeneratePair("both labels coincide")
    return _equal_pair(basis, family, omega, first, second, Omega, Omega2)


def build_d_pair(basis, omega, Omega, m=1, s=1, site=None,
                 transverse=DEFAULT_TRANSVERSE) -> ModePair:
    """Pattern and polarization rotating together at Omega (zero total angular momentum)."""
    return _build_opposite_pair(basis, "d", omega, Omega * (m + s), m, s, site, transverse, Omega)


def build_e_pair(basis, omega, Omega, Omega2, m=1, s=1, site=None,
                 transverse=DEFAULT_TRANSVERSE) -> ModePair:
    """Pattern rotating at Omega, polarization at Omega2."""
    return _build_opposite_pair(basis, "e", omega, Omega * m + Omega2 * s, m, s, site,
                                transverse, Omega, float(Omega2))


def build_f_pair(basis, omega, Omega, site=None, transverse=DEFAULT_TRANSVERSE) -> ModePair:
    """f+- = (a[w+O,+1,-1] +- a[w-O,-1,+1]) / sqrt 2.

    The transverse pattern of a fixed linear component rotates at +Omega while the
    local polarization at a fixed point rotates at -Omega.
    """
    _check_shift(omega, Omega)
    first = basis.label(omega + Omega, 1, -1, transverse, site)
    second = basis.label(omega - Omega, -1, 1, transverse, site)
    return _equal_pair(basis, "f", omega, first, second, Omega)


def _theta_pair(basis, family, omega, delta, first, second, Omega):
    tw = theta_weights(omega, delta)
    c, s = tw.cos_theta, tw.sin_theta
    return _pair(basis, family, omega, first, second, (s, c), (c, -s), Omega)


def build_g_pair(basis, omega, Omega, m=0, s=1, site=None,
                 transverse=DEFAULT_TRANSVERSE) -> ModePair:
    """Theta-weighted polarization pair.

    g+ has a rotating electric field of constant length (spin -Omega/omega per
    photon), g- a rotating vector potential of constant length (+Omega/omega).
    """
    delta = Omega * s
    _check_shift(omega, delta)
    first = basis.label(omega + delta, m, s, transverse, site)
    second = basis.label(omega - delta, m, -s, transverse, site)
    return _theta_pair(basis, "g", omega, delta, first, second, Omega)


def build_h_pair(basis, omega, Omega, m=1, s=1, site=None,
                 transverse=DEFAULT_TRANSVERSE) -> ModePair:
    """Theta-weighted orbital pair, the transverse-pattern analog of :func:`build_g_pair`."""
    if m == 0:
        raise DegenerateOrbitalPair("m = 0 makes both labels of the h pair identical")
    delta = Omega * m
    _check_shift(omega, delta)
    first = basis.label(omega + delta, m, s, transverse, site)
    second = basis.label(omega - delta, -m, s, transverse, site)
    return _theta_pair(basis, "h", omega, delta, first, second, Omega)


BUILDERS = {
    "b": build_b_pair,
    "c": build_c_pair,
    "d": build_d_pair,
    "e": build_e_pair,
    "f": build_f_pair,
    "g": build_g_pair,
    "h": build_h_pair,
}


def build_pair(basis, family, omega, Omega, m=None, s=1, Omega2=None, site=None,
               transverse=DEFAULT_TRANSVERSE) -> ModePair:
    """Dispatch to the family builder with family-appropriate defaults for ``m``."""
    if family not in BUILDERS:
        raise ValueError(f"unknown family {family!r}")
    if family == "f":
        return build_f_pair(basis, omega, Omega, site=site, transverse=transverse)
    if m is None:
        m = 0 if family in ("b", "g") else 1
    if family == "e":
        if Omega2 is None:
            raise ValueError("family e needs Omega2")
        return build_e_pair(basis, omega, Omega, Omega2, m, s, site, transverse)
    return BUILDERS[family](basis, omega, Omega, m, s, site, transverse)


# -- rotating mode inverters -------------------------------------------------

def inverter_map_polarization(label: ModeLabel, Omega: float) -> ModeLabel:
    """Half-wave plate spinning at Omega/2: (w, m, s) -> (w - s*Omega, m, -s)."""
    omega = label.omega - label.s * Omega
    if not omega > 0:
        raise NonPositiveFrequency(f"mapped frequency {omega} is not positive")
    return label.with_(omega=omega, s=-label.s)


def inverter_map_orbital(label: ModeLabel, Omega: float) -> ModeLabel:
    """Mode converter spinning at Omega/2: (w, m, s) -> (w - m*Omega, -m, s)."""
    omega = label.omega - label.m * Omega
    if not omega > 0:
        raise NonPositiveFrequency(f"mapped frequency {omega} is not positive")
    return label.with_(omega=omega, m=-label.m)


def plate_to_rotation_rate(plate_rate: float) -> float:
    return 2.0 * plate_rate


def apply_label_map(mode: SuperpositionMode,
                    label_map: Callable[[ModeLabel], ModeLabel]) -> SuperpositionMode:
    """Apply a label-to-label mode map termwise, registering the images."""
    basis = mode.basis
    terms = {}
    for i, c in mode.terms:
        j = basis.register(label_map(basis[i]))
        terms[j] = terms.get(j, 0j) + c
    return SuperpositionMode(basis, tuple(terms.items()), mode.nominal_omega, None)


# -- unitarity ---------------------------------------------------------------

@dataclass(frozen=True)
class UnitaryModeMap:
    rows: tuple

    def matrix(self) -> np.ndarray:
        return rows_matrix(self.rows)

    def gram(self) -> np.ndarray:
        u = self.matrix()
        return u @ u.conj().T

    def residual(self) -> float:
        g = self.gram()
        return float(np.max(np.abs(g - np.eye(len(g)))))


def rows_matrix(rows) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        return rows.astype(complex)
    rows = list(rows)
    if rows and isinstance(rows[0], SuperpositionMode):
        basis = rows[0].basis
        if any(r.basis is not basis for r in rows):
            raise ValueError("rows live in different registries")
        n = len(basis)
        out = np.zeros((len(rows), n), dtype=complex)
        for k, r in enumerate(rows):
            for i, c in r.terms:
                out[k, i] += c
        return out
    return np.asarray(rows, dtype=complex)


def verify_unitary(rows) -> float:
    """Largest entry of |Gram - I| for a set of mode rows (or a UnitaryModeMap)."""
    if isinstance(rows, UnitaryModeMap):
        return rows.residual()
    u = rows_matrix(rows)
    g = u @ u.conj().T
    return float(np.max(np.abs(g - np.eye(len(g)))))
