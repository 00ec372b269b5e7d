"""Monochromatic mode labels and the mode registry.

Units are natural (hbar = c = eps0 = 1); frequencies are angular.  A mode is
labelled by its frequency ``omega``, orbital index ``m``, helicity ``s`` and a
transverse index fixing the remaining spatial quantum number.  A ``site`` tag
distinguishes otherwise identical modes living at two different locations
(or two input ports of a beam splitter).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import (
    BadHelicity,
    NonPositiveFrequency,
    ParaxialityViolated,
    ShiftExceedsFrequency,
)

DEFAULT_PARAXIAL_EPS = 0.1
SITES = ("A", "B", None)

BESSEL = "bessel"
LAGUERRE_GAUSS = "lg"


def _canonical(x: float) -> float:
    # omega +/- shift computed along different routes must land on the same key
    return float(f"{float(x):.15g}")


@dataclass(frozen=True)
class TransverseIndex:
    """Fourth quantum number of a mode.

    Exactly one family is active: Bessel modes carry the transverse wavenumber
    ``kT`` (and a finite normalization aperture), Laguerre-Gauss modes carry the
    radial node count ``nT`` and the focal-plane ``waist``.
    """

    family: str
    kT: Optional[float] = None
    aperture: Optional[float] = None
    nT: Optional[int] = None
    waist: Optional[float] = None

    def __post_init__(self):
        if self.family == BESSEL:
            if self.kT is None or not self.kT > 0:
                raise ValueError("Bessel transverse index needs kT > 0")
            if self.nT is not None or self.waist is not None:
                raise ValueError("Bessel transverse index takes no nT/waist")
            if self.aperture is None:
                object.__setattr__(self, "aperture", 10.0 / self.kT)
            elif not self.aperture > 0:
                raise ValueError("aperture must be positive")
        elif self.family == LAGUERRE_GAUSS:
            if self.nT is None or int(self.nT) != self.nT or self.nT < 0:
                raise ValueError("LG transverse index needs integer nT >= 0")
            if self.waist is None or not self.waist > 0:
                raise ValueError("LG transverse index needs waist > 0")
            if self.kT is not None or self.aperture is not None:
                raise ValueError("LG transverse index takes no kT/aperture")
            object.__setattr__(self, "nT", int(self.nT))
        else:
            raise ValueError(f"unknown transverse family {self.family!r}")

    @classmethod
    def bessel(cls, kT: float, aperture: Optional[float] = None) -> "TransverseIndex":
        return cls(BESSEL, kT=float(kT), aperture=aperture)

    @classmethod
    def laguerre_gauss(cls, nT: int = 0, waist: float = 1.0) -> "TransverseIndex":
        return cls(LAGUERRE_GAUSS, nT=nT, waist=float(waist))

    @property
    def length_scale(self) -> float:
        """Characteristic transverse size (w for LG, 1/kT for Bessel)."""
        if self.family == LAGUERRE_GAUSS:
            return self.waist
        return 1.0 / self.kT


DEFAULT_TRANSVERSE = TransverseIndex.laguerre_gauss(0, 1.0)


@dataclass(frozen=True)
class ModeLabel:
    omega: float
    m: int
    s: int
    transverse: TransverseIndex = DEFAULT_TRANSVERSE
    site: Optional[str] = None

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise NonPositiveFrequency(f"omega must be > 0, got {self.omega}")
        if self.s not in (1, -1):
            raise BadHelicity(f"helicity must be +1 or -1, got {self.s}")
        if int(self.m) != self.m:
            raise ValueError(f"orbital index must be an integer, got {self.m}")
        if self.site not in SITES:
            raise ValueError(f"site must be one of {SITES}, got {self.site!r}")
        object.__setattr__(self, "omega", _canonical(self.omega))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "s", int(self.s))

    def with_(self, **changes) -> "ModeLabel":
        kw = dict(omega=self.omega, m=self.m, s=self.s,
                  transverse=self.transverse, site=self.site)
        kw.update(changes)
        return make_mode_label(**kw)

    def __str__(self):
        site = "" if self.site is None else f"@{self.site}"
        return f"a[{self.omega:g},{self.m:+d},{self.s:+d}]{site}"


def make_mode_label(omega, m, s, transverse=DEFAULT_TRANSVERSE, site=None,
                    eps_par=DEFAULT_PARAXIAL_EPS) -> ModeLabel:
    """Validated constructor for :class:`ModeLabel`.

    Adds the paraxiality gate ``kT <= eps_par * omega`` for Bessel modes on top
    of the checks done by the dataclass itself.
    """
    if not (math.isfinite(omega) and omega > 0):
        raise NonPositiveFrequency(f"omega must be > 0, got {omega}")
    if s not in (1, -1):
        raise BadHelicity(f"helicity must be +1 or -1, got {s}")
    if transverse.family == BESSEL and transverse.kT > eps_par * omega:
        raise ParaxialityViolated(
            f"kT={transverse.kT} exceeds {eps_par} * omega = {eps_par * omega}")
    return ModeLabel(omega, m, s, transverse, site)


@dataclass
class ModeBasis:
    """Ordered registry of distinct mode labels sharing one reference plane.

    Indices are stable: a label keeps its index for the lifetime of the basis.
    """

    z0: float = 0.0
    labels: list = field(default_factory=list)
    eps_par: float = DEFAULT_PARAXIAL_EPS

    def __post_init__(self):
        self._index = {}
        for i, label in enumerate(self.labels):
            if label in self._index:
                raise ValueError(f"duplicate label {label}")
            self._index[label] = i

    def register(self, label: ModeLabel) -> int:
        idx = self._index.get(label)
        if idx is None:
            idx = len(self.labels)
            self.labels.append(label)
            self._index[label] = idx
        return idx

    def index(self, label: ModeLabel) -> int:
        return self._index[label]

    def __contains__(self, label) -> bool:
        return label in self._index

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[ModeLabel]:
        return iter(self.labels)

    def __getitem__(self, i: int) -> ModeLabel:
        return self.labels[i]

    def label(self, omega, m, s, transverse=DEFAULT_TRANSVERSE, site=None) -> ModeLabel:
        """Make a label with this basis's paraxiality setting (not registered)."""
        return make_mode_label(omega, m, s, transverse, site, eps_par=self.eps_par)


def register(basis: ModeBasis, label: ModeLabel) -> int:
    return basis.register(label)


@dataclass(frozen=True)
class ThetaWeights:
    delta: float
    cos_theta: float
    sin_theta: float

    @property
    def theta(self) -> float:
        return math.atan2(self.sin_theta, self.cos_theta)

    @property
    def a_plus(self) -> float:
        return (self.cos_theta + self.sin_theta) / math.sqrt(2.0)

    @property
    def a_minus(self) -> float:
        return (self.cos_theta - self.sin_theta) / math.sqrt(2.0)


def theta_weights(omega: float, delta: float) -> ThetaWeights:
    """cos(theta) = sqrt((omega + delta) / 2 omega), sin(theta) = sqrt((omega - delta) / 2 omega)."""
    if not omega > 0:
        raise NonPositiveFrequency(f"omega must be > 0, got {omega}")
    if abs(delta) > omega:
        raise ShiftExceedsFrequency(f"|delta|={abs(delta)} exceeds omega={omega}")
    return ThetaWeights(
        delta=float(delta),
        cos_theta=math.sqrt((omega + delta) / (2.0 * omega)),
        sin_theta=math.sqrt((omega - delta) / (2.0 * omega)),
    )
