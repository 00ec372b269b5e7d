"""Reference-plane field rendering and polarization analysis.

The transverse electric field of a mode superposition with coefficients c_k is

    E(x, y, t) = sum_k c_k sqrt(w_k) exp(i m_k phi) exp(-i w_k t) F_k(rho, z) e_{s_k}

with ``e_+- = (e_x +- i e_y) / sqrt 2``.  For a single photon this is the detection
amplitude <vac|E|1>.  The vector potential replaces ``sqrt(w_k)`` by
``-i / sqrt(w_k)``.  All fields are Jones vectors ``(E_x, E_y)`` stored in the
last axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import ndimage, special

from .errors import LgOffFocalPlane, NoAzimuthalStructure, NonPositiveFrequency, NullField
from .modes import BESSEL, LAGUERRE_GAUSS, ModeLabel
from .transforms import SuperpositionMode

FIELD_PREFACTOR = 1.0
NULL_TOL = 1e-300
STRUCTURE_TOL = 1e-3


def _bessel_norm(m: int, kT: float, R: float) -> float:
    # int_0^R J_m(k r)^2 r dr = R^2/2 [J_m(kR)^2 - J_{m-1}(kR) J_{m+1}(kR)]
    x = kT * R
    radial = 0.5 * R * R * (special.jv(m, x) ** 2 - special.jv(m - 1, x) * special.jv(m + 1, x))
    return 1.0 / math.sqrt(2.0 * math.pi * radial)


def mode_function(label: ModeLabel, rho, z: Optional[float] = None, z0: float = 0.0):
    """Transverse profile F(rho, z), normalized so that int |F|^2 rho drho dphi = 1.

    Laguerre-Gauss profiles are available in the focal plane ``z = z0`` only.
    Bessel profiles are normalized over a hard aperture of radius
    ``transverse.aperture`` and vanish outside it; they carry the propagation
    phase ``exp(i kz (z - z0))``.  Both depend on ``|m|`` only.
    """
    rho = np.asarray(rho, dtype=float)
    tr = label.transverse
    am = abs(label.m)
    if tr.family == LAGUERRE_GAUSS:
        if z is not None and z != z0:
            raise LgOffFocalPlane(f"LG profiles are only evaluated at z0={z0}, got z={z}")
        p, w = tr.nT, tr.waist
        norm = math.sqrt(2.0 * math.factorial(p) / (math.pi * math.factorial(p + am))) / w
        u = rho / w
        return (norm * (math.sqrt(2.0) * u) ** am * special.eval_genlaguerre(p, am, 2.0 * u * u)
                * np.exp(-u * u)).astype(complex)
    if tr.family == BESSEL:
        R = tr.aperture
        val = _bessel_norm(am, tr.kT, R) * special.jv(am, tr.kT * rho)
        val = np.where(rho <= R, val, 0.0).astype(complex)
        if z is not None and z != z0:
            kz = math.sqrt(label.omega ** 2 - tr.kT ** 2)
            val = val * np.exp(1j * kz * (z - z0))
        return val
    raise ValueError(f"unknown transverse family {tr.family!r}")


def _weight(omega: float, quantity: str) -> complex:
    if quantity == "E":
        return math.sqrt(omega)
    if quantity == "A":
        return -1j / math.sqrt(omega)
    raise ValueError(f"quantity must be 'E' or 'A', got {quantity!r}")


def detection_amplitude(mode: SuperpositionMode, x, y, t: float = 0.0, z: Optional[float] = None,
                        quantity: str = "E", prefactor: float = FIELD_PREFACTOR) -> np.ndarray:
    """Complex Jones vector (E_x, E_y) of ``mode`` at points (x, y) and time t.

    ``x`` and ``y`` broadcast against each other; the result has shape
    ``broadcast(x, y).shape + (2,)``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    rho = np.hypot(x, y)
    phi = np.arctan2(y, x)
    z0 = mode.basis.z0
    out = np.zeros(x.shape + (2,), dtype=complex)
    profiles = {}
    for k, c in mode.terms:
        lab = mode.basis[k]
        key = (lab.transverse, abs(lab.m), lab.omega if z not in (None, z0) else None)
        if key not in profiles:
            profiles[key] = mode_function(lab, rho, z, z0)
        scalar = (prefactor * c * _weight(lab.omega, quantity) * np.exp(-1j * lab.omega * t)
                  * np.exp(1j * lab.m * phi) * profiles[key])
        out[..., 0] += scalar / math.sqrt(2.0)
        out[..., 1] += scalar * (1j * lab.s) / math.sqrt(2.0)
    return out


def circular_to_linear(e_plus, e_minus) -> np.ndarray:
    """Components on (e_+, e_-) to components on (e_x, e_y)."""
    e_plus, e_minus = np.asarray(e_plus), np.asarray(e_minus)
    return np.stack([(e_plus + e_minus) / math.sqrt(2.0),
                     1j * (e_plus - e_minus) / math.sqrt(2.0)], axis=-1)


def linear_to_circular(ex, ey) -> np.ndarray:
    ex, ey = np.asarray(ex), np.asarray(ey)
    return np.stack([(ex - 1j * ey) / math.sqrt(2.0), (ex + 1j * ey) / math.sqrt(2.0)], axis=-1)


# -- polarization ellipse ----------------------------------------------------

def stokes(ex, ey) -> np.ndarray:
    """Stokes parameters (S0, S1, S2, S3) of a Jones vector; S3 > 0 for (1, i)/sqrt 2."""
    ex, ey = np.asarray(ex, dtype=complex), np.asarray(ey, dtype=complex)
    cross = np.conj(ex) * ey
    return np.stack([abs(ex) ** 2 + abs(ey) ** 2,
                     abs(ex) ** 2 - abs(ey) ** 2,
                     2.0 * cross.real,
                     2.0 * cross.imag], axis=-1)


def polarization_ellipse(ex, ey, null: str = "raise"):
    """Orientation psi in (-pi/2, pi/2] and ellipticity chi in [-pi/4, pi/4].

    With ``null="nan"`` points with zero field get NaN instead of raising
    :class:`NullField`.
    """
    s = stokes(ex, ey)
    s0, s1, s2, s3 = (s[..., i] for i in range(4))
    is_null = s0 <= NULL_TOL
    if np.any(is_null) and null == "raise":
        raise NullField("polarization is undefined for a zero field")
    with np.errstate(invalid="ignore", divide="ignore"):
        psi = 0.5 * np.arctan2(s2, s1)
        psi = np.where(psi <= -math.pi / 2, psi + math.pi, psi)
        chi = 0.5 * np.arcsin(np.clip(s3 / s0, -1.0, 1.0))
    psi = np.where(is_null, np.nan, psi)
    chi = np.where(is_null, np.nan, chi)
    if psi.ndim == 0:
        return float(psi), float(chi)
    return psi, chi


# -- snapshots -----------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    n: int = 129
    extent: float = 4.0  # half-width: the grid spans [-extent, extent] in x and y

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"grid size must be a positive integer, got {self.n}")
        if not self.extent > 0:
            raise ValueError(f"grid extent must be positive, got {self.extent}")

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, int(self.n))


def default_grid(mode: SuperpositionMode, n: int = 129) -> Grid:
    """[-4w, 4w] for Laguerre-Gauss modes, [-4/kT, 4/kT] for Bessel modes."""
    scale = mode.basis[mode.terms[0][0]].transverse.length_scale
    return Grid(n, 4.0 * scale)


@dataclass(frozen=True)
class FieldSnapshot:
    x: np.ndarray
    y: np.ndarray
    t: float
    z: float
    values: np.ndarray  # (ny, nx, 2) complex Jones vectors

    @property
    def ex(self) -> np.ndarray:
        return self.values[..., 0]

    @property
    def ey(self) -> np.ndarray:
        return self.values[..., 1]

    @property
    def intensity(self) -> np.ndarray:
        return np.sum(np.abs(self.values) ** 2, axis=-1)

    def component_intensity(self, component: str) -> np.ndarray:
        if component == "x":
            return np.abs(self.ex) ** 2
        if component == "y":
            return np.abs(self.ey) ** 2
        if component == "intensity":
            return self.intensity
        raise ValueError(f"component must be 'x', 'y' or 'intensity', got {component!r}")

    @property
    def ellipse(self):
        return polarization_ellipse(self.ex, self.ey, null="nan")

    @property
    def psi(self) -> np.ndarray:
        return self.ellipse[0]

    @property
    def chi(self) -> np.ndarray:
        return self.ellipse[1]

    def mirrored(self) -> "FieldSnapshot":
        """Reflection y -> -y (E_y flips sign); reverses every sense of rotation."""
        vals = self.values[::-1, :, :].copy()
        vals[..., 1] *= -1
        return FieldSnapshot(self.x, -self.y[::-1], self.t, self.z, vals)


def snapshot(mode: SuperpositionMode, grid: Optional[Grid] = None, t: float = 0.0,
             z: Optional[float] = None, quantity: str = "E") -> FieldSnapshot:
    grid = grid or default_grid(mode)
    axis = grid.axis
    X, Y = np.meshgrid(axis, axis)  # rows are y, columns are x
    vals = detection_amplitude(mode, X, Y, t, z, quantity)
    return FieldSnapshot(axis, axis.copy(), float(t), mode.basis.z0 if z is None else z, vals)


# -- rotation estimators -------------------------------------------------------

def azimuthal_profile(snap: FieldSnapshot, component: str = "x", n_bins: int = 256,
                      n_radii: int = 48) -> np.ndarray:
    """Radius-weighted azimuthal profile of one intensity component.

    The image is resampled (cubic spline) on a polar lattice of ``n_bins``
    azimuths inside the inscribed disk of the grid.
    """
    img = snap.component_intensity(component)
    dx = snap.x[1] - snap.x[0]
    dy = snap.y[1] - snap.y[0]
    r_max = min(abs(snap.x[0]), abs(snap.x[-1]), abs(snap.y[0]), abs(snap.y[-1]))
    radii = np.linspace(0.05, 0.95, n_radii) * r_max
    phis = 2.0 * np.pi * np.arange(n_bins) / n_bins
    R, P = np.meshgrid(radii, phis)  # (n_bins, n_radii)
    cols = (R * np.cos(P) - snap.x[0]) / dx
    rows = (R * np.sin(P) - snap.y[0]) / dy
    samples = ndimage.map_coordinates(img, [rows.ravel(), cols.ravel()], order=3,
                                      mode="nearest").reshape(R.shape)
    return samples @ radii


def _profile_lag(p1: np.ndarray, p2: np.ndarray) -> float:
    """Angle by which profile p2 is p1 rotated, via circular cross-correlation."""
    n = len(p1)
    f1 = np.fft.rfft(p1 - p1.mean())
    harm = np.abs(f1[1:])
    # cubic resampling of a round pattern leaves harmonics well below this level
    if harm.max() <= STRUCTURE_TOL * abs(np.sum(p1)):
        raise NoAzimuthalStructure("intensity pattern has no azimuthal structure")
    order = int(np.argmax(harm)) + 1
    f2 = np.fft.rfft(p2 - p2.mean())
    corr = np.fft.irfft(np.conj(f1) * f2, n)
    # an order-n pattern is invariant under 2 pi / n, so search one period centred on 0
    half = n / (2.0 * order)
    lags = np.arange(n)
    signed = np.where(lags > n // 2, lags - n, lags)
    allowed = np.abs(signed) < half
    k = int(lags[allowed][np.argmax(corr[allowed])])
    y0, y1, y2 = corr[(k - 1) % n], corr[k], corr[(k + 1) % n]
    denom = y0 - 2.0 * y1 + y2
    frac = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
    lag = (k if k <= n // 2 else k - n) + frac
    return 2.0 * np.pi * lag / n


def estimate_pattern_rotation(snapshots: Sequence[FieldSnapshot], component: str = "x",
                              n_bins: int = 256) -> float:
    """Signed angular velocity of an intensity pattern across a time-ordered sequence."""
    if len(snapshots) < 2:
        raise ValueError("need at least two snapshots")
    profiles = [azimuthal_profile(s, component, n_bins) for s in snapshots]
    angle = 0.0
    for a, b in zip(profiles[:-1], profiles[1:]):
        angle += _profile_lag(a, b)
    return angle / (snapshots[-1].t - snapshots[0].t)


def polarization_angles(mode: SuperpositionMode, point, times, quantity: str = "E") -> np.ndarray:
    times = np.asarray(times, dtype=float)
    e = np.stack([detection_amplitude(mode, point[0], point[1], t, quantity=quantity)
                  for t in times])
    psi, _ = polarization_ellipse(e[:, 0], e[:, 1])
    return np.asarray(psi)


def estimate_polarization_rotation(mode: SuperpositionMode, point, times,
                                   quantity: str = "E") -> float:
    """Least-squares slope of the unwrapped ellipse orientation at a fixed point.

    Successive samples must be less than a quarter turn (pi/2) apart.
    """
    times = np.asarray(times, dtype=float)
    if len(times) < 2:
        raise ValueError("need at least two times")
    psi = polarization_angles(mode, point, times, quantity)
    unwrapped = np.unwrap(2.0 * psi) / 2.0
    return float(np.polyfit(times, unwrapped, 1)[0])


class FrameCheck(NamedTuple):
    phase_frame: complex
    phase_shifted: complex
    mode_functions_equal: bool


def frame_rotation_phase_check(label: ModeLabel, Omega: float, t: float) -> FrameCheck:
    """Compare a mode seen from a frame rotating at Omega with a frequency-shifted mode.

    ``exp(i Omega (m+s) t) a[w,m,s](t)`` and ``a[w - Omega (m+s), m, s](t)`` share
    their time dependence, but unless the shift vanishes the two labels differ in
    frequency and are different modes.
    """
    shift = Omega * (label.m + label.s)
    shifted_omega = label.omega - shift
    if not shifted_omega > 0:
        raise NonPositiveFrequency(f"shifted frequency {shifted_omega} is not positive")
    phase_frame = np.exp(1j * shift * t) * np.exp(-1j * label.omega * t)
    phase_shifted = np.exp(-1j * shifted_omega * t)
    same = label.with_(omega=shifted_omega) == label
    return FrameCheck(complex(phase_frame), complex(phase_shifted), same)
