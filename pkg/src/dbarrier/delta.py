"""
Symmetric double delta barrier V0 [delta(x + w/2) + delta(x - w/2)].

This is the thin-barrier limit of the rectangular structure (b -> 0 with
U0 * b = V0 fixed).  The scattering problem is solved exactly by the
closed forms below; ``a = m / (2 hbar^2 E)`` is the energy scale factor and
``alpha = 2 sqrt(a) V0`` the dimensionless delta strength.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

from .errors import DomainError, Divergence, SingularInputError
from .physics import EffectiveMass, _as_mass, h2m, kinematics
from .rect import DIVERGENCE_RTOL, UvwSplit, mn, resonance_bracket_from_uvw


@dataclass(frozen=True)
class DeltaDoubleBarrier:
    w: float
    V0: complex  # nm eV
    m: EffectiveMass

    kind = "delta"

    def __post_init__(self):
        if not (self.w > 0.0):
            raise DomainError(f"well width w must be positive, got {self.w!r}")
        object.__setattr__(self, "V0", complex(self.V0))
        object.__setattr__(self, "m", _as_mass(self.m))

    @property
    def im_pot(self) -> float:
        return self.V0.imag

    @property
    def energy_scale(self) -> float:
        return abs(self.V0.real) / self.w

    def with_im_pot(self, value: float) -> "DeltaDoubleBarrier":
        return replace(self, V0=complex(self.V0.real, value))

    def wavenumber(self, E):
        return kinematics(E, self.m).k

    def uvw(self, E):
        return uvw_delta(self, E)

    def d_of_k(self, E):
        return d_of_k(self, E)

    def bracket(self, E):
        return resonance_bracket(self, E)

    def d_res(self, E):
        return d_res(self, E)


@dataclass(frozen=True)
class DeltaScattering:
    D: complex
    T: complex
    R: complex  # centred potential
    R_shifted: complex  # potential moved to delta(x) + delta(x - w)
    A: float
    alpha: complex

    @property
    def T2(self) -> float:
        return abs(self.T) ** 2

    @property
    def R2(self) -> float:
        return abs(self.R) ** 2


def alpha(spec: DeltaDoubleBarrier, E: float) -> complex:
    return 2.0 * math.sqrt(kinematics(E, spec.m).a) * spec.V0


def d_of_k(spec: DeltaDoubleBarrier, E: float) -> complex:
    """D = 1 - a V0^2 [1 - exp(2ikw)] + 2i sqrt(a) V0."""
    kin = kinematics(E, spec.m)
    V0 = spec.V0
    return 1.0 - kin.a * V0 * V0 * (1.0 - cmath.exp(2j * kin.k * spec.w)) + 2j * math.sqrt(kin.a) * V0


def d_of_k_trig(spec: DeltaDoubleBarrier, E: float) -> complex:
    """Same D written with cos/sin of 2kw and the hbar, m, E factors spelled out."""
    k = kinematics(E, spec.m).k
    c = h2m(spec.m)
    V0 = spec.V0
    g = V0 * V0 / (4.0 * c * E)  # m V0^2 / (2 hbar^2 E)
    ph = 2.0 * k * spec.w
    return 1.0 + g * (math.cos(ph) - 1.0) + 1j * V0 / math.sqrt(c * E) + 1j * g * math.sin(ph)


def uvw_delta(spec: DeltaDoubleBarrier, E: float) -> UvwSplit:
    a = kinematics(E, spec.m).a
    sa = math.sqrt(a)
    VR, VI = spec.V0.real, spec.V0.imag
    q = VR * VR - VI * VI
    U = complex(1.0 - a * q, -2.0 * a * VR * VI)
    V = complex(2.0 * sa * VR, 2.0 * sa * VI)
    W = complex(a * q, 2.0 * a * VR * VI)
    return UvwSplit(U, V, W)


def mn_delta(spec: DeltaDoubleBarrier, E: float) -> tuple[float, float]:
    """Extremal-condition M, N from the general U/V/W expressions."""
    return mn(uvw_delta(spec, E))


def mn_delta_printed(spec: DeltaDoubleBarrier, E: float) -> tuple[float, float]:
    """M, N expanded term by term in powers of a, kept unsimplified.

    Used only as a regression reference for :func:`mn_delta`.
    """
    a = kinematics(E, spec.m).a
    a32 = a**1.5
    R, I = spec.V0.real, spec.V0.imag
    q = R * R - I * I
    M = (2 * a * a * R * I * q - 2 * a * R * I + 4 * a32 * R * I * I
         - 2 * a * a * R * I * q + 2 * a32 * R * q)
    N = (4 * a32 * I * R * R + a * q - a * a * q * q
         - 2 * a32 * I * q - 4 * (a * R * I) ** 2)
    return M, N


def resonance_bracket(spec: DeltaDoubleBarrier, E: float) -> float:
    a = kinematics(E, spec.m).a
    sa = math.sqrt(a)
    R, I = spec.V0.real, spec.V0.imag
    num = a * (R * R + I * I)
    den = math.hypot(1.0 - a * (R * R - I * I) - 2.0 * sa * I, 2.0 * sa * R - 2.0 * a * R * I)
    if den == 0.0:
        raise SingularInputError("zero denominator in the resonant bracket")
    return 1.0 - num / den


def d_res(spec: DeltaDoubleBarrier, E_res: float) -> complex:
    """D at resonance: (1 + i sqrt(a) V0)^2 times the real resonant bracket."""
    sa = math.sqrt(kinematics(E_res, spec.m).a)
    return (1.0 + 1j * sa * spec.V0) ** 2 * resonance_bracket(spec, E_res)


def d_res_general(spec: DeltaDoubleBarrier, E_res: float) -> complex:
    s = uvw_delta(spec, E_res)
    return (s.U + 1j * s.V) * resonance_bracket_from_uvw(s)


def _check_divergence(D, spec, E):
    s = uvw_delta(spec, E)
    scale = max(1.0, abs(s.U + 1j * s.V), abs(s.W))
    if D == 0.0 or abs(D) <= DIVERGENCE_RTOL * scale:
        raise Divergence(f"transmission diverges at E = {E!r} eV (|D| = {abs(D):.3g})",
                         E=E, D=D, structure=spec)


def transmission_amplitude(spec: DeltaDoubleBarrier, E: float) -> complex:
    D = d_of_k(spec, E)
    _check_divergence(D, spec, E)
    return 1.0 / D


def reflection(spec: DeltaDoubleBarrier, E: float) -> tuple[complex, complex]:
    """Reflection amplitude for the centred potential and for the shifted one."""
    k = kinematics(E, spec.m).k
    al = alpha(spec, E)
    ep = cmath.exp(1j * k * spec.w)
    em = cmath.exp(-1j * k * spec.w)
    den = al * al * (ep * ep - 1.0) + 4j * al + 4.0
    # den == 4 D
    _check_divergence(den / 4.0, spec, E)
    R = al * ((al - 2j) * em - (al + 2j) * ep) / den
    return R, R * ep


def absorption(spec: DeltaDoubleBarrier, E: float) -> float:
    """Absorption probability; positive for loss (Im V0 < 0), negative for gain."""
    VI = spec.V0.imag
    if VI == 0.0:
        return 0.0
    k = kinematics(E, spec.m).k
    _, Rs = reflection(spec, E)
    return 2.0 * (1.0 + Rs.real) / (1.0 - h2m(spec.m) * k / VI)


def scatter(spec: DeltaDoubleBarrier, E: float) -> DeltaScattering:
    D = d_of_k(spec, E)
    _check_divergence(D, spec, E)
    R, Rs = reflection(spec, E)
    return DeltaScattering(D=D, T=1.0 / D, R=R, R_shifted=Rs,
                           A=absorption(spec, E), alpha=alpha(spec, E))
