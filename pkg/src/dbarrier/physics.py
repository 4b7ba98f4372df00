"""
Unit conventions, physical constants and scattering kinematics.

Units throughout the package: energies in eV, lengths in nm, delta strengths
in nm*eV, masses as ratios to the free-electron mass m0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy import constants as _c

from .errors import DomainError, SingularKinematicsError

# hbar^2 / (2 m0) in eV nm^2, from CODATA hbar, m_e, e.
H2M0 = _c.hbar**2 / (2.0 * _c.m_e) / _c.e * 1e18


@dataclass(frozen=True)
class EffectiveMass:
    """Effective mass as a ratio m/m0."""

    m_rel: float

    def __post_init__(self):
        if not (self.m_rel > 0.0) or not math.isfinite(self.m_rel):
            raise DomainError(f"effective mass must be positive, got {self.m_rel!r}")


@dataclass(frozen=True)
class Kinematics:
    E: float
    k: float  # 1/nm
    a: float  # 1/(eV^2 nm^2)


@dataclass(frozen=True)
class BarrierKinematics:
    kappa: complex  # 1/nm, principal branch
    delta: complex
    sigma_sq: complex


def _as_mass(m) -> EffectiveMass:
    return m if isinstance(m, EffectiveMass) else EffectiveMass(float(m))


def h2m(m) -> float:
    """hbar^2/(2m) in eV nm^2 for effective mass ``m`` (EffectiveMass or float ratio)."""
    return H2M0 / _as_mass(m).m_rel


def principal_sqrt(z: complex) -> complex:
    """Principal square root; on the negative real axis the +i root is returned."""
    z = complex(z)
    if z.imag == 0.0:
        # -0.0 imaginary part would select the lower root
        z = complex(z.real, 0.0)
    return cmath.sqrt(z)


def kinematics(E: float, m) -> Kinematics:
    if not (E > 0.0):
        raise DomainError(f"energy must be positive (scattering states only), got {E!r}")
    c = h2m(m)
    return Kinematics(E=E, k=math.sqrt(E / c), a=1.0 / (4.0 * c * E))


def wavenumber(E: float, m) -> float:
    return kinematics(E, m).k


def barrier_kappa(E: float, U0: complex, m) -> complex:
    """Principal-branch kappa = sqrt((U0 - E) / h2m) inside the barrier."""
    kappa = principal_sqrt((complex(U0) - E) / h2m(m))
    if kappa == 0.0:
        raise SingularKinematicsError(
            f"E = U0 = {E!r} eV: delta = (kappa^2 - k^2)/(kappa k) is undefined"
        )
    return kappa


def barrier_kinematics(E: float, U0: complex, m) -> BarrierKinematics:
    """kappa, delta and sigma^2 inside a barrier of complex height ``U0``.

    Raises :class:`SingularKinematicsError` when E lies so close to U0 that
    sigma^2 overflows.
    """
    bk = _from_kappa(kinematics(E, m).k, barrier_kappa(E, U0, m))
    if not (cmath.isfinite(bk.delta) and cmath.isfinite(bk.sigma_sq)):
        raise SingularKinematicsError(
            f"E = {E!r} eV is numerically degenerate with U0 = {U0!r} eV: sigma^2 overflows"
        )
    return bk


def _from_kappa(k: float, kappa: complex) -> BarrierKinematics:
    delta = (kappa * kappa - k * k) / (kappa * k)
    return BarrierKinematics(kappa=kappa, delta=delta, sigma_sq=delta * delta + 4.0)
