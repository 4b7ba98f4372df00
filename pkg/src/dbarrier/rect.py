"""
Symmetric rectangular double barrier with a complex barrier height.

Two barriers of width ``b`` and height ``U0`` enclose a well of width ``w``;
the structure is centred on x = 0.  Everything is expressed through the
complex functions U, V, W of the single-barrier kinematics, from which the
transmission denominator D, the extremal (resonance) condition and the
resonant value of D follow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, Divergence, SingularInputError
from .physics import EffectiveMass, _as_mass, barrier_kappa, barrier_kinematics, kinematics

# |D| below this fraction of its largest contributing term counts as a pole.
DIVERGENCE_RTOL = 1e-10


@dataclass(frozen=True)
class UvwSplit:
    U: complex
    V: complex
    W: complex

    @property
    def U_R(self):
        return self.U.real

    @property
    def U_I(self):
        return self.U.imag

    @property
    def V_R(self):
        return self.V.real

    @property
    def V_I(self):
        return self.V.imag

    @property
    def W_R(self):
        return self.W.real

    @property
    def W_I(self):
        return self.W.imag

    def identity_residual(self) -> float:
        """Relative residual of U^2 + V^2 = (1 + W)^2."""
        lhs = self.U * self.U + self.V * self.V
        rhs = (1.0 + self.W) ** 2
        scale = max(abs(self.U) ** 2, abs(self.V) ** 2, abs(rhs), 1.0)
        return abs(lhs - rhs) / scale


@dataclass(frozen=True)
class RectDoubleBarrier:
    b: float
    w: float
    U0: complex
    m: EffectiveMass

    kind = "rect"

    def __post_init__(self):
        if not (self.b > 0.0):
            raise DomainError(f"barrier width b must be positive, got {self.b!r}")
        if not (self.w > 0.0):
            raise DomainError(f"well width w must be positive, got {self.w!r}")
        object.__setattr__(self, "U0", complex(self.U0))
        object.__setattr__(self, "m", _as_mass(self.m))

    @property
    def im_pot(self) -> float:
        return self.U0.imag

    @property
    def energy_scale(self) -> float:
        return abs(self.U0.real)

    def with_im_pot(self, value: float) -> "RectDoubleBarrier":
        return replace(self, U0=complex(self.U0.real, value))

    def wavenumber(self, E):
        return kinematics(E, self.m).k

    def uvw(self, E):
        return uvw(self, E)

    def d_of_k(self, E):
        return d_of_k(self, E)

    def bracket(self, E):
        return resonance_bracket(self, E)

    def d_res(self, E):
        return d_res(self, E)


def _uvw_from_kappa(b: float, k: float, kappa: complex) -> UvwSplit:
    # delta * sinh(kappa b) = (kappa^2 - k^2) / k * sinh(kappa b) / kappa stays
    # finite as kappa -> 0, where delta alone blows up
    z = kappa * b
    ch = cmath.cosh(z)
    sh = cmath.sinh(z)
    ds = (kappa * kappa - k * k) / k * (sh / kappa)
    U = ch * ch - 0.25 * ds * ds
    V = ch * ds
    W = 0.25 * ds * ds + sh * sh  # (sigma^2 / 4) sinh^2
    return UvwSplit(U, V, W)


def uvw(spec: RectDoubleBarrier, E: float, kappa_sign: int = 1) -> UvwSplit:
    """U, V, W at energy ``E``.

    ``kappa_sign=-1`` evaluates on the other branch of kappa; every physical
    quantity is even in kappa, which the tests use as a consistency check.
    """
    kappa = barrier_kappa(E, spec.U0, spec.m)
    kappa = -kappa if kappa_sign < 0 else kappa
    return _uvw_from_kappa(spec.b, kinematics(E, spec.m).k, kappa)


def _d_from_uvw(s: UvwSplit, phase: float) -> complex:
    c, sn = math.cos(phase), math.sin(phase)
    return s.U + s.W * c + 1j * (s.V + s.W * sn)


def d_split(s: UvwSplit, phase: float) -> complex:
    """D assembled from the real and imaginary parts of U, V, W separately."""
    c, sn = math.cos(phase), math.sin(phase)
    re = s.U_R + s.W_R * c - s.V_I - s.W_I * sn
    im = s.U_I + s.W_I * c + s.V_R + s.W_R * sn
    return complex(re, im)


def d_of_k(spec: RectDoubleBarrier, E: float) -> complex:
    """Transmission denominator D(k) = U + W cos(2kw) + i[V + W sin(2kw)]."""
    k = kinematics(E, spec.m).k
    return _d_from_uvw(uvw(spec, E), 2.0 * k * spec.w)


def _check_divergence(D: complex, s: UvwSplit, E, spec):
    scale = max(1.0, abs(s.U + 1j * s.V), abs(s.W))
    if D == 0.0 or abs(D) <= DIVERGENCE_RTOL * scale:
        raise Divergence(f"transmission diverges at E = {E!r} eV (|D| = {abs(D):.3g})",
                         E=E, D=D, structure=spec)


def transmission_amplitude(spec: RectDoubleBarrier, E: float) -> complex:
    """T = exp(-2ikb) / D; raises :class:`Divergence` at a pole."""
    k = kinematics(E, spec.m).k
    s = uvw(spec, E)
    D = _d_from_uvw(s, 2.0 * k * spec.w)
    _check_divergence(D, s, E, spec)
    return cmath.exp(-2j * k * spec.b) / D


def transmission_probability(spec: RectDoubleBarrier, E: float) -> float:
    D = d_of_k(spec, E)
    return 1.0 / abs(D) ** 2 if D != 0 else math.inf


def mn(s: UvwSplit) -> tuple[float, float]:
    """Numerator and denominator of the extremal condition tan(2kw) = M/N."""
    M = -s.U_R * s.W_I + s.V_I * s.W_I + s.U_I * s.W_R + s.V_R * s.W_R
    N = s.U_R * s.W_R - s.V_I * s.W_R + s.U_I * s.W_I + s.V_R * s.W_I
    return M, N


def resonance_bracket_from_uvw(s: UvwSplit) -> float:
    denom = math.hypot(s.U_R - s.V_I, s.V_R + s.U_I)
    if denom == 0.0:
        raise SingularInputError("|U + iV| = 0: resonant bracket undefined")
    return 1.0 - math.hypot(s.W_R, s.W_I) / denom


def _modulus_gap(spec: RectDoubleBarrier, E: float):
    """(|P|, |W|, |P|^2 - |W|^2, P) with P = U + iV, without cancellation.

    With p = cosh(kappa b) + i (delta/2) sinh(kappa b) one has P = p^2 and
    1 + W = p q, q being p with the sign of delta flipped.  Then

        |P|^2 - |W|^2 = 1 + 2 Re W - |p|^2 [Im(delta) sinh 2x + Re(delta) sin 2y]

    where kappa b = x + iy.  For thick barriers |P| and |W| agree to many
    digits, so the naive difference would lose them all.
    """
    kappa = barrier_kappa(E, spec.U0, spec.m)
    k = kinematics(E, spec.m).k
    delta = (kappa * kappa - k * k) / (kappa * k)
    z = kappa * spec.b
    ch, sh = cmath.cosh(z), cmath.sinh(z)
    ds = (kappa * kappa - k * k) / k * (sh / kappa)
    p = ch + 0.5j * ds
    W = 0.25 * ds * ds + sh * sh
    p2 = abs(p) ** 2
    gap = 1.0 + 2.0 * W.real - p2 * (delta.imag * math.sinh(2.0 * z.real)
                                     + delta.real * math.sin(2.0 * z.imag))
    return p2, abs(W), gap, p * p


def resonance_bracket(spec: RectDoubleBarrier, E: float) -> float:
    """Real factor 1 - |W|/|U + iV| of the resonant denominator."""
    absP, absW, gap, _ = _modulus_gap(spec, E)
    if absP == 0.0:
        raise SingularInputError("|U + iV| = 0: resonant bracket undefined")
    return gap / ((absP + absW) * absP)


def d_res(spec: RectDoubleBarrier, E_res: float) -> complex:
    """D at a resonance: (U + iV) times the real resonant bracket."""
    absP, absW, gap, P = _modulus_gap(spec, E_res)
    if absP == 0.0:
        raise SingularInputError("|U + iV| = 0: resonant bracket undefined")
    return (P / absP) * (gap / (absP + absW))


def d_res_real(spec: RectDoubleBarrier, E_res: float) -> complex:
    """Closed form for real barrier heights, valid only when Im(U0) == 0."""
    if spec.U0.imag != 0.0:
        raise DomainError("d_res_real requires a real barrier height")
    bk = barrier_kinematics(E_res, spec.U0, spec.m)
    th = cmath.tanh(bk.kappa * spec.b)
    q = 0.25 * bk.delta**2 * th * th
    return (1.0 - q + 1j * bk.delta * th) / (1.0 + q)


def resonant_phase(s: UvwSplit) -> tuple[float, float]:
    """(sin, cos) of 2kw selected at a transmission maximum."""
    M, N = mn(s)
    r = math.hypot(M, N)
    if r == 0.0:
        raise SingularInputError("M = N = 0: extremal condition is degenerate")
    return -M / r, -N / r


def d_sq_over_w(spec, E: float, ws) -> np.ndarray:
    """|D|^2 on an array of well widths at fixed energy (brute-force probe).

    Works for either structure: only ``uvw`` and the wavenumber are used.
    """
    s = spec.uvw(E)
    k = spec.wavenumber(E)
    ph = 2.0 * k * np.asarray(ws, dtype=float)
    D = s.U + s.W * np.cos(ph) + 1j * (s.V + s.W * np.sin(ph))
    return np.abs(D) ** 2


def d_sq_change_over_w(spec, E: float, dw: float) -> float:
    """|D(w + dw)|^2 - |D(w)|^2 at fixed energy, free of cancellation.

    The |P|^2 + |W|^2 part does not depend on w and drops out exactly, so
    only 2 Re(conj(P) W exp(i phi) (exp(i eps) - 1)) with eps = 2 k dw
    remains.
    """
    s = spec.uvw(E)
    k = spec.wavenumber(E)
    ph = 2.0 * k * spec.w
    eps = 2.0 * k * dw
    z = (s.U + 1j * s.V).conjugate() * s.W * complex(math.cos(ph), math.sin(ph))
    step = complex(-2.0 * math.sin(0.5 * eps) ** 2, math.sin(eps))
    return 2.0 * (z * step).real
