"""
Transfer-matrix solution of the 1D scattering problem for piecewise-constant
potentials and delta interfaces.

The state vector is (psi, psi') and every region maps it across its extent
with a unimodular 2x2 matrix.  The solution with unit transmitted amplitude
is propagated backwards from the right edge; decomposing the resulting left
state into incident and reflected plane waves gives T and R.  Plane-wave
bookkeeping only happens at the outer boundaries.

This module is deliberately independent of the closed forms in ``rect`` and
``delta``; the tests use it as the reference for those formulas.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, Divergence, SingularKinematicsError, TransferOverflowError
from .physics import h2m, kinematics, principal_sqrt

# Largest |Re(kappa) * length| handled in one step before renormalising.
_MAX_EXPONENT = 350.0
_DIVERGENCE_RTOL = 1e-10


@dataclass(frozen=True)
class PiecewiseRegion:
    """A constant-potential slab, or a delta interface when ``length == 0``.

    ``potential`` is in eV for slabs and in nm*eV (delta strength) for
    interfaces.
    """

    length: float
    potential: complex = 0.0

    def __post_init__(self):
        if not (self.length >= 0.0):
            raise DomainError(f"region length must be >= 0, got {self.length!r}")
        object.__setattr__(self, "potential", complex(self.potential))


@dataclass(frozen=True)
class ScatteringState:
    psi_0: complex  # psi at the left edge of the structure
    psi_w: complex  # psi at the right edge of the structure
    T: complex
    R: complex
    k: float
    nodes: tuple  # (x, psi, dpsi) at every interface, left to right

    @property
    def T2(self):
        return abs(self.T) ** 2

    @property
    def R2(self):
        return abs(self.R) ** 2


def region_matrix(region: PiecewiseRegion, E: float, m, inverse: bool = False) -> np.ndarray:
    """Matrix mapping (psi, psi') from the left edge of ``region`` to its right edge."""
    c = h2m(m)
    sgn = -1.0 if inverse else 1.0
    if region.length == 0.0:
        return np.array([[1.0, 0.0], [sgn * region.potential / c, 1.0]], dtype=complex)
    q = principal_sqrt((region.potential - E) / c)
    L = sgn * region.length
    if q == 0.0:
        return np.array([[1.0, L], [0.0, 1.0]], dtype=complex)
    ch, sh = cmath.cosh(q * L), cmath.sinh(q * L)
    return np.array([[ch, sh / q], [q * sh, ch]], dtype=complex)


def _pieces(region: PiecewiseRegion, E: float, m):
    if region.length == 0.0:
        return [region]
    q = principal_sqrt((region.potential - E) / h2m(m))
    n = max(1, math.ceil(abs(q.real) * region.length / _MAX_EXPONENT))
    return [PiecewiseRegion(region.length / n, region.potential)] * n


def tm_scatter(regions, E: float, m, x0: float = 0.0) -> ScatteringState:
    """Scatter a unit-amplitude wave incident from the left off ``regions``.

    The structure starts at ``x0``.  On the left psi = exp(ikx) + R exp(-ikx),
    on the right psi = T exp(ikx).
    """
    regions = [r if isinstance(r, PiecewiseRegion) else PiecewiseRegion(*r) for r in regions]
    if not regions:
        raise DomainError("at least one region is required")
    k = kinematics(E, m).k
    xs = [x0]
    for r in regions:
        xs.append(xs[-1] + r.length)
    xR = xs[-1]

    # unit transmitted wave, propagated right to left with a running log scale
    state = cmath.exp(1j * k * xR) * np.array([1.0, 1j * k])
    logscale = 0.0
    stored = [(xR, state.copy(), logscale)]
    for i in range(len(regions) - 1, -1, -1):
        for piece in _pieces(regions[i], E, m):
            state = region_matrix(piece, E, m, inverse=True) @ state
            norm = float(np.max(np.abs(state)))
            if not math.isfinite(norm):
                raise TransferOverflowError(f"non-finite transfer-matrix state at E = {E!r}")
            if norm > 0.0:
                state = state / norm
                logscale += math.log(norm)
        stored.append((xs[i], state.copy(), logscale))
    stored.reverse()

    psi, dpsi = state
    ein = cmath.exp(1j * k * x0)
    A = 0.5 * (psi + dpsi / (1j * k)) / ein  # incident
    B = 0.5 * (psi - dpsi / (1j * k)) * ein  # reflected
    if A == 0.0 or abs(A) <= _DIVERGENCE_RTOL * max(1.0, abs(B)):
        raise Divergence(f"incident amplitude vanishes at E = {E!r} eV", E=E, D=A)
    R = B / A
    # T = 1 / (A * exp(logscale)); psi at each node rescaled the same way
    logA = math.log(abs(A)) + logscale
    T = cmath.exp(-logA - 1j * cmath.phase(A))
    nodes = []
    for x, st, ls in stored:
        f = cmath.exp(ls - logA - 1j * cmath.phase(A))
        nodes.append((x, complex(st[0] * f), complex(st[1] * f)))
    if not all(map(cmath.isfinite, (T, R))):
        raise TransferOverflowError(f"non-finite amplitudes at E = {E!r}")
    return ScatteringState(psi_0=nodes[0][1], psi_w=nodes[-1][1], T=T, R=R, k=k,
                           nodes=tuple(nodes))


def regions_for(structure):
    """Regions and start coordinate of a structure, centred on x = 0."""
    if structure.kind == "rect":
        b, w, U0 = structure.b, structure.w, structure.U0
        return [PiecewiseRegion(b, U0), PiecewiseRegion(w, 0.0), PiecewiseRegion(b, U0)], -0.5 * w - b
    if structure.kind == "delta":
        w, V0 = structure.w, structure.V0
        return [PiecewiseRegion(0.0, V0), PiecewiseRegion(w, 0.0), PiecewiseRegion(0.0, V0)], -0.5 * w
    raise DomainError(f"unknown structure kind {structure.kind!r}")


def scatter_structure(structure, E: float) -> ScatteringState:
    regions, x0 = regions_for(structure)
    return tm_scatter(regions, E, structure.m, x0=x0)


def _int_abs2(left, right, q: complex, L: float) -> float:
    """Integral of |psi|^2 over a slab of length L.

    ``left`` and ``right`` are (psi, psi') at the two edges.  psi is written
    as g exp(q (x - L)) + d exp(-q x): the growing amplitude g is read off at
    the right edge and the decaying amplitude d at the left edge, so neither
    is obtained by cancellation and no exponential can overflow (Re q >= 0).
    """
    g = 0.5 * (right[0] + right[1] / q)
    d = 0.5 * (left[0] - left[1] / q)
    qr, qi = q.real, q.imag
    # integral_0^L exp(-2 qr x) dx, equal to the one for exp(2 qr (x - L))
    decay = L if qr == 0.0 else -math.expm1(-2.0 * qr * L) / (2.0 * qr)
    if qi == 0.0:
        osc = complex(L, 0.0)
    else:
        t = 2.0 * qi
        osc = complex(math.sin(t * L) / t, 2.0 * math.sin(0.5 * t * L) ** 2 / t)
    cross = g * d.conjugate() * cmath.exp(-q * L) * osc
    return (abs(g) ** 2 + abs(d) ** 2) * decay + 2.0 * cross.real


def absorption_direct(structure, E: float) -> float:
    """Absorption -(1/(h2m k)) * integral of Im V(x) |psi(x)|^2 dx from the oracle wavefunction."""
    st = scatter_structure(structure, E)
    c = h2m(structure.m)
    if structure.kind == "delta":
        VI = structure.V0.imag
        if VI == 0.0:
            return 0.0
        return -(VI / (c * st.k)) * (abs(st.psi_0) ** 2 + abs(st.psi_w) ** 2)
    UI = structure.U0.imag
    if UI == 0.0:
        return 0.0
    q = principal_sqrt((structure.U0 - E) / c)
    if q == 0.0:
        raise SingularKinematicsError("E equals the barrier height")
    # nodes: left edge, after barrier 1, after well, right edge
    n0, n1, n2, n3 = [(p, dp) for _, p, dp in st.nodes]
    total = _int_abs2(n0, n1, q, structure.b) + _int_abs2(n2, n3, q, structure.b)
    return -(UI / (c * st.k)) * total
