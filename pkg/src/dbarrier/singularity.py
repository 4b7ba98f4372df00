"""
Transmission singularities: parameter points where the resonant denominator
vanishes and |T|^2, |R|^2 and the absorption all diverge.

For the double delta barrier the singular set has a closed form.  With
theta = m w V0I / hbar^2 = w V0I / (2 h2m) and E0 = V0I^2 / h2m, the real
strength lies on V0R = V0I tan(theta) or V0R = -V0I cot(theta); which piece
applies depends on theta and on whether the deltas are barriers (V0R > 0) or
wells (V0R < 0).  The rectangular barrier has no closed form and is solved
by a nested root search over the imaginary barrier height.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .delta import DeltaDoubleBarrier, resonance_bracket as delta_bracket
from .errors import DomainError, NotFoundError, SolverError
from .physics import EffectiveMass, _as_mass, h2m, kinematics
from .rect import RectDoubleBarrier
from .resonance import find_resonances, track_resonance

HALF_PI = 0.5 * math.pi
POLE_TOL = 1e-9  # rad
MAX_BRANCH = 10_000


class _Pole:
    """Marker returned instead of an infinite V0R at a branch endpoint."""

    def __repr__(self):
        return "POLE"

    def __bool__(self):
        return False


POLE = _Pole()


@dataclass(frozen=True)
class LocusBranch:
    n: int
    kind: str  # "tan" or "cot"
    sign: str = "barrier"  # "barrier" (V0R > 0) or "well" (V0R < 0)

    @classmethod
    def from_ordinal(cls, j: int, sign: str = "barrier") -> "LocusBranch":
        """j-th branch in order of increasing theta; each spans a quarter period."""
        if j < 0:
            raise DomainError(f"branch ordinal must be >= 0, got {j}")
        first, second = ("tan", "cot") if sign == "barrier" else ("cot", "tan")
        return cls(j // 2, first if j % 2 == 0 else second, sign)

    @property
    def ordinal(self) -> int:
        first = "tan" if self.sign == "barrier" else "cot"
        return 2 * self.n + (0 if self.kind == first else 1)

    @property
    def domain(self) -> tuple[float, float]:
        lo = self.ordinal * HALF_PI
        return lo, lo + HALF_PI

    def v0r(self, V0I: float, theta: float) -> float:
        if self.kind == "tan":
            return V0I * math.tan(theta)
        return -V0I / math.tan(theta)

    def __str__(self):
        return f"{self.kind}{self.n}"


@dataclass(frozen=True)
class SingularPoint:
    im_pot: float  # U0I in eV (rect) or V0I in nm eV (delta)
    E0: float
    bracket_residual: float
    cubic_residual: float | None = None
    branch: object = None  # LocusBranch (delta) or resonance index (rect)


def cubic_residual(V0I: float, a: float, V0R: float) -> float:
    """4 a^1.5 V0I^3 - 6 a V0I^2 + 4 a^0.5 (1 + a V0R^2) V0I - 2 a V0R^2 - 1."""
    if not (a > 0.0):
        raise DomainError(f"a must be positive, got {a!r}")
    sa = math.sqrt(a)
    return (4.0 * a * sa * V0I**3 - 6.0 * a * V0I**2
            + 4.0 * sa * (1.0 + a * V0R * V0R) * V0I - 2.0 * a * V0R * V0R - 1.0)


def locus_theta(V0I: float, w: float, m) -> float:
    return w * V0I / (2.0 * h2m(m))


def _sign_of(potential_sign) -> str:
    if potential_sign in ("barrier", "well"):
        return potential_sign
    raise DomainError(f"potential sign must be 'barrier' or 'well', got {potential_sign!r}")


def branch_at(theta: float, potential_sign: str = "barrier") -> LocusBranch:
    return LocusBranch.from_ordinal(int(theta // HALF_PI), _sign_of(potential_sign))


def locus_v0r(V0I: float, w: float, m, potential_sign: str = "barrier"):
    """Real strength V0R on the singular locus at imaginary part ``V0I``.

    Returns :data:`POLE` when theta sits within ``POLE_TOL`` of a branch
    endpoint.
    """
    if not (V0I > 0.0):
        raise DomainError(f"V0I must be positive, got {V0I!r}")
    th = locus_theta(V0I, w, m)
    j = round(th / HALF_PI)
    if abs(th - j * HALF_PI) < POLE_TOL:
        return POLE
    return branch_at(th, potential_sign).v0r(V0I, th)


def _branch_root(V0R, c, br: LocusBranch):
    lo, hi = br.domain
    # V0R(theta) = c * theta * g(theta) is increasing on every branch
    f = lambda th: c * th * (math.tan(th) if br.kind == "tan" else -1.0 / math.tan(th)) - V0R
    eps = 1e-13 * max(1.0, hi)
    a, b = lo + eps, hi - eps
    fa, fb = f(a), f(b)
    if not (fa < 0.0 < fb):
        return None
    return brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def singular_point_delta(V0R: float, w: float, m, branch: int | None = None) -> SingularPoint:
    """Singular (V0I, E0) for real strength ``V0R``.

    ``branch`` is the ordinal of the locus branch (see
    :meth:`LocusBranch.from_ordinal`); by default the branch with the
    smallest V0I that admits a solution is used.
    """
    if V0R == 0.0 or not math.isfinite(V0R):
        raise DomainError(f"V0R must be finite and non-zero, got {V0R!r}")
    if not (w > 0.0):
        raise DomainError(f"w must be positive, got {w!r}")
    m = _as_mass(m)
    c = h2m(m)
    sign = "barrier" if V0R > 0.0 else "well"
    slope = 2.0 * c / w  # V0I = slope * theta
    if branch is None:
        for j in range(MAX_BRANCH):
            br = LocusBranch.from_ordinal(j, sign)
            th = _branch_root(V0R, slope, br)
            if th is not None:
                break
        else:
            raise NotFoundError(f"no singular point for V0R = {V0R!r}")
    else:
        br = LocusBranch.from_ordinal(branch, sign)
        th = _branch_root(V0R, slope, br)
        if th is None:
            raise NotFoundError(f"no singular point on branch {br} ({sign}) for V0R = {V0R!r}")
    V0I = slope * th
    E0 = V0I * V0I / c
    spec = DeltaDoubleBarrier(w, complex(V0R, V0I), m)
    return SingularPoint(im_pot=V0I, E0=E0,
                         bracket_residual=delta_bracket(spec, E0),
                         cubic_residual=cubic_residual(V0I, kinematics(E0, m).a, V0R),
                         branch=br)


def alpha_quadratic_residual(spec: DeltaDoubleBarrier, E: float) -> complex:
    """alpha^2 [1 - exp(2ikw)] - 4i alpha - 4, zero at a singular point."""
    kin = kinematics(E, spec.m)
    al = 2.0 * math.sqrt(kin.a) * spec.V0
    return al * al * (1.0 - cmath.exp(2j * kin.k * spec.w)) - 4j * al - 4.0


def alpha_roots(k: float, w: float) -> tuple[complex, complex]:
    """The two closed-form roots -(cos kw +- 1)/sin kw + i of the alpha quadratic."""
    s, cs = math.sin(k * w), math.cos(k * w)
    return complex(-(cs + 1.0) / s, 1.0), complex(-(cs - 1.0) / s, 1.0)


def _rect_scan(base: RectDoubleBarrier, E_seed: float, index: int, grid):
    """Bracket values along ``grid`` of U0I with continuation in the resonance energy."""
    out = []
    E = E_seed
    for u in grid:
        spec = base.with_im_pot(u)
        res = track_resonance(spec, E, index=index)
        E = res.E0
        out.append((u, E, spec.bracket(E)))
    return out


def singular_point_rect(b: float, w: float, U0R: float, m, resonance: int = 0,
                        scan_points: int = 400, u_max: float | None = None) -> SingularPoint:
    """Imaginary barrier height and energy at which resonance ``resonance`` diverges.

    The resonance is followed from the real structure upwards in U0I on a
    logarithmic grid; the first sign change of the resonant bracket is then
    refined by a nested root search (bracket in U0I, resonance energy by
    continuation from the nearest scanned point).
    """
    if not (U0R > 0.0):
        raise DomainError(f"U0R must be positive, got {U0R!r}")
    m = _as_mass(m)
    base = RectDoubleBarrier(b, w, complex(U0R, 0.0), m)
    res = find_resonances(base, max_count=resonance + 1)
    if len(res) <= resonance:
        raise NotFoundError(f"structure has only {len(res)} resonance(s) in the default window")
    E_seed = res[resonance].E0
    u_max = U0R if u_max is None else u_max
    grid = np.geomspace(1e-9 * U0R, u_max, scan_points)
    scan = _rect_scan(base, E_seed, resonance, grid)
    for (u0, E0, g0), (u1, E1, g1) in zip(scan, scan[1:]):
        if g0 * g1 <= 0.0:
            break
    else:
        gmin = min(scan, key=lambda t: abs(t[2]))
        raise NotFoundError(
            f"resonant bracket keeps its sign on U0I in [{grid[0]:.3g}, {u_max:.3g}] eV; "
            f"smallest |bracket| = {abs(gmin[2]):.3g} at U0I = {gmin[0]:.6g} eV"
        )

    seeds = {"E": E0}

    def g(u):
        spec = base.with_im_pot(u)
        r = track_resonance(spec, seeds["E"], index=resonance)
        seeds["E"] = r.E0
        return spec.bracket(r.E0)

    try:
        U0I = brentq(g, u0, u1, xtol=1e-20, rtol=4 * np.finfo(float).eps, maxiter=200)
    except (RuntimeError, ValueError) as exc:
        raise SolverError(f"singular point refinement failed: {exc}", bracket=(u0, u1)) from exc
    spec = base.with_im_pot(U0I)
    E = track_resonance(spec, seeds["E"], index=resonance).E0
    return SingularPoint(im_pot=U0I, E0=E, bracket_residual=spec.bracket(E),
                         cubic_residual=None, branch=resonance)
