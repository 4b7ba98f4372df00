"""
Resonance search for double-barrier structures.

A resonance is an energy at which |D|^2 is minimal with respect to the well
width, i.e. tan(2kw) = M/N with the sign of (sin 2kw, cos 2kw) chosen
opposite to (M, N).  Candidates come from sign changes of the residual
sin(2kw) N - cos(2kw) M on a uniform energy grid and are refined by
bracketing.

For real potentials the same energies are maxima of |T|^2(E); with a complex
potential the |T|^2(E) peak is shifted slightly, so maximality is checked in
the well width rather than in energy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, SingularKinematicsError, SolverError
from .rect import d_sq_change_over_w, mn

log = logging.getLogger(__name__)

DEFAULT_GRID = 2000
E_XTOL = 1e-14
W_PROBE = 1e-6  # nm
NUDGE = 1e-9


@dataclass(frozen=True)
class ResonanceResult:
    E0: float
    D_res: complex
    t_res_sq: float
    index: int
    residual: float  # |sin(2kw) N - cos(2kw) M| / sqrt(M^2 + N^2)
    divergent: bool = False


def resonance_residual(structure, E: float) -> float:
    """sin(2kw) N - cos(2kw) M; zero where |D|^2 is extremal in w."""
    M, N = mn(structure.uvw(E))
    ph = 2.0 * structure.wavenumber(E) * structure.w
    return math.sin(ph) * N - math.cos(ph) * M


def _residual_and_curvature(structure, E):
    """Normalised residual and the selector N cos + M sin (negative at a resonance)."""
    M, N = mn(structure.uvw(E))
    r = math.hypot(M, N)
    if r == 0.0:
        return 0.0, 0.0
    ph = 2.0 * structure.wavenumber(E) * structure.w
    s, c = math.sin(ph), math.cos(ph)
    return (s * N - c * M) / r, (c * N + s * M) / r


def normalized_residual(structure, E: float) -> float:
    return _residual_and_curvature(structure, E)[0]


def _safe_energy(structure, E):
    U0 = getattr(structure, "U0", None)
    if U0 is not None and U0.imag == 0.0 and E == U0.real:
        return E * (1.0 + NUDGE)
    return E


def _f(structure, E):
    try:
        return normalized_residual(structure, E)
    except SingularKinematicsError:
        return normalized_residual(structure, E * (1.0 + NUDGE))


def default_window(structure) -> tuple[float, float]:
    scale = structure.energy_scale
    lo = 1e-3 * scale if scale > 0.0 else 1e-3
    return lo, 3.0 * max(scale, 1.0)


def is_w_minimum(structure, E: float, probe: float = W_PROBE) -> bool:
    """True when |D|^2 at E does not decrease for well widths w +- probe."""
    return bool(d_sq_change_over_w(structure, E, probe) >= 0.0
                and d_sq_change_over_w(structure, E, -probe) >= 0.0)


def _classify(structure, E0):
    """True for a resonance, False for an antiresonance, None when the two checks disagree."""
    _, curv = _residual_and_curvature(structure, E0)
    by_sign = curv < 0.0
    by_probe = is_w_minimum(structure, E0)
    if by_sign != by_probe:
        return None
    return by_sign


def _result(structure, E0, index):
    D = structure.d_res(E0)
    t2 = math.inf if D == 0 else 1.0 / abs(D) ** 2
    return ResonanceResult(E0=E0, D_res=D, t_res_sq=t2, index=index,
                           residual=abs(normalized_residual(structure, E0)),
                           divergent=not math.isfinite(t2))


def _refine(structure, lo, hi, flo, fhi):
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    try:
        return brentq(lambda E: _f(structure, E), lo, hi, xtol=E_XTOL, maxiter=200)
    except (RuntimeError, ValueError) as exc:
        raise SolverError(f"resonance refinement failed: {exc}", bracket=(lo, hi)) from exc


def find_resonances(structure, E_min: float | None = None, E_max: float | None = None,
                    max_count: int | None = None, n_grid: int = DEFAULT_GRID) -> list[ResonanceResult]:
    """Resonances of ``structure`` in [E_min, E_max], ascending in energy."""
    if E_min is None or E_max is None:
        lo, hi = default_window(structure)
        E_min = lo if E_min is None else E_min
        E_max = hi if E_max is None else E_max
    if not (0.0 < E_min < E_max):
        raise DomainError(f"need 0 < E_min < E_max, got ({E_min!r}, {E_max!r})")
    Es = [_safe_energy(structure, E) for E in np.linspace(E_min, E_max, n_grid)]
    fs = [_f(structure, E) for E in Es]
    found = []
    for i in range(len(Es) - 1):
        if fs[i] == 0.0 and i > 0:
            continue  # counted as the right end of the previous interval
        if fs[i] * fs[i + 1] > 0.0:
            continue
        E0 = _refine(structure, Es[i], Es[i + 1], fs[i], fs[i + 1])
        kind = _classify(structure, E0)
        if kind is None:
            log.warning("discarding ambiguous extremum at E = %.12g eV", E0)
            continue
        if kind:
            found.append(E0)
            if max_count is not None and len(found) >= max_count:
                break
    return [_result(structure, E0, i) for i, E0 in enumerate(found)]


def track_resonance(structure, E_seed: float, index: int = 0, step: float | None = None,
                    max_levels: int = 80) -> ResonanceResult:
    """Resonance of ``structure`` nearest to ``E_seed``.

    Intervals of geometrically growing width are examined on both sides of
    the seed; the first level that contains a resonance wins.  Used for
    continuation along sweeps of the imaginary potential.
    """
    h = step if step is not None else 1e-7 * max(E_seed, 1e-6)
    f0 = _f(structure, E_seed)
    if f0 == 0.0 and _classify(structure, E_seed):
        return _result(structure, E_seed, index)
    inner = 0.0
    for _ in range(max_levels):
        outer = inner * 2.0 if inner > 0.0 else h
        candidates = []
        for a, b in ((E_seed + inner, E_seed + outer), (E_seed - outer, E_seed - inner)):
            a = max(a, 1e-12 * E_seed)
            if b <= a:
                continue
            fa, fb = _f(structure, a), _f(structure, b)
            if fa * fb > 0.0:
                continue
            E0 = _refine(structure, a, b, fa, fb)
            if _classify(structure, E0):
                candidates.append(E0)
        if candidates:
            E0 = min(candidates, key=lambda e: abs(e - E_seed))
            return _result(structure, E0, index)
        inner = outer
    raise SolverError(f"no resonance found near E = {E_seed!r} eV",
                      bracket=(E_seed - inner, E_seed + inner))
