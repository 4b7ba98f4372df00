"""
Random-draw comparison of the closed-form amplitudes against the
transfer-matrix oracle.  Backs the ``oracle-check`` command and the
acceptance tests.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from . import delta, rect, tmatrix
from .delta import DeltaDoubleBarrier
from .errors import DBarrierError
from .rect import RectDoubleBarrier

TOL_T = 1e-10
TOL_R = 1e-10
TOL_UNITARITY = 1e-8
TOL_ABSORPTION = 1e-8
MIN_ABS_D = 1e-6


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _open_unit(rng, lo, hi):
    """Uniform on (lo, hi]."""
    return hi - (hi - lo) * rng.random()


def draw_rect(rng) -> tuple[RectDoubleBarrier, float]:
    while True:
        spec = RectDoubleBarrier(
            b=_open_unit(rng, 0.0, 10.0), w=_open_unit(rng, 0.0, 10.0),
            U0=complex(rng.uniform(-2.0, 2.0), rng.uniform(-1.0, 1.0)),
            m=rng.uniform(0.05, 1.0),
        )
        E = _open_unit(rng, 0.0, 2.0)
        if E != spec.U0.real or spec.U0.imag != 0.0:
            return spec, E


def draw_delta(rng) -> tuple[DeltaDoubleBarrier, float]:
    spec = DeltaDoubleBarrier(
        w=_open_unit(rng, 0.0, 10.0),
        V0=complex(rng.uniform(-3.0, 3.0), rng.uniform(-1.0, 1.0)),
        m=rng.uniform(0.05, 1.0),
    )
    return spec, _open_unit(rng, 0.0, 2.0)


def _unitarity_err(T2, R2, A):
    # relative to the largest term so near-singular draws are judged fairly
    return abs(T2 + R2 + A - 1.0) / max(1.0, T2, R2, abs(A))


def compare_rect(spec: RectDoubleBarrier, E: float) -> dict | None:
    D = rect.d_of_k(spec, E)
    if abs(D) < MIN_ABS_D:
        return None
    T = rect.transmission_amplitude(spec, E)
    st = tmatrix.scatter_structure(spec, E)
    A = tmatrix.absorption_direct(spec, E)
    return {
        "err_T": _rel(T, st.T),
        "err_T2": abs(abs(T) ** 2 - st.T2) / st.T2,
        "err_unitarity": _unitarity_err(abs(T) ** 2, st.R2, A),
    }


def compare_delta(spec: DeltaDoubleBarrier, E: float) -> dict | None:
    D = delta.d_of_k(spec, E)
    if abs(D) < MIN_ABS_D:
        return None
    sc = delta.scatter(spec, E)
    st = tmatrix.scatter_structure(spec, E)
    A_direct = tmatrix.absorption_direct(spec, E)
    return {
        "err_T": _rel(sc.T, st.T),
        "err_T2": abs(sc.T2 - st.T2) / st.T2,
        "err_R": _rel(sc.R, st.R) if abs(st.R) > 0 else abs(sc.R),
        "err_R2": abs(sc.R2 - st.R2) / st.R2 if st.R2 > 0 else sc.R2,
        "err_unitarity": _unitarity_err(sc.T2, sc.R2, sc.A),
        "err_absorption": abs(sc.A - A_direct) / max(1.0, abs(A_direct)),
    }


def oracle_check(draws: int = 1000, seed: int = 20240607) -> dict:
    """Run ``draws`` random comparisons per structure family.

    Returns a JSON-ready report; ``pass`` is False on any tolerance breach or
    on any draw that raised.
    """
    rng = np.random.default_rng(seed)
    worst = {"rect": {}, "delta": {}}
    skipped = {"rect": 0, "delta": 0}
    failures = []
    for family, draw, compare in (("rect", draw_rect, compare_rect),
                                  ("delta", draw_delta, compare_delta)):
        for _ in range(draws):
            spec, E = draw(rng)
            try:
                errs = compare(spec, E)
            except DBarrierError as exc:
                failures.append(f"{family}: {type(exc).__name__}: {exc}")
                continue
            if errs is None:
                skipped[family] += 1
                continue
            for key, val in errs.items():
                if not math.isfinite(val):
                    val = math.inf
                worst[family][key] = max(worst[family].get(key, 0.0), val)

    def mx(key):
        return max(worst[f].get(key, 0.0) for f in worst)

    report = {
        "draws": draws,
        "seed": seed,
        "max_rel_err_T": mx("err_T"),
        "max_rel_err_T2": mx("err_T2"),
        "max_rel_err_R": mx("err_R"),
        "max_rel_err_R2": mx("err_R2"),
        "max_abs_err_unitarity": mx("err_unitarity"),
        "max_abs_err_absorption": mx("err_absorption"),
        "skipped_near_pole": skipped,
        "errors": failures,
        "per_family": worst,
    }
    report["pass"] = bool(
        not failures
        and report["max_rel_err_T"] < TOL_T
        and report["max_rel_err_R"] < TOL_R
        and report["max_abs_err_unitarity"] < TOL_UNITARITY
        and report["max_abs_err_absorption"] < TOL_ABSORPTION
    )
    return report
