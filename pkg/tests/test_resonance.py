import logging
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from dbarrier import resonance, tmatrix
from dbarrier.delta import DeltaDoubleBarrier
from dbarrier.errors import DomainError, SolverError
from dbarrier.physics import h2m
from dbarrier.rect import RectDoubleBarrier, mn
from dbarrier.resonance import (
    find_resonances, is_w_minimum, normalized_residual, resonance_residual, track_resonance,
)

M = 0.067
REAL_STRUCTURES = [
    RectDoubleBarrier(5.0, 5.0, 0.7, M),
    RectDoubleBarrier(2.0, 4.0, 0.3, M),
    RectDoubleBarrier(1.0, 8.0, 0.5, 0.1),
    DeltaDoubleBarrier(3.0, 2.3, M),
    DeltaDoubleBarrier(6.0, 0.9, 0.2),
]


def oracle_reflection_zero(structure, E_guess, rel=1e-5):
    """Energy where the transfer-matrix reflection amplitude vanishes.

    R(E) is projected on its value at one bracket end, which makes the
    projection change sign exactly where R = 0.
    """
    R = lambda E: tmatrix.scatter_structure(structure, E).R
    h = rel * E_guess
    ref = R(E_guess - h).conjugate()
    return brentq(lambda E: (R(E) * ref).real, E_guess - h, E_guess + h, xtol=1e-15)


def test_ref_rect_first_resonance(ref_rect):
    res = find_resonances(ref_rect, 0.01, 0.5)
    assert res[0].E0 == pytest.approx(0.1194, abs=5e-4)
    # a second sub-barrier level also lies in this window
    assert len(res) == 2
    assert res[1].E0 == pytest.approx(0.4469020323, abs=1e-9)
    assert [r.index for r in res] == [0, 1]


def test_ref_delta_complex_resonance():
    spec = DeltaDoubleBarrier(3.0, 2.3 + 0.5131j, M)
    r = find_resonances(spec, max_count=1)[0]
    assert r.E0 == pytest.approx(0.4622, abs=1e-3)
    assert r.t_res_sq > 100.0


@pytest.mark.parametrize("structure", REAL_STRUCTURES, ids=repr)
def test_real_resonances_match_reflection_zeros(structure):
    res = find_resonances(structure)
    assert res
    for r in res:
        assert r.E0 == pytest.approx(oracle_reflection_zero(structure, r.E0), abs=1e-9)
        assert abs(r.t_res_sq - 1.0) < 1e-9
        assert r.residual < 1e-9


def _transparency_energies(structure, E_max):
    """Energies above a rectangular barrier where each barrier alone is transparent.

    There sinh(kappa b) = 0, so V = W = 0 and D = 1 whatever the well width:
    |T|^2 peaks at 1 but the extremal condition is degenerate (M = N = 0).
    """
    if structure.kind != "rect":
        return []
    out, n = [], 1
    while True:
        E = structure.U0.real + h2m(structure.m) * (n * math.pi / structure.b) ** 2
        if E > E_max:
            return out
        out.append(E)
        n += 1


@pytest.mark.parametrize("structure", REAL_STRUCTURES, ids=repr)
def test_every_transmission_peak_is_found(structure):
    lo, hi = resonance.default_window(structure)
    Es = np.linspace(lo, hi, 40001)
    step = Es[1] - Es[0]
    T2 = np.array([1.0 / abs(structure.d_of_k(E)) ** 2 for E in Es])
    transparent = _transparency_energies(structure, hi)
    peaks = [Es[i] for i in range(1, len(Es) - 1)
             if T2[i] >= T2[i - 1] and T2[i] > T2[i + 1] and T2[i] > 0.5
             and all(abs(Es[i] - Et) > 2 * step for Et in transparent)]
    found = [r.E0 for r in find_resonances(structure)]
    assert len(peaks) == len(found)
    for Ep, E0 in zip(peaks, found):
        assert abs(Ep - E0) <= step
    for Et in transparent:
        s = structure.uvw(Et)
        assert abs(s.W) < 1e-12 and abs(structure.d_of_k(Et) - 1.0) < 1e-12


@pytest.mark.parametrize("ui", [-2e-4, -1e-5, 2e-5, 5e-5])
def test_complex_resonance_is_minimum_in_w(ref_rect, ui):
    spec = ref_rect.with_im_pot(ui)
    for r in find_resonances(spec, 0.01, 0.5):
        assert is_w_minimum(spec, r.E0)
        assert r.residual < 1e-9


@pytest.mark.parametrize("ui", [-2e-4, 0.0, 5e-5])
def test_selected_phase(ref_rect, ui):
    spec = ref_rect.with_im_pot(ui)
    r = find_resonances(spec, 0.01, 0.5)[0]
    Mv, Nv = mn(spec.uvw(r.E0))
    ph = 2.0 * spec.wavenumber(r.E0) * spec.w
    rad = math.hypot(Mv, Nv)
    assert math.sin(ph) == pytest.approx(-Mv / rad, abs=1e-9)
    assert math.cos(ph) == pytest.approx(-Nv / rad, abs=1e-9)


def test_infinite_well_limit():
    w = 3.0
    spec = DeltaDoubleBarrier(w, 500.0, M)
    E1 = math.pi**2 * h2m(M) / w**2
    r = find_resonances(spec, 0.1 * E1, 2.0 * E1, max_count=1)[0]
    assert r.E0 == pytest.approx(E1, rel=0.01)


def test_residual_degenerate_without_barrier():
    spec = RectDoubleBarrier(1e-12, 3.0, 0.4, M)
    assert abs(resonance_residual(spec, 0.2)) < 1e-20


@pytest.mark.parametrize("structure", [
    RectDoubleBarrier(5.0, 5.0, 0.7, M), DeltaDoubleBarrier(3.0, 2.3 + 0.5131j, M),
], ids=["rect", "delta"])
def test_grid_brackets_roots(structure):
    lo, hi = resonance.default_window(structure)
    Es = np.linspace(lo, hi, 2000)
    f = np.array([normalized_residual(structure, E) for E in Es])
    crossings = np.flatnonzero(np.sign(f[:-1]) != np.sign(f[1:]))
    found = find_resonances(structure)
    for r in found:
        assert any(Es[i] <= r.E0 <= Es[i + 1] for i in crossings)


def test_continuity_in_imaginary_part():
    base = DeltaDoubleBarrier(3.0, 2.3, M)
    E = find_resonances(base, max_count=1)[0].E0
    prev = E
    for vi in np.arange(0.0, 1.0, 1e-4)[1:200]:
        E = track_resonance(base.with_im_pot(vi), prev).E0
        assert abs(E - prev) < 1e-3
        prev = E


def test_max_count_keeps_lowest(ref_rect):
    all_ = find_resonances(ref_rect)
    assert [r.E0 for r in find_resonances(ref_rect, max_count=1)] == [all_[0].E0]


def test_empty_window(ref_rect):
    assert find_resonances(ref_rect, 0.2, 0.3) == []


@pytest.mark.parametrize("window", [(0.0, 1.0), (0.5, 0.1), (-1.0, 1.0)])
def test_bad_window(ref_rect, window):
    with pytest.raises(DomainError):
        find_resonances(ref_rect, *window)


def test_grid_point_on_barrier_top_is_nudged():
    spec = RectDoubleBarrier(2.0, 4.0, 0.3, M)
    # 0.3 is an exact grid point of linspace(0.1, 0.5, 5)
    res = find_resonances(spec, 0.1, 0.5, n_grid=5)
    assert all(0.1 <= r.E0 <= 0.5 for r in res)


def test_ambiguous_candidates_are_discarded(monkeypatch, caplog, ref_rect):
    monkeypatch.setattr(resonance, "is_w_minimum", lambda s, E, probe=1e-6: False)
    with caplog.at_level(logging.WARNING, logger="dbarrier.resonance"):
        assert find_resonances(ref_rect, 0.01, 0.5) == []
    assert "ambiguous" in caplog.text


def test_solver_failure_carries_bracket(monkeypatch, ref_rect):
    def broken(*args, **kwargs):
        raise RuntimeError("no convergence")

    monkeypatch.setattr(resonance, "brentq", broken)
    with pytest.raises(SolverError) as info:
        find_resonances(ref_rect, 0.01, 0.5)
    lo, hi = info.value.bracket
    assert 0.01 <= lo < hi <= 0.5


def test_track_from_far_seed(ref_rect):
    r = track_resonance(ref_rect, 0.1)
    assert r.E0 == pytest.approx(0.11932033654, abs=1e-9)
