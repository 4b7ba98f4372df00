"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line; the lines are repeated in the
terminal summary (see conftest.py).  Run on its own with

    python3 -m pytest tests/test_acceptance.py -v
"""

import itertools
import math
import sys
import time

import numpy as np
import pytest

from dbarrier import checks, cli, delta, rect, resonance, tmatrix
from dbarrier.delta import DeltaDoubleBarrier
from dbarrier.physics import barrier_kinematics, h2m, kinematics
from dbarrier.rect import RectDoubleBarrier
from dbarrier.resonance import find_resonances, track_resonance
from dbarrier.singularity import (
    LocusBranch, alpha_quadratic_residual, cubic_residual, locus_theta, locus_v0r,
    singular_point_delta, singular_point_rect,
)

from conftest import RECIPES, recipe_command

M = 0.067
RESULTS = {}


def report(n, title, ok, detail):
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {title}: {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def run_cli(argv, path):
    t0 = time.perf_counter()
    code = cli.main(list(argv) + ["--out", str(path)])
    return code, time.perf_counter() - t0, path.read_bytes()


def test_criterion_01_rect_singularity(tmp_path):
    import json

    code, dt, out = run_cli(["singularity", "--structure", "rect", "--b", "5", "--w", "5",
                             "--u0r", "0.7", "--mass", "0.067"], tmp_path / "c1.json")
    res = json.loads(out)
    u_uev = res["im_pot"] * 1e6
    ok_u = abs(u_uev - 71.917) <= 0.5
    ok_e = abs(res["E0_eV"] - 0.1194) <= 0.0005
    ok = code == 0 and ok_u and ok_e and dt < 5.0
    report(1, "rect singular point", ok,
           f"U0I = {u_uev:.4f} ueV (target 71.917 +- 0.5, {'ok' if ok_u else 'off by ' + format(abs(u_uev - 71.917) - 0.5, '.3f') + ' ueV beyond tolerance'}), "
           f"E0 = {res['E0_eV']:.6f} eV (target 0.1194 +- 0.0005), {dt:.2f} s")


def test_criterion_02_delta_singularity(tmp_path):
    import json

    code, dt, out = run_cli(["singularity", "--structure", "delta", "--w", "3", "--v0r", "2.3",
                             "--mass", "0.067"], tmp_path / "c2.json")
    res = json.loads(out)
    ok = (code == 0 and abs(res["im_pot"] - 0.5131) <= 0.001 and abs(res["E0_eV"] - 0.4622) <= 0.001
          and dt < 1.0)
    report(2, "delta singular point", ok,
           f"V0I = {res['im_pot']:.6f} nm eV (target 0.5131 +- 0.001), "
           f"E0 = {res['E0_eV']:.6f} eV (target 0.4622 +- 0.001), {dt * 1e3:.1f} ms")


def test_criterion_03_wells(tmp_path):
    import json

    code, dt, out = run_cli(["singularity", "--structure", "delta", "--w", "3", "--v0r", "-2.3",
                             "--mass", "0.067"], tmp_path / "c3.json")
    res = json.loads(out)
    ok = code == 0 and abs(res["im_pot"] - 0.71) <= 0.005 and dt < 1.0
    report(3, "double delta wells", ok,
           f"V0I = {res['im_pot']:.6f} nm eV (target 0.71 +- 0.005), {dt * 1e3:.1f} ms")


def _resonances(spec):
    # short strong wells put their first level above the default window
    res = find_resonances(spec)
    return res or find_resonances(spec, resonance.default_window(spec)[0], 30.0)


def test_criterion_04_real_resonance_unitarity():
    worst, count, empty = 0.0, 0, []
    for b, w, u in itertools.product([0.5, 1.0, 2.0, 5.0, 10.0], [1.0, 2.0, 4.0, 7.0, 10.0],
                                     [0.1, 0.3, 0.7, 1.2, 2.0]):
        spec = RectDoubleBarrier(b, w, u, M)
        res = _resonances(spec)
        empty += [] if res else [spec]
        for r in res:
            worst = max(worst, abs(r.t_res_sq - 1.0))
            count += 1
    n_rect = count
    for w, v, m in itertools.product([1.0, 2.0, 4.0, 7.0, 10.0], [-3.0, -1.0, 0.5, 2.3, 5.0],
                                     [0.05, 0.067, 0.2, 0.5, 1.0]):
        spec = DeltaDoubleBarrier(w, v, m)
        res = _resonances(spec)
        empty += [] if res else [spec]
        for r in res:
            worst = max(worst, abs(r.t_res_sq - 1.0))
            count += 1
    ok = worst < 1e-9 and not empty
    report(4, "real-potential resonances have |T_res|^2 = 1", ok,
           f"{n_rect} rect + {count - n_rect} delta resonances over 2 x 125 structures, "
           f"max ||T_res|^2 - 1| = {worst:.2e} (tol 1e-9), structures without resonance: {len(empty)}")


def _sweep(base, E_seed, values):
    out = []
    E = E_seed
    for v in values:
        spec = base.with_im_pot(float(v))
        r = track_resonance(spec, E)
        E = r.E0
        A = delta.absorption(spec, E) if spec.kind == "delta" else tmatrix.absorption_direct(spec, E)
        out.append((float(v), r.t_res_sq, A))
    return out


def test_criterion_05_sign_structure():
    bad, total = [], 0
    cases = [
        (RectDoubleBarrier(5.0, 5.0, 0.7, M), singular_point_rect(5.0, 5.0, 0.7, M).im_pot, -2e-4),
        (DeltaDoubleBarrier(3.0, 2.3, M), singular_point_delta(2.3, 3.0, M).im_pot, -1.0),
    ]
    for base, singular, lowest in cases:
        seed = find_resonances(base, max_count=1)[0].E0
        below = np.linspace(0.0, lowest, 51)[1:]
        above = np.linspace(0.0, singular, 52)[1:-1]
        for v, t2, A in _sweep(base, seed, below):
            total += 1
            if not (t2 < 1.0 and A > 0.0):
                bad.append((base.kind, v, t2, A))
        for v, t2, A in _sweep(base, seed, above):
            total += 1
            if not (t2 > 1.0 and A < 0.0):
                bad.append((base.kind, v, t2, A))
    report(5, "sign structure of |T_res|^2 and A", not bad,
           f"{total - len(bad)}/{total} sampled points follow loss (T<1, A>0) / gain (T>1, A<0)")


def test_criterion_06_identities():
    rng = np.random.default_rng(6)
    worst_id = worst_branch = worst_literal = 0.0
    for _ in range(1000):
        spec, E = checks.draw_rect(rng)
        s = spec.uvw(E)
        worst_id = max(worst_id, s.identity_residual())
        ph = 2.0 * spec.wavenumber(E) * spec.w
        D_plus = rect._d_from_uvw(rect.uvw(spec, E), ph)
        D_minus = rect._d_from_uvw(rect.uvw(spec, E, kappa_sign=-1), ph)
        worst_branch = max(worst_branch, abs(D_plus - D_minus) / abs(D_plus))
        # the same check on the textbook delta / sigma form
        bk = barrier_kinematics(E, spec.U0, spec.m)
        lit = []
        for sgn in (1, -1):
            kap = sgn * bk.kappa
            k = kinematics(E, spec.m).k
            dl = (kap * kap - k * k) / (kap * k)
            ch, sh = np.cosh(kap * spec.b), np.sinh(kap * spec.b)
            U, V, W = ch * ch - dl * dl / 4 * sh * sh, dl * ch * sh, (dl * dl + 4) / 4 * sh * sh
            lit.append(U + W * np.exp(1j * ph) + 1j * V)
        worst_literal = max(worst_literal, abs(lit[0] - lit[1]) / abs(lit[0]))
    ok = worst_id < 1e-12 and worst_branch < 1e-12 and worst_literal < 1e-12
    report(6, "U^2 + V^2 = (1+W)^2 and kappa-branch invariance", ok,
           f"1000 draws: identity {worst_id:.2e}, branch {worst_branch:.2e} "
           f"(textbook form {worst_literal:.2e}), tol 1e-12")


def test_criterion_07_oracle_equivalence():
    rep = checks.oracle_check(draws=1000, seed=20240607)
    ok = (rep["pass"] and rep["max_rel_err_T"] < 1e-10 and rep["max_rel_err_R"] < 1e-10
          and rep["max_rel_err_T2"] < 1e-10 and rep["max_rel_err_R2"] < 1e-10
          and rep["max_abs_err_unitarity"] < 1e-8 and rep["max_abs_err_absorption"] < 1e-8)
    report(7, "closed forms vs transfer-matrix oracle", ok,
           f"1000 draws per family (skipped near pole {rep['skipped_near_pole']}): "
           f"T {rep['max_rel_err_T']:.1e}, R {rep['max_rel_err_R']:.1e}, "
           f"unitarity {rep['max_abs_err_unitarity']:.1e}, absorption {rep['max_abs_err_absorption']:.1e}")


def test_criterion_08_forced_root():
    rng = np.random.default_rng(8)
    worst_cubic = 0.0
    for _ in range(100):
        a = 10.0 ** rng.uniform(-2.0, 2.0)
        V0R = rng.uniform(-3.0, 3.0)
        worst_cubic = max(worst_cubic, abs(cubic_residual(1.0 / (2.0 * math.sqrt(a)), a, V0R)))
    worst_half = worst_quad = 0.0
    for _ in range(100):
        V0R = rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 5.0)
        w, m = rng.uniform(0.5, 10.0), rng.uniform(0.05, 1.0)
        p = singular_point_delta(V0R, w, m)
        spec = DeltaDoubleBarrier(w, complex(V0R, p.im_pot), m)
        worst_half = max(worst_half, abs(math.sqrt(kinematics(p.E0, m).a) * p.im_pot - 0.5))
        worst_quad = max(worst_quad, abs(alpha_quadratic_residual(spec, p.E0)))
    ok = worst_cubic < 1e-12 and worst_half < 1e-12 and worst_quad < 1e-8
    report(8, "forced cubic root and singular-point relations", ok,
           f"cubic at 1/(2 sqrt a) {worst_cubic:.1e} (tol 1e-12), sqrt(a) V0I - 1/2 {worst_half:.1e} "
           f"(tol 1e-12), alpha quadratic {worst_quad:.1e} (tol 1e-8)")


def test_criterion_09_locus_round_trip():
    w = 3.0
    slope = 2.0 * h2m(M) / w
    worst, count, wrong_branch = 0.0, 0, 0
    for sign in ("barrier", "well"):
        for kind in ("tan", "cot"):
            for n in (0, 1):
                br = LocusBranch(n, kind, sign)
                lo, hi = br.domain
                span = hi - lo
                for th in np.linspace(lo + 0.02 * span, hi - 0.02 * span, 50):
                    V0R = locus_v0r(th * slope, w, M, sign)
                    p = singular_point_delta(V0R, w, M, branch=br.ordinal)
                    wrong_branch += p.branch != br
                    worst = max(worst, abs(locus_v0r(p.im_pot, w, M, sign) - V0R))
                    count += 1
    ok = worst < 1e-9 and wrong_branch == 0
    report(9, "locus_v0r after singular_point_delta is the identity", ok,
           f"{count} points on tan/cot branches n = 0, 1 for barriers and wells, "
           f"max |dV0R| = {worst:.1e} nm eV (tol 1e-9)")


def test_criterion_10_determinism(tmp_path):
    import subprocess

    differing = []
    for recipe in RECIPES:
        argv = [recipe_command(recipe), "--scenario", str(recipe)]
        _, _, first = run_cli(argv, tmp_path / f"{recipe.stem}.1")
        _, _, second = run_cli(argv, tmp_path / f"{recipe.stem}.2")
        if first != second:
            differing.append(recipe.stem)
    # one more run per CSV recipe family in a fresh interpreter
    for stem in ("rect_res_sweep", "delta_res_sweep", "locus_barrier"):
        recipe = next(p for p in RECIPES if p.stem == stem)
        out = tmp_path / f"{stem}.3"
        subprocess.run([sys.executable, "-m", "dbarrier", recipe_command(recipe), "--scenario",
                        str(recipe), "--out", str(out)], check=True)
        if out.read_bytes() != (tmp_path / f"{stem}.1").read_bytes():
            differing.append(stem + " (new process)")
    report(10, "scenario recipes are byte-deterministic", not differing,
           f"{len(RECIPES)} recipes re-run in-process, 3 in a fresh process; differing: {differing or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
