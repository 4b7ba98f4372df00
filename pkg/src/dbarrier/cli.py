"""
Command-line front end.

    dbarrier spectrum     --structure delta --w 3 --v0r 2.3 --v0i 0.3 --emin 0.01 --emax 2
    dbarrier res-sweep    --structure delta --w 3 --v0r 2.3 --im-min -1 --im-max 2 --points 601
    dbarrier singularity  --structure rect --b 5 --w 5 --u0r 0.7
    dbarrier locus        --w 3 --sign barrier --im-min 0.01 --im-max 3 --points 500
    dbarrier cubic        --v0r 2.3 --energy 0.4622 --im-min 0 --im-max 1 --points 201
    dbarrier oracle-check --draws 1000

Every command accepts ``--scenario file.json``; explicit flags override
fields of the file.  CSV output carries ``#`` metadata lines, a header row
and a trailing ``flag`` column (``pole`` at divergences, ``lost`` when a
resonance could not be followed).  Floats are written with 17 significant
digits.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__, checks, delta, rect, tmatrix
from .delta import DeltaDoubleBarrier
from .errors import DBarrierError, Divergence, DomainError, SolverError
from .physics import kinematics
from .rect import RectDoubleBarrier
from .resonance import find_resonances, track_resonance
from .singularity import POLE, branch_at, cubic_residual, locus_theta, locus_v0r
from .singularity import singular_point_delta, singular_point_rect

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_ORACLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class Scenario:
    structure: str | None = None
    b: float | None = None
    w: float | None = None
    u0r: float | None = None
    u0i: float = 0.0
    v0r: float | None = None
    v0i: float = 0.0
    mass: float = 0.067
    emin: float | None = None
    emax: float | None = None
    points: int = 1001
    im_min: float | None = None
    im_max: float | None = None
    log_axis: bool = False
    energy: float | None = None
    sign: str = "barrier"
    branch: int | None = None
    resonance: int = 0
    draws: int = 1000
    seed: int = 20240607
    out: str | None = None

    @classmethod
    def from_sources(cls, path, overrides: dict) -> "Scenario":
        data = {}
        if path:
            try:
                with open(path) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read scenario {path}: {exc}") from exc
            data = {k.replace("-", "_"): v for k, v in data.items()}
            unknown = set(data) - {f.name for f in fields(cls)}
            if unknown:
                raise UsageError(f"unknown scenario field(s): {', '.join(sorted(unknown))}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def need(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise UsageError(f"missing required field '{name}'")

    def positive(self, *names):
        for name in names:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0):
                raise UsageError(f"field '{name}' must be positive, got {v!r}")

    def check_structure(self):
        if self.structure not in ("rect", "delta"):
            raise UsageError(f"field 'structure' must be 'rect' or 'delta', got {self.structure!r}")
        self.positive("mass")
        if self.structure == "rect":
            self.need("b", "w", "u0r")
            self.positive("b", "w")
        else:
            self.need("w", "v0r")
            self.positive("w")

    def check_points(self):
        if not isinstance(self.points, int) or self.points < 2:
            raise UsageError(f"field 'points' must be an integer >= 2, got {self.points!r}")

    def build(self, im: float | None = None):
        if self.structure == "rect":
            U0 = complex(self.u0r, self.u0i if im is None else im)
            return RectDoubleBarrier(self.b, self.w, U0, self.mass)
        V0 = complex(self.v0r, self.v0i if im is None else im)
        return DeltaDoubleBarrier(self.w, V0, self.mass)

    def im_grid(self):
        self.need("im_min", "im_max")
        self.check_points()
        lo, hi = self.im_min, self.im_max
        if not lo < hi:
            raise UsageError("field 'im_min' must be smaller than 'im_max'")
        if self.log_axis:
            if lo * hi <= 0:
                raise UsageError("log axis needs 'im_min' and 'im_max' of the same sign, both non-zero")
            return np.geomspace(lo, hi, self.points)
        return np.linspace(lo, hi, self.points)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


class CsvOut:
    def __init__(self, command: str, scenario: Scenario, columns, meta=()):
        self.buf = io.StringIO()
        echo = {k: v for k, v in asdict(scenario).items() if k != "out"}
        self.buf.write(f"# dbarrier {__version__} {command}\n")
        self.buf.write(f"# scenario {json.dumps(echo, sort_keys=True)}\n")
        for key, value in meta:
            self.buf.write(f"# {key} {_fmt(value)}\n")
        self.buf.write(",".join(list(columns) + ["flag"]) + "\n")

    def row(self, values, flag=""):
        self.buf.write(",".join(_fmt(v) for v in values) + "," + flag + "\n")

    def getvalue(self):
        return self.buf.getvalue()


def _energy_grid(sc: Scenario):
    sc.need("emin", "emax")
    sc.check_points()
    if not (0 < sc.emin < sc.emax):
        raise UsageError("need 0 < emin < emax")
    Es = np.linspace(sc.emin, sc.emax, sc.points)
    if sc.structure == "rect" and sc.u0i == 0.0:
        Es = np.where(Es == sc.u0r, Es * (1.0 + 1e-9), Es)
    return Es


def _observables(spec, E):
    """(T2, R2, A, D) at energy E; R and A from the oracle for the rectangular barrier."""
    if spec.kind == "delta":
        sc = delta.scatter(spec, E)
        return sc.T2, sc.R2, sc.A, sc.D
    T = rect.transmission_amplitude(spec, E)
    st = tmatrix.scatter_structure(spec, E)
    return abs(T) ** 2, st.R2, tmatrix.absorption_direct(spec, E), rect.d_of_k(spec, E)


def cmd_spectrum(sc: Scenario) -> str:
    sc.check_structure()
    Es = _energy_grid(sc)
    spec = sc.build()
    out = CsvOut("spectrum", sc, ["E_eV", "T2", "R2", "A", "ReD", "ImD"])
    for E in Es:
        E = float(E)
        try:
            T2, R2, A, D = _observables(spec, E)
            out.row([E, T2, R2, A, D.real, D.imag])
        except Divergence:
            D = spec.d_of_k(E)
            out.row([E, math.inf, math.inf, -math.inf, D.real, D.imag], "pole")
    return out.getvalue()


def _resonant_row(spec, res):
    E0 = res.E0
    if res.divergent:
        return [E0, math.inf, math.inf, -math.inf], "pole"
    try:
        _, R2, A, _ = _observables(spec, E0)
    except Divergence:
        return [E0, math.inf, math.inf, -math.inf], "pole"
    return [E0, res.t_res_sq, R2, A], ""


def cmd_res_sweep(sc: Scenario) -> str:
    sc.check_structure()
    grid = sc.im_grid()
    base = sc.build(im=0.0)
    window = {}
    if sc.emin is not None:
        window["E_min"] = sc.emin
    if sc.emax is not None:
        window["E_max"] = sc.emax
    found = find_resonances(base, max_count=sc.resonance + 1, **window)
    if len(found) <= sc.resonance:
        raise SolverError(f"resonance {sc.resonance} not found in the real structure")
    seed = found[sc.resonance].E0

    # continuation outward from the grid point nearest the real structure
    start = int(np.argmin(np.abs(grid)))
    rows = [None] * len(grid)
    for order in (range(start, len(grid)), range(start - 1, -1, -1)):
        E = seed
        for i in order:
            spec = base.with_im_pot(float(grid[i]))
            try:
                res = track_resonance(spec, E, index=sc.resonance)
            except SolverError:
                rows[i] = ([math.nan] * 4, "lost")
                continue
            E = res.E0
            rows[i] = _resonant_row(spec, res)
    out = CsvOut("res-sweep", sc, ["im_pot", "E0_eV", "T2_res", "R2_res", "A_res"])
    for u, (vals, flag) in zip(grid, rows):
        out.row([float(u)] + vals, flag)
    return out.getvalue()


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def cmd_singularity(sc: Scenario) -> dict:
    sc.check_structure()
    if sc.structure == "delta":
        p = singular_point_delta(sc.v0r, sc.w, sc.mass, branch=sc.branch)
        return {
            "kind": "delta",
            "im_pot": p.im_pot,
            "E0_eV": p.E0,
            "bracket_residual": p.bracket_residual,
            "cubic_residual": p.cubic_residual,
            "branch": {"ordinal": p.branch.ordinal, "n": p.branch.n, "kind": p.branch.kind,
                       "sign": p.branch.sign},
        }
    p = singular_point_rect(sc.b, sc.w, sc.u0r, sc.mass, resonance=sc.resonance)
    return {
        "kind": "rect",
        "im_pot": p.im_pot,
        "E0_eV": p.E0,
        "bracket_residual": p.bracket_residual,
        "branch": {"resonance": p.branch},
    }


def cmd_locus(sc: Scenario) -> str:
    sc.need("w")
    sc.positive("w", "mass")
    if sc.sign not in ("barrier", "well"):
        raise UsageError(f"field 'sign' must be 'barrier' or 'well', got {sc.sign!r}")
    grid = sc.im_grid()
    if grid[0] <= 0:
        raise UsageError("locus needs a positive V0I range")
    out = CsvOut("locus", sc, ["V0I", "theta_rad", "branch_n", "branch_kind", "V0R"])
    for V0I in grid:
        V0I = float(V0I)
        th = locus_theta(V0I, sc.w, sc.mass)
        br = branch_at(th, sc.sign)
        v = locus_v0r(V0I, sc.w, sc.mass, sc.sign)
        if v is POLE:
            out.row([V0I, th, br.n, br.kind, math.inf], "pole")
        else:
            out.row([V0I, th, br.n, br.kind, v])
    return out.getvalue()


def cmd_cubic(sc: Scenario) -> str:
    sc.need("v0r", "energy")
    sc.positive("energy", "mass")
    grid = sc.im_grid()
    a = kinematics(sc.energy, sc.mass).a
    out = CsvOut("cubic", sc, ["V0I", "residual"], meta=[("a", a)])
    for V0I in grid:
        out.row([float(V0I), cubic_residual(float(V0I), a, sc.v0r)])
    return out.getvalue()


def cmd_oracle_check(sc: Scenario) -> dict:
    if not isinstance(sc.draws, int) or sc.draws < 1:
        raise UsageError(f"field 'draws' must be a positive integer, got {sc.draws!r}")
    return checks.oracle_check(draws=sc.draws, seed=sc.seed)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "res-sweep": cmd_res_sweep,
    "singularity": cmd_singularity,
    "locus": cmd_locus,
    "cubic": cmd_cubic,
    "oracle-check": cmd_oracle_check,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("scenario")
    g.add_argument("--scenario", help="JSON scenario file; flags override its fields")
    g.add_argument("--structure", choices=["rect", "delta"])
    g.add_argument("--b", type=float, help="barrier width, nm")
    g.add_argument("--w", type=float, help="well width, nm")
    g.add_argument("--u0r", type=float, help="real barrier height, eV")
    g.add_argument("--u0i", type=float, help="imaginary barrier height, eV")
    g.add_argument("--v0r", type=float, help="real delta strength, nm eV")
    g.add_argument("--v0i", type=float, help="imaginary delta strength, nm eV")
    g.add_argument("--mass", type=float, help="effective mass m/m0 (default 0.067)")
    g.add_argument("--emin", type=float)
    g.add_argument("--emax", type=float)
    g.add_argument("--points", type=int)
    g.add_argument("--im-min", dest="im_min", type=float, help="lower end of the imaginary-part axis")
    g.add_argument("--im-max", dest="im_max", type=float, help="upper end of the imaginary-part axis")
    g.add_argument("--log-axis", dest="log_axis", action="store_const", const=True)
    g.add_argument("--energy", type=float, help="energy for the cubic, eV")
    g.add_argument("--sign", choices=["barrier", "well"])
    g.add_argument("--branch", type=int, help="locus branch ordinal (delta singularity)")
    g.add_argument("--resonance", type=int, help="resonance index followed in sweeps (default 0)")
    g.add_argument("--draws", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help="output path (default stdout)")

    parser = _Parser(prog="dbarrier", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"dbarrier {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "scenario")}
    is_json = args.command in ("singularity", "oracle-check")
    out_path = overrides.get("out")
    try:
        sc = Scenario.from_sources(args.scenario, overrides)
        out_path = sc.out
        result = COMMANDS[args.command](sc)
    except UsageError as exc:
        print(f"dbarrier: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DBarrierError as exc:
        if is_json:
            err = {"error": type(exc).__name__, "message": str(exc)}
            bracket = getattr(exc, "bracket", None)
            if bracket is not None:
                err["bracket"] = list(bracket)
            _emit(json.dumps(err, indent=2, sort_keys=True) + "\n", out_path)
        else:
            print(f"dbarrier: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, DomainError) else EXIT_SOLVER
    if is_json:
        text = json.dumps({k: _json_safe(v) for k, v in result.items()}, indent=2, sort_keys=True) + "\n"
    else:
        text = result
    _emit(text, sc.out)
    if args.command == "oracle-check" and not result["pass"]:
        return EXIT_ORACLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
