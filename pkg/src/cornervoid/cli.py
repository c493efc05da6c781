"""Command-line driver.

    cornervoid <command> [--config run.json] [--out DIR] [overrides]

Commands: wulff, elasticity, equilibrate, minimize, dimension, convergence.
Every command writes its data files plus ``manifest.json`` into ``--out``.
Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import platform
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import elasticity as el
from .energy import (minimize_corner_angles, solution_energy, write_landscape_csv,
                     write_search_json)
from .equilibrium import (ConvergenceError, EquilibriumProblem, NewtonOptions,
                          continuation_in_lambda, write_solution_json)
from .geometry import (HALF_PI, InvalidShapeError, OverlappingCircles, ShapeSpec,
                       WulffShape, orientation_profile, preset_circle,
                       preset_wulff, write_profile_csv, write_shape_csv)
from .params import PhysicalParams
from .surface_energy import wulff_corner_angle

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    epsilon: float = 0.0
    chi: float = 0.0
    Lambda: float = 0.0
    nu: float = 0.3
    N: int = 32
    ladder: tuple = ()
    alpha1: float | None = None
    alpha2: float | None = None
    preset: str = "circle"
    alpha0: float = 2.0 * math.pi / 3.0
    shape_file: str | None = None
    box: float = 0.15
    grid: int = 5
    refine: bool = True
    steps: int = 3
    l0: float = 2e-9
    strain: float = 1e-3
    out: str = "out"

    def params(self) -> PhysicalParams:
        try:
            return PhysicalParams(self.epsilon, self.chi, self.Lambda, self.nu)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self) -> None:
        self.params()
        if self.N < 8:
            raise ConfigError("N must be at least 8")
        if any(int(n) < 8 for n in self.ladder):
            raise ConfigError("ladder entries must be at least 8")
        if self.grid < 1 or self.steps < 1 or self.box <= 0.0:
            raise ConfigError("grid, steps and box must be positive")
        for a in (self.alpha1, self.alpha2):
            if a is not None and not math.pi <= a < 2 * math.pi:
                raise ConfigError("corner angles must lie in [pi, 2pi)")


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    data = load_config(args.config)
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            data[f.name] = val
    if "ladder" in data:
        data["ladder"] = tuple(int(n) for n in data["ladder"])
    try:
        cfg = RunConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([repr(v) if isinstance(v, float) else v for v in row])


# commands -----------------------------------------------------------------

def wulff_l2_errors(eps: float, ladder) -> list:
    """L2 error of the solved stress-free shape against the exact one."""
    from .equilibrium import solve_equilibrium
    exact = WulffShape(eps)
    a0 = exact.alpha0
    out = []
    for N in ladder:
        sol = solve_equilibrium(EquilibriumProblem(PhysicalParams(epsilon=eps),
                                                   (a0, a0), int(N)))
        err = el.l2_error(lambda t: sol.shape.radius(t, 0)[0],
                          lambda t: exact.radius(t, 0)[0])
        out.append((int(N), err, sol.converged))
    return out


def cmd_wulff(cfg: RunConfig, out: Path) -> dict:
    eps = cfg.epsilon
    a0 = wulff_corner_angle(eps)
    info = {"epsilon": eps, "alpha0": a0, "has_corner": a0 > math.pi}
    shape = WulffShape(eps) if a0 > math.pi else preset_circle()
    write_shape_csv(out / "wulff_shape.csv", shape)
    if cfg.ladder and a0 > math.pi:
        rows = wulff_l2_errors(eps, cfg.ladder)
        _write_rows(out / "wulff_convergence.csv", ["N", "l2_error", "converged"], rows)
        info["ladder"] = [list(r) for r in rows]
    _write_json(out / "corner_angle.json", info)
    return info


def _preset_shape(cfg: RunConfig):
    if cfg.preset == "circle":
        return preset_circle()
    if cfg.preset == "overlapping_circles":
        return OverlappingCircles(cfg.alpha0)
    if cfg.preset == "wulff":
        return preset_wulff(cfg.epsilon, cfg.N)
    if cfg.preset == "file":
        if not cfg.shape_file:
            raise ConfigError("preset 'file' needs shape_file")
        with open(cfg.shape_file, encoding="utf-8") as fh:
            data = json.load(fh)
        coeffs = np.asarray(data["shape_coeffs"], dtype=float)
        a1, a2 = data["angles"]
        return ShapeSpec.with_angles(a1, a2, coeffs[4:], coeffs[:4])
    raise ConfigError(f"unknown preset {cfg.preset!r}")


def cmd_elasticity(cfg: RunConfig, out: Path) -> dict:
    shape = _preset_shape(cfg)
    sol = el.solve(shape, cfg.chi, cfg.N)
    el.write_trace_csv(out / "trace.csv", sol)
    diag = sol.diagnostics()
    diag["traction_residual"] = el.traction_residual(sol)
    if cfg.preset == "circle":
        diag["kirsch_l2_error"] = el.l2_error(sol.trace,
                                              lambda t: el.kirsch_trace(t, cfg.chi))
    if cfg.ladder:
        rows = []
        for N in cfg.ladder:
            a = el.solve(shape, cfg.chi, int(N))
            b = el.solve(shape, cfg.chi, 2 * int(N))
            rows.append((int(N), el.l2_error(a.trace, b.trace)))
        _write_rows(out / "elasticity_convergence.csv", ["N", "l2_diff_vs_2N"], rows)
        diag["ladder"] = [list(r) for r in rows]
    _write_json(out / "diagnostics.json", diag)
    return diag


def _angles(cfg: RunConfig) -> tuple:
    a0 = wulff_corner_angle(cfg.epsilon)
    return (cfg.alpha1 if cfg.alpha1 is not None else a0,
            cfg.alpha2 if cfg.alpha2 is not None else a0)


def cmd_equilibrate(cfg: RunConfig, out: Path) -> dict:
    problem = EquilibriumProblem(cfg.params(), _angles(cfg), cfg.N)
    sol = continuation_in_lambda(problem, cfg.Lambda, cfg.steps)
    write_solution_json(out / "solution.json", sol)
    write_shape_csv(out / "shape.csv", sol.shape)
    prof = orientation_profile(sol.shape)
    write_profile_csv(out / "orientation_profile.csv", prof)
    rep = solution_energy(sol)
    info = {"energy": rep.to_dict(), "mu": sol.mu, "converged": sol.converged,
            "residual_norm": sol.residual_norm,
            "orientation_jumps": prof.jumps.tolist()}
    _write_json(out / "energy.json", info)
    return info


def cmd_minimize(cfg: RunConfig, out: Path) -> dict:
    center = None
    if cfg.alpha1 is not None or cfg.alpha2 is not None:
        center = _angles(cfg)
    res = minimize_corner_angles(cfg.params(), cfg.N, cfg.box, cfg.grid,
                                 center=center, refine=cfg.refine, steps=cfg.steps)
    write_landscape_csv(out / "landscape.csv", res)
    write_search_json(out / "search.json", res)
    a0 = wulff_corner_angle(cfg.epsilon)
    info = res.to_dict()
    info["relative_deviation"] = [abs(a - a0) / a0 for a in res.best_angles]
    _write_json(out / "deviation.json", {"alpha0": a0,
                                         "relative_deviation": info["relative_deviation"]})
    return info


def void_size(l0: float, strain: float, Lambda: float) -> float:
    """Dimensional void size a = Lambda l0 / (2 strain^2)."""
    if strain == 0.0:
        raise ConfigError("strain must be non-zero")
    if l0 <= 0.0:
        raise ConfigError("l0 must be positive")
    if Lambda < 0.0:
        raise ConfigError("Lambda must be non-negative")
    return Lambda * l0 / (2.0 * strain * strain)


def cmd_dimension(cfg: RunConfig, out: Path) -> dict:
    a = void_size(cfg.l0, cfg.strain, cfg.Lambda)
    info = {"l0_cm": cfg.l0, "strain": cfg.strain, "Lambda": cfg.Lambda,
            "void_size_cm": a, "void_size_um": a * 1e4}
    _write_json(out / "dimension.json", info)
    return info


def cmd_convergence(cfg: RunConfig, out: Path) -> dict:
    """Energy of the stressed equilibrium over an N ladder."""
    ladder = cfg.ladder or (cfg.N, 2 * cfg.N)
    rows = []
    for N in ladder:
        problem = EquilibriumProblem(cfg.params(), _angles(cfg), int(N))
        sol = continuation_in_lambda(problem, cfg.Lambda, cfg.steps)
        rep = solution_energy(sol)
        rows.append((int(N), rep.total, rep.surface, rep.elastic, sol.residual_norm))
    _write_rows(out / "energy_convergence.csv",
                ["N", "energy", "surface", "elastic", "residual"], rows)
    return {"ladder": [list(r) for r in rows]}


COMMANDS = {"wulff": cmd_wulff, "elasticity": cmd_elasticity,
            "equilibrate": cmd_equilibrate, "minimize": cmd_minimize,
            "dimension": cmd_dimension, "convergence": cmd_convergence}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cornervoid", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config")
    p.add_argument("--out")
    for name, typ in (("epsilon", float), ("chi", float), ("Lambda", float),
                      ("nu", float), ("N", int), ("alpha1", float),
                      ("alpha2", float), ("alpha0", float), ("box", float),
                      ("grid", int), ("steps", int), ("l0", float),
                      ("strain", float), ("preset", str), ("shape_file", str)):
        p.add_argument(f"--{name}", dest=name, type=typ)
    p.add_argument("--ladder", type=lambda s: tuple(int(v) for v in s.split(",")))
    p.add_argument("--no-refine", dest="refine", action="store_false", default=None)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    start = time.perf_counter()
    try:
        cfg = build_config(args)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    status, result, error = EXIT_OK, None, None
    try:
        result = COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        status, error = EXIT_CONFIG, f"config error: {exc}"
    except (ConvergenceError, InvalidShapeError) as exc:
        last = getattr(exc, "last_lambda", None)
        status, error = EXIT_SOLVER, f"solver did not converge: {exc}" + (
            f" (last good Lambda {last:g})" if last is not None else "")
    except OSError as exc:
        status, error = EXIT_IO, f"I/O error: {exc}"
    manifest = {"command": args.command, "config": asdict(cfg),
                "exit_code": status, "error": error, "result": result,
                "runtime_s": time.perf_counter() - start,
                "versions": {"cornervoid": __version__,
                             "python": platform.python_version(),
                             "numpy": np.__version__, "scipy": scipy.__version__}}
    try:
        _write_json(out / "manifest.json", manifest)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if error:
        print(error, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
