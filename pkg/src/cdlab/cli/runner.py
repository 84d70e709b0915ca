"""Execute an ExperimentConfig and write CSV files."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .. import bubbles as bub
from ..discretize import ProblemSpec1D, exponential_upg_matrix, solve, solve_reduced_sl
from ..mesh import Mesh1D, NodalField1D, ScalarFn, teeth_saw
from ..norms import (
    FULL,
    Window,
    continuous_star_norm_error,
    discrete_inf_error,
    oscillation_report,
    windowed_errors,
)
from ..oracles import exact_const_f, exact_solution, inverse_via_greens, l2_project, transport
from ..upg2d import assemble_2d, section, solve_2d_fast, solve_reduced_2d
from .config import ConfigError, ExperimentConfig
from .descriptors import Data1D, parse_1d, parse_2d

FLOAT_FMT = "%.17g"
UPG_METHODS = ("upg-quadratic", "upg-scaled", "upg-exponential", "upg-forward")
NO_SOLUTION = ("greens-inverse", "l2-projection")


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % v
    if v is None:
        return ""
    return str(v)


def write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows([fmt(v) for v in row] for row in rows)
    return path


def write_columns(path: Path, columns: dict) -> Path:
    names = list(columns)
    cols = [np.asarray(columns[k], dtype=float) for k in names]
    return write_csv(path, names, zip(*cols))


def tag(eps: float, n: int) -> str:
    return f"eps{eps:.6g}_n{n}"


def resolve_window(window, h: float) -> Window:
    if window is None:
        return FULL
    if isinstance(window, str):
        k = int(window.split(":")[1])
        b = 1.0 - k * h
        if b <= 0:
            raise ConfigError(f"window {window} is empty for h = {h}")
        return Window(0.0, b)
    return Window(float(window[0]), float(window[1]))


def upg_bound(eps: float, h: float, f: ScalarFn) -> float:
    """2 eps |f|_inf + (h^2/4) |f'|_inf."""
    return 2.0 * eps * f.sup + 0.25 * h * h * f.dsup


# --------------------------------------------------------------------------
# 1D


@dataclass
class Solve1D:
    mesh: Mesh1D
    u: Optional[NodalField1D]
    columns: dict = field(default_factory=dict)
    exact: Optional[Callable] = None
    dexact: Optional[Callable] = None
    singular: bool = False
    defect: float = 0.0
    metric: float = math.nan  # method-specific nodal error
    osc_values: Optional[np.ndarray] = None
    osc_pad: bool = True


def _upg_bubble(method: str, eps: float, h: float):
    if method == "upg-quadratic":
        return bub.make_quadratic(h)
    if method == "upg-scaled":
        return bub.make_scaled_quadratic(eps, h)
    if method == "upg-exponential":
        return bub.make_exponential(eps, h)
    return bub.make_forward_quadratic(eps, h)


def _core_solve(method: str, eps: float, f: ScalarFn, mesh: Mesh1D):
    """(u_h or None, singular, defect)."""
    if method == "sl":
        return solve(ProblemSpec1D(eps, f, mesh, "SL")), False, 0.0
    if method == "spls":
        return solve(ProblemSpec1D(eps, f, mesh, "SPLS")), False, 0.0
    if method == "reduced-spls":
        return solve(ProblemSpec1D(0.0, f, mesh, "SPLS")), False, 0.0
    if method == "reduced-sl":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            red = solve_reduced_sl(mesh, f)
        return red.solution, red.singular, red.defect
    bubble = _upg_bubble(method, eps, mesh.h)
    return solve(ProblemSpec1D(eps, f, mesh, bubble)), False, 0.0


def _const_part(eps: float, c: float, x) -> np.ndarray:
    # eps = 0: the transport limit c x (the layer has zero width)
    return c * (exact_const_f(eps, x) if eps > 0 else np.asarray(x, dtype=float))


def solve_1d(method: str, data: Data1D, eps: float, n: int, target: str = "M_tilde") -> Solve1D:
    mesh = Mesh1D(n)
    x = mesh.nodes
    f = data.f
    if method == "greens-inverse":
        t0 = bub.t0(eps, mesh.h)
        mat = exponential_upg_matrix(t0, n - 1).to_dense()
        res = float(np.abs(mat @ inverse_via_greens(eps, mesh) - np.eye(n - 1)).max())
        return Solve1D(mesh, None, metric=res)
    if method == "l2-projection":
        p = l2_project(f, target, mesh)
        cols = {"x": x, "u_h": p.nodal, "g": f(x)}
        return Solve1D(mesh, None, cols, osc_values=p.nodal, osc_pad=False)

    if data.split:
        c = f.mean()
        u0, singular, defect = _core_solve(method, eps, f.shifted(-c), mesh)
        if u0 is None:
            u = None
        else:
            uc = NodalField1D(mesh, _const_part(eps, c, mesh.interior))
            u = u0 + uc
    else:
        u, singular, defect = _core_solve(method, eps, f, mesh)

    out = Solve1D(mesh, u, singular=singular, defect=defect)
    cols = {"x": x, "u_h": u.full if u is not None else np.full(x.shape, np.nan)}
    if data.split:
        cols["u_zero_mean"] = u0.full if u0 is not None else np.full(x.shape, np.nan)
        cols["u_const"] = np.concatenate(([0.0], _const_part(eps, c, mesh.interior), [0.0]))

    if eps > 0 and f.terms is not None:
        ex = exact_solution(eps, f)
        out.exact, out.dexact = ex, ex.derivative

    if method in ("sl", "reduced-sl"):
        if method == "sl":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                red = solve_reduced_sl(mesh, f)
            if not red.singular:
                cols["U_h"] = red.solution.full
        cols["w"] = transport("LR", f, x)
        cols["theta"] = transport("RL", f, x)
        if method == "sl" and n % 2 == 0 and out.exact is not None:
            teeth = teeth_saw(mesh)
            cols["u_plus_teeth"] = out.exact(x) + (mesh.h**2 / (2.0 * eps)) * teeth.full
            cols["u_plus_teeth"][[0, -1]] = 0.0
    if method == "upg-forward":
        cols["w"] = transport("LR", f, x)
    if method == "reduced-spls" and u is not None:
        w = ScalarFn(lambda s: transport("LR", f, s))
        shifted = w.shifted(-w.mean())
        proj = l2_project(shifted, "M_tilde", mesh)
        ubar = u.integral()
        cols["projection"] = proj.nodal + ubar
        out.metric = float(np.max(np.abs(u.values - ubar - proj.nodal[1:-1])))
    if out.exact is not None:
        cols["u_exact"] = out.exact(x)
    out.columns = cols
    if u is not None:
        out.osc_values = u.values
    return out


ERROR_HEADER = (
    "method", "f", "eps", "n", "h", "err_inf", "err_l2_window", "err_h1_window",
    "err_star", "metric", "bound", "singular", "defect",
)


def error_row(method: str, data: Data1D, eps: float, res: Solve1D, window) -> list:
    h = res.mesh.h
    err_inf = err_l2 = err_h1 = err_star = math.nan
    if res.u is not None and res.exact is not None:
        err_inf = discrete_inf_error(res.u, res.exact)
        w = resolve_window(window, h)
        err_l2, err_h1 = windowed_errors(res.u, res.exact, res.dexact, w)
        err_star = continuous_star_norm_error(res.u, res.exact, res.dexact, eps)
    bound = upg_bound(eps, h, data.f) if method in UPG_METHODS else math.nan
    return [method, data.text, eps, res.mesh.n, h, err_inf, err_l2, err_h1, err_star,
            res.metric, bound, res.singular, res.defect]


@dataclass
class ConvergenceTable:
    eps: float
    rows: list

    HEADER = ("n", "h", "err_inf", "err_l2_window", "err_h1_window",
              "rate_inf", "rate_l2", "rate_h1", "bound")


def _rate(prev: float, cur: float) -> float:
    if not (prev > 0 and cur > 0):
        return math.nan
    return math.log2(prev / cur)


def convergence(cfg: ExperimentConfig, eps: float, results: Optional[dict] = None) -> ConvergenceTable:
    """Rows of errors and observed rates over the n list at fixed eps."""
    data = parse_1d(cfg.f)
    rows = []
    prev = None
    for n in cfg.n:
        res = results[n] if results and n in results else solve_1d(cfg.method, data, eps, n, cfg.target)
        row = error_row(cfg.method, data, eps, res, cfg.window)
        h, e_inf, e_l2, e_h1 = row[4], row[5], row[6], row[7]
        bound = upg_bound(eps, h, data.f) if data.f.sup is not None and data.f.dsup is not None else math.nan
        if prev is None:
            rates = [math.nan] * 3
        else:
            rates = [_rate(prev[0], e_inf), _rate(prev[1], e_l2), _rate(prev[2], e_h1)]
        rows.append([n, h, e_inf, e_l2, e_h1, *rates, bound])
        prev = (e_inf, e_l2, e_h1)
    return ConvergenceTable(eps, rows)


# --------------------------------------------------------------------------
# 2D


def local_teeth(values) -> np.ndarray:
    full = np.concatenate(([0.0], np.asarray(values, dtype=float), [0.0]))
    return np.abs(full[1:-1] - 0.5 * (full[:-2] + full[2:]))


def default_sections(n: int) -> list:
    return sorted({1, max(1, n // 2), max(1, n - 2), n - 1})


# --------------------------------------------------------------------------
# driver


@dataclass
class RunResult:
    files: list
    error_rows: list
    osc_rows: list


def run(cfg: ExperimentConfig, out_dir) -> RunResult:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files, err_rows, osc_rows = [], [], []

    if cfg.is_2d:
        if "errors" in cfg.outputs or "table" in cfg.outputs:
            raise ConfigError("2D methods support the solution and oscillation outputs only")
        f2 = parse_2d(cfg.f)
        for eps in cfg.eps:
            for n in cfg.n:
                if cfg.method == "upg2d":
                    u = solve_2d_fast(assemble_2d(eps, n, f2))
                else:
                    u = solve_reduced_2d(n, f2)
                t = tag(eps, n)
                y = Mesh1D(n).interior
                if "solution" in cfg.outputs:
                    X, Y = np.meshgrid(y, y)
                    files.append(("solution", eps, n, write_columns(
                        out / f"solution2d_{t}.csv", {"x": X.ravel(), "y": Y.ravel(), "u_h": u.values})))
                secs = cfg.sections or default_sections(n)
                for i in secs:
                    i = n + i if i < 0 else i
                    if not 1 <= i <= n - 1:
                        raise ConfigError(f"section {i} outside 1..{n - 1}")
                    s = section(u, i)
                    files.append(("section", eps, n, write_columns(
                        out / f"section_{t}_i{i}.csv",
                        {"y": y, "u_section": s.values, "teeth_amplitude": local_teeth(s.values)})))
                    if "oscillation" in cfg.outputs:
                        r = oscillation_report(s)
                        osc_rows.append([cfg.method, eps, n, i, r.sign_changes, r.teeth_amplitude, r.max_jump])
    else:
        data = parse_1d(cfg.f)
        if data.split and cfg.method in NO_SOLUTION:
            raise ConfigError(f"split data is not meaningful for {cfg.method}")
        for eps in cfg.eps:
            results = {}
            for n in cfg.n:
                res = solve_1d(cfg.method, data, eps, n, cfg.target)
                results[n] = res
                t = tag(eps, n)
                if "solution" in cfg.outputs and res.columns:
                    files.append(("solution", eps, n, write_columns(out / f"solution_{t}.csv", res.columns)))
                if "errors" in cfg.outputs:
                    err_rows.append(error_row(cfg.method, data, eps, res, cfg.window))
                if "oscillation" in cfg.outputs and res.osc_values is not None:
                    r = oscillation_report(res.osc_values, pad=res.osc_pad)
                    osc_rows.append([cfg.method, eps, n, "", r.sign_changes, r.teeth_amplitude, r.max_jump])
            if "table" in cfg.outputs:
                table = convergence(cfg, eps, results)
                files.append(("table", eps, "", write_csv(
                    out / f"table_eps{eps:.6g}.csv", ConvergenceTable.HEADER, table.rows)))

    if err_rows:
        files.append(("errors", "", "", write_csv(out / "errors.csv", ERROR_HEADER, err_rows)))
    if osc_rows:
        files.append(("oscillation", "", "", write_csv(
            out / "oscillation.csv",
            ("method", "eps", "n", "section", "sign_changes", "teeth_amplitude", "max_jump"),
            osc_rows)))
    index = write_csv(out / "index.csv", ("kind", "eps", "n", "file"),
                      [(k, e, n, p.name) for k, e, n, p in files])
    return RunResult([p for *_, p in files] + [index], err_rows, osc_rows)
