"""Optimal trial norms, nodal/windowed errors and oscillation diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .bubbles import BubbleSpec
from .mesh import DEFAULT_ORDER, Mesh1D, NodalField1D, ScalarFn, composite_rule, graded_breakpoints

RADICAND_TOL = 1e-14


def _safe_sqrt(r: float) -> float:
    if r < -RADICAND_TOL:
        raise ArithmeticError(f"negative radicand {r!r}")
    return float(np.sqrt(max(r, 0.0)))


# --------------------------------------------------------------------------
# elementary norms of piecewise-linear fields


def h1_seminorm_sq(u: NodalField1D) -> float:
    d = np.diff(u.full)
    return float(np.sum(d * d) / u.mesh.h)


def l2_norm_sq(u: NodalField1D) -> float:
    a, b = u.full[:-1], u.full[1:]
    return float(u.mesh.h * np.sum(a * a + a * b + b * b) / 3.0)


def star_seminorm(u: NodalField1D) -> float:
    """|u|_{*,h} from the element averages of u.

    Computed as the (population) variance of the element averages, which is
    algebraically equal to mean(avg^2) - (int u)^2 but avoids cancellation.
    """
    avg = u.element_averages()
    return _safe_sqrt(float(np.mean((avg - avg.mean()) ** 2)))


# --------------------------------------------------------------------------
# the T operator


@dataclass(frozen=True)
class TAction:
    """Tu(x) = x*mean(u) - int_0^x u, together with |Tu| (H1 seminorm)."""

    func: Callable
    seminorm: float

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))


def apply_T(u: Union[NodalField1D, ScalarFn, Callable]) -> TAction:
    if isinstance(u, NodalField1D):
        mesh, full = u.mesh, u.full
        ubar = u.integral()
        cum = np.concatenate(([0.0], np.cumsum(0.5 * mesh.h * (full[:-1] + full[1:]))))

        def func(x):
            e = mesh.element_of(x)
            s = x - mesh.nodes[e - 1]
            slope = (full[e] - full[e - 1]) / mesh.h
            return x * ubar - (cum[e - 1] + s * full[e - 1] + 0.5 * slope * s * s)

        return TAction(func, _safe_sqrt(l2_norm_sq(u) - ubar**2))

    x, w = composite_rule(np.linspace(0.0, 1.0, 257), DEFAULT_ORDER)
    vals = np.asarray(u(x), dtype=float)
    ubar = float(np.dot(w, vals))
    norm_sq = float(np.dot(w, (vals - ubar) ** 2))
    xr, wr = np.polynomial.legendre.leggauss(20)

    def func(xs):
        xs = np.atleast_1d(xs)
        out = np.empty_like(xs)
        for k, xv in enumerate(xs):
            pts = 0.5 * xv * (xr + 1.0)
            out[k] = xv * ubar - 0.5 * xv * np.dot(wr, u(pts))
        return out

    return TAction(func, _safe_sqrt(norm_sq))


# --------------------------------------------------------------------------
# norm variants


@dataclass(frozen=True)
class NormVariant:
    """Which optimal trial norm to evaluate.

    tag is ``"SL"``, ``"UPG"`` or ``"SPLS"``; ``b``/``b_e`` are the bubble
    moments (UPG only).
    """

    tag: str
    eps: float
    h: Optional[float] = None
    b: Optional[float] = None
    b_e: Optional[float] = None

    @classmethod
    def sl(cls, eps):
        return cls("SL", eps)

    @classmethod
    def spls(cls, eps):
        return cls("SPLS", eps)

    @classmethod
    def upg(cls, eps, bubble: BubbleSpec):
        return cls("UPG", eps, bubble.h, bubble.b, bubble.b_e)


def star_norm(u: NodalField1D, variant: NormVariant) -> float:
    eps = variant.eps
    if variant.tag == "SL":
        return _safe_sqrt(eps**2 * h1_seminorm_sq(u) + star_seminorm(u) ** 2)
    if variant.tag == "UPG":
        h = variant.h if variant.h is not None else u.mesh.h
        scale = 1.0 + variant.b_e
        return _safe_sqrt(
            ((eps + h * variant.b) ** 2 * h1_seminorm_sq(u) + star_seminorm(u) ** 2) / scale
        )
    if variant.tag == "SPLS":
        return _safe_sqrt(eps**2 * h1_seminorm_sq(u) + apply_T(u).seminorm ** 2)
    raise ValueError(f"unknown norm variant {variant.tag!r}")


def norm_equivalence_constant(h: float, eps: float) -> float:
    """c0 = sqrt(1 + (h/(pi eps))^2) relating the continuous and SL norms."""
    return float(np.sqrt(1.0 + (h / (np.pi * eps)) ** 2))


# --------------------------------------------------------------------------
# errors


def discrete_inf_error(u_h: NodalField1D, exact: Callable) -> float:
    """max over interior nodes of |u_h(x_j) - u(x_j)|."""
    return float(np.max(np.abs(u_h.values - np.asarray(exact(u_h.mesh.interior)))))


@dataclass(frozen=True)
class Window:
    a: float
    b: float

    def __post_init__(self):
        if not 0.0 <= self.a < self.b <= 1.0:
            raise ValueError(f"invalid window [{self.a}, {self.b}]")


FULL = Window(0.0, 1.0)


def _window_rule(mesh: Mesh1D, w: Window, levels: int):
    """Composite graded quadrature over the mesh elements clipped to w."""
    pts, wts, elem = [], [], []
    nodes = mesh.nodes
    for e in range(1, mesh.n + 1):
        lo, hi = max(nodes[e - 1], w.a), min(nodes[e], w.b)
        if hi <= lo:
            continue
        x, q = composite_rule(graded_breakpoints(lo, hi, levels), DEFAULT_ORDER)
        pts.append(x)
        wts.append(q)
        elem.append(np.full(x.shape, e))
    return np.concatenate(pts), np.concatenate(wts), np.concatenate(elem)


def piecewise_errors(mesh: Mesh1D, nodal_full, exact, dexact, w: Window = FULL, levels: int = 40):
    """L2 and H1-seminorm of (exact - v) on w, v the P1 function with the
    given nodal values (boundary nodes included)."""
    x, q, e = _window_rule(mesh, w, levels)
    nodal_full = np.asarray(nodal_full, dtype=float)
    left = nodal_full[e - 1]
    slope = (nodal_full[e] - left) / mesh.h
    v = left + slope * (x - mesh.nodes[e - 1])
    err = np.asarray(exact(x)) - v
    derr = np.asarray(dexact(x)) - slope
    return float(np.sqrt(np.dot(q, err * err))), float(np.sqrt(np.dot(q, derr * derr)))


def windowed_errors(u_h: NodalField1D, exact, dexact, w: Window = FULL, levels: int = 40):
    """(||u - u_h||_{L2(w)}, |u - u_h|_{H1(w)}) by per-element quadrature."""
    return piecewise_errors(u_h.mesh, u_h.full, exact, dexact, w, levels)


def interpolation_errors(mesh: Mesh1D, g, dg, w: Window = FULL, levels: int = 40):
    """Errors of the nodal interpolant of g (boundary values taken from g)."""
    return piecewise_errors(mesh, g(mesh.nodes), g, dg, w, levels)


def continuous_star_norm_error(u_h: NodalField1D, exact, dexact, eps: float, levels: int = 40) -> float:
    """||u - u_h||_* with ||v||_*^2 = eps^2 |v|^2 + ||v||^2 - mean(v)^2."""
    mesh = u_h.mesh
    x, q, e = _window_rule(mesh, FULL, levels)
    full = u_h.full
    slope = (full[e] - full[e - 1]) / mesh.h
    err = np.asarray(exact(x)) - (full[e - 1] + slope * (x - mesh.nodes[e - 1]))
    derr = np.asarray(dexact(x)) - slope
    mean = np.dot(q, err)
    return _safe_sqrt(eps**2 * np.dot(q, derr * derr) + np.dot(q, (err - mean) ** 2))


# --------------------------------------------------------------------------
# oscillation diagnostics


@dataclass(frozen=True)
class OscReport:
    sign_changes: int
    teeth_amplitude: float
    max_jump: float


def oscillation_report(u_h, rel_tol: float = 1e-12, pad: bool = True) -> OscReport:
    """Sign changes of first differences, teeth amplitude and largest jump.

    Accepts a NodalField1D or a plain vector of interior values, padded with
    the zero boundary values unless ``pad`` is False (then the vector is
    taken as complete).  First differences below ``rel_tol * max|u|`` count
    as zero.
    """
    vals = u_h.values if isinstance(u_h, NodalField1D) else np.asarray(u_h, dtype=float)
    full = np.concatenate(([0.0], vals, [0.0])) if pad else vals
    d = np.diff(full)
    scale = float(np.max(np.abs(full))) if full.size else 0.0
    s = np.sign(np.where(np.abs(d) > rel_tol * scale, d, 0.0))
    s = s[s != 0]
    changes = int(np.count_nonzero(s[1:] != s[:-1]))
    teeth = np.abs(full[1:-1] - 0.5 * (full[:-2] + full[2:]))
    return OscReport(changes, float(teeth.max()) if teeth.size else 0.0, float(np.max(np.abs(d))))
