"""Independent reference computations.

Closed-form transport and convection-diffusion solutions, the Green's
function of -eps u'' + u' and the inverse it induces, brute-force L2
projections, the Poisson solution u^f, and closed-form interpolation
energy errors for the constant-data solution.

All exponentials are routed through :mod:`cdlab.stable` with non-positive
exponents.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .mesh import DEFAULT_ORDER, Mesh1D, NodalField1D, ScalarFn, composite_rule, hat_full
from .stable import decay, one_minus_decay, ratio, z_minus_tanh

P = np.polynomial.polynomial

TRANSPORT_KINDS = ("LR", "RL", "Shifted")


# --------------------------------------------------------------------------
# transport problems


def _antiderivative(f: ScalarFn) -> Callable:
    """x -> int_0^x f."""
    if f.terms is not None:
        terms = f.terms

        def prim(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for t in terms:
                if t[0] == "poly":
                    out = out + P.polyval(x, P.polyint(t[1]))
                elif t[0] == "sin":
                    out = out + t[1] * (1.0 - np.cos(t[2] * x)) / t[2]
                else:
                    out = out + t[1] * np.sin(t[2] * x) / t[2]
            return out

        return prim

    xr, wr = np.polynomial.legendre.leggauss(DEFAULT_ORDER)

    def prim(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        for k, xv in enumerate(x):
            breaks = np.linspace(0.0, xv, 9)
            a = breaks[:-1, None]
            half = 0.5 * np.diff(breaks)[:, None]
            out[k] = np.sum(half * wr * f(a + half * (xr + 1.0)))
        return out

    return prim


def transport(kind: str, f: ScalarFn, x):
    """LR: w(x) = int_0^x f; RL: w(x) - int_0^1 f; Shifted: w(x) - w(1)/2."""
    w = _antiderivative(f)
    x = np.asarray(x, dtype=float)
    if kind == "LR":
        out = w(x)
    elif kind == "RL":
        out = w(x) - float(w(np.array([1.0]))[0])
    elif kind == "Shifted":
        out = w(x) - 0.5 * float(w(np.array([1.0]))[0])
    else:
        raise ValueError(f"unknown transport kind {kind!r}")
    return out if np.ndim(out) else float(out)


# --------------------------------------------------------------------------
# exact solutions of -eps u'' + u' = f


def exact_const_f(eps: float, x):
    """Solution for f = 1: x - (e^{(x-1)/eps} - e^{-1/eps}) / (1 - e^{-1/eps})."""
    x = np.asarray(x, dtype=float)
    out = x - const_f_layer(eps, x)
    return out if out.ndim else float(out)


def const_f_layer(eps: float, x):
    """The boundary-layer part E(x) of the f = 1 solution (u = x - E)."""
    x = np.asarray(x, dtype=float)
    out = (decay(ratio(1.0 - x, eps)) - decay(1.0 / eps)) / one_minus_decay(1.0 / eps)
    return out if np.ndim(out) else float(out)


def const_f_layer_derivative(eps: float, x):
    x = np.asarray(x, dtype=float)
    out = decay(ratio(1.0 - x, eps)) / (eps * one_minus_decay(1.0 / eps))
    return out if np.ndim(out) else float(out)


def exact_const_f_derivative(eps: float, x):
    return 1.0 - const_f_layer_derivative(eps, x)


@dataclass(frozen=True)
class ExactSolution:
    """u = u_p + c1 + c2 e^{(x-1)/eps} for data with a closed form."""

    eps: float
    particular: Callable
    dparticular: Callable
    c1: float
    c2: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.particular(x) + self.c1 + self.c2 * decay(ratio(1.0 - x, self.eps))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.dparticular(x) + self.c2 * decay(ratio(1.0 - x, self.eps)) / self.eps


def exact_solution(eps: float, f: ScalarFn) -> ExactSolution:
    """Closed-form solution for polynomial/sine/cosine data."""
    if f.terms is None:
        raise ValueError("exact solution needs data with a closed form")
    if eps <= 0:
        raise ValueError("eps must be positive")
    poly = np.zeros(1)
    trig = []
    for t in f.terms:
        if t[0] == "poly":
            # u_p' = sum_k eps^k p^{(k)}
            d = np.asarray(t[1], dtype=float)
            v = np.zeros(1)
            k = 0
            while d.size and np.any(d):
                v = P.polyadd(v, eps**k * d)
                d = P.polyder(d)
                k += 1
            poly = P.polyadd(poly, P.polyint(v))
        else:
            amp, om = t[1], t[2]
            den = om * (1.0 + (eps * om) ** 2)
            if t[0] == "sin":
                trig.append((amp * eps * om / den, -amp / den, om))
            else:
                trig.append((amp / den, amp * eps * om / den, om))
    dpoly = P.polyder(poly)

    def part(x):
        out = P.polyval(x, poly)
        for a, b, om in trig:
            out = out + a * np.sin(om * x) + b * np.cos(om * x)
        return out

    def dpart(x):
        out = P.polyval(x, dpoly) if dpoly.size else np.zeros_like(x)
        for a, b, om in trig:
            out = out + om * (a * np.cos(om * x) - b * np.sin(om * x))
        return out

    p0 = float(part(np.array([0.0]))[0])
    p1 = float(part(np.array([1.0]))[0])
    c2 = (p0 - p1) / one_minus_decay(1.0 / eps)
    return ExactSolution(eps, part, dpart, -p1 - c2, c2)


# --------------------------------------------------------------------------
# Green's function


def greens(eps: float, x, s):
    """G(x, s) for -eps u'' + u' with homogeneous Dirichlet data."""
    x, s = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(s, dtype=float))
    den = one_minus_decay(1.0 / eps)
    below = one_minus_decay(ratio(np.maximum(1.0 - x, 0.0), eps)) * one_minus_decay(
        ratio(np.maximum(s, 0.0), eps)
    )
    dxs = np.maximum(s - x, 0.0)
    above = (
        decay(ratio(dxs, eps))
        - decay(ratio(np.maximum(1.0 - x, 0.0), eps))
        - decay(ratio(np.maximum(s, 0.0), eps))
        + decay(1.0 / eps)
    )
    out = np.where(s < x, below, above) / den
    return out if out.ndim else float(out)


def inverse_via_greens(eps: float, mesh: Mesh1D) -> np.ndarray:
    """Matrix with entry (j, i) = G(x_j, x_i)."""
    x = mesh.interior
    return greens(eps, x[:, None], x[None, :])


# --------------------------------------------------------------------------
# L2 projections

PROJECTION_TARGETS = ("M_h", "M_bar", "M_tilde")


@dataclass(frozen=True, eq=False)
class P1Function:
    """Continuous piecewise-linear function given by all n+1 nodal values."""

    mesh: Mesh1D
    nodal: np.ndarray
    coeffs: np.ndarray

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.mesh.nodes, self.nodal)

    def mean(self) -> float:
        return float(self.mesh.h * (np.sum(self.nodal) - 0.5 * (self.nodal[0] + self.nodal[-1])))


def projection_basis(target: str, mesh: Mesh1D):
    """Nodal values (rows) of the basis functions of the target space."""
    n = mesh.n
    hats = np.eye(n + 1)[1:-1]
    if target == "M_h":
        return hats
    if target == "M_bar":
        return hats - mesh.h
    if target == "M_tilde":
        tied = np.zeros(n + 1)
        tied[0] = tied[-1] = 1.0
        return np.vstack((hats, tied))
    raise ValueError(f"unknown projection target {target!r}")


def _basis_on_points(basis_nodal: np.ndarray, mesh: Mesh1D, x: np.ndarray) -> np.ndarray:
    hats = np.stack([hat_full(mesh, k, x) for k in range(mesh.n + 1)])
    return basis_nodal @ hats


def l2_project(g: Callable, target: str, mesh: Mesh1D) -> P1Function:
    """Brute-force normal-equations L2 projection onto a P1 subspace."""
    basis = projection_basis(target, mesh)
    x, w = composite_rule(mesh.nodes, DEFAULT_ORDER)
    phi = _basis_on_points(basis, mesh, x)
    mass = (phi * w) @ phi.T
    moments = phi @ (w * np.asarray(g(x), dtype=float))
    coeffs = scipy.linalg.solve(mass, moments, assume_a="pos")
    return P1Function(mesh, coeffs @ basis, coeffs)


# --------------------------------------------------------------------------
# Poisson problem -u'' = f


def poisson_uf(f: Callable, x):
    """u^f(x) = int_0^1 G0(x, s) f(s) ds, G0 = min(x,s) (1 - max(x,s))."""
    xr, wr = np.polynomial.legendre.leggauss(20)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xs)
    for k, xv in enumerate(xs):
        total = 0.0
        if xv > 0:
            s = 0.5 * xv * (xr + 1.0)
            total += 0.5 * xv * np.dot(wr, s * (1.0 - xv) * f(s))
        if xv < 1:
            s = xv + 0.5 * (1.0 - xv) * (xr + 1.0)
            total += 0.5 * (1.0 - xv) * np.dot(wr, xv * (1.0 - s) * f(s))
        out[k] = total
    return out if np.ndim(x) else float(out[0])


def elliptic_projection_uf(f: ScalarFn, mesh: Mesh1D):
    """P2 solution of ((u_h^f)', v') = (f, v) in the hierarchical basis."""
    from .discretize import P2Field, ProblemSpec1D, assemble_spls

    sys = assemble_spls(ProblemSpec1D(0.0, f, mesh, "SPLS"))
    c = scipy.linalg.solve(sys.a0_block, sys.rhs, assume_a="pos")
    m = mesh.n - 1
    return P2Field(mesh, c[:m], c[m:])


# --------------------------------------------------------------------------
# interpolation energy error of the f = 1 solution

INTERP_WINDOWS = ("full", "left", "last")


def interp_energy_error(eps: float, h: float, window: str = "full") -> float:
    """Squared H1 error of the nodal interpolant of the f = 1 solution.

    window: ``"full"`` = [0, 1], ``"left"`` = [0, 1-h], ``"last"`` = [1-h, 1].
    """
    if eps <= 0 or not 0 < h < 1:
        raise ValueError("need eps > 0 and 0 < h < 1")
    z = h / (2.0 * eps)
    coth_half = (1.0 + decay(1.0 / eps)) / one_minus_decay(1.0 / eps)
    full = coth_half * z_minus_tanh(z) / h
    if window == "full":
        return full
    if window == "left":
        return full * (decay(2.0 * h / eps) - decay(2.0 / eps)) / one_minus_decay(2.0 / eps)
    if window == "last":
        return full * one_minus_decay(2.0 * h / eps) / one_minus_decay(2.0 / eps)
    raise ValueError(f"unknown window {window!r}")
