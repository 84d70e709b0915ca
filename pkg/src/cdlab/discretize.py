"""Assembly and solution of the 1D discretizations.

Methods: standard linear Galerkin (SL), P1-P2 saddle-point least squares
(SPLS) and bubble upwinding Petrov-Galerkin (UPG), plus their eps = 0
reduced problems.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.linalg

from .bubbles import BubbleSpec, element_test_values, make_quadratic
from .mesh import DEFAULT_ORDER, Mesh1D, NodalField1D, ScalarFn

PIVOT_FLOOR = 1e-300
REDUCED_PIVOT_TOL = 1e-12


class SingularSystemError(ArithmeticError):
    """A linear system turned out to be (numerically) singular."""


# --------------------------------------------------------------------------
# tridiagonal matrices


@dataclass(frozen=True, eq=False)
class TriDiag:
    """Tridiagonal matrix stored by its three diagonals."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        for name in ("lower", "diag", "upper"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        m = self.diag.shape[0]
        if self.lower.shape != (m - 1,) or self.upper.shape != (m - 1,):
            raise ValueError("inconsistent tridiagonal dimensions")

    @classmethod
    def constant(cls, m: int, lower: float, diag: float, upper: float) -> "TriDiag":
        return cls(np.full(m - 1, lower), np.full(m, diag), np.full(m - 1, upper))

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[1:] += self.lower * x[:-1]
        y[:-1] += self.upper * x[1:]
        return y

    def __add__(self, other: "TriDiag") -> "TriDiag":
        return TriDiag(self.lower + other.lower, self.diag + other.diag, self.upper + other.upper)

    def __mul__(self, c: float) -> "TriDiag":
        return TriDiag(c * self.lower, c * self.diag, c * self.upper)

    __rmul__ = __mul__


def solve_tridiag(m: TriDiag, rhs) -> np.ndarray:
    """Thomas algorithm; pure forward substitution when upper == 0."""
    rhs = np.asarray(rhs, dtype=float)
    n = m.size
    if rhs.shape[0] != n:
        raise ValueError("rhs length does not match matrix size")
    a, d, c = m.lower, m.diag, m.upper
    x = np.empty_like(rhs)
    if not np.any(c):
        for j in range(n):
            if abs(d[j]) < PIVOT_FLOOR:
                raise SingularSystemError(f"zero pivot at row {j}")
            x[j] = (rhs[j] - (a[j - 1] * x[j - 1] if j else 0.0)) / d[j]
        return x
    cp = np.empty(n - 1)
    dp = np.empty_like(rhs)
    piv = d[0]
    if abs(piv) < PIVOT_FLOOR:
        raise SingularSystemError("zero pivot at row 0")
    if n > 1:
        cp[0] = c[0] / piv
    dp[0] = rhs[0] / piv
    for j in range(1, n):
        piv = d[j] - a[j - 1] * cp[j - 1]
        if abs(piv) < PIVOT_FLOOR:
            raise SingularSystemError(f"zero pivot at row {j}")
        if j < n - 1:
            cp[j] = c[j] / piv
        dp[j] = (rhs[j] - a[j - 1] * dp[j - 1]) / piv
    x[-1] = dp[-1]
    for j in range(n - 2, -1, -1):
        x[j] = dp[j] - cp[j] * x[j + 1]
    return x


def solve_tridiag_pivoted(m: TriDiag, rhs) -> np.ndarray:
    """Banded LU with partial pivoting (LAPACK gbsv)."""
    ab = np.zeros((3, m.size))
    ab[0, 1:] = m.upper
    ab[1] = m.diag
    ab[2, :-1] = m.lower
    try:
        return scipy.linalg.solve_banded((1, 1), ab, np.asarray(rhs, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc


# --------------------------------------------------------------------------
# problem description and load vectors


@dataclass(frozen=True)
class ProblemSpec1D:
    """-eps u'' + u' = f on (0, 1), u(0) = u(1) = 0.

    ``method`` is ``"SL"``, ``"SPLS"`` or a :class:`BubbleSpec` (UPG).
    """

    eps: float
    f: ScalarFn
    mesh: Mesh1D
    method: Union[str, BubbleSpec] = "SL"

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError("eps must be >= 0")


def _element_data(mesh: Mesh1D, f: ScalarFn, order: int = DEFAULT_ORDER):
    pts, wts = mesh.element_rule(order)
    return pts, wts * f(pts)


def load_hats(mesh: Mesh1D, f: ScalarFn) -> np.ndarray:
    """(f, phi_j) for the interior hats."""
    if f.is_constant:
        return np.full(mesh.n - 1, f.constant_value * mesh.h)
    pts, wf = _element_data(mesh, f)
    s = (pts - mesh.nodes[:-1, None]) / mesh.h
    rising = np.sum(wf * s, axis=1)
    falling = np.sum(wf * (1.0 - s), axis=1)
    return rising[:-1] + falling[1:]


def load_bubbles(mesh: Mesh1D, f: ScalarFn, bubble: BubbleSpec) -> np.ndarray:
    """(f, B_e) for e = 1..n."""
    if f.is_constant:
        return np.full(mesh.n, f.constant_value * bubble.b * mesh.h)
    xl, wl = bubble.local_rule()
    pts = mesh.nodes[:-1, None] + xl
    return np.sum(wl * f(pts) * bubble(xl), axis=1)


def load_upg(mesh: Mesh1D, f: ScalarFn, bubble: BubbleSpec) -> np.ndarray:
    """(f, g_j) with g_j = phi_j + B_j - B_{j+1}."""
    if f.is_constant:
        return np.full(mesh.n - 1, f.constant_value * mesh.h)
    pts, wts, left, right = element_test_values(mesh, bubble)
    wf = wts * f(pts)
    return np.sum(wf * right, axis=1)[:-1] + np.sum(wf * left, axis=1)[1:]


# --------------------------------------------------------------------------
# SL and UPG


def convection_matrix(m: int) -> TriDiag:
    """(u', phi_j): tridiag(-1/2, 0, 1/2)."""
    return TriDiag.constant(m, -0.5, 0.0, 0.5)


def stiffness_stencil(m: int) -> TriDiag:
    """tridiag(-1, 2, -1)."""
    return TriDiag.constant(m, -1.0, 2.0, -1.0)


def assemble_sl(spec: ProblemSpec1D):
    mesh = spec.mesh
    m = mesh.n - 1
    mat = stiffness_stencil(m) * (spec.eps / mesh.h) + convection_matrix(m)
    return mat, load_hats(mesh, spec.f)


def upg_matrix(eps: float, h: float, b: float, m: int) -> TriDiag:
    """tridiag(-(eps/h + b) - 1/2, 2(eps/h + b), -(eps/h + b) + 1/2)."""
    s = eps / h + b
    return TriDiag.constant(m, -s - 0.5, 2.0 * s, -s + 0.5)


def exponential_upg_matrix(t0: float, m: int) -> TriDiag:
    """(1/t0) tridiag(-(1 + t0)/2, 1, -(1 - t0)/2)."""
    return TriDiag.constant(m, -(1.0 + t0) / (2 * t0), 1.0 / t0, -(1.0 - t0) / (2 * t0))


def upg_is_monotone(eps: float, h: float, b: float) -> bool:
    """The UPG matrix is an M-matrix iff eps/h + b >= 1/2.

    Scaled and exponential bubbles sit on the boundary (eps/h + b = 1/(2 t0)
    -> 1/2), so the comparison allows 1e-12 relative roundoff.
    """
    return eps / h + b >= 0.5 * (1.0 - 1e-12)


def assemble_upg(spec: ProblemSpec1D):
    bubble = spec.method
    if not isinstance(bubble, BubbleSpec):
        raise TypeError("assemble_upg needs a BubbleSpec method")
    if not bubble.b > 0:
        raise ValueError("bubble average must be positive")
    mesh = spec.mesh
    if not np.isclose(bubble.h, mesh.h, rtol=1e-12, atol=0.0):
        raise ValueError("bubble was built for a different mesh size")
    return upg_matrix(spec.eps, mesh.h, bubble.b, mesh.n - 1), load_upg(mesh, spec.f, bubble)


# --------------------------------------------------------------------------
# SPLS


@dataclass(frozen=True, eq=False)
class SaddleSystem:
    """[[A0, K], [K^T, 0]] [w; u] = [F; 0] on P2 x P1.

    P2 basis ordering: the n-1 interior vertex hats, then the n element
    bubbles 4 s (1 - s).
    """

    mesh: Mesh1D
    eps: float
    a0_block: np.ndarray
    b_block: np.ndarray
    rhs: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        k = self.b_block
        z = np.zeros((k.shape[1], k.shape[1]))
        return np.block([[self.a0_block, k], [k.T, z]])

    @property
    def full_rhs(self) -> np.ndarray:
        return np.concatenate((self.rhs, np.zeros(self.b_block.shape[1])))


@dataclass(frozen=True, eq=False)
class P2Field:
    """w = sum c_j phi_j + sum d_e B_e in the hierarchical P2 basis."""

    mesh: Mesh1D
    vertex: np.ndarray
    bubble: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lin = NodalField1D(self.mesh, self.vertex)(x)
        e = self.mesh.element_of(x)
        s = (x - self.mesh.nodes[e - 1]) / self.mesh.h
        return lin + self.bubble[e - 1] * 4.0 * s * (1.0 - s)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        e = self.mesh.element_of(x)
        s = (x - self.mesh.nodes[e - 1]) / self.mesh.h
        lin = NodalField1D(self.mesh, self.vertex).derivative(x)
        return lin + self.bubble[e - 1] * 4.0 * (1.0 - 2.0 * s) / self.mesh.h


def assemble_spls(spec: ProblemSpec1D) -> SaddleSystem:
    mesh, eps = spec.mesh, spec.eps
    n, h = mesh.n, mesh.h
    m = n - 1
    a0 = np.zeros((2 * n - 1, 2 * n - 1))
    a0[:m, :m] = stiffness_stencil(m).to_dense() / h
    a0[m:, m:] = np.eye(n) * 16.0 / (3.0 * h)

    k = np.zeros((2 * n - 1, m))
    k[:m, :] = (stiffness_stencil(m) * (eps / h) + convection_matrix(m)).to_dense()
    # (p', B_e) = slope of p on element e times (2/3) h
    for e in range(1, n + 1):
        if e <= m:
            k[m + e - 1, e - 1] = 2.0 / 3.0
        if e >= 2:
            k[m + e - 1, e - 2] = -2.0 / 3.0

    rhs = np.concatenate((load_hats(mesh, spec.f), load_bubbles(mesh, spec.f, make_quadratic(h))))
    return SaddleSystem(mesh, eps, a0, k, rhs)


def solve_spls(system: SaddleSystem):
    """Dense symmetric-indefinite solve; returns (w_h, u_h)."""
    mat = system.matrix
    try:
        sol = scipy.linalg.solve(mat, system.full_rhs, assume_a="sym")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularSystemError(str(exc)) from exc
    m = system.mesh.n - 1
    n2 = system.a0_block.shape[0]
    w = P2Field(system.mesh, sol[:m], sol[m:n2])
    return w, NodalField1D(system.mesh, sol[n2:])


# --------------------------------------------------------------------------
# reduced SL


@dataclass(frozen=True, eq=False)
class ReducedSolve:
    """Outcome of the eps = 0 SL system: a solution or a singularity report."""

    singular: bool
    solution: Optional[NodalField1D] = None
    kernel: Optional[np.ndarray] = None
    defect: float = 0.0


def solve_reduced_sl(mesh: Mesh1D, f: ScalarFn) -> ReducedSolve:
    """tridiag(-1/2, 0, 1/2) U = (f, phi_j)."""
    mat = convection_matrix(mesh.n - 1).to_dense()
    rhs = load_hats(mesh, f)
    lu, piv = scipy.linalg.lu_factor(mat, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() >= REDUCED_PIVOT_TOL * np.abs(mat).max():
        return ReducedSolve(False, NodalField1D(mesh, scipy.linalg.lu_solve((lu, piv), rhs)))
    # left null vector: solvability requires rhs . kernel = 0
    u_svd, _, _ = np.linalg.svd(mat)
    kernel = u_svd[:, -1]
    kernel = kernel / kernel[np.argmax(np.abs(kernel))]
    return ReducedSolve(True, None, kernel, float(np.dot(kernel, rhs)))


# --------------------------------------------------------------------------
# driver


def solve(spec: ProblemSpec1D) -> NodalField1D:
    """Discrete solution u_h for any 1D method."""
    mesh = spec.mesh
    method = spec.method
    if isinstance(method, BubbleSpec):
        mat, rhs = assemble_upg(spec)
        return NodalField1D(mesh, solve_tridiag(mat, rhs))
    if method == "SPLS":
        return solve_spls(assemble_spls(spec))[1]
    if method == "SL":
        if spec.eps == 0:
            red = solve_reduced_sl(mesh, spec.f)
            if red.singular:
                raise SingularSystemError(f"reduced SL system singular (defect {red.defect:.3g})")
            return red.solution
        mat, rhs = assemble_sl(spec)
        return NodalField1D(mesh, solve_tridiag_pivoted(mat, rhs))
    raise ValueError(f"unknown method {method!r}")
