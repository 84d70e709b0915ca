"""2D quadratic-bubble UPG for -eps Lap u + u_x = f on the unit square.

Unknowns u_ij sit at (x_i, y_j); vectors are ordered x-fastest, so the
left Kronecker factor acts on the y index and the right one on x:

    A = M (x) Mfe + (eps/h) S (x) Mq

with M the 1D mass matrix, S = tridiag(-1, 2, -1), Mfe the 1D UPG matrix
and Mq = [(phi_i, g_k)] the mass matrix tested against the upwinded basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .bubbles import make_limit_quadratic, make_scaled_quadratic, t0 as tanh_t0
from .discretize import (
    SingularSystemError,
    TriDiag,
    exponential_upg_matrix,
    solve_tridiag,
    stiffness_stencil,
    upg_matrix,
)
from .mesh import Mesh1D, NodalField1D, gauss_rule

RHS_ORDER = 6
DENSE_MAX_N = 32

Data2D = Union[float, int, Callable]


@dataclass(frozen=True, eq=False)
class NodalField2D:
    """Interior nodal values u_ij, x-fastest."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.shape != ((self.n - 1) ** 2,):
            raise ValueError("wrong number of 2D nodal values")
        object.__setattr__(self, "values", v)

    @property
    def grid(self) -> np.ndarray:
        """Values as an array indexed [j (y), i (x)]."""
        return self.values.reshape(self.n - 1, self.n - 1)


@dataclass(frozen=True, eq=False)
class KroneckerSystem:
    n: int
    eps: float
    beta: float
    M: TriDiag
    Mfe_x: TriDiag
    S: TriDiag
    Mq: TriDiag
    rhs: np.ndarray

    @property
    def h(self) -> float:
        return 1.0 / self.n

    def dense(self) -> np.ndarray:
        return np.kron(self.M.to_dense(), self.Mfe_x.to_dense()) + (self.eps / self.h) * np.kron(
            self.S.to_dense(), self.Mq.to_dense()
        )

    def apply(self, v) -> np.ndarray:
        """Matrix-vector product through the factored form."""
        U = np.asarray(v, dtype=float).reshape(self.n - 1, self.n - 1)
        M, S = self.M.to_dense(), self.S.to_dense()
        out = M @ U @ self.Mfe_x.to_dense().T + (self.eps / self.h) * (S @ U @ self.Mq.to_dense().T)
        return out.ravel()


def mass_matrix(n: int) -> TriDiag:
    h = 1.0 / n
    return TriDiag.constant(n - 1, h / 6.0, 4.0 * h / 6.0, h / 6.0)


def bubble_mass_matrix(n: int, beta: float) -> TriDiag:
    """Mq[k, i] = (phi_i, phi_k + B_k - B_{k+1})."""
    h = 1.0 / n
    c = beta * h / 3.0
    return mass_matrix(n) + TriDiag.constant(n - 1, c, 0.0, -c)


def _load_2d(n: int, f: Data2D, bubble) -> np.ndarray:
    h = 1.0 / n
    if np.isscalar(f):
        return np.full((n - 1) ** 2, float(f) * h * h)
    xl, wl = gauss_rule(0.0, h, RHS_ORDER)
    a = np.arange(n)[:, None] * h
    pts = (a + xl).ravel()
    wts = np.tile(wl, n)
    s = np.tile(xl / h, n)
    bq = np.tile(bubble(xl), n)
    elem = np.repeat(np.arange(1, n + 1), RHS_ORDER)

    gx = np.zeros((n - 1, pts.size))
    py = np.zeros((n - 1, pts.size))
    for k in range(1, n):
        on_right = elem == k  # rising part of g_k / phi_k
        on_left = elem == k + 1
        gx[k - 1, on_right] = s[on_right] + bq[on_right]
        gx[k - 1, on_left] = 1.0 - s[on_left] - bq[on_left]
        py[k - 1, on_right] = s[on_right]
        py[k - 1, on_left] = 1.0 - s[on_left]
    fgrid = np.asarray(f(pts[None, :], pts[:, None]), dtype=float)
    fgrid = np.broadcast_to(fgrid, (pts.size, pts.size))
    F = (py * wts) @ fgrid @ (gx * wts).T
    return F.ravel()


def assemble_2d(eps: float, n: int, f: Data2D) -> KroneckerSystem:
    if eps <= 0:
        raise ValueError("eps must be positive (use solve_reduced_2d for eps = 0)")
    if n < 2:
        raise ValueError("n must be >= 2")
    h = 1.0 / n
    bubble = make_scaled_quadratic(eps, h)
    mfe = upg_matrix(eps, h, bubble.b, n - 1)
    t0 = tanh_t0(eps, h)
    if t0 > 1e-3:
        ref = exponential_upg_matrix(t0, n - 1)
        for a, b in ((mfe.lower, ref.lower), (mfe.diag, ref.diag), (mfe.upper, ref.upper)):
            if not np.allclose(a, b, rtol=1e-10, atol=1e-12 * np.abs(ref.diag).max()):
                raise AssertionError("scaled-quadratic and exponential UPG matrices disagree")
    return KroneckerSystem(
        n=n,
        eps=eps,
        beta=bubble.beta,
        M=mass_matrix(n),
        Mfe_x=mfe,
        S=stiffness_stencil(n - 1),
        Mq=bubble_mass_matrix(n, bubble.beta),
        rhs=_load_2d(n, f, bubble),
    )


def sine_basis(n: int) -> np.ndarray:
    """Orthonormal DST-I matrix Q[j, k] = sqrt(2/n) sin(j k pi / n)."""
    j = np.arange(1, n)
    return np.sqrt(2.0 / n) * np.sin(np.outer(j, j) * np.pi / n)


def sine_eigenvalues(n: int):
    """Eigenvalues (sigma_k of S, mu_k of M) for the sine modes k = 1..n-1."""
    k = np.arange(1, n)
    sigma = 2.0 - 2.0 * np.cos(k * np.pi / n)
    mu = (1.0 / n) / 6.0 * (6.0 - sigma)
    return sigma, mu


def solve_2d_fast(sys: KroneckerSystem) -> NodalField2D:
    """Diagonalize the y factors with sine modes, then one tridiagonal
    solve in x per mode."""
    n = sys.n
    Q = sine_basis(n)
    sigma, mu = sine_eigenvalues(n)
    F = sys.rhs.reshape(n - 1, n - 1)
    Ft = Q @ F
    Ut = np.empty_like(Ft)
    scale = sys.eps / sys.h
    for k in range(n - 1):
        mat = sys.Mfe_x * mu[k] + sys.Mq * (scale * sigma[k])
        Ut[k] = solve_tridiag(mat, Ft[k])
    return NodalField2D(n, Q @ Ut)


def solve_2d_dense(sys: KroneckerSystem) -> NodalField2D:
    if sys.n > DENSE_MAX_N:
        raise ValueError(f"dense 2D solve limited to n <= {DENSE_MAX_N}")
    try:
        return NodalField2D(sys.n, np.linalg.solve(sys.dense(), sys.rhs))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc


def reduced_rhs(n: int, f: Data2D) -> np.ndarray:
    """F^{q0}: the load vector with the limit bubble 3 (x/h)(1 - x/h)."""
    return _load_2d(n, f, make_limit_quadratic(1.0 / n))


def solve_reduced_2d(n: int, f: Data2D) -> NodalField2D:
    """[M (x) C0] W = F^{q0}, C0 = tridiag(-1, 1, 0)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    F = reduced_rhs(n, f).reshape(n - 1, n - 1)
    c0 = TriDiag.constant(n - 1, -1.0, 1.0, 0.0)
    Z = np.array([solve_tridiag(c0, row) for row in F])
    M = mass_matrix(n)
    W = np.column_stack([solve_tridiag(M, col) for col in Z.T])
    return NodalField2D(n, W)


def section(u: NodalField2D, i: int) -> NodalField1D:
    """The x_i-section (u_i1, ..., u_i,n-1) as a field over y."""
    if not 1 <= i <= u.n - 1:
        raise IndexError(f"section index {i} outside 1..{u.n - 1}")
    return NodalField1D(Mesh1D(u.n), u.grid[:, i - 1].copy())
