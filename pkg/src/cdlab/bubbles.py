"""Generating bubbles on [0, h] and the upwinded test basis g_i."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .mesh import DEFAULT_ORDER, Mesh1D, composite_rule, gauss_rule, hat_full
from .stable import decay, langevin, one_minus_decay, ratio

CUSTOM_ORDER = 20


@dataclass(frozen=True)
class BubbleSpec:
    """A bubble B on [0, h] with average ``b`` and energy scale ``b_e``.

    ``b = (1/h) * int B`` and ``b_e = h * int (B')^2``.
    """

    kind: str
    h: float
    evaluator: Callable = field(repr=False, compare=False)
    derivative: Callable = field(repr=False, compare=False)
    b: float
    b_e: float
    eps: Optional[float] = None
    beta: Optional[float] = None

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    @property
    def satisfies_pg_hypothesis(self) -> bool:
        """Whether b >= 1/pi (the hypothesis of the optimal-norm error bound)."""
        return self.b >= 1.0 / np.pi

    def local_rule(self):
        """Quadrature on [0, h] resolving this bubble's shape."""
        if self.kind == "exponential" and self.eps < self.h:
            kmax = int(np.ceil(np.log2(self.h) - np.log2(self.eps)))
            layer = self.h * 2.0 ** -np.arange(1, min(kmax, 60) + 1)[::-1]
            layer = np.concatenate((layer, [self.eps])) if kmax <= 60 else layer
            layer = np.unique(layer[layer < self.h])
            breaks = np.concatenate(([0.0], layer, [self.h]))
            return composite_rule(breaks, DEFAULT_ORDER)
        order = CUSTOM_ORDER if self.kind in ("custom", "exponential") else DEFAULT_ORDER
        return gauss_rule(0.0, self.h, order)

    def moments(self):
        """(b, b_e) recomputed by quadrature."""
        x, w = self.local_rule()
        b = float(np.dot(w, self(x))) / self.h
        b_e = self.h * float(np.dot(w, self.derivative(x) ** 2))
        return b, b_e


def _quadratic(h: float, beta: float, kind: str, eps=None) -> BubbleSpec:
    c = 4.0 * beta / h**2
    return BubbleSpec(
        kind=kind,
        h=h,
        evaluator=lambda x: c * x * (h - x),
        derivative=lambda x: c * (h - 2.0 * x),
        b=2.0 * beta / 3.0,
        b_e=16.0 * beta**2 / 3.0,
        eps=eps,
        beta=beta,
    )


def make_quadratic(h: float) -> BubbleSpec:
    """B = 4 (x/h)(1 - x/h): b = 2/3, b_e = 16/3."""
    if h <= 0:
        raise ValueError("h must be positive")
    return _quadratic(h, 1.0, "quadratic")


def exponential_average(eps: float, h: float) -> float:
    """1/(2 t0) - eps/h with t0 = tanh(h/(2 eps))."""
    z = ratio(h, 2.0 * eps) if eps > 0 else np.inf
    return 0.5 * langevin(z)


def make_exponential(eps: float, h: float) -> BubbleSpec:
    """B(x) = (1 - e^{-x/eps}) / (1 - e^{-h/eps}) - x/h."""
    if eps <= 0 or h <= 0:
        raise ValueError("eps and h must be positive")
    denom = one_minus_decay(h / eps)

    def ev(x):
        return one_minus_decay(ratio(x, eps)) / denom - x / h

    def dev(x):
        return decay(ratio(x, eps)) / (eps * denom) - 1.0 / h

    spec = BubbleSpec("exponential", h, ev, dev, exponential_average(eps, h), 1.0, eps=eps)
    _, b_e = spec.moments()
    return BubbleSpec("exponential", h, ev, dev, spec.b, b_e, eps=eps)


def t0(eps: float, h: float) -> float:
    return float(np.tanh(ratio(h, 2.0 * eps)))


def make_scaled_quadratic(eps: float, h: float) -> BubbleSpec:
    """Quadratic bubble scaled to the exponential bubble's average.

    beta = (3/2)(1/(2 t0) - eps/h); B = (4 beta/h^2) x (h - x).
    """
    if eps <= 0 or h <= 0:
        raise ValueError("eps and h must be positive")
    beta = 1.5 * exponential_average(eps, h)
    if not beta > 0:
        raise ValueError(f"non-positive beta={beta!r} for eps={eps}, h={h}")
    return _quadratic(h, beta, "scaled_quadratic", eps=eps)


def make_limit_quadratic(h: float) -> BubbleSpec:
    """3 (x/h)(1 - x/h), the eps/h -> 0 limit of the scaled quadratic."""
    return _quadratic(h, 0.75, "scaled_quadratic", eps=0.0)


def make_forward_quadratic(eps: float, h: float) -> BubbleSpec:
    """Quadratic bubble with average 1/2 - eps/h.

    With this average the UPG matrix has a zero upper diagonal.
    """
    b = 0.5 - eps / h
    if not b > 0:
        raise ValueError("forward bubble needs eps < h/2")
    return _quadratic(h, 1.5 * b, "scaled_quadratic", eps=eps)


def make_custom(evaluator: Callable, h: float, derivative: Optional[Callable] = None) -> BubbleSpec:
    """Bubble from an arbitrary evaluator; moments by order-20 quadrature."""
    if h <= 0:
        raise ValueError("h must be positive")
    ends = np.asarray(evaluator(np.array([0.0, h])), dtype=float)
    x, w = gauss_rule(0.0, h, CUSTOM_ORDER)
    vals = np.asarray(evaluator(x), dtype=float)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if np.max(np.abs(ends)) > 1e-12 * scale:
        raise ValueError("bubble must vanish at 0 and h")
    if derivative is None:
        d = 1e-3 * h

        def derivative(x):
            return (
                evaluator(x - 2 * d) - 8 * evaluator(x - d) + 8 * evaluator(x + d) - evaluator(x + 2 * d)
            ) / (12 * d)

    b = float(np.dot(w, vals)) / h
    if not b > 0:
        raise ValueError(f"bubble average must be positive, got {b!r}")
    b_e = h * float(np.dot(w, np.asarray(derivative(x)) ** 2))
    return BubbleSpec("custom", h, evaluator, derivative, b, b_e)


# --------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class TestFunction:
    """g_i = phi_i + B_i - B_{i+1}."""

    __test__ = False  # keep pytest from collecting this class

    mesh: Mesh1D
    bubble: BubbleSpec
    i: int

    def __post_init__(self):
        if not 1 <= self.i <= self.mesh.n - 1:
            raise IndexError(f"test function index {self.i} outside 1..{self.mesh.n - 1}")

    def __call__(self, x):
        return test_eval(self, x)


def element_bubble(mesh: Mesh1D, bubble: BubbleSpec, e: int, x):
    """B_e(x) = B(x - x_{e-1}) on element e, zero elsewhere."""
    x = np.asarray(x, dtype=float)
    a = (e - 1) * mesh.h
    t = x - a
    inside = (t >= 0.0) & (t <= mesh.h)
    out = np.where(inside, bubble(np.clip(t, 0.0, mesh.h)), 0.0)
    return out if out.ndim else float(out)


def test_eval(t: TestFunction, x):
    x = np.asarray(x, dtype=float)
    out = (
        hat_full(t.mesh, t.i, x)
        + element_bubble(t.mesh, t.bubble, t.i, x)
        - element_bubble(t.mesh, t.bubble, t.i + 1, x)
    )
    return out if np.ndim(out) else float(out)


test_eval.__test__ = False


def element_test_values(mesh: Mesh1D, bubble: BubbleSpec):
    """Quadrature data for the test basis, element by element.

    Returns ``(pts, wts, left, right)`` of shape (n, q): on element e the
    two nonzero test functions are g_{e-1} = phi_{e-1} - B_e (``left``) and
    g_e = phi_e + B_e (``right``).
    """
    xl, wl = bubble.local_rule()
    a = mesh.nodes[:-1, None]
    pts = a + xl
    wts = np.broadcast_to(wl, pts.shape)
    s = xl / mesh.h
    bvals = bubble(xl)
    left = np.broadcast_to(1.0 - s - bvals, pts.shape)
    right = np.broadcast_to(s + bvals, pts.shape)
    return pts, wts, left, right
