"""Uniform 1D meshes, hat functions, interpolation and Gauss quadrature."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

DEFAULT_ORDER = 10


@lru_cache(maxsize=64)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_rule(a: float, b: float, order: int = DEFAULT_ORDER):
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    if order < 1:
        raise ValueError("order must be >= 1")
    x, w = _leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def gauss_quad(g: Callable, a: float, b: float, order: int = DEFAULT_ORDER) -> float:
    """Approximate the integral of ``g`` over [a, b].

    Exact for polynomials of degree <= 2*order - 1.  ``g`` must accept a
    numpy array.
    """
    if a > b:
        raise ValueError("need a <= b")
    x, w = gauss_rule(a, b, order)
    return float(np.dot(w, np.broadcast_to(g(x), x.shape)))


def graded_breakpoints(a: float, b: float, levels: int = 40) -> np.ndarray:
    """Breakpoints on [a, b] refined geometrically toward both ends.

    Used to integrate functions with exponential layers of unknown width
    attached to element endpoints.
    """
    if levels <= 0:
        return np.array([a, b])
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    s = half * 2.0 ** -np.arange(0, levels + 1)
    pts = np.concatenate(([a], a + s[::-1], [mid], b - s, [b]))
    return np.unique(pts)


def composite_rule(breaks: np.ndarray, order: int = DEFAULT_ORDER):
    x, w = _leggauss(order)
    a = breaks[:-1, None]
    half = 0.5 * np.diff(breaks)[:, None]
    return (a + half * (x + 1.0)).ravel(), (half * w).ravel()


# --------------------------------------------------------------------------
# data functions


def _poly_eval(coeffs, x):
    return np.polynomial.polynomial.polyval(x, coeffs)


@dataclass(frozen=True)
class ScalarFn:
    """A data function f on [0, 1].

    ``terms`` optionally records the closed form as a tuple of
    ``("poly", coeffs)``, ``("sin", amp, omega)`` and ``("cos", amp, omega)``
    entries; oracles use it to build exact solutions.  ``sup`` and ``dsup``
    are the known sup-norms of f and f'.
    """

    evaluator: Callable
    sup: Optional[float] = None
    dsup: Optional[float] = None
    terms: Optional[tuple] = None
    derivative: Optional[Callable] = field(default=None, compare=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.evaluator(x), dtype=float), x.shape).copy()

    # constructors ---------------------------------------------------------

    @classmethod
    def from_terms(cls, terms, sup=None, dsup=None) -> "ScalarFn":
        terms = tuple(terms)

        def ev(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for t in terms:
                if t[0] == "poly":
                    out = out + _poly_eval(t[1], x)
                elif t[0] == "sin":
                    out = out + t[1] * np.sin(t[2] * x)
                elif t[0] == "cos":
                    out = out + t[1] * np.cos(t[2] * x)
                else:
                    raise ValueError(f"unknown term kind {t[0]!r}")
            return out

        def dev(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for t in terms:
                if t[0] == "poly":
                    out = out + _poly_eval(np.polynomial.polynomial.polyder(t[1]), x)
                elif t[0] == "sin":
                    out = out + t[1] * t[2] * np.cos(t[2] * x)
                else:
                    out = out - t[1] * t[2] * np.sin(t[2] * x)
            return out

        fn = cls(ev, sup, dsup, terms, dev)
        if sup is None or dsup is None:
            xs = np.linspace(0.0, 1.0, 20001)
            fn = cls(
                ev,
                float(np.max(np.abs(ev(xs)))) if sup is None else sup,
                float(np.max(np.abs(dev(xs)))) if dsup is None else dsup,
                terms,
                dev,
            )
        return fn

    @classmethod
    def const(cls, c: float) -> "ScalarFn":
        return cls.from_terms([("poly", (float(c),))], sup=abs(c), dsup=0.0)

    @classmethod
    def poly(cls, coeffs) -> "ScalarFn":
        return cls.from_terms([("poly", tuple(float(c) for c in coeffs))])

    @classmethod
    def sin(cls, omega: float = np.pi, amp: float = 1.0) -> "ScalarFn":
        return cls.from_terms([("sin", float(amp), float(omega))])

    @classmethod
    def cos(cls, omega: float = 2 * np.pi, amp: float = 1.0) -> "ScalarFn":
        return cls.from_terms([("cos", float(amp), float(omega))])

    @property
    def is_constant(self) -> bool:
        return (
            self.terms is not None
            and len(self.terms) == 1
            and self.terms[0][0] == "poly"
            and len(self.terms[0][1]) == 1
        )

    @property
    def constant_value(self) -> float:
        return float(self.terms[0][1][0])

    def mean(self) -> float:
        """Integral of f over [0, 1]."""
        if self.terms is not None:
            total = 0.0
            for t in self.terms:
                if t[0] == "poly":
                    total += sum(c / (k + 1) for k, c in enumerate(t[1]))
                elif t[0] == "sin":
                    total += t[1] * (1.0 - np.cos(t[2])) / t[2]
                else:
                    total += t[1] * np.sin(t[2]) / t[2]
            return float(total)
        x, w = composite_rule(np.linspace(0.0, 1.0, 65), DEFAULT_ORDER)
        return float(np.dot(w, self(x)))

    def shifted(self, c: float) -> "ScalarFn":
        """f + c."""
        if self.terms is None:
            ev = self.evaluator
            return ScalarFn(lambda x: ev(x) + c, derivative=self.derivative)
        return ScalarFn.from_terms(self.terms + (("poly", (float(c),)),), dsup=self.dsup)


# --------------------------------------------------------------------------
# meshes


@dataclass(frozen=True)
class Mesh1D:
    """Uniform partition of [0, 1] into ``n`` elements."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"mesh needs an integer n >= 2, got {self.n!r}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]

    def element_of(self, x):
        """1-based element index containing x; nodes go to the left element."""
        x = np.asarray(x, dtype=float)
        e = np.searchsorted(self.nodes, x, side="left")
        return np.clip(e, 1, self.n)

    def element_rule(self, order: int = DEFAULT_ORDER):
        """Quadrature points/weights per element, shape (n, order)."""
        x, w = _leggauss(order)
        half = 0.5 * self.h
        pts = self.nodes[:-1, None] + half * (x + 1.0)
        return pts, np.broadcast_to(half * w, pts.shape)


def make_mesh(n: int) -> Mesh1D:
    return Mesh1D(n)


@dataclass(frozen=True, eq=False)
class NodalField1D:
    """Continuous piecewise-linear function with zero boundary values.

    ``values`` holds the n-1 interior nodal coefficients.
    """

    mesh: Mesh1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.mesh.n - 1,):
            raise ValueError(f"expected {self.mesh.n - 1} interior values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def full(self) -> np.ndarray:
        """Nodal values including the two zero boundary values."""
        return np.concatenate(([0.0], self.values, [0.0]))

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.mesh.nodes, self.full)

    def derivative(self, x):
        """Piecewise-constant derivative; left-sided at nodes."""
        e = self.mesh.element_of(x)
        u = self.full
        return (u[e] - u[e - 1]) / self.mesh.h

    def integral(self) -> float:
        return float(self.mesh.h * np.sum(self.values))

    def element_averages(self) -> np.ndarray:
        u = self.full
        return 0.5 * (u[:-1] + u[1:])

    def __add__(self, other):
        return NodalField1D(self.mesh, self.values + other.values)

    def __sub__(self, other):
        return NodalField1D(self.mesh, self.values - other.values)

    def __mul__(self, c):
        return NodalField1D(self.mesh, c * self.values)

    __rmul__ = __mul__


def hat_eval(mesh: Mesh1D, i: int, x):
    """Value of the interior hat function phi_i at x."""
    if not 1 <= i <= mesh.n - 1:
        raise IndexError(f"hat index {i} outside 1..{mesh.n - 1}")
    return hat_full(mesh, i, x)


def hat_full(mesh: Mesh1D, i: int, x):
    """Hat function phi_i for i in 0..n (boundary hats included)."""
    x = np.asarray(x, dtype=float)
    out = np.maximum(0.0, 1.0 - np.abs(x * mesh.n - i))
    return out if out.ndim else float(out)


def interpolate(mesh: Mesh1D, f) -> NodalField1D:
    """Nodal interpolant restricted to the zero-boundary representation."""
    return NodalField1D(mesh, np.asarray(f(mesh.interior), dtype=float))


def teeth_saw(mesh: Mesh1D) -> NodalField1D:
    """phi_1 + phi_3 + ... (the alternating mode)."""
    v = np.zeros(mesh.n - 1)
    v[0::2] = 1.0
    return NodalField1D(mesh, v)
