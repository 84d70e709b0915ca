"""Function descriptor mini-grammar.

1D:  const:<c> | sin:<w> | cos:<w> | poly:c0,c1,... | split:<desc>
2D:  const:<c> | xy:<descx>*<descy>

Frequencies accept ``pi``, ``2pi``, ``3.5pi`` or a plain number.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from ..mesh import ScalarFn


class DescriptorError(ValueError):
    pass


@dataclass(frozen=True)
class Data1D:
    """Parsed 1D data; ``split`` asks for the mean-zero/constant splitting."""

    text: str
    f: ScalarFn
    split: bool = False


def _number(tok: str) -> float:
    tok = tok.strip()
    try:
        if tok.endswith("pi"):
            head = tok[:-2]
            return (float(head) if head else 1.0) * np.pi
        return float(tok)
    except ValueError:
        raise DescriptorError(f"bad number {tok!r}") from None


def _scalar(text: str) -> ScalarFn:
    kind, sep, arg = text.partition(":")
    if not sep or not arg:
        raise DescriptorError(f"descriptor {text!r} needs the form kind:arg")
    if kind == "const":
        return ScalarFn.const(_number(arg))
    if kind == "sin":
        return ScalarFn.sin(_number(arg))
    if kind == "cos":
        return ScalarFn.cos(_number(arg))
    if kind == "poly":
        coeffs = [_number(c) for c in arg.split(",")]
        return ScalarFn.poly(coeffs)
    raise DescriptorError(f"unknown descriptor kind {kind!r}")


def parse_1d(text: str) -> Data1D:
    if not isinstance(text, str):
        raise DescriptorError("function descriptor must be a string")
    text = text.strip()
    if text.startswith("split:"):
        inner = text[len("split:"):]
        if inner.startswith("split:"):
            raise DescriptorError("nested split")
        return Data1D(text, _scalar(inner), split=True)
    return Data1D(text, _scalar(text))


Data2D = Union[float, Callable]


def parse_2d(text: str) -> Data2D:
    """Constant (float) or a separable callable f(x, y) = fx(x) fy(y)."""
    if not isinstance(text, str):
        raise DescriptorError("function descriptor must be a string")
    text = text.strip()
    if text.startswith("const:"):
        return _number(text[len("const:"):])
    if text.startswith("xy:"):
        parts = text[len("xy:"):].split("*")
        if len(parts) != 2:
            raise DescriptorError(f"xy descriptor needs exactly one '*': {text!r}")
        fx, fy = _scalar(parts[0]), _scalar(parts[1])

        def f(x, y):
            return fx(x) * fy(y)

        return f
    raise DescriptorError(f"unknown 2D descriptor {text!r}")


def constant_of(f: ScalarFn) -> Optional[float]:
    return f.constant_value if f.is_constant else None
