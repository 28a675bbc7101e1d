"""Exact truncated power series over the rationals.

A series is stored by its ordinary coefficients c_0..c_N, so a counting
sequence t_0, t_1, ... lives here as c_n = t_n / n!.  Everything is a
`fractions.Fraction`; no floating point enters this module.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Union

from .variety import TreeVariety

Rational = Union[int, Fraction]

DEFAULT_ORDER = 80


class SeriesOrderError(ValueError):
    """Raised when an operation would silently mix truncation orders."""


class EgfSeries:
    """Truncated power series with exact rational coefficients.

    Binary operations demand equal truncation order; use `truncate` to
    align orders explicitly.  Instances are immutable.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Rational]):
        cs = tuple(Fraction(c) for c in coeffs)
        if not cs:
            raise ValueError("a series needs at least the constant coefficient")
        self._coeffs = cs

    @classmethod
    def zero(cls, order: int) -> "EgfSeries":
        return cls([Fraction(0)] * (order + 1))

    @classmethod
    def constant(cls, value: Rational, order: int) -> "EgfSeries":
        return cls([Fraction(value)] + [Fraction(0)] * order)

    @classmethod
    def monomial(cls, degree: int, order: int, coeff: Rational = 1) -> "EgfSeries":
        if degree > order:
            raise SeriesOrderError(f"monomial degree {degree} exceeds order {order}")
        cs = [Fraction(0)] * (order + 1)
        cs[degree] = Fraction(coeff)
        return cls(cs)

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    def coeff(self, n: int) -> Fraction:
        if not 0 <= n <= self.order:
            raise IndexError(f"coefficient {n} outside truncation order {self.order}")
        return self._coeffs[n]

    def counts(self) -> list[int]:
        """Return n! * c_n for every n, insisting each is a nonnegative integer."""
        out = []
        for n, c in enumerate(self._coeffs):
            t = c * factorial(n)
            if t.denominator != 1 or t < 0:
                raise ValueError(f"coefficient {n} is not a nonnegative count: {t}")
            out.append(int(t))
        return out

    def truncate(self, order: int) -> "EgfSeries":
        if order > self.order:
            raise SeriesOrderError(f"cannot extend order {self.order} to {order}")
        return EgfSeries(self._coeffs[: order + 1])

    def _check_order(self, other: "EgfSeries") -> None:
        if self.order != other.order:
            raise SeriesOrderError(
                f"order mismatch: {self.order} vs {other.order}; truncate explicitly"
            )

    def __add__(self, other: "EgfSeries") -> "EgfSeries":
        self._check_order(other)
        return EgfSeries(a + b for a, b in zip(self._coeffs, other._coeffs))

    def __sub__(self, other: "EgfSeries") -> "EgfSeries":
        self._check_order(other)
        return EgfSeries(a - b for a, b in zip(self._coeffs, other._coeffs))

    def __neg__(self) -> "EgfSeries":
        return EgfSeries(-a for a in self._coeffs)

    def __mul__(self, other: Union["EgfSeries", Rational]) -> "EgfSeries":
        if isinstance(other, (int, Fraction)):
            return EgfSeries(a * other for a in self._coeffs)
        self._check_order(other)
        a, b = self._coeffs, other._coeffs
        n = len(a)
        out = [Fraction(0)] * n
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j in range(n - i):
                if b[j]:
                    out[i + j] += ai * b[j]
        return EgfSeries(out)

    __rmul__ = __mul__

    def derivative(self) -> "EgfSeries":
        if self.order == 0:
            raise SeriesOrderError("cannot differentiate an order-0 series")
        return EgfSeries((n + 1) * c for n, c in enumerate(self._coeffs[1:]))

    def integral(self) -> "EgfSeries":
        """Antiderivative with constant term 0; the order grows by one."""
        out = [Fraction(0)]
        out.extend(c / (n + 1) for n, c in enumerate(self._coeffs))
        return EgfSeries(out)

    def is_zero(self) -> bool:
        return all(not c for c in self._coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EgfSeries):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self._coeffs[:6])
        tail = ", ..." if self.order > 5 else ""
        return f"EgfSeries([{head}{tail}], order={self.order})"


@lru_cache(maxsize=None)
def base_series(variety: TreeVariety, order: int) -> EgfSeries:
    """Tree-count series of the given variety through the given order.

    Both varieties are generated by their quadratic first-order equations,
    y' = (1 + y^2)/2 for non-plane and y' = 1 - y + y^2 for plane trees,
    with y(0) = 1; this needs one convolution per coefficient and no
    series division.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    cs = [Fraction(1)]
    if variety is TreeVariety.NONPLANE:
        for n in range(order):
            square = sum(cs[i] * cs[n - i] for i in range(n + 1))
            rhs = ((1 if n == 0 else 0) + square) / 2
            cs.append(rhs / (n + 1))
    else:
        for n in range(order):
            square = sum(cs[i] * cs[n - i] for i in range(n + 1))
            rhs = (1 if n == 0 else 0) - cs[n] + square
            cs.append(rhs / (n + 1))
    return EgfSeries(cs)


@lru_cache(maxsize=None)
def tree_counts(variety: TreeVariety, order: int) -> tuple[int, ...]:
    """n!-normalized tree counts of `base_series`, as plain integers."""
    return tuple(base_series(variety, order).counts())


def solve_linear_ode(m: EgfSeries, p: EgfSeries, y0: Rational, order: int) -> EgfSeries:
    """Unique series y with y(0)=y0 and y' = m*y + p, through the given order.

    Forward recurrence: (n+1) y_{n+1} = [z^n](m*y) + p_n.  Both m and p
    must carry coefficients at least through order-1.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if order > 0 and (m.order < order - 1 or p.order < order - 1):
        raise SeriesOrderError(
            f"m and p must reach order {order - 1}; got {m.order} and {p.order}"
        )
    mc, pc = m.coeffs, p.coeffs
    ys = [Fraction(y0)]
    for n in range(order):
        conv = sum(mc[i] * ys[n - i] for i in range(n + 1))
        ys.append((conv + pc[n]) / (n + 1))
    return EgfSeries(ys)


def solve_plane_linear_ode(p: EgfSeries, y0: Rational, order: int) -> EgfSeries:
    """Solve f' = 2*f*(B - 1) + f + p for the plane base series B."""
    b = base_series(TreeVariety.PLANE, max(order - 1, 0))
    m = b * 2 - EgfSeries.constant(1, b.order)
    return solve_linear_ode(m, p, y0, order)
