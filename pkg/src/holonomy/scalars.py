"""Scalar arithmetic shared by every module.

Two modes coexist:

* float mode -- plain python ``complex`` with a global tolerance ``TAU``
  (overridable through the ``HOLONOMY_TOLERANCE`` environment variable);
* exact mode -- elements of Q, Q(i) or Q(omega) (omega = exp(2*pi*i/3))
  stored as pairs of :class:`fractions.Fraction` over a fixed basis element.

The three exact fields are enough to express every root of unity of order
1, 2, 3, 4 or 6, which covers all lattice cases that can actually occur.
"""
from __future__ import annotations

import os
from fractions import Fraction
from typing import Union

TAU_DEFAULT = 1e-9


def tolerance() -> float:
    """Current float-mode tolerance."""
    env = os.environ.get("HOLONOMY_TOLERANCE")
    if env:
        return float(env)
    return TAU_DEFAULT


# basis tags.  "1" means the rational field (second coordinate must be 0),
# "i" means Q(i) and "w" means Q(omega) with omega = exp(2*pi*i/3).
_BASES = ("1", "i", "w")

# trace u + conj(u) of the basis element (u*conj(u) = 1 in both cases)
_TRACE = {"1": Fraction(2), "i": Fraction(0), "w": Fraction(-1)}

# imaginary part of the basis element (as a float)
_IM = {"1": 0.0, "i": 1.0, "w": 0.8660254037844386}
_RE = {"1": 1.0, "i": 0.0, "w": -0.5}


class ExactScalar:
    """x + y*u with x, y rational and u in {1, i, omega}."""

    __slots__ = ("x", "y", "basis")

    def __init__(self, x, y=0, basis: str = "1"):
        if basis not in _BASES:
            raise ValueError(f"unknown basis {basis!r}")
        self.x = Fraction(x)
        self.y = Fraction(y)
        if basis == "1" and self.y != 0:
            raise ValueError("rational basis cannot carry a second coordinate")
        self.basis = basis

    # -- helpers ---------------------------------------------------------
    @staticmethod
    def _merge_basis(a: "ExactScalar", b: "ExactScalar") -> str:
        if a.basis == b.basis:
            return a.basis
        if a.basis == "1":
            return b.basis
        if b.basis == "1":
            return a.basis
        raise ValueError(f"cannot mix bases {a.basis!r} and {b.basis!r}")

    @staticmethod
    def coerce(v) -> "ExactScalar":
        if isinstance(v, ExactScalar):
            return v
        if isinstance(v, (int, Fraction)):
            return ExactScalar(v)
        raise TypeError(f"cannot coerce {type(v).__name__} to ExactScalar")

    def in_basis(self, basis: str) -> "ExactScalar":
        if self.basis == basis or self.y == 0 and self.basis == "1":
            return ExactScalar(self.x, self.y, basis if self.y == 0 else self.basis)
        raise ValueError(f"cannot move {self.basis!r} element to basis {basis!r}")

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        other = ExactScalar.coerce(other)
        basis = self._merge_basis(self, other)
        return ExactScalar(self.x + other.x, self.y + other.y, basis)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(-self.x, -self.y, self.basis)

    def __sub__(self, other):
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other):
        return ExactScalar.coerce(other) + (-self)

    def __mul__(self, other):
        other = ExactScalar.coerce(other)
        basis = self._merge_basis(self, other)
        # u^2 = t*u - 1 with t = trace(u)  (u has norm 1)
        t = _TRACE[basis]
        x = self.x * other.x - self.y * other.y
        y = self.x * other.y + self.y * other.x + t * self.y * other.y
        return ExactScalar(x, y, basis)

    __rmul__ = __mul__

    def conj(self) -> "ExactScalar":
        # conj(u) = t - u
        t = _TRACE[self.basis]
        return ExactScalar(self.x + t * self.y, -self.y, self.basis)

    def norm2(self) -> Fraction:
        """z * conj(z), a nonnegative rational."""
        t = _TRACE[self.basis]
        return self.x * self.x + t * self.x * self.y + self.y * self.y

    def inverse(self) -> "ExactScalar":
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("exact scalar is zero")
        c = self.conj()
        return ExactScalar(c.x / n, c.y / n, c.basis)

    def __truediv__(self, other):
        return self * ExactScalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return ExactScalar.coerce(other) * self.inverse()

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_one(self) -> bool:
        return self.x == 1 and self.y == 0

    def is_rational(self) -> bool:
        return self.y == 0

    def __eq__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        if self.y == 0:
            return hash(("ex", self.x))
        return hash(("ex", self.x, self.y, self.basis))

    def __repr__(self):
        if self.y == 0:
            return f"ExactScalar({self.x})"
        return f"ExactScalar({self.x}, {self.y}, {self.basis!r})"

    # -- conversions -----------------------------------------------------
    def __complex__(self) -> complex:
        return complex(
            float(self.x) + float(self.y) * _RE[self.basis],
            float(self.y) * _IM[self.basis],
        )


Scalar = Union[complex, ExactScalar]


def is_exact(v) -> bool:
    return isinstance(v, ExactScalar)


def as_complex(v: Scalar) -> complex:
    return complex(v)


def scalar_add(a: Scalar, b: Scalar) -> Scalar:
    if is_exact(a) and is_exact(b):
        return a + b
    return as_complex(a) + as_complex(b)


def scalar_mul(a: Scalar, b: Scalar) -> Scalar:
    if is_exact(a) and is_exact(b):
        return a * b
    return as_complex(a) * as_complex(b)


def scalar_sub(a: Scalar, b: Scalar) -> Scalar:
    if is_exact(a) and is_exact(b):
        return a - b
    return as_complex(a) - as_complex(b)


def scalar_div(a: Scalar, b: Scalar) -> Scalar:
    if is_exact(a) and is_exact(b):
        return a / b
    return as_complex(a) / as_complex(b)


def scalar_conj(a: Scalar) -> Scalar:
    if is_exact(a):
        return a.conj()
    return as_complex(a).conjugate()


def scalar_eq(a: Scalar, b: Scalar, tol: float | None = None) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    if tol is None:
        tol = tolerance()
    return abs(as_complex(a) - as_complex(b)) <= tol


def scalar_is_zero(a: Scalar, tol: float | None = None) -> bool:
    if is_exact(a):
        return a.is_zero()
    if tol is None:
        tol = tolerance()
    return abs(as_complex(a)) <= tol


def cross(z: Scalar, w: Scalar):
    """det(z, w) seen as vectors of R^2.

    For exact scalars over basis u the result is the rational coefficient r
    with det = r * Im(u); both volume and lattice area carry the same factor
    Im(u), so comparisons between them stay exact.  For floats the actual
    determinant is returned.
    """
    if is_exact(z) and is_exact(w):
        if z.basis != w.basis and z.basis != "1" and w.basis != "1":
            raise ValueError("cross of mixed bases")
        return z.x * w.y - w.x * z.y
    zc, wc = as_complex(z), as_complex(w)
    return (zc.conjugate() * wc).imag


def root_of_unity(n: int) -> ExactScalar:
    """Exact primitive n-th root of unity for n in {1, 2, 3, 4, 6}."""
    if n == 1:
        return ExactScalar(1)
    if n == 2:
        return ExactScalar(-1)
    if n == 3:
        return ExactScalar(0, 1, "w")
    if n == 4:
        return ExactScalar(0, 1, "i")
    if n == 6:
        return ExactScalar(1, 1, "w")
    raise ValueError(f"no exact root of unity of order {n} in Q, Q(i), Q(w)")
