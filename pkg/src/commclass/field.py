"""Finite fields F_q, q = p^e, in polynomial representation.

An element is stored as an integer code ``sum(c_i * p**i)`` where ``c_i`` is
the coefficient of ``x**i`` modulo the defining polynomial.  Codes are the
canonical form: equal elements have equal codes, and the natural order of
codes is the enumeration order (lexicographic on ``(c_{e-1}, ..., c_0)``).

The context also exposes vectorised operations on numpy arrays of codes,
which is what the matrix layers use.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class FieldError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split q into (p, e) with q = p**e, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, e


# Polynomials over F_p are coefficient tuples, lowest degree first.

def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = [int(c) % p for c in a]
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while True:
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            return a
        f = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - f * c) % p


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = list(poly)
    deg = len(poly) - 1
    if deg < 1 or poly[-1] % p == 0:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if any(_poly_mod(poly, list(low) + [1], p)):
                continue
            return False
    return True


def least_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Least monic irreducible of degree e, ordered by (a_{e-1}, ..., a_0)."""
    for code in range(p**e):
        low = [(code // p**i) % p for i in range(e)]
        poly = tuple(low) + (1,)
        if is_irreducible(poly, p):
            return poly
    raise FieldError(f"no irreducible polynomial of degree {e} over F_{p}")  # pragma: no cover


class FqContext:
    """The field F_q.  Immutable once built; safe to share between workers."""

    def __init__(self, p: int, e: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if e < 1:
            raise FieldError(f"extension degree must be >= 1, got {e}")
        if modulus is None:
            modulus = least_irreducible(p, e) if e > 1 else (0, 1)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {e}: {modulus}")
        if e > 1 and not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = modulus
        self.prime = e == 1
        self._inv = np.zeros(self.q, dtype=np.int64)
        if self.prime:
            for a in range(1, p):
                self._inv[a] = pow(a, p - 2, p)
            self._add = self._mul = self._neg = None
        else:
            self._build_tables()

    def _build_tables(self) -> None:
        p, e, q = self.p, self.e, self.q
        codes = np.arange(q)
        weights = p ** np.arange(e)
        digits = (codes[:, None] // weights[None, :]) % p  # (q, e)
        self._add = (((digits[:, None, :] + digits[None, :, :]) % p) @ weights).astype(np.int64)
        self._neg = (((-digits) % p) @ weights).astype(np.int64)
        # xpow[i] holds the digits of x**i * y for every y
        xpow = [digits]
        red = np.array(self.modulus[:e])
        for _ in range(1, e):
            cur = xpow[-1]
            top = cur[:, e - 1]
            shifted = np.concatenate([np.zeros((q, 1), dtype=cur.dtype), cur[:, : e - 1]], axis=1)
            xpow.append((shifted - top[:, None] * red[None, :]) % p)
        prod = np.zeros((q, q, e), dtype=np.int64)
        for i in range(e):
            prod += digits[:, i, None, None] * xpow[i][None, :, :]
        self._mul = ((prod % p) @ weights).astype(np.int64)
        for a in range(1, q):
            self._inv[a] = int(np.nonzero(self._mul[a] == 1)[0][0])

    def __eq__(self, other):
        return isinstance(other, FqContext) and (self.p, self.e, self.modulus) == (
            other.p,
            other.e,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    def __repr__(self):
        if self.prime:
            return f"FqContext(q={self.q})"
        return f"FqContext(q={self.q}, modulus={self.modulus})"

    def __call__(self, value: int | Sequence[int]) -> "FqElement":
        if isinstance(value, (int, np.integer)):
            if self.prime:
                return FqElement(self, int(value) % self.p)
            if not 0 <= value < self.q:
                raise FieldError(f"code {value} out of range for F_{self.q}")
            return FqElement(self, int(value))
        coeffs = list(value)
        if len(coeffs) > self.e:
            coeffs = _poly_mod(coeffs, self.modulus, self.p)
        coeffs = coeffs + [0] * (self.e - len(coeffs))
        return FqElement(self, sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs)))

    @property
    def zero(self) -> "FqElement":
        return FqElement(self, 0)

    @property
    def one(self) -> "FqElement":
        return FqElement(self, 1)

    def elements(self) -> list["FqElement"]:
        return [FqElement(self, c) for c in range(self.q)]

    def coeffs(self, code: int) -> tuple[int, ...]:
        return tuple((code // self.p**i) % self.p for i in range(self.e))

    # vectorised arithmetic on integer codes ---------------------------------

    def add(self, a, b):
        if self.prime:
            return (np.asarray(a) + b) % self.p
        return self._add[a, b]

    def sub(self, a, b):
        if self.prime:
            return (np.asarray(a) - b) % self.p
        return self._add[a, self._neg[b]]

    def neg(self, a):
        if self.prime:
            return (-np.asarray(a)) % self.p
        return self._neg[a]

    def mul(self, a, b):
        if self.prime:
            return (np.asarray(a) * b) % self.p
        return self._mul[a, b]

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in F_q")
        return self._inv[a]

    def matmul(self, a, b):
        """Batched matrix product over F_q (numpy broadcasting rules)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.prime:
            return np.matmul(a, b) % self.p
        # 1-D operands follow np.matmul: promote, multiply, drop the axis
        if a.ndim == 1:
            return self.matmul(a[None, :], b)[..., 0, :]
        if b.ndim == 1:
            return self.matmul(a, b[:, None])[..., 0]
        terms = self._mul[a[..., :, :, None], b[..., None, :, :]]  # (..., i, k, j)
        out = terms[..., 0, :]
        for k in range(1, terms.shape[-2]):
            out = self._add[out, terms[..., k, :]]
        return out


@dataclass(frozen=True)
class FqElement:
    ctx: FqContext
    code: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.coeffs(self.code)

    def _check(self, other) -> "FqElement":
        if isinstance(other, (int, np.integer)):
            return self.ctx(int(other))
        if not isinstance(other, FqElement) or other.ctx != self.ctx:
            raise FieldError("operands live in different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FqElement(self.ctx, int(self.ctx.add(self.code, other.code)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return FqElement(self.ctx, int(self.ctx.sub(self.code, other.code)))

    def __neg__(self):
        return FqElement(self.ctx, int(self.ctx.neg(self.code)))

    def __mul__(self, other):
        other = self._check(other)
        return FqElement(self.ctx, int(self.ctx.mul(self.code, other.code)))

    __rmul__ = __mul__

    def inverse(self) -> "FqElement":
        if self.code == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return FqElement(self.ctx, int(self.ctx.inv(self.code)))

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.ctx.one, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return self.code != 0

    def __int__(self):
        return self.code

    def __repr__(self):
        if self.ctx.prime:
            return str(self.code)
        terms = [
            ("" if c == 1 and i else str(c)) + ("x" if i == 1 else f"x^{i}" if i else "")
            for i, c in reversed(list(enumerate(self.coeffs)))
            if c
        ]
        return "+".join(terms) or "0"


# Flat API ------------------------------------------------------------------

def fq_make(p: int, e: int = 1, modulus: Iterable[int] | None = None) -> FqContext:
    return FqContext(p, e, None if modulus is None else tuple(modulus))


def fq_from_q(q: int, modulus: Iterable[int] | None = None) -> FqContext:
    p, e = prime_power(q)
    return fq_make(p, e, modulus)


def fq_add(a: FqElement, b: FqElement) -> FqElement:
    return a + b


def fq_mul(a: FqElement, b: FqElement) -> FqElement:
    return a * b


def fq_neg(a: FqElement) -> FqElement:
    return -a


def fq_inv(a: FqElement) -> FqElement:
    return a.inverse()


def fq_enumerate(ctx: FqContext) -> list[FqElement]:
    return ctx.elements()
