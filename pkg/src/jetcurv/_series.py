"""Truncated multivariate power series with complex coefficients.

A series lives in ``nv`` variables and keeps every monomial of total degree
at most ``order``. For a potential on C^n the variables are
``(w_1, ..., w_n, wbar_1, ..., wbar_n)`` treated as independent, which turns
Wirtinger derivatives into ordinary Taylor coefficients:
``D^{alpha,beta} phi = alpha! beta! * coeff[alpha + beta]``.

Monomials are stored in graded lexicographic order: by total degree, then
lexicographically descending in the exponent tuple.
"""

from functools import lru_cache
from math import factorial

import numpy as np


def _exponents(nv, d):
    if nv == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _exponents(nv - 1, d - first):
            yield (first,) + rest


class Basis:
    """Monomial table and multiplication map for ``(nv, order)``."""

    def __init__(self, nv, order):
        self.nv = nv
        self.order = order
        exps = [e for d in range(order + 1) for e in _exponents(nv, d)]
        self.exps = exps
        self.index = {e: i for i, e in enumerate(exps)}
        self.size = len(exps)
        self.degree = np.array([sum(e) for e in exps], dtype=int)
        # first index of each degree block, plus sentinel
        self.block_end = [int(np.searchsorted(self.degree, d, side="right")) for d in range(order + 1)]
        self.weights = np.array(
            [float(np.prod([factorial(k) for k in e])) for e in exps]
        )

        ii, jj, kk = [], [], []
        for i, ei in enumerate(exps):
            room = order - self.degree[i]
            for j in range(self.block_end[room]):
                ej = exps[j]
                ii.append(i)
                jj.append(j)
                kk.append(self.index[tuple(a + b for a, b in zip(ei, ej))])
        self._i = np.array(ii, dtype=np.intp)
        self._j = np.array(jj, dtype=np.intp)
        self._k = np.array(kk, dtype=np.intp)

        unit = np.eye(nv, dtype=int)
        self.linear = np.array([self.index[tuple(u)] for u in unit]) if order >= 1 else None
        self.quadratic = (
            np.array([[self.index[tuple(u + v)] for v in unit] for u in unit]) if order >= 2 else None
        )

        # permutation realising conj-swap of the first and second half of variables
        if nv % 2 == 0:
            n = nv // 2
            self.swap = np.array([self.index[e[n:] + e[:n]] for e in exps], dtype=np.intp)
        else:
            self.swap = None

    def multiply(self, a, b):
        prod = a[self._i] * b[self._j]
        re = np.bincount(self._k, weights=prod.real, minlength=self.size)
        im = np.bincount(self._k, weights=prod.imag, minlength=self.size)
        return re + 1j * im


@lru_cache(maxsize=None)
def basis(nv, order):
    return Basis(nv, order)


class Series:
    """Element of C[x_1..x_nv] / (degree > order)."""

    __slots__ = ("basis", "c")

    def __init__(self, basis_, coeffs):
        self.basis = basis_
        self.c = coeffs

    @classmethod
    def zeros(cls, basis_):
        return cls(basis_, np.zeros(basis_.size, dtype=complex))

    @classmethod
    def constant(cls, basis_, value):
        s = cls.zeros(basis_)
        s.c[0] = value
        return s

    @classmethod
    def variable(cls, basis_, i, value=0.0):
        """The series ``value + x_i``."""
        s = cls.constant(basis_, value)
        if basis_.order >= 1:
            e = [0] * basis_.nv
            e[i] = 1
            s.c[basis_.index[tuple(e)]] = 1.0
        return s

    @property
    def const(self):
        return self.c[0]

    def copy(self):
        return Series(self.basis, self.c.copy())

    def _coerce(self, other):
        if isinstance(other, Series):
            return other.c
        out = np.zeros(self.basis.size, dtype=complex)
        out[0] = other
        return out

    def __add__(self, other):
        return Series(self.basis, self.c + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Series(self.basis, self.c - self._coerce(other))

    def __rsub__(self, other):
        return Series(self.basis, self._coerce(other) - self.c)

    def __neg__(self):
        return Series(self.basis, -self.c)

    def __mul__(self, other):
        if isinstance(other, Series):
            return Series(self.basis, self.basis.multiply(self.c, other.c))
        return Series(self.basis, self.c * other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Series(self.basis, self.c / scalar)

    def __pow__(self, k):
        if k == 0:
            return Series.constant(self.basis, 1.0)
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def conj_swap(self):
        """Complex conjugate, with holomorphic and anti-holomorphic variables exchanged."""
        return Series(self.basis, np.conj(self.c[self.basis.swap]))

    def log(self):
        c0 = self.c[0]
        if c0 == 0:
            raise ZeroDivisionError("log of a series with zero constant term")
        delta = self / c0 - 1.0
        out = Series.constant(self.basis, np.log(c0))
        power = delta
        for k in range(1, self.basis.order + 1):
            out = out + power * ((-1) ** (k + 1) / k)
            if k < self.basis.order:
                power = power * delta
        return out

    def exp(self):
        c0 = self.c[0]
        delta = self - c0
        total = Series.constant(self.basis, 1.0)
        power = Series.constant(self.basis, 1.0)
        for k in range(1, self.basis.order + 1):
            power = power * delta / k
            total = total + power
        return total * np.exp(c0)


def compose(outer, images, target):
    """Substitute ``x_i -> images[i]`` into ``outer``.

    ``images`` are series over the basis ``target`` with zero constant term,
    so truncation commutes with substitution.
    """
    src = outer.basis
    cache = {tuple([0] * src.nv): Series.constant(target, 1.0)}

    def monomial(e):
        m = cache.get(e)
        if m is None:
            k = next(i for i, v in enumerate(e) if v)
            lower = list(e)
            lower[k] -= 1
            m = monomial(tuple(lower)) * images[k]
            cache[e] = m
        return m

    out = np.zeros(target.size, dtype=complex)
    for idx in np.nonzero(outer.c)[0]:
        e = src.exps[idx]
        if sum(e) > target.order:
            continue
        out += outer.c[idx] * monomial(e).c
    return Series(target, out)
