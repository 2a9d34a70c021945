"""Truncated multivariate Taylor (jet) arithmetic.

A Jet stores the Taylor coefficients of a smooth function around a base
point, up to a fixed total degree, for a fixed number of chart variables.
All arithmetic is exact to roundoff at the stored order, which makes jets
the derivative carrier for every field in the engine: metrics, frames,
connection coefficients and spinor components are all jet-valued, and
covariant derivatives reduce to coefficient shuffles.

Coefficients are kept in a dense numpy array over the graded-lex monomial
basis.  The leading axes of the coefficient array are free batch axes, so a
single Jet can carry one value per sample point and every operation stays
vectorised over the batch.

Operations between jets of different order truncate to the lower order
(differentiating drops the order by one, so mixed orders arise naturally
in derived fields).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


class DivByZeroJet(ArithmeticError):
    """Division by a jet whose value (constant term) is zero."""


class DomainError(ValueError):
    """Composition outside the domain of the univariate function."""


class OrderExceeded(ValueError):
    """A derivative of higher order than the jet carries was requested."""


_VALUE_FLOOR = 1e-14


@lru_cache(maxsize=None)
def monomials(nvars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All exponent multi-indices with total degree <= order, graded-lex.

    Grading first by total degree means the basis for a lower order is a
    prefix of the basis for a higher order, so truncation is a slice.
    """
    out = []
    for deg in range(order + 1):
        out.extend(_fixed_degree(nvars, deg))
    return tuple(out)


def _fixed_degree(nvars, deg):
    if nvars == 1:
        return [(deg,)]
    out = []
    for head in range(deg, -1, -1):
        for rest in _fixed_degree(nvars - 1, deg - head):
            out.append((head,) + rest)
    return out


@lru_cache(maxsize=None)
def _index_map(nvars, order):
    return {m: i for i, m in enumerate(monomials(nvars, order))}


@lru_cache(maxsize=None)
def _mul_tables(nvars, order):
    """Index arrays (I, J) and scatter matrix S with c = (a[I]*b[J]) @ S."""
    mons = monomials(nvars, order)
    idx = _index_map(nvars, order)
    I, J, K = [], [], []
    for i, mi in enumerate(mons):
        di = sum(mi)
        for j, mj in enumerate(mons):
            if di + sum(mj) > order:
                continue
            I.append(i)
            J.append(j)
            K.append(idx[tuple(a + b for a, b in zip(mi, mj))])
    I = np.asarray(I, dtype=np.intp)
    J = np.asarray(J, dtype=np.intp)
    S = np.zeros((len(K), len(mons)))
    S[np.arange(len(K)), K] = 1.0
    return I, J, S


@lru_cache(maxsize=None)
def _derive_tables(nvars, order, var):
    """(src, dst, factor) arrays mapping order -> order-1 coefficients."""
    mons_lo = monomials(nvars, order - 1)
    idx_hi = _index_map(nvars, order)
    src, dst, fac = [], [], []
    for d, m in enumerate(mons_lo):
        up = list(m)
        up[var] += 1
        src.append(idx_hi[tuple(up)])
        dst.append(d)
        fac.append(up[var])
    return (np.asarray(src, dtype=np.intp), np.asarray(dst, dtype=np.intp),
            np.asarray(fac, dtype=float))


class Jet:
    """Truncated Taylor expansion in ``nvars`` variables to total ``order``."""

    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars: int, order: int, coeffs: np.ndarray):
        self.nvars = nvars
        self.order = order
        self.coeffs = coeffs  # shape (..., ncoeffs(nvars, order))

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(nvars, order, value):
        value = np.asarray(value)
        n = len(monomials(nvars, order))
        coeffs = np.zeros(value.shape + (n,), dtype=_promote(value.dtype))
        coeffs[..., 0] = value
        return Jet(nvars, order, coeffs)

    @staticmethod
    def variable(nvars, order, var, value):
        j = Jet.constant(nvars, order, value)
        if order >= 1:
            e = tuple(1 if k == var else 0 for k in range(nvars))
            j.coeffs[..., _index_map(nvars, order)[e]] = 1.0
        return j

    # -- basic views --------------------------------------------------------

    @property
    def value(self):
        """Function value at the base point (batched)."""
        return self.coeffs[..., 0]

    @property
    def batch_shape(self):
        return self.coeffs.shape[:-1]

    def truncate(self, order):
        if order >= self.order:
            return self
        n = len(monomials(self.nvars, order))
        return Jet(self.nvars, order, self.coeffs[..., :n])

    def copy(self):
        return Jet(self.nvars, self.order, self.coeffs.copy())

    def conj(self):
        return Jet(self.nvars, self.order, np.conj(self.coeffs))

    @property
    def real(self):
        return Jet(self.nvars, self.order, self.coeffs.real.copy())

    @property
    def imag(self):
        return Jet(self.nvars, self.order, self.coeffs.imag.copy())

    # -- derivatives --------------------------------------------------------

    def derive(self, var):
        """Partial derivative along chart variable ``var``; order drops by 1."""
        if self.order < 1:
            raise OrderExceeded("jet order 0 cannot be differentiated")
        src, dst, fac = _derive_tables(self.nvars, self.order, var)
        out = np.zeros(self.coeffs.shape[:-1] + (len(dst),), dtype=self.coeffs.dtype)
        out[..., dst] = self.coeffs[..., src] * fac
        return Jet(self.nvars, self.order - 1, out)

    def partial(self, multi):
        """Value of the mixed partial derivative given by the multi-index."""
        multi = tuple(int(m) for m in multi)
        if sum(multi) > self.order:
            raise OrderExceeded(f"partial {multi} exceeds jet order {self.order}")
        pos = _index_map(self.nvars, self.order)[multi]
        factor = 1.0
        for m in multi:
            factor *= math.factorial(m)
        return self.coeffs[..., pos] * factor

    # -- ring operations ----------------------------------------------------

    def _lift(self, other):
        """Coerce ``other`` into (coeffs-like, is_jet)."""
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jet variable-count mismatch")
            return other, True
        return np.asarray(other), False

    def __add__(self, other):
        other, is_jet = self._lift(other)
        if is_jet:
            a, b = _align(self, other)
            return Jet(a.nvars, a.order, a.coeffs + b.coeffs)
        out = self.coeffs.copy()
        if out.dtype != _promote(np.result_type(out.dtype, other.dtype)):
            out = out.astype(_promote(np.result_type(out.dtype, other.dtype)))
        out[..., 0] = out[..., 0] + other
        return Jet(self.nvars, self.order, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.nvars, self.order, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other, is_jet = self._lift(other)
        if not is_jet:
            return Jet(self.nvars, self.order, self.coeffs * other[..., None])
        a, b = _align(self, other)
        I, J, S = _mul_tables(a.nvars, a.order)
        prod = a.coeffs[..., I] * b.coeffs[..., J]
        return Jet(a.nvars, a.order, prod @ S)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other, is_jet = self._lift(other)
        if not is_jet:
            return Jet(self.nvars, self.order, self.coeffs / other[..., None])
        return self * other._reciprocal()

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, exponent):
        if isinstance(exponent, int) and exponent >= 0:
            out = Jet.constant(self.nvars, self.order, np.ones(self.batch_shape))
            for _ in range(exponent):
                out = out * self
            return out
        return self.pow(float(exponent))

    def _reciprocal(self):
        a0 = self.value
        if np.any(np.abs(a0) < _VALUE_FLOOR):
            raise DivByZeroJet("jet reciprocal with (near-)zero value")
        ks = np.arange(self.order + 1)
        series = (-1.0) ** ks / a0[..., None] ** (ks + 1)
        return self._compose(series)

    # -- analytic functions -------------------------------------------------

    def _compose(self, series):
        """Sum series[k] * (self - value)^k by Horner; series shape (..., order+1)."""
        tilde = self.copy()
        tilde.coeffs = tilde.coeffs.astype(np.result_type(tilde.coeffs.dtype, series.dtype))
        tilde.coeffs[..., 0] = 0.0
        out = Jet.constant(self.nvars, self.order, series[..., -1])
        for k in range(self.order - 1, -1, -1):
            out = out * tilde
            out.coeffs[..., 0] = out.coeffs[..., 0] + series[..., k]
        return out

    def _series_from_derivs(self, derivs):
        """Taylor coefficients f^(k)(a0)/k! from the list of derivative values."""
        out = np.empty(self.batch_shape + (self.order + 1,), dtype=np.asarray(derivs[0]).dtype)
        fact = 1.0
        for k, d in enumerate(derivs):
            if k:
                fact *= k
            out[..., k] = d / fact
        return out

    def exp(self):
        e = np.exp(self.value)
        return self._compose(self._series_from_derivs([e] * (self.order + 1)))

    def log(self):
        a0 = self.value
        _check_positive(a0, "log")
        ks = np.arange(1, self.order + 1)
        series = np.empty(self.batch_shape + (self.order + 1,), dtype=np.result_type(a0.dtype, float))
        series[..., 0] = np.log(a0)
        series[..., 1:] = (-1.0) ** (ks + 1) / (ks * a0[..., None] ** ks)
        return self._compose(series)

    def sqrt(self):
        a0 = self.value
        _check_positive(a0, "sqrt")
        return self.pow(0.5, _checked=True)

    def pow(self, alpha, _checked=False):
        a0 = self.value
        if not _checked and not float(alpha).is_integer():
            _check_positive(a0, "pow")
        return self._compose(_pow_series(a0, alpha, self.order))

    def sin(self):
        s, c = np.sin(self.value), np.cos(self.value)
        cycle = [s, c, -s, -c]
        return self._compose(self._series_from_derivs(
            [cycle[k % 4] for k in range(self.order + 1)]))

    def cos(self):
        s, c = np.sin(self.value), np.cos(self.value)
        cycle = [c, -s, -c, s]
        return self._compose(self._series_from_derivs(
            [cycle[k % 4] for k in range(self.order + 1)]))

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, value={self.value!r})"


def _pow_series(a0, alpha, order):
    a0 = np.asarray(a0, dtype=np.result_type(a0.dtype, float))
    coef = np.empty(a0.shape + (order + 1,), dtype=a0.dtype)
    coef[..., 0] = a0 ** alpha
    for k in range(1, order + 1):
        coef[..., k] = coef[..., k - 1] * (alpha - k + 1) / (k * a0)
    return coef


def _check_positive(a0, name):
    if not np.iscomplexobj(a0) and np.any(a0 <= 0):
        raise DomainError(f"{name} of a jet with non-positive value")


def _promote(dtype):
    return np.result_type(dtype, np.float64)


def _align(a: Jet, b: Jet):
    order = min(a.order, b.order)
    return a.truncate(order), b.truncate(order)


def seed_point(nvars, order, point):
    """Coordinate jets around ``point`` (shape (..., nvars))."""
    point = np.asarray(point, dtype=float)
    return [Jet.variable(nvars, order, i, point[..., i]) for i in range(nvars)]
