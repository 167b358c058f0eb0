"""Hahn polynomials on {0,...,n} under the uniform weight.

Everything downstream is built on the degree-r polynomial family Q_r, its
mean-square norms H, the orthonormal family phi_r = Q_r / sqrt(H), the
eigenvalue ratios lambda = sqrt(H_n / H_t) of the subsampling operator, and
the damping exponent that lower-bounds how fast those eigenvalues decay.

Exact values are Fractions; float-mode tables are built with a difference
equation in the grid variable (stable, unlike the recurrence in the degree,
which amplifies roundoff catastrophically past n ~ 80) plus the reflection
symmetry Q_r(n - x) = (-1)^r Q_r(x).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .numerics import FLOAT, RATIONAL, ParameterError, check_mode


def falling_factorial(x, r: int):
    """x(x-1)...(x-r+1); 1 when r = 0. Total on integers and Fractions."""
    if r < 0:
        raise ParameterError(f"falling factorial needs r >= 0, got r={r}")
    out = 1
    for i in range(r):
        out *= x - i
    return out


def rising_factorial(x, r: int):
    """Pochhammer variant x(x+1)...(x+r-1); 1 when r = 0."""
    if r < 0:
        raise ParameterError(f"rising factorial needs r >= 0, got r={r}")
    out = 1
    for i in range(r):
        out *= x + i
    return out


def _check_degree_point(n: int, r: int, x: int) -> None:
    if not 0 <= r <= n:
        raise ParameterError(f"degree r must satisfy 0 <= r <= n, got r={r}, n={n}")
    if not 0 <= x <= n:
        raise ParameterError(f"grid point x must satisfy 0 <= x <= n, got x={x}, n={n}")


def hahn_q(n: int, r: int, x: int) -> Fraction:
    """Exact Q_r(x) on {0..n}: the alternating binomial sum over degrees.

    All terms share the denominator n(n-1)...(n-r+1), so the sum is done in
    integers and a single Fraction is constructed at the end.
    """
    _check_degree_point(n, r, x)
    denom = falling_factorial(n, r)
    num = 0
    ff_x = 1
    for el in range(r + 1):
        if el:
            ff_x *= x - el + 1
        num += (-1) ** el * math.comb(r, el) * math.comb(r + el, el) * ff_x * falling_factorial(n - el, r - el)
    return Fraction(num, denom)


def hahn_norm(n: int, r: int) -> Fraction:
    """Mean-square norm H of Q_r under the uniform inner product on {0..n}."""
    if not 0 <= r <= n:
        raise ParameterError(f"norm needs 0 <= r <= n, got r={r}, n={n}")
    out = Fraction(1, 2 * r + 1)
    for j in range(r):
        out *= Fraction(n + j + 2, n - j)
    return out


def hahn_norm_sum(n: int, r: int) -> Fraction:
    """Sum-square norm h = (n+1) H: the value of sum_x Q_r(x)^2."""
    return (n + 1) * hahn_norm(n, r)


def log_hahn_norm(n: int, r: int) -> float:
    """log H, safe for n in the hundreds of thousands."""
    if not 0 <= r <= n:
        raise ParameterError(f"norm needs 0 <= r <= n, got r={r}, n={n}")
    out = -math.log(2 * r + 1)
    for j in range(r):
        out += math.log(n + j + 2) - math.log(n - j)
    return out


def smoothing_eigenvalue_sq(n: int, t: int, r: int) -> Fraction:
    """Exact lambda^2 = H_{n,r} / H_{t,r}."""
    if not 0 <= r <= t <= n:
        raise ParameterError(f"eigenvalue needs 0 <= r <= t <= n, got r={r}, t={t}, n={n}")
    return hahn_norm(n, r) / hahn_norm(t, r)


def smoothing_eigenvalue(n: int, t: int, r: int) -> float:
    """lambda = sqrt(H_{n,r}/H_{t,r}), evaluated in log space."""
    if not 0 <= r <= t <= n:
        raise ParameterError(f"eigenvalue needs 0 <= r <= t <= n, got r={r}, t={t}, n={n}")
    return math.exp(0.5 * (log_hahn_norm(n, r) - log_hahn_norm(t, r)))


def damping_exponent(n: int, t: int, s: int) -> Fraction:
    """The decay rate (n-t)(s+1)(s+2) / (2n(t+s+2)) of degree-> s damping."""
    if not (0 <= s < t <= n):
        raise ParameterError(f"exponent needs 0 <= s < t <= n, got s={s}, t={t}, n={n}")
    return Fraction((n - t) * (s + 1) * (s + 2), 2 * n * (t + s + 2))


class HahnTable:
    """Precomputed Q, H and phi values for one n, in one arithmetic mode.

    Immutable after construction and safe to share across threads. Rational
    tables hold exact Fractions; float tables hold an orthonormal phi matrix
    built by the stable grid-direction recurrence, with norms kept as logs.
    """

    def __init__(self, n: int, mode: str = RATIONAL):
        if n < 0:
            raise ParameterError(f"table needs n >= 0, got {n}")
        check_mode(mode)
        self.n = n
        self.mode = mode
        if mode == RATIONAL:
            self._q = [[hahn_q(n, r, x) for x in range(n + 1)] for r in range(n + 1)]
            self._norms = [hahn_norm(n, r) for r in range(n + 1)]
            self._phi_float = None
        else:
            self._q = None
            self._norms = None
            self._log_norms = np.array([log_hahn_norm(n, r) for r in range(n + 1)])
            self._phi_float = self._build_phi_float(n, self._log_norms)

    @staticmethod
    def _build_phi_float(n: int, log_norms: np.ndarray) -> np.ndarray:
        # Difference equation in x at fixed degree r:
        #   A(x)[p(x+1)-p(x)] + C(x)[p(x-1)-p(x)] = r(r+1) p(x),
        #   A(x) = (x+1)(x-n), C(x) = x(x-n-1).
        # Forward from x=0 runs from the recessive tail into the oscillatory
        # region, which keeps roundoff from being amplified; the second half
        # of the grid comes from the reflection symmetry.
        phi = np.zeros((n + 1, n + 1))
        half = n // 2
        for r in range(n + 1):
            row = np.zeros(n + 1)
            row[0] = math.exp(-0.5 * log_norms[r])
            if n >= 1:
                row[1] = row[0] * (1 - r * (r + 1) / n)
            for x in range(1, half + (n % 2)):
                a = (x + 1) * (x - n)
                c = x * (x - n - 1)
                row[x + 1] = ((r * (r + 1) + a + c) * row[x] - c * row[x - 1]) / a
            sign = -1.0 if r % 2 else 1.0
            for x in range(half + 1, n + 1):
                row[x] = sign * row[n - x]
            phi[r] = row
        return phi

    def q(self, r: int, x: int):
        _check_degree_point(self.n, r, x)
        if self.mode == RATIONAL:
            return self._q[r][x]
        return self._phi_float[r, x] * math.exp(0.5 * self._log_norms[r])

    def q_row(self, r: int):
        if not 0 <= r <= self.n:
            raise ParameterError(f"degree r out of range: {r}")
        if self.mode == RATIONAL:
            return list(self._q[r])
        return self._phi_float[r] * math.exp(0.5 * self._log_norms[r])

    def norm(self, r: int):
        if not 0 <= r <= self.n:
            raise ParameterError(f"degree r out of range: {r}")
        if self.mode == RATIONAL:
            return self._norms[r]
        return math.exp(self._log_norms[r])

    def norm_sum(self, r: int):
        return (self.n + 1) * self.norm(r)

    def log_norm(self, r: int) -> float:
        if self.mode == RATIONAL:
            return math.log(float(self._norms[r].numerator)) - math.log(float(self._norms[r].denominator))
        return float(self._log_norms[r])

    def phi(self, r: int, x: int) -> float:
        _check_degree_point(self.n, r, x)
        if self.mode == RATIONAL:
            return float(self._q[r][x]) / math.sqrt(float(self._norms[r]))
        return float(self._phi_float[r, x])

    def phi_pair(self, r: int, x: int) -> tuple[Fraction, Fraction]:
        """Exact (Q value, H norm) pair; phi = Q / sqrt(H), so squared
        quantities built from the pair stay rational."""
        if self.mode != RATIONAL:
            raise ParameterError("phi_pair is only available on rational tables")
        _check_degree_point(self.n, r, x)
        return self._q[r][x], self._norms[r]

    def phi_row(self, r: int) -> np.ndarray:
        if self.mode == RATIONAL:
            h = math.sqrt(float(self._norms[r]))
            return np.array([float(v) for v in self._q[r]]) / h
        return self._phi_float[r].copy()

    def phi_matrix(self) -> np.ndarray:
        if self.mode == RATIONAL:
            return np.vstack([self.phi_row(r) for r in range(self.n + 1)])
        return self._phi_float.copy()

    def orthonormality_residual(self) -> float:
        """max_{r,s} |<phi_r, phi_s> - delta_{rs}| in floats."""
        phi = self.phi_matrix()
        gram = phi @ phi.T / (self.n + 1)
        return float(np.max(np.abs(gram - np.eye(self.n + 1))))


@lru_cache(maxsize=96)
def get_table(n: int, mode: str = RATIONAL) -> HahnTable:
    """Shared immutable table cache; safe because tables never mutate."""
    return HahnTable(n, mode)


class DampingSpectrum:
    """The eigenvalues lambda_{n,t,r} for r = 0..t of one (n, t) pair."""

    def __init__(self, n: int, t: int):
        if not 0 <= t < n:
            raise ParameterError(f"spectrum needs 0 <= t < n, got t={t}, n={n}")
        self.n = n
        self.t = t
        self.lambdas = np.array([smoothing_eigenvalue(n, t, r) for r in range(t + 1)])

    def eigenvalue_sq(self, r: int) -> Fraction:
        return smoothing_eigenvalue_sq(self.n, self.t, r)

    def validate(self) -> None:
        """Exact spectral sanity: lambda_0 = 1, strictly decreasing, in (0,1]."""
        if smoothing_eigenvalue_sq(self.n, self.t, 0) != 1:
            raise AssertionError(f"lambda(0) != 1 at n={self.n}, t={self.t}")
        prev = Fraction(1)
        for r in range(1, self.t + 1):
            cur = self.eigenvalue_sq(r)
            if not 0 < cur <= 1:
                raise AssertionError(f"lambda^2 out of (0,1] at n={self.n}, t={self.t}, r={r}")
            if not cur < prev:
                raise AssertionError(f"lambda not strictly decreasing at n={self.n}, t={self.t}, r={r}")
            prev = cur
