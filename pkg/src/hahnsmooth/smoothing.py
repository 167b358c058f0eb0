"""The hypergeometric subsampling operator and its adjoint.

A test on t observed bits, applied to a random t-subset of n positions with
k ones, sees a hypergeometric observed weight. Averaging the test over that
draw maps functions on {0..t} to functions on {0..n}; the adjoint maps a
global Hamming-weight distribution to the observed-weight distribution of a
t-bit marginal. Both directions share the kernel

    entry(k, a) = C(k, a) C(n-k, t-a) / C(n, t).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .hahn import falling_factorial, get_table, smoothing_eigenvalue
from .numerics import FLOAT, RATIONAL, ParameterError, check_mode, log_binomial


class SmoothingMatrix:
    """The (n+1) x (t+1) hypergeometric kernel for one (n, t) pair.

    Rational mode keeps exact Fractions plus the integer-scaled kernel
    C(k,a)C(n-k,t-a) (scale C(n,t)) used by hot paths. Float mode entries
    come from exponentiated log-binomials with each row renormalized to sum
    exactly to the float 1 within 1e-12. Immutable after construction.
    """

    def __init__(self, n: int, t: int, mode: str = RATIONAL):
        if not 0 <= t <= n:
            raise ParameterError(f"kernel needs 0 <= t <= n, got t={t}, n={n}")
        check_mode(mode)
        self.n = n
        self.t = t
        self.mode = mode
        self.scale = math.comb(n, t)
        if mode == RATIONAL:
            self._scaled = [
                [math.comb(k, a) * math.comb(n - k, t - a) for a in range(t + 1)]
                for k in range(n + 1)
            ]
            self._rows = [
                [Fraction(v, self.scale) for v in row] for row in self._scaled
            ]
            self._float_rows = None
        else:
            self._scaled = None
            self._rows = None
            log_scale = log_binomial(n, t)
            rows = np.zeros((n + 1, t + 1))
            for k in range(n + 1):
                for a in range(t + 1):
                    if a <= k and t - a <= n - k:
                        rows[k, a] = math.exp(
                            log_binomial(k, a) + log_binomial(n - k, t - a) - log_scale
                        )
                rows[k] /= rows[k].sum()
            self._float_rows = rows

    def entry(self, k: int, a: int):
        if not 0 <= k <= self.n:
            raise ParameterError(f"weight k out of range: {k}")
        if not 0 <= a <= self.t:
            raise ParameterError(f"observed weight a out of range: {a}")
        if self.mode == RATIONAL:
            return self._rows[k][a]
        return float(self._float_rows[k, a])

    def row(self, k: int):
        if not 0 <= k <= self.n:
            raise ParameterError(f"weight k out of range: {k}")
        if self.mode == RATIONAL:
            return list(self._rows[k])
        return self._float_rows[k].copy()

    def scaled_row(self, k: int) -> list[int]:
        if self.mode != RATIONAL:
            raise ParameterError("scaled rows are only kept on rational kernels")
        return list(self._scaled[k])

    def scaled_matrix(self) -> list[list[int]]:
        if self.mode != RATIONAL:
            raise ParameterError("scaled rows are only kept on rational kernels")
        return [list(row) for row in self._scaled]

    def float_matrix(self) -> np.ndarray:
        if self.mode == RATIONAL:
            return np.array([[float(v) for v in row] for row in self._rows])
        return self._float_rows.copy()

    def apply(self, f):
        """Average f over the observed weight: returns values on {0..n}."""
        values = list(f)
        if len(values) != self.t + 1:
            raise ParameterError(
                f"test must be defined on all of 0..{self.t}, got {len(values)} values"
            )
        if self.mode == RATIONAL:
            return [
                sum(v * e for v, e in zip(values, row) if e) for row in self._rows
            ]
        return self._float_rows @ np.asarray(values, dtype=float)

    def project(self, w):
        """Adjoint action on a weight vector: the observed-weight law of a
        t-bit marginal. Input must already be a probability vector."""
        weights = list(w)
        if len(weights) != self.n + 1:
            raise ParameterError(
                f"weight vector must cover 0..{self.n}, got {len(weights)} values"
            )
        if self.mode == RATIONAL:
            total = sum(weights)
            if total != 1 or any(v < 0 for v in weights):
                raise ParameterError("projection input must be an exact probability vector")
            out = [Fraction(0)] * (self.t + 1)
            for wk, row in zip(weights, self._rows):
                if wk:
                    for a, e in enumerate(row):
                        if e:
                            out[a] += wk * e
            return out
        arr = np.asarray(weights, dtype=float)
        if abs(float(arr.sum()) - 1.0) > 1e-9 or float(arr.min()) < -1e-12:
            raise ParameterError("projection input must be a probability vector (tol 1e-9)")
        return arr @ self._float_rows


@lru_cache(maxsize=256)
def get_kernel(n: int, t: int, mode: str = RATIONAL) -> SmoothingMatrix:
    return SmoothingMatrix(n, t, mode)


def apply_smoothing(f, matrix: SmoothingMatrix):
    """Functional form of SmoothingMatrix.apply."""
    return matrix.apply(f)


def project_weights(w, matrix: SmoothingMatrix):
    """Functional form of SmoothingMatrix.project."""
    return matrix.project(w)


def factorial_moment(n: int, t: int, k: int, el: int) -> Fraction:
    """E[A^(falling el)] for the hypergeometric observed weight A:
    t^(el) k^(el) / n^(el), all falling factorials."""
    if not 0 <= el <= t <= n:
        raise ParameterError(f"moment needs 0 <= el <= t <= n, got el={el}, t={t}, n={n}")
    if not 0 <= k <= n:
        raise ParameterError(f"moment needs 0 <= k <= n, got k={k}, n={n}")
    return Fraction(
        falling_factorial(t, el) * falling_factorial(k, el), falling_factorial(n, el)
    )


def intertwining_residual(n: int, t: int, r: int, mode: str = RATIONAL):
    """sup_k |(T phi_r^{(t)})(k) - lambda phi_r^{(n)}(k)|.

    In rational mode the identity reduces to T Q_r^{(t)} = Q_r^{(n)}, checked
    exactly; the result is an exact 0 unless something is broken.
    """
    if not 0 <= r <= t <= n:
        raise ParameterError(f"residual needs 0 <= r <= t <= n, got r={r}, t={t}, n={n}")
    check_mode(mode)
    kernel = get_kernel(n, t, mode)
    if mode == RATIONAL:
        table_t = get_table(t, RATIONAL)
        table_n = get_table(n, RATIONAL)
        smoothed = kernel.apply(table_t.q_row(r))
        residual = max(abs(v - table_n.q(r, k)) for k, v in enumerate(smoothed))
        if residual == 0:
            return Fraction(0)
        return float(residual) / math.sqrt(float(table_t.norm(r)))
    table_t = get_table(t, FLOAT)
    table_n = get_table(n, FLOAT)
    lam = smoothing_eigenvalue(n, t, r)
    smoothed = kernel.apply(table_t.phi_row(r))
    return float(np.max(np.abs(smoothed - lam * table_n.phi_row(r))))
