"""Symmetric distributions on n-bit strings and the advantage bound.

A permutation-invariant distribution is fully described by the total
probability it puts on each Hamming-weight class; all marginal statistics
flow through the hypergeometric kernel. The main theorem's bound on the
t-bit reconstruction advantage of a (k, delta)-indistinguishable pair is
evaluated here, together with an independent brute-force distance oracle
for small n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .hahn import damping_exponent
from .numerics import (
    FLOAT,
    RATIONAL,
    ParameterError,
    as_fraction,
    format_sig,
    format_sig_log10,
)
from .smoothing import get_kernel

Scalar = Union[Fraction, float]


@dataclass(frozen=True)
class SymmetricDistribution:
    """Weight-class probabilities w(0..n) of a symmetric distribution.

    w(j) is the TOTAL probability of the weight-j class; each individual
    string of weight j has probability w(j) / C(n, j).
    """

    n: int
    weights: tuple

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError(f"distribution needs n >= 0, got {self.n}")
        if len(self.weights) != self.n + 1:
            raise ParameterError(
                f"need {self.n + 1} weight-class probabilities, got {len(self.weights)}"
            )
        if self.is_exact:
            if any(w < 0 for w in self.weights):
                raise ParameterError("negative weight-class probability")
            if sum(self.weights) != 1:
                raise ParameterError("weight probabilities must sum to exactly 1")
        else:
            arr = np.asarray([float(w) for w in self.weights])
            if float(arr.min()) < -1e-12:
                raise ParameterError("negative weight-class probability")
            if abs(float(arr.sum()) - 1.0) > 1e-9:
                raise ParameterError("weight probabilities must sum to 1 (tol 1e-9)")

    @property
    def is_exact(self) -> bool:
        return all(isinstance(w, (Fraction, int)) for w in self.weights)

    def __len__(self) -> int:
        return self.n + 1

    def __iter__(self):
        return iter(self.weights)

    def __getitem__(self, j):
        return self.weights[j]

    @classmethod
    def from_weights(cls, weights) -> "SymmetricDistribution":
        ws = tuple(weights)
        return cls(len(ws) - 1, ws)

    @classmethod
    def point_mass(cls, n: int, j: int) -> "SymmetricDistribution":
        if not 0 <= j <= n:
            raise ParameterError(f"point mass needs 0 <= j <= n, got j={j}, n={n}")
        return cls(n, tuple(Fraction(1) if i == j else Fraction(0) for i in range(n + 1)))

    @classmethod
    def uniform(cls, n: int) -> "SymmetricDistribution":
        """Uniform over all 2^n strings: binomial weight classes."""
        return cls(n, tuple(Fraction(math.comb(n, j), 2 ** n) for j in range(n + 1)))

    def marginal(self, t: int) -> "SymmetricDistribution":
        """The symmetric distribution seen on any t of the n positions."""
        mode = RATIONAL if self.is_exact else FLOAT
        kernel = get_kernel(self.n, t, mode)
        return SymmetricDistribution(t, tuple(kernel.project(self.weights)))

    def to_json_dict(self) -> dict:
        if self.is_exact:
            return {"n": self.n, "weights": [str(Fraction(w)) for w in self.weights]}
        return {"n": self.n, "weights": [float(w) for w in self.weights]}

    @classmethod
    def from_json_dict(cls, payload: dict) -> "SymmetricDistribution":
        raw = payload["weights"]
        if raw and all(isinstance(v, str) for v in raw):
            weights = tuple(Fraction(v) for v in raw)
        else:
            weights = tuple(float(v) for v in raw)
        return cls(int(payload["n"]), weights)


def _pair_mode(mu: SymmetricDistribution, nu: SymmetricDistribution) -> str:
    return RATIONAL if (mu.is_exact and nu.is_exact) else FLOAT


def marginal_distance(mu: SymmetricDistribution, nu: SymmetricDistribution, t: int) -> Scalar:
    """Statistical distance of the t-bit marginals.

    Equals half the l1 distance of the observed-weight laws; that attains
    the supremum over all [-1,1]-valued tests because the optimiser is the
    sign of the difference.
    """
    if mu.n != nu.n:
        raise ParameterError(f"distributions live on different n: {mu.n} vs {nu.n}")
    if not 0 <= t <= mu.n:
        raise ParameterError(f"marginal size must satisfy 0 <= t <= n, got t={t}, n={mu.n}")
    mode = _pair_mode(mu, nu)
    kernel = get_kernel(mu.n, t, mode)
    p = kernel.project(mu.weights)
    q = kernel.project(nu.weights)
    if mode == RATIONAL:
        return sum(abs(a - b) for a, b in zip(p, q)) / 2
    return float(np.sum(np.abs(p - q)) / 2)


def is_indistinguishable(
    mu: SymmetricDistribution, nu: SymmetricDistribution, k: int, delta
) -> tuple[bool, Scalar]:
    """Whether every k-bit marginal pair is within statistical distance
    delta. Marginal distance is nondecreasing in the marginal size (a
    smaller marginal is a further projection), so only size k is checked;
    the achieved distance is returned as witness."""
    delta = as_fraction(delta)
    achieved = marginal_distance(mu, nu, k)
    if isinstance(achieved, Fraction):
        return achieved <= delta, achieved
    return achieved <= float(delta) + 1e-12, achieved


def brute_force_marginal_distance(
    mu: SymmetricDistribution, nu: SymmetricDistribution, t: int, max_n: int = 14
) -> Scalar:
    """Independent distance oracle: enumerate all 2^n strings, marginalise
    onto the explicit index set {1..t}, and take half the l1 distance over
    the 2^t outcomes. Exponential cost, so n is capped."""
    if mu.n != nu.n:
        raise ParameterError(f"distributions live on different n: {mu.n} vs {nu.n}")
    n = mu.n
    if n > max_n:
        raise ParameterError(f"brute force enumerates 2^n strings; n={n} exceeds cap {max_n}")
    if not 0 <= t <= n:
        raise ParameterError(f"marginal size must satisfy 0 <= t <= n, got t={t}, n={n}")
    exact = _pair_mode(mu, nu) == RATIONAL
    zero = Fraction(0) if exact else 0.0
    per_string_mu = [mu.weights[j] / math.comb(n, j) for j in range(n + 1)]
    per_string_nu = [nu.weights[j] / math.comb(n, j) for j in range(n + 1)]
    mask = (1 << t) - 1
    p = [zero] * (1 << t)
    q = [zero] * (1 << t)
    for z in range(1 << n):
        j = z.bit_count()
        u = z & mask
        p[u] += per_string_mu[j]
        q[u] += per_string_nu[j]
    total = sum(abs(a - b) for a, b in zip(p, q))
    return total / 2 if exact else float(total) / 2.0


def make_parity_pair(n: int) -> tuple[SymmetricDistribution, SymmetricDistribution]:
    """Uniform over even-weight strings vs uniform over odd-weight strings:
    the canonical pair that is perfectly (n-1)-wise indistinguishable yet
    fully distinguishable from all n bits."""
    if n < 1:
        raise ParameterError(f"parity pair needs n >= 1, got {n}")
    half = 2 ** (n - 1)
    even = tuple(
        Fraction(math.comb(n, j), half) if j % 2 == 0 else Fraction(0) for j in range(n + 1)
    )
    odd = tuple(
        Fraction(math.comb(n, j), half) if j % 2 == 1 else Fraction(0) for j in range(n + 1)
    )
    return SymmetricDistribution(n, even), SymmetricDistribution(n, odd)


@dataclass(frozen=True)
class BoundParams:
    """Parameters (n, t, k, s, delta) feeding the advantage bound."""

    n: int
    t: int
    k: int
    s: int
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if not 0 <= self.s:
            raise ParameterError(f"violated 0 <= s: s={self.s}")
        if not self.s <= self.k:
            raise ParameterError(f"violated s <= k: s={self.s}, k={self.k}")
        if not self.k < self.t:
            raise ParameterError(f"violated k < t: k={self.k}, t={self.t}")
        if not self.t < self.n:
            raise ParameterError(f"violated t < n: t={self.t}, n={self.n}")
        if not 0 <= self.delta <= 1:
            raise ParameterError(f"violated 0 <= delta <= 1: delta={self.delta}")


@dataclass(frozen=True)
class BoundReport:
    """Both additive terms of the advantage bound, raw and clipped values,
    and their base-10 logs (finite even when doubles underflow)."""

    params: BoundParams
    term1: float
    term2: float
    raw: float
    clipped: float
    log10_term1: float
    log10_term2: float
    log10_raw: float

    def csv_row(self) -> str:
        p = self.params
        cols = [
            str(p.n),
            str(p.t),
            str(p.k),
            str(p.s),
            format_sig(float(p.delta)),
            format_sig_log10(self.log10_term1),
            format_sig_log10(self.log10_term2),
            format_sig_log10(self.log10_raw),
            format_sig(self.clipped),
        ]
        return ",".join(cols)


_LN10 = math.log(10.0)


def advantage_bound(params: BoundParams) -> BoundReport:
    """sqrt(n+1) exp(-E(n,t,s)) + delta sqrt(2(s+1)) 2^s, with the clipped
    value min(bound, 1) since an advantage never exceeds 1. Evaluated in log
    space so sweeps stay meaningful far below the double underflow line."""
    n, t, s = params.n, params.t, params.s
    log_term1 = 0.5 * math.log(n + 1) - float(damping_exponent(n, t, s))
    if params.delta > 0:
        d = params.delta
        log_delta = math.log(d.numerator) - math.log(d.denominator)
        log_term2 = log_delta + 0.5 * math.log(2 * (s + 1)) + s * math.log(2.0)
    else:
        log_term2 = float("-inf")
    log_raw = np.logaddexp(log_term1, log_term2)
    term1 = math.exp(log_term1) if log_term1 < 709 else float("inf")
    term2 = math.exp(log_term2) if log_term2 < 709 else float("inf")
    raw = math.exp(log_raw) if log_raw < 709 else float("inf")
    return BoundReport(
        params=params,
        term1=term1,
        term2=term2,
        raw=raw,
        clipped=min(raw, 1.0),
        log10_term1=log_term1 / _LN10,
        log10_term2=log_term2 / _LN10,
        log10_raw=float(log_raw) / _LN10,
    )


def best_cutoff(n: int, t: int, k: int, delta) -> tuple[int, BoundReport]:
    """Scan s in {0..k} for the minimal bound; ties break toward smaller s."""
    if not 0 <= k < t < n:
        raise ParameterError(f"scan needs 0 <= k < t < n, got k={k}, t={t}, n={n}")
    delta = as_fraction(delta)
    best = None
    for s in range(k + 1):
        report = advantage_bound(BoundParams(n, t, k, s, delta))
        if best is None or report.log10_raw < best[1].log10_raw:
            best = (s, report)
    return best
