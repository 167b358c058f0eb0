"""Low-degree surrogates for smoothed tests.

Any test f on {0..t} smoothed up to n positions is well approximated by the
smoothing of a surrogate h on {0..s}, s < t: expand f in the orthonormal
basis, keep degrees <= s with eigenvalue-ratio corrections, and the
remainder is uniformly small because every surviving eigenvalue is damped
by at least exp(-E(n,t,s)). The surrogate's sup norm stays controlled by
sqrt(2(s+1)) 2^s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hahn import damping_exponent, get_table, log_hahn_norm
from .numerics import FLOAT, RATIONAL, ParameterError, check_mode
from .smoothing import get_kernel


def sup_norm(values):
    return max(abs(v) for v in values)


def mean_square_norm_sq(values):
    """(1/(m+1)) sum v^2 over the (m+1)-point grid the values live on."""
    return sum(v * v for v in values) / (len(values) if isinstance(values[0], float) else Fraction(len(values)))


class HahnExpansion:
    """Coefficients of a function on {0..t} in the orthonormal basis.

    Rational mode stores the exact pairings b_r = <f, Q_r>_t; the orthonormal
    coefficients a_r = b_r / sqrt(H_r) are exposed as floats while squared
    quantities (Parseval, reconstruction) stay exact.
    """

    def __init__(self, t: int, mode: str, q_coeffs=None, a_coeffs=None):
        self.t = t
        self.mode = mode
        self._q_coeffs = q_coeffs
        self._a = a_coeffs

    @property
    def coeffs(self) -> np.ndarray:
        if self.mode == FLOAT:
            return self._a.copy()
        table = get_table(self.t, RATIONAL)
        return np.array(
            [float(b) / math.sqrt(float(table.norm(r))) for r, b in enumerate(self._q_coeffs)]
        )

    def coeff_sq(self, r: int) -> Fraction:
        if self.mode != RATIONAL:
            raise ParameterError("exact coefficient squares need rational mode")
        table = get_table(self.t, RATIONAL)
        return self._q_coeffs[r] ** 2 / table.norm(r)

    def parseval_sq(self):
        """sum_r a_r^2, which equals the mean-square norm of f."""
        if self.mode == FLOAT:
            return float(np.dot(self._a, self._a))
        return sum(self.coeff_sq(r) for r in range(self.t + 1))

    def reconstruct(self):
        """Pointwise resummation; exact in rational mode."""
        if self.mode == FLOAT:
            phi = get_table(self.t, FLOAT).phi_matrix()
            return self._a @ phi
        table = get_table(self.t, RATIONAL)
        out = []
        for x in range(self.t + 1):
            out.append(sum(b * table.q(r, x) / table.norm(r) for r, b in enumerate(self._q_coeffs)))
        return out


def hahn_expand(f, mode: str = RATIONAL) -> HahnExpansion:
    """Expand a function given by its values on {0..t} (t from len(f)-1)."""
    check_mode(mode)
    values = list(f)
    if not values:
        raise ParameterError("cannot expand an empty value vector")
    t = len(values) - 1
    if mode == RATIONAL:
        table = get_table(t, RATIONAL)
        q_coeffs = [
            sum(v * table.q(r, x) for x, v in enumerate(values)) / Fraction(t + 1)
            for r in range(t + 1)
        ]
        return HahnExpansion(t, mode, q_coeffs=q_coeffs)
    phi = get_table(t, FLOAT).phi_matrix()
    a = phi @ np.asarray(values, dtype=float) / (t + 1)
    return HahnExpansion(t, mode, a_coeffs=a)


@dataclass(frozen=True)
class Surrogate:
    """A degree-cutoff replacement test on {0..s} with its remainder data."""

    n: int
    t: int
    s: int
    h_values: tuple
    remainder: tuple
    remainder_sup: object
    scale: object  # 1 unless the permissive rescaling path was used

    def sup_norm_bound(self) -> float:
        """The guaranteed ceiling sqrt(2(s+1)) 2^s, scaled if f was rescaled."""
        return math.sqrt(2 * (self.s + 1)) * 2.0 ** self.s * float(self.scale)

    def remainder_sup_bound(self) -> float:
        """The guaranteed ceiling sqrt(n+1) exp(-E), scaled like the input."""
        e = float(damping_exponent(self.n, self.t, self.s))
        return math.sqrt(self.n + 1) * math.exp(-e) * float(self.scale)


def _eigenvalue_ratio(t: int, s: int, r: int) -> float:
    # lambda_{n,t,r} / lambda_{n,s,r} = sqrt(H_{s,r} / H_{t,r}); n cancels.
    return math.exp(0.5 * (log_hahn_norm(s, r) - log_hahn_norm(t, r)))


def build_surrogate(f, n: int, s: int, mode: str = RATIONAL, rescale: bool = False) -> Surrogate:
    """Build the cutoff surrogate of f (values on {0..t}) for smoothing to n.

    Requires sup|f| <= 1, the class for which the norm guarantees are stated;
    pass rescale=True to accept larger tests, in which case outputs and both
    guarantees scale linearly with sup|f|.
    """
    check_mode(mode)
    values = list(f)
    t = len(values) - 1
    if not 0 <= s < t < n:
        raise ParameterError(f"surrogate needs 0 <= s < t < n, got s={s}, t={t}, n={n}")
    supf = sup_norm(values)
    scale = 1 if mode == RATIONAL else 1.0
    if supf > 1:
        if not rescale:
            raise ParameterError(
                f"test must satisfy sup|f| <= 1 (got {float(supf):.6g}); "
                "pass rescale=True to rescale it and the guarantees"
            )
        scale = supf
        values = [v / supf for v in values]

    if mode == RATIONAL:
        table_t = get_table(t, RATIONAL)
        table_s = get_table(s, RATIONAL)
        q_coeffs = [
            sum(v * table_t.q(r, x) for x, v in enumerate(values)) / Fraction(t + 1)
            for r in range(s + 1)
        ]
        h_values = [
            sum(b / table_t.norm(r) * table_s.q(r, x) for r, b in enumerate(q_coeffs))
            for x in range(s + 1)
        ]
        smoothed_f = get_kernel(n, t, RATIONAL).apply(values)
        smoothed_h = get_kernel(n, s, RATIONAL).apply(h_values)
        remainder = [a - b for a, b in zip(smoothed_f, smoothed_h)]
        if scale != 1:
            h_values = [scale * v for v in h_values]
            remainder = [scale * v for v in remainder]
        return Surrogate(
            n, t, s, tuple(h_values), tuple(remainder), max(abs(v) for v in remainder), scale
        )

    arr = np.asarray(values, dtype=float)
    phi_t = get_table(t, FLOAT).phi_matrix()
    phi_s = get_table(s, FLOAT).phi_matrix()
    a = phi_t[: s + 1] @ arr / (t + 1)
    ratios = np.array([_eigenvalue_ratio(t, s, r) for r in range(s + 1)])
    h_values = (a * ratios) @ phi_s[: s + 1]
    smoothed_f = get_kernel(n, t, FLOAT).apply(arr)
    smoothed_h = get_kernel(n, s, FLOAT).apply(h_values)
    remainder = (smoothed_f - smoothed_h) * scale
    h_values = h_values * scale
    return Surrogate(
        n, t, s, tuple(h_values), tuple(remainder), float(np.max(np.abs(remainder))), scale
    )


def remainder_profile(f, n: int, s: int, mode: str = RATIONAL):
    """Pointwise smoothed-minus-surrogate values on {0..n}; its sup is the
    surrogate's remainder_sup and its mean-square norm is at most exp(-E)."""
    surrogate = build_surrogate(f, n, s, mode=mode)
    return list(surrogate.remainder)


def remainder_norm_sq(f, n: int, s: int) -> Fraction:
    """Exact mean-square norm of the remainder over {0..n} (rational mode),
    which equals the tail sum of a_r^2 lambda^2 by Parseval."""
    profile = remainder_profile(f, n, s, mode=RATIONAL)
    return sum(v * v for v in profile) / Fraction(n + 1)
