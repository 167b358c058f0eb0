"""Exact maximal t-bit advantage over (k, delta)-indistinguishable pairs.

For a fixed test sign vector c on the observed weight, the best feasible
pair is a linear program over the two weight vectors; the true advantage is
the maximum over all sign vectors, which is enumerated (the optimal test is
the sign of the marginal difference, so it is among the enumerated ones).

Enumeration is made affordable by an exact prune: the value of sign vector
c is at most half the range of its smoothed profile (max - min of T c), an
integer computed from the scaled kernel. Vectors whose ceiling cannot beat
the best value found so far are skipped; negating c swaps the pair, so only
vectors with c_0 = +1 are scanned. Both reductions preserve exactness.

The heuristic mode alternates between the best pair for a test and the best
test for a pair; its result is a certified lower bound (the witness is
feasible and its distance is computed exactly).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distributions import (
    BoundReport,
    SymmetricDistribution,
    best_cutoff,
    marginal_distance,
)
from .numerics import RATIONAL, ParameterError, as_fraction
from .simplex import OPTIMAL, SimplexSolver
from .smoothing import get_kernel

DEFAULT_T_MAX = 14


class SoundnessViolation(RuntimeError):
    """Oracle exceeded the proved bound: an implementation bug, never valid."""


@dataclass(frozen=True)
class OracleResult:
    advantage: Fraction
    witness_mu: SymmetricDistribution
    witness_nu: SymmetricDistribution
    witness_test: tuple
    mode: str  # 'exact' | 'heuristic'
    metadata: dict

    def to_json_dict(self) -> dict:
        return {
            "advantage": str(self.advantage),
            "advantage_float": float(self.advantage),
            "mode": self.mode,
            "witness_mu": self.witness_mu.to_json_dict(),
            "witness_nu": self.witness_nu.to_json_dict(),
            "test": list(self.witness_test),
            "seed": self.metadata.get("seed"),
            "restarts": self.metadata.get("restarts"),
            "metadata": dict(self.metadata),
        }


class _AdvantageInstance:
    """Shared LP data for one (n, k, t, delta): the feasible region is the
    same for every sign vector, only the objective changes."""

    def __init__(self, n: int, k: int, t: int, delta: Fraction):
        if not 0 <= k <= n:
            raise ParameterError(f"oracle needs 0 <= k <= n, got k={k}, n={n}")
        if not 0 <= t <= n:
            raise ParameterError(f"oracle needs 0 <= t <= n, got t={t}, n={n}")
        if not 0 <= delta <= 1:
            raise ParameterError(f"oracle needs 0 <= delta <= 1, got {delta}")
        self.n, self.k, self.t = n, k, t
        self.delta = delta
        kernel_t = get_kernel(n, t, RATIONAL)
        self.obj_scale = kernel_t.scale  # C(n, t)
        self.kt_scaled = kernel_t.scaled_matrix()  # (n+1) x (t+1) ints
        width = n + 1
        self.n_extra = 0 if delta == 0 else k + 1
        nvars = 2 * width + self.n_extra
        rows = []
        rows.append(([1] * width + [0] * (width + self.n_extra), "==", 1))
        rows.append(([0] * width + [1] * width + [0] * self.n_extra, "==", 1))
        if delta == 0:
            # equal k-bit marginals <=> equal binomial moments up to order k
            # (triangular change of basis); integer rows pivot faster than
            # kernel fractions, and the order-0 row is the two sums above
            for el in range(1, k + 1):
                coeffs = [math.comb(j, el) for j in range(width)]
                rows.append((coeffs + [-c for c in coeffs] + [0] * self.n_extra, "==", 0))
        else:
            kernel_k = get_kernel(n, k, RATIONAL)
            kk = kernel_k.scaled_matrix()  # (n+1) x (k+1) ints, scale C(n, k)
            for a in range(k + 1):
                col = [kk[j][a] for j in range(width)]
                e_row = [0] * self.n_extra
                e_row[a] = -kernel_k.scale
                rows.append((col + [-c for c in col] + e_row, "<=", 0))
                rows.append(([-c for c in col] + col + e_row, "<=", 0))
            rows.append(([0] * (2 * width) + [1] * self.n_extra, "<=", 2 * delta))
        self.solver = SimplexSolver([0] * nvars, rows)
        self._started = False
        self.lp_solves = 0

    def smoothed_profile(self, test) -> list[int]:
        """Integer profile C(n,t) * (T test)(j) for a +-1 test vector."""
        return [
            sum(c * v for c, v in zip(test, row) if v) for row in self.kt_scaled
        ]

    def solve_sign(self, test) -> tuple[Fraction, list, list]:
        """Best feasible pair for one sign vector; value is the advantage."""
        profile = self.smoothed_profile(test)
        objective = profile + [-g for g in profile] + [0] * self.n_extra
        result = self.solver.resolve(objective)
        self.lp_solves += 1
        if result.status != OPTIMAL:
            raise ArithmeticError(f"advantage LP ended {result.status}; it is always feasible and bounded")
        width = self.n + 1
        w_mu = result.solution[:width]
        w_nu = result.solution[width: 2 * width]
        return result.value / (2 * self.obj_scale), w_mu, w_nu

    def marginal_diff_scaled(self, w_mu, w_nu) -> list[Fraction]:
        """C(n,t)-scaled observed-weight difference of a pair on t bits."""
        out = []
        for a in range(self.t + 1):
            out.append(
                sum((m - v) * self.kt_scaled[j][a] for j, (m, v) in enumerate(zip(w_mu, w_nu)))
            )
        return out

    def distance_of_pair(self, w_mu, w_nu) -> Fraction:
        diff = self.marginal_diff_scaled(w_mu, w_nu)
        return sum(abs(d) for d in diff) / (2 * self.obj_scale)


def _sign_rows(t: int) -> np.ndarray:
    """All sign vectors with leading +1, as a (2^t, t+1) array of +-1."""
    idx = np.arange(1 << t, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(t, dtype=np.int64)[None, :]) & 1
    return np.hstack([np.ones((1 << t, 1), dtype=np.int64), 1 - 2 * bits])


def _range_ceilings(inst: _AdvantageInstance, signs: np.ndarray) -> np.ndarray:
    """Integer ceilings 2 C(n,t) * value(c) <= max(T c) - min(T c), exact.

    Computed in float matmul when every partial sum fits 2^53 (then the
    arithmetic is exact on integers), otherwise in Python ints.
    """
    kt = np.array(inst.kt_scaled, dtype=np.int64)
    if (inst.t + 2) * inst.obj_scale < 2 ** 53:
        profiles = signs.astype(np.float64) @ kt.T.astype(np.float64)
        return (profiles.max(axis=1) - profiles.min(axis=1)).astype(np.int64)
    out = np.empty(signs.shape[0], dtype=object)
    for i, c in enumerate(signs):
        profile = inst.smoothed_profile([int(v) for v in c])
        out[i] = max(profile) - min(profile)
    return out


def max_advantage_exact(
    n: int, k: int, t: int, delta=0, *, t_max: int = DEFAULT_T_MAX
) -> OracleResult:
    """True maximal advantage, by pruned enumeration of all sign tests.

    One LP per surviving sign vector over the shared feasible region; the
    result is exact and the witness pair achieves it.
    """
    delta = as_fraction(delta)
    if t > t_max:
        raise ParameterError(
            f"exact mode enumerates 2^(t+1) tests; t={t} exceeds t_max={t_max} "
            "(raise t_max, or use max_advantage_heuristic)"
        )
    inst = _AdvantageInstance(n, k, t, delta)
    signs = _sign_rows(t)
    ceilings = _range_ceilings(inst, signs)
    # int64 ceilings are exactly ordered by the float sort (they fit 2^53);
    # with object ints the order is only approximate, so prune per vector
    exact_order = ceilings.dtype == np.int64
    order = np.argsort(-ceilings.astype(np.float64), kind="stable")
    denom = 2 * inst.obj_scale
    best_value = Fraction(-1)
    best = None
    solved = 0
    for idx in order:
        if Fraction(int(ceilings[idx]), denom) <= best_value:
            if exact_order:
                break  # descending ceilings: nothing later can beat the incumbent
            continue
        test = [int(v) for v in signs[idx]]
        value, w_mu, w_nu = inst.solve_sign(test)
        solved += 1
        if value > best_value:
            best_value = value
            best = (test, w_mu, w_nu)
    test, w_mu, w_nu = best
    metadata = {
        "sign_vectors": int(signs.shape[0]),
        "lp_solves": solved,
        "pruned": int(signs.shape[0]) - solved,
        "pivots": inst.solver.pivots,
        "delta": str(delta),
        "seed": None,
        "restarts": None,
    }
    return OracleResult(
        advantage=best_value,
        witness_mu=SymmetricDistribution(n, tuple(w_mu)),
        witness_nu=SymmetricDistribution(n, tuple(w_nu)),
        witness_test=tuple(test),
        mode="exact",
        metadata=metadata,
    )


def max_advantage_heuristic(
    n: int, k: int, t: int, delta=0, restarts: int = 32, seed: int = 0, max_rounds: int = 64
) -> OracleResult:
    """Alternating maximization: best pair for a test, then the sign of the
    resulting marginal difference as the next test, until stable. Best over
    seeded random initial tests. Certified lower bound on the optimum."""
    delta = as_fraction(delta)
    if restarts < 1:
        raise ParameterError(f"need at least one restart, got {restarts}")
    inst = _AdvantageInstance(n, k, t, delta)
    rng = random.Random(seed)
    best_value = Fraction(-1)
    best = None
    stable_runs = 0
    for _ in range(restarts):
        test = [rng.choice((-1, 1)) for _ in range(t + 1)]
        for _ in range(max_rounds):
            value, w_mu, w_nu = inst.solve_sign(test)
            diff = inst.marginal_diff_scaled(w_mu, w_nu)
            achieved = sum(abs(d) for d in diff) / (2 * inst.obj_scale)
            if achieved > best_value:
                best_value = achieved
                best = (list(test), w_mu, w_nu)
            new_test = [1 if d >= 0 else -1 for d in diff]
            if new_test == test:
                stable_runs += 1
                break
            test = new_test
    test, w_mu, w_nu = best
    metadata = {
        "restarts": restarts,
        "seed": seed,
        "lp_solves": inst.lp_solves,
        "stable_restarts": stable_runs,
        "pivots": inst.solver.pivots,
        "delta": str(delta),
    }
    return OracleResult(
        advantage=best_value,
        witness_mu=SymmetricDistribution(n, tuple(w_mu)),
        witness_nu=SymmetricDistribution(n, tuple(w_nu)),
        witness_test=tuple(test),
        mode="heuristic",
        metadata=metadata,
    )


@dataclass(frozen=True)
class SandwichReport:
    """Oracle value (exact or lower bound) against the closed-form bound."""

    n: int
    k: int
    t: int
    delta: Fraction
    oracle: OracleResult
    s_star: int
    bound: BoundReport
    gap_ratio: float | None

    def summary_line(self) -> str:
        tag = "advantage" if self.oracle.mode == "exact" else "advantage>="
        gap = f"{self.gap_ratio:.6g}" if self.gap_ratio is not None else "inf"
        return (
            f"sandwich n={self.n} k={self.k} t={self.t} delta={self.delta}: "
            f"{tag} {float(self.oracle.advantage):.6g} <= bound {self.bound.raw:.6g} "
            f"(s*={self.s_star}, gap ratio {gap})"
        )

    def to_json_dict(self) -> dict:
        payload = self.oracle.to_json_dict()
        payload["params"] = {
            "n": self.n,
            "k": self.k,
            "t": self.t,
            "delta": str(self.delta),
        }
        payload["theorem_bound"] = self.bound.raw
        payload["theorem_bound_log10"] = self.bound.log10_raw
        payload["s_star"] = self.s_star
        payload["gap_ratio"] = self.gap_ratio
        return payload


def sandwich_report(
    n: int,
    k: int,
    t: int,
    delta=0,
    mode: str = "auto",
    *,
    t_max: int = DEFAULT_T_MAX,
    restarts: int = 32,
    seed: int = 0,
) -> SandwichReport:
    """Run the oracle and compare against the bound at the best cutoff.

    A violation of oracle <= bound is impossible for a correct
    implementation and raises SoundnessViolation rather than passing
    silently."""
    delta = as_fraction(delta)
    s_star, bound = best_cutoff(n, t, k, delta)  # validates 0 <= k < t < n
    if mode not in ("auto", "exact", "heuristic"):
        raise ParameterError(f"unknown oracle mode {mode!r}")
    if mode == "exact" or (mode == "auto" and t <= t_max):
        oracle = max_advantage_exact(n, k, t, delta, t_max=t_max)
    else:
        oracle = max_advantage_heuristic(n, k, t, delta, restarts=restarts, seed=seed)
    adv = float(oracle.advantage)
    if adv > bound.raw + 1e-12:
        raise SoundnessViolation(
            f"oracle advantage {oracle.advantage} exceeds proved bound {bound.raw} "
            f"at n={n}, k={k}, t={t}, delta={delta}, s={s_star}: implementation bug"
        )
    gap = bound.raw / adv if adv > 0 else None
    return SandwichReport(n, k, t, delta, oracle, s_star, bound, gap)


def verify_witness(result: OracleResult, k: int, delta, t: int) -> None:
    """Re-derive the witness facts through the public distance paths."""
    from .distributions import is_indistinguishable

    delta = as_fraction(delta)
    ok, achieved = is_indistinguishable(result.witness_mu, result.witness_nu, k, delta)
    if not ok:
        raise SoundnessViolation(
            f"witness pair is not ({k},{delta})-indistinguishable: distance {achieved}"
        )
    dist = marginal_distance(result.witness_mu, result.witness_nu, t)
    if result.mode == "exact":
        if dist != result.advantage:
            raise SoundnessViolation(
                f"witness distance {dist} does not reproduce LP optimum {result.advantage}"
            )
    elif not dist >= result.advantage - Fraction(1, 10 ** 9):
        raise SoundnessViolation(
            f"heuristic witness distance {dist} below reported {result.advantage}"
        )
