"""Invariant suites over parameterized grids.

Each check returns a CheckResult; the same functions back the CLI
``selftest`` command (quick/full levels) and the acceptance test module,
which runs them at their largest grids. Exact checks tolerate nothing;
float checks carry the documented tolerances.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .approximation import build_surrogate, hahn_expand, remainder_norm_sq
from .distributions import (
    BoundParams,
    SymmetricDistribution,
    advantage_bound,
    brute_force_marginal_distance,
    is_indistinguishable,
    make_parity_pair,
    marginal_distance,
)
from .hahn import (
    HahnTable,
    damping_exponent,
    falling_factorial,
    get_table,
    hahn_norm,
    hahn_norm_sum,
    log_hahn_norm,
    smoothing_eigenvalue_sq,
)
from .numerics import FLOAT, RATIONAL, le_exp
from .oracle import SoundnessViolation, max_advantage_exact, sandwich_report, verify_witness
from .smoothing import factorial_moment, get_kernel, intertwining_residual


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        msg = f"[{status}] {self.name} ({self.seconds:.2f}s) {self.detail}"
        if not self.passed and self.failures:
            shown = ", ".join(repr(f) for f in self.failures[:5])
            msg += f" | first failures: {shown}"
        return msg


def _finish(name: str, detail: str, failures: list, t0: float) -> CheckResult:
    return CheckResult(name, not failures, detail, time.perf_counter() - t0, failures)


def _scaled_q_matrix(table: HahnTable) -> list[list[int]]:
    """Integer matrix n_falling_r * Q_r(x); exactness asserted."""
    n = table.n
    out = []
    for r in range(n + 1):
        scale = falling_factorial(n, r)
        row = []
        for x in range(n + 1):
            v = table.q(r, x) * scale
            assert v.denominator == 1
            row.append(v.numerator)
        out.append(row)
    return out


# -- hahn-core checks --------------------------------------------------------


def check_orthogonality_rational(n_max: int) -> CheckResult:
    """sum_x Q_r Q_s = h delta_{rs}, exactly, for all n <= n_max."""
    t0 = time.perf_counter()
    failures = []
    for n in range(n_max + 1):
        table = get_table(n, RATIONAL)
        qs = _scaled_q_matrix(table)
        scales = [falling_factorial(n, r) for r in range(n + 1)]
        for r in range(n + 1):
            qr = qs[r]
            for s in range(r, n + 1):
                total = sum(a * b for a, b in zip(qr, qs[s]))
                expected = scales[r] * scales[s] * hahn_norm_sum(n, r) if r == s else 0
                if total != expected:
                    failures.append((n, r, s))
    return _finish(
        "orthogonality-rational", f"all n <= {n_max}, exact Kronecker", failures, t0
    )


def check_orthogonality_float(n_values, tol: float = 1e-9) -> CheckResult:
    """Orthonormality residual of float tables within tol."""
    t0 = time.perf_counter()
    failures = []
    worst = 0.0
    for n in n_values:
        residual = get_table(n, FLOAT).orthonormality_residual()
        worst = max(worst, residual)
        if residual > tol:
            failures.append((n, residual))
    return _finish(
        "orthogonality-float", f"n in {list(n_values)}, worst residual {worst:.3e}", failures, t0
    )


def check_norm_closed_form(n_max: int) -> CheckResult:
    """Product formula vs factorial formula for the norms, exactly."""
    t0 = time.perf_counter()
    failures = []
    for n in range(n_max + 1):
        for r in range(n + 1):
            h = hahn_norm_sum(n, r)
            factorial_form = Fraction(
                math.factorial(n + r + 1) * math.factorial(n - r),
                (2 * r + 1) * math.factorial(n) ** 2,
            )
            if h != factorial_form or h != (n + 1) * hahn_norm(n, r):
                failures.append((n, r))
    return _finish("norm-closed-form", f"all n <= {n_max}", failures, t0)


def check_float_table_matches_exact(n_values, tol: float = 1e-11) -> CheckResult:
    """Float-mode tables against the exact sum on the overlap region."""
    t0 = time.perf_counter()
    failures = []
    worst = 0.0
    for n in n_values:
        exact = get_table(n, RATIONAL)
        approx = get_table(n, FLOAT)
        for r in range(n + 1):
            ref = exact.phi_row(r)
            err = float(np.max(np.abs(ref - approx.phi_row(r)) / np.maximum(1.0, np.abs(ref))))
            worst = max(worst, err)
            if err > tol:
                failures.append((n, r, err))
    return _finish(
        "float-table-vs-exact", f"n in {list(n_values)}, worst rel err {worst:.3e}", failures, t0
    )


def check_lambda_monotone(n_max: int) -> CheckResult:
    """lambda strictly decreasing in the degree, exactly (squared form)."""
    t0 = time.perf_counter()
    failures = []
    for n in range(1, n_max + 1):
        for t in range(n):
            if smoothing_eigenvalue_sq(n, t, 0) != 1:
                failures.append((n, t, 0))
            prev = Fraction(1)
            for r in range(1, t + 1):
                cur = smoothing_eigenvalue_sq(n, t, r)
                if not (0 < cur < prev and cur <= 1):
                    failures.append((n, t, r))
                prev = cur
    return _finish("lambda-monotone", f"all t < n <= {n_max}, exact", failures, t0)


def check_norm_ratio_bound(n_max: int) -> CheckResult:
    """max_r H_{s,r}/H_{t,r} sits at r=s and is at most 2^(2s+1), exactly."""
    t0 = time.perf_counter()
    failures = []
    for t in range(n_max + 1):
        for s in range(t + 1):
            ratios = [hahn_norm(s, r) / hahn_norm(t, r) for r in range(s + 1)]
            top = max(ratios)
            if top != ratios[s] or top > Fraction(2) ** (2 * s + 1):
                failures.append((s, t))
    return _finish("norm-ratio-bound", f"all 0 <= s <= t <= {n_max}, exact", failures, t0)


def check_damping_bound(n_max: int) -> CheckResult:
    """lambda^2 <= exp(-(n-t)r(r+1)/(n(t+r+1))), decided by exact enclosures."""
    t0 = time.perf_counter()
    failures = []
    for n in range(2, n_max + 1):
        for t in range(1, n):
            for r in range(1, t + 1):
                lam_sq = smoothing_eigenvalue_sq(n, t, r)
                rate = Fraction((n - t) * r * (r + 1), n * (t + r + 1))
                if not le_exp(lam_sq, -rate):
                    failures.append((n, t, r))
    return _finish("damping-bound", f"all 1 <= r <= t < n <= {n_max}, exact", failures, t0)


# -- smoothing checks --------------------------------------------------------


def check_kernel_stochastic(n_max: int) -> CheckResult:
    """Exact row sums 1, entries in [0,1] with the right zero pattern."""
    t0 = time.perf_counter()
    failures = []
    for n in range(n_max + 1):
        for t in range(n + 1):
            kernel = get_kernel(n, t, RATIONAL)
            for k in range(n + 1):
                row = kernel.row(k)
                if sum(row) != 1 or any(not 0 <= e <= 1 for e in row):
                    failures.append((n, t, k))
                    continue
                for a, e in enumerate(row):
                    if (a > k or t - a > n - k) and e != 0:
                        failures.append((n, t, k, a))
    return _finish("kernel-stochastic", f"all 0 <= t <= n <= {n_max}, exact", failures, t0)


def check_kernel_stochastic_float(n_values, tol: float = 1e-12) -> CheckResult:
    t0 = time.perf_counter()
    failures = []
    worst = 0.0
    for n in n_values:
        for t in {0, 1, n // 2, n - 1, n}:
            if t < 0:
                continue
            rows = get_kernel(n, t, FLOAT).float_matrix()
            err = float(np.max(np.abs(rows.sum(axis=1) - 1.0)))
            worst = max(worst, err)
            if err > tol or rows.min() < 0:
                failures.append((n, t, err))
    return _finish(
        "kernel-stochastic-float", f"n in {list(n_values)}, worst row error {worst:.2e}",
        failures, t0,
    )


def check_intertwining_exact(n_max: int) -> CheckResult:
    """T Q_r^{(t)} = Q_r^{(n)} exactly for all r <= t < n <= n_max (the
    orthonormal form follows by dividing by sqrt(H_{t,r}))."""
    t0 = time.perf_counter()
    failures = []
    scaled_cache = {}
    for n in range(1, n_max + 1):
        table_n = get_table(n, RATIONAL)
        qn = scaled_cache.setdefault(n, _scaled_q_matrix(table_n))
        for t in range(n):
            kernel = get_kernel(n, t, RATIONAL)
            kt = kernel.scaled_matrix()
            qt = scaled_cache.setdefault(t, _scaled_q_matrix(get_table(t, RATIONAL)))
            for r in range(t + 1):
                qt_r = qt[r]
                lhs_scale = falling_factorial(n, r)
                rhs_scale = kernel.scale * falling_factorial(t, r)
                for k in range(n + 1):
                    lhs = sum(a * b for a, b in zip(kt[k], qt_r)) * lhs_scale
                    rhs = rhs_scale * qn[r][k]
                    if lhs != rhs:
                        failures.append((n, t, r, k))
                        break
    return _finish("intertwining", f"all r <= t < n <= {n_max}, exact", failures, t0)


def check_intertwining_residual_api(grid) -> CheckResult:
    """Public residual op: exact zero rationally, tiny in float mode."""
    t0 = time.perf_counter()
    failures = []
    for n, t, r in grid:
        if intertwining_residual(n, t, r, RATIONAL) != 0:
            failures.append((n, t, r, "rational"))
        if intertwining_residual(n, t, r, FLOAT) > 1e-10:
            failures.append((n, t, r, "float"))
    return _finish("intertwining-residual-api", f"{len(list(grid))} spot points", failures, t0)


def check_factorial_moments(n_max: int) -> CheckResult:
    """Moment identity: sum_a a^(el) entry(k, a) = t^(el) k^(el) / n^(el)."""
    t0 = time.perf_counter()
    failures = []
    for n in range(n_max + 1):
        ff_k = [[falling_factorial(k, el) for el in range(n + 1)] for k in range(n + 1)]
        for t in range(n + 1):
            scaled = get_kernel(n, t, RATIONAL).scaled_matrix()
            scale = math.comb(n, t)
            for el in range(t + 1):
                ff_a = [ff_k[a][el] for a in range(t + 1)]
                for k in range(n + 1):
                    lhs = sum(f * e for f, e in zip(ff_a, scaled[k]) if f)
                    rhs = factorial_moment(n, t, k, el) * scale
                    if lhs != rhs:
                        failures.append((n, t, k, el))
    return _finish("factorial-moments", f"all (n,t,k,el), n <= {n_max}, exact", failures, t0)


def check_moment_enumeration(n_values) -> CheckResult:
    """Independent oracle: enumerate every t-subset, histogram the overlap
    with the first k elements, match every falling moment exactly."""
    t0 = time.perf_counter()
    failures = []
    for n in n_values:
        for t in range(n + 1):
            combos = list(itertools.combinations(range(n), t))
            if t == 0:
                prefix_hist = {k: {0: len(combos)} for k in range(n + 1)}
            else:
                arr = np.zeros((len(combos), n), dtype=bool)
                idx = np.array(combos, dtype=np.int64)
                arr[np.arange(len(combos))[:, None], idx] = True
                prefix = np.cumsum(arr, axis=1)
                prefix_hist = {}
                for k in range(n + 1):
                    col = prefix[:, k - 1] if k else np.zeros(len(combos), dtype=np.int64)
                    counts = np.bincount(col, minlength=t + 1)
                    prefix_hist[k] = {a: int(c) for a, c in enumerate(counts)}
            total = math.comb(n, t)
            for k in range(n + 1):
                hist = prefix_hist[k]
                for el in range(t + 1):
                    lhs = sum(c * falling_factorial(a, el) for a, c in hist.items())
                    if Fraction(lhs, total) != factorial_moment(n, t, k, el):
                        failures.append((n, t, k, el))
    return _finish(
        "moment-enumeration", f"subset enumeration for n in {list(n_values)}, exact",
        failures, t0,
    )


def check_composition_law(n_max: int, enum_max: int = 12) -> CheckResult:
    """Marginalising to t then to s equals marginalising straight to s,
    exactly; small n cross-checked against string enumeration."""
    t0 = time.perf_counter()
    failures = []
    rng = random.Random(20240917)
    for n in range(1, n_max + 1):
        nums = [rng.randint(0, 8) for _ in range(n + 1)]
        if sum(nums) == 0:
            nums[0] = 1
        total = sum(nums)
        dist = SymmetricDistribution(n, tuple(Fraction(v, total) for v in nums))
        steps = sorted({0, 1, n // 3, n // 2, n - 1, n})
        for t in steps:
            via_t = dist.marginal(t)
            for s in [v for v in steps if v <= t]:
                if via_t.marginal(s).weights != dist.marginal(s).weights:
                    failures.append((n, t, s))
        if n <= enum_max:
            per_string = [dist.weights[j] / math.comb(n, j) for j in range(n + 1)]
            for t in steps:
                acc = [Fraction(0)] * (t + 1)
                mask = (1 << t) - 1
                for z in range(1 << n):
                    acc[(z & mask).bit_count()] += per_string[z.bit_count()]
                if tuple(acc) != dist.marginal(t).weights:
                    failures.append((n, t, "enumeration"))
    return _finish("composition-law", f"random exact pairs, n <= {n_max}", failures, t0)


# -- approximation checks ----------------------------------------------------


def _random_tests(rng: np.random.Generator, count: int, width: int) -> np.ndarray:
    half = count // 2
    uniform = rng.uniform(-1.0, 1.0, size=(half, width))
    signs = rng.integers(0, 2, size=(count - half, width)) * 2 - 1
    return np.vstack([uniform, signs.astype(float)])


def check_surrogate_bounds(grid, tests_per_point: int, seed: int) -> CheckResult:
    """Both norm guarantees of the cutoff construction, on random tests.

    Float path (the guarantees carry orders-of-magnitude slack); the exact
    path is exercised separately in check_surrogate_exact."""
    t0 = time.perf_counter()
    failures = []
    rng = np.random.default_rng(seed)
    points = 0
    for n, t, s in grid:
        points += 1
        phi_t = get_table(t, FLOAT).phi_matrix()
        phi_s = get_table(s, FLOAT).phi_matrix()
        kt = get_kernel(n, t, FLOAT).float_matrix()
        ks = get_kernel(n, s, FLOAT).float_matrix()
        ratios = np.exp(
            [0.5 * (log_hahn_norm(s, r) - log_hahn_norm(t, r)) for r in range(s + 1)]
        )
        tests = _random_tests(rng, tests_per_point, t + 1)
        coeffs = tests @ phi_t[: s + 1].T / (t + 1)
        h_values = (coeffs * ratios) @ phi_s[: s + 1]
        sup_h = np.max(np.abs(h_values), axis=1)
        h_cap = math.sqrt(2 * (s + 1)) * 2.0 ** s
        remainder = tests @ kt.T - h_values @ ks.T
        sup_r = np.max(np.abs(remainder), axis=1)
        r_cap = math.sqrt(n + 1) * math.exp(-float(damping_exponent(n, t, s)))
        bad_h = np.nonzero(sup_h > h_cap)[0]
        bad_r = np.nonzero(sup_r > r_cap)[0]
        for i in bad_h:
            failures.append((n, t, s, int(i), "sup-norm"))
        for i in bad_r:
            failures.append((n, t, s, int(i), "remainder"))
    return _finish(
        "surrogate-bounds",
        f"{points} grid points x {tests_per_point} seeded tests, zero violations required",
        failures,
        t0,
    )


def check_surrogate_exact(grid, tests_per_point: int, seed: int) -> CheckResult:
    """Exact-path invariants: Parseval, reconstruction, the remainder's
    mean-square identity, and enclosure-decided norm bounds."""
    t0 = time.perf_counter()
    failures = []
    rng = random.Random(seed)
    for n, t, s in grid:
        for case in range(tests_per_point):
            f = [Fraction(rng.randint(-64, 64), 64) for _ in range(t + 1)]
            expansion = hahn_expand(f, RATIONAL)
            if expansion.reconstruct() != f:
                failures.append((n, t, s, case, "reconstruction"))
            parseval = expansion.parseval_sq()
            direct = sum(v * v for v in f) / Fraction(t + 1)
            if parseval != direct or parseval > 1:
                failures.append((n, t, s, case, "parseval"))
            surrogate = build_surrogate(f, n, s, RATIONAL)
            sup_h_sq = max(v * v for v in surrogate.h_values)
            if sup_h_sq > 2 * (s + 1) * Fraction(4) ** s:
                failures.append((n, t, s, case, "sup-norm"))
            norm_sq = sum(v * v for v in surrogate.remainder) / Fraction(n + 1)
            tail = sum(
                expansion.coeff_sq(r) * smoothing_eigenvalue_sq(n, t, r)
                for r in range(s + 1, t + 1)
            )
            if norm_sq != tail:
                failures.append((n, t, s, case, "parseval-tail"))
            e = damping_exponent(n, t, s)
            if not le_exp(norm_sq, -2 * e):
                failures.append((n, t, s, case, "norm-bound"))
            sup_sq = surrogate.remainder_sup ** 2
            if not le_exp(Fraction(sup_sq, n + 1), -2 * e):
                failures.append((n, t, s, case, "sup-bound"))
    return _finish(
        "surrogate-exact", f"{len(list(grid))} grid points, exact identities", failures, t0
    )


# -- distributions checks ----------------------------------------------------


def check_distance_oracle(n_max: int, pairs_per_n: int, seed: int) -> CheckResult:
    """Kernel-path distance equals brute-force enumeration, exactly."""
    t0 = time.perf_counter()
    failures = []
    rng = random.Random(seed)

    def random_dist(n):
        nums = [rng.randint(0, 9) for _ in range(n + 1)]
        if sum(nums) == 0:
            nums[rng.randrange(n + 1)] = 1
        total = sum(nums)
        return SymmetricDistribution(n, tuple(Fraction(v, total) for v in nums))

    for n in range(1, n_max + 1):
        for _ in range(pairs_per_n):
            mu, nu = random_dist(n), random_dist(n)
            for t in range(n + 1):
                fast = marginal_distance(mu, nu, t)
                slow = brute_force_marginal_distance(mu, nu, t)
                if fast != slow:
                    failures.append((n, t))
    return _finish(
        "distance-oracle",
        f"{pairs_per_n} seeded exact pairs per n <= {n_max}, all t, exact equality",
        failures,
        t0,
    )


def check_distance_monotone(n_max: int, pairs_per_n: int, seed: int) -> CheckResult:
    """Marginal distance is nondecreasing in the marginal size; symmetric;
    within [0,1]."""
    t0 = time.perf_counter()
    failures = []
    rng = random.Random(seed)
    for n in range(1, n_max + 1):
        for _ in range(pairs_per_n):
            nums1 = [rng.randint(0, 9) for _ in range(n + 1)]
            nums2 = [rng.randint(0, 9) for _ in range(n + 1)]
            for nums in (nums1, nums2):
                if sum(nums) == 0:
                    nums[0] = 1
            mu = SymmetricDistribution(n, tuple(Fraction(v, sum(nums1)) for v in nums1))
            nu = SymmetricDistribution(n, tuple(Fraction(v, sum(nums2)) for v in nums2))
            prev = Fraction(0)
            for t in range(n + 1):
                d = marginal_distance(mu, nu, t)
                if d != marginal_distance(nu, mu, t) or not 0 <= d <= 1 or d < prev:
                    failures.append((n, t))
                prev = d
    return _finish("distance-monotone", f"pairs per n <= {n_max}", failures, t0)


def check_parity_fixture(n_max: int) -> CheckResult:
    """Parity pairs: perfectly (n-1)-wise indistinguishable, distance 1 at
    full width, through both distance paths."""
    t0 = time.perf_counter()
    failures = []
    for n in range(1, n_max + 1):
        mu, nu = make_parity_pair(n)
        ok, achieved = is_indistinguishable(mu, nu, n - 1, 0)
        if not ok or achieved != 0:
            failures.append((n, "k-level"))
        for j in range(n):  # brute-force path re-checks every smaller marginal
            if n <= 14 and brute_force_marginal_distance(mu, nu, j) != 0:
                failures.append((n, j, "brute"))
        if marginal_distance(mu, nu, n) != 1:
            failures.append((n, "full"))
        if n <= 14 and brute_force_marginal_distance(mu, nu, n) != 1:
            failures.append((n, "full-brute"))
    return _finish("parity-fixture", f"n = 1..{n_max}, both paths, exact", failures, t0)


def check_bound_on_fixtures(n_max: int) -> CheckResult:
    """Theorem soundness on the fixture corpus: achieved distance never
    exceeds the bound at any admissible (k, s)."""
    t0 = time.perf_counter()
    failures = []
    for n in range(3, n_max + 1):
        mu, nu = make_parity_pair(n)
        for t in range(1, n):
            achieved = marginal_distance(mu, nu, t)
            for k in range(t):
                # parity pairs are (k, 0)-indistinguishable for every k < n
                for s in range(k + 1):
                    report = advantage_bound(BoundParams(n, t, k, s, 0))
                    if float(achieved) > report.raw + 1e-12:
                        failures.append((n, t, k, s))
    return _finish("bound-on-fixtures", f"parity corpus n <= {n_max}", failures, t0)


# -- oracle checks -----------------------------------------------------------


def check_sandwich(instances, deltas, check_all_s: bool = True) -> CheckResult:
    """Exact oracle <= closed-form bound for every admissible cutoff."""
    t0 = time.perf_counter()
    failures = []
    count = 0
    for n, k, t in instances:
        for delta in deltas:
            count += 1
            try:
                report = sandwich_report(n, k, t, delta, mode="exact")
                verify_witness(report.oracle, k, delta, t)
            except SoundnessViolation as exc:
                failures.append((n, k, t, str(delta), str(exc)))
                continue
            adv = float(report.oracle.advantage)
            if check_all_s:
                for s in range(k + 1):
                    bound = advantage_bound(BoundParams(n, t, k, s, delta))
                    if adv > bound.raw + 1e-12:
                        failures.append((n, k, t, str(delta), s))
            elif adv > report.bound.raw + 1e-12:
                failures.append((n, k, t, str(delta), report.s_star))
    return _finish(
        "sandwich-soundness", f"{count} exact oracle instances, all admissible s", failures, t0
    )


def check_oracle_delta_monotone(instances, deltas) -> CheckResult:
    """Oracle advantage is nondecreasing in delta (feasible region grows)."""
    t0 = time.perf_counter()
    failures = []
    for n, k, t in instances:
        prev = None
        for delta in sorted(deltas):
            adv = max_advantage_exact(n, k, t, delta).advantage
            if prev is not None and adv < prev:
                failures.append((n, k, t, str(delta)))
            prev = adv
    return _finish("oracle-delta-monotone", f"{len(list(instances))} instances", failures, t0)


# -- sweeps / decay ----------------------------------------------------------


def check_decay_linear_fraction(n_stop: int, threshold_n: int = 200, slope: float = -0.004) -> CheckResult:
    """delta=0, s=k, k=n/5, t=n/2: log bound decreasing at least linearly
    beyond threshold_n."""
    t0 = time.perf_counter()
    failures = []
    points = []
    for n in range(40, n_stop + 1, 40):
        k = n // 5
        t = n // 2
        if not 0 <= k < t < n:
            continue
        report = advantage_bound(BoundParams(n, t, k, k, 0))
        points.append((n, report.log10_raw))
    for (n1, l1), (n2, l2) in zip(points, points[1:]):
        if n1 >= threshold_n and (l2 - l1) > slope * (n2 - n1):
            failures.append((n1, n2, l2 - l1))
    detail = f"grid to n={n_stop}, last log10 bound {points[-1][1]:.1f}"
    return _finish("decay-linear-fraction", detail, failures, t0)


def check_decay_near_full(n_stop: int, d: int = 4, power: float = 0.9) -> CheckResult:
    """t = n - ceil(n^power), s = k = ceil(d n sqrt(log n / q)): the bound
    must cross below n^-4 at some finite n, which is reported."""
    t0 = time.perf_counter()
    crossing = None
    skipped = 0
    for n in range(100, n_stop + 1, 50):
        q = math.ceil(n ** power)
        t = n - q
        s = math.ceil(d * n * math.sqrt(math.log(n) / q))
        k = s
        if not 0 <= s <= k < t < n:
            skipped += 1
            continue
        report = advantage_bound(BoundParams(n, t, k, s, 0))
        if report.log10_raw < -4 * math.log10(n):
            crossing = n
            break
    failures = [] if crossing is not None else [("no crossing", n_stop)]
    return _finish(
        "decay-near-full",
        f"crossed below n^-4 at n={crossing} ({skipped} early grid points skipped by ordering)",
        failures,
        t0,
    )


# -- negative control --------------------------------------------------------


def check_corruption_control() -> CheckResult:
    """Corrupt one table entry and require the orthogonality check to
    notice; this guards the harness itself."""
    t0 = time.perf_counter()
    table = HahnTable(12, RATIONAL)
    table._q[1][0] += 1  # deliberate fault injection
    detected = False
    for r in range(13):
        for s in range(r, 13):
            total = sum(table._q[r][x] * table._q[s][x] for x in range(13))
            expected = hahn_norm_sum(12, r) if r == s else 0
            if total != expected:
                detected = True
    failures = [] if detected else [("corruption went unnoticed",)]
    return _finish("corruption-control", "injected fault must be detected", failures, t0)


# -- levels ------------------------------------------------------------------


def quick_checks() -> list[CheckResult]:
    results = [
        check_orthogonality_rational(16),
        check_orthogonality_float([60, 120]),
        check_norm_closed_form(32),
        check_float_table_matches_exact([24]),
        check_lambda_monotone(20),
        check_norm_ratio_bound(20),
        check_damping_bound(16),
        check_kernel_stochastic(16),
        check_kernel_stochastic_float([80, 200]),
        check_intertwining_exact(12),
        check_intertwining_residual_api([(10, 6, 4), (12, 7, 3), (9, 8, 8)]),
        check_factorial_moments(12),
        check_moment_enumeration([4, 6, 8, 10]),
        check_composition_law(10),
        check_surrogate_bounds([(12, 6, 2), (16, 8, 3), (20, 13, 5)], 40, seed=1),
        check_surrogate_exact([(10, 6, 2), (14, 8, 3)], 4, seed=2),
        check_distance_oracle(6, 6, seed=3),
        check_distance_monotone(8, 4, seed=4),
        check_parity_fixture(8),
        check_bound_on_fixtures(8),
        check_sandwich(
            [(6, 2, 4), (7, 3, 5), (8, 4, 6)], [0, Fraction(1, 10)], check_all_s=True
        ),
        check_oracle_delta_monotone([(7, 3, 5)], [0, Fraction(1, 100), Fraction(1, 10)]),
        check_decay_linear_fraction(1500),
        check_decay_near_full(1500),
    ]
    return results


def full_checks() -> list[CheckResult]:
    sandwich_instances = [
        (n, k, t)
        for n in range(2, 13)
        for t in range(1, min(n - 1, 10) + 1)
        for k in range(t)
    ]
    surrogate_grid = [
        (n, t, s)
        for n in (8, 12, 16, 20, 24, 28, 30)
        for t in sorted({max(2, n // 3), n // 2, 2 * n // 3, n - 1})
        for s in sorted({0, 1, t // 2, t - 1})
        if 0 <= s < t < n
    ]
    results = [
        check_orthogonality_rational(40),
        check_orthogonality_float([200, 350, 500]),
        check_norm_closed_form(40),
        check_float_table_matches_exact([40, 64]),
        check_lambda_monotone(40),
        check_norm_ratio_bound(40),
        check_damping_bound(40),
        check_kernel_stochastic(40),
        check_kernel_stochastic_float([100, 300, 500]),
        check_intertwining_exact(40),
        check_intertwining_residual_api(
            [(10, 6, 4), (16, 9, 7), (25, 13, 5), (40, 21, 21)]
        ),
        check_factorial_moments(20),
        check_moment_enumeration(list(range(2, 21))),
        check_composition_law(20),
        check_surrogate_bounds(surrogate_grid, 200, seed=1),
        check_surrogate_exact([(10, 6, 2), (14, 8, 3), (20, 11, 4), (30, 17, 6)], 8, seed=2),
        check_distance_oracle(10, 50, seed=3),
        check_distance_monotone(10, 10, seed=4),
        check_parity_fixture(10),
        check_bound_on_fixtures(10),
        check_sandwich(sandwich_instances, [0, Fraction(1, 100), Fraction(1, 10)]),
        check_oracle_delta_monotone(
            [(7, 3, 5), (9, 4, 7), (10, 5, 8)], [0, Fraction(1, 100), Fraction(1, 10)]
        ),
        check_decay_linear_fraction(5000),
        check_decay_near_full(3000),
    ]
    return results


def run_selftest(level: str = "quick", inject_corruption: bool = False, stream=None) -> tuple[int, list[CheckResult]]:
    """Run a level's checks, print one line per check, return exit code."""
    import sys

    out = stream or sys.stdout
    if level == "quick":
        results = quick_checks()
    elif level == "full":
        results = full_checks()
    else:
        raise ValueError(f"unknown selftest level {level!r}")
    if inject_corruption:
        control = check_corruption_control()
        # the control PASSES when the fault is caught; the selftest run is
        # forced to fail so pipelines can verify the exit-code contract
        control = CheckResult(
            "injected-corruption",
            False,
            "deliberate failure requested via corruption injection"
            + ("" if control.passed else " AND the fault went undetected"),
            control.seconds,
            [("injected",)],
        )
        results.append(control)
    failed = 0
    for result in results:
        print(result.line(), file=out)
        if not result.passed:
            failed += 1
    total = sum(r.seconds for r in results)
    status = "FAIL" if failed else "PASS"
    print(f"[{status}] {len(results) - failed}/{len(results)} checks passed in {total:.1f}s", file=out)
    return (1 if failed else 0), results
