"""Exact rational primal simplex.

Two-phase dense-tableau simplex over exact rationals (gmpy2.mpq when
available, stdlib Fraction otherwise). Pricing is Dantzig for speed, with a
permanent switch to Bland's rule after a run of degenerate pivots, which
guarantees termination. Instances here are tiny (tens of rows), so a dense
tableau beats anything clever.

Objectives can be swapped on a solved tableau and re-optimised from the
current basis, which is what makes enumerating thousands of objectives over
one feasible region affordable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

try:
    from gmpy2 import mpq as _R
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _R = Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_DEGENERATE_SWITCH = 12  # consecutive zero-progress pivots before Bland mode


@dataclass(frozen=True)
class LinearProgram:
    """maximize objective . x  subject to rows (coeffs, sense, rhs), x >= 0.

    sense is one of '<=', '>=', '=='. All data should be ints or Fractions.
    """

    objective: tuple
    rows: tuple

    @classmethod
    def build(cls, objective, rows) -> "LinearProgram":
        return cls(tuple(objective), tuple((tuple(c), s, r) for c, s, r in rows))


@dataclass
class SimplexResult:
    status: str
    value: Fraction | None
    solution: list | None
    pivots: int


class SimplexSolver:
    """Reusable tableau for one feasible region and many objectives."""

    def __init__(self, objective, rows, max_pivots: int = 50_000):
        self.n_struct = len(objective)
        self.max_pivots = max_pivots
        self._c = [_R(v) for v in objective]
        self._rows_spec = [(list(coeffs), sense, rhs) for coeffs, sense, rhs in rows]
        for coeffs, _, _ in self._rows_spec:
            if len(coeffs) != self.n_struct:
                raise ValueError("constraint width does not match objective length")
        self._tableau = None
        self._basis = None
        self._feasible = False
        self.pivots = 0

    # -- construction ------------------------------------------------------

    def _build_phase1(self):
        """Standard form with slacks/artificials; returns artificial columns."""
        zero = _R(0)
        rows = []
        senses = []
        rhss = []
        for coeffs, sense, rhs in self._rows_spec:
            row = [_R(v) for v in coeffs]
            rhs = _R(rhs)
            if rhs < 0:
                row = [-v for v in row]
                rhs = -rhs
                sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
            rows.append(row)
            senses.append(sense)
            rhss.append(rhs)

        m = len(rows)
        n_slack = sum(1 for s in senses if s in ("<=", ">="))
        total = self.n_struct + n_slack + m  # worst case: one artificial per row
        tableau = []
        basis = []
        art_cols = []
        slack_at = self.n_struct
        art_at = self.n_struct + n_slack
        for i, (row, sense, rhs) in enumerate(zip(rows, senses, rhss)):
            full = row + [zero] * (total - self.n_struct) + [rhs]
            if sense == "<=":
                full[slack_at] = _R(1)
                basis.append(slack_at)
                slack_at += 1
            elif sense == ">=":
                full[slack_at] = _R(-1)
                slack_at += 1
                full[art_at] = _R(1)
                basis.append(art_at)
                art_cols.append(art_at)
                art_at += 1
            else:
                full[art_at] = _R(1)
                basis.append(art_at)
                art_cols.append(art_at)
                art_at += 1
            tableau.append(full)
        # drop unused artificial columns ('<=' rows never got one)
        used = self.n_struct + n_slack + len(art_cols)
        keep = list(range(self.n_struct + n_slack)) + art_cols
        remap = {old: new for new, old in enumerate(keep)}
        self._tableau = [[r[j] for j in keep] + [r[-1]] for r in tableau]
        self._basis = [remap[b] for b in basis]
        self.n_total = used
        return [remap[a] for a in art_cols]

    def _objective_row(self, costs):
        """Reduced costs c_j - z_j for the current basis (maximization)."""
        zero = _R(0)
        obj = list(costs) + [zero] * (self.n_total - len(costs)) + [zero]
        for i, b in enumerate(self._basis):
            cb = obj[b]
            if cb:
                row = self._tableau[i]
                for j in range(self.n_total + 1):
                    if row[j]:
                        obj[j] -= cb * row[j]
        return obj

    # -- pivoting ----------------------------------------------------------

    def _pivot(self, obj, i, j):
        tableau = self._tableau
        prow = tableau[i]
        piv = prow[j]
        if piv != 1:
            inv = 1 / piv
            tableau[i] = prow = [v * inv for v in prow]
        width = self.n_total + 1
        nz = [col for col in range(width) if prow[col]]
        for row in tableau:
            if row is prow:
                continue
            f = row[j]
            if f:
                for col in nz:
                    row[col] -= f * prow[col]
        f = obj[j]
        if f:
            for col in nz:
                obj[col] -= f * prow[col]
        self._basis[i] = j
        self.pivots += 1

    def _optimize(self, obj) -> str:
        tableau = self._tableau
        zero = _R(0)
        bland = False
        stall = 0
        for _ in range(self.max_pivots):
            # entering column
            enter = -1
            if bland:
                for j in range(self.n_total):
                    if obj[j] > zero:
                        enter = j
                        break
            else:
                best = zero
                for j in range(self.n_total):
                    v = obj[j]
                    if v > best:
                        best = v
                        enter = j
            if enter < 0:
                return OPTIMAL
            # ratio test, Bland tie-break on basic variable index
            leave = -1
            best_ratio = None
            for i, row in enumerate(tableau):
                a = row[enter]
                if a > zero:
                    ratio = row[-1] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self._basis[i] < self._basis[leave])
                    ):
                        best_ratio = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED
            if best_ratio == 0:
                stall += 1
                if stall >= _DEGENERATE_SWITCH:
                    bland = True
            else:
                stall = 0
            self._pivot(obj, leave, enter)
        raise ArithmeticError(f"simplex exceeded {self.max_pivots} pivots")

    # -- phases ------------------------------------------------------------

    def _phase1(self) -> bool:
        art_cols = self._build_phase1()
        if not art_cols:
            self._feasible = True
            return True
        costs = [_R(0)] * self.n_total
        for a in art_cols:
            costs[a] = _R(-1)
        obj = self._objective_row(costs)
        status = self._optimize(obj)
        assert status == OPTIMAL  # phase 1 is always bounded
        if obj[-1] != 0:  # leftover artificial infeasibility: -sum(artificials) < 0
            self._feasible = False
            return False
        art_set = set(art_cols)
        # drive stray artificials out of the basis, dropping redundant rows
        for i in list(range(len(self._basis)))[::-1]:
            if self._basis[i] in art_set:
                row = self._tableau[i]
                pivot_col = next(
                    (j for j in range(self.n_total) if j not in art_set and row[j]), None
                )
                if pivot_col is None:
                    del self._tableau[i]
                    del self._basis[i]
                else:
                    self._pivot(obj, i, pivot_col)
        # freeze artificial columns at zero by removing them
        keep = [j for j in range(self.n_total) if j not in art_set]
        remap = {old: new for new, old in enumerate(keep)}
        self._tableau = [[r[j] for j in keep] + [r[-1]] for r in self._tableau]
        self._basis = [remap[b] for b in self._basis]
        self.n_total = len(keep)
        self._feasible = True
        return True

    def solve(self) -> SimplexResult:
        if self._tableau is None:
            if not self._phase1():
                return SimplexResult(INFEASIBLE, None, None, self.pivots)
        if not self._feasible:
            return SimplexResult(INFEASIBLE, None, None, self.pivots)
        return self.resolve(self._c)

    def set_objective(self, objective) -> None:
        if len(objective) != self.n_struct:
            raise ValueError("objective width changed")
        self._c = [_R(v) for v in objective]

    def resolve(self, objective=None) -> SimplexResult:
        """Re-optimize from the current (feasible) basis."""
        if objective is not None:
            self.set_objective(objective)
        if self._tableau is None or not self._feasible:
            return self.solve()
        obj = self._objective_row(self._c)
        status = self._optimize(obj)
        if status != OPTIMAL:
            return SimplexResult(status, None, None, self.pivots)
        x = [Fraction(0)] * self.n_struct
        for i, b in enumerate(self._basis):
            if b < self.n_struct:
                x[b] = Fraction(self._tableau[i][-1])
        value = sum(Fraction(c) * v for c, v in zip(self._rows_objective(), x))
        return SimplexResult(OPTIMAL, value, x, self.pivots)

    def _rows_objective(self):
        return [Fraction(v) for v in self._c]


def solve_lp(lp: LinearProgram) -> SimplexResult:
    """One-shot exact solve: optimal value and a vertex solution, or a
    distinct infeasible/unbounded status."""
    return SimplexSolver(lp.objective, lp.rows).solve()
