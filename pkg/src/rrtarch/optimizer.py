"""Choose how many modules go on the combinatorial block of a hybrid fabric.

The decision variable is the integer split m in [1, n]: m modules on the
combinatorial block, n - m on the hierarchical tree. The objective j(m) =
s_total(m) + 1/p_total(m) is maximized subject to the power cap
p_total(m) <= power_cap.

Two solvers are provided. `enumerate_oracle` scans every m and is the ground
truth. `solve_split` runs branch and bound on integer intervals with the bound

    j(m) <= s_total(hi) + 1 / min(p_total(lo), p_total(hi))   for m in [lo, hi]

which is only sound when s_total is nondecreasing and the interval minimum of
p_total sits at an endpoint. Both facts are certified analytically from the
coefficient polynomials before the search runs (derivative sign on the
continuous range plus an explicit check of the m = n step, where the
hierarchical block count hits zero and its constant term drops out). When
certification fails, for instance under user-supplied coefficients with
interior power dips, the solver falls back to the exhaustive scan. Correctness
over cleverness: the search space is one-dimensional and small.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy.polynomial.polynomial as npoly
from numpy.polynomial import Polynomial

from .perf_models import ArchModelSet, DEFAULT_MODELS, HybridEvaluation, evaluate_hybrid


@dataclass(frozen=True)
class ProblemSpec:
    """One optimization instance: fabric width, power cap, and models."""

    n_total: int
    power_cap: float
    models: ArchModelSet = DEFAULT_MODELS

    def __post_init__(self):
        if self.n_total < 1:
            raise ValueError(f"n_total must be >= 1, got {self.n_total}")
        if not self.power_cap > 0.0:
            raise ValueError(f"power_cap must be positive, got {self.power_cap}")


@dataclass(frozen=True)
class SplitSolution:
    """Best split found, plus how much work it took to find it.

    `nodes_explored` counts distinct m values whose objective was evaluated;
    the exhaustive oracle always evaluates n of them.
    """

    m: int
    evaluation: HybridEvaluation
    nodes_explored: int
    method: str

    @property
    def s_total(self) -> float:
        return self.evaluation.s_total

    @property
    def p_total(self) -> float:
        return self.evaluation.p_total

    @property
    def j(self) -> float:
        return self.evaluation.j


class NoFeasibleSolution(Exception):
    """No m in [1, n] satisfies the power cap."""

    def __init__(self, spec: ProblemSpec, min_p_total: float, argmin_m: int):
        self.spec = spec
        self.min_p_total = min_p_total
        self.argmin_m = argmin_m
        super().__init__(
            f"no feasible split for n={spec.n_total}, cap={spec.power_cap}: "
            f"minimum p_total is {min_p_total:.6g} W at m={argmin_m}"
        )


def enumerate_oracle(spec: ProblemSpec) -> SplitSolution:
    """Exhaustive scan of m in [1, n]; ties go to the smaller m."""
    best: Optional[HybridEvaluation] = None
    min_p = float("inf")
    argmin_m = 1
    for m in range(1, spec.n_total + 1):
        ev = evaluate_hybrid(spec.models, spec.n_total, m)
        if ev.p_total < min_p:
            min_p = ev.p_total
            argmin_m = m
        if ev.p_total <= spec.power_cap and (best is None or ev.j > best.j):
            best = ev
    if best is None:
        raise NoFeasibleSolution(spec, min_p, argmin_m)
    return SplitSolution(
        m=best.m, evaluation=best, nodes_explored=spec.n_total, method="exhaustive"
    )


def feasible_region(spec: ProblemSpec) -> Optional[Tuple[int, int]]:
    """Inclusive (lo, hi) of the largest contiguous feasible run, or None.

    Under the default coefficients the feasible set is a prefix [1, m_max].
    With user models the set can fragment; the earliest longest run is
    returned.
    """
    best: Optional[Tuple[int, int]] = None
    run_start = None
    prev_feasible = False
    for m in range(1, spec.n_total + 1):
        ev = evaluate_hybrid(spec.models, spec.n_total, m)
        ok = ev.p_total <= spec.power_cap
        if ok and not prev_feasible:
            run_start = m
        if not ok and prev_feasible:
            run = (run_start, m - 1)
            if best is None or run[1] - run[0] > best[1] - best[0]:
                best = run
        prev_feasible = ok
    if prev_feasible:
        run = (run_start, spec.n_total)
        if best is None or run[1] - run[0] > best[1] - best[0]:
            best = run
    return best


# ----------------------------------------------------------------------------
# Monotonicity certificates
# ----------------------------------------------------------------------------


def _as_poly(coeffs) -> Polynomial:
    return Polynomial(list(coeffs))


def _no_roots_in(poly: Polynomial, lo: float, hi: float) -> bool:
    coeffs = npoly.polytrim(poly.coef, tol=0.0)
    if len(coeffs) <= 1:
        return True  # constant: no sign change anywhere
    for r in Polynomial(coeffs).roots():
        if abs(r.imag) > 1e-9 * (1.0 + abs(r)):
            continue
        x = r.real
        if lo - 1e-9 <= x <= hi + 1e-9:
            return False
    return True


def _sign_on(poly: Polynomial, lo: float, hi: float) -> int:
    """+1 / -1 if poly is strictly positive/negative on [lo, hi], else 0."""
    if not _no_roots_in(poly, lo, hi):
        return 0
    mid = poly((lo + hi) / 2.0)
    if mid > 1e-15:
        return 1
    if mid < -1e-15:
        return -1
    return 0


def _certify_bounds(spec: ProblemSpec) -> bool:
    """True when the interval bound used by branch and bound is sound.

    Needs s_total nondecreasing over [1, n] and the minimum of p_total over
    any subinterval to sit at one of its endpoints. On the continuous range
    [1, n-1] both blocks are populated, so derivative polynomials settle it;
    the step to m = n (hierarchical term vanishes) is checked directly.
    """
    return _certified(spec.models, spec.n_total)


# the certificate ignores the power cap, so it is cached per (models, n);
# root finding costs an eigendecomposition and would otherwise dominate
@lru_cache(maxsize=512)
def _certified(models: ArchModelSet, n: int) -> bool:
    if n <= 2:
        return True  # two or fewer candidate m values, bound never bisects far
    mnm = Polynomial([float(n), -1.0])  # n - m
    mp1 = Polynomial([1.0, 1.0])  # m + 1
    ds = _as_poly(models.s_combi.derivative().coeffs)(Polynomial([0.0, 1.0])) - _as_poly(
        models.s_hier.derivative().coeffs
    )(mnm)
    dp = _as_poly(models.p_combi.derivative().coeffs)(mp1) - _as_poly(
        models.p_hier.derivative().coeffs
    )(mnm)
    if _sign_on(ds, 1.0, float(n - 1)) != 1:
        return False
    last = evaluate_hybrid(models, n, n)
    prev = evaluate_hybrid(models, n, n - 1)
    if last.s_total < prev.s_total:
        return False
    p_dir = _sign_on(dp, 1.0, float(n - 1))
    if p_dir == 1:
        return True  # increasing then any final step: interval min is an endpoint
    if p_dir == -1 and last.p_total <= prev.p_total:
        return True  # decreasing throughout
    return False


# ----------------------------------------------------------------------------
# Branch and bound
# ----------------------------------------------------------------------------


def solve_split(spec: ProblemSpec) -> SplitSolution:
    """Maximize j subject to the power cap; matches `enumerate_oracle` exactly."""
    if not _certify_bounds(spec):
        sol = enumerate_oracle(spec)
        return SplitSolution(
            m=sol.m,
            evaluation=sol.evaluation,
            nodes_explored=sol.nodes_explored,
            method="exhaustive-fallback",
        )

    models = spec.models
    n, cap = spec.n_total, spec.power_cap
    memo: Dict[int, HybridEvaluation] = {}

    def ev(m: int) -> HybridEvaluation:
        got = memo.get(m)
        if got is None:
            got = evaluate_hybrid(models, n, m)
            memo[m] = got
        return got

    best: Optional[HybridEvaluation] = None
    min_p = float("inf")
    argmin_p = 1

    def consider(m: int):
        nonlocal best, min_p, argmin_p
        e = ev(m)
        if e.p_total < min_p:
            min_p = e.p_total
            argmin_p = m
        if e.p_total <= cap and (
            best is None or e.j > best.j or (e.j == best.j and m < best.m)
        ):
            best = e

    # Depth-first, right interval first: under a nondecreasing objective the
    # large-m side carries the greater bound, so the incumbent tightens fast.
    stack = [(1, n)]
    while stack:
        lo, hi = stack.pop()
        e_lo = ev(lo)
        e_hi = ev(hi)
        if e_lo.p_total < min_p:
            min_p, argmin_p = e_lo.p_total, lo
        if e_hi.p_total < min_p:
            min_p, argmin_p = e_hi.p_total, hi
        if min(e_lo.p_total, e_hi.p_total) > cap:
            continue  # no feasible point in [lo, hi]
        bound = e_hi.s_total + 1.0 / min(e_lo.p_total, e_hi.p_total)
        if best is not None and (bound < best.j or (bound == best.j and lo > best.m)):
            continue
        if hi - lo <= 1:
            consider(lo)
            if hi != lo:
                consider(hi)
            continue
        mid = (lo + hi) // 2
        stack.append((lo, mid))
        stack.append((mid + 1, hi))

    if best is None:
        raise NoFeasibleSolution(spec, min_p, argmin_p)
    return SplitSolution(
        m=best.m,
        evaluation=best,
        nodes_explored=len(memo),
        method="branch-and-bound",
    )
