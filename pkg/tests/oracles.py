"""Independent reference implementations used to cross-check the package.

Everything here is written from the definitions alone, deliberately naive,
and shares no code with ``eqshares`` beyond the immutable data model. The
test suite freezes values computed by these oracles and also compares them
against the package at run time.
"""
from __future__ import annotations

import math
import statistics
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from eqshares.model import Election

ZERO = Fraction(0)
ONE = Fraction(1)


def tie_key(order: Sequence[int] | None):
    """Replicates the injectable project order: listed ids first, then id."""

    def key(c: int) -> tuple[int, int]:
        if order is not None and c in order:
            return (0, order.index(c))
        return (1, c)

    return key


# ---------------------------------------------------------------------------
# Greedy selection by total ballot score.


def naive_utilitarian(
    election: Election, order: Sequence[int] | None = None
) -> list[int]:
    """Two-line greedy: rank by vote count (raw score total), take what fits."""
    totals = [ZERO] * len(election.projects)
    for row in election.scores.rows:
        for c, u in row.items():
            totals[c] += u
    key = tie_key(order)
    ranked = sorted(range(len(election.projects)), key=lambda c: (-totals[c], key(c)))
    remaining = election.budget
    chosen = []
    for c in ranked:
        if election.projects[c].cost <= remaining:
            remaining -= election.projects[c].cost
            chosen.append(c)
    return sorted(chosen)


# ---------------------------------------------------------------------------
# Cheapest full purchase price (the rho-affordability fixed point).


def naive_min_rho(
    cost: Fraction, supporters: list[tuple[Fraction, Fraction]]
) -> Optional[Fraction]:
    """Smallest rho with sum(min(b_i, u_i*rho)) = cost, or None.

    ``supporters`` holds (utility, balance) pairs with balance > 0. The sum
    is a piecewise-linear nondecreasing function of rho with breakpoints at
    the balance/utility ratios; each segment is solved linearly and the
    candidate is validated by direct substitution.
    """
    if not supporters:
        return None
    if sum(b for _, b in supporters) < cost:
        return None

    def raised(rho: Fraction) -> Fraction:
        return sum(min(b, u * rho) for u, b in supporters)

    breakpoints = sorted({b / u for u, b in supporters})
    previous = ZERO
    for point in breakpoints + [None]:
        # Inside (previous, point] exactly the voters with b/u <= previous
        # are capped; solve the linear segment for rho.
        capped = sum(b for u, b in supporters if b / u <= previous)
        slope = sum(u for u, b in supporters if b / u > previous)
        if slope > 0:
            rho = (cost - capped) / slope
            inside = previous < rho and (point is None or rho <= point)
            if inside and raised(rho) == cost:
                return rho
        if point is not None and raised(point) == cost:
            return point
        previous = point if point is not None else previous
    return None


def naive_mes(
    election: Election,
    order: Sequence[int] | None = None,
    b_ini: Fraction | None = None,
) -> tuple[list[int], list[tuple[int, Fraction]]]:
    """Full-rescan equal-shares loop; returns (sorted selection, rho trace)."""
    n = election.n_voters
    utilities = election.utilities
    balances = [election.budget / n if b_ini is None else b_ini] * n
    key = tie_key(order)
    unselected = set(range(len(election.projects)))
    trace: list[tuple[int, Fraction]] = []
    while True:
        best = None
        for c in sorted(unselected):
            sup = [
                (utilities.value(i, c), balances[i])
                for i in range(n)
                if utilities.value(i, c) > 0 and balances[i] > 0
            ]
            rho = naive_min_rho(election.projects[c].cost, sup)
            if rho is None:
                continue
            if best is None or (rho, key(c)) < (best[1], key(best[0])):
                best = (c, rho)
        if best is None:
            break
        c, rho = best
        for i in range(n):
            u = utilities.value(i, c)
            if u > 0:
                balances[i] -= min(balances[i], u * rho)
        unselected.discard(c)
        trace.append((c, rho))
    return sorted(c for c, _ in trace), trace


def naive_add1u(
    election: Election,
    order: Sequence[int] | None = None,
    step: Fraction = ONE,
) -> list[int]:
    """Linear endowment scan plus a vote-count tail, straight from the text."""
    base = election.budget / election.n_voters
    costs = [p.cost for p in election.projects]

    def feasible(chosen: list[int]) -> bool:
        return sum(costs[c] for c in chosen) <= election.budget

    best, _ = naive_mes(election, order, b_ini=base)
    k = 1
    while True:
        endowment = base + k * step
        probe, _ = naive_mes(election, order, b_ini=endowment)
        if not feasible(probe):
            break
        best = probe
        if endowment >= election.budget:
            break
        k += 1
    totals = [ZERO] * len(election.projects)
    for row in election.scores.rows:
        for c, u in row.items():
            totals[c] += u
    key = tie_key(order)
    remaining = election.budget - sum(costs[c] for c in best)
    chosen = list(best)
    for c in sorted(
        (c for c in range(len(costs)) if c not in set(best)),
        key=lambda c: (-totals[c], key(c)),
    ):
        if costs[c] <= remaining:
            remaining -= costs[c]
            chosen.append(c)
    return sorted(chosen)


# ---------------------------------------------------------------------------
# Fractional knapsack (the single-voter optimum).


def fractional_knapsack(
    budget: Fraction, items: list[tuple[Fraction, Fraction]]
) -> dict[int, Fraction]:
    """Greedy value-per-cost shares for (cost, value) items, exact."""
    shares: dict[int, Fraction] = {}
    remaining = budget
    ranked = sorted(
        (j for j, (_, value) in enumerate(items) if value > 0),
        key=lambda j: (-(items[j][1] / items[j][0]), j),
    )
    for j in ranked:
        if remaining <= 0:
            break
        cost = items[j][0]
        share = min(ONE, remaining / cost)
        shares[j] = share
        remaining -= share * cost
    return shares


# ---------------------------------------------------------------------------
# Brute-force violation counting over all approver subsets.


def brute_force_ejr_plus(
    election: Election, funded: dict[int, Fraction]
) -> set[int]:
    """Ids of unfunded projects certified by SOME approver subset.

    Checks every subset of each project's approvers, so it is complete and
    independent of the prefix-greedy search used by the package. Only
    usable on small instances.
    """
    n = election.n_voters
    share = election.budget / n
    cu = election.cost_utilities
    sat = [
        sum(
            (w * cu.value(i, c) for c, w in funded.items()),
            ZERO,
        )
        for i in range(n)
    ]
    violating: set[int] = set()
    for project in election.projects:
        if funded.get(project.id, ZERO) >= 1:
            continue
        approvers = [
            i for i in range(n) if election.scores.value(i, project.id) > 0
        ]
        for mask in range(1, 1 << len(approvers)):
            group = [approvers[k] for k in range(len(approvers)) if mask >> k & 1]
            cap = len(group) * share
            if cap >= project.cost and all(
                sat[i] + project.cost <= cap for i in group
            ):
                violating.add(project.id)
                break
    return violating


# ---------------------------------------------------------------------------
# Dense-sweep lower-envelope check for purchase quotes.


def sweep_quote_min_ratio(
    cost: Fraction,
    supporters: list[tuple[Fraction, Fraction]],
    points: int = 10**4,
) -> float:
    """Minimum rho/alpha over a dense alpha grid, solved in floats.

    For each alpha the minimal consistent price lambda satisfies
    sum(min(b_i, u_i*lambda)) = alpha*cost; the sum is piecewise linear in
    lambda, so lambda is found by locating the crossing segment. Returns
    min over the grid of lambda/alpha**2 (= rho/alpha with rho = lambda/alpha).
    """
    u = np.array([float(ui) for ui, _ in supporters])
    b = np.array([float(bi) for _, bi in supporters])
    order = np.argsort(b / u)
    u, b = u[order], b[order]
    knots = b / u
    # Value of the sum at each knot, plus cumulative prefixes for segments.
    prefix_b = np.concatenate(([0.0], np.cumsum(b)))
    suffix_u = np.concatenate((np.cumsum(u[::-1])[::-1], [0.0]))
    at_knots = prefix_b[:-1] + knots * suffix_u[:-1]

    total_b = float(prefix_b[-1])
    alpha_max = min(1.0, total_b / float(cost))
    alphas = np.linspace(alpha_max / points, alpha_max, points)
    targets = alphas * float(cost)

    # Segment k covers targets in (at_knots[k-1], at_knots[k]]; the last
    # knot's value equals the total balance, so alpha_max keeps every
    # target inside a segment and the clip only guards float rounding.
    seg = np.searchsorted(at_knots, targets, side="right")
    seg = np.clip(seg, 0, len(knots) - 1)
    lam = (targets - prefix_b[seg]) / suffix_u[seg]
    ratio = lam / alphas**2
    return float(np.min(ratio))


# ---------------------------------------------------------------------------
# Second statistics implementation (stdlib-based).


def second_mean(values: list[Fraction]) -> Fraction:
    return statistics.mean(values)


def second_std(values: list[Fraction]) -> float:
    return math.sqrt(statistics.pvariance(values))


def second_quantiles(values: list[Fraction]) -> dict[int, Fraction]:
    """The 10/25/50/75/90 percent points, linear interpolation, exact."""
    if len(values) == 1:
        return {p: values[0] for p in (10, 25, 50, 75, 90)}
    cuts = statistics.quantiles(values, n=20, method="inclusive")
    return {10: cuts[1], 25: cuts[4], 50: cuts[9], 75: cuts[14], 90: cuts[17]}
