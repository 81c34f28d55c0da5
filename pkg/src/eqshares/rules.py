"""Deterministic participatory-budgeting rules with full round logs.

Five rule families operate on :class:`~eqshares.model.Election`:

* :func:`utilitarian` - greedy by total ballot score.
* :func:`mes` / :func:`add1u` - equal virtual endowments, cheapest-per-utility
  purchases, with an optional endowment-growing completion.
* :func:`fres` / :func:`fres_utilitarian_completion` - fractional purchases at
  a shared utility price, plus a value-for-money completion.
* :func:`bos` - integral purchases that may charge supporters beyond their
  balance, picking the best (price, coverage) quote each round.
* :func:`bos_plus` - a two-phase variant that converts the would-be
  overcharge into a temporary equal boost of everyone's balance.

All rules are pure functions: identical inputs give byte-identical logs.
Ties are resolved by an injectable total order on projects.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .model import (
    BudgetState,
    Election,
    FractionalOutcome,
    Num,
    NumLike,
    Outcome,
    Project,
    PurchaseRecord,
    UtilityModel,
    UtilityProfile,
    as_num,
    is_feasible,
)

__all__ = [
    "TieBreaker",
    "RuleConfig",
    "AffordabilityQuote",
    "utilitarian",
    "min_rho",
    "mes",
    "add1u",
    "fres",
    "fres_utilitarian_completion",
    "bos_quote",
    "bos",
    "bos_plus",
    "RULE_NAMES",
    "run_rule",
]

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class TieBreaker:
    """Total order on projects used to break exact ties.

    ``order`` lists project ids from most to least preferred; projects not
    listed come after all listed ones, in ascending id order. The default
    (no explicit order) is plain ascending project id.
    """

    order: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.order is not None:
            object.__setattr__(self, "order", tuple(self.order))
            if len(set(self.order)) != len(self.order):
                raise ValueError("tie-break order contains duplicate project ids")

    def rank(self, project: int) -> tuple[int, int]:
        """Sort key: lower rank wins a tie."""
        if self.order is None:
            return (1, project)
        try:
            return (0, self.order.index(project))
        except ValueError:
            return (1, project)


@dataclass(frozen=True)
class RuleConfig:
    """Per-run knobs shared by all rules.

    ``add1u_step`` is the endowment increment used by :func:`add1u`, in the
    instance's own currency. ``exhaustive_redistribution`` switches
    :func:`bos` to the variant that removes fully satisfied voters and
    splits their leftover balance equally among the rest.
    """

    tie_breaker: TieBreaker = TieBreaker()
    add1u_step: Num = Fraction(1)
    exhaustive_redistribution: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "add1u_step", as_num(self.add1u_step))
        if self.add1u_step <= 0:
            raise ValueError("add1u_step must be positive")


@dataclass(frozen=True)
class AffordabilityQuote:
    """One candidate purchase: a share ``alpha`` of a project at utility
    price ``rho``, with the per-voter payments that cover the full cost.

    ``ratio`` (rho/alpha) is the price of buying one utility unit through
    this quote when the fractional share is accounted for; integral rules
    with alpha = 1 reduce it to rho.
    """

    project: int
    alpha: Num
    rho: Num
    payments: Mapping[int, Num]

    @property
    def ratio(self) -> Num:
        return self.rho / self.alpha


def _moneyed_supporters(
    project: Project,
    budgets: BudgetState,
    utilities: UtilityProfile,
) -> list[tuple[int, Num, Num]]:
    """(voter, utility, balance) for supporters with a positive balance."""
    balances = budgets.balances
    return [
        (i, utilities.value(i, project.id), balances[i])
        for i in utilities.supporters[project.id]
        if balances[i] > 0
    ]


def min_rho(
    project: Project,
    budgets: BudgetState,
    utilities: UtilityProfile,
) -> Optional[AffordabilityQuote]:
    """Cheapest full purchase of ``project`` from its supporters' balances.

    Finds the smallest price rho such that charging every supporter
    min(b_i, u_i * rho) raises exactly the project's cost, or None when the
    supporters' combined balances fall short. Voters with the highest
    balance-to-utility ratio pay proportionally; the rest are capped at
    their full balance.
    """
    cost = project.cost
    sup = _moneyed_supporters(project, budgets, utilities)
    if not sup:
        return None
    total_money = sum((b for _, _, b in sup), ZERO)
    if total_money < cost:
        return None
    # Voters capped at their balance are exactly those with b_i/u_i below
    # rho; scanning them in that order yields the unique fixed point.
    sup.sort(key=lambda rec: rec[2] / rec[1])
    suffix_u = sum((u for _, u, _ in sup), ZERO)
    prefix_b = ZERO
    for s, (_, u, b) in enumerate(sup):
        rho = (cost - prefix_b) / suffix_u
        if rho * u <= b:
            payments = {i: b_j for (i, _, b_j) in sup[:s]}
            payments.update((i, u_j * rho) for (i, u_j, _) in sup[s:])
            if __debug__:
                assert sum(payments.values(), ZERO) == cost
            return AffordabilityQuote(project.id, ONE, rho, payments)
        prefix_b += b
        suffix_u -= u
    raise AssertionError("unreachable: enough money implies a valid price")


def utilitarian(election: Election, config: RuleConfig = RuleConfig()) -> Outcome:
    """Greedy selection by descending total ballot score.

    Projects are ranked by the sum of raw scores over all voters (vote
    count under approvals) regardless of the election's utility model;
    each project whose cost still fits is added. The result is exhaustive
    by construction: every skipped project stayed unaffordable forever.
    """
    totals = election.scores.project_totals
    tie = config.tie_breaker
    ranked = sorted(
        election.projects, key=lambda p: (-totals[p.id], tie.rank(p.id))
    )
    remaining = election.budget
    selected: list[int] = []
    rounds: list[PurchaseRecord] = []
    for project in ranked:
        if project.cost <= remaining:
            remaining -= project.cost
            selected.append(project.id)
            rounds.append(PurchaseRecord(project.id, ONE, None, {}))
    return Outcome(tuple(selected), tuple(rounds), feasible=True)


def mes(
    election: Election,
    config: RuleConfig = RuleConfig(),
    b_ini: NumLike | None = None,
) -> Outcome:
    """Sequential purchases from equal virtual endowments.

    Every voter starts with ``b_ini`` (default: budget / n). Each round buys
    the project whose cheapest full purchase has minimal price rho, charging
    each supporter min(b_i, u_i * rho); the rule stops when no project's
    supporters can cover its cost. With the default endowment the outcome
    never exceeds the budget; larger endowments are allowed for diagnostic
    probing and may yield an outcome flagged infeasible.
    """
    endowment = (
        election.budget / election.n_voters if b_ini is None else as_num(b_ini)
    )
    if endowment <= 0:
        raise ValueError("initial endowment must be positive")
    utilities = election.utilities
    budgets = BudgetState.equal_endowment(endowment, election.n_voters)
    tie = config.tie_breaker

    unselected = set(range(len(election.projects)))
    quotes: dict[int, Optional[AffordabilityQuote]] = {}
    dirty = set(unselected)
    # Balances only fall, so every cached price is a lower bound; projects
    # are recomputed lazily, only when their bound reaches the heap top.
    heap: list[tuple[Num, int, int]] = [
        (ZERO, tie.rank(c), c) for c in unselected
    ]
    heapq.heapify(heap)
    selected: list[int] = []
    rounds: list[PurchaseRecord] = []
    while True:
        best: Optional[AffordabilityQuote] = None
        while heap:
            bound, rank, c = heapq.heappop(heap)
            if c not in unselected:
                continue
            if c in dirty:
                quote = min_rho(election.projects[c], budgets, utilities)
                dirty.discard(c)
                quotes[c] = quote
                # Short supporters stay short forever: drop None quotes.
                if quote is not None:
                    heapq.heappush(heap, (quote.rho, rank, c))
                continue
            quote = quotes[c]
            if quote is None or bound != quote.rho:
                continue
            best = quote
            break
        if best is None:
            break
        logger.debug("mes: buy %d at rho=%s", best.project, best.rho)
        for i, pay in best.payments.items():
            budgets.balances[i] -= pay
        unselected.discard(best.project)
        selected.append(best.project)
        rounds.append(
            PurchaseRecord(best.project, ONE, best.rho, best.payments)
        )
        # Only projects sharing a payer can see their cheapest price move.
        for i in best.payments:
            dirty.update(
                c for c in utilities.support_set(i) if c in unselected
            )
    outcome = Outcome(tuple(selected), tuple(rounds), feasible=True)
    if not is_feasible(election, outcome):
        outcome = Outcome(outcome.selected, outcome.rounds, feasible=False)
    return outcome


def _utilitarian_tail(
    election: Election,
    config: RuleConfig,
    selected: list[int],
    rounds: list[PurchaseRecord],
) -> None:
    """Append still-affordable projects by descending total score, in place.

    Tail purchases are funded centrally from the leftover public budget
    (rho is None, no voter payments).
    """
    totals = election.scores.project_totals
    tie = config.tie_breaker
    remaining = election.budget - sum(
        (election.projects[c].cost for c in selected), ZERO
    )
    chosen = set(selected)
    ranked = sorted(
        (p for p in election.projects if p.id not in chosen),
        key=lambda p: (-totals[p.id], tie.rank(p.id)),
    )
    for project in ranked:
        if project.cost <= remaining:
            remaining -= project.cost
            selected.append(project.id)
            rounds.append(PurchaseRecord(project.id, ONE, None, {}))


def add1u(election: Election, config: RuleConfig = RuleConfig()) -> Outcome:
    """Equal-shares selection completed by endowment growth plus a greedy tail.

    Reruns :func:`mes` with per-voter endowments b/n, b/n + step, ... and
    keeps the outcome of the last endowment that stayed within the budget.
    The scan is a plain linear walk: feasibility is not monotone in the
    endowment, so no bisection is sound. It stops at the first infeasible
    probe, or once the endowment reaches the full budget, at which point any
    single supporter could buy any affordable project alone. Finally,
    projects that still fit are appended in descending total score order.
    """
    base = election.budget / election.n_voters
    step = config.add1u_step
    best = mes(election, config, b_ini=base)
    assert best.feasible
    k = 1
    while True:
        endowment = base + k * step
        probe = mes(election, config, b_ini=endowment)
        if not probe.feasible:
            break
        best = probe
        if endowment >= election.budget:
            break
        k += 1
    selected = list(best.selected)
    rounds = list(best.rounds)
    _utilitarian_tail(election, config, selected, rounds)
    return Outcome(tuple(selected), tuple(rounds), feasible=True)


def fres(election: Election, config: RuleConfig = RuleConfig()) -> FractionalOutcome:
    """Fractional purchases at a shared per-utility price.

    All voters start with budget / n. Each round picks the project with the
    smallest price rho = cost / (total remaining support), buys the largest
    share alpha that neither exceeds the project's remaining gap to full
    funding nor overdraws any active supporter, and charges every active
    voter alpha * rho * u_i. Voters whose balance reaches zero drop out of
    the pricing; the rule ends when no partially funded project has any
    remaining support.
    """
    utilities = election.utilities
    n = election.n_voters
    budgets = BudgetState.equal_endowment(election.budget / n, n)
    balances = budgets.balances
    tie = config.tie_breaker

    active = [True] * n
    # Per-project support mass over active voters, kept incrementally.
    support = list(utilities.project_totals)
    fractions: dict[int, Num] = {}
    purchases: list[PurchaseRecord] = []
    while True:
        best_c = None
        best_key = None
        for project in election.projects:
            c = project.id
            if fractions.get(c, ZERO) == 1 or support[c] <= 0:
                continue
            key = (project.cost / support[c], tie.rank(c))
            if best_key is None or key < best_key:
                best_c, best_key = c, key
        if best_c is None:
            break
        rho = best_key[0]
        payers = [
            (i, utilities.value(i, best_c))
            for i in utilities.supporters[best_c]
            if active[i]
        ]
        gap = ONE - fractions.get(best_c, ZERO)
        alpha = min(gap, min(balances[i] / (rho * u) for i, u in payers))
        logger.debug("fres: buy %s of %d at rho=%s", alpha, best_c, rho)
        payments: dict[int, Num] = {}
        drained: list[int] = []
        for i, u in payers:
            pay = alpha * rho * u
            payments[i] = pay
            balances[i] -= pay
            assert balances[i] >= 0
            if balances[i] == 0:
                drained.append(i)
        fractions[best_c] = fractions.get(best_c, ZERO) + alpha
        purchases.append(PurchaseRecord(best_c, alpha, rho, payments))
        for i in drained:
            active[i] = False
            for c in utilities.support_set(i):
                support[c] -= utilities.value(i, c)
    return FractionalOutcome(fractions, tuple(purchases))


def fres_utilitarian_completion(
    election: Election,
    partial: FractionalOutcome,
    config: RuleConfig = RuleConfig(),
) -> FractionalOutcome:
    """Spend the leftover budget on the best value-for-money projects.

    Partially funded projects are raised toward full funding in descending
    order of total utility per unit cost (vote count under the cost model),
    with one final partial purchase that exactly exhausts the budget.
    Completion purchases are centrally funded: rho is None and no voter
    account is charged.
    """
    utilities = election.utilities
    tie = config.tie_breaker
    fractions = dict(partial.fractions)
    purchases = list(partial.purchases)
    remaining = election.budget - sum(
        (share * election.projects[c].cost for c, share in fractions.items()),
        ZERO,
    )
    if remaining < 0:
        raise ValueError("partial outcome already exceeds the budget")
    totals = utilities.project_totals
    ranked = sorted(
        (p for p in election.projects if fractions.get(p.id, ZERO) < 1),
        key=lambda p: (-(totals[p.id] / p.cost), tie.rank(p.id)),
    )
    for project in ranked:
        if remaining == 0:
            break
        gap = ONE - fractions.get(project.id, ZERO)
        delta = min(gap, remaining / project.cost)
        if delta > 0:
            fractions[project.id] = fractions.get(project.id, ZERO) + delta
            remaining -= delta * project.cost
            purchases.append(PurchaseRecord(project.id, delta, None, {}))
    return FractionalOutcome(fractions, tuple(purchases))


def bos_quote(
    project: Project,
    budgets: BudgetState,
    utilities: UtilityProfile,
    remaining_budget: Num,
) -> Optional[AffordabilityQuote]:
    """Best (alpha, rho) purchase quote for one project.

    A quote buys a share alpha of the project at per-utility price rho,
    charging each moneyed supporter min(b_i, alpha * u_i * rho) / alpha so
    the payments cover the full cost; when alpha < 1 a capped voter's
    payment exceeds her balance. Among all consistent quotes the one
    minimizing rho / alpha is returned, preferring larger alpha and then
    smaller rho on exact ties. Only prices at which some voter's cap binds,
    plus the fully proportional price, can be optimal, so exactly those are
    examined. Returns None when the project exceeds the remaining public
    budget or no supporter has money.
    """
    cost = project.cost
    if cost > remaining_budget:
        return None
    sup = _moneyed_supporters(project, budgets, utilities)
    if not sup:
        return None
    total_money = sum((b for _, _, b in sup), ZERO)
    total_u = sum((u for _, u, _ in sup), ZERO)

    def finish(alpha: Num, lam: Num) -> AffordabilityQuote:
        payments = {i: min(b, u * lam) / alpha for i, u, b in sup}
        if __debug__:
            assert sum(payments.values(), ZERO) == cost
        return AffordabilityQuote(project.id, alpha, lam / alpha, payments)

    # Fully proportional price with nobody capped: alpha = 1 immediately.
    lam_eq = cost / total_u
    if all(u * lam_eq <= b for _, u, b in sup):
        return AffordabilityQuote(
            project.id, ONE, lam_eq, {i: u * lam_eq for i, u, _ in sup}
        )

    sup.sort(key=lambda rec: rec[2] / rec[1])
    best_key = None
    best: tuple[Num, Num] | None = None
    prefix_b = ZERO
    suffix_u = total_u
    for _, u, b in sup:
        lam = b / u
        raised = prefix_b + lam * suffix_u
        if raised >= cost:
            # Every later cap price raises at least the cost as well, and
            # is dominated by the exact full-coverage price found below.
            break
        alpha = raised / cost
        key = (lam / (alpha * alpha), -alpha, lam / alpha)
        if best_key is None or key < best_key:
            best_key, best = key, (alpha, lam)
        prefix_b += b
        suffix_u -= u
    else:
        if total_money < cost:
            assert best is not None
            return finish(*best)
    # Full coverage is reachable: the price solving sum(min(b_i, u_i*x)) =
    # cost lies in the current segment and quotes alpha = 1.
    lam_full = (cost - prefix_b) / suffix_u
    key = (lam_full, -ONE, lam_full)
    if best_key is None or key < best_key:
        return finish(ONE, lam_full)
    assert best is not None
    return finish(*best)


def _approval_scored(election: Election) -> bool:
    return all(
        u == 1 for row in election.scores.rows for u in row.values()
    )


def bos(election: Election, config: RuleConfig = RuleConfig()) -> Outcome:
    """Integral purchases through the best (price, coverage) quotes.

    Each round considers every unselected project that fits the remaining
    public budget and has at least one moneyed supporter, asks
    :func:`bos_quote` for its best quote, and buys the project minimizing
    rho / alpha. Supporters are charged u_i * rho with their balance floored
    at zero, so capped voters in a partial-coverage round pay more than
    they own; those overspend events are recorded per round.

    With ``config.exhaustive_redistribution`` enabled, any voter whose
    entire support set is already funded is removed and her leftover
    balance is split equally among the voters still in play.
    """
    utilities = election.utilities
    n = election.n_voters
    budgets = BudgetState.equal_endowment(election.budget / n, n)
    balances = budgets.balances
    tie = config.tie_breaker
    redistribute = config.exhaustive_redistribution

    unselected = set(range(len(election.projects)))
    remaining = election.budget
    selected: list[int] = []
    rounds: list[PurchaseRecord] = []
    quotes: dict[int, Optional[AffordabilityQuote]] = {}
    dirty = set(unselected)
    # Without redistribution balances only fall, so cached ratios are lower
    # bounds; recompute lazily at the heap top. Redistribution can raise a
    # balance, so it re-seeds the heap with zero bounds instead.
    heap: list[tuple[Num, int, int]] = [
        (ZERO, tie.rank(c), c) for c in unselected
    ]
    heapq.heapify(heap)

    # Claim check scope: per-voter approval stakes and default accounting.
    check_overspend = (
        __debug__
        and election.utility_model is UtilityModel.COST
        and not redistribute
        and _approval_scored(election)
    )

    removed = [False] * n
    unfunded_support = [len(election.scores.support_set(i)) for i in range(n)]

    def redistribute_satisfied() -> None:
        """Drop voters with nothing left to fund; share out their money."""
        leaving = [
            i
            for i in range(n)
            if not removed[i] and unfunded_support[i] == 0
        ]
        if not leaving:
            return
        pot = ZERO
        for i in leaving:
            removed[i] = True
            pot += balances[i]
            balances[i] = ZERO
        stayers = [i for i in range(n) if not removed[i]]
        if not stayers or pot == 0:
            return
        share = pot / len(stayers)
        for i in stayers:
            balances[i] += share
        dirty.update(unselected)
        for c in unselected:
            heapq.heappush(heap, (ZERO, tie.rank(c), c))

    if redistribute:
        redistribute_satisfied()

    while True:
        best: Optional[AffordabilityQuote] = None
        while heap:
            bound, rank, c = heapq.heappop(heap)
            if c not in unselected:
                continue
            # The public budget never grows back: drop the entry for good.
            if election.projects[c].cost > remaining:
                continue
            if c in dirty:
                quote = bos_quote(
                    election.projects[c], budgets, utilities, remaining
                )
                dirty.discard(c)
                quotes[c] = quote
                if quote is not None:
                    heapq.heappush(heap, (quote.ratio, rank, c))
                continue
            quote = quotes[c]
            if quote is None or bound != quote.ratio:
                continue
            best = quote
            break
        if best is None:
            break
        c = best.project
        logger.debug(
            "bos: buy %d at alpha=%s rho=%s", c, best.alpha, best.rho
        )
        overspent = tuple(
            sorted(i for i, pay in best.payments.items() if pay > balances[i])
        )
        if check_overspend and overspent:
            payers = [i for i, pay in best.payments.items() if pay > 0]
            drained = [i for i in payers if best.payments[i] >= balances[i]]
            assert 2 * len(drained) > len(payers), (
                "an overspending round must drain a strict majority of payers"
            )
        for i in utilities.supporters[c]:
            if balances[i] > 0:
                balances[i] = max(
                    ZERO, balances[i] - utilities.value(i, c) * best.rho
                )
                dirty.update(
                    d for d in utilities.support_set(i) if d in unselected
                )
        remaining -= election.projects[c].cost
        unselected.discard(c)
        selected.append(c)
        rounds.append(
            PurchaseRecord(c, best.alpha, best.rho, best.payments, overspent)
        )
        for i in utilities.supporters[c]:
            unfunded_support[i] -= 1
        if redistribute:
            redistribute_satisfied()
    return Outcome(tuple(selected), tuple(rounds), feasible=True)


def bos_plus(election: Election, config: RuleConfig = RuleConfig()) -> Outcome:
    """Overspend-free variant: boosted balances instead of overcharges.

    Each round first computes the plain buyout quote among projects that fit
    the remaining budget. If that quote would cover only a share alpha < 1,
    the uncovered cost is divided equally among the voters the quote would
    cap, and every voter's balance is temporarily raised by that amount
    minus whatever boost she has already consumed in earlier rounds. The
    round then buys the cheapest fully covered project under the boosted
    balances; consumed boost is tracked so later rounds do not grant it
    twice. Rounds stop when even boosted balances cover nothing.
    """
    utilities = election.utilities
    n = election.n_voters
    budgets = BudgetState.equal_endowment(election.budget / n, n)
    balances = budgets.balances
    over = budgets.over
    tie = config.tie_breaker

    unselected = set(range(len(election.projects)))
    remaining = election.budget
    selected: list[int] = []
    rounds: list[PurchaseRecord] = []
    while True:
        fits = [
            c
            for c in unselected
            if election.projects[c].cost <= remaining
        ]
        if not fits:
            break
        phase1: Optional[AffordabilityQuote] = None
        phase1_key = None
        for c in fits:
            quote = bos_quote(
                election.projects[c], budgets, utilities, remaining
            )
            if quote is None:
                continue
            key = (quote.ratio, tie.rank(c))
            if phase1_key is None or key < phase1_key:
                phase1, phase1_key = quote, key
        boost = ZERO
        if phase1 is not None and phase1.alpha < 1:
            cost1 = election.projects[phase1.project].cost
            capped = [
                i
                for i in utilities.supporters[phase1.project]
                if balances[i] > 0
                and utilities.value(i, phase1.project) * phase1.rho
                >= balances[i]
            ]
            # A partial-coverage quote always caps the voter whose balance
            # pinned its price, so the divisor is at least one.
            boost = cost1 * (ONE - phase1.alpha) / len(capped)
        boosted = BudgetState(
            [balances[i] + max(ZERO, boost - over[i]) for i in range(n)]
        )
        best: Optional[AffordabilityQuote] = None
        best_key = None
        for c in fits:
            quote = min_rho(election.projects[c], boosted, utilities)
            if quote is None:
                continue
            key = (quote.rho, tie.rank(c))
            if best_key is None or key < best_key:
                best, best_key = quote, key
        if best is None:
            break
        c = best.project
        logger.debug(
            "bos_plus: buy %d at rho=%s (boost %s)", c, best.rho, boost
        )
        overspent = []
        for i, pay in best.payments.items():
            if pay > balances[i]:
                over[i] += pay - balances[i]
                balances[i] = ZERO
                overspent.append(i)
            else:
                balances[i] -= pay
        remaining -= election.projects[c].cost
        unselected.discard(c)
        selected.append(c)
        rounds.append(
            PurchaseRecord(
                c, ONE, best.rho, best.payments, tuple(sorted(overspent))
            )
        )
    return Outcome(tuple(selected), tuple(rounds), feasible=True)


RULE_NAMES = (
    "utilitarian",
    "mes",
    "mes-add1u",
    "fres",
    "fres-complete",
    "bos",
    "bos-plus",
)


def run_rule(
    name: str, election: Election, config: RuleConfig = RuleConfig()
) -> Outcome | FractionalOutcome:
    """Dispatch a rule by its public name (see ``RULE_NAMES``)."""
    if name == "utilitarian":
        return utilitarian(election, config)
    if name == "mes":
        return mes(election, config)
    if name == "mes-add1u":
        return add1u(election, config)
    if name == "fres":
        return fres(election, config)
    if name == "fres-complete":
        return fres_utilitarian_completion(election, fres(election, config), config)
    if name == "bos":
        return bos(election, config)
    if name == "bos-plus":
        return bos_plus(election, config)
    raise ValueError(f"unknown rule {name!r}")
