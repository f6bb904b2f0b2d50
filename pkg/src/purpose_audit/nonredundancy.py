"""Non-redundancy machinery: useless pairs, behavior constraints, the
strategy precedence order and the non-redundant optimal set.

A (state, action) pair is useless when taking it can never beat stopping:
its one-step value is <= 0 under every strategy, which reduces to the
optimal-value test Q*(q, a) <= 0. A strategy precedes another when, under
every resolution of chance, it produces the same execution or a strict
sub-execution, i.e. it provably achieves the same outcome with fewer actions.
The non-redundant optimal strategies are the optimal ones not preceded by any
other optimal strategy.
"""

from __future__ import annotations

import random
from enum import Enum

from .errors import IndeterminateComparison, SizeCapExceeded
from .model import (
    Action,
    Behavior,
    EnvironmentModel,
    State,
    Strategy,
    observed_choices,
)
from .oracle import DEFAULT_OPTIONS, OracleOptions, oracle_opt
from .solve import OptimalSolution, solve_optimal
from .traces import (
    ExecutionPrefix,
    SampledContingency,
    Termination,
    TraceOrder,
    active_tokens,
    compare_active,
    simulate,
)

__all__ = [
    "Precedence",
    "useless_pairs",
    "observed_choices",
    "replace_useless_with_nothing",
    "precedes",
    "opt_star_enumerate",
]


def useless_pairs(
    model: EnvironmentModel, solution: OptimalSolution | None = None
) -> frozenset[tuple[State, Action]]:
    """All non-nothing pairs with Q*(q, a) <= 0, from one exact solve."""
    solution = solution or solve_optimal(model)
    return frozenset(
        (q, a)
        for (q, a) in model.pairs()
        if a != model.nothing_action and solution.q_star[(q, a)] <= 0
    )


def replace_useless_with_nothing(
    strategy: Strategy, useless: frozenset[tuple[State, Action]], nothing: Action
) -> Strategy:
    """Swap every useless choice for the nothing-action.

    Never lowers any state's value when ``useless`` is a subset of the
    model's useless pairs.
    """
    return Strategy(
        tuple(
            (q, nothing if (q, a) in useless else a)
            for q, a in strategy.assignments
        )
    )


class Precedence(Enum):
    YES = "yes"
    NO = "no"
    INDETERMINATE = "indeterminate"


class _Refuted(Exception):
    pass


def _trace_under_partial(
    model: EnvironmentModel,
    strategy: Strategy,
    assignment: dict[tuple[State, Action], State],
    start: State,
):
    """Simulate under a partially resolved stationary contingency.

    Returns (prefix, None) when every chance node hit is already resolved,
    or (None, pair) at the first transition that still needs a decision.
    """
    nothing = model.nothing_action
    choice = strategy.as_dict()
    steps: list[tuple[Action, State]] = []
    seen: dict[State, int] = {}
    q = start
    while True:
        a = choice[q]
        if a == nothing:
            steps.append((a, q))
            prefix = ExecutionPrefix(
                Behavior(start, tuple(steps)), Termination.NOTHING_ABSORBED
            )
            return prefix, None
        if q in seen:
            prefix = ExecutionPrefix(
                Behavior(start, tuple(steps)),
                Termination.LOOP_DETECTED,
                loop_start=seen[q],
            )
            return prefix, None
        seen[q] = len(steps)
        support = model.successors(q, a)
        if len(support) == 1:
            target = next(iter(support))
        elif (q, a) in assignment:
            target = assignment[(q, a)]
        else:
            return None, (q, a)
        steps.append((a, target))
        q = target


def _check_dominated_from(
    model: EnvironmentModel,
    smaller: Strategy,
    larger: Strategy,
    start: State,
    assignment: dict[tuple[State, Action], State],
    budget: list[int],
) -> None:
    """Raise _Refuted unless smaller's trace is <= larger's from ``start``
    under every completion of ``assignment``.

    Branches only at chance nodes a trace actually reaches, sharing choices
    between the two traces, so the enumeration covers exactly the stationary
    contingencies distinguishable from this start state.
    """
    budget[0] -= 1
    if budget[0] < 0:
        raise SizeCapExceeded("stationary contingency enumeration cap hit")

    small_trace, branch = _trace_under_partial(model, smaller, assignment, start)
    if branch is None:
        large_trace, branch = _trace_under_partial(model, larger, assignment, start)
    if branch is not None:
        for target in sorted(model.successors(*branch)):
            assignment[branch] = target
            _check_dominated_from(model, smaller, larger, start, assignment, budget)
        del assignment[branch]
        return

    nothing = model.nothing_action
    order = compare_active(
        active_tokens(small_trace, nothing), active_tokens(large_trace, nothing)
    )
    if order not in (TraceOrder.EQUAL, TraceOrder.PROPER):
        raise _Refuted


def _sampled_refutation(
    model: EnvironmentModel,
    smaller: Strategy,
    larger: Strategy,
    options: OracleOptions,
) -> bool:
    """Try to refute domination with occurrence-indexed contingencies.

    Horizon-cut comparisons that stay undecided are not refutations; only a
    definite failure counts, so a True here is a genuine counterexample.
    """
    rng = random.Random(options.seed)
    nothing = model.nothing_action
    for _ in range(options.occurrence_samples):
        contingency = SampledContingency(model, rng)
        for start in model.states:
            small = simulate(
                model, smaller, contingency, start, horizon=options.horizon
            )
            large = simulate(
                model, larger, contingency, start, horizon=options.horizon
            )
            order = compare_active(
                active_tokens(small, nothing), active_tokens(large, nothing)
            )
            if order is TraceOrder.NEITHER:
                return True
    return False


def precedes(
    model: EnvironmentModel,
    earlier: Strategy,
    later: Strategy,
    options: OracleOptions = DEFAULT_OPTIONS,
) -> Precedence:
    """Does ``earlier`` precede ``later`` (same or smaller trace everywhere,
    strictly smaller somewhere)?

    All stationary contingencies are enumerated exactly, with active parts
    classified finite or infinite by loop detection; occurrence-indexed
    contingencies are sampled up to the horizon and can only refute. For
    distinct strategies, domination everywhere already implies a strict pair:
    starting at a state where the strategies differ, the active traces differ.
    """
    if earlier == later:
        return Precedence.NO
    budget = [options.max_contingencies]
    try:
        for start in model.states:
            _check_dominated_from(model, earlier, later, start, {}, budget)
    except _Refuted:
        return Precedence.NO
    if _sampled_refutation(model, earlier, later, options):
        return Precedence.NO
    return Precedence.YES


def opt_star_enumerate(
    model: EnvironmentModel, options: OracleOptions = DEFAULT_OPTIONS
) -> list[Strategy]:
    """The optimal strategies not preceded by another optimal strategy.

    Enumerates the optimal set exactly (oracle scale), then prunes every
    strategy some other optimal strategy precedes. Indeterminate comparisons
    are propagated, never treated as No.
    """
    optimal = oracle_opt(model, options)
    survivors = []
    for candidate in optimal:
        undecided = None
        dominated = False
        for other in optimal:
            if other == candidate:
                continue
            verdict = precedes(model, other, candidate, options)
            if verdict is Precedence.YES:
                dominated = True
                break
            if verdict is Precedence.INDETERMINATE:
                undecided = other
        if dominated:
            continue
        if undecided is not None:
            raise IndeterminateComparison(
                "could not decide whether a strategy is redundant within the horizon"
            )
        survivors.append(candidate)
    return survivors
