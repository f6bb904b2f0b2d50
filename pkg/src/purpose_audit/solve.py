"""Exact and iterative solvers for strategy values and optimal values.

Exact mode works entirely in rational arithmetic: strategy evaluation solves
the Bellman linear system with Gaussian elimination over Fractions, and
optimal values come from policy iteration with exact evaluation, which
terminates because there are finitely many strategies and every round strictly
improves some state. Float mode runs plain value iteration to a configurable
residual and is meant for larger models where exact arithmetic gets expensive;
audit verdicts derived from float values are advisory.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import ConvergenceError, UndefinedPair
from .model import Action, EnvironmentModel, Rational, State, Strategy, validate_strategy

ZERO = Fraction(0)

#: Default relative Bellman-residual target for float mode.
FLOAT_RESIDUAL = 1e-9
#: Default relative tolerance for float-mode equality tests.
FLOAT_EQUALITY = 1e-6
FLOAT_ITERATION_CAP = 1_000_000

ValueTable = Mapping[State, Rational]


@dataclass(frozen=True)
class OptimalSolution:
    """Optimal values, Q-values and the per-state set of maximizing actions."""

    v_star: Mapping[State, Rational]
    q_star: Mapping[tuple[State, Action], Rational]
    greedy: Mapping[State, tuple[Action, ...]]
    mode: str


def solve_linear_system(
    matrix: list[list[Fraction]], rhs: list[Fraction]
) -> list[Fraction]:
    """Solve A x = b exactly by Gaussian elimination with back substitution.

    The Bellman matrices used here (I - gamma * P) are strictly diagonally
    dominant, hence nonsingular.
    """
    n = len(matrix)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ArithmeticError("singular Bellman system")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] * inv
            if factor == 0:
                continue
            for c in range(col, n + 1):
                a[r][c] -= factor * a[col][c]
    x = [ZERO] * n
    for row in range(n - 1, -1, -1):
        acc = a[row][n]
        for c in range(row + 1, n):
            acc -= a[row][c] * x[c]
        x[row] = acc / a[row][row]
    return x


def evaluate_strategy(
    model: EnvironmentModel, strategy: Strategy
) -> dict[State, Rational]:
    """Exact expected total discounted reward of a strategy, per state.

    Solves V(q) = r(q, s(q)) + gamma * sum t(q, s(q))(q') V(q').
    """
    validate_strategy(model, strategy)
    index = {q: i for i, q in enumerate(model.states)}
    n = len(model.states)
    gamma = model.discount
    matrix = [[ZERO] * n for _ in range(n)]
    rhs = [ZERO] * n
    choice = strategy.as_dict()
    for q, i in index.items():
        action = choice[q]
        matrix[i][i] += 1
        for target, probability in model.successors(q, action).items():
            matrix[i][index[target]] -= gamma * probability
        rhs[i] = model.reward(q, action)
    solution = solve_linear_system(matrix, rhs)
    return {q: solution[index[q]] for q in model.states}


def q_value(model: EnvironmentModel, values: ValueTable, state: State, action: Action):
    """One-step lookahead value r(q,a) + gamma * sum t(q,a)(q') v(q')."""
    if (state, action) not in model.transitions:
        raise UndefinedPair(f"action {action!r} is not defined at state {state!r}")
    gamma = model.discount
    acc = model.reward(state, action)
    for target, probability in model.successors(state, action).items():
        acc += gamma * probability * values[target]
    return acc


def _policy_iteration(model: EnvironmentModel) -> OptimalSolution:
    choice: dict[State, Action] = {}
    for q in model.states:
        available = model.available_actions(q)
        choice[q] = (
            model.nothing_action
            if model.nothing_action in available
            else available[0]
        )
    while True:
        strategy = Strategy.from_mapping(choice, model)
        values = evaluate_strategy(model, strategy)
        changed = False
        for q in model.states:
            best_action = choice[q]
            best = q_value(model, values, q, best_action)
            for a in model.available_actions(q):
                candidate = q_value(model, values, q, a)
                if candidate > best:
                    best, best_action = candidate, a
            if best_action != choice[q]:
                choice[q] = best_action
                changed = True
        if not changed:
            break
    q_star = {pair: q_value(model, values, *pair) for pair in model.pairs()}
    greedy = {
        q: tuple(
            a for a in model.available_actions(q) if q_star[(q, a)] == values[q]
        )
        for q in model.states
    }
    return OptimalSolution(v_star=values, q_star=q_star, greedy=greedy, mode="exact")


def _value_iteration(
    model: EnvironmentModel, residual: float, max_iterations: int
) -> OptimalSolution:
    gamma = float(model.discount)
    rewards = {pair: float(r) for pair, r in model.rewards.items()}
    transitions = {
        pair: [(target, float(p)) for target, p in dist.items()]
        for pair, dist in model.transitions.items()
    }
    scale = max(1.0, max((abs(r) for r in rewards.values()), default=0.0) / (1 - gamma))
    # Stop when the step gap guarantees sup-distance to the fixed point of at
    # most residual * scale: ||V_k - V*|| <= gamma/(1-gamma) * ||V_k - V_{k-1}||.
    target = residual * scale * (1 - gamma) / gamma

    values = {q: 0.0 for q in model.states}

    def backup(q: State, a: Action, table) -> float:
        acc = rewards[(q, a)]
        for nxt, p in transitions[(q, a)]:
            acc += gamma * p * table[nxt]
        return acc

    for _ in range(max_iterations):
        updated = {
            q: max(backup(q, a, values) for a in model.available_actions(q))
            for q in model.states
        }
        gap = max(abs(updated[q] - values[q]) for q in model.states)
        values = updated
        # Returned table's own Bellman residual is at most gamma * gap.
        if gap <= target:
            break
    else:
        raise ConvergenceError(
            f"value iteration did not reach residual {target} "
            f"within {max_iterations} iterations"
        )

    q_star = {pair: backup(pair[0], pair[1], values) for pair in model.pairs()}
    tolerance = FLOAT_EQUALITY * scale
    greedy = {
        q: tuple(
            a
            for a in model.available_actions(q)
            if abs(q_star[(q, a)] - values[q]) <= tolerance
        )
        for q in model.states
    }
    return OptimalSolution(v_star=values, q_star=q_star, greedy=greedy, mode="float")


def solve_optimal(
    model: EnvironmentModel,
    mode: str = "exact",
    *,
    residual: float = FLOAT_RESIDUAL,
    max_iterations: int = FLOAT_ITERATION_CAP,
) -> OptimalSolution:
    """Optimal value of every state, V*(q) = max over strategies of V(sigma, q).

    ``mode`` is "exact" (policy iteration, rational arithmetic) or "float"
    (value iteration to the given relative residual; raises ConvergenceError
    if the iteration cap is hit first).
    """
    if mode == "exact":
        return _policy_iteration(model)
    if mode == "float":
        return _value_iteration(model, residual, max_iterations)
    raise ValueError(f"unknown solver mode {mode!r}")


def bellman_residual(model: EnvironmentModel, values: ValueTable):
    """max over states of |v(q) - max_a [r(q,a) + gamma * sum t v]|.

    Exactly zero (as a Fraction) for exact optimal values.
    """
    worst = None
    for q in model.states:
        best = max(q_value(model, values, q, a) for a in model.available_actions(q))
        gap = abs(values[q] - best)
        worst = gap if worst is None else max(worst, gap)
    return worst


def is_optimal(
    model: EnvironmentModel,
    strategy: Strategy,
    *,
    mode: str = "exact",
    solution: OptimalSolution | None = None,
    tolerance: float = FLOAT_EQUALITY,
) -> bool:
    """Whether the strategy attains the optimal value at every state."""
    solution = solution or solve_optimal(model, mode=mode)
    values = evaluate_strategy(model, strategy)
    if mode == "exact" and solution.mode == "exact":
        return all(values[q] == solution.v_star[q] for q in model.states)
    return all(
        abs(float(values[q]) - float(solution.v_star[q]))
        <= tolerance * max(1.0, abs(float(solution.v_star[q])))
        for q in model.states
    )
