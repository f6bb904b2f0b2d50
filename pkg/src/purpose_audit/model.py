"""Environment models, strategies and logged behaviors.

An environment model is a finite discounted MDP with a distinguished
nothing-action: a zero-reward self-loop available at every state, so that an
agent can always stop acting. Actions other than the nothing-action may be
available at only some states. All probabilities, rewards and the discount
factor are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import (
    BehaviorError,
    DiscountError,
    DistributionError,
    DomainMismatch,
    InconsistentBehavior,
    ModelError,
    NothingActionConflict,
    StrategyError,
)

State = str
Action = str
Rational = Fraction

#: Default name of the distinguished do-nothing action.
NOTHING = "N"

ONE = Fraction(1)
ZERO = Fraction(0)


def as_rational(value) -> Fraction:
    """Convert a number to an exact Fraction.

    Strings may be "a/b" or terminating decimals; floats are read through their
    decimal repr so that 0.9 means 9/10, not the nearest binary double.
    """
    if isinstance(value, bool):
        raise TypeError(f"cannot interpret {value!r} as a rational number")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational literal {value!r}") from exc
    raise TypeError(f"cannot interpret {value!r} as a rational number")


@dataclass(frozen=True)
class EnvironmentModel:
    """A validated model: states, actions, transitions, rewards, discount.

    ``transitions`` maps each defined (state, action) pair to a distribution
    over successor states; ``rewards`` is defined on exactly the same pairs.
    Instances are immutable; construct them through :func:`validate_model`.
    """

    states: tuple[State, ...]
    actions: tuple[Action, ...]
    transitions: Mapping[tuple[State, Action], Mapping[State, Rational]]
    rewards: Mapping[tuple[State, Action], Rational]
    discount: Rational
    nothing_action: Action = NOTHING

    def available_actions(self, state: State) -> tuple[Action, ...]:
        """Actions with a transition entry at ``state``, in action order."""
        return tuple(a for a in self.actions if (state, a) in self.transitions)

    def successors(self, state: State, action: Action) -> Mapping[State, Rational]:
        return self.transitions[(state, action)]

    def reward(self, state: State, action: Action) -> Rational:
        return self.rewards[(state, action)]

    def pairs(self) -> Iterator[tuple[State, Action]]:
        """Defined (state, action) pairs in deterministic state/action order."""
        for q in self.states:
            for a in self.actions:
                if (q, a) in self.transitions:
                    yield (q, a)

    def with_rewards(
        self, rewards: Mapping[tuple[State, Action], Rational]
    ) -> EnvironmentModel:
        """Same transition structure with a different reward table."""
        if set(rewards) != set(self.transitions):
            raise DomainMismatch(
                "replacement rewards must cover exactly the transition domain"
            )
        table = {pair: as_rational(rewards[pair]) for pair in self.transitions}
        return EnvironmentModel(
            states=self.states,
            actions=self.actions,
            transitions=self.transitions,
            rewards=table,
            discount=self.discount,
            nothing_action=self.nothing_action,
        )

    def max_reward_magnitude(self) -> Rational:
        """Largest |r(q, a)| over the defined pairs."""
        return max((abs(r) for r in self.rewards.values()), default=ZERO)


def _check_distribution(pair, distribution) -> dict[State, Rational]:
    cleaned: dict[State, Rational] = {}
    total = ZERO
    for target, probability in distribution.items():
        p = as_rational(probability)
        if p < 0:
            raise DistributionError(
                f"negative probability {p} for {pair} -> {target!r}"
            )
        if p > 0:
            cleaned[target] = p
        total += p
    if total != 1:
        raise DistributionError(f"probabilities for {pair} sum to {total}, not 1")
    return cleaned


def validate_model(
    raw: Mapping | None = None,
    *,
    states: Iterable[State] | None = None,
    actions: Iterable[Action] | None = None,
    transitions: Mapping | None = None,
    rewards: Mapping | None = None,
    discount=None,
    nothing_action: Action = NOTHING,
    complete_missing_actions: bool = False,
    fill_missing_rewards: bool = False,
    nothing_states: Iterable[State] | None = None,
) -> EnvironmentModel:
    """Validate a raw model description and return an immutable model.

    The nothing-action is auto-completed (zero-reward self-loop) at any state
    that omits it; a user-supplied nothing row must already be a zero-reward
    self-loop. ``complete_missing_actions`` additionally adds zero-reward
    self-loops for every other action missing at a state, matching diagrams
    that leave such loops implicit. ``fill_missing_rewards`` defaults omitted
    rewards on defined pairs to zero instead of raising DomainMismatch.

    ``nothing_states`` is a documented extension, off by default: when given,
    the nothing-action is only auto-completed at those states, so stopping is
    not available everywhere. Every state must still end up with at least one
    action.
    """
    if raw is not None:
        states = raw.get("states", states)
        actions = raw.get("actions", actions)
        transitions = raw.get("transitions", transitions)
        rewards = raw.get("rewards", rewards)
        if discount is None:
            discount = raw.get("discount", raw.get("gamma"))

    if states is None or actions is None or transitions is None or discount is None:
        raise ModelError("states, actions, transitions and discount are all required")

    state_list = tuple(dict.fromkeys(states))
    if not state_list:
        raise ModelError("a model needs at least one state")
    action_list = list(dict.fromkeys(actions))
    if nothing_action not in action_list:
        action_list.append(nothing_action)
    action_tuple = tuple(action_list)
    state_set = set(state_list)

    gamma = as_rational(discount)
    if not ZERO < gamma < ONE:
        raise DiscountError(f"discount must satisfy 0 < gamma < 1, got {gamma}")

    reward_table = {pair: as_rational(r) for pair, r in (rewards or {}).items()}

    transition_table: dict[tuple[State, Action], dict[State, Rational]] = {}
    for (q, a), distribution in transitions.items():
        if q not in state_set:
            raise ModelError(f"transition references unknown state {q!r}")
        if a not in action_tuple:
            raise ModelError(f"transition references unknown action {a!r}")
        cleaned = _check_distribution((q, a), distribution)
        for target in cleaned:
            if target not in state_set:
                raise ModelError(
                    f"transition {(q, a)} targets unknown state {target!r}"
                )
        transition_table[(q, a)] = cleaned

    # The nothing-action is owned by the model: verify supplied rows, then
    # complete the missing ones.
    allowed_nothing = state_set if nothing_states is None else set(nothing_states)
    for q in state_list:
        key = (q, nothing_action)
        if key in transition_table:
            if transition_table[key] != {q: ONE}:
                raise NothingActionConflict(
                    f"nothing-action at {q!r} must be a self-loop with probability 1"
                )
            if reward_table.get(key, ZERO) != 0:
                raise NothingActionConflict(
                    f"nothing-action at {q!r} must have reward 0"
                )
            reward_table[key] = ZERO
        elif q in allowed_nothing:
            transition_table[key] = {q: ONE}
            reward_table[key] = ZERO

    if complete_missing_actions:
        for q in state_list:
            for a in action_tuple:
                if (q, a) not in transition_table:
                    transition_table[(q, a)] = {q: ONE}
                    reward_table.setdefault((q, a), ZERO)

    for pair in reward_table:
        if pair not in transition_table:
            raise DomainMismatch(f"reward defined for {pair} but no transition is")
    for pair in transition_table:
        if pair not in reward_table:
            if fill_missing_rewards:
                reward_table[pair] = ZERO
            else:
                raise DomainMismatch(f"transition defined for {pair} but no reward is")

    ordered_transitions: dict[tuple[State, Action], Mapping[State, Rational]] = {}
    ordered_rewards: dict[tuple[State, Action], Rational] = {}
    for q in state_list:
        if not any((q, a) in transition_table for a in action_tuple):
            raise ModelError(f"state {q!r} has no available actions")
        for a in action_tuple:
            if (q, a) in transition_table:
                ordered_transitions[(q, a)] = dict(transition_table[(q, a)])
                ordered_rewards[(q, a)] = reward_table[(q, a)]

    return EnvironmentModel(
        states=state_list,
        actions=action_tuple,
        transitions=ordered_transitions,
        rewards=ordered_rewards,
        discount=gamma,
        nothing_action=nothing_action,
    )


@dataclass(frozen=True)
class Strategy:
    """A deterministic stationary strategy: one chosen action per state."""

    assignments: tuple[tuple[State, Action], ...]

    @classmethod
    def from_mapping(
        cls, choice: Mapping[State, Action], model: EnvironmentModel
    ) -> Strategy:
        """Build and validate a strategy for ``model`` (totality, definedness)."""
        missing = [q for q in model.states if q not in choice]
        if missing:
            raise StrategyError(f"strategy chooses nothing at states {missing}")
        extra = set(choice) - set(model.states)
        if extra:
            raise StrategyError(f"strategy mentions unknown states {sorted(extra)}")
        for q in model.states:
            if (q, choice[q]) not in model.transitions:
                raise StrategyError(
                    f"action {choice[q]!r} is not available at state {q!r}"
                )
        return cls(tuple((q, choice[q]) for q in model.states))

    def __getitem__(self, state: State) -> Action:
        for q, a in self.assignments:
            if q == state:
                return a
        raise KeyError(state)

    def as_dict(self) -> dict[State, Action]:
        return dict(self.assignments)

    def replace(self, state: State, action: Action) -> Strategy:
        """Copy of this strategy with one choice swapped."""
        return Strategy(
            tuple((q, action if q == state else a) for q, a in self.assignments)
        )


def validate_strategy(model: EnvironmentModel, strategy: Strategy) -> None:
    """Raise StrategyError unless ``strategy`` is total and defined for ``model``."""
    Strategy.from_mapping(strategy.as_dict(), model)


@dataclass(frozen=True)
class Behavior:
    """A finite logged prefix [q0, a1, q1, ..., an, qn] of an execution."""

    start: State
    steps: tuple[tuple[Action, State], ...] = ()

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> Behavior:
        items = list(tokens)
        if not items or len(items) % 2 == 0:
            raise BehaviorError(
                "a behavior is an odd-length alternation starting and ending with a state"
            )
        steps = tuple(
            (items[i], items[i + 1]) for i in range(1, len(items) - 1, 2)
        )
        return cls(start=items[0], steps=steps)

    def tokens(self) -> list[str]:
        out = [self.start]
        for action, state in self.steps:
            out.append(action)
            out.append(state)
        return out

    def states(self) -> list[State]:
        return [self.start] + [state for _, state in self.steps]

    def actions(self) -> list[Action]:
        return [action for action, _ in self.steps]

    def pairs(self) -> list[tuple[State, Action]]:
        """The observed (q_i, a_{i+1}) pairs, in order."""
        out = []
        q = self.start
        for action, state in self.steps:
            out.append((q, action))
            q = state
        return out

    def __len__(self) -> int:
        return len(self.steps)


def observed_choices(behavior: Behavior) -> dict[State, Action]:
    """Per-state action constraints a behavior imposes on stationary strategies.

    A strategy could have produced the behavior iff it agrees with every entry.
    Raises InconsistentBehavior when the same state was observed with two
    different actions: then no stationary strategy fits and the consistent set
    is empty.
    """
    constraints: dict[State, Action] = {}
    for state, action in behavior.pairs():
        if state in constraints and constraints[state] != action:
            raise InconsistentBehavior(state, constraints[state], action)
        constraints[state] = action
    return constraints


def validate_behavior(model: EnvironmentModel, behavior: Behavior) -> None:
    """Check a behavior against a model.

    Every token must be in the model's vocabulary, every step must use a
    defined (state, action) pair, and every transition taken must have nonzero
    probability; a logged behavior has to be consistent with some contingency.
    """
    state_set = set(model.states)
    if behavior.start not in state_set:
        raise BehaviorError(f"unknown state {behavior.start!r} in behavior")
    q = behavior.start
    for action, target in behavior.steps:
        if action not in model.actions:
            raise BehaviorError(f"unknown action {action!r} in behavior")
        if target not in state_set:
            raise BehaviorError(f"unknown state {target!r} in behavior")
        if (q, action) not in model.transitions:
            raise BehaviorError(f"action {action!r} is not available at state {q!r}")
        if model.successors(q, action).get(target, ZERO) == 0:
            raise BehaviorError(
                f"transition {q!r} --{action}--> {target!r} has probability 0"
            )
        q = target
