"""Text formats for models and logs.

A model document is line oriented::

    # comment
    gamma: 9/10
    states: 1 2 3 4 5 6
    actions: take send diagnose

    transition: 1 take -> 2 9/10, 4 1/10
    transition: 2 diagnose -> 6 1

    purpose: treat
    reward: 2 diagnose = 12

Probabilities, rewards and gamma are exact rationals, written "a/b" or as
terminating decimals. Rewards not listed for a defined transition are zero.
The nothing-action rows are implicit (the validator adds them); a document may
still declare them, as long as they are zero-reward self-loops. One
environment model is produced per declared purpose, all sharing states,
actions, transitions and gamma.

A log document holds one behavior per line: alternating state and action
tokens, starting and ending with a state.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .errors import AlternationError, BehaviorError, ParseError
from .model import (
    Action,
    Behavior,
    EnvironmentModel,
    State,
    as_rational,
    validate_behavior,
    validate_model,
)


def _strip_comment(line: str) -> str:
    if "#" in line:
        line = line[: line.index("#")]
    return line.strip()


def _rational(token: str, line_no: int) -> Fraction:
    try:
        return as_rational(token)
    except ValueError as exc:
        raise ParseError(f"bad rational literal {token!r}", line_no) from exc


def parse_model(text: str) -> dict[str, EnvironmentModel]:
    """Parse a model document into one validated model per purpose."""
    states: list[str] | None = None
    actions: list[str] | None = None
    gamma = None
    transitions: dict[tuple[State, Action], dict[State, Fraction]] = {}
    purposes: dict[str, dict[tuple[State, Action], Fraction]] = {}
    current: str | None = None

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line)
        if not line:
            continue
        if ":" not in line:
            raise ParseError("expected 'directive: ...'", line_no, raw_line.find(line) + 1)
        directive, _, rest = line.partition(":")
        directive = directive.strip()
        rest = rest.strip()

        if directive == "states":
            states = rest.split()
            if not states:
                raise ParseError("states line lists no states", line_no)
        elif directive == "actions":
            actions = rest.split()
            if not actions:
                raise ParseError("actions line lists no actions", line_no)
        elif directive == "gamma":
            gamma = _rational(rest, line_no)
        elif directive == "transition":
            head, arrow, targets = rest.partition("->")
            if not arrow:
                raise ParseError("transition line needs '->'", line_no)
            head_tokens = head.split()
            if len(head_tokens) != 2:
                raise ParseError(
                    "transition head must be '<state> <action>'", line_no
                )
            q, a = head_tokens
            if (q, a) in transitions:
                raise ParseError(f"duplicate transition for {q} {a}", line_no)
            distribution: dict[State, Fraction] = {}
            for part in targets.split(","):
                pair = part.split()
                if len(pair) != 2:
                    raise ParseError(
                        "each transition target must be '<state> <probability>'",
                        line_no,
                    )
                target, probability = pair
                if target in distribution:
                    raise ParseError(
                        f"duplicate target {target} in transition", line_no
                    )
                distribution[target] = _rational(probability, line_no)
            transitions[(q, a)] = distribution
        elif directive == "purpose":
            name = rest
            if not name or len(name.split()) != 1:
                raise ParseError("purpose line needs exactly one name", line_no)
            if name in purposes:
                raise ParseError(f"duplicate purpose {name!r}", line_no)
            purposes[name] = {}
            current = name
        elif directive == "reward":
            if current is None:
                raise ParseError("reward line before any purpose", line_no)
            head, eq, value = rest.partition("=")
            if not eq:
                raise ParseError("reward line needs '='", line_no)
            head_tokens = head.split()
            if len(head_tokens) != 2:
                raise ParseError("reward head must be '<state> <action>'", line_no)
            pair = (head_tokens[0], head_tokens[1])
            if pair in purposes[current]:
                raise ParseError(
                    f"duplicate reward for {pair} under purpose {current!r}", line_no
                )
            purposes[current][pair] = _rational(value.strip(), line_no)
        else:
            raise ParseError(f"unknown directive {directive!r}", line_no)

    if states is None:
        raise ParseError("missing 'states:' line")
    if actions is None:
        raise ParseError("missing 'actions:' line")
    if gamma is None:
        raise ParseError("missing 'gamma:' line")
    if not transitions:
        raise ParseError("no transitions declared")
    if not purposes:
        raise ParseError("no purposes declared")

    return {
        name: validate_model(
            states=states,
            actions=actions,
            transitions=transitions,
            rewards=rewards,
            discount=gamma,
            fill_missing_rewards=True,
        )
        for name, rewards in purposes.items()
    }


def _format_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else str(value)


def format_model_document(models: Mapping[str, EnvironmentModel]) -> str:
    """Canonical text for a purpose family; parse(format(parse(x))) == parse(x).

    Nothing-action rows and zero rewards are left implicit.
    """
    items = list(models.items())
    first = items[0][1]
    lines = [
        f"gamma: {_format_rational(first.discount)}",
        "states: " + " ".join(first.states),
        "actions: " + " ".join(a for a in first.actions if a != first.nothing_action),
        "",
    ]
    for q, a in first.pairs():
        if a == first.nothing_action:
            continue
        targets = ", ".join(
            f"{target} {_format_rational(p)}"
            for target, p in sorted(
                first.successors(q, a).items(),
                key=lambda kv: first.states.index(kv[0]),
            )
        )
        lines.append(f"transition: {q} {a} -> {targets}")
    for name, model in items:
        lines.append("")
        lines.append(f"purpose: {name}")
        for q, a in model.pairs():
            if a == model.nothing_action:
                continue
            reward = model.reward(q, a)
            if reward != 0:
                lines.append(f"reward: {q} {a} = {_format_rational(reward)}")
    return "\n".join(lines) + "\n"


def parse_log(
    text: str, model: EnvironmentModel | None = None
) -> list[Behavior]:
    """Parse a log document; with a model, also validate each behavior.

    Unknown tokens, undefined pairs and zero-probability steps are hard
    errors: a log outside the model's vocabulary cannot be audited.
    """
    behaviors = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line)
        if not line:
            continue
        tokens = line.split()
        if len(tokens) % 2 == 0:
            raise AlternationError(
                "behavior must alternate state, action, ... starting and ending "
                "with a state",
                line_no,
            )
        behavior = Behavior.from_tokens(tokens)
        if model is not None:
            try:
                validate_behavior(model, behavior)
            except BehaviorError as exc:
                raise ParseError(str(exc), line_no) from exc
        behaviors.append(behavior)
    return behaviors


def format_log(behaviors: list[Behavior]) -> str:
    return "\n".join(" ".join(b.tokens()) for b in behaviors) + "\n"
