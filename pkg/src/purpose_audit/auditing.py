"""The audit decision and its policy-level interpretations.

Given a purpose's model and a logged behavior, the audit decides whether any
agent planning for that purpose could have produced the log. It runs in two
steps. Step one scans the log for inherently redundant moves: a non-nothing
step through a pair whose one-step optimal value is not positive can never be
part of a non-redundant plan. Step two rewrites the rewards so that deviating
from the logged choices at an observed state costs a penalty no plan can
absorb, re-solves, and compares optimal values: the constrained and original
optima agree at every state exactly when some optimal strategy is consistent
with the log. A gap at any state therefore proves emptiness.

Verdicts lift the boolean to policy rules: a restrictive (only-for) rule is
violated when the log fits none of the allowed purposes; a prohibitive
(not-for) rule is obeyed when the log fits none of the prohibited ones.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InconsistentBehavior
from .model import (
    Action,
    Behavior,
    EnvironmentModel,
    Rational,
    State,
    observed_choices,
    validate_behavior,
)
from .solve import (
    FLOAT_EQUALITY,
    OptimalSolution,
    solve_optimal,
)

ONE = Fraction(1)
TWO = Fraction(2)


@dataclass(frozen=True)
class FixParameters:
    """Penalty sizing: omega = 2*r*/(1-gamma) + 1 exceeds any achievable
    swing in total discounted reward, since values live in
    [-r*/(1-gamma), r*/(1-gamma)]."""

    r_star: Rational
    omega: Rational


def compute_omega(model: EnvironmentModel) -> FixParameters:
    """Exact penalty parameters for a model's reward table."""
    r_star = model.max_reward_magnitude()
    omega = TWO * r_star / (ONE - model.discount) + ONE
    return FixParameters(r_star=r_star, omega=omega)


def compute_fix(
    model: EnvironmentModel,
    behavior: Behavior,
    *,
    parameters: FixParameters | None = None,
) -> EnvironmentModel:
    """Rewrite rewards so optimization must respect the logged choices.

    At every observed state, each action other than the logged one (the
    nothing-action included) gets reward -omega; observed pairs and unobserved
    states keep their rewards. An empty behavior leaves the model unchanged.
    ``parameters`` lets callers freeze omega across repeated applications.
    """
    constraints = observed_choices(behavior)
    if not constraints:
        return model
    omega = (parameters or compute_omega(model)).omega
    rewards = {
        (q, a): (-omega if q in constraints and a != constraints[q] else r)
        for (q, a), r in model.rewards.items()
    }
    return model.with_rewards(rewards)


class AuditReason(Enum):
    """Which branch decided the audit. The wire labels are fixed."""

    STEP_ONE_USELESS = "StepOneUseless"
    VALUE_GAP_AT_ALL_STATES = "ValueGapAtAllStates"
    WITNESS_STATE_EQUAL_VALUE = "WitnessStateEqualValue"
    INCONSISTENT_BEHAVIOR = "InconsistentBehavior"


@dataclass(frozen=True)
class AuditOutcome:
    """Result of one audit: the emptiness bit plus its evidence.

    ``empty_intersection`` True means no agent planning (non-redundantly) for
    the purpose could have produced the behavior. Reasons:

    - STEP_ONE_USELESS: the log goes through a useless pair (witness pair set);
      empty.
    - VALUE_GAP_AT_ALL_STATES: the penalty-constrained optimum falls short of
      the original at some state (witness state set); empty.
    - WITNESS_STATE_EQUAL_VALUE: the optima agree at every state, so some
      optimal strategy matches the log; not empty.
    - INCONSISTENT_BEHAVIOR: the log itself forces two actions at one state,
      so no stationary strategy fits; empty.
    """

    empty_intersection: bool
    reason: AuditReason
    witness_state: State | None = None
    witness_action: Action | None = None
    v_star: Mapping[State, Rational] | None = None
    v_star_fixed: Mapping[State, Rational] | None = None
    mode: str = "exact"


def _leq_zero(value, mode: str, scale: float) -> bool:
    if mode == "exact":
        return value <= 0
    return float(value) <= FLOAT_EQUALITY * scale


def _values_equal(left, right, mode: str) -> bool:
    if mode == "exact":
        return left == right
    tolerance = FLOAT_EQUALITY * max(1.0, abs(float(left)), abs(float(right)))
    return abs(float(left) - float(right)) <= tolerance


def audit(
    model: EnvironmentModel,
    behavior: Behavior,
    *,
    mode: str = "exact",
    solution: OptimalSolution | None = None,
) -> AuditOutcome:
    """Decide whether the behavior could come from planning for this purpose.

    ``solution`` may carry a precomputed optimal solution for ``model`` (it
    must match the mode); batch callers auditing many behaviors against one
    model should pass it. Float mode is advisory: its comparisons use
    tolerances where exact mode uses equality of rationals.
    """
    validate_behavior(model, behavior)
    solution = solution or solve_optimal(model, mode=mode)
    scale = max(1.0, float(model.max_reward_magnitude()) / (1.0 - float(model.discount)))

    for q, a in behavior.pairs():
        if a == model.nothing_action:
            continue
        if _leq_zero(solution.q_star[(q, a)], mode, scale):
            return AuditOutcome(
                empty_intersection=True,
                reason=AuditReason.STEP_ONE_USELESS,
                witness_state=q,
                witness_action=a,
                v_star=solution.v_star,
                mode=mode,
            )

    try:
        fixed = compute_fix(model, behavior)
    except InconsistentBehavior as exc:
        return AuditOutcome(
            empty_intersection=True,
            reason=AuditReason.INCONSISTENT_BEHAVIOR,
            witness_state=exc.state,
            witness_action=exc.second,
            v_star=solution.v_star,
            mode=mode,
        )

    fixed_solution = solve_optimal(fixed, mode=mode)
    for q in model.states:
        if not _values_equal(solution.v_star[q], fixed_solution.v_star[q], mode):
            return AuditOutcome(
                empty_intersection=True,
                reason=AuditReason.VALUE_GAP_AT_ALL_STATES,
                witness_state=q,
                v_star=solution.v_star,
                v_star_fixed=fixed_solution.v_star,
                mode=mode,
            )
    return AuditOutcome(
        empty_intersection=False,
        reason=AuditReason.WITNESS_STATE_EQUAL_VALUE,
        witness_state=behavior.start,
        v_star=solution.v_star,
        v_star_fixed=fixed_solution.v_star,
        mode=mode,
    )


class RuleKind(Enum):
    RESTRICTIVE = "only-for"
    PROHIBITIVE = "not-for"


@dataclass(frozen=True)
class PolicyRule:
    """A purpose rule: only-for (restrictive) or not-for (prohibitive)."""

    kind: RuleKind
    purposes: tuple[str, ...]

    def __post_init__(self):
        if not self.purposes:
            raise ValueError("a policy rule needs at least one purpose")


class VerdictStatus(Enum):
    VIOLATION = "VIOLATION"
    COMPLIANT = "COMPLIANT"
    INCONCLUSIVE = "INCONCLUSIVE"
    INVESTIGATE = "INVESTIGATE"


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    per_purpose: Mapping[str, AuditOutcome]


def _require_shared_structure(models: Mapping[str, EnvironmentModel]) -> None:
    items = list(models.values())
    first = items[0]
    for other in items[1:]:
        if (
            other.states != first.states
            or other.actions != first.actions
            or other.transitions != first.transitions
            or other.discount != first.discount
        ):
            raise ValueError(
                "purpose models must share states, actions, transitions and discount"
            )


def check_restrictive(
    models: Mapping[str, EnvironmentModel],
    rule: PolicyRule,
    behavior: Behavior,
    *,
    mode: str = "exact",
) -> Verdict:
    """Audit an only-for rule.

    Violation iff the behavior fits none of the allowed purposes. Compliance
    is never reported: the log fitting an allowed purpose does not rule out an
    ulterior one.
    """
    if rule.kind is not RuleKind.RESTRICTIVE:
        raise ValueError("check_restrictive needs an only-for rule")
    missing = [p for p in rule.purposes if p not in models]
    if missing:
        raise KeyError(f"rule references unknown purposes {missing}")
    _require_shared_structure({p: models[p] for p in rule.purposes})
    outcomes = {p: audit(models[p], behavior, mode=mode) for p in rule.purposes}
    if all(outcome.empty_intersection for outcome in outcomes.values()):
        return Verdict(VerdictStatus.VIOLATION, outcomes)
    return Verdict(VerdictStatus.INCONCLUSIVE, outcomes)


def check_prohibitive(
    models: Mapping[str, EnvironmentModel],
    rule: PolicyRule,
    behavior: Behavior,
    *,
    mode: str = "exact",
) -> Verdict:
    """Audit a not-for rule.

    Compliant iff the behavior fits none of the prohibited purposes;
    otherwise the auditor can neither prove nor disprove a violation.
    """
    if rule.kind is not RuleKind.PROHIBITIVE:
        raise ValueError("check_prohibitive needs a not-for rule")
    missing = [p for p in rule.purposes if p not in models]
    if missing:
        raise KeyError(f"rule references unknown purposes {missing}")
    _require_shared_structure({p: models[p] for p in rule.purposes})
    outcomes = {p: audit(models[p], behavior, mode=mode) for p in rule.purposes}
    if all(outcome.empty_intersection for outcome in outcomes.values()):
        return Verdict(VerdictStatus.COMPLIANT, outcomes)
    return Verdict(VerdictStatus.INCONCLUSIVE, outcomes)


def triage(
    prohibited: EnvironmentModel,
    allowed: Iterable[EnvironmentModel],
    behavior: Behavior,
    *,
    mode: str = "exact",
) -> bool:
    """Is this log worth investigating for the prohibited purpose?

    True iff the behavior could fit the prohibited purpose and no allowed
    purpose explains it away. With no allowed purposes the check reduces to
    the prohibited-purpose audit alone.
    """
    if audit(prohibited, behavior, mode=mode).empty_intersection:
        return False
    return all(
        audit(candidate, behavior, mode=mode).empty_intersection
        for candidate in allowed
    )


def audit_batch(
    model: EnvironmentModel,
    behaviors: Iterable[Behavior],
    *,
    mode: str = "exact",
    jobs: int = 1,
) -> list[AuditOutcome]:
    """Audit many behaviors against one model.

    The model is solved once and shared; results are in input order regardless
    of execution order.
    """
    solution = solve_optimal(model, mode=mode)
    items = list(behaviors)
    if jobs <= 1 or len(items) <= 1:
        return [audit(model, b, mode=mode, solution=solution) for b in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(
            pool.map(lambda b: audit(model, b, mode=mode, solution=solution), items)
        )
