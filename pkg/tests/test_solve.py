from __future__ import annotations

import random
from fractions import Fraction

import pytest

from purpose_audit import (
    Strategy,
    UndefinedPair,
    bellman_residual,
    evaluate_strategy,
    is_optimal,
    q_value,
    solve_optimal,
    validate_model,
)
from purpose_audit.oracle import random_model

F = Fraction

# Hand-solved strategy values for the by-the-book physician strategy at
# gamma = 9/10: V(2) = V(3) = V(5) = 12 (diagnose then stop), V(4) =
# gamma*0.8*12, V(1) = gamma*(0.9*12 + 0.1*V(4)).
SIGMA1_TREAT_VALUES = {
    "1": F(6561, 625),
    "2": F(12),
    "3": F(12),
    "4": F(216, 25),
    "5": F(12),
    "6": F(0),
}


def one_state_model(rewards_by_action, gamma="1/2"):
    actions = list(rewards_by_action)
    return validate_model(
        states=["s"],
        actions=actions,
        transitions={("s", a): {"s": 1} for a in actions},
        rewards={("s", a): r for a, r in rewards_by_action.items()},
        discount=gamma,
    )


class TestEvaluateStrategy:
    def test_all_nothing_is_zero(self, treat):
        sigma = Strategy.from_mapping({q: "N" for q in treat.states}, treat)
        assert evaluate_strategy(treat, sigma) == {q: 0 for q in treat.states}

    def test_geometric_series(self):
        model = one_state_model({"loop": 1})
        sigma = Strategy.from_mapping({"s": "loop"}, model)
        assert evaluate_strategy(model, sigma) == {"s": F(2)}

    def test_sigma1_on_treat(self, treat, sigmas):
        sigma1, _, _ = sigmas
        assert evaluate_strategy(treat, sigma1) == SIGMA1_TREAT_VALUES

    def test_bellman_identity_holds_exactly(self, treat, sigmas):
        sigma1, _, _ = sigmas
        values = evaluate_strategy(treat, sigma1)
        for q in treat.states:
            assert values[q] == q_value(treat, values, q, sigma1[q])


class TestSolveOptimal:
    def test_treat_values(self, treat):
        solution = solve_optimal(treat)
        assert solution.v_star["6"] == 0
        assert solution.v_star["3"] == 12
        assert solution.v_star == SIGMA1_TREAT_VALUES

    def test_one_state_two_actions(self):
        model = one_state_model({"one": 1, "two": 2})
        solution = solve_optimal(model)
        assert solution.v_star["s"] == 4
        assert solution.greedy["s"] == ("two",)

    def test_profit_values(self, profit):
        solution = solve_optimal(profit)
        assert solution.v_star == {
            "1": F(5373, 500),
            "2": F(12),
            "3": F(10, 3),
            "4": F(57, 5),
            "5": F(10, 3),
            "6": F(0),
        }
        # Direct diagnosis and refer-then-diagnose tie exactly at state 2.
        assert solution.greedy["2"] == ("send", "diagnose")

    def test_exact_residual_is_zero(self, treat, profit):
        for model in (treat, profit):
            solution = solve_optimal(model)
            assert bellman_residual(model, solution.v_star) == 0

    def test_float_mode_close_to_exact(self, treat):
        exact = solve_optimal(treat)
        approx = solve_optimal(treat, mode="float")
        for q in treat.states:
            assert abs(float(exact.v_star[q]) - approx.v_star[q]) < 1e-6

    def test_unknown_mode_rejected(self, treat):
        with pytest.raises(ValueError):
            solve_optimal(treat, mode="psychic")


class TestQValue:
    def test_nothing_action_discounts_in_place(self, treat):
        solution = solve_optimal(treat)
        for q in treat.states:
            assert (
                q_value(treat, solution.v_star, q, "N")
                == treat.discount * solution.v_star[q]
            )

    def test_zero_table_gives_reward(self, treat):
        zero = {q: F(0) for q in treat.states}
        assert q_value(treat, zero, "2", "diagnose") == 12
        assert q_value(treat, zero, "1", "take") == 0

    def test_diagnose_at_three_under_optimal(self, treat):
        solution = solve_optimal(treat)
        assert q_value(treat, solution.v_star, "3", "diagnose") == 12

    def test_undefined_pair(self, treat):
        with pytest.raises(UndefinedPair):
            q_value(treat, solve_optimal(treat).v_star, "1", "diagnose")


class TestIsOptimal:
    def test_reference_strategies(self, treat, sigmas):
        sigma1, sigma2, sigma3 = sigmas
        assert is_optimal(treat, sigma1)
        assert not is_optimal(treat, sigma2)
        assert is_optimal(treat, sigma3)

    def test_sigma1_also_optimal_for_profit(self, profit, sigmas):
        sigma1, _, _ = sigmas
        assert is_optimal(profit, sigma1)


class TestRandomizedSolverProperties:
    def test_value_bounds(self):
        rng = random.Random(7)
        for _ in range(25):
            model = random_model(rng)
            solution = solve_optimal(model)
            bound = model.max_reward_magnitude() / (1 - model.discount)
            for q in model.states:
                assert -bound <= solution.v_star[q] <= bound

    def test_exact_and_float_agree(self):
        rng = random.Random(11)
        for _ in range(25):
            model = random_model(rng)
            exact = solve_optimal(model)
            approx = solve_optimal(model, mode="float")
            for q in model.states:
                assert abs(float(exact.v_star[q]) - approx.v_star[q]) < 1e-6

    def test_reward_monotonicity(self):
        # Raising one chosen reward never lowers any state's strategy value.
        rng = random.Random(13)
        for _ in range(15):
            model = random_model(rng)
            choice = {q: rng.choice(model.available_actions(q)) for q in model.states}
            sigma = Strategy.from_mapping(choice, model)
            before = evaluate_strategy(model, sigma)
            q = rng.choice(model.states)
            bumped = dict(model.rewards)
            if choice[q] == model.nothing_action:
                continue
            bumped[(q, choice[q])] += 1
            after = evaluate_strategy(model.with_rewards(bumped), sigma)
            assert all(after[s] >= before[s] for s in model.states)

    def test_greedy_strategies_are_optimal(self):
        rng = random.Random(17)
        for _ in range(10):
            model = random_model(rng)
            solution = solve_optimal(model)
            choice = {q: solution.greedy[q][0] for q in model.states}
            assert is_optimal(model, Strategy.from_mapping(choice, model), solution=solution)
