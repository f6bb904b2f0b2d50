from __future__ import annotations

import pytest

from purpose_audit.fixtures import (
    physician_behaviors,
    physician_models,
    physician_strategies,
    travel_behaviors,
    travel_models,
)


@pytest.fixture(scope="session")
def physician():
    """The bundled physician purpose family: {"treat", "profit"}."""
    return physician_models()


@pytest.fixture(scope="session")
def treat(physician):
    return physician["treat"]


@pytest.fixture(scope="session")
def profit(physician):
    return physician["profit"]


@pytest.fixture(scope="session")
def logs():
    """(b1, b2): the redundant-referral and necessary-referral behaviors."""
    return physician_behaviors()


@pytest.fixture(scope="session")
def sigmas(treat):
    """(sigma1, sigma2, sigma3) reference strategies."""
    return physician_strategies(treat)


@pytest.fixture(scope="session")
def travel():
    return travel_models()


@pytest.fixture(scope="session")
def travel_logs():
    return travel_behaviors()
