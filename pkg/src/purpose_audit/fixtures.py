"""Bundled example models and logs.

The physician fixture models a specialist who takes an X-ray, can usually
diagnose directly (state 2) but sometimes must refer the record to an outside
practice (state 4); referral from the clear-image state is medically
redundant. Two reward tables share the structure: treatment quality pays for
reaching a diagnosis, while the billing table pays the referral fee and the
diagnosis fees. The billing fees are pinned so that at the clear-image state
referring-then-diagnosing ties direct diagnosis exactly (12 = 9 + gamma *
10/3 at gamma = 9/10), which keeps the by-the-book strategy optimal under
both tables.

The travel fixture models someone who can drive to one of two cities or fly
to both, with separate reward tables for the business meeting and the
lecture; driving pays 2, flying 1, attending nothing 0.
"""

from __future__ import annotations

from .model import Behavior, EnvironmentModel, Strategy
from .modelfile import parse_log, parse_model

PHYSICIAN_GAMMA = "9/10"

_PHYSICIAN_TEMPLATE = """\
# Physician referral environment.
# States: 1 seen patient, 2 X-ray clear, 3 record at own practice (redundant
# referral), 4 X-ray unclear, 5 outside test succeeded, 6 done.
gamma: {gamma}
states: 1 2 3 4 5 6
actions: take send diagnose

transition: 1 take -> 2 9/10, 4 1/10
transition: 2 send -> 3 1
transition: 2 diagnose -> 6 1
transition: 3 diagnose -> 6 1
transition: 4 send -> 5 4/5, 6 1/5
transition: 5 diagnose -> 6 1
transition: 6 send -> 6 1

purpose: treat
reward: 2 diagnose = 12
reward: 3 diagnose = 12
reward: 5 diagnose = 12

purpose: profit
# Referral fee 9 either way; diagnosis billing tied so that direct diagnosis
# and refer-then-diagnose are worth the same from state 2.
reward: 2 send = 9
reward: 4 send = 9
reward: 2 diagnose = 12
reward: 3 diagnose = 10/3
reward: 5 diagnose = 10/3
"""

PHYSICIAN_LOG = """\
# One record per line: the redundant referral, then the necessary one.
1 take 2 send 3 diagnose 6 N 6
1 take 4 send 5 diagnose 6 N 6
"""

TRAVEL_GAMMA = "9/10"

_TRAVEL_TEMPLATE = """\
# Traveler choosing between driving to one event or flying to both.
gamma: {gamma}
states: home nyDrove dcDrove nyFlew dcFlew bothFlown
actions: driveNY driveDC flyNY flyDC

transition: home driveNY -> nyDrove 1
transition: home driveDC -> dcDrove 1
transition: home flyNY -> nyFlew 1
transition: home flyDC -> dcFlew 1
transition: nyFlew flyDC -> bothFlown 1
transition: dcFlew flyNY -> bothFlown 1

purpose: business
reward: home driveNY = 2
reward: home flyNY = 1
reward: dcFlew flyNY = 1

purpose: lecture
reward: home driveDC = 2
reward: home flyDC = 1
reward: nyFlew flyDC = 1
"""

TRAVEL_LOG = """\
# Flying to both events, then the drive-only itinerary.
home flyNY nyFlew flyDC bothFlown N bothFlown
home driveNY nyDrove N nyDrove
"""


def physician_document(gamma: str = PHYSICIAN_GAMMA) -> str:
    return _PHYSICIAN_TEMPLATE.format(gamma=gamma)


def physician_models(gamma: str = PHYSICIAN_GAMMA) -> dict[str, EnvironmentModel]:
    """The physician purpose family: keys "treat" and "profit"."""
    return parse_model(physician_document(gamma))


def physician_behaviors() -> tuple[Behavior, Behavior]:
    """(redundant-referral log, necessary-referral log)."""
    first, second = parse_log(PHYSICIAN_LOG)
    return first, second


def physician_strategies(
    model: EnvironmentModel,
) -> tuple[Strategy, Strategy, Strategy]:
    """The three reference strategies over the physician structure.

    sigma1 follows the book: take, diagnose where possible, refer only from
    the unclear state, stop when done. sigma2 adds a redundant referral at the
    clear state; sigma3 keeps sending after everything is done.
    """
    base = {"1": "take", "2": "diagnose", "3": "diagnose",
            "4": "send", "5": "diagnose", "6": "N"}
    sigma1 = Strategy.from_mapping(base, model)
    sigma2 = Strategy.from_mapping({**base, "2": "send"}, model)
    sigma3 = Strategy.from_mapping({**base, "6": "send"}, model)
    return sigma1, sigma2, sigma3


def travel_document(gamma: str = TRAVEL_GAMMA) -> str:
    return _TRAVEL_TEMPLATE.format(gamma=gamma)


def travel_models(gamma: str = TRAVEL_GAMMA) -> dict[str, EnvironmentModel]:
    """The travel purpose family: keys "business" and "lecture"."""
    return parse_model(travel_document(gamma))


def travel_behaviors() -> tuple[Behavior, Behavior]:
    first, second = parse_log(TRAVEL_LOG)
    return first, second
