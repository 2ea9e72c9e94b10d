from fractions import Fraction

import pytest

from lhamc.explore import build_kripke
from lhamc.reservoir import Hose, NResState, NResSystem, Reservoir


def three_tank_state() -> NResState:
    tanks = [Reservoir(i, Fraction(15), Fraction(50), Fraction(30), Fraction(5)) for i in range(3)]
    return NResState.make(Hose(Fraction(10), 0), tanks)


@pytest.fixture
def init2_state() -> NResState:
    return three_tank_state()


@pytest.fixture
def init2_system(init2_state) -> NResSystem:
    return NResSystem(init2_state)


@pytest.fixture
def init2_kripke(init2_system):
    return build_kripke(init2_system, Fraction(5), Fraction(1))
