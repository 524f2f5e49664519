import numpy as np
import pytest

from tinregion import preset_scenario
from tinregion.channel import SimoChannel, validate_channel


@pytest.fixture(scope="session")
def fig1():
    return preset_scenario("fig1")


@pytest.fixture(scope="session")
def fig2():
    return preset_scenario("fig2")


@pytest.fixture(scope="session")
def fig3():
    return preset_scenario("fig3")


def random_channel(rng, n1=2, n2=2, p=10.0):
    draw = lambda n: rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return validate_channel(
        SimoChannel(h11=draw(n1), h12=draw(n1), h21=draw(n2), h22=draw(n2),
                    p1=p, p2=p)
    )


def random_strategy(rng, p1=10.0, p2=10.0):
    from tinregion.channel import TxStrategy

    c1 = p1 * rng.uniform()
    c2 = p2 * rng.uniform()
    return TxStrategy(
        c1=c1,
        c2=c2,
        ct1=c1 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()),
        ct2=c2 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()),
    )
