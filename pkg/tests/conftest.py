import pytest

from soficlab import (BernoulliMeasure, FiniteSubset, FiniteTableGroup, LatticeGroup,
                      MarkovMeasure, full_shift, golden_mean_system, origin_partition)

PHI = (1 + 5 ** 0.5) / 2


@pytest.fixture(scope="session")
def Z():
    return LatticeGroup(1)


@pytest.fixture(scope="session")
def Z2():
    return LatticeGroup(2)


@pytest.fixture(scope="session")
def Z3():
    return FiniteTableGroup.cyclic(3)


@pytest.fixture(scope="session")
def fs(Z):
    return full_shift(("0", "1"), Z)


@pytest.fixture(scope="session")
def gm():
    return golden_mean_system()


@pytest.fixture(scope="session")
def fair(fs):
    return BernoulliMeasure(fs, ["0.5", "0.5"])


@pytest.fixture(scope="session")
def skew(fs):
    return BernoulliMeasure(fs, ["0.3", "0.7"])


@pytest.fixture(scope="session")
def parry(gm):
    return MarkovMeasure.stationary(
        gm, {"0": {"0": 1 / PHI, "1": 1 - 1 / PHI}, "1": {"0": 1, "1": 0}})


@pytest.fixture(scope="session")
def gm_rational_markov(gm):
    # stationary vector (3/4, 1/4), exactly rational
    from fractions import Fraction

    return MarkovMeasure.stationary(
        gm, {"0": {"0": Fraction(2, 3), "1": Fraction(1, 3)}, "1": {"0": 1, "1": 0}})


@pytest.fixture(scope="session")
def fs_origin(fs):
    return origin_partition(fs)


@pytest.fixture(scope="session")
def gm_origin(gm):
    return origin_partition(gm)
