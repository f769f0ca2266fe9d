import pytest
from hypothesis import given, strategies as st

from aoipreempt.delay import (
    CONSTANT,
    INCREASING_SOMEWHERE,
    NONINCREASING,
    DelayModel,
    build_from_tail,
    build_geometric,
    build_weibull,
    hazard_profile,
)
from aoipreempt.errors import InvalidParameter, InvalidTail


def test_weibull_beta_one_is_geometric():
    assert build_weibull(0.9, 1, 4).hazards == pytest.approx((0.1,) * 4, abs=1e-15)


def test_weibull_beta_two():
    # 1 - 0.9**1, 1 - 0.9**3, 1 - 0.9**5
    assert build_weibull(0.9, 2, 3).hazards == pytest.approx((0.1, 0.271, 0.40951), abs=1e-12)


@pytest.mark.parametrize("alpha,beta", [(0.9, 0), (0.9, -1), (0.0, 2), (1.0, 2), (1.5, 1)])
def test_weibull_rejects_bad_parameters(alpha, beta):
    with pytest.raises(InvalidParameter):
        build_weibull(alpha, beta, 4)


def test_from_tail_geometric():
    assert build_from_tail((1, 0.5, 0.25, 0.125), 3).hazards == (0.5, 0.5, 0.5)


def test_from_tail_deterministic_two_slots():
    assert build_from_tail((1, 1, 0), 2).hazards == (0.0, 1.0)


@pytest.mark.parametrize("tail", [(1, 0.9, 0.95), (0.9, 0.5, 0.1), (1, 0, 0)])
def test_from_tail_rejects(tail):
    with pytest.raises(InvalidTail):
        build_from_tail(tail, 2)


def test_model_invariants():
    with pytest.raises(InvalidParameter):
        DelayModel(M=2, hazards=(0.1,))
    with pytest.raises(InvalidParameter):
        DelayModel(M=1, hazards=(1.2,))
    with pytest.raises(InvalidParameter):
        DelayModel(M=0, hazards=())


def test_profiles():
    assert hazard_profile(build_weibull(0.9, 1, 8)) == CONSTANT
    assert hazard_profile(build_weibull(0.9, 0.5, 8)) == NONINCREASING
    assert hazard_profile(build_weibull(0.9, 2, 8)) == INCREASING_SOMEWHERE
    # ties with y_0 still count as nonincreasing
    assert hazard_profile(DelayModel(M=3, hazards=(0.4, 0.4, 0.1))) == NONINCREASING


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_weibull_monotone_direction(beta):
    hz = build_weibull(0.8, beta, 10).hazards
    for a, b in zip(hz, hz[1:]):
        if beta < 1:
            assert b < a
        elif beta > 1:
            assert b > a
        else:
            assert b == pytest.approx(a, abs=1e-15)


@given(st.lists(st.floats(0.0, 0.99), min_size=1, max_size=12))
def test_tail_round_trip(hz):
    model = DelayModel(M=len(hz), hazards=tuple(hz))
    back = build_from_tail(model.tail(), model.M)
    assert back.hazards == pytest.approx(model.hazards, abs=1e-12)


@given(st.floats(1e-6, 1 - 1e-6), st.floats(0.05, 5.0), st.integers(1, 30))
def test_weibull_hazards_are_probabilities(alpha, beta, M):
    assert all(0.0 <= h <= 1.0 for h in build_weibull(alpha, beta, M).hazards)


def test_geometric_builder():
    assert build_geometric(0.25, 3).hazards == (0.25, 0.25, 0.25)
    with pytest.raises(InvalidParameter):
        build_geometric(1.5, 3)
