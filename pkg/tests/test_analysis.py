import math
from fractions import Fraction

import numpy as np
import pytest

from aoipreempt import (
    EvaluationScenario,
    average_aoi,
    build_geometric,
    build_weibull,
    cycle_offsets,
    make_named_policy,
    make_policy,
    moments_tau,
    moments_tau_truncated,
    reset_matrix,
    tail_tau,
)
from aoipreempt.amc import build_region_matrices, start_vector
from aoipreempt.delay import DelayModel
from aoipreempt.errors import GammaOutOfRange, NonAbsorbing
from aoipreempt.numerics import fundamental_apply
from oracles import enumerate_tail, first_passage_exact, renewal_average


def random_scenario(rng, M, N, max_threshold=None):
    max_threshold = max_threshold or 3 * M
    inner = sorted(rng.choice(np.arange(1, max_threshold + 1), size=N - 1, replace=False))
    thresholds = (0,) + tuple(int(t) for t in inner) + (None,)
    table = rng.random((N, M + 1))
    hazards = rng.uniform(0.05, 0.95, size=M)
    q = rng.uniform(0.1, 1.0)
    model = DelayModel(M=M, hazards=tuple(hazards))
    return EvaluationScenario(model, make_policy(thresholds, table, M), float(q))


def y0_one(q=1.0, M=3):
    return EvaluationScenario(DelayModel(M=M, hazards=(1.0,) * M),
                              make_named_policy("AP", M=M), q)


# --- cycle offsets ---------------------------------------------------------

def test_offsets_examples():
    pol = make_policy((0, 5, None), [(1,) * 9] * 2, 8)
    off = cycle_offsets(pol, 2)
    assert off.shifted_thresholds == (0, 3, math.inf) and off.gaps[:2] == (0, 3)
    off = cycle_offsets(pol, 7)
    assert off.shifted_thresholds == (0, 0, math.inf) and off.gaps[:2] == (0, 0)
    single = make_named_policy("AP", M=8)
    assert cycle_offsets(single, 1).shifted_thresholds == (0, math.inf)


def test_offsets_gamma_range():
    with pytest.raises(GammaOutOfRange):
        cycle_offsets(make_named_policy("AP", M=3), 4)
    with pytest.raises(GammaOutOfRange):
        cycle_offsets(make_named_policy("AP", M=3), 0)


# --- tail ------------------------------------------------------------------

def test_tail_examples(geometric_ap, no_preempt):
    assert tail_tau(geometric_ap, 1, 0) == 1.0
    for n in range(8):
        assert tail_tau(geometric_ap, 1, n) == pytest.approx(0.5 ** n, abs=1e-15)
    expected = {1: 0.5, 2: 0.25, 3: 0.25, 4: 0.125}
    for n, v in expected.items():
        assert tail_tau(no_preempt, 1, n) == pytest.approx(v, abs=1e-15)


def test_tail_nonincreasing_and_vanishing():
    rng = np.random.default_rng(11)
    for _ in range(5):
        sc = random_scenario(rng, 4, 3)
        for g in range(1, 5):
            vals = [tail_tau(sc, g, n) for n in range(0, 60)]
            assert vals[0] == 1.0
            assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))
            assert tail_tau(sc, g, 2000) < 1e-9


def test_tail_matches_path_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(4):
        M, N = int(rng.integers(2, 4)), int(rng.integers(1, 4))
        sc = random_scenario(rng, M, N, max_threshold=8)
        pol = sc.policy
        for g in range(1, M + 1):
            oracle = enumerate_tail(sc.model.hazards, sc.q, pol.thresholds, pol.prob_table, g, 10)
            for n, v in enumerate(oracle):
                assert tail_tau(sc, g, n) == pytest.approx(v, abs=1e-12)


def test_nonabsorbing_propagates():
    sc = EvaluationScenario(build_geometric(0.5, 2), make_named_policy("AP", M=2), 0.0)
    for fn in (lambda: tail_tau(sc, 1, 3), lambda: moments_tau(sc, 1),
               lambda: reset_matrix(sc), lambda: average_aoi(sc)):
        with pytest.raises(NonAbsorbing):
            fn()


# --- moments ---------------------------------------------------------------

def test_moment_examples(geometric_ap, no_preempt):
    assert moments_tau(geometric_ap, 1) == pytest.approx((2.0, 6.0), abs=1e-12)
    assert moments_tau(no_preempt, 1) == pytest.approx((7 / 3, 29 / 3), abs=1e-12)
    assert moments_tau(y0_one(), 2) == pytest.approx((1.0, 1.0), abs=1e-15)


def test_truncated_examples(geometric_ap, no_preempt):
    assert moments_tau_truncated(geometric_ap, 1) == pytest.approx((2, 6), abs=1e-10)
    assert moments_tau_truncated(no_preempt, 2) == pytest.approx((7 / 3, 29 / 3), abs=1e-10)
    assert moments_tau_truncated(y0_one(), 1) == pytest.approx((1, 1), abs=1e-15)


@pytest.mark.parametrize("seed", range(6))
def test_closed_form_matches_truncated(seed):
    rng = np.random.default_rng(100 + seed)
    sc = random_scenario(rng, int(rng.integers(1, 9)), int(rng.integers(1, 4)))
    for g in range(1, sc.M + 1):
        exact = moments_tau(sc, g)
        approx = moments_tau_truncated(sc, g, tol=1e-12)
        assert exact == pytest.approx(approx, abs=1e-8)


def test_single_region_fundamental_identity():
    rng = np.random.default_rng(8)
    for _ in range(5):
        sc = random_scenario(rng, 5, 1)
        S = build_region_matrices(sc, 1).S
        direct = start_vector(5) @ fundamental_apply(S, np.ones(6))
        for g in range(1, 6):
            assert moments_tau(sc, g)[0] == pytest.approx(direct, abs=1e-10)


def test_exact_rational_moments():
    hz = [Fraction(1, 3), Fraction(1, 2), Fraction(1, 5)]
    row = [Fraction(4, 5), Fraction(1, 4), Fraction(1, 2), Fraction(1)]
    q = Fraction(3, 5)
    m1, m2, absorb = first_passage_exact(hz, q, row)
    sc = EvaluationScenario(DelayModel(M=3, hazards=tuple(map(float, hz))),
                            make_policy((0, None), [list(map(float, row))], 3), float(q))
    assert moments_tau(sc, 2) == pytest.approx((float(m1), float(m2)), abs=1e-11)
    rep = average_aoi(sc)
    np.testing.assert_allclose(rep.B[0], [float(a) for a in absorb], atol=1e-12)
    expected = renewal_average([Fraction(a) for a in rep.pi], [m1] * 3, [m2] * 3)
    assert rep.delta_bar == pytest.approx(float(expected), abs=1e-11)


# --- reset chain and average AoI --------------------------------------------

def test_reset_examples(geometric_ap, no_preempt):
    rd = reset_matrix(y0_one(q=0.7))
    np.testing.assert_allclose(rd.B[:, 0], 1.0, atol=1e-15)
    np.testing.assert_allclose(rd.pi, [1, 0, 0], atol=1e-15)
    rd = reset_matrix(no_preempt)
    np.testing.assert_allclose(rd.B, [[2 / 3, 1 / 3]] * 2, atol=1e-12)
    np.testing.assert_allclose(rd.pi, [2 / 3, 1 / 3], atol=1e-12)
    np.testing.assert_allclose(reset_matrix(geometric_ap).pi, [1, 0], atol=1e-15)


def test_average_examples(geometric_ap, no_preempt):
    assert average_aoi(y0_one()).delta_bar == pytest.approx(1.0, abs=1e-15)
    assert average_aoi(geometric_ap).delta_bar == pytest.approx(2.0, abs=1e-12)
    assert average_aoi(no_preempt).delta_bar == pytest.approx(61 / 21, abs=1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_report_invariants(seed):
    rng = np.random.default_rng(200 + seed)
    sc = random_scenario(rng, int(rng.integers(1, 9)), int(rng.integers(1, 4)))
    rep = average_aoi(sc)
    assert np.abs(rep.B.sum(axis=1) - 1).max() <= 1e-10
    assert np.abs(rep.pi @ rep.B - rep.pi).max() <= 1e-10
    assert rep.pi.sum() == pytest.approx(1.0, abs=1e-12)
    assert rep.delta_bar >= 1.0
    assert (rep.m1 >= 1.0 - 1e-12).all()
    assert (rep.m2 >= rep.m1 ** 2 - 1e-9).all()


def test_zero_first_hazard_leaves_unreachable_reset_ages():
    # y_0 = 0: nothing is ever delivered at age 1
    model = DelayModel(M=3, hazards=(0.0, 0.6, 0.5))
    sc = EvaluationScenario(model, make_named_policy("PP", {"p": 0.3}, 3), 0.8)
    rep = average_aoi(sc)
    assert rep.pi[0] == 0.0
    assert rep.delta_bar >= 2.0


def test_unreachable_region_is_irrelevant():
    model = build_geometric(0.5, 2)
    base = make_named_policy("AP", M=2)
    far = make_policy((0, 400, None), [(1, 1, 1), (1, 0, 0)], 2)
    a = average_aoi(EvaluationScenario(model, base, 1.0)).delta_bar
    b = average_aoi(EvaluationScenario(model, far, 1.0)).delta_bar
    assert tail_tau(EvaluationScenario(model, far, 1.0), 1, 398) < 1e-15
    assert abs(a - b) < 1e-9


def test_weibull_psp_reference_agrees_with_truncated_sums():
    model = build_weibull(0.9, 2, 8)
    pol = make_named_policy("PSP", dict(p1=0, p2=1, p3=0, p4=1, split1=2, split2=5,
                                        threshold=8), 8)
    sc = EvaluationScenario(model, pol, 0.35)
    rep = average_aoi(sc)
    for g in range(1, 9):
        assert (rep.m1[g - 1], rep.m2[g - 1]) == pytest.approx(moments_tau_truncated(sc, g),
                                                               abs=1e-8)
