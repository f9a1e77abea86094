import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import welch_oracle
from reviewgen.analysis.stats import regularized_incomplete_beta, t_two_sided_p, welch_t_test


def test_identical_samples():
    r = welch_t_test([1.0, 2.0, 4.0], [1.0, 2.0, 4.0])
    assert r.t_statistic == 0.0 and r.p_value == 1.0


def test_worked_example():
    r = welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
    assert r.t_statistic == pytest.approx(-1.0)
    assert r.degrees_of_freedom == pytest.approx(8.0)
    assert r.p_value == pytest.approx(0.34659350708733425, abs=1e-12)


def test_well_separated():
    r = welch_t_test([10.0, 10.01, 9.99, 10.02], [0.0, 0.01, -0.01, 0.02])
    assert r.p_value < 1e-6 and r.t_statistic > 0


def test_too_small():
    with pytest.raises(ValueError):
        welch_t_test([1.0], [1.0, 2.0])


def test_degenerate_equal_means():
    r = welch_t_test([3.0, 3.0], [3.0, 3.0, 3.0])
    assert r.p_value == 1.0


def test_degenerate_different_means():
    r = welch_t_test([3.0, 3.0], [1.0, 1.0])
    assert r.p_value == 0.0 and r.t_statistic == math.inf


def test_incomplete_beta_edges():
    assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
    # I_x(1, 1) = x
    assert regularized_incomplete_beta(1.0, 1.0, 0.3) == pytest.approx(0.3, abs=1e-14)


def test_matches_oracle_on_random_pairs():
    rng = random.Random(7)
    for _ in range(10):
        a = [rng.gauss(0, rng.uniform(0.5, 3)) for _ in range(rng.randint(2, 30))]
        b = [rng.gauss(rng.uniform(-2, 2), rng.uniform(0.5, 3)) for _ in range(rng.randint(2, 30))]
        r = welch_t_test(a, b)
        t, df, p = welch_oracle(a, b)
        assert abs(r.t_statistic - t) < 1e-9 and abs(r.degrees_of_freedom - df) < 1e-9
        assert abs(r.p_value - p) < 1e-9


def test_matches_scipy():
    scipy_stats = pytest.importorskip("scipy.stats")
    rng = random.Random(11)
    for _ in range(50):
        a = [rng.uniform(0, 10) for _ in range(rng.randint(2, 40))]
        b = [rng.uniform(0, 12) for _ in range(rng.randint(2, 40))]
        ref = scipy_stats.ttest_ind(a, b, equal_var=False)
        assert welch_t_test(a, b).p_value == pytest.approx(ref.pvalue, abs=1e-9)


samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=20).filter(
    lambda xs: max(xs) - min(xs) > 1e-3)


@settings(max_examples=200)
@given(samples, samples)
def test_symmetric_up_to_sign(a, b):
    r, s = welch_t_test(a, b), welch_t_test(b, a)
    assert r.t_statistic == pytest.approx(-s.t_statistic)
    assert r.degrees_of_freedom == pytest.approx(s.degrees_of_freedom)
    assert r.p_value == pytest.approx(s.p_value, abs=1e-12)


@given(st.floats(1.0, 200.0), st.floats(0.0, 20.0), st.floats(0.0, 20.0))
def test_p_monotone_in_abs_t(df, t1, t2):
    lo, hi = sorted((t1, t2))
    assert t_two_sided_p(hi, df) <= t_two_sided_p(lo, df) + 1e-15
    assert t_two_sided_p(-hi, df) == t_two_sided_p(hi, df)
