import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from condcov.estimator import (
    B_FLOOR,
    CondCovEstimate,
    Sample,
    band,
    center,
    density_denominator,
    estimate_entry,
    estimate_matrix,
    frobenius_risk,
    select_b,
    select_m,
    split,
    truncate_density,
)
from condcov.kernels import epanechnikov, kde, make_kernel, plan_bandwidths
from condcov.models import ScenarioConfig, gen_linear

from .naive import epan, naive_sigma_entry


def _linear_split(n, p, seed):
    s = gen_linear(ScenarioConfig("linear", n, p, 0.5, seed=seed))
    return split(center(s), seed + 1)


# -- sample / center / split --------------------------------------------------

def test_sample_validation():
    with pytest.raises(ValueError):
        Sample(np.zeros((3, 2)), np.zeros(3))
    with pytest.raises(ValueError):
        Sample(np.zeros((5, 2)), np.zeros(4))
    x = np.zeros((5, 2))
    x[0, 0] = np.nan
    with pytest.raises(ValueError):
        Sample(x, np.zeros(5))


def test_center_simple_column():
    s = center(Sample(np.array([[1.0], [2.0], [3.0], [2.0]]), np.arange(4.0)))
    np.testing.assert_allclose(s.x[:, 0], [-1, 0, 1, 0], atol=1e-15)
    np.testing.assert_array_equal(s.y, np.arange(4.0))


def test_center_idempotent_and_means_zero():
    rng = np.random.default_rng(0)
    s = center(Sample(rng.normal(3, 2, (100, 7)), rng.standard_normal(100)))
    assert np.all(np.abs(s.x.mean(axis=0)) < 1e-12)
    np.testing.assert_allclose(center(s).x, s.x, atol=1e-12)


def test_split_partition_and_determinism():
    x = np.arange(12.0).reshape(6, 2)
    s = Sample(x, np.arange(6.0))
    a, b = split(s, 7), split(s, 7)
    assert a.s1.n == a.s2.n == 3
    rows = sorted(a.s1.y.tolist() + a.s2.y.tolist())
    assert rows == list(range(6))
    np.testing.assert_array_equal(a.s1.y, b.s1.y)
    np.testing.assert_array_equal(a.s2.x, b.s2.x)


def test_split_drops_odd_row():
    s = Sample(np.arange(14.0).reshape(7, 2), np.arange(7.0))
    sp = split(s, 3)
    assert sp.dropped == 1
    assert sorted(sp.s1.y.tolist() + sp.s2.y.tolist()) == list(range(6))


@settings(max_examples=30)
@given(st.integers(4, 60), st.integers(0, 2**31))
def test_split_property(n, seed):
    s = Sample(np.zeros((n, 1)), np.arange(float(n)))
    sp = split(s, seed)
    assert sp.s1.n == sp.s2.n == n // 2
    both = np.concatenate([sp.s1.y, sp.s2.y])
    assert len(set(both.tolist())) == both.size
    again = split(s, seed)
    np.testing.assert_array_equal(sp.s1.y, again.s1.y)


# -- truncation and b ------------------------------------------------------------

def test_truncate_density_examples():
    assert truncate_density([0.001], 0.01)[0] == 0.01
    assert truncate_density([0.5], 0.01)[0] == 0.5
    assert truncate_density([0.01], 0.01)[0] == 0.01
    with pytest.raises(ValueError):
        truncate_density([0.5], 0.0)


@given(arrays(float, st.integers(1, 40), elements=st.floats(-1, 5)), st.floats(1e-6, 2.0))
def test_truncation_floor(f, b):
    out = truncate_density(f, b)
    assert np.all(out >= b)
    np.testing.assert_array_equal(out, np.maximum(f, b))


def test_select_b_examples():
    assert select_b([1, 1, 1, 1]) == 1.0
    # position 0.25 * 3 = 0.75 between the first two sorted values
    assert select_b([0, 1, 2, 3]) == pytest.approx(0.75)
    assert select_b([0.0, 0.0, 0.0, 5.0, 6.0]) >= B_FLOOR
    with pytest.raises(ValueError):
        select_b([])


# -- entry and matrix ------------------------------------------------------------

def test_zero_column_gives_zero_entries():
    sp = _linear_split(40, 3, 1)
    sp.s1.x[:, 1] = 0.0
    plan = plan_bandwidths(40)
    for j in range(3):
        assert estimate_entry(1, j, sp, plan) == 0.0


def test_constant_column_centered_to_zero():
    rng = np.random.default_rng(2)
    x = np.column_stack([np.full(30, 4.0), rng.standard_normal(30)])
    sp = split(center(Sample(x, rng.standard_normal(30))), 0)
    assert estimate_entry(0, 0, sp, plan_bandwidths(30)) == pytest.approx(0.0, abs=1e-25)


def test_entry_matches_naive_oracle():
    sp = _linear_split(50, 2, 11)
    plan = plan_bandwidths(50)
    x1 = sp.s1.x.tolist()
    for i, j in [(0, 0), (0, 1), (1, 1)]:
        expected = naive_sigma_entry(i, j, x1, sp.s1.y.tolist(), sp.s2.y.tolist(),
                                     plan.h1, plan.h2, epan)
        got = estimate_entry(i, j, sp, plan)
        assert got == pytest.approx(expected, rel=1e-10, abs=1e-14)


def test_entry_symmetric_in_indices():
    sp = _linear_split(50, 3, 4)
    plan = plan_bandwidths(50)
    assert estimate_entry(0, 2, sp, plan) == estimate_entry(2, 0, sp, plan)


def test_entry_index_errors():
    sp = _linear_split(20, 2, 0)
    with pytest.raises(IndexError):
        estimate_entry(0, 2, sp, plan_bandwidths(20))
    with pytest.raises(ValueError):
        estimate_entry(0, 0, sp, plan_bandwidths(40))


def test_matrix_p1_equals_entry():
    sp = _linear_split(40, 1, 9)
    plan = plan_bandwidths(40)
    est = estimate_matrix(sp, plan)
    assert est.sigma.shape == (1, 1)
    assert est.sigma[0, 0] == pytest.approx(estimate_entry(0, 0, sp, plan), rel=1e-14)


def test_matrix_matches_looped_entries():
    sp = _linear_split(50, 3, 21)
    plan = plan_bandwidths(50)
    est = estimate_matrix(sp, plan)
    assert not est.banded and est.m == 3
    for i in range(3):
        for j in range(3):
            assert est.sigma[i, j] == pytest.approx(estimate_entry(i, j, sp, plan), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("kernel", [epanechnikov(), make_kernel(2)], ids=["epan", "order2"])
def test_matrix_matches_naive_with_other_kernels(kernel):
    sp = _linear_split(30, 2, 8)
    plan = plan_bandwidths(30)
    est = estimate_matrix(sp, plan, kernel)
    expected = naive_sigma_entry(0, 1, sp.s1.x.tolist(), sp.s1.y.tolist(), sp.s2.y.tolist(),
                                 plan.h1, plan.h2, kernel)
    assert est.sigma[0, 1] == pytest.approx(expected, rel=1e-10)


def test_schedule_b_and_no_truncation():
    sp = _linear_split(40, 2, 3)
    plan = plan_bandwidths(40)
    fb, b = density_denominator(sp, plan, epanechnikov(), quantile_b=False)
    assert b == pytest.approx(plan.b)
    assert np.all(fb >= plan.b)
    _, b0 = density_denominator(sp, plan, epanechnikov(), truncate=False)
    assert b0 == B_FLOOR
    est = estimate_matrix(sp, plan, quantile_b=False)
    expected = naive_sigma_entry(1, 1, sp.s1.x.tolist(), sp.s1.y.tolist(), sp.s2.y.tolist(),
                                 plan.h1, plan.h2, epan, b=plan.b)
    assert est.sigma[1, 1] == pytest.approx(expected, rel=1e-10)
    assert est.meta["b"] == est.plan.b == pytest.approx(plan.b)


def test_denominator_never_below_selected_floor():
    sp = _linear_split(80, 2, 5)
    plan = plan_bandwidths(80)
    fb, b = density_denominator(sp, plan, epanechnikov())
    f = kde(sp.s2.y, sp.s1.y, plan.h2, epanechnikov())
    assert b == select_b(f)
    assert np.all(fb >= b)


def test_constant_y_is_finite():
    rng = np.random.default_rng(0)
    sp = split(center(Sample(rng.standard_normal((20, 2)), np.ones(20))), 1)
    est = estimate_matrix(sp, plan_bandwidths(20))
    assert np.all(np.isfinite(est.sigma))


@settings(max_examples=25, deadline=None)
@given(st.integers(8, 60), st.integers(1, 6), st.integers(0, 10**6))
def test_matrix_exactly_symmetric(n, p, seed):
    rng = np.random.default_rng(seed)
    sp = split(center(Sample(rng.standard_normal((n, p)), rng.standard_normal(n))), seed)
    est = estimate_matrix(sp, plan_bandwidths(n))
    np.testing.assert_array_equal(est.sigma, est.sigma.T)


# -- select_m -------------------------------------------------------------------------

def test_select_m_examples():
    assert select_m(250, 0.5, 100, 2.0) == 6
    assert select_m(250, 0.5, 4, 2.0) == 4
    assert select_m(250, 0.05, 100, 2.0) == 13


def test_select_m_rough_branch():
    rate = np.log(250) ** 2 / 250
    cand = rate ** (-2 * 1.0 / (2 * 1.5 * 3.0))
    assert select_m(250, 0.5, 100, 1.0) == int(np.floor(cand))
    assert select_m(250, 0.5, 1, 1.0) == 1


@pytest.mark.parametrize("args", [(1, 0.5, 10), (100, 0.0, 10), (100, 0.5, 0)])
def test_select_m_errors(args):
    with pytest.raises(ValueError):
        select_m(*args)


# -- band --------------------------------------------------------------------------------

def _est(mat):
    plan = plan_bandwidths(100)
    return CondCovEstimate(np.asarray(mat, dtype=float), m=len(mat), plan=plan)


def test_band_examples():
    e = _est(np.ones((3, 3)))
    out = band(e, 1).sigma
    expected = np.ones((3, 3))
    expected[0, 2] = expected[2, 0] = 0
    np.testing.assert_array_equal(out, expected)
    np.testing.assert_array_equal(band(e, 2).sigma, e.sigma)
    np.testing.assert_array_equal(band(e, 3).sigma, e.sigma)
    np.testing.assert_array_equal(band(e, 0).sigma, np.eye(3))
    assert band(e, 1).banded and band(e, 1).m == 1
    with pytest.raises(ValueError):
        band(e, 4)
    with pytest.raises(ValueError):
        band(e, -1)


@st.composite
def sym_and_widths(draw):
    p = draw(st.integers(1, 8))
    a = draw(arrays(float, (p, p), elements=st.floats(-10, 10)))
    m = draw(st.integers(0, p))
    m2 = draw(st.integers(m, p))
    return a + a.T, m, m2


@given(sym_and_widths())
def test_band_projection_properties(case):
    a, m, m2 = case
    e = _est(a)
    once = band(e, m)
    np.testing.assert_array_equal(band(once, m).sigma, once.sigma)
    np.testing.assert_array_equal(band(band(e, m2), m).sigma, once.sigma)
    np.testing.assert_array_equal(once.sigma, once.sigma.T)
    i, j = np.indices(a.shape)
    assert np.all(once.sigma[np.abs(i - j) > m] == 0)


# -- frobenius ---------------------------------------------------------------------------

def test_frobenius_examples():
    a = np.arange(4.0).reshape(2, 2)
    assert frobenius_risk(a, a) == 0.0
    assert frobenius_risk(a + 1, a) == pytest.approx(2.0)
    rng = np.random.default_rng(3)
    x, y = rng.standard_normal((5, 5)), rng.standard_normal((5, 5))
    loop = sum((x[i, j] - y[i, j]) ** 2 for i in range(5) for j in range(5)) / 5
    assert frobenius_risk(x, y) == pytest.approx(loop, rel=1e-12)
    with pytest.raises(ValueError):
        frobenius_risk(np.eye(2), np.eye(3))
