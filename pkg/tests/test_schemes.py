import numpy as np
import pytest
from hypothesis import given, strategies as st

from misobc.channel import SystemConfig, draw_standard, realize
from misobc.precoding import build_precoders
from misobc.schemes import (
    PowerPartitionConfig, TimePartitionConfig, degraded_ladder, gains_of, pp_instant_rates,
    pp_power_split, pp_rates_from_gains, tp_instant_rates, tp_phase1_power_split,
    tp_rates_from_gains,
)

from tests.reference import rates as reference_rates

unit = st.floats(0, 1)
powers = st.floats(1, 1e8)


def batch(m=2, k=3, alpha=0.5, p=1e3, n=64, seed=0, gain_db=None):
    cfg = SystemConfig(m, k, alpha, gain_db)
    draws = draw_standard(cfg, seed, range(n))
    real = realize(cfg, p, draws)
    return cfg, real, build_precoders(real, draws)


def test_ladder_examples():
    powers_, spans = degraded_ladder(100.0, 0.0, 1)
    np.testing.assert_allclose(powers_, [99.0])
    powers_, spans = degraded_ladder(1e4, 0.5, 2)
    np.testing.assert_allclose(powers_, [9000.0, 900.0])
    assert spans[0][1] == 1.0 and spans[-1][0] == 0.5


@given(powers, unit, st.integers(1, 5))
def test_ladder_telescopes(p, floor, n0):
    pw, spans = degraded_ladder(p, floor, n0)
    assert np.all(pw >= 0)
    assert pw.sum() == pytest.approx(p - p ** floor, rel=1e-9, abs=1e-9)
    widths = [hi - lo for lo, hi in spans]
    np.testing.assert_allclose(widths, (1 - floor) / n0, atol=1e-12)


def test_tp_split_example():
    s = tp_phase1_power_split(1e4, 0.5, 2)
    assert s.p_common == pytest.approx(9900.0)
    np.testing.assert_allclose(s.p_private, [50.0, 50.0])


@given(powers, unit, unit, st.integers(1, 4), st.integers(1, 4))
def test_pp_power_conservation(p, alpha, beta, m, n0):
    s = pp_power_split(p, alpha, beta, m, n0)
    assert s.total <= p * (1 + 1e-9)
    assert np.all(s.p_private >= 0) and s.p_common >= 0 and np.all(s.p_degraded >= 0)
    assert s.p0 == pytest.approx(p - p ** beta, rel=1e-9, abs=1e-9)


@given(powers, unit, unit, st.floats(0, 1))
def test_pp_override_conservation(p, alpha, beta, frac):
    s = pp_power_split(p, alpha, beta, 2, 1, p0_override=frac * p)
    assert s.total <= p * (1 + 1e-9)


def test_pp_override_budget_violation():
    with pytest.raises(ValueError, match="power budget violation"):
        pp_power_split(100.0, 0.5, 0.5, 2, 1, p0_override=101.0)
    with pytest.raises(ValueError, match="power budget violation"):
        pp_power_split(100.0, 0.5, 0.5, 2, 1, p0_override=-1.0)


def test_pp_split_example():
    s = pp_power_split(1e4, 0.5, 0.75, 2, 1)
    # block p**0.75 = 1000: privates p**0.5 / 2, common the rest
    np.testing.assert_allclose(s.p_private, [50.0, 50.0])
    assert s.p_common == pytest.approx(900.0)
    assert s.p_degraded[0] == pytest.approx(9000.0)


def test_pp_common_dropped_below_noise():
    # beta <= alpha: block equals the private power, no common symbol
    s = pp_power_split(1e4, 0.5, 0.5, 2, 1)
    assert s.p_common == 0.0
    np.testing.assert_allclose(s.p_private, [50.0, 50.0])


def test_pp_beta_corners():
    cfg, real, pre = batch(p=1e6)
    r1 = pp_instant_rates(real, PowerPartitionConfig(1.0, 0.5), 1e6, pre)
    assert np.all(r1.degraded == 0)
    r0 = pp_instant_rates(real, PowerPartitionConfig(0.0, 0.5), 1e6, pre)
    assert np.all(r0.common_total == 0)
    # CSIT group runs on unit power: its rate stays bounded
    assert np.mean(r0.total[:, :2]) < 1.0


def test_pp_beta_one_matches_tp_phase_one():
    cfg, real, pre = batch(p=1e5)
    pp = pp_instant_rates(real, PowerPartitionConfig(1.0, 0.5), 1e5, pre)
    tp = tp_instant_rates(real, TimePartitionConfig(1.0, 0.5), 1e5, pre)
    np.testing.assert_allclose(pp.total, tp.total, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("scheme", ["tp", "pp"])
@pytest.mark.parametrize("p", [1.0, 31.6, 1e4])
def test_rates_match_reference_model(scheme, p):
    cfg, real, pre = batch(m=2, k=4, p=p, n=8, gain_db=(0, 0, -10, -3))
    if scheme == "pp":
        rb = pp_instant_rates(real, PowerPartitionConfig(0.6, 0.5), p, pre)
        split = pp_power_split(p, 0.5, 0.6, 2, 2)
        layers = [(split.p_common, split.p_private, split.p_degraded, True, 1.0)]
    else:
        rb = tp_instant_rates(real, TimePartitionConfig(0.4, 0.5), p, pre)
        s1 = tp_phase1_power_split(p, 0.5, 2)
        ladder, _ = degraded_ladder(p, 0.0, 2)
        layers = [(s1.p_common, s1.p_private, np.zeros(2), False, 0.4),
                  (0.0, np.zeros(2), ladder, False, 0.6)]
    for t in range(8):
        h = real.true_channels[t]
        private, common, degraded = np.zeros(2), 0.0, np.zeros(2)
        for pc, ppriv, pdeg, flag, w in layers:
            pr, c, dg = reference_rates(h, pre.common[t], pre.private[t], pre.degraded[t],
                                        pc, ppriv, pdeg, 2, flag)
            private += w * np.array(pr)
            common += w * c
            degraded += w * np.array(dg)
        np.testing.assert_allclose(rb.private[t, :2], private, rtol=1e-10, atol=1e-12)
        assert rb.common_total[t] == pytest.approx(common, rel=1e-10, abs=1e-12)
        np.testing.assert_allclose(rb.degraded[t, 2:], degraded, rtol=1e-10, atol=1e-12)


@given(st.floats(0, 6), unit, unit, st.integers(0, 1000))
def test_breakdown_invariants(snr_log, alpha, beta, seed):
    p = 10 ** snr_log
    cfg, real, pre = batch(alpha=alpha, p=p, n=16, seed=seed)
    rb = pp_instant_rates(real, PowerPartitionConfig(beta, alpha), p, pre)
    # component additivity
    np.testing.assert_array_equal(rb.total, rb.private + rb.common_share + rb.degraded)
    assert np.allclose(rb.common_share.sum(axis=1), rb.common_total)
    # SIC consistency: every decodability margin is non-negative
    assert np.all(rb.margins >= 0)
    # common rate is the minimum over the CSIT group: one margin is zero
    has_common = rb.common_total > 0
    assert np.all(rb.margins[has_common, :2].min(axis=1) == 0)


def test_tp_margins_nonnegative_and_common_tight():
    cfg, real, pre = batch(p=1e4, n=128)
    rb = tp_instant_rates(real, TimePartitionConfig(0.5, 0.5), 1e4, pre)
    assert np.all(rb.margins >= 0)
    assert np.all(rb.margins[:, :2].min(axis=1) == 0)


@pytest.mark.parametrize("scheme", ["tp", "pp"])
def test_rates_nondecreasing_in_power(scheme):
    cfg = SystemConfig(2, 3, 0.5)
    draws = draw_standard(cfg, 3, range(2000))
    prev = None
    for p in np.logspace(0, 6, 13):
        real = realize(cfg, p, draws)
        g = gains_of(real, build_precoders(real, draws))
        if scheme == "tp":
            rb = tp_rates_from_gains(g, TimePartitionConfig(0.5, 0.5), p, 2)
        else:
            rb = pp_rates_from_gains(g, PowerPartitionConfig(0.5, 0.5), p, 2)
        mean = rb.total.mean(axis=0)
        if prev is not None:
            assert np.all(mean >= prev - 1e-9)
        prev = mean


def test_common_weights():
    cfg, real, pre = batch(p=1e4, n=4)
    rb = tp_instant_rates(real, TimePartitionConfig(1.0, 0.5), 1e4, pre, weights=[1.0, 0.0])
    np.testing.assert_array_equal(rb.common_share[:, 1], 0)
    with pytest.raises(ValueError):
        tp_instant_rates(real, TimePartitionConfig(1.0, 0.5), 1e4, pre, weights=[0.7, 0.7])


def test_single_realisation_shapes():
    cfg, real, pre = batch(n=1)
    single = type(real)(real.true_channels[0], real.estimates[0], real.errors[0],
                        real.error_variances)
    pre1 = type(pre)(pre.common[0], pre.private[0], pre.degraded[0])
    rb = pp_instant_rates(single, PowerPartitionConfig(0.5, 0.5), 1e3, pre1)
    assert rb.total.shape == (3,)


@pytest.mark.parametrize("bad", [-0.1, 1.1])
def test_partition_config_validation(bad):
    with pytest.raises(ValueError):
        TimePartitionConfig(bad, 0.5)
    with pytest.raises(ValueError):
        PowerPartitionConfig(bad, 0.5)


def test_a_exponent():
    assert PowerPartitionConfig(0.3, 0.5).a_exponent == 0.3
    assert PowerPartitionConfig(0.8, 0.5).a_exponent == 0.5


def test_power_below_one_rejected():
    with pytest.raises(ValueError):
        tp_phase1_power_split(0.5, 0.5, 2)
