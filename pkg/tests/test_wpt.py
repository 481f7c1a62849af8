import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from backscatter_wpt.config import HarvesterModel, SystemParams, derive
from backscatter_wpt.correlator import MuNu, correlate_closed_form, offset_scale
from backscatter_wpt.stochastics import sample_complex_gaussian
from backscatter_wpt.training import TrainingSequence, gen_balanced
from backscatter_wpt.validation import check_reductions, random_instance
from backscatter_wpt.wpt import (
    SCENARIOS,
    DegenerateInputError,
    harvest,
    incident_power_asymptotic,
    incident_power_exact,
    retro_beam,
)


def expanded_quotient(a, b, f, h, n, gamma2, pt):
    """|sqrt(g2) f^T x_t|^2 with every cross term written out element by element."""
    ff = sum(abs(x) ** 2 for x in f)
    hh = sum(abs(x) ** 2 for x in h)
    nn = sum(abs(x) ** 2 for x in n)
    fh = sum(x * y.conjugate() for x, y in zip(f, h))  # f^T conj(h)
    fn = sum(x * y.conjugate() for x, y in zip(f, n))
    hn = sum(x * y.conjugate() for x, y in zip(h, n))
    num = abs(a.conjugate() * ff + b.conjugate() * fh + fn) ** 2
    den = (
        abs(a) ** 2 * ff
        + abs(b) ** 2 * hh
        + nn
        + 2 * (a * b.conjugate() * fh).real
        + 2 * (a * fn).real
        + 2 * (b * hn).real
    )
    return gamma2 * pt * num / den


def test_retro_beam_power_and_direction(rng):
    x = sample_complex_gaussian(32, rng)
    beam = retro_beam(x, pt=2.0).x_t
    assert np.linalg.norm(beam) ** 2 == pytest.approx(2.0, rel=1e-12)
    np.testing.assert_allclose(beam * np.linalg.norm(x) / math.sqrt(2.0), np.conj(x), rtol=1e-12)


def test_retro_beam_rejects_zero():
    with pytest.raises(DegenerateInputError):
        retro_beam(np.zeros(4, complex), 1.0)


def test_exact_power_matches_expanded_quotient(rng):
    for _ in range(50):
        params, ch, frame = random_instance(rng, ns=2, nc=8, m=16)
        params = params.replace(pt=float(rng.uniform(0.5, 2)))
        seq = TrainingSequence(1 - 2 * rng.integers(0, 2, 8), params.tc, "pn")
        d = derive(params)
        noise = sample_complex_gaussian(16, rng, variance=1e-8)
        out = correlate_closed_form(params, ch, frame, seq, n_tilde=noise)
        a = out.x_s[0] / ch.f[0]
        b = out.x_i[0] / ch.h[0]
        want = expanded_quotient(complex(a), complex(b), ch.f, ch.h, noise, d.gamma2, params.pt)
        assert incident_power_exact(out, ch, params, d) == pytest.approx(want, rel=1e-9)


def test_exact_power_pure_signal_is_full_array_gain(rng):
    params, ch, frame = random_instance(rng, ns=2, nc=4, m=64)
    out = correlate_closed_form(params, ch, frame, gen_balanced(2, 2, params.tc))
    d = derive(params)
    expected = d.gamma2 * params.pt * np.sum(np.abs(ch.f) ** 2)
    assert incident_power_exact(out, ch, params, d) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    scenario=st.sampled_from(SCENARIOS),
    mu=st.floats(0, 100),
    nu=st.floats(0, 100),
    g2=st.floats(0, 20),
    t_off=st.floats(0, 2.5e-6),
    sigma_i2=st.floats(0, 1e-16),
    m=st.integers(1, 1000),
)
def test_asymptotic_power_within_array_bounds(scenario, mu, nu, g2, t_off, sigma_i2, m):
    params = SystemParams(ns=10, nc=20, tc=2.5e-6, m=m)
    if scenario == "offset":
        params = params.replace(t_off=t_off)
    if scenario == "interference":
        params = params.replace(sigma_i2=sigma_i2)
    d = derive(params)
    q = incident_power_asymptotic(scenario, MuNu(mu, nu), g2, params, d)
    lo, hi = d.gamma2 * params.pt, d.gamma2 * params.pt * (m + 1 / params.m_f)
    assert lo * (1 - 1e-12) <= q <= hi * (1 + 1e-12)


def test_offset_literal_form_scales_numerator_only():
    params = SystemParams(ns=10, nc=20, tc=2.5e-6, t_off=0.5e-6)
    d = derive(params)
    mn = MuNu(10.0, 0.0)
    k2 = offset_scale(params.t_off, params.tc) ** 2
    sig = d.gamma1 * d.gamma2 * mn.mu
    noise = params.sigma_n2 * params.ns / (params.ts * params.ps)
    gain = params.m + 1 / params.m_f
    literal = incident_power_asymptotic("offset", mn, 1.0, params, d, literal_offset=True)
    assert literal == pytest.approx(d.gamma2 * (k2 * sig * gain + noise) / (sig + noise), rel=1e-12)
    default = incident_power_asymptotic("offset", mn, 1.0, params, d)
    assert default == pytest.approx(d.gamma2 * (k2 * sig * gain + noise) / (k2 * sig + noise), rel=1e-12)


def test_pn_branches_differ_by_chip_ratio():
    params = SystemParams(ns=10, nc=100)
    d = derive(params)
    mn = MuNu(5.0, 3.0)
    le = incident_power_asymptotic("pn_le", mn, 1.0, params, d)
    ge = incident_power_asymptotic("pn_ge", MuNu(5.0, 3.0 * (10 / 100) ** 2), 1.0, params, d)
    assert le == pytest.approx(ge, rel=1e-12)


def test_unknown_scenario():
    with pytest.raises(ValueError):
        incident_power_asymptotic("nope", MuNu(1, 1), 1.0, SystemParams(ns=1, nc=10))


def test_algebraic_reductions():
    result = check_reductions(np.random.default_rng(4), instances=100)
    assert result.passed, result.detail


def harvest_oracle(x, model):
    mpmath.mp.dps = 40
    sig = lambda v: 1 / (1 + mpmath.exp(-v))  # noqa: E731
    a0, b0, c0 = (mpmath.mpf(v) for v in (model.a0, model.b0, model.c0))
    return float(c0 * (1 - sig(a0 * (b0 - mpmath.mpf(x))) / sig(a0 * b0)))


def test_harvester_anchors():
    model = HarvesterModel()
    assert harvest(0.0, model) == 0.0
    assert harvest(model.b0, model) * 1e3 == pytest.approx(11.5574019912, abs=1e-6)
    assert harvest_oracle(model.b0, model) * 1e3 == pytest.approx(11.5574019912, abs=1e-9)


@given(x=st.floats(0, 0.05))
def test_harvester_matches_high_precision(x):
    model = HarvesterModel()
    assert harvest(x, model) == pytest.approx(harvest_oracle(x, model), rel=1e-12, abs=1e-18)


@given(xs=st.lists(st.floats(0, 0.02), min_size=2, max_size=50))
def test_harvester_monotone_and_saturating(xs):
    model = HarvesterModel()
    x = np.sort(np.array(xs))
    q = harvest(x, model)
    assert np.all(np.diff(q) >= 0)
    assert np.all((q >= 0) & (q < model.c0))


@given(x=st.floats(0, 1e6))
def test_harvester_never_exceeds_ceiling(x):
    assert 0.0 <= harvest(x, HarvesterModel()) <= HarvesterModel().c0


def test_harvester_scalar_and_array_agree():
    model = HarvesterModel()
    x = np.array([0.0, 1e-4, 2.2e-3, 1e-2])
    np.testing.assert_array_equal(harvest(x, model), [harvest(float(v), model) for v in x])


def test_harvester_rejects_negative():
    with pytest.raises(ValueError):
        harvest(-1e-9, HarvesterModel())
