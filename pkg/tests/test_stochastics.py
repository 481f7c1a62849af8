import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from backscatter_wpt.config import ConfigError, SystemParams
from backscatter_wpt.stochastics import (
    LABELS,
    StreamPool,
    TrialSeed,
    sample_ambient,
    sample_channels,
    sample_complex_gaussian,
    sample_nakagami_vector,
    sample_post_correlator_noise,
)


def test_complex_gaussian_moments(rng):
    z = sample_complex_gaussian(200_000, rng, variance=3.0)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(3.0, rel=0.01)
    assert abs(np.mean(z)) < 0.02
    assert abs(np.mean(z**2)) < 0.03  # circular: no pseudo-covariance


def test_rayleigh_special_case_passes_ks(rng):
    amp = np.abs(sample_nakagami_vector(1.0, 20_000, rng))
    assert stats.kstest(amp, stats.rayleigh(scale=np.sqrt(0.5)).cdf).pvalue > 0.01


@pytest.mark.parametrize("m", [0.5, 1.0, 2.5, 10.0])
def test_nakagami_amplitude_distribution(m, rng):
    amp = np.abs(sample_nakagami_vector(m, 20_000, rng))
    assert stats.kstest(amp, stats.nakagami(m).cdf).pvalue > 0.01
    assert np.mean(amp**2) == pytest.approx(1.0, rel=0.03)


def test_nakagami_phase_uniform(rng):
    phase = np.angle(sample_nakagami_vector(3.0, 20_000, rng))
    assert stats.kstest(phase, stats.uniform(-np.pi, 2 * np.pi).cdf).pvalue > 0.01


def test_nakagami_rejects_low_order(rng):
    with pytest.raises(ConfigError):
        sample_nakagami_vector(0.4, 4, rng)


@pytest.mark.parametrize("m_f", [1.0, 10.0])
def test_fourth_moment_of_channel_norm(m_f, rng):
    m = 500
    norms = np.array([np.sum(np.abs(sample_nakagami_vector(m_f, m, rng)) ** 2) for _ in range(2000)])
    assert np.mean(norms**2) / m == pytest.approx(m + 1 / m_f, rel=0.01)


def test_same_trial_same_draws():
    a = TrialSeed(7, 123).stream("noise").standard_normal(5)
    b = TrialSeed(7, 123).stream("noise").standard_normal(5)
    assert np.array_equal(a, b)


def test_labels_and_trials_give_distinct_streams():
    seen = set()
    for t in range(20):
        for label in LABELS:
            seen.add(TrialSeed(3, t).stream(label).integers(0, 2**63))
    assert len(seen) == 20 * len(LABELS)


def test_substreams_uncorrelated():
    x = np.array([TrialSeed(0, t).stream("channel_f").standard_normal() for t in range(5000)])
    y = np.array([TrialSeed(0, t).stream("channel_h").standard_normal() for t in range(5000)])
    assert abs(np.corrcoef(x, y)[0, 1]) < 0.05


@settings(max_examples=30, deadline=None)
@given(master=st.integers(0, 2**64 - 1), trial=st.integers(0, 2**40), label=st.sampled_from(LABELS))
def test_pooled_stream_equals_fresh_stream(master, trial, label):
    seed = TrialSeed(master, trial)
    pool = StreamPool()
    pool.bind(label, TrialSeed(1, 1).key(label)).standard_normal(7)  # dirty the pool first
    pooled = seed.streams(pool)[label].standard_normal(9)
    assert np.array_equal(pooled, seed.stream(label).standard_normal(9))


def test_trial_streams_continue_on_reuse():
    streams = TrialSeed(0, 0).streams()
    first = streams["noise"].standard_normal(3)
    second = streams["noise"].standard_normal(3)
    joined = TrialSeed(0, 0).stream("noise").standard_normal(6)
    assert np.array_equal(np.concatenate([first, second]), joined)


def test_seed_range_checked():
    with pytest.raises(ValueError):
        TrialSeed(-1, 0)
    with pytest.raises(ValueError):
        TrialSeed(0, 2**60)


def test_longer_frame_extends_shorter():
    params = SystemParams(ns=4, nc=40)
    short = sample_ambient(params, TrialSeed(5, 9).streams())
    long = sample_ambient(params, TrialSeed(5, 9).streams(), ns=10)
    assert np.array_equal(long.symbols[:4], short.symbols)
    assert long.ns == 10


def test_channels_shapes_and_determinism():
    params = SystemParams(ns=1, nc=10, m=16)
    a = sample_channels(params, TrialSeed(1, 2).streams())
    b = sample_channels(params, TrialSeed(1, 2).streams())
    assert a.f.shape == a.h.shape == (16,)
    assert a.g == b.g and np.array_equal(a.f, b.f) and np.array_equal(a.h, b.h)


def test_noise_zero_mode_and_validation(rng):
    assert not np.any(sample_post_correlator_noise(1.0, 8, rng, zero=True))
    with pytest.raises(ConfigError):
        sample_post_correlator_noise(0.0, 8, rng)
