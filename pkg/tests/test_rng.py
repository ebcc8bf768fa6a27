import numpy as np
import pytest

from chromvar.rng import GOLDEN_GAMMA, MASK64, derive_key, mix64, raw64, sample_subset, uniforms


def _splitmix_reference(state, count):
    # textbook sequential SplitMix64: state += gamma, then finalise
    out = []
    for _ in range(count):
        state = (state + GOLDEN_GAMMA) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out.append(z ^ (z >> 31))
    return out


def test_matches_sequential_splitmix():
    # the published first output for seed 1234567
    assert _splitmix_reference(1234567, 1)[0] == 6457827717110365317
    for key in (0, 1234567, MASK64):
        assert raw64(key, 0, 20).tolist() == _splitmix_reference(key, 20)


def test_random_access():
    full = raw64(99, 0, 1000)
    assert np.array_equal(raw64(99, 400, 37), full[400:437])
    assert int(full[5]) == mix64(99 + 6 * GOLDEN_GAMMA)


def test_uniform_range_and_mean():
    u = uniforms(7, 0, 200_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) <= 4 * np.sqrt(1 / 12 / u.size)


def test_derive_key_order_matters():
    assert derive_key(1, 2) != derive_key(2, 1)
    assert derive_key(1, 2) == derive_key(1, 2)
    assert len({derive_key(5, i) for i in range(10_000)}) == 10_000


def test_sample_subset():
    s = sample_subset(3, 10, 4)
    assert len(s) == 4 and len(set(s.tolist())) == 4 and list(s) == sorted(s)
    assert sample_subset(3, 5, 5).tolist() == list(range(5))
    with pytest.raises(ValueError):
        sample_subset(3, 4, 5)
    # each 2-subset of 4 elements appears with frequency 1/6
    counts = {}
    for i in range(12_000):
        key = tuple(sample_subset(derive_key(8, i), 4, 2).tolist())
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 6
    sd = np.sqrt(12_000 * (1 / 6) * (5 / 6))
    assert all(abs(c - 2000) <= 4 * sd for c in counts.values())
