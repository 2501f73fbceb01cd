import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cqed_tongues.rng import CounterStream, philox_block

# Random123 known-answer vectors for Philox4x64-10
KAT = [
    (0, 0, [0x16554D9ECA36314C, 0xDB20FE9D672D0FDC, 0xD7E772CEE186176B, 0x7E68B68AEC7BA23B]),
    (
        (1 << 128) - 1,
        (1 << 256) - 1,
        [0x87B092C3013FE90B, 0x438C3C67BE8D0224, 0x9CC7D7C69CD777B6, 0xA09CAEBF594F0BA0],
    ),
    (
        0xA4093822299F31D0 | (0x13198A2E03707344 << 64),
        0x243F6A8885A308D3
        | (0x13198A2E03707344 << 64)
        | (0xA4093822299F31D0 << 128)
        | (0x082EFA98EC4E6C89 << 192),
        [0x38825311C5A6F9C3, 0x8EA93DFA2013B0E5, 0xD9C7ED890AA980D5, 0xEC2281F1D1E585A4],
    ),
]


@pytest.mark.parametrize("key,counter,expected", KAT)
def test_known_answers(key, counter, expected):
    assert philox_block(key, counter) == expected


def test_stream_starts_at_block_zero():
    s = CounterStream(5, 9)
    assert [int(w) for w in s.raw(4)] == philox_block(5 | (9 << 64), 0)
    assert [int(w) for w in s.raw(4)] == philox_block(5 | (9 << 64), 1)


def test_uniform_mapping_matches_definition():
    words = philox_block(3 | (1 << 64), 0)
    u = CounterStream(3, 1).uniform(4)
    assert list(u) == [((w >> 11) + 1) * 2.0**-53 for w in words]


def test_normal_is_box_muller_of_uniforms():
    u = CounterStream(11, 2).uniform(2)
    z = CounterStream(11, 2).normal()
    assert z == math.sqrt(-2 * math.log(u[0])) * math.cos(2 * math.pi * u[1])


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1))
def test_uniform_in_half_open_unit_interval(seed, index):
    u = CounterStream(seed, index).uniform(64)
    assert np.all(u > 0) and np.all(u <= 1)


def test_streams_are_reproducible_and_distinct():
    a = CounterStream(42, 0).normal(100)
    assert np.array_equal(a, CounterStream(42, 0).normal(100))
    assert not np.array_equal(a, CounterStream(42, 1).normal(100))
    assert not np.array_equal(a, CounterStream(43, 0).normal(100))


def test_normal_moments():
    z = CounterStream(2024, 0).normal(200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1) < 0.01


def test_rejects_out_of_range_seed():
    with pytest.raises(ValueError):
        CounterStream(-1, 0)
    with pytest.raises(ValueError):
        CounterStream(0, 2**64)


def test_documented_stream_values():
    s = CounterStream(3, 1)
    assert s.uniform(4).tolist() == [0.704566049666597, 0.5997940729836844, 0.32482885947440643, 0.8130476717329878]
    s = CounterStream(3, 1)
    assert s.normal(3).tolist() == [-0.6776755239411059, 0.5786507709618197, 0.44948701999238355]
