import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riscov.rng import MAX_TRIALS, Stream, philox4x32, split_seed, stream_id, uniform_pair

U = np.uint64

# Random123 known-answer vectors for Philox4x32-10
KAT = [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((0xFFFFFFFF,) * 4, (0xFFFFFFFF,) * 2, (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    (
        (0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344),
        (0xA4093822, 0x299F31D0),
        (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1),
    ),
]


@pytest.mark.parametrize("ctr, key, expected", KAT)
def test_philox_known_answers(ctr, key, expected):
    out = philox4x32(*(U(c) for c in ctr), *(U(k) for k in key))
    assert tuple(int(x) for x in out) == expected


@given(seed=st.integers(0, 2**64 - 1), slot=st.integers(0, 2**32 - 1), trial=st.integers(0, 2**32 - 1))
def test_uniforms_open_interval(seed, slot, trial):
    k0, k1 = split_seed(seed)
    u, v = uniform_pair(k0, k1, slot, 7, trial, 0)
    assert 0.0 < u < 1.0 and 0.0 < v < 1.0


def test_uniforms_look_uniform():
    k0, k1 = split_seed(123)
    u = np.array([uniform_pair(k0, k1, i, 1, 0, 0)[0] for i in range(20000)])
    assert abs(u.mean() - 0.5) < 4 * np.sqrt(1 / 12 / u.size)
    counts, _ = np.histogram(u, bins=20, range=(0, 1))
    chi2 = ((counts - 1000) ** 2 / 1000).sum()
    assert chi2 < 43.8  # 99.9% point of chi2 with 19 dof


def test_stream_ids_do_not_collide():
    ids = {stream_id(t, c, l, b) for t in (0, 1) for c in range(1, 11) for l in (0, 1, 5000) for b in (0, 1, 1023)}
    assert len(ids) == 2 * 10 * 3 * 3


def test_stream_handle_validation():
    with pytest.raises(ValueError):
        Stream(-1)
    with pytest.raises(ValueError):
        Stream(1, trial=MAX_TRIALS)
    with pytest.raises(ValueError):
        Stream(1, tag=2)
    assert Stream(2**40 + 5).key == (U(5), U(256))
