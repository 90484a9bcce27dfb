from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import bits_to_int, crc_by_division, poly_mod
from polar_scl.crc import (
    CRC4,
    CRC8,
    CRC16,
    SCHEMES,
    CrcRegister,
    CrcScheme,
    append_crc,
    crc_check,
    crc_remainder,
    crc_update,
    get_scheme,
)

bit_lists = st.lists(st.integers(0, 1), max_size=64)
schemes = st.sampled_from([CRC4, CRC8, CRC16])


def test_generators_match_published_polynomials():
    assert CRC4.generator == 0b10011
    assert CRC8.generator == 0b111010101
    assert CRC16.generator == (1 << 16) | (1 << 15) | (1 << 2) | 1
    assert sorted(SCHEMES) == ["crc16", "crc4", "crc8"]


def test_lookup_by_name():
    assert get_scheme("crc8") is CRC8
    assert get_scheme("CRC16") is CRC16
    assert get_scheme(None) is None
    assert get_scheme("none") is None
    with pytest.raises(ValueError):
        get_scheme("crc32")


def test_scheme_validation():
    with pytest.raises(ValueError):
        CrcScheme("bad", 4, 0b1011)  # degree 3
    with pytest.raises(ValueError):
        CrcScheme("bad", 4, 0b10010)  # no constant term


@pytest.mark.parametrize("scheme", [CRC4, CRC8, CRC16])
def test_zero_message_keeps_zero_state(scheme):
    reg = CrcRegister(scheme)
    for _ in range(37):
        reg = crc_update(reg, 0)
    assert reg.state == 0
    assert crc_remainder([], scheme).tolist() == [0] * scheme.r
    assert crc_remainder([0] * scheme.r, scheme).tolist() == [0] * scheme.r


def test_single_one_gives_x4_mod_g():
    # x^4 mod (x^4 + x + 1) = x + 1
    assert poly_mod(1 << 4, 0b10011) == 0b0011
    reg = crc_update(CrcRegister(CRC4), 1)
    assert reg.bits().tolist() == [0, 0, 1, 1]
    assert crc_remainder([1], CRC4).tolist() == [0, 0, 1, 1]


@given(bit_lists, schemes)
def test_register_matches_long_division(msg, scheme):
    assert crc_remainder(msg, scheme).tolist() == crc_by_division(msg, scheme.generator, scheme.r)


@pytest.mark.parametrize("scheme", [CRC4, CRC8, CRC16])
def test_exhaustive_short_messages(scheme):
    for length in range(0, 11):
        for value in range(1 << length):
            msg = [(value >> (length - 1 - k)) & 1 for k in range(length)]
            expected = crc_by_division(msg, scheme.generator, scheme.r)
            assert crc_remainder(msg, scheme).tolist() == expected


@given(st.integers(0, 64).flatmap(lambda n: st.tuples(st.lists(st.integers(0, 1), min_size=n, max_size=n),
                                                          st.lists(st.integers(0, 1), min_size=n, max_size=n))),
       schemes)  # fmt: skip
def test_linearity(pair, scheme):
    a, b = (np.array(p, dtype=np.uint8) for p in pair)
    lhs = crc_remainder(a ^ b, scheme)
    rhs = crc_remainder(a, scheme) ^ crc_remainder(b, scheme)
    assert lhs.tolist() == rhs.tolist()


@given(bit_lists, schemes)
def test_appended_word_divides_evenly(msg, scheme):
    word = append_crc(msg, scheme)
    assert len(word) == len(msg) + scheme.r
    assert crc_check(word, scheme)
    assert not crc_remainder(word, scheme).any()


def test_single_bit_flip_detected():
    rng = np.random.default_rng(3)
    msg = rng.integers(0, 2, 100)
    word = append_crc(msg, CRC16)
    for k in range(word.size):
        bad = word.copy()
        bad[k] ^= 1
        assert not crc_check(bad, CRC16)


def test_batch_append_matches_rows():
    rng = np.random.default_rng(4)
    msgs = rng.integers(0, 2, (5, 21), dtype=np.uint8)
    batch = append_crc(msgs, CRC8)
    for row, word in zip(msgs, batch):
        assert word.tolist() == append_crc(row, CRC8).tolist()
    assert append_crc(msgs, None).tolist() == msgs.tolist()


def test_register_value_semantics():
    reg = CrcRegister(CRC8)
    stepped = reg.update(1)
    assert reg.state == 0 and stepped.state != 0
    assert bits_to_int(stepped.bits()) == stepped.state
