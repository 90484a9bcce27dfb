from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import run_starts
from polar_scl.codebook import (
    PolarCode,
    construct_monte_carlo,
    estimate_bit_channels,
    extend_with_crc,
    format_frozen_file,
    frozen_cluster_count,
    parse_frozen_file,
    read_frozen_file,
    write_frozen_file,
)
from polar_scl.crc import CRC4, CRC16


def test_code_properties():
    code = PolarCode(3, (3, 5, 6, 7))
    assert (code.N, code.K, code.k_info, code.rate) == (8, 4, 4, 0.5)
    assert code.frozen_indices.tolist() == [0, 1, 2, 4]
    assert code.info_mask.tolist() == [False, False, False, True, False, True, True, True]
    assert code.u_frozen.tolist() == [0] * 8
    crc_code = PolarCode(3, (3, 5, 6, 7), crc=CRC4)
    assert crc_code.k_info == 0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=0, info_set=()),
        dict(n=3, info_set=(5, 3)),
        dict(n=3, info_set=(3, 3)),
        dict(n=3, info_set=(8,)),
        dict(n=2, info_set=(1,), frozen_values=(0, 0)),
        dict(n=2, info_set=(1,), frozen_values=(0, 2, 0)),
        dict(n=2, info_set=(1, 2), crc=CRC4),
    ],
)
def test_code_validation(kwargs):
    with pytest.raises(ValueError):
        PolarCode(**kwargs)


def test_cluster_count_examples():
    assert frozen_cluster_count(PolarCode(3, (3, 5, 6, 7))) == 2
    assert frozen_cluster_count(PolarCode(3, tuple(range(8)))) == 0
    assert frozen_cluster_count(PolarCode(3, ())) == 1
    assert frozen_cluster_count(PolarCode(3, (0, 2, 4, 6))) == 4


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(0, (1 << n) - 1)))))
def test_cluster_count_matches_run_scan(case):
    n, info = case
    code = PolarCode(n, tuple(sorted(info)))
    assert frozen_cluster_count(code) == run_starts(~code.info_mask)


@pytest.mark.parametrize("snr", [-5.0, 0.0, 2.0, 10.0, 30.0])
def test_n1_picks_the_better_channel(snr):
    assert construct_monte_carlo(1, 1, snr, trials=500, seed=1).info_set == (1,)


def test_rate_one_uses_every_index():
    assert construct_monte_carlo(3, 8, 2.0, trials=10).info_set == tuple(range(8))


def test_construction_is_deterministic_and_partitions():
    a = construct_monte_carlo(6, 20, 1.0, trials=3000, seed=4)
    b = construct_monte_carlo(6, 20, 1.0, trials=3000, seed=4)
    assert a == b
    assert len(a.info_set) == 20
    assert set(a.info_set).isdisjoint(a.frozen_indices.tolist())
    assert sorted(set(a.info_set) | set(a.frozen_indices.tolist())) == list(range(64))


def test_worker_count_does_not_change_estimate():
    one = estimate_bit_channels(5, 1.0, 0.5, 4500, seed=9, workers=1)
    two = estimate_bit_channels(5, 1.0, 0.5, 4500, seed=9, workers=2)
    assert one.errors.tolist() == two.errors.tolist()
    assert np.allclose(one.log_soft, two.log_soft)


def test_reliability_follows_polarization_order():
    # with a correct past the last index sees every channel output, the first
    # sees a parity of all of them
    est = estimate_bit_channels(4, 1.0, 0.5, 4000, seed=2)
    ranking = est.ranking().tolist()
    assert ranking[0] == 15
    assert ranking[-1] == 0
    assert est.errors[15] <= est.errors[7] <= est.errors[3] <= est.errors[0]


def test_construction_rejects_bad_arguments():
    with pytest.raises(ValueError):
        construct_monte_carlo(3, 9)
    with pytest.raises(ValueError):
        construct_monte_carlo(0, 1)
    with pytest.raises(ValueError):
        construct_monte_carlo(3, 0)
    with pytest.raises(ValueError):
        extend_with_crc(3, 6, CRC4, trials=10)


def test_crc_extension_sizes():
    code = extend_with_crc(6, 24, CRC16, 1.0, trials=2000, seed=3)
    assert code.K == 40 and code.k_info == 24 and code.crc is CRC16
    plain = extend_with_crc(6, 24, None, 1.0, trials=2000, seed=3)
    assert plain.info_set == construct_monte_carlo(6, 24, 1.0, trials=2000, seed=3).info_set
    # the CRC positions are the next most reliable ones
    assert set(plain.info_set) < set(code.info_set)


def test_crc_extension_published_sizes(crc_codes):
    assert crc_codes["crc4"].K == 516
    assert crc_codes["crc16"].K == 528


def test_frozen_file_round_trip(tmp_path):
    code = PolarCode(3, (3, 5, 6, 7), crc=CRC4)
    text = format_frozen_file(code)
    assert text.splitlines()[:2] == ["N=8", "A=3,5,6,7"]
    assert parse_frozen_file(text) == code
    path = tmp_path / "code.txt"
    write_frozen_file(code, path)
    assert read_frozen_file(path) == code


@pytest.mark.parametrize(
    "text",
    ["N=8\nA=3,3,5\n", "N=8\nA=3,9\n", "N=8\nA=5,3\n", "N=6\nA=1\n", "A=1,2\n", "N=8\nA=1,2\nCRC=crc9\n", "N=8\nbogus\n"],
)
def test_frozen_file_rejects_bad_input(text):
    with pytest.raises(ValueError):
        parse_frozen_file(text)
