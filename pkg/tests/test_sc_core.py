from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import encode_dense, prefix_neg_log_posterior
from polar_scl.mode import DecoderMode
from polar_scl.sc_core import ScState, f_minus_exact, f_minus_minsum, f_plus

finite = st.floats(-60, 60, allow_nan=False)


def log_domain_f_minus(a, b):
    return np.logaddexp(a + b, 0.0) - np.logaddexp(a, b)


@given(finite, finite)
def test_f_minus_exact_matches_definition(a, b):
    assert f_minus_exact(a, b) == pytest.approx(log_domain_f_minus(a, b), abs=1e-9)


@given(finite, finite)
def test_f_minus_exact_symmetry_and_zero(a, b):
    assert f_minus_exact(a, b) == f_minus_exact(b, a)
    assert f_minus_exact(0.0, b) == 0.0
    assert f_minus_exact(-a, b) == -f_minus_exact(a, b)


def test_f_minus_exact_no_overflow():
    assert f_minus_exact(800.0, 900.0) == pytest.approx(800.0)
    assert f_minus_exact(-800.0, 900.0) == pytest.approx(-800.0)
    assert f_minus_exact(1e-9, 1e-9) == pytest.approx(5e-19, rel=1e-6)


def test_f_minus_minsum_examples():
    assert f_minus_minsum(2.0, -3.0) == -2.0
    assert f_minus_minsum(0.0, 7.0) == 0.0
    assert f_minus_minsum(-5.0, -7.0) == 5.0


def test_minsum_gap_is_at_most_ln2():
    rng = np.random.default_rng(0)
    pairs = rng.normal(0, 6, (100_000, 2))
    gap = max(abs(f_minus_exact(a, b) - f_minus_minsum(a, b)) for a, b in pairs)
    assert gap <= math.log(2)


def test_f_plus():
    assert f_plus(2.0, 5.0, 0) == 7.0
    assert f_plus(2.0, 5.0, 1) == 3.0
    assert f_plus(31.0, 31.0, 0, 31.0) == 31.0
    assert f_plus(31.0, -31.0, 1, 31.0) == -31.0


def brute_force_llr(llr, prefix):
    """``ln W(y, prefix | 0) / W(y, prefix | 1)`` by enumeration."""
    return prefix_neg_log_posterior(llr, list(prefix) + [1]) - prefix_neg_log_posterior(llr, list(prefix) + [0])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_decision_llrs_match_enumeration(n):
    rng = np.random.default_rng(n)
    N = 1 << n
    for _ in range(25):
        llr = rng.normal(1.0, 2.0, N)
        u = rng.integers(0, 2, N)
        st_ = ScState(llr)
        for i in range(N):
            lam = st_.decision_llr(i)
            assert lam == pytest.approx(brute_force_llr(llr, u[:i]), abs=1e-9)
            st_.update_partial_sums(i, u[i])
        assert st_.codeword_estimate.tolist() == encode_dense(u).tolist()


def test_partial_sums_reencode_decisions():
    rng = np.random.default_rng(5)
    for n in (4, 6, 8):
        u = rng.integers(0, 2, 1 << n)
        st_ = ScState(rng.normal(size=1 << n), DecoderMode("minsum"))
        for i, b in enumerate(u):
            st_.decision_llr(i)
            st_.update_partial_sums(i, b)
        assert st_.codeword_estimate.tolist() == encode_dense(u).tolist()


def test_state_enforces_bit_order():
    st_ = ScState(np.zeros(4))
    with pytest.raises(ValueError):
        st_.decision_llr(1)
    st_.decision_llr(0)
    with pytest.raises(ValueError):
        st_.decision_llr(0)
    with pytest.raises(ValueError):
        st_.update_partial_sums(1, 0)
    st_.update_partial_sums(0, 1)
    with pytest.raises(ValueError):
        st_.update_partial_sums(1, 0)
    with pytest.raises(ValueError):
        ScState(np.zeros(6))


def test_copy_is_independent():
    st_ = ScState(np.arange(8.0) - 2.5)
    st_.decision_llr(0)
    twin = st_.copy()
    st_.update_partial_sums(0, 1)
    twin.update_partial_sums(0, 0)
    assert st_.decision_llr(1) != twin.decision_llr(1)


def test_fixed_mode_saturates_llrs():
    st_ = ScState(np.full(4, 31.0), DecoderMode.parse("fixed:Q=6,M=8"))
    for i in range(3):
        st_.decision_llr(i)
        st_.update_partial_sums(i, 0)
    assert st_.decision_llr(3) == 31.0
