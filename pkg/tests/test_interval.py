from __future__ import annotations

import math

import numpy as np
import pytest

from cubenorms.errors import (
    IntervalTooSmallError,
    InvalidParameterError,
    PreconditionError,
)
from cubenorms.groups import FiniteAbelianGroup, GroupFunction
from cubenorms.interval import (
    IntervalFunction,
    build_cutoff,
    cutoff_fourier_bound,
    embed_interval,
    interval_from_payload,
    interval_norm,
    interval_to_payload,
    is_prime,
    next_prime_at_least,
    transfer_kvn,
)
from cubenorms.uniformity import gowers_norm


def test_primality_against_sympy_style_table():
    primes_below_100 = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43,
                        47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97}
    for m in range(2, 100):
        assert is_prime(m) == (m in primes_below_100)
    # deterministic witnesses cover far beyond desk scale
    assert is_prime(2_147_483_647)
    assert not is_prime(2_147_483_647 * 3)


def test_next_prime():
    assert next_prime_at_least(14) == 17
    assert next_prime_at_least(17) == 17
    assert next_prime_at_least(320) == 331


def test_embed_places_values_at_low_codes():
    f = IntervalFunction(4, np.array([1.0, 2.0, 3.0, 4.0]))
    tilde = embed_interval(f, 11)
    assert tilde.group.order == 11
    assert np.array_equal(tilde.values[1:5], f.values)
    assert np.all(tilde.values[5:] == 0)
    assert tilde.values[0] == 0
    with pytest.raises(InvalidParameterError):
        embed_interval(f, 7)  # must exceed 2N to avoid wraparound


def test_interval_norm_independent_of_modulus():
    rng = np.random.default_rng(2)
    f = IntervalFunction(10, rng.uniform(-1, 1, 10))
    base = interval_norm(f, 2).value
    for n_prime in (23, 29, 97, 331):
        assert interval_norm(f, 2, n_prime=n_prime).value == pytest.approx(base, abs=1e-9)


def test_interval_norm_normalizes_the_indicator():
    ones = IntervalFunction(10, np.ones(10))
    assert interval_norm(ones, 2).value == pytest.approx(1.0, abs=1e-12)
    assert interval_norm(ones, 3).value == pytest.approx(1.0, abs=1e-12)


def test_cutoff_profile_shape():
    profile = build_cutoff(16, 20.0, 0.5, 2)
    phi = profile.values.values
    n_prime = profile.n_prime
    big_l, l = profile.big_l, profile.l
    # plateau of ones on [1, 2L], both ramps linear, zero far away
    assert np.all(phi[1 : 2 * big_l + 1] == 1.0)
    assert np.all(phi >= 0.0)
    assert np.all(phi <= 1.0)
    assert phi[(2 * big_l + l) % n_prime] == 0.0
    assert profile.desk_fallback  # alpha N < 2 at this scale
    l1, bound = cutoff_fourier_bound(profile)
    assert l1 <= bound + 1e-9
    assert bound == pytest.approx(4 * big_l / l)


def test_cutoff_paper_scale_refuses_small_n():
    with pytest.raises(IntervalTooSmallError) as err:
        build_cutoff(16, 20.0, 0.5, 2, paper_scale=True)
    assert err.value.n_min > 16


def test_cutoff_parameter_grid():
    for n in (16, 32, 64):
        for eps in (1.0, 0.5):
            profile = build_cutoff(n, 20.0, eps, 2)
            phi = profile.values.values
            assert np.all(phi[1 : 2 * profile.big_l + 1] == 1.0)
            l1, bound = cutoff_fourier_bound(profile)
            assert l1 <= bound + 1e-9


def test_transfer_residual_below_assembled_bound():
    rng = np.random.default_rng(6)
    n, c = 16, 20.0
    n_prime = next_prime_at_least(math.ceil(c * n))
    nu_vals = np.ones(n_prime)
    # spiky majorant on the embedded window
    spikes = rng.random(n) < 0.5
    nu_vals[1 : n + 1] = np.where(spikes, 2.0, 1.0)
    nu = GroupFunction(FiniteAbelianGroup((n_prime,)), nu_vals)
    f = IntervalFunction(n, np.where(spikes, 2.0, 1.0) * np.where(rng.random(n) < 0.5, -1.0, 1.0))
    result = transfer_kvn(f, nu, 2, c, 0.5)
    assert result.measured_residual <= result.assembled_bound + 1e-9
    assert result.components["identity_deviation"] <= 1e-12
    assert result.h.n == n
    # h is the truncation of the group model to the window
    assert np.array_equal(result.h.values, result.decomposition.model.values[1 : n + 1])


def test_transfer_validates_majorant_domain():
    f = IntervalFunction(16, np.ones(16))
    bad_group = FiniteAbelianGroup((330,))  # composite
    nu = GroupFunction(bad_group, np.ones(330))
    with pytest.raises(InvalidParameterError):
        transfer_kvn(f, nu, 2, 20.0, 0.5)
    small = FiniteAbelianGroup((101,))  # below ceil(C N)
    with pytest.raises(InvalidParameterError):
        transfer_kvn(f, GroupFunction(small, np.ones(101)), 2, 20.0, 0.5)


def test_transfer_needs_domination():
    n, c = 16, 20.0
    n_prime = next_prime_at_least(math.ceil(c * n))
    nu = GroupFunction(FiniteAbelianGroup((n_prime,)), np.ones(n_prime))
    f = IntervalFunction(n, np.full(n, 3.0))
    with pytest.raises(PreconditionError):
        transfer_kvn(f, nu, 2, c, 0.5)


def test_interval_payload_roundtrip():
    f = IntervalFunction(5, np.array([0.1, -0.2, 0.3, 0.0, 1.0]))
    back = interval_from_payload(interval_to_payload(f))
    assert back.n == 5
    assert np.array_equal(back.values, f.values)


def test_embedded_norm_matches_group_norm_directly():
    # the ratio definition agrees with computing both norms by hand
    rng = np.random.default_rng(9)
    f = IntervalFunction(8, rng.uniform(-1, 1, 8))
    n_prime = 31
    tilde = embed_interval(f, n_prime)
    ones = embed_interval(IntervalFunction(8, np.ones(8)), n_prime)
    expected = gowers_norm(tilde, 2).value / gowers_norm(ones, 2).value
    assert interval_norm(f, 2, n_prime=n_prime).value == pytest.approx(expected, abs=1e-12)
