from __future__ import annotations

import itertools

import numpy as np
import pytest

from cubenorms.boxnorms import box_norm, lift_to_tensor
from cubenorms.errors import BudgetExceededError, InvalidParameterError
from cubenorms.groups import FiniteAbelianGroup, GroupFunction
from cubenorms.uniformity import (
    cube_correlation,
    cube_marginal,
    gowers_norm,
    moment_estimate,
    uniformity_norm_ell,
)


def oracle_power(f: GroupFunction, s: int) -> float:
    """2^s-fold cube product average by brute enumeration over (x, h)."""
    g = f.group
    n = g.order
    total = 0.0
    for tup in itertools.product(range(n), repeat=s + 1):
        x, hs = tup[0], tup[1:]
        prod = 1.0
        for omega in itertools.product((0, 1), repeat=s):
            z = x
            for w, h in zip(omega, hs):
                if w:
                    z = int(g.add(z, h))
            prod *= f.values[z]
        total += prod
    return total / n ** (s + 1)


def random_function(factors, seed):
    g = FiniteAbelianGroup(factors)
    rng = np.random.default_rng(seed)
    return GroupFunction(g, rng.uniform(-1, 1, g.order))


@pytest.mark.parametrize(
    "factors,s",
    [((4,), 2), ((5,), 2), ((5,), 3), ((2, 3), 2), ((2, 2, 2), 2)],
)
def test_gowers_norm_matches_brute_force(factors, s):
    f = random_function(factors, seed=s * 31 + sum(factors))
    expected = max(oracle_power(f, s), 0.0) ** (1.0 / 2**s)
    for method in ("direct", "recursive", "auto"):
        res = gowers_norm(f, s, method=method)
        assert res.value == pytest.approx(expected, abs=1e-11)
    if s == 2:
        assert gowers_norm(f, 2, method="fourier").value == pytest.approx(expected, abs=1e-11)


def test_delta_function_norm_closed_form():
    # point mass at 0 on Z_4: the U^2 power counts additive quadruples,
    # all of them trivial, so the norm is (4 / 4^3)^(1/4)
    g = FiniteAbelianGroup((4,))
    f = GroupFunction(g, np.array([1.0, 0.0, 0.0, 0.0]))
    assert gowers_norm(f, 2).value == pytest.approx(4.0 ** (-3.0 / 4.0), abs=1e-12)


def test_constant_norm_is_its_absolute_value():
    g = FiniteAbelianGroup((6,))
    for c in (1.0, -0.7, 0.0):
        f = GroupFunction(g, np.full(6, c))
        for s in (2, 3):
            assert gowers_norm(f, s).value == pytest.approx(abs(c), abs=1e-12)


def test_character_indicator_interpolates():
    # f = cos wave on Z_8 has a single frequency pair; U^2 power is then
    # 2 * (1/2)^4 by the Fourier identity
    g = FiniteAbelianGroup((8,))
    x = np.arange(8)
    f = GroupFunction(g, np.cos(2 * np.pi * x / 8))
    assert gowers_norm(f, 2).value == pytest.approx((2 * 0.5**4) ** 0.25, abs=1e-12)


def test_nesting_u2_le_u3():
    f = random_function((7,), seed=3)
    assert gowers_norm(f, 2).value <= gowers_norm(f, 3).value + 1e-12


def test_triangle_and_homogeneity():
    g = FiniteAbelianGroup((6,))
    rng = np.random.default_rng(9)
    a = GroupFunction(g, rng.uniform(-1, 1, 6))
    b = GroupFunction(g, rng.uniform(-1, 1, 6))
    for s in (2, 3):
        na = gowers_norm(a, s).value
        nb = gowers_norm(b, s).value
        nsum = gowers_norm(a + b, s).value
        assert nsum <= na + nb + 1e-10
        scaled = GroupFunction(g, -1.5 * a.values)
        assert gowers_norm(scaled, s).value == pytest.approx(1.5 * na, rel=1e-10)


def test_lifted_method_agrees():
    f = random_function((5,), seed=12)
    for s in (2, 3):
        lifted = gowers_norm(f, s, method="lifted")
        assert lifted.value == pytest.approx(gowers_norm(f, s).value, abs=1e-10)
        assert lifted.value == pytest.approx(box_norm(lift_to_tensor(f, s)).value, abs=1e-12)


def test_invalid_parameters():
    f = random_function((4,), seed=0)
    with pytest.raises(InvalidParameterError):
        gowers_norm(f, 1)
    with pytest.raises(InvalidParameterError):
        gowers_norm(f, 2, method="magic")


def test_direct_budget_guard():
    f = random_function((32,), seed=0)
    with pytest.raises(BudgetExceededError):
        gowers_norm(f, 6, method="direct")


def test_cube_correlation_full_family():
    g = FiniteAbelianGroup((4,))
    rng = np.random.default_rng(4)
    fam = {
        omega: GroupFunction(g, rng.uniform(-1, 1, 4))
        for omega in itertools.product((0, 1), repeat=2)
    }
    # brute force over (x, h1, h2)
    total = 0.0
    for x, h1, h2 in itertools.product(range(4), repeat=3):
        prod = 1.0
        for omega, fn in fam.items():
            z = (x + omega[0] * h1 + omega[1] * h2) % 4
            prod *= fn.values[z]
        total += prod
    assert cube_correlation(fam) == pytest.approx(total / 64, abs=1e-12)
    # all members equal to f recovers the norm power
    f = random_function((4,), seed=5)
    same = {omega: f for omega in itertools.product((0, 1), repeat=2)}
    assert cube_correlation(same) == pytest.approx(gowers_norm(f, 2).value ** 4, abs=1e-12)


def test_cube_marginal_oracle():
    g = FiniteAbelianGroup((3,))
    rng = np.random.default_rng(6)
    fam = {
        omega: GroupFunction(g, rng.uniform(0.0, 2.0, 3))
        for omega in itertools.product((0, 1), repeat=2)
        if omega != (0, 0)
    }
    marg = cube_marginal(fam)
    for x in range(3):
        total = 0.0
        for h1, h2 in itertools.product(range(3), repeat=2):
            prod = 1.0
            for omega, fn in fam.items():
                z = (x + omega[0] * h1 + omega[1] * h2) % 3
                prod *= fn.values[z]
            total += prod
        assert marg.values[x] == pytest.approx(total / 9, abs=1e-12)


def test_moment_estimate_constant_majorant_is_zero():
    g = FiniteAbelianGroup((16,))
    nu = GroupFunction(g, np.ones(16))
    event = np.arange(16) % 2 == 0
    for k in (1, 2):
        assert moment_estimate(nu, 2, event, k) == pytest.approx(0.0, abs=1e-12)


def test_moment_estimate_matches_direct_computation():
    g = FiniteAbelianGroup((8,))
    rng = np.random.default_rng(13)
    nu = GroupFunction(g, rng.uniform(0.0, 2.0, 8))
    event = np.zeros(8, dtype=bool)
    event[[0, 3, 4]] = True
    fam = {
        omega: nu for omega in itertools.product((0, 1), repeat=2) if omega != (0, 0)
    }
    calib = cube_marginal(fam).values
    for k in (1, 2):
        direct = abs(np.mean(event * calib**k) - np.mean(event))
        assert moment_estimate(nu, 2, event, k) == pytest.approx(direct, abs=1e-12)


def test_uniformity_norm_ell_reduces_to_gowers_at_two():
    f = random_function((5,), seed=21)
    res = uniformity_norm_ell(f, 2, 2)
    assert res.value == pytest.approx(gowers_norm(f, 2).value, abs=1e-10)
    # the ell = 4 variant is the order-2s norm of the lift, which dominates
    assert uniformity_norm_ell(f, 2, 4).value >= res.value - 1e-10
    with pytest.raises(InvalidParameterError):
        uniformity_norm_ell(f, 2, 3)
