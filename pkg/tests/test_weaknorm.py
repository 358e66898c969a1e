from __future__ import annotations

import itertools

import numpy as np
import pytest

from cubenorms.boxnorms import DualFamily
from cubenorms.groups import FiniteAbelianGroup, GroupFunction
from cubenorms.uniformity import (
    additive_cut_norm,
    evaluate_weak_objective,
    gowers_norm,
    weak_norm,
)


def raw_weak_norm(f: GroupFunction, s: int) -> float:
    """Enumerate every sign assignment of every family member.

    The objective is multilinear in each member, so the sup over [-1,1]
    families is attained at a sign family; this brute force is the oracle.
    """
    g = f.group
    n = g.order
    keys = [w for w in itertools.product((0, 1), repeat=s) if any(w)]
    best = 0.0
    for bits in itertools.product((-1.0, 1.0), repeat=n * len(keys)):
        members = {}
        for i, key in enumerate(keys):
            members[key] = np.array(bits[i * n : (i + 1) * n])
        total = 0.0
        for tup in itertools.product(range(n), repeat=s + 1):
            x, hs = tup[0], tup[1:]
            prod = f.values[x]
            for key in keys:
                z = x
                for w, h in zip(key, hs):
                    if w:
                        z = int(g.add(z, h))
                prod *= members[key][z]
            total += prod
        best = max(best, abs(total) / n ** (s + 1))
    return best


def test_exhaustive_matches_raw_enumeration_z2():
    g = FiniteAbelianGroup((2,))
    rng = np.random.default_rng(2)
    for _ in range(4):
        f = GroupFunction(g, rng.uniform(-1, 1, 2))
        est = weak_norm(f, 2, mode="exhaustive")
        assert est.exact
        assert est.lower_bound == pytest.approx(raw_weak_norm(f, 2), abs=1e-12)


def test_exhaustive_matches_raw_enumeration_z3():
    g = FiniteAbelianGroup((3,))
    f = GroupFunction(g, np.array([0.9, -0.4, 0.2]))
    est = weak_norm(f, 2, mode="exhaustive")
    assert est.lower_bound == pytest.approx(raw_weak_norm(f, 2), abs=1e-12)


def test_witness_achieves_reported_value():
    g = FiniteAbelianGroup((5,))
    rng = np.random.default_rng(8)
    f = GroupFunction(g, rng.uniform(-1, 1, 5))
    for mode in ("exhaustive", "alternating"):
        est = weak_norm(f, 2, mode=mode, restarts=8, seed=1)
        achieved = abs(evaluate_weak_objective(f, est.witness))
        assert achieved == pytest.approx(est.lower_bound, abs=1e-12)
        assert isinstance(est.witness, DualFamily)


def test_alternating_never_exceeds_exhaustive():
    rng = np.random.default_rng(17)
    for n in (2, 3, 4):
        g = FiniteAbelianGroup((n,))
        for _ in range(5):
            f = GroupFunction(g, rng.uniform(-1, 1, n))
            exact = weak_norm(f, 2, mode="exhaustive").lower_bound
            approx = weak_norm(f, 2, mode="alternating", restarts=32, seed=5).lower_bound
            assert approx <= exact + 1e-12


def test_constant_weak_norm():
    g = FiniteAbelianGroup((4,))
    f = GroupFunction(g, np.full(4, -0.6))
    assert weak_norm(f, 2).lower_bound == pytest.approx(0.6, abs=1e-12)


def test_weak_below_strong_and_bounded_reverse():
    # w <= U always; U <= w^(1/2^s) when |f| <= 1
    rng = np.random.default_rng(23)
    for n in (4, 5, 6):
        g = FiniteAbelianGroup((n,))
        for _ in range(6):
            f = GroupFunction(g, rng.uniform(-1, 1, n))
            w = weak_norm(f, 2, mode="exhaustive").lower_bound
            u = gowers_norm(f, 2).value
            assert w <= u + 1e-9
            assert u <= w ** (1.0 / 4.0) + 1e-9


def test_auto_mode_respects_budget():
    g = FiniteAbelianGroup((8,))
    rng = np.random.default_rng(30)
    f = GroupFunction(g, rng.uniform(-1, 1, 8))
    assert weak_norm(f, 2).exact  # 24 sign bits, inside the budget
    g_big = FiniteAbelianGroup((16,))
    f_big = GroupFunction(g_big, rng.uniform(-1, 1, 16))
    assert not weak_norm(f_big, 2).exact


def test_additive_cut_dominates_weak():
    # the lifted family is richer than the cube family
    rng = np.random.default_rng(41)
    for n in (3, 5, 7):
        g = FiniteAbelianGroup((n,))
        f = GroupFunction(g, rng.uniform(-1, 1, n))
        w = weak_norm(f, 2, mode="exhaustive").lower_bound
        cut = additive_cut_norm(f, 2).lower_bound
        assert w <= cut + 1e-9
