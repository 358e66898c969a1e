from __future__ import annotations

import itertools

import numpy as np
import pytest

from cubenorms.boxnorms import (
    DualFamily,
    TensorFunction,
    box_norm,
    box_norm_ell,
    cut_norm,
    evaluate_cut_objective,
    lift_to_tensor,
    multi_box_correlation,
)
from cubenorms.errors import BudgetExceededError, InvalidInputError, InvalidParameterError
from cubenorms.groups import FiniteAbelianGroup, GroupFunction
from cubenorms.uniformity import gowers_norm


def oracle_box_power(values: np.ndarray, ell: int) -> float:
    """Brute force E prod over [ell]^s of F(x^{(j_1)}_1, ..., x^{(j_s)}_s)."""
    s = values.ndim
    n = values.shape[0]
    total = 0.0
    for choices in itertools.product(range(n), repeat=ell * s):
        cols = [choices[i * ell : (i + 1) * ell] for i in range(s)]
        prod = 1.0
        for pattern in itertools.product(range(ell), repeat=s):
            idx = tuple(cols[i][pattern[i]] for i in range(s))
            prod *= values[idx]
        total += prod
    return total / n ** (ell * s)


def oracle_cut_norm(values: np.ndarray) -> float:
    """Raw sign enumeration of the three off-diagonal pattern members (s=2)."""
    n = values.shape[0]
    best = 0.0
    grids = np.array(list(itertools.product((-1.0, 1.0), repeat=n * n)))
    for a_flat in grids:
        A = a_flat.reshape(n, n)
        for b_flat in grids:
            B = b_flat.reshape(n, n)
            for c_flat in grids:
                C = c_flat.reshape(n, n)
                total = 0.0
                for x1, x2, y1, y2 in itertools.product(range(n), repeat=4):
                    total += values[x1, x2] * A[x1, y2] * B[y1, x2] * C[y1, y2]
                best = max(best, abs(total) / n**4)
    return best


def random_tensor(n, s, seed):
    rng = np.random.default_rng(seed)
    return TensorFunction(n, s, rng.uniform(-1, 1, n**s))


@pytest.mark.parametrize("n,s,ell", [(2, 2, 2), (3, 2, 2), (2, 3, 2), (2, 2, 4)])
def test_box_norm_matches_brute_force(n, s, ell):
    t = random_tensor(n, s, seed=n * 10 + s + ell)
    expected = max(oracle_box_power(t.values, ell), 0.0) ** (1.0 / ell**s)
    assert box_norm_ell(t, ell).value == pytest.approx(expected, abs=1e-11)


def test_box_norm_of_lift_is_gowers_norm():
    g = FiniteAbelianGroup((5,))
    rng = np.random.default_rng(7)
    f = GroupFunction(g, rng.uniform(-1, 1, 5))
    for s in (2, 3):
        lifted = lift_to_tensor(f, s)
        assert box_norm(lifted).value == pytest.approx(gowers_norm(f, s).value, abs=1e-10)


def test_lift_entries_indexed_by_coordinate_sums():
    g = FiniteAbelianGroup((4,))
    f = GroupFunction(g, np.array([1.0, 2.0, 3.0, 4.0]))
    lifted = lift_to_tensor(f, 2)
    for x1, x2 in itertools.product(range(4), repeat=2):
        assert lifted.values[x1, x2] == f.values[(x1 + x2) % 4]


def test_cut_norm_exact_matches_raw_enumeration_n2():
    t = random_tensor(2, 2, seed=3)
    est = cut_norm(t, mode="exhaustive")
    assert est.exact
    assert est.lower_bound == pytest.approx(oracle_cut_norm(t.values), abs=1e-12)


def test_cut_witness_achieves_value():
    for seed in (0, 5, 9):
        t = random_tensor(4, 2, seed=seed)
        est = cut_norm(t, mode="exhaustive")
        achieved = evaluate_cut_objective(t, est.witness)
        assert abs(achieved) == pytest.approx(est.lower_bound, abs=1e-12)


def test_alternating_cut_never_exceeds_exact():
    rng = np.random.default_rng(31)
    for n in (2, 3, 4):
        for _ in range(4):
            t = TensorFunction(n, 2, rng.uniform(-1, 1, n * n))
            exact = cut_norm(t, mode="exhaustive").lower_bound
            approx = cut_norm(t, mode="alternating", restarts=16, seed=2).lower_bound
            assert approx <= exact + 1e-12


def test_cut_below_box_and_bounded_reverse():
    rng = np.random.default_rng(37)
    for n in (2, 3, 4, 5):
        t = TensorFunction(n, 2, rng.uniform(-1, 1, n * n))
        c = cut_norm(t, mode="exhaustive").lower_bound
        b = box_norm(t).value
        assert c <= b + 1e-9
        assert b <= c ** (1.0 / 4.0) + 1e-9


def test_box_monotone_in_ell():
    t = random_tensor(4, 2, seed=11)
    assert box_norm_ell(t, 2).value <= box_norm_ell(t, 4).value + 1e-10
    assert box_norm_ell(t, 4).value <= box_norm_ell(t, 6).value + 1e-10


def test_multi_box_correlation_oracle():
    n, s, ell = 2, 2, 2
    rng = np.random.default_rng(19)
    fam = {
        key: TensorFunction(n, s, rng.uniform(-1, 1, n * n))
        for key in itertools.product(range(1, ell + 1), repeat=s)
    }
    total = 0.0
    for x11, x12, x21, x22 in itertools.product(range(n), repeat=4):
        cols = {(1, 1): x11, (1, 2): x12, (2, 1): x21, (2, 2): x22}
        prod = 1.0
        for key, t in fam.items():
            prod *= t.values[cols[(1, key[0])], cols[(2, key[1])]]
        total += prod
    assert multi_box_correlation(fam) == pytest.approx(total / n**4, abs=1e-12)


def test_multi_box_correlation_gcs_inequality():
    rng = np.random.default_rng(29)
    for ell in (2, 4):
        for _ in range(5):
            fam = {
                key: TensorFunction(3, 2, rng.uniform(-1, 1, 9))
                for key in itertools.product(range(1, ell + 1), repeat=2)
            }
            corr = abs(multi_box_correlation(fam))
            bound = 1.0
            for t in fam.values():
                bound *= box_norm_ell(t, ell).value
            assert corr <= bound + 1e-9


def test_multi_box_correlation_same_tensor_is_norm_power():
    t = random_tensor(3, 2, seed=2)
    fam = {key: t for key in itertools.product((1, 2), repeat=2)}
    assert multi_box_correlation(fam) == pytest.approx(box_norm(t).value ** 4, abs=1e-12)


def test_family_validation():
    t = random_tensor(2, 2, seed=1)
    with pytest.raises(InvalidInputError):
        multi_box_correlation({(1, 2): t, (2, 1): t})
    with pytest.raises(InvalidParameterError):
        box_norm_ell(t, 3)
    with pytest.raises(InvalidParameterError):
        DualFamily(2, {(1, 2): np.full((2, 2), 2.0), (2, 1): np.ones((2, 2)), (2, 2): np.ones((2, 2))})


def test_box_budget_guard():
    t = random_tensor(12, 3, seed=0)
    with pytest.raises(BudgetExceededError):
        box_norm_ell(t, 4)
