"""Dual functions for the decomposition engine.

A dual family assigns a bounded function H_omega to every coordinate pattern
omega in {1,2}^s except the all-first pattern; its realization is

    D(z) = E[ prod_omega H_omega(pi_omega(x)) | sum_i x_{i1} = z ]

over x in Z^{s x 2}.  The inner product E[f . D] then equals the cut objective
of the s-variable lift of f against the family, which makes D the natural
test class for dense-model iterations: maximizing |E[r . D]| over families is
exactly the additive cut norm of r.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import budgets
from .boxnorms import DualFamily, tensor_pattern_keys
from .errors import BudgetExceededError, InvalidInputError
from .groups import FiniteAbelianGroup, GroupFunction
from .uniformity import additive_cut_norm

__all__ = ["DualFunction", "realize_dual", "best_dual"]


@dataclass(frozen=True)
class DualFunction:
    """A realized dual: the generating family plus the function D on the group."""

    family: DualFamily
    realized: GroupFunction

    def __post_init__(self):
        if np.max(np.abs(self.realized.values)) > 1.0 + 1e-9:
            raise InvalidInputError("realized dual must stay within [-1, 1]")


def _realize_s2(family: DualFamily, group: FiniteAbelianGroup) -> np.ndarray:
    # Write x1 = x_{11}, x2 = x_{21} (first column) and y1 = x_{12},
    # y2 = x_{22}.  The three patterns read A(x1, y2), B(y1, x2), C(y1, y2),
    # so averaging over y1 then y2 leaves two matmuls plus an anti-diagonal
    # average over x1 + x2 = z.
    n = group.order
    a = family.members[(1, 2)]
    b = family.members[(2, 1)]
    c = family.members[(2, 2)]
    m = (b.T @ c) / n  # M[x2, y2] = E_{y1} B(y1, x2) C(y1, y2)
    k = (a @ m.T) / n  # K[x1, x2] = E_{y2} A(x1, y2) M(x2, y2)
    out = np.empty(n)
    codes = np.arange(n)
    for z in range(n):
        partners = group.add(group.negate(codes), z)
        out[z] = float(np.mean(k[codes, partners]))
    return out


def _realize_generic(family: DualFamily, group: FiniteAbelianGroup, s: int) -> np.ndarray:
    n = group.order
    if n ** (2 * s) > budgets.TUPLE_TABLE_BUDGET:
        raise BudgetExceededError("dual realization exceeds its tuple budget")
    count = n ** (2 * s)
    codes = np.arange(count, dtype=np.int64)
    digits = []
    for pos in range(2 * s):
        w = n ** (2 * s - 1 - pos)
        digits.append(((codes // w) % n).astype(np.int64))
    # digit order: x11, x12, x21, x22, ..., xs1, xs2
    prod = np.ones(count)
    for omega in tensor_pattern_keys(s):
        flat = np.zeros(count, dtype=np.int64)
        for i, j in enumerate(omega):
            flat = flat * n + digits[2 * i + (j - 1)]
        prod = prod * family.members[omega].ravel()[flat]
    z = np.zeros(count, dtype=np.int64)
    for i in range(s):
        z = group.add(z, digits[2 * i]).astype(np.int64)
    sums = np.bincount(z, weights=prod, minlength=n)
    counts = np.bincount(z, minlength=n)
    return sums / counts


def realize_dual(family: DualFamily, group: FiniteAbelianGroup) -> DualFunction:
    """Condition the family product on the first-column sum; exact bucketed
    average, no sampling."""
    if family.side != "tensor":
        raise InvalidInputError("dual realization needs a tensor-pattern family")
    s = family.arity
    member = next(iter(family.members.values()))
    if member.shape != (group.order,) * s:
        raise InvalidInputError("family members do not match the group order")
    if s == 2:
        values = _realize_s2(family, group)
    else:
        values = _realize_generic(family, group, s)
    values = np.clip(values, -1.0, 1.0)
    return DualFunction(family, GroupFunction(group, values))


def best_dual(
    residual: GroupFunction,
    s: int,
    mode: str = "auto",
    restarts: int = 32,
    seed: int = 7,
) -> tuple[DualFunction, float]:
    """Near-maximizer of |E[residual . D]| over the dual class.

    Returns (dual, correlation) with correlation the signed inner product
    E[residual . realized]; its magnitude is the (estimated) additive cut
    norm of the residual.  Exhaustive mode is exact within its budget.
    """
    est = additive_cut_norm(residual, s, mode=mode, restarts=restarts, seed=seed)
    dual = realize_dual(est.witness, residual.group)
    correlation = float(np.mean(residual.values * dual.realized.values))
    return dual, correlation
