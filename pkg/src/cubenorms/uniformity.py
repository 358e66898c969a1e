"""Gowers uniformity norms and their weaker companions on finite abelian groups.

The 2^s-fold cube average E prod_{omega in {0,1}^s} f(x + omega . h) defines
the U^s norm.  The weak norm replaces all but the origin factor with arbitrary
[-1,1] functions and takes a sup; the additive cut norm does the same on the
s-variable lift and is at least as large.  Three computational paths exist for
U^s: direct cube enumeration, the derivative recursion
|f|_{U^s}^{2^s} = E_h |f . f(+h)|_{U^{s-1}}^{2^{s-1}}, and the order-2 Fourier
identity |f|_{U^2}^4 = sum_xi |fhat(xi)|^4 which the recursion bottoms out in.
"""
from __future__ import annotations

import itertools

import numpy as np

from . import budgets
from .boxnorms import (
    DualFamily,
    box_norm_ell,
    cube_vertex_keys,
    cut_norm,
    lift_to_tensor,
)
from .errors import (
    BudgetExceededError,
    InvalidInputError,
    InvalidMajorantError,
    InvalidParameterError,
)
from .groups import FiniteAbelianGroup, GroupFunction, roll_values
from .results import (
    METHOD_DIRECT,
    METHOD_FOURIER,
    METHOD_LIFTED,
    METHOD_RECURSIVE,
    NormResult,
    WeakNormEstimate,
)

__all__ = [
    "gowers_norm",
    "weak_norm",
    "cube_correlation",
    "cube_marginal",
    "moment_estimate",
    "additive_cut_norm",
    "uniformity_norm_ell",
    "evaluate_weak_objective",
]


def _require_s(s: int) -> int:
    s = int(s)
    if s < 2:
        raise InvalidParameterError(f"uniformity order s must be >= 2, got {s}")
    return s


def _clamp_power(power: float) -> float:
    if power < 0.0:
        if power < -1e-12:
            raise ArithmeticError(f"cube average {power} below the float tolerance floor")
        return 0.0
    return power


# ---------------------------------------------------------------------------
# U^s computational paths


def _direct_power(f: GroupFunction, s: int, cost: list) -> float:
    group = f.group
    n = group.order
    omegas = cube_vertex_keys(s)
    chunk = []
    partials = []
    count = 0
    for h in itertools.product(range(n), repeat=s):
        prod = f.values
        for omega in omegas:
            offset = 0
            for i, w in enumerate(omega):
                if w:
                    offset = int(group.add(offset, h[i]))
            prod = prod * roll_values(group, f.values, offset)
        cost[0] += len(omegas) * n
        chunk.append(float(np.mean(prod)))
        count += 1
        if len(chunk) == 65536:
            partials.append(float(np.sum(np.asarray(chunk))))
            chunk = []
    if chunk:
        partials.append(float(np.sum(np.asarray(chunk))))
    return sum(partials) / count


def _u2_fourier_power(values: np.ndarray, group: FiniteAbelianGroup, cost: list) -> float:
    n = group.order
    grid = values.reshape(group.factors)
    fhat = np.fft.fftn(grid) / n
    cost[0] += int(5 * n * max(1.0, np.log2(n))) + 2 * n
    return float(np.sum(np.abs(fhat) ** 4))


def _recursive_power(values: np.ndarray, group: FiniteAbelianGroup, s: int, cost: list) -> float:
    """E over (h_1, ..., h_{s-2}) of the U^2 power of the iterated derivative
    f . f(+h_1) . ... , evaluated as one batched Fourier pass.

    Level k holds all k-fold derivatives as rows; one more level multiplies
    each row by all of its translates.  The base identity sums |fhat|^4 over
    every row at once.
    """
    n = group.order
    shift = group.add(np.arange(n)[None, :], np.arange(n)[:, None])  # [h, x] -> x+h
    rows = values[None, :]
    for _ in range(s - 2):
        rows = (rows[:, None, :] * rows[:, shift]).reshape(-1, n)
        cost[0] += rows.size
    grids = rows.reshape((rows.shape[0],) + group.factors)
    axes = tuple(range(1, group.rank + 1))
    fhat = np.fft.fftn(grids, axes=axes) / n
    cost[0] += rows.shape[0] * (int(5 * n * max(1.0, np.log2(n))) + 2 * n)
    powers = np.sum(np.abs(fhat.reshape(rows.shape[0], n)) ** 4, axis=1)
    return float(np.mean(powers))


def gowers_norm(f: GroupFunction, s: int, method: str = "auto") -> NormResult:
    """The U^s norm of f, via the requested computational path.

    auto picks the Fourier identity at s = 2 and the derivative recursion
    beyond; direct enumerates all (x, h) cube tuples and is guarded by a hard
    budget; lifted routes through the s-variable tensor lift and its box norm.
    """
    s = _require_s(s)
    n = f.group.order
    if method not in ("auto", "direct", "recursive", "fourier", "lifted"):
        raise InvalidParameterError(f"unknown method {method!r}")
    if method == "auto":
        method = "fourier" if s == 2 else "recursive"
    cost = [0]
    if method == "direct":
        if n ** (s + 1) > budgets.DIRECT_ENUMERATION_BUDGET:
            raise BudgetExceededError(
                f"direct enumeration needs {n**(s+1)} tuples, "
                f"budget is {budgets.DIRECT_ENUMERATION_BUDGET}"
            )
        power = _clamp_power(_direct_power(f, s, cost))
        return NormResult(power ** (1.0 / 2**s), METHOD_DIRECT, cost[0])
    if method == "fourier":
        if s != 2:
            raise InvalidParameterError("the Fourier fast path applies only at s = 2")
        power = _u2_fourier_power(f.values, f.group, cost)
        return NormResult(power**0.25, METHOD_FOURIER, cost[0])
    if method == "lifted":
        res = box_norm_ell(lift_to_tensor(f, s), 2)
        return NormResult(res.value, METHOD_LIFTED, res.cost)
    if n ** (s - 1) > budgets.RECURSIVE_LEVEL_BUDGET:
        raise BudgetExceededError("derivative recursion exceeds its level budget")
    power = _recursive_power(f.values, f.group, s, cost)
    return NormResult(_clamp_power(power) ** (1.0 / 2**s), METHOD_RECURSIVE, cost[0])


# ---------------------------------------------------------------------------
# cube correlations and marginals


def _as_common_group(functions: dict) -> FiniteAbelianGroup:
    groups = {f.group for f in functions.values()}
    if len(groups) != 1:
        raise InvalidInputError("all cube factors must live on one group")
    return next(iter(groups))


def cube_correlation(functions: dict) -> float:
    """E prod_{omega in {0,1}^s} f_omega(x + omega . h) for a full cube family."""
    keys = sorted(functions.keys())
    if not keys:
        raise InvalidInputError("empty cube family")
    s = len(keys[0])
    if keys != sorted(itertools.product((0, 1), repeat=s)):
        raise InvalidInputError(f"cube family must cover all of {{0,1}}^{s}")
    group = _as_common_group(functions)
    arrays = {k: functions[k].values for k in keys}
    return _corr_recursive(arrays, group, s)


def _corr_recursive(arrays: dict, group: FiniteAbelianGroup, k: int) -> float:
    if k == 1:
        return float(np.mean(arrays[(0,)])) * float(np.mean(arrays[(1,)]))
    n = group.order
    per_h = np.empty(n)
    prefixes = list(itertools.product((0, 1), repeat=k - 1))
    for h in range(n):
        merged = {
            pre: arrays[pre + (0,)] * roll_values(group, arrays[pre + (1,)], h)
            for pre in prefixes
        }
        per_h[h] = _corr_recursive(merged, group, k - 1)
    return float(np.mean(per_h))


def cube_marginal(functions: dict) -> GroupFunction:
    """G(x) = E_h prod_{omega != 0} f_omega(x + omega . h).

    functions maps every nonzero omega in {0,1}^s to a factor; the origin slot
    stays open so that E[f . G] recovers the full cube correlation with f there.
    """
    keys = sorted(functions.keys())
    if not keys:
        raise InvalidInputError("empty cube family")
    s = len(keys[0])
    if keys != sorted(cube_vertex_keys(s)):
        raise InvalidInputError(f"marginal family must cover {{0,1}}^{s} minus the origin")
    group = _as_common_group(functions)
    n = group.order
    if n ** (s + 1) > budgets.DIRECT_ENUMERATION_BUDGET:
        raise BudgetExceededError("cube marginal exceeds the enumeration budget")
    acc = np.zeros(n)
    chunk = []
    for h in itertools.product(range(n), repeat=s):
        prod = np.ones(n)
        for omega in keys:
            offset = 0
            for i, w in enumerate(omega):
                if w:
                    offset = int(group.add(offset, h[i]))
            prod = prod * roll_values(group, functions[omega].values, offset)
        chunk.append(prod)
        if len(chunk) == 4096:
            acc += np.sum(np.asarray(chunk), axis=0)
            chunk = []
    if chunk:
        acc += np.sum(np.asarray(chunk), axis=0)
    return GroupFunction(group, acc / n**s)


def moment_estimate(nu: GroupFunction, s: int, event, k: int) -> float:
    """|E[1_A . M^k] - P(A)| where M is the all-nu cube marginal over the
    nonzero vertices of the s-cube."""
    s = _require_s(s)
    if k not in (1, 2):
        raise InvalidParameterError(f"moment order k must be 1 or 2, got {k}")
    if np.min(nu.values) < -1e-12:
        raise InvalidMajorantError("majorant must be nonnegative")
    n = nu.group.order
    indicator = np.zeros(n)
    event = np.asarray(event)
    if event.dtype == bool:
        if event.shape != (n,):
            raise InvalidInputError("boolean event mask must have group length")
        indicator[event] = 1.0
    else:
        nu.group.validate_codes(event)
        indicator[event.astype(np.int64)] = 1.0
    marginal = cube_marginal({omega: nu for omega in cube_vertex_keys(s)})
    lhs = float(np.mean(indicator * marginal.values**k))
    return abs(lhs - float(np.mean(indicator)))


# ---------------------------------------------------------------------------
# weak norm


def _cube_tables(group: FiniteAbelianGroup, s: int):
    """Index tables over all (x, h_1, ..., h_s) tuples: the code of x + omega . h
    for every nonzero omega, plus the x codes themselves."""
    n = group.order
    count = n ** (s + 1)
    if count > budgets.TUPLE_TABLE_BUDGET:
        raise BudgetExceededError("weak-norm tuple table exceeds its budget")
    codes = np.arange(count, dtype=np.int64)
    digits = []
    for pos in range(s + 1):
        w = n ** (s - pos)
        digits.append((codes // w) % n)
    x = digits[0]
    tables = {}
    for omega in cube_vertex_keys(s):
        acc = x
        for i, w in enumerate(omega):
            if w:
                acc = group.add(acc, digits[i + 1])
        tables[omega] = acc.astype(np.int64)
    return x.astype(np.int64), tables


def evaluate_weak_objective(f: GroupFunction, family: DualFamily) -> float:
    """E f(x) prod_{omega != 0} h_omega(x + omega . h) for a group-side family."""
    if family.side != "group":
        raise InvalidInputError("weak-norm objectives need a group-side family")
    s = family.arity
    x, tables = _cube_tables(f.group, s)
    probe = f.values[x]
    for omega in cube_vertex_keys(s):
        probe = probe * family.members[omega][tables[omega]]
    return float(np.mean(probe))


def _weak_exhaustive(f: GroupFunction, s: int) -> tuple[DualFamily, int]:
    group = f.group
    n = group.order
    nonzero = cube_vertex_keys(s)
    if n * len(nonzero) > budgets.EXHAUSTIVE_SIGN_BITS:
        raise BudgetExceededError(
            f"exhaustive weak-norm search needs {n * len(nonzero)} sign bits, "
            f"budget is {budgets.EXHAUSTIVE_SIGN_BITS}"
        )
    x, tables = _cube_tables(group, s)
    count = x.size
    pivot = (1,) * s
    others = [w for w in nonzero if w != pivot]
    nbits = n * len(others)
    onehot = np.zeros((count, n))
    onehot[np.arange(count), tables[pivot]] = 1.0
    base = f.values[x]
    best = -np.inf
    best_signs = None
    best_pivot = None
    total = 1 << nbits
    chunk = 1 << 12
    for start in range(0, total, chunk):
        cnt = min(chunk, total - start)
        idx = np.arange(start, start + cnt, dtype=np.int64)
        bits = (idx[:, None] >> np.arange(nbits)[None, :]) & 1
        signs = bits.astype(np.float64) * 2.0 - 1.0
        probe = np.broadcast_to(base[None, :], (cnt, count)).copy()
        for m, omega in enumerate(others):
            probe *= signs[:, m * n : (m + 1) * n][:, tables[omega]]
        bucket = probe @ onehot
        vals = np.abs(bucket).sum(axis=1) / count
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            best_signs = signs[k].copy()
            best_pivot = np.where(bucket[k] >= 0.0, 1.0, -1.0)
    members = {
        omega: best_signs[m * n : (m + 1) * n] for m, omega in enumerate(others)
    }
    members[pivot] = best_pivot
    cost = total * count * max(1, len(others))
    return DualFamily(s, members), cost


def _weak_alternating(
    f: GroupFunction, s: int, restarts: int, seed: int
) -> tuple[DualFamily, int]:
    group = f.group
    n = group.order
    rng = np.random.default_rng(seed)
    x, tables = _cube_tables(group, s)
    base = f.values[x]
    nonzero = cube_vertex_keys(s)
    best = -np.inf
    best_members = None
    cost = 0
    for _ in range(restarts):
        members = {
            omega: rng.integers(0, 2, size=n).astype(np.float64) * 2.0 - 1.0
            for omega in nonzero
        }
        prev = -np.inf
        for _sweep in range(500):
            for omega in nonzero:
                probe = base
                for other in nonzero:
                    if other != omega:
                        probe = probe * members[other][tables[other]]
                marg = np.bincount(tables[omega], weights=probe, minlength=n)
                members[omega] = np.where(marg >= 0.0, 1.0, -1.0)
                cost += probe.size * len(nonzero)
            probe = base
            for omega in nonzero:
                probe = probe * members[omega][tables[omega]]
            value = float(np.mean(probe))
            if value <= prev + 1e-12:
                break
            prev = value
        if prev > best:
            best = prev
            best_members = {k: v.copy() for k, v in members.items()}
    return DualFamily(s, best_members), cost


def weak_norm(
    f: GroupFunction,
    s: int,
    mode: str = "auto",
    restarts: int = 32,
    seed: int = 7,
) -> WeakNormEstimate:
    """The weak uniformity norm: sup over [-1,1] families h_omega of
    E f(x) prod_{omega != 0} h_omega(x + omega . h).

    exhaustive enumerates all sign families (one member is closed-formed from
    its marginal, which is exact by multilinearity) and is gated by the sign
    budget; alternating iterates sign-of-marginal sweeps from random restarts.
    """
    s = _require_s(s)
    if mode not in ("auto", "exhaustive", "alternating"):
        raise InvalidParameterError(f"unknown mode {mode!r}")
    n = f.group.order
    if mode == "auto":
        mode = (
            "exhaustive"
            if n * (2**s - 1) <= budgets.EXHAUSTIVE_SIGN_BITS
            else "alternating"
        )
    if mode == "exhaustive":
        witness, cost = _weak_exhaustive(f, s)
        exact = True
    else:
        witness, cost = _weak_alternating(f, s, restarts, seed)
        exact = False
    achieved = evaluate_weak_objective(f, witness)
    return WeakNormEstimate(achieved, witness, exact, cost)


# ---------------------------------------------------------------------------
# lifted norms


def additive_cut_norm(
    f: GroupFunction,
    s: int,
    mode: str = "auto",
    restarts: int = 32,
    seed: int = 7,
) -> WeakNormEstimate:
    """Cut norm of the s-variable lift of f; dominates the weak norm."""
    s = _require_s(s)
    return cut_norm(lift_to_tensor(f, s), mode=mode, restarts=restarts, seed=seed)


def uniformity_norm_ell(f: GroupFunction, s: int, ell: int) -> NormResult:
    """The (s, ell)-uniformity norm: the ell-box norm of the s-variable lift.

    At ell = 2 this recovers the U^s norm exactly.
    """
    s = _require_s(s)
    if ell < 2 or ell % 2 != 0:
        raise InvalidParameterError(f"ell must be an even integer >= 2, got {ell}")
    res = box_norm_ell(lift_to_tensor(f, s), ell)
    return NormResult(res.value, METHOD_LIFTED, res.cost)
