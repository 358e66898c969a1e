"""Box norms, cut norms and dual families on s-dimensional tensors.

A tensor is a real function on V^s for a finite vertex set V.  The ell-box
norm raises the tensor to the ell^s-fold product over a grid of coordinate
copies; the cut norm is the sup of correlations against families of [-1,1]
tensors indexed by the coordinate patterns omega in {1,2}^s other than the
diagonal.  At arity 2 the cut-norm sup collapses exactly to a rank-one sign
optimization, which gives an exact "exhaustive" path far beyond raw
enumeration; the reduction is cross-checked against raw enumeration in tests.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from . import budgets
from .errors import (
    BudgetExceededError,
    InvalidInputError,
    InvalidParameterError,
)
from .groups import FiniteAbelianGroup, GroupFunction
from .results import METHOD_CONTRACTION, NormResult, WeakNormEstimate

__all__ = [
    "TensorFunction",
    "DualFamily",
    "box_norm_ell",
    "box_norm",
    "cut_norm",
    "lift_to_tensor",
    "multi_box_correlation",
    "evaluate_cut_objective",
    "tensor_pattern_keys",
    "cube_vertex_keys",
    "tensor_to_payload",
    "tensor_from_payload",
    "load_tensor",
    "dump_tensor",
]


@dataclass(frozen=True)
class TensorFunction:
    """Real function on V^s, stored as an s-dimensional array."""

    vertex_count: int
    arity: int
    values: np.ndarray

    def __post_init__(self):
        n = int(self.vertex_count)
        s = int(self.arity)
        if n < 1:
            raise InvalidParameterError("vertex_count must be >= 1")
        if s < 1:
            raise InvalidParameterError("arity must be >= 1")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.size != n**s:
            raise InvalidInputError(
                f"expected {n**s} values for a {n}^{s} tensor, got {vals.size}"
            )
        vals = vals.reshape((n,) * s).copy()
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("tensor values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "vertex_count", n)
        object.__setattr__(self, "arity", s)
        object.__setattr__(self, "values", vals)

    def __sub__(self, other):
        if isinstance(other, TensorFunction):
            if (other.vertex_count, other.arity) != (self.vertex_count, self.arity):
                raise InvalidInputError("tensor domains differ")
            return TensorFunction(self.vertex_count, self.arity, self.values - other.values)
        return TensorFunction(self.vertex_count, self.arity, self.values - float(other))

    def __rsub__(self, other):
        return TensorFunction(self.vertex_count, self.arity, float(other) - self.values)

    def __add__(self, other):
        if isinstance(other, TensorFunction):
            if (other.vertex_count, other.arity) != (self.vertex_count, self.arity):
                raise InvalidInputError("tensor domains differ")
            return TensorFunction(self.vertex_count, self.arity, self.values + other.values)
        return TensorFunction(self.vertex_count, self.arity, self.values + float(other))

    def __mul__(self, other):
        if isinstance(other, TensorFunction):
            if (other.vertex_count, other.arity) != (self.vertex_count, self.arity):
                raise InvalidInputError("tensor domains differ")
            return TensorFunction(self.vertex_count, self.arity, self.values * other.values)
        return TensorFunction(self.vertex_count, self.arity, self.values * float(other))

    __rmul__ = __mul__


def tensor_pattern_keys(s: int) -> list[tuple[int, ...]]:
    """All coordinate patterns in {1,2}^s except the diagonal (1,...,1)."""
    return [w for w in itertools.product((1, 2), repeat=s) if w != (1,) * s]


def cube_vertex_keys(s: int, include_zero: bool = False) -> list[tuple[int, ...]]:
    """Cube vertices in {0,1}^s, optionally without the origin."""
    keys = list(itertools.product((0, 1), repeat=s))
    if not include_zero:
        keys = [w for w in keys if w != (0,) * s]
    return keys


@dataclass(frozen=True)
class DualFamily:
    """A family of [-1,1]-valued factors indexed by cube words.

    Tensor-side families use pattern keys in {1,2}^s without the diagonal;
    group-side weak-norm families use vertex keys in {0,1}^s without the
    origin.  Member arrays are read-only after construction.
    """

    arity: int
    members: dict

    def __post_init__(self):
        s = int(self.arity)
        members = {}
        keys = sorted(self.members.keys())
        expected_tensor = sorted(tensor_pattern_keys(s))
        expected_cube = sorted(cube_vertex_keys(s))
        if keys not in (expected_tensor, expected_cube):
            raise InvalidInputError(
                f"family keys must be the {2**s - 1} nondiagonal patterns of arity {s}"
            )
        shapes = set()
        for key in keys:
            arr = np.asarray(self.members[key], dtype=np.float64)
            if np.max(np.abs(arr), initial=0.0) > 1.0 + 1e-9:
                raise InvalidParameterError("family members must take values in [-1, 1]")
            arr = arr.copy()
            arr.flags.writeable = False
            members[tuple(int(v) for v in key)] = arr
            shapes.add(arr.shape)
        if len(shapes) > 1:
            raise InvalidInputError("family members must share one shape")
        object.__setattr__(self, "arity", s)
        object.__setattr__(self, "members", members)

    @property
    def side(self) -> str:
        key = next(iter(sorted(self.members)))
        return "tensor" if min(key) >= 1 else "group"

    def to_payload(self) -> dict:
        return {
            "arity": self.arity,
            "members": {
                "".join(str(v) for v in key): np.asarray(arr).reshape(-1).tolist()
                for key, arr in sorted(self.members.items())
            },
        }


# ---------------------------------------------------------------------------
# box norms


def _box_power(values: np.ndarray, ell: int, cost: list) -> float:
    """The ell^s-fold box product average, folding the trailing axis first."""
    s = values.ndim
    if s == 1:
        cost[0] += values.size
        return float(np.mean(values)) ** ell
    n = values.shape[-1]
    if s == 2:
        # P accumulates prod_j W[a, b_j] over the ell trailing copies
        P = values.reshape(n, -1)
        for _ in range(ell - 1):
            P = (P[:, :, None] * values[:, None, :]).reshape(n, -1)
            cost[0] += P.size
        Q = P.mean(axis=0)
        cost[0] += P.size + Q.size
        return float(np.mean(Q**ell))
    total = 0.0
    for combo in itertools.product(range(n), repeat=ell):
        sub = values[..., combo[0]]
        for j in combo[1:]:
            sub = sub * values[..., j]
            cost[0] += sub.size
        total += _box_power(sub, ell, cost)
    return total / n**ell


def box_norm_ell(tensor: TensorFunction, ell: int) -> NormResult:
    """The ell-box norm: the ell^s-fold grid product average to the 1/ell^s power."""
    if ell < 2 or ell % 2 != 0:
        raise InvalidParameterError(f"ell must be an even integer >= 2, got {ell}")
    n, s = tensor.vertex_count, tensor.arity
    if s < 2:
        raise InvalidParameterError("box norms need arity >= 2")
    work = ell * n ** (ell * (s - 1) + 1)
    if work > budgets.TENSOR_ENTRY_BUDGET:
        raise BudgetExceededError(
            f"box contraction work {work} exceeds budget {budgets.TENSOR_ENTRY_BUDGET}"
        )
    cost = [0]
    power = _box_power(tensor.values, ell, cost)
    if power < 0.0:
        if power < -1e-12:
            raise ArithmeticError(f"box power {power} below the float tolerance floor")
        power = 0.0
    return NormResult(power ** (1.0 / ell**s), METHOD_CONTRACTION, cost[0])


def box_norm(tensor: TensorFunction) -> NormResult:
    """The classical box norm (ell = 2)."""
    return box_norm_ell(tensor, 2)


def multi_box_correlation(tensors: dict) -> float:
    """Grid correlation E prod_omega F_omega(pi_omega(x)) over x in V^{s x ell}.

    tensors maps every omega in [ell]^s (1-based entries) to a tensor on V^s.
    """
    keys = sorted(tensors.keys())
    if not keys:
        raise InvalidInputError("empty tensor family")
    s = len(keys[0])
    ell = max(max(k) for k in keys)
    expected = sorted(itertools.product(range(1, ell + 1), repeat=s))
    if keys != expected:
        raise InvalidInputError(f"family must cover the full grid [{ell}]^{s}")
    arrays = {}
    n = None
    for key in keys:
        t = tensors[key]
        arr = t.values if isinstance(t, TensorFunction) else np.asarray(t, dtype=np.float64)
        if arr.ndim != s:
            raise InvalidInputError("tensor arity does not match family keys")
        if n is None:
            n = arr.shape[0]
        if arr.shape != (n,) * s:
            raise InvalidInputError("tensors must share one vertex set")
        arrays[key] = arr
    if ell * n ** (ell * (s - 1) + 1) > budgets.TENSOR_ENTRY_BUDGET:
        raise BudgetExceededError("grid correlation exceeds the contraction budget")
    return _multi_corr(arrays, n, ell, s)


def _multi_corr(arrays: dict, n: int, ell: int, s: int) -> float:
    if s == 1:
        out = 1.0
        for j in range(1, ell + 1):
            out *= float(np.mean(arrays[(j,)]))
        return out
    total = 0.0
    prefixes = list(itertools.product(range(1, ell + 1), repeat=s - 1))
    for combo in itertools.product(range(n), repeat=ell):
        merged = {}
        for pre in prefixes:
            sub = arrays[pre + (1,)][..., combo[0]]
            for j in range(2, ell + 1):
                sub = sub * arrays[pre + (j,)][..., combo[j - 1]]
            merged[pre] = sub
        total += _multi_corr(merged, n, ell, s - 1)
    return total / n**ell


# ---------------------------------------------------------------------------
# cut norm


def _sign_block(start: int, count: int, nbits: int) -> np.ndarray:
    """Rows start..start+count-1 of the +-1 assignment table with nbits columns."""
    idx = np.arange(start, start + count, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(nbits)[None, :]) & 1
    return bits.astype(np.float64) * 2.0 - 1.0


def _sign_of(arr: np.ndarray) -> np.ndarray:
    """sign with ties broken toward +1."""
    return np.where(arr >= 0.0, 1.0, -1.0)


def _pattern_index_tables(n: int, s: int) -> dict:
    """Flat V^s indices of pi_omega(x) for every omega in {1,2}^s, x in V^{s x 2}."""
    count = n ** (2 * s)
    if count > budgets.TUPLE_TABLE_BUDGET:
        raise BudgetExceededError("pattern table too large")
    codes = np.arange(count, dtype=np.int64)
    digits = []
    for pos in range(2 * s):  # row-major over (i, j) pairs
        w = n ** (2 * s - 1 - pos)
        digits.append((codes // w) % n)
    tables = {}
    for omega in itertools.product((1, 2), repeat=s):
        idx = np.zeros(count, dtype=np.int64)
        for i, wi in enumerate(omega):
            idx = idx * n + digits[2 * i + (wi - 1)]
        tables[omega] = idx
    return tables


def _cut_exact_rank_one(values: np.ndarray) -> tuple[float, np.ndarray, np.ndarray, int]:
    """Exact arity-2 cut norm: max over sign vectors t of E_a |E_b F(a,b) t(b)|.

    The sup over full [-1,1] families reduces to this rank-one form; see the
    tests for the cross-check against raw family enumeration.
    """
    n = values.shape[0]
    if n > budgets.COLLAPSE_SIGN_BITS:
        raise BudgetExceededError(
            f"rank-one enumeration needs 2^{n} sign vectors, budget is 2^{budgets.COLLAPSE_SIGN_BITS}"
        )
    best = -1.0
    best_t = None
    cost = 0
    total = 1 << n
    chunk = min(total, 1 << 14)
    for start in range(0, total, chunk):
        count = min(chunk, total - start)
        T = _sign_block(start, count, n)
        S = values @ T.T  # (n, count): sum_b F(a,b) t(b)
        vals = np.abs(S).mean(axis=0) / n
        cost += n * n * count
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            best_t = T[k].copy()
    rho = _sign_of(values @ best_t)
    return best, rho, best_t, cost


def _rank_one_family(n: int, rho: np.ndarray, t: np.ndarray) -> DualFamily:
    ones = np.ones((n, n))
    return DualFamily(
        2,
        {
            (1, 2): np.broadcast_to(rho[:, None], (n, n)).copy(),
            (2, 1): np.broadcast_to(t[None, :], (n, n)).copy(),
            (2, 2): ones,
        },
    )


def evaluate_cut_objective(tensor: TensorFunction, family: DualFamily) -> float:
    """E[F(pi_diag(x)) prod_omega H_omega(pi_omega(x))] over x in V^{s x 2}."""
    n, s = tensor.vertex_count, tensor.arity
    if family.arity != s or family.side != "tensor":
        raise InvalidInputError("family does not match the tensor arity")
    if s == 2:
        F = tensor.values
        A = family.members[(1, 2)]
        B = family.members[(2, 1)]
        C = family.members[(2, 2)]
        return float(np.sum(F * (A @ (B.T @ C).T)) / n**4)
    tables = _pattern_index_tables(n, s)
    probe = tensor.values.reshape(-1)[tables[(1,) * s]].astype(np.float64)
    for omega in tensor_pattern_keys(s):
        probe = probe * family.members[omega].reshape(-1)[tables[omega]]
    return float(np.mean(probe))


def _cut_raw_exhaustive(tensor: TensorFunction) -> tuple[float, DualFamily, int]:
    n, s = tensor.vertex_count, tensor.arity
    keys = tensor_pattern_keys(s)
    member_size = n**s
    nbits = len(keys) * member_size
    if nbits > budgets.EXHAUSTIVE_SIGN_BITS:
        raise BudgetExceededError(
            f"raw cut search needs {nbits} sign bits, budget is {budgets.EXHAUSTIVE_SIGN_BITS}"
        )
    tables = _pattern_index_tables(n, s)
    base = tensor.values.reshape(-1)[tables[(1,) * s]].astype(np.float64)
    total = 1 << nbits
    best = -np.inf
    best_assign = None
    cost = 0
    chunk = 1 << 12
    for start in range(0, total, chunk):
        count = min(chunk, total - start)
        signs = _sign_block(start, count, nbits)
        probe = np.broadcast_to(base[None, :], (count, base.size)).copy()
        for m, omega in enumerate(keys):
            member = signs[:, m * member_size : (m + 1) * member_size]
            probe *= member[:, tables[omega]]
            cost += probe.size
        vals = probe.mean(axis=1)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            best_assign = signs[k].copy()
    members = {
        omega: best_assign[m * member_size : (m + 1) * member_size].reshape((n,) * s)
        for m, omega in enumerate(keys)
    }
    return best, DualFamily(s, members), cost


def _cut_alternating(
    tensor: TensorFunction, restarts: int, seed: int
) -> tuple[float, DualFamily, int]:
    n, s = tensor.vertex_count, tensor.arity
    rng = np.random.default_rng(seed)
    keys = tensor_pattern_keys(s)
    cost = 0
    best = -np.inf
    best_members = None
    if s != 2:
        tables = _pattern_index_tables(n, s)
        base = tensor.values.reshape(-1).astype(np.float64)
        diag = tables[(1,) * s]
    for _ in range(restarts):
        members = {
            k: rng.integers(0, 2, size=(n,) * s).astype(np.float64) * 2.0 - 1.0
            for k in keys
        }
        prev = -np.inf
        for _sweep in range(500):
            if s == 2:
                F = tensor.values
                A, B, C = members[(1, 2)], members[(2, 1)], members[(2, 2)]
                members[(1, 2)] = A = _sign_of(F @ (B.T @ C))
                members[(2, 1)] = B = _sign_of((A @ C.T).T @ F)
                members[(2, 2)] = C = _sign_of(B @ (F.T @ A))
                value = float(np.sum(F * (A @ (B.T @ C).T)) / n**4)
                cost += 4 * n**3
            else:
                for omega in keys:
                    probe = base[diag]
                    for other in keys:
                        if other != omega:
                            probe = probe * members[other].reshape(-1)[tables[other]]
                    marg = np.bincount(tables[omega], weights=probe, minlength=n**s)
                    members[omega] = _sign_of(marg).reshape((n,) * s)
                    cost += probe.size * len(keys)
                probe = base[diag]
                for other in keys:
                    probe = probe * members[other].reshape(-1)[tables[other]]
                value = float(np.mean(probe))
            if value <= prev + 1e-12:
                break
            prev = value
        if prev > best:
            best = prev
            best_members = {k: v.copy() for k, v in members.items()}
    return best, DualFamily(s, best_members), cost


def cut_norm(
    tensor: TensorFunction,
    mode: str = "auto",
    restarts: int = 32,
    seed: int = 7,
) -> WeakNormEstimate:
    """Cut norm of a tensor: sup of grid correlations against [-1,1] families.

    exhaustive is exact (rank-one reduction at arity 2, raw enumeration
    otherwise); alternating returns a certified lower bound with its witness.
    """
    n, s = tensor.vertex_count, tensor.arity
    if s < 2:
        raise InvalidParameterError("cut norms need arity >= 2")
    if mode not in ("auto", "exhaustive", "alternating"):
        raise InvalidParameterError(f"unknown mode {mode!r}")
    if mode == "auto":
        if s == 2 and n <= budgets.COLLAPSE_SIGN_BITS:
            mode = "exhaustive"
        elif (2**s - 1) * n**s <= budgets.EXHAUSTIVE_SIGN_BITS:
            mode = "exhaustive"
        else:
            mode = "alternating"
    if mode == "exhaustive":
        if s == 2:
            value, rho, t, cost = _cut_exact_rank_one(tensor.values)
            witness = _rank_one_family(n, rho, t)
            achieved = evaluate_cut_objective(tensor, witness)
            return WeakNormEstimate(achieved, witness, True, cost)
        value, witness, cost = _cut_raw_exhaustive(tensor)
        return WeakNormEstimate(value, witness, True, cost)
    value, witness, cost = _cut_alternating(tensor, restarts, seed)
    return WeakNormEstimate(value, witness, False, cost)


# ---------------------------------------------------------------------------
# lifts


def lift_to_tensor(f: GroupFunction, s: int) -> TensorFunction:
    """The s-variable lift T(x_1, ..., x_s) = f(x_1 + ... + x_s)."""
    if s < 2:
        raise InvalidParameterError("lift arity must be >= 2")
    n = f.group.order
    if n**s > budgets.TENSOR_ENTRY_BUDGET:
        raise BudgetExceededError(f"lift would materialize {n**s} entries")
    codes = np.arange(n, dtype=np.int64)
    acc = codes
    for _ in range(s - 1):
        acc = f.group.add(acc[..., None], codes)
    return TensorFunction(n, s, f.values[acc])


# ---------------------------------------------------------------------------
# serialization


def tensor_to_payload(tensor: TensorFunction) -> dict:
    return {
        "vertex_count": tensor.vertex_count,
        "arity": tensor.arity,
        "values": [float(v) for v in tensor.values.reshape(-1)],
    }


def tensor_from_payload(payload: dict) -> TensorFunction:
    try:
        n = payload["vertex_count"]
        s = payload["arity"]
        values = payload["values"]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed tensor payload: {exc}") from exc
    return TensorFunction(int(n), int(s), np.asarray(values, dtype=np.float64))


def load_tensor(path: str) -> TensorFunction:
    with open(path) as fh:
        return tensor_from_payload(json.load(fh))


def dump_tensor(tensor: TensorFunction, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(tensor_to_payload(tensor), fh)
        fh.write("\n")
