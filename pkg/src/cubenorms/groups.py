"""Finite abelian groups as products of cyclic factors, and real functions on them.

Elements of Z_{n_1} x ... x Z_{n_d} are encoded as mixed-radix integers in
[0, n_1 * ... * n_d), with the last factor varying fastest.  All arithmetic is
vectorized over numpy arrays of codes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidElementError, InvalidInputError, InvalidParameterError

__all__ = [
    "FiniteAbelianGroup",
    "GroupFunction",
    "CubeIndex",
    "group_add",
    "average",
    "lp_norm",
    "function_to_payload",
    "function_from_payload",
    "load_function",
    "dump_function",
]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Product of cyclic groups, identified by its factor list."""

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(n) for n in self.factors)
        if len(factors) == 0:
            raise InvalidParameterError("group needs at least one cyclic factor")
        if any(n < 1 for n in factors):
            raise InvalidParameterError(f"cyclic factors must be >= 1, got {factors}")
        object.__setattr__(self, "factors", factors)
        # radix weights; last factor fastest-varying
        weights = []
        w = 1
        for n in reversed(factors):
            weights.append(w)
            w *= n
        object.__setattr__(self, "_weights", tuple(reversed(weights)))
        object.__setattr__(self, "_order", w)

    @property
    def order(self) -> int:
        return self._order

    @property
    def rank(self) -> int:
        return len(self.factors)

    def validate_codes(self, codes) -> np.ndarray:
        arr = np.asarray(codes)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise InvalidElementError(
                f"element codes must lie in [0, {self.order}), got range "
                f"[{arr.min()}, {arr.max()}]"
            )
        return arr

    def decode(self, codes) -> np.ndarray:
        """Mixed-radix digits of the given codes, stacked along a trailing axis."""
        arr = np.asarray(self.validate_codes(codes), dtype=np.int64)
        digits = [
            (arr // w) % n for n, w in zip(self.factors, self._weights)
        ]
        return np.stack(digits, axis=-1)

    def encode(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        if coords.shape[-1] != self.rank:
            raise InvalidInputError(
                f"coordinate tuples must have length {self.rank}, got {coords.shape[-1]}"
            )
        out = np.zeros(coords.shape[:-1], dtype=np.int64)
        for j, (n, w) in enumerate(zip(self.factors, self._weights)):
            out = out + (coords[..., j] % n) * w
        return out

    def add(self, a, b) -> np.ndarray:
        """Elementwise group addition of two (broadcastable) code arrays."""
        da = self.decode(a)
        db = self.decode(b)
        return self.encode(da + db)

    def negate(self, a) -> np.ndarray:
        da = self.decode(a)
        return self.encode(-da)

    def scale(self, a, k: int) -> np.ndarray:
        da = self.decode(a)
        return self.encode(k * da)


def group_add(group: FiniteAbelianGroup, a, b):
    """Add element codes within the group, validating ranges."""
    out = group.add(a, b)
    if np.isscalar(a) and np.isscalar(b):
        return int(out)
    return out


@dataclass(frozen=True)
class GroupFunction:
    """Real-valued function on a finite abelian group, immutable after construction."""

    group: FiniteAbelianGroup
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.shape[0] != self.group.order:
            raise InvalidInputError(
                f"values must be a flat array of length {self.group.order}, "
                f"got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("function values must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def grid(self) -> np.ndarray:
        """Values reshaped to one axis per cyclic factor (read-only view)."""
        return self.values.reshape(self.group.factors)

    def shifted(self, code: int) -> "GroupFunction":
        """The translate x -> f(x + t) for the element t with the given code."""
        return GroupFunction(self.group, roll_values(self.group, self.values, code))

    def __mul__(self, other):
        if isinstance(other, GroupFunction):
            if other.group != self.group:
                raise InvalidInputError("functions live on different groups")
            return GroupFunction(self.group, self.values * other.values)
        return GroupFunction(self.group, self.values * float(other))

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, GroupFunction):
            if other.group != self.group:
                raise InvalidInputError("functions live on different groups")
            return GroupFunction(self.group, self.values + other.values)
        return GroupFunction(self.group, self.values + float(other))

    def __sub__(self, other):
        if isinstance(other, GroupFunction):
            if other.group != self.group:
                raise InvalidInputError("functions live on different groups")
            return GroupFunction(self.group, self.values - other.values)
        return GroupFunction(self.group, self.values - float(other))

    def __rsub__(self, other):
        return GroupFunction(self.group, float(other) - self.values)


def roll_values(group: FiniteAbelianGroup, values: np.ndarray, code: int) -> np.ndarray:
    """Array of f(x + t): roll the factor-shaped grid by the digits of t."""
    digits = group.decode(int(code))
    grid = values.reshape(group.factors)
    rolled = np.roll(grid, shift=tuple(-int(d) for d in digits), axis=tuple(range(group.rank)))
    return rolled.reshape(-1)


@dataclass(frozen=True)
class CubeIndex:
    """A vertex selector of the s-dimensional combinatorial cube: a 0/1 word
    together with the side lengths h it is applied to."""

    omega: tuple[int, ...]
    sides: tuple[int, ...]

    def __post_init__(self):
        omega = tuple(int(w) for w in self.omega)
        sides = tuple(int(h) for h in self.sides)
        if any(w not in (0, 1) for w in omega):
            raise InvalidParameterError(f"cube word must be 0/1, got {omega}")
        if len(omega) != len(sides):
            raise InvalidInputError("cube word and side tuple must have equal length")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "sides", sides)

    @property
    def dimension(self) -> int:
        return len(self.omega)

    def offset(self, group: FiniteAbelianGroup) -> int:
        """The group element omega . h selected by this vertex."""
        total = 0
        for w, h in zip(self.omega, self.sides):
            if w:
                total = int(group.add(total, h))
        return total


def average(f: GroupFunction) -> float:
    """Mean of f over the group (pairwise summation via numpy)."""
    return float(np.mean(f.values))


def lp_norm(f: GroupFunction, p: float) -> float:
    """Normalized L_p norm, p in (1, inf]."""
    if p != math.inf and p <= 1:
        raise InvalidParameterError(f"lp_norm requires p > 1 or p = inf, got {p}")
    if p == math.inf:
        return float(np.max(np.abs(f.values)))
    return float(np.mean(np.abs(f.values) ** p) ** (1.0 / p))


def function_to_payload(f: GroupFunction) -> dict:
    return {
        "group": {"factors": list(f.group.factors)},
        "values": [float(v) for v in f.values],
    }


def function_from_payload(payload: dict) -> GroupFunction:
    try:
        factors = payload["group"]["factors"]
        values = payload["values"]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed function payload: {exc}") from exc
    group = FiniteAbelianGroup(tuple(int(n) for n in factors))
    return GroupFunction(group, np.asarray(values, dtype=np.float64))


def load_function(path: str) -> GroupFunction:
    with open(path) as fh:
        return function_from_payload(json.load(fh))


def dump_function(f: GroupFunction, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(function_to_payload(f), fh)
        fh.write("\n")
