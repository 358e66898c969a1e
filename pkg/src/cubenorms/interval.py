"""Uniformity norms on integer intervals, trapezoid cut-offs, and transference.

An interval function f: [N] -> R gets an intrinsic U^s norm by zero-extending
into a cyclic group Z_{N'} with N' > 2N (no cube wraps around, so the ratio
to the extended indicator's norm does not depend on which N' is used).  The
transference machinery decomposes the extension on Z_{N'} and truncates the
bounded part back to [N] through a trapezoidal cut-off phi whose Fourier
spectrum has small l1 mass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decompose import DecompositionResult, kvn_group
from .errors import (
    IntervalTooSmallError,
    InvalidInputError,
    InvalidParameterError,
    PreconditionError,
    PrimeSearchError,
)
from .groups import FiniteAbelianGroup, GroupFunction
from .results import NormResult
from .uniformity import gowers_norm

__all__ = [
    "IntervalFunction",
    "CutoffProfile",
    "TransferResult",
    "is_prime",
    "next_prime_at_least",
    "embed_interval",
    "interval_norm",
    "build_cutoff",
    "cutoff_fourier_bound",
    "transfer_kvn",
    "interval_to_payload",
    "interval_from_payload",
]

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(m: int) -> bool:
    """Deterministic Miller-Rabin; the fixed witness set decides correctly for
    every modulus below 3.3e14."""
    m = int(m)
    if m < 2:
        return False
    for p in _MR_WITNESSES:
        if m == p:
            return True
        if m % p == 0:
            return False
    d = m - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(r - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def next_prime_at_least(lo: int, hi: int | None = None) -> int:
    """Smallest prime >= lo; PrimeSearchError if none exists up to hi."""
    m = max(2, int(math.ceil(lo)))
    limit = int(hi) if hi is not None else 2 * m + 1000
    while m <= limit:
        if is_prime(m):
            return m
        m += 1
    raise PrimeSearchError(f"no prime in [{lo}, {limit}]")


@dataclass(frozen=True)
class IntervalFunction:
    """A function on the interval {1, ..., N}; values[i] is f(i+1)."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError(f"interval length must be >= 1, got {self.n}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.n,):
            raise InvalidInputError(
                f"interval function needs {self.n} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("interval function values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __sub__(self, other: "IntervalFunction") -> "IntervalFunction":
        if not isinstance(other, IntervalFunction) or other.n != self.n:
            raise InvalidInputError("interval mismatch")
        return IntervalFunction(self.n, self.values - other.values)


def interval_to_payload(f: IntervalFunction) -> dict:
    return {"n": f.n, "values": [float(v) for v in f.values]}


def interval_from_payload(payload: dict) -> IntervalFunction:
    return IntervalFunction(int(payload["n"]), np.asarray(payload["values"], dtype=np.float64))


def embed_interval(f: IntervalFunction, n_prime: int) -> GroupFunction:
    """Zero-extension into Z_{N'}: element m of [N] sits at code m."""
    if n_prime <= 2 * f.n:
        raise InvalidParameterError(
            f"modulus {n_prime} must exceed twice the interval length {f.n}"
        )
    group = FiniteAbelianGroup((int(n_prime),))
    values = np.zeros(n_prime)
    values[1 : f.n + 1] = f.values
    return GroupFunction(group, values)


def interval_norm(f: IntervalFunction, s: int, n_prime: int | None = None) -> NormResult:
    """The intrinsic U^s norm of f on [N]: the norm of the zero-extension
    divided by the norm of the extended indicator, on any Z_{N'} with
    N' > 2N."""
    if n_prime is None:
        n_prime = next_prime_at_least(2 * f.n + 1)
    n_prime = int(n_prime)
    tilde = embed_interval(f, n_prime)
    ones = embed_interval(IntervalFunction(f.n, np.ones(f.n)), n_prime)
    num = gowers_norm(tilde, s)
    den = gowers_norm(ones, s)
    return NormResult(num.value / den.value, num.method, num.cost + den.cost)


@dataclass(frozen=True)
class CutoffProfile:
    """Trapezoid phi on Z_{N'} (identified with {-k,...,k}): 0 up-ramp to 1
    across [-l+1, 1], plateau 1 on [1, 2L], down-ramp to 0 across
    [2L, 2L+l]."""

    n_prime: int
    l: int
    big_l: int
    values: GroupFunction
    alpha: float
    n0: int
    desk_fallback: bool

    def at(self, m: int) -> float:
        """phi at the signed position m."""
        return float(self.values.values[m % self.n_prime])


def build_cutoff(
    n: int,
    c: float,
    epsilon: float,
    s: int,
    paper_scale: bool = False,
    n_prime: int | None = None,
    widen_prime_search: bool = False,
) -> CutoffProfile:
    """Construct the cut-off profile for interval length n at oversampling c.

    The ramp length is l = floor(alpha*n) with alpha = (epsilon/(32c))^(2^s).
    At paper scale that needs n >= n0 = ceil(2/alpha); below n0 the default is
    the shortest valid ramp l = 2 (every profile invariant still holds), while
    paper_scale=True raises instead, reporting n0.
    """
    if c < 20:
        raise InvalidParameterError(f"oversampling constant must be >= 20, got {c}")
    if not (0.0 < epsilon <= 1.0):
        raise InvalidParameterError(f"epsilon must lie in (0, 1], got {epsilon}")
    if s < 2:
        raise InvalidParameterError(f"uniformity order s must be >= 2, got {s}")
    n = int(n)
    alpha = (epsilon / (32.0 * c)) ** (2**s)
    n0 = int(math.ceil(2.0 / alpha))
    l = int(math.floor(alpha * n))
    fallback = l < 2
    if fallback:
        if paper_scale:
            raise IntervalTooSmallError(
                n0, f"interval length {n} is below the admissible minimum {n0}"
            )
        l = 2
    big_l = (n + 1) // 2  # 2L is the least even integer >= n
    if n_prime is None:
        hi = None if widen_prime_search else int(math.floor(2 * c * n))
        n_prime = next_prime_at_least(int(math.ceil(c * n)), hi)
    n_prime = int(n_prime)
    if not is_prime(n_prime):
        raise InvalidParameterError(f"modulus {n_prime} is not prime")
    if n_prime < 2 * (2 * big_l + l) + 1:
        raise InvalidParameterError("modulus too small to hold the profile without wrap")
    values = np.zeros(n_prime)
    for m in range(-l + 1, 2):
        values[m % n_prime] = (m + l - 1) / l
    for m in range(1, 2 * big_l + 1):
        values[m % n_prime] = 1.0
    for m in range(2 * big_l, 2 * big_l + l + 1):
        values[m % n_prime] = (2 * big_l + l - m) / l
    group = FiniteAbelianGroup((n_prime,))
    return CutoffProfile(
        n_prime, l, big_l, GroupFunction(group, values), alpha, n0, fallback
    )


def cutoff_fourier_bound(profile: CutoffProfile) -> tuple[float, float]:
    """(measured l1 norm of phi-hat, the guaranteed bound 4L/l)."""
    phi_hat = np.fft.fft(profile.values.values) / profile.n_prime
    l1 = float(np.sum(np.abs(phi_hat)))
    bound = 4.0 * profile.big_l / profile.l
    if l1 > bound + 1e-9:
        raise ArithmeticError(
            f"Fourier l1 mass {l1} exceeds the trapezoid bound {bound}"
        )
    return l1, bound


@dataclass(frozen=True)
class TransferResult:
    """Interval-level decomposition: the bounded part restricted to [N], the
    cyclic-group decomposition behind it, and both sides of the residual
    bound."""

    h: IntervalFunction
    decomposition: DecompositionResult
    profile: CutoffProfile
    measured_residual: float
    assembled_bound: float
    components: dict

    def to_payload(self) -> dict:
        return {
            "h": interval_to_payload(self.h),
            "decomposition": self.decomposition.to_payload(),
            "n_prime": self.profile.n_prime,
            "l": self.profile.l,
            "big_l": self.profile.big_l,
            "measured_residual": self.measured_residual,
            "assembled_bound": self.assembled_bound,
            "components": {k: float(v) for k, v in self.components.items()},
            "converged": self.decomposition.converged,
        }


def transfer_kvn(
    f: IntervalFunction,
    nu: GroupFunction,
    s: int,
    c: float,
    epsilon: float,
    mode: str = "auto",
    restarts: int = 32,
    seed: int = 7,
    t_max: int | None = None,
    paper_scale: bool = False,
) -> TransferResult:
    """Decompose f on [N] through Z_{N'}: run the group-level split on the
    zero-extension, truncate the bounded part by the cut-off, and compare the
    measured interval residual against the assembled bound

        ( (4N/l) |ftilde - H|_{U^s} + (3l/(cN))^{1/2^s} ) / |1_[N]|_{U^s}.
    """
    n = f.n
    n_prime = nu.group.order
    if nu.group.rank != 1 or not is_prime(n_prime):
        raise InvalidParameterError("majorant must live on a prime cyclic group")
    if not (math.ceil(c * n) <= n_prime <= 2 * c * n):
        raise InvalidParameterError(
            f"modulus {n_prime} outside the admissible range [{c * n}, {2 * c * n}]"
        )
    tilde = embed_interval(f, n_prime)
    if np.max(np.abs(tilde.values) - nu.values) > 1e-9:
        raise PreconditionError("need |f| <= nu on the embedded interval")
    decomposition = kvn_group(
        tilde, nu, s, epsilon, mode=mode, restarts=restarts, seed=seed, t_max=t_max
    )
    big_h = decomposition.model
    h = IntervalFunction(n, big_h.values[1 : n + 1].copy())
    profile = build_cutoff(n, c, epsilon, s, paper_scale=paper_scale, n_prime=n_prime)
    phi = profile.values.values
    indicator = np.zeros(n_prime)
    indicator[1 : n + 1] = 1.0
    h_tilde = big_h.values * indicator
    lhs = tilde.values - h_tilde
    rhs = (tilde.values - big_h.values) * phi + big_h.values * (phi - indicator)
    identity_dev = float(np.max(np.abs(lhs - rhs)))
    l1, l1_bound = cutoff_fourier_bound(profile)
    diff_strong = gowers_norm(tilde - big_h, s).value
    normalizer = gowers_norm(
        GroupFunction(nu.group, indicator), s
    ).value
    c1 = (4.0 * n / profile.l) * diff_strong
    c2 = (3.0 * profile.l / (c * n)) ** (1.0 / 2**s)
    assembled = (c1 + c2) / normalizer
    measured = interval_norm(f - h, s, n_prime).value
    if measured > assembled + 1e-9:
        raise ArithmeticError(
            f"measured interval residual {measured} exceeds the assembled bound {assembled}"
        )
    components = {
        "ramp_component": c1,
        "support_component": c2,
        "normalizer": normalizer,
        "normalizer_floor": n / n_prime,
        "fourier_l1": l1,
        "fourier_l1_bound": l1_bound,
        "identity_deviation": identity_dev,
        "group_residual_strong": diff_strong,
    }
    return TransferResult(h, decomposition, profile, measured, assembled, components)
