"""Pseudorandom majorants: generation, deviation certificates, attenuation.

A majorant nu is a nonnegative function meant to dominate the objects under
study; its usefulness is quantified by how small nu - 1 is in strong norms.
Certificates are pure measurements: they record deviations, never verdicts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boxnorms import TensorFunction, box_norm_ell
from .errors import (
    BudgetExceededError,
    InvalidInputError,
    InvalidMajorantError,
    InvalidParameterError,
)
from .groups import FiniteAbelianGroup, GroupFunction, lp_norm
from .uniformity import gowers_norm, uniformity_norm_ell

__all__ = [
    "MajorantSpec",
    "GeneratedMajorant",
    "MajorantCertificate",
    "PsiReference",
    "generate_majorant",
    "certify",
    "attenuate",
    "attenuate_to_deviation",
    "conjugate_exponent",
    "ell_for_group",
    "ell_for_tensor",
]

KINDS = ("constant-one", "perturbed", "sparse-set", "custom")


@dataclass(frozen=True)
class MajorantSpec:
    """Recipe for a majorant: kind, its parameter, and the generation seed."""

    kind: str
    epsilon: float | None = None
    delta: float | None = None
    seed: int = 0
    values: tuple | None = None  # custom kind only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown majorant kind {self.kind!r}")
        if self.kind == "perturbed":
            if self.epsilon is None or self.epsilon < 0:
                raise InvalidParameterError("perturbed majorants need epsilon >= 0")
        if self.kind == "sparse-set":
            if self.delta is None or not (0.0 < self.delta <= 1.0):
                raise InvalidParameterError("sparse-set density delta must lie in (0, 1]")
        if self.kind == "custom" and self.values is None:
            raise InvalidParameterError("custom majorants need explicit values")


@dataclass(frozen=True)
class GeneratedMajorant:
    """A generated majorant plus its provenance: spec, seed, and clip count."""

    function: GroupFunction | TensorFunction
    spec: MajorantSpec
    clip_count: int


def _generate_values(spec: MajorantSpec, size: int) -> tuple[np.ndarray, int]:
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "constant-one":
        return np.ones(size), 0
    if spec.kind == "perturbed":
        signs = rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0
        raw = 1.0 + spec.epsilon * signs
        clipped = np.maximum(raw, 0.0)
        return clipped, int(np.sum(raw < 0.0))
    if spec.kind == "sparse-set":
        mask = rng.random(size) < spec.delta
        if not mask.any():
            mask[int(rng.integers(0, size))] = True
        values = np.zeros(size)
        values[mask] = size / int(mask.sum())
        return values, 0
    values = np.asarray(spec.values, dtype=np.float64).ravel()
    if values.size != size:
        raise InvalidInputError(
            f"custom majorant has {values.size} values, domain needs {size}"
        )
    if np.min(values) < 0.0:
        raise InvalidMajorantError("custom majorant values must be nonnegative")
    return values.copy(), 0


def generate_majorant(spec: MajorantSpec, domain) -> GeneratedMajorant:
    """Instantiate a majorant on a group or on a tensor vertex power.

    domain is a FiniteAbelianGroup, or an (n, s) pair for a tensor on [n]^s.
    Sparse-set majorants normalize by the realized density so E[nu] = 1
    exactly; a draw that would produce the empty set gets one seeded element.
    """
    if isinstance(domain, FiniteAbelianGroup):
        values, clips = _generate_values(spec, domain.order)
        return GeneratedMajorant(GroupFunction(domain, values), spec, clips)
    n, s = domain
    values, clips = _generate_values(spec, int(n) ** int(s))
    return GeneratedMajorant(TensorFunction(int(n), int(s), values), spec, clips)


def conjugate_exponent(p: float) -> float:
    if p == np.inf or p == float("inf"):
        return 1.0
    if p <= 1.0:
        raise InvalidParameterError(f"exponent p must lie in (1, inf], got {p}")
    return p / (p - 1.0)


def ell_for_group(p: float) -> int:
    """Smallest even integer >= 2q with q the conjugate exponent of p."""
    q = conjugate_exponent(p)
    return 2 * int(np.ceil(q - 1e-12))


def ell_for_tensor(p: float) -> int:
    """Smallest even integer >= 2q + 2."""
    q = conjugate_exponent(p)
    return 2 * int(np.ceil(q + 1.0 - 1e-12))


@dataclass(frozen=True)
class PsiReference:
    """Reference density psi for relative certification, with its exponent data."""

    psi: GroupFunction | TensorFunction
    p: float

    def __post_init__(self):
        q = conjugate_exponent(self.p)
        object.__setattr__(self, "q", q)
        if isinstance(self.psi, GroupFunction):
            ell = ell_for_group(self.p)
            if lp_norm(self.psi, self.p) > 1.0 + 1e-9:
                raise InvalidInputError("reference psi must have unit L_p bound")
        else:
            ell = ell_for_tensor(self.p)
            if self.p == np.inf:
                bound = float(np.max(np.abs(self.psi.values)))
            else:
                bound = float(np.mean(np.abs(self.psi.values) ** self.p)) ** (1.0 / self.p)
            if bound > 1.0 + 1e-9:
                raise InvalidInputError("reference psi must have unit L_p bound")
        object.__setattr__(self, "ell", ell)


def default_psi(domain) -> PsiReference:
    """The constant-1 reference with p = inf; relative certification against it
    reduces to the absolute condition."""
    if isinstance(domain, FiniteAbelianGroup):
        return PsiReference(GroupFunction(domain, np.ones(domain.order)), np.inf)
    n, s = domain
    return PsiReference(TensorFunction(n, s, np.ones(n**s)), np.inf)


@dataclass(frozen=True)
class MajorantCertificate:
    """Measured deviations of a majorant; an entry is None when its norm
    computation exceeded the budget."""

    nu: GroupFunction | TensorFunction
    s: int
    deviations: dict = field(default_factory=dict)
    mean: float = 0.0

    def to_payload(self) -> dict:
        return {
            "s": self.s,
            "mean": self.mean,
            "deviations": {
                k: (None if v is None else float(v)) for k, v in self.deviations.items()
            },
        }


def certify(nu, s: int, psi: PsiReference | None = None) -> MajorantCertificate:
    """Measure the deviation of nu from 1 (and from psi when given) in the
    norms that quantify pseudorandomness at order s.

    Group side: u2s_dev = |nu-1|_{U^{2s}}, us4_dev = |nu-1| in the (s,4)
    lifted norm, psi_dev = |nu-psi|_{U^{ls}} with l derived from psi's
    exponent.  Tensor side: box4_dev = |nu-1|_{box_4}, psi_dev in box_l.
    Entries whose computation exceeds its budget are recorded as None.
    """
    s = int(s)
    if s < 2:
        raise InvalidParameterError(f"uniformity order s must be >= 2, got {s}")
    if np.min(nu.values) < -1e-12:
        raise InvalidMajorantError("majorant must be nonnegative")
    deviations: dict = {}
    if isinstance(nu, GroupFunction):
        group = nu.group
        dev_fn = GroupFunction(group, nu.values - 1.0)
        deviations["u2s_dev"] = gowers_norm(dev_fn, 2 * s).value
        try:
            deviations["us4_dev"] = uniformity_norm_ell(dev_fn, s, 4).value
        except BudgetExceededError:
            deviations["us4_dev"] = None
        if psi is None:
            psi = default_psi(group)
        if not isinstance(psi.psi, GroupFunction) or psi.psi.group != group:
            raise InvalidInputError("psi reference lives on the wrong domain")
        rel = GroupFunction(group, nu.values - psi.psi.values)
        try:
            if np.ptp(psi.psi.values) > 0.0:
                psi_norm = gowers_norm(psi.psi, psi.ell * s).value
                if psi_norm > 1.0 + 1e-9:
                    raise InvalidInputError(
                        "reference psi must have unit strong-norm bound"
                    )
            deviations["psi_dev"] = gowers_norm(rel, psi.ell * s).value
        except BudgetExceededError:
            deviations["psi_dev"] = None
    else:
        dev_fn = TensorFunction(nu.vertex_count, nu.arity, nu.values - 1.0)
        try:
            deviations["box4_dev"] = box_norm_ell(dev_fn, 4).value
        except BudgetExceededError:
            deviations["box4_dev"] = None
        if psi is None:
            psi = default_psi((nu.vertex_count, nu.arity))
        if (
            not isinstance(psi.psi, TensorFunction)
            or psi.psi.vertex_count != nu.vertex_count
            or psi.psi.arity != nu.arity
        ):
            raise InvalidInputError("psi reference lives on the wrong domain")
        rel = TensorFunction(nu.vertex_count, nu.arity, nu.values - psi.psi.values)
        try:
            deviations["psi_dev"] = box_norm_ell(rel, psi.ell).value
        except BudgetExceededError:
            deviations["psi_dev"] = None
    mean = float(np.mean(nu.values))
    return MajorantCertificate(nu, s, deviations, mean)


def attenuate(nu, factor: float):
    """1 + factor * (nu - 1): shrink the deviation by an exact factor.

    Every homogeneous deviation norm of the result is exactly factor times
    the original, so attenuation hits any target level without search.
    """
    if not (0.0 <= factor <= 1.0):
        raise InvalidParameterError(f"attenuation factor must lie in [0,1], got {factor}")
    values = 1.0 + factor * (nu.values - 1.0)
    if isinstance(nu, GroupFunction):
        return GroupFunction(nu.group, values)
    return TensorFunction(nu.vertex_count, nu.arity, values)


def attenuate_to_deviation(nu, s: int, eta: float):
    """Attenuate nu until its leading deviation is <= eta (exact when the raw
    deviation exceeds eta, identity otherwise).  Returns (nu_eta, factor)."""
    if eta <= 0:
        raise InvalidParameterError(f"target deviation must be positive, got {eta}")
    if isinstance(nu, GroupFunction):
        dev0 = gowers_norm(GroupFunction(nu.group, nu.values - 1.0), 2 * s).value
    else:
        dev0 = box_norm_ell(
            TensorFunction(nu.vertex_count, nu.arity, nu.values - 1.0), 4
        ).value
    factor = 1.0 if dev0 <= eta else eta / dev0
    return attenuate(nu, factor), factor
