"""Instability stratification for linearized torus and SL actions.

Everything is combinatorial: a point of projective space enters only
through its support (which homogeneous coordinates vanish), which is all
the stratum membership predicates depend on. The module computes the
index set labelling the strata, assigns strata to supports for torus
actions, tests membership in the fixed locus Z and its attracting set Y,
and certifies that small weight perturbations refine the stratification.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import isqrt
from typing import Optional, Sequence

from .convexgeo import (
    InnerProduct,
    Vector,
    closest_point,
    vec_json,
    vec_sub,
    vector,
    weyl_representative,
)
from .errors import (
    CapacityError,
    DimensionError,
    NotInYError,
    PerturbationTooLargeError,
)
from .ratpoly import rat_str

TORUS = "torus"
SPECIAL_LINEAR = "special_linear"


class WeightSystem:
    """Weights of a diagonalized linear action together with the pairing."""

    def __init__(
        self,
        weights: Sequence[Sequence],
        ip: Optional[InnerProduct] = None,
        group_kind: str = TORUS,
    ):
        ws = tuple(vector(w) for w in weights)
        if not ws:
            raise DimensionError("a weight system needs at least one weight")
        d = len(ws[0])
        if any(len(w) != d for w in ws):
            raise DimensionError("weights of mixed dimension")
        if ip is None:
            ip = InnerProduct.identity(d)
        if ip.dim != d:
            raise DimensionError("pairing dimension does not match the weights")
        if group_kind not in (TORUS, SPECIAL_LINEAR):
            raise DimensionError(f"unknown group kind {group_kind!r}")
        if group_kind == SPECIAL_LINEAR and d >= 2:
            for w in ws:
                if sum(w) != 0:
                    raise DimensionError(
                        "special-linear weights must have zero coordinate sum"
                    )
        self.weights = ws
        self.ip = ip
        self.group_kind = group_kind
        self.dim = d

    def __len__(self) -> int:
        return len(self.weights)

    def normalize(self, v: Vector) -> Vector:
        """Positive-chamber representative of the Weyl orbit of v."""
        if self.group_kind == SPECIAL_LINEAR and self.dim == 1:
            # rank-one model of SL(2): the Weyl group acts by sign flip
            return (abs(v[0]),)
        return weyl_representative(v)

    @classmethod
    def from_json(cls, data: dict) -> "WeightSystem":
        kind = {"torus": TORUS, "sl": SPECIAL_LINEAR}.get(
            data.get("group", "torus"), data.get("group", "torus")
        )
        ip = None
        if "gram" in data and data["gram"] is not None:
            ip = InnerProduct(data["gram"])
        return cls(data["weights"], ip=ip, group_kind=kind)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "gram": self.ip.to_json(),
            "weights": [vec_json(w) for w in self.weights],
            "group": "sl" if self.group_kind == SPECIAL_LINEAR else "torus",
        }


# A support is the set of nonvanishing homogeneous coordinates.
Support = frozenset


def _check_support(ws: WeightSystem, support) -> frozenset:
    s = frozenset(support)
    if not s:
        raise DimensionError("support must be nonempty")
    if any(not (0 <= i < len(ws.weights)) for i in s):
        raise DimensionError("support index out of range")
    return s


def _all_subsets(n: int):
    for size in range(1, n + 1):
        yield from combinations(range(n), size)


@dataclass(frozen=True)
class IndexSet:
    """The finite set of stratum labels with one hull witness per label."""

    indices: tuple[Vector, ...]
    witnesses: dict

    def to_json(self) -> dict:
        return {
            "indices": [vec_json(v) for v in self.indices],
            "witnesses": {
                ",".join(vec_json(v)): sorted(self.witnesses[v])
                for v in self.indices
            },
        }


def _raw_labels(ws: WeightSystem, cap: int) -> dict:
    """Closest-point label of every nonempty weight subset, unnormalized.

    Returns a map label -> first witnessing subset in (size, lex) order.
    """
    if len(ws.weights) > cap:
        raise CapacityError(
            f"{len(ws.weights)} weights exceed the enumeration cap {cap}"
        )
    labels: dict = {}
    for subset in _all_subsets(len(ws.weights)):
        sol = closest_point([ws.weights[i] for i in subset], ws.ip)
        if sol.point not in labels:
            labels[sol.point] = subset
    return labels


def index_set(ws: WeightSystem, cap: int = 20) -> IndexSet:
    """All stratum indices: Weyl-normalized closest points to the origin
    of convex hulls of nonempty subsets of the weights."""
    raw = _raw_labels(ws, cap)
    normalized: dict = {}
    for label, subset in raw.items():
        rep = ws.normalize(label)
        if rep not in normalized:
            normalized[rep] = subset
    order = sorted(normalized, key=lambda v: tuple(v))
    return IndexSet(indices=tuple(order), witnesses=normalized)


def torus_stratum(ws: WeightSystem, support) -> Vector:
    """Stratum label of a support under a torus action: the closest point
    to the origin of the hull of its weights (no Weyl normalization)."""
    s = _check_support(ws, support)
    sol = closest_point([ws.weights[i] for i in sorted(s)], ws.ip)
    beta = sol.point
    bb = ws.ip.norm_sq(beta)
    # consequences of the variational inequality, sanity-checked
    assert all(ws.ip.dot(ws.weights[i], beta) >= bb for i in s)
    assert bb == 0 or any(ws.ip.dot(ws.weights[i], beta) == bb for i in s)
    return beta


def z_membership(ws: WeightSystem, beta, support) -> bool:
    """True iff every support weight pairs exactly ||beta||^2 with beta."""
    s = _check_support(ws, support)
    b = vector(beta)
    bb = ws.ip.norm_sq(b)
    return all(ws.ip.dot(ws.weights[i], b) == bb for i in s)


def y_membership(ws: WeightSystem, beta, support) -> bool:
    """True iff all support weights pair >= ||beta||^2 with beta and at
    least one pairs exactly."""
    s = _check_support(ws, support)
    b = vector(beta)
    bb = ws.ip.norm_sq(b)
    pairings = [ws.ip.dot(ws.weights[i], b) for i in s]
    return all(p >= bb for p in pairings) and any(p == bb for p in pairings)


def p_beta_retraction(ws: WeightSystem, beta, support) -> frozenset:
    """Retract a support in the attracting set onto the fixed locus:
    keep exactly the coordinates whose weights pair to ||beta||^2."""
    s = _check_support(ws, support)
    if not y_membership(ws, beta, s):
        raise NotInYError("support is not in the attracting set of beta")
    b = vector(beta)
    bb = ws.ip.norm_sq(b)
    out = frozenset(i for i in s if ws.ip.dot(ws.weights[i], b) == bb)
    assert z_membership(ws, b, out)
    return out


def sqrt_bounds(q: Fraction, scale: int = 10**6) -> tuple[Fraction, Fraction]:
    """Certified rational bracket [lo, hi] around sqrt(q), q >= 0.

    Exact (lo == hi) when q is a perfect square of a rational; otherwise
    the bracket width is at most 1/(denominator * scale).
    """
    if q < 0:
        raise DimensionError("square root of a negative rational")
    a, b = q.numerator, q.denominator
    target = a * b * scale * scale
    s = isqrt(target)
    lo = Fraction(s, b * scale)
    if s * s == target:
        return lo, lo
    return lo, Fraction(s + 1, b * scale)


@dataclass(frozen=True)
class EpsilonBounds:
    """Certified perturbation tolerances. None stands for +infinity
    (an empty minimum); epsilon itself is always finite and positive."""

    epsilon0: Optional[Fraction]
    epsilon1: Optional[Fraction]
    M: Fraction
    epsilon: Fraction

    def to_json(self) -> dict:
        inf = "inf"

        def enc(x):
            return inf if x is None else rat_str(x)

        return {
            "epsilon0": enc(self.epsilon0),
            "epsilon1": enc(self.epsilon1),
            "M": rat_str(self.M),
            "epsilon": rat_str(self.epsilon),
        }


def epsilon_bounds(ws: WeightSystem, cap: int = 20, scale: int = 10**6) -> EpsilonBounds:
    """The three tolerances controlling how far the weights may move
    before the stratification can coarsen:

      epsilon0 = min positive gap ||beta||^2 - alpha_i . beta,
      epsilon1 = min gap between distinct index norms (certified lower
                 bound via rational square-root bracketing),
      M        = upper bound for max_i ||alpha_i||,
      epsilon  = min{1, epsilon0/(4M+1), epsilon1/3}.
    """
    labels = list(_raw_labels(ws, cap))
    eps0: Optional[Fraction] = None
    for beta in labels:
        bb = ws.ip.norm_sq(beta)
        for alpha in ws.weights:
            gap = bb - ws.ip.dot(alpha, beta)
            if gap > 0 and (eps0 is None or gap < eps0):
                eps0 = gap
    norm_sqs = sorted({ws.ip.norm_sq(beta) for beta in labels})
    eps1: Optional[Fraction] = None
    for n1, n2 in combinations(norm_sqs, 2):
        # |sqrt(n2) - sqrt(n1)| = (n2 - n1)/(sqrt(n2) + sqrt(n1));
        # bounding the denominator above gives a certified lower bound
        up = sqrt_bounds(n1, scale)[1] + sqrt_bounds(n2, scale)[1]
        bound = (n2 - n1) / up
        if eps1 is None or bound < eps1:
            eps1 = bound
    m_up = sqrt_bounds(max(ws.ip.norm_sq(a) for a in ws.weights), scale)[1]
    eps = Fraction(1)
    if eps0 is not None:
        eps = min(eps, eps0 / (4 * m_up + 1))
    if eps1 is not None:
        eps = min(eps, eps1 / 3)
    return EpsilonBounds(epsilon0=eps0, epsilon1=eps1, M=m_up, epsilon=eps)


def certified_radius(eb: EpsilonBounds) -> Fraction:
    """A weight-perturbation radius inside which refinement is certified:
    half of min{epsilon, epsilon^2/(2M)} (the second term enforces that
    perturbed stratum labels stay within epsilon of unperturbed ones)."""
    r = eb.epsilon
    if eb.M > 0:
        r = min(r, eb.epsilon * eb.epsilon / (2 * eb.M))
    return r / 2


@dataclass(frozen=True)
class RefinementReport:
    """Per-support comparison of the perturbed and original strata."""

    refines: bool
    epsilon: EpsilonBounds
    max_shift_sq: Fraction
    entries: tuple  # (support, gamma, beta, predicted_beta, agrees)

    def to_json(self) -> dict:
        return {
            "refines": self.refines,
            "epsilon": self.epsilon.to_json(),
            "max_shift_sq": rat_str(self.max_shift_sq),
            "entries": [
                {
                    "support": sorted(s),
                    "gamma": vec_json(g),
                    "beta": vec_json(b),
                    "predicted_beta": vec_json(p),
                    "agrees": ok,
                }
                for (s, g, b, p, ok) in self.entries
            ],
        }


def check_refinement(
    ws: WeightSystem, ws_perturbed: WeightSystem, cap: int = 12
) -> RefinementReport:
    """Brute-force check that the perturbed stratification refines the
    original one.

    For every support, the perturbed label gamma must determine the
    original label: the original stratum of the support has to coincide
    with the closest point to the origin of the hull of the original
    weights sitting over gamma's attracting index set. The perturbation
    magnitude must lie inside the certified radius, compared on squares
    so the check is exact.
    """
    if len(ws.weights) != len(ws_perturbed.weights) or ws.dim != ws_perturbed.dim:
        raise DimensionError("weight systems of different shapes")
    n = len(ws.weights)
    if n > cap:
        raise CapacityError(f"{n} weights exceed the enumeration cap {cap}")

    eb = epsilon_bounds(ws)
    d_sq = max(
        ws.ip.norm_sq(vec_sub(a, b))
        for a, b in zip(ws.weights, ws_perturbed.weights)
    )
    eps = eb.epsilon
    # conditions: d < epsilon and 2 d M < epsilon^2, both on squares
    if not (d_sq < eps * eps):
        raise PerturbationTooLargeError(
            f"max weight shift squared {d_sq} is not below epsilon^2 {eps * eps}"
        )
    if eb.M > 0 and not (4 * d_sq * eb.M * eb.M < eps**4):
        raise PerturbationTooLargeError(
            f"shift violates the projection bound: 4 d^2 M^2 = "
            f"{4 * d_sq * eb.M * eb.M} is not below epsilon^4 {eps**4}"
        )

    entries = []
    by_gamma: dict = {}
    refines = True
    for subset in _all_subsets(n):
        support = frozenset(subset)
        gamma = torus_stratum(ws_perturbed, support)
        beta = torus_stratum(ws, support)
        if gamma not in by_gamma:
            gg = ws_perturbed.ip.norm_sq(gamma)
            attract = [
                i
                for i in range(n)
                if ws_perturbed.ip.dot(ws_perturbed.weights[i], gamma) >= gg
            ]
            sol = closest_point([ws.weights[i] for i in attract], ws.ip)
            by_gamma[gamma] = sol.point
        predicted = by_gamma[gamma]
        ok = beta == predicted
        refines = refines and ok
        entries.append((support, gamma, beta, predicted, ok))
    return RefinementReport(
        refines=refines, epsilon=eb, max_shift_sq=d_sq, entries=tuple(entries)
    )
