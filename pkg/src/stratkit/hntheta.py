"""Stability calculus on symbolic sheaf profiles.

A profile is a formal polystable object: stable atoms (each reduced to
its Hilbert polynomial) arranged in layers of equal reduced Hilbert
polynomial, strictly decreasing across layers. The layer structure is
the Harder-Narasimhan filtration of the object. Subobjects are sub-sums
of atoms, which is the extremal family controlling the stability
inequalities; this is the testbed semantics, documented here once and
assumed throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterator, Optional, Sequence

from .errors import (
    CapacityError,
    DegreeError,
    NotAdaptedError,
    NotSLError,
    ProfileError,
    ShapeError,
    TwistTooSmallError,
)
from .quotmodel import HNType
from .ratpoly import (
    Polynomial,
    RationalLike,
    lex_compare,
    multiplicity,
    rat,
    rat_str,
    reduced_hp,
)


@dataclass(frozen=True)
class StableAtom:
    """A formal stable object: an opaque label and a Hilbert polynomial."""

    id: str
    poly: Polynomial

    def __post_init__(self):
        if self.poly.is_zero():
            raise DegreeError("atom polynomial must be nonzero")
        if multiplicity(self.poly, self.poly.degree) <= 0:
            raise DegreeError("atom multiplicity must be positive")

    @property
    def e(self) -> int:
        return self.poly.degree

    def reduced(self) -> Polynomial:
        return reduced_hp(self.poly, self.e)

    def to_json(self) -> dict:
        return {"id": self.id, "poly": self.poly.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "StableAtom":
        return cls(data["id"], Polynomial.from_json(data["poly"]))


class SheafProfile:
    """Stable atoms grouped into the layers of their filtration.

    Within a layer all atoms share one reduced Hilbert polynomial; the
    reduced polynomials strictly decrease from one layer to the next.
    """

    def __init__(self, layers: Sequence[Sequence[StableAtom]]):
        if not layers or any(not layer for layer in layers):
            raise ProfileError("layers must be nonempty")
        norm = []
        for layer in layers:
            atoms = sorted(layer, key=lambda a: (a.poly.coeffs, a.id))
            norm.append(tuple(atoms))
        flat = [a for layer in norm for a in layer]
        e = flat[0].e
        if any(a.e != e for a in flat):
            raise ProfileError("atoms of mixed degree")
        reduced = []
        for layer in norm:
            reds = {a.reduced() for a in layer}
            if len(reds) != 1:
                raise ProfileError(
                    "atoms within a layer must share one reduced polynomial"
                )
            reduced.append(next(iter(reds)))
        for a, b in zip(reduced, reduced[1:]):
            if lex_compare(a, b) <= 0:
                raise ProfileError(
                    "layer reduced polynomials must strictly decrease"
                )
        self.layers = tuple(norm)
        self.e = e
        self.reduced = tuple(reduced)

    @property
    def s(self) -> int:
        return len(self.layers)

    def atom_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def positions(self) -> list[tuple[int, int]]:
        """All atom occurrences as (layer, index-in-layer) pairs."""
        return [
            (i, j) for i, layer in enumerate(self.layers) for j in range(len(layer))
        ]

    def layer_polys(self) -> tuple[Polynomial, ...]:
        out = []
        for layer in self.layers:
            acc = Polynomial()
            for a in layer:
                acc = acc + a.poly
            out.append(acc)
        return tuple(out)

    def total(self) -> Polynomial:
        acc = Polynomial()
        for p in self.layer_polys():
            acc = acc + p
        return acc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SheafProfile):
            return NotImplemented
        return self.layers == other.layers

    def __repr__(self) -> str:
        return f"SheafProfile({[list(l) for l in self.layers]!r})"

    @classmethod
    def from_json(cls, data: dict) -> "SheafProfile":
        return cls(
            [[StableAtom.from_json(a) for a in layer] for layer in data["layers"]]
        )

    def to_json(self) -> dict:
        return {
            "e": self.e,
            "layers": [[a.to_json() for a in layer] for layer in self.layers],
        }


def hn_type(profile: SheafProfile) -> HNType:
    """The filtration type: per-layer sums of atom polynomials."""
    return HNType(profile.layer_polys(), profile.e)


def _reduced_cmp(p: Polynomial, rp: Fraction, q: Polynomial, rq: Fraction) -> int:
    """Compare p/rp with q/rq by cross multiplication (rp, rq > 0)."""
    return lex_compare(p * rq, q * rp)


def direct_sum_hn(
    a: SheafProfile, b: SheafProfile, case_log: Optional[dict] = None
) -> SheafProfile:
    """Profile of the direct sum: merge the two layer lists by strictly
    decreasing reduced Hilbert polynomial, pooling layers that tie.

    At each merge step the maximal destabilizing layer is (i) the head of
    the first summand, (ii) the head of the second, or (iii) their sum on
    equality; case_log, if given, counts how often each case fired.
    """
    if a.e != b.e:
        raise DegreeError("profiles of different degree")

    def log(case: str) -> None:
        if case_log is not None:
            case_log[case] = case_log.get(case, 0) + 1

    e = a.e
    la, lb = list(a.layers), list(b.layers)
    merged: list[tuple[StableAtom, ...]] = []
    while la and lb:
        pa = _layer_sum(la[0])
        pb = _layer_sum(lb[0])
        cmp = _reduced_cmp(
            pa, multiplicity(pa, e), pb, multiplicity(pb, e)
        )
        if cmp > 0:
            log("i")
            merged.append(la.pop(0))
        elif cmp < 0:
            log("ii")
            merged.append(lb.pop(0))
        else:
            log("iii")
            merged.append(la.pop(0) + lb.pop(0))
    merged.extend(la)
    merged.extend(lb)
    return SheafProfile(merged)


def _layer_sum(layer: Sequence[StableAtom]) -> Polynomial:
    acc = Polynomial()
    for a in layer:
        acc = acc + a.poly
    return acc


@dataclass(frozen=True)
class SubProfile:
    """A sub-sum of atoms of a parent profile, with its generalized type
    (per-layer sums, zero polynomial marking skipped layers)."""

    selection: tuple[tuple[int, int], ...]
    gen_type: tuple[Polynomial, ...]

    def to_json(self) -> dict:
        return {
            "selection": [list(pos) for pos in self.selection],
            "gen_type": [p.to_json() for p in self.gen_type],
        }


def _gen_type(
    profile: SheafProfile, selection: Sequence[tuple[int, int]]
) -> tuple[Polynomial, ...]:
    sums = [Polynomial() for _ in profile.layers]
    for i, j in selection:
        sums[i] = sums[i] + profile.layers[i][j].poly
    return tuple(sums)


def enumerate_subprofiles(
    profile: SheafProfile, cap: int = 16
) -> Iterator[SubProfile]:
    """Every proper nonempty sub-sum of atoms, deduplicated by generalized
    type. Each sub-sum carries a compatible filtration by construction,
    and so does the complementary quotient."""
    count = profile.atom_count()
    if count > cap:
        raise CapacityError(f"{count} atoms exceed the enumeration cap {cap}")
    positions = profile.positions()
    seen: set = set()
    for mask in range(1, (1 << count) - 1):
        selection = tuple(
            positions[k] for k in range(count) if mask & (1 << k)
        )
        gen = _gen_type(profile, selection)
        key = tuple(p.coeffs for p in gen)
        if key in seen:
            continue
        seen.add(key)
        yield SubProfile(selection=selection, gen_type=gen)


class ThetaParam:
    """A stability parameter theta with its induced trace-free form:
    beta'_i = theta_i - (sum_j theta_j P_j(n)) / P(n)."""

    def __init__(self, theta: Sequence[RationalLike], n: int, tau: HNType):
        th = tuple(rat(t) for t in theta)
        if len(th) != tau.s:
            raise ShapeError("one theta per filtration step required")
        if n <= 0:
            raise TwistTooSmallError("twist n must be positive")
        sizes = [p.evaluate(n) for p in tau.polys]
        pn = sum(sizes)
        if pn <= 0 or any(sz <= 0 for sz in sizes):
            raise TwistTooSmallError("a block polynomial is nonpositive at n")
        mean = sum(t * sz for t, sz in zip(th, sizes)) / pn
        self.theta = th
        self.n = n
        self.tau = tau
        self.beta_prime = tuple(t - mean for t in th)
        assert sum(b * sz for b, sz in zip(self.beta_prime, sizes)) == 0

    def to_json(self) -> dict:
        return {
            "theta": [rat_str(t) for t in self.theta],
            "n": self.n,
            "beta_prime": [rat_str(b) for b in self.beta_prime],
        }


@dataclass(frozen=True)
class Verdict:
    """Outcome of a semistability test with an optional destabilizing
    witness and, in the evaluated mode, the sign-form cross-check."""

    verdict: str  # stable | strictly_semistable | unstable
    witness: Optional[SubProfile]
    mode: str
    git_agrees: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else self.witness.to_json(),
            "mode": self.mode,
            "git_agrees": self.git_agrees,
        }


ASYMPTOTIC = "asymptotic"
AT_N = "at_n"


def theta_semistable(
    profile: SheafProfile, tp: ThetaParam, mode: str = AT_N, cap: int = 16
) -> Verdict:
    """Test every sub-sum of atoms against the weighted-slope inequality

        sum theta_i P(F'_i) / P(F')  >=  sum theta_i P(F_i) / P(F).

    In asymptotic mode the two sides are compared as polynomials by cross
    multiplication; in evaluated mode at the parameter's twist n. The
    evaluated mode also recomputes each comparison through the sign of
    sum beta'_i P(F'_i, n) and reports agreement (an algebraic identity).
    """
    if mode not in (ASYMPTOTIC, AT_N):
        raise ShapeError(f"unknown mode {mode!r}")
    tau = hn_type(profile)
    if tau != tp.tau:
        raise ShapeError("parameter was built for a different filtration type")
    theta = tp.theta
    full = profile.layer_polys()
    total = profile.total()
    num_full = _weighted(theta, full)

    n = tp.n
    if mode == AT_N and total.evaluate(n) <= 0:
        raise TwistTooSmallError("total polynomial nonpositive at n")

    worst: Optional[SubProfile] = None
    saw_equality = False
    git_ok = True
    for sub in enumerate_subprofiles(profile, cap=cap):
        num_sub = _weighted(theta, sub.gen_type)
        den_sub = Polynomial()
        for p in sub.gen_type:
            den_sub = den_sub + p
        if mode == ASYMPTOTIC:
            cmp = lex_compare(num_sub * total, num_full * den_sub)
        else:
            dn = den_sub.evaluate(n)
            if dn <= 0:
                raise TwistTooSmallError("subprofile polynomial nonpositive at n")
            lhs = num_sub.evaluate(n) * total.evaluate(n)
            rhs = num_full.evaluate(n) * dn
            cmp = (lhs > rhs) - (lhs < rhs)
            git_value = sum(
                b * p.evaluate(n) for b, p in zip(tp.beta_prime, sub.gen_type)
            )
            git_sign = (git_value > 0) - (git_value < 0)
            git_ok = git_ok and git_sign == cmp
        if cmp < 0 and worst is None:
            worst = sub
        if cmp == 0:
            saw_equality = True
    if worst is not None:
        verdict = "unstable"
    elif saw_equality:
        verdict = "strictly_semistable"
    else:
        verdict = "stable"
    return Verdict(
        verdict=verdict,
        witness=worst,
        mode=mode,
        git_agrees=git_ok if mode == AT_N else None,
    )


def _weighted(theta: Sequence[Fraction], polys: Sequence[Polynomial]) -> Polynomial:
    acc = Polynomial()
    for t, p in zip(theta, polys):
        acc = acc + p.scale(t)
    return acc


def cross_condition(tp: ThetaParam, tau: HNType, m: int) -> bool:
    """The necessary condition for nonempty semistable loci:

        (sum theta_i P_i(n)) / P(n)  >=  (sum theta_i P_i(m)) / P(m).

    A False return means no object of this type is semistable for theta.
    """
    if m <= tp.n:
        raise TwistTooSmallError(f"m = {m} must exceed n = {tp.n}")
    total = tau.total
    pn, pm = total.evaluate(tp.n), total.evaluate(m)
    if pn <= 0 or pm <= 0:
        raise TwistTooSmallError("total polynomial nonpositive at a twist")
    lhs = sum(t * p.evaluate(tp.n) for t, p in zip(tp.theta, tau.polys)) / pn
    rhs = sum(t * p.evaluate(m) for t, p in zip(tp.theta, tau.polys)) / pm
    return lhs >= rhs


Blocks = Sequence[Sequence[tuple[int, int]]]


def _check_blocks(profile: SheafProfile, blocks: Blocks) -> list[list[tuple[int, int]]]:
    flat = [tuple(pos) for block in blocks for pos in block]
    expected = profile.positions()
    if sorted(flat) != sorted(expected) or len(flat) != len(set(flat)):
        raise ShapeError("blocks must partition the atom occurrences")
    if any(not block for block in blocks):
        raise ShapeError("empty filtration block")
    return [[tuple(pos) for pos in block] for block in blocks]


def _block_layer_values(
    profile: SheafProfile, block: Sequence[tuple[int, int]], n: int
) -> list[Fraction]:
    """P(F_i^j, n) for fixed block j: the layer-i content evaluated at n."""
    vals = [Fraction(0)] * profile.s
    for i, j in block:
        vals[i] += profile.layers[i][j].poly.evaluate(n)
    return vals


def perturbed_hm(
    profile: SheafProfile,
    blocks: Blocks,
    weights: Sequence[int],
    tp: ThetaParam,
    epsilon: RationalLike,
) -> Fraction:
    """Weight of a one-parameter subgroup acting through an ordered block
    partition, under the perturbed linearization:

        epsilon * sum_j sum_i k_j beta'_i P(F_i^j, n).
    """
    eps = rat(epsilon)
    blks = _check_blocks(profile, blocks)
    ks = [int(k) for k in weights]
    if len(ks) != len(blks):
        raise ShapeError("one weight per block required")
    if any(a <= b for a, b in zip(ks, ks[1:])):
        raise ShapeError("weights must be strictly decreasing")
    if hn_type(profile) != tp.tau:
        raise ShapeError("parameter was built for a different filtration type")
    n = tp.n
    dims = [sum(_block_layer_values(profile, blk, n)) for blk in blks]
    if sum(k * d for k, d in zip(ks, dims)) != 0:
        raise NotSLError("block weights violate the trace-zero constraint")
    by_block = Fraction(0)
    for k, blk in zip(ks, blks):
        vals = _block_layer_values(profile, blk, n)
        by_block += k * sum(b * v for b, v in zip(tp.beta_prime, vals))
    # same double sum grouped by layer first, as a cross-check
    by_layer = Fraction(0)
    for i, b in enumerate(tp.beta_prime):
        by_layer += b * sum(
            k * _block_layer_values(profile, blk, n)[i]
            for k, blk in zip(ks, blks)
        )
    assert by_block == by_layer
    return eps * by_block


def gamma_of_destabilizing(
    profile: SheafProfile,
    blocks: Blocks,
    tp: ThetaParam,
    epsilon: RationalLike,
) -> tuple[Fraction, ...]:
    """Index coordinates of a destabilizing block filtration:

        gamma_j = - epsilon * sum_i beta'_i P(F_i^j, n) / P(F^j, n),

    required strictly decreasing; normalized so that the block weight
    with gamma as weights equals -||gamma||^2 (checked exactly after
    clearing denominators)."""
    eps = rat(epsilon)
    blks = _check_blocks(profile, blocks)
    if hn_type(profile) != tp.tau:
        raise ShapeError("parameter was built for a different filtration type")
    n = tp.n
    gammas = []
    dims = []
    for blk in blks:
        vals = _block_layer_values(profile, blk, n)
        dim = sum(vals)
        if dim <= 0:
            raise TwistTooSmallError("block polynomial nonpositive at n")
        gammas.append(-eps * sum(b * v for b, v in zip(tp.beta_prime, vals)) / dim)
        dims.append(dim)
    if any(a <= b for a, b in zip(gammas, gammas[1:])):
        raise NotAdaptedError(
            "computed block indices are not strictly decreasing; "
            "this filtration is not the destabilizing one"
        )
    assert sum(g * d for g, d in zip(gammas, dims)) == 0
    norm_sq = sum(g * g * d for g, d in zip(gammas, dims))
    denom = lcm(*(g.denominator for g in gammas))
    ks = [int(g * denom) for g in gammas]
    value = perturbed_hm(profile, blks, ks, tp, eps)
    assert value == -denom * norm_sq
    return tuple(gammas)


def s_equivalent(a: SheafProfile, b: SheafProfile) -> bool:
    """True iff the graded objects agree: same layer count and, per layer,
    the same multiset of atom polynomials (labels ignored)."""
    if a.e != b.e or a.s != b.s:
        return False
    for la, lb in zip(a.layers, b.layers):
        if sorted(x.poly.coeffs for x in la) != sorted(x.poly.coeffs for x in lb):
            return False
    return True


def stabilization_threshold(
    profile: SheafProfile,
    theta: Sequence[RationalLike],
    n_max: int = 40,
    cap: int = 16,
) -> Optional[int]:
    """Smallest twist from which the evaluated verdict agrees with the
    asymptotic one all the way up to n_max; None if no such twist is
    found below n_max."""
    tau = hn_type(profile)
    verdicts = {}
    reference = None
    for n in range(1, n_max + 1):
        try:
            tp = ThetaParam(theta, n, tau)
            v = theta_semistable(profile, tp, mode=AT_N, cap=cap)
        except TwistTooSmallError:
            continue
        if reference is None:
            reference = theta_semistable(
                profile, ThetaParam(theta, n, tau), mode=ASYMPTOTIC, cap=cap
            ).verdict
        verdicts[n] = v.verdict
    if reference is None:
        return None
    good = None
    for n in sorted(verdicts):
        if verdicts[n] == reference:
            if good is None:
                good = n
        else:
            good = None
    return good
