"""Symbolic quot-scheme points and the closed-form one-parameter-subgroup
weight calculus.

A filtered point is reduced to the data the weight formula actually
consumes: dimensions of a vector-space filtration, Hilbert polynomials of
the induced sheaf filtration, and a strictly decreasing integer weight
vector subject to the trace-zero constraint. On top of that sit the
closed-form index beta(tau) attached to a Harder-Narasimhan type and its
identities: the constraint sum, the two norm formulas, the central
character rewriting and the graded limit weight.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    DegenerateError,
    DegreeError,
    InvalidQuotPointError,
    TwistTooSmallError,
)
from .ratpoly import Polynomial, lex_compare, multiplicity, rat_str, reduced_hp


class HNType:
    """An ordered tuple of Hilbert polynomials with strictly decreasing
    reduced Hilbert polynomials; the type of a Harder-Narasimhan
    filtration."""

    def __init__(self, polys: Sequence[Polynomial], e: int):
        polys = tuple(polys)
        if not polys:
            raise DegenerateError("a type needs at least one polynomial")
        for p in polys:
            if p.degree != e:
                raise DegreeError(f"expected degree {e}, got {p.degree}")
            if multiplicity(p, e) <= 0:
                raise DegenerateError("nonpositive multiplicity")
        reduced = [reduced_hp(p, e) for p in polys]
        for a, b in zip(reduced, reduced[1:]):
            if lex_compare(a, b) <= 0:
                raise DegenerateError(
                    "reduced Hilbert polynomials must strictly decrease"
                )
        self.polys = polys
        self.e = e
        self.reduced = tuple(reduced)

    @property
    def s(self) -> int:
        return len(self.polys)

    @property
    def total(self) -> Polynomial:
        acc = Polynomial()
        for p in self.polys:
            acc = acc + p
        return acc

    def multiplicities(self) -> tuple[Fraction, ...]:
        return tuple(multiplicity(p, self.e) for p in self.polys)

    def partial_sums(self) -> tuple[Polynomial, ...]:
        """The filtration polynomials P_1, P_1+P_2, ..., P."""
        out = []
        acc = Polynomial()
        for p in self.polys:
            acc = acc + p
            out.append(acc)
        return tuple(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HNType):
            return NotImplemented
        return self.e == other.e and self.polys == other.polys

    def __repr__(self) -> str:
        return f"HNType(e={self.e}, polys={list(self.polys)!r})"

    @classmethod
    def from_json(cls, data: dict) -> "HNType":
        return cls([Polynomial.from_json(p) for p in data["polys"]], data["e"])

    def to_json(self) -> dict:
        return {"e": self.e, "polys": [p.to_json() for p in self.polys]}


class QuotPoint:
    """Filtration data of a symbolic quot-scheme point: nested vector
    space dimensions, induced sheaf Hilbert polynomials, and one-parameter
    subgroup weights."""

    def __init__(
        self,
        total_poly: Polynomial,
        n: int,
        filtration: Sequence[tuple[int, Polynomial]],
        weights: Sequence[int],
    ):
        filtration = tuple((int(d), p) for d, p in filtration)
        weights = tuple(int(k) for k in weights)
        if n <= 0:
            raise InvalidQuotPointError("twist n must be positive")
        if not filtration:
            raise InvalidQuotPointError("empty filtration")
        if len(weights) != len(filtration):
            raise InvalidQuotPointError("one weight per filtration step required")
        dims = [d for d, _ in filtration]
        if any(a >= b for a, b in zip(dims, dims[1:])) or dims[0] <= 0:
            raise InvalidQuotPointError("dimensions must be strictly increasing")
        if dims[-1] != total_poly.evaluate(n):
            raise InvalidQuotPointError(
                "last dimension must equal the total polynomial at n"
            )
        polys = [p for _, p in filtration]
        for a, b in zip(polys, polys[1:]):
            if lex_compare(a, b) > 0:
                raise InvalidQuotPointError(
                    "sheaf polynomials must be weakly increasing"
                )
        if polys[-1] != total_poly:
            raise InvalidQuotPointError("last sheaf polynomial must be the total")
        if any(a <= b for a, b in zip(weights, weights[1:])):
            raise InvalidQuotPointError("weights must be strictly decreasing")
        jumps = [dims[0]] + [b - a for a, b in zip(dims, dims[1:])]
        if sum(k * j for k, j in zip(weights, jumps)) != 0:
            raise InvalidQuotPointError("weights violate the trace-zero constraint")
        self.total_poly = total_poly
        self.n = n
        self.filtration = filtration
        self.weights = weights

    @property
    def s(self) -> int:
        return len(self.filtration)

    def scaled(self, a: int) -> "QuotPoint":
        return QuotPoint(
            self.total_poly, self.n, self.filtration, [a * k for k in self.weights]
        )

    @classmethod
    def from_json(cls, data: dict) -> "QuotPoint":
        return cls(
            Polynomial.from_json(data["total"]),
            data["n"],
            [(step["dim"], Polynomial.from_json(step["poly"])) for step in data["filtration"]],
            data["weights"],
        )


def sl_weights(seeds: Sequence[int], jumps: Sequence[int]) -> list[int]:
    """Turn strictly decreasing integer seeds into weights satisfying the
    trace-zero constraint against the given dimension jumps, preserving
    strict decrease: k_i = seeds_i * (sum of jumps) - (seeds . jumps)."""
    total = sum(jumps)
    shift = sum(s * j for s, j in zip(seeds, jumps))
    return [s * total - shift for s in seeds]


def hm_function(rho: QuotPoint, m: int) -> Fraction:
    """Weight of the limit of a one-parameter subgroup acting on a
    filtered point:

        sum_{i=1}^{s-1} (k_i - k_{i+1}) (P(F^(i), m) - dim V^(i) P(m)/P(n)).

    The telescoped form above is asserted equal to the per-step form
    sum_i k_i (P_i(m) - (dim jump_i) P(m)/P(n)), where P_i is the i-th
    graded piece.
    """
    if m <= rho.n:
        raise TwistTooSmallError(f"m = {m} must exceed n = {rho.n}")
    pn = rho.total_poly.evaluate(rho.n)
    pm = rho.total_poly.evaluate(m)
    ratio = pm / pn
    dims = [d for d, _ in rho.filtration]
    polys = [p for _, p in rho.filtration]
    ks = rho.weights

    telescoped = Fraction(0)
    for i in range(rho.s - 1):
        telescoped += (ks[i] - ks[i + 1]) * (polys[i].evaluate(m) - dims[i] * ratio)

    per_step = Fraction(0)
    prev_dim, prev_val = 0, Fraction(0)
    for i in range(rho.s):
        val = polys[i].evaluate(m)
        per_step += ks[i] * ((val - prev_val) - (dims[i] - prev_dim) * ratio)
        prev_dim, prev_val = dims[i], val
    assert telescoped == per_step
    return telescoped


@dataclass(frozen=True)
class BetaTau:
    """The index attached to a Harder-Narasimhan type at twists (n, m)."""

    tau: HNType
    n: int
    m: int
    beta: tuple[Fraction, ...]
    block_sizes: tuple[int, ...]
    norm_sq: Fraction
    monotone: bool
    diagnostic: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "beta": [rat_str(b) for b in self.beta],
            "block_sizes": list(self.block_sizes),
            "norm_sq": rat_str(self.norm_sq),
            "monotone": self.monotone,
            "diagnostic": self.diagnostic,
            "constraint_sum_zero": True,
        }


def beta_of_tau(tau: HNType, n: int, m: int) -> BetaTau:
    """beta_i = P(m)/P(n) - P_i(m)/P_i(n), with block size P_i(n).

    Failure of strict monotonicity beta_1 > ... > beta_s is reported in
    the diagnostic field (the twists are too small for the asymptotic
    ordering), not raised.
    """
    if m <= n:
        raise TwistTooSmallError(f"m = {m} must exceed n = {n}")
    total = tau.total
    pn, pm = total.evaluate(n), total.evaluate(m)
    if pn <= 0:
        raise TwistTooSmallError(f"total polynomial nonpositive at n = {n}")
    sizes = []
    beta = []
    for p in tau.polys:
        pin = p.evaluate(n)
        if pin <= 0 or p.evaluate(m) <= 0:
            raise TwistTooSmallError("component polynomial nonpositive at a twist")
        if pin.denominator != 1:
            raise TwistTooSmallError("block size P_i(n) is not an integer")
        sizes.append(int(pin))
        beta.append(pm / pn - p.evaluate(m) / pin)

    assert sum(b * sz for b, sz in zip(beta, sizes)) == 0
    norm_sq = sum(b * b * sz for b, sz in zip(beta, sizes))
    alt = sum(
        p.evaluate(m) ** 2 / p.evaluate(n) for p in tau.polys
    ) - pm * pm / pn
    assert norm_sq == alt

    monotone = all(a > b for a, b in zip(beta, beta[1:]))
    diagnostic = None
    if not monotone:
        diagnostic = (
            f"beta is not strictly decreasing at (n, m) = ({n}, {m}); "
            "larger twists are needed for the asymptotic ordering"
        )
    return BetaTau(
        tau=tau,
        n=n,
        m=m,
        beta=tuple(beta),
        block_sizes=tuple(sizes),
        norm_sq=norm_sq,
        monotone=monotone,
        diagnostic=diagnostic,
    )


def _objective(bt: BetaTau, point: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """Numerator N and radicand q of the normalized weight N/sqrt(q) at a
    feasible point."""
    partials = bt.tau.partial_sums()
    total = bt.tau.total
    ratio = total.evaluate(bt.m) / total.evaluate(bt.n)
    num = Fraction(0)
    for i in range(bt.tau.s - 1):
        num += (point[i] - point[i + 1]) * (
            partials[i].evaluate(bt.m) - partials[i].evaluate(bt.n) * ratio
        )
    q = sum(b * b * sz for b, sz in zip(point, bt.block_sizes))
    return num, q


def _f_leq(n1: Fraction, q1: Fraction, n2: Fraction, q2: Fraction) -> bool:
    """Exact comparison N1/sqrt(q1) <= N2/sqrt(q2) for q1, q2 > 0."""
    if n1 <= 0 <= n2:
        return True
    if n2 < 0 < n1:
        return False
    if n1 >= 0:  # both nonnegative
        return n1 * n1 * q2 <= n2 * n2 * q1
    return n1 * n1 * q2 >= n2 * n2 * q1  # both nonpositive


def verify_beta_minimizer(
    bt: BetaTau,
    samples: int,
    seed: int,
    point: Optional[Sequence[Fraction]] = None,
) -> bool:
    """Sampled local minimality of the normalized weight at beta.

    The candidate (beta by default) is projected onto the constraint
    hyperplane sum b_i P_i(n) = 0, then compared against random feasible
    perturbations lying in that hyperplane (the normalized weight is
    invariant under positive rescaling, so perturbation scale is varied
    rather than quotiented out). All comparisons are exact (squared with
    sign analysis, no square roots taken).
    """
    s = bt.tau.s
    if s == 1:
        return True
    sizes = bt.block_sizes

    def pdot(u, v):
        return sum(a * b * sz for a, b, sz in zip(u, v, sizes))

    ones = [Fraction(1)] * s
    center = list(point) if point is not None else list(bt.beta)
    # restore feasibility of a corrupted candidate
    shift = pdot(center, ones) / pdot(ones, ones)
    center = [c - shift for c in center]
    n_c, q_c = _objective(bt, center)
    if q_c == 0:
        raise DegenerateError("candidate point has zero norm")

    rng = random.Random(seed)
    for _ in range(samples):
        delta = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(s)]
        delta = [d - pdot(delta, ones) / pdot(ones, ones) for d in delta]
        if all(d == 0 for d in delta):
            continue
        for scale in (Fraction(1), Fraction(1, 100)):
            cand = [c + scale * d for c, d in zip(center, delta)]
            n_x, q_x = _objective(bt, cand)
            if q_x == 0:
                continue
            if not _f_leq(n_c, q_c, n_x, q_x):
                return False
    return True


def central_character_identity(
    bt: BetaTau, beta: Optional[Sequence[Fraction]] = None
) -> bool:
    """True iff the exponent vectors (P_i(m))_i and (-beta_i P_i(n))_i
    differ by a rational multiple of (P_i(n))_i, i.e. the two characters
    agree modulo the determinant-one relation."""
    b = tuple(beta) if beta is not None else bt.beta
    exps = [p.evaluate(bt.m) for p in bt.tau.polys]
    target = [-bi * sz for bi, sz in zip(b, bt.block_sizes)]
    c = (exps[0] - target[0]) / bt.block_sizes[0]
    return all(
        e - t == c * sz for e, t, sz in zip(exps, target, bt.block_sizes)
    )


def graded_limit_weight(bt: BetaTau) -> Fraction:
    """The weight picked up by the associated graded point:
    sum P_i(m)^2/P_i(n) - P(m)^2/P(n); equals ||beta||^2."""
    total = bt.tau.total
    value = sum(
        p.evaluate(bt.m) ** 2 / p.evaluate(bt.n) for p in bt.tau.polys
    ) - total.evaluate(bt.m) ** 2 / total.evaluate(bt.n)
    assert value == bt.norm_sq
    return value
