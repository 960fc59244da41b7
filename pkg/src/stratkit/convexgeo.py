"""Exact nearest-point-to-convex-hull computation.

The computational kernel: given rational points and a rational symmetric
positive-definite pairing, find the unique point of their convex hull
closest to the origin. Two independent routes are provided: an active-set
scheme in the style of Wolfe's nearest-point method (`closest_point`),
and a brute-force face enumeration (`closest_point_oracle`). Both run
entirely over `Fraction`, so termination is combinatorial and results
are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import DimensionError
from .ratpoly import RationalLike, rat, rat_str

Vector = tuple[Fraction, ...]


def vector(entries: Iterable[RationalLike]) -> Vector:
    return tuple(rat(e) for e in entries)


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(u: Vector, c: Fraction) -> Vector:
    return tuple(a * c for a in u)


def vec_json(u: Vector) -> list[str]:
    return [rat_str(a) for a in u]


def zero_vector(d: int) -> Vector:
    return (Fraction(0),) * d


def solve_linear(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> Optional[list[Fraction]]:
    """Solve a consistent linear system by fraction-free-safe elimination.

    Returns one solution (free variables set to zero), or None if the
    system is inconsistent. Works for square and rectangular systems.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [list(row) + [rhs[i]] for i, row in enumerate(rows)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if a[i][n] != 0:
            return None
    sol = [Fraction(0)] * n
    for i, c in pivots:
        sol[c] = a[i][n]
    return sol


class InnerProduct:
    """A rational symmetric positive-definite pairing given by its Gram matrix."""

    def __init__(self, gram: Sequence[Sequence[RationalLike]]):
        g = tuple(tuple(rat(x) for x in row) for row in gram)
        d = len(g)
        if any(len(row) != d for row in g):
            raise DimensionError("Gram matrix must be square")
        for i in range(d):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise DimensionError("Gram matrix must be symmetric")
        self.gram = g
        self.dim = d
        self._check_positive_definite()

    def _check_positive_definite(self) -> None:
        # leading principal minors, exact
        for k in range(1, self.dim + 1):
            sub = [list(row[:k]) for row in self.gram[:k]]
            if _det(sub) <= 0:
                raise DimensionError("Gram matrix is not positive definite")

    @classmethod
    def identity(cls, d: int) -> "InnerProduct":
        return cls(
            [[Fraction(1) if i == j else Fraction(0) for j in range(d)] for i in range(d)]
        )

    @classmethod
    def diagonal(cls, weights: Iterable[RationalLike]) -> "InnerProduct":
        ws = [rat(w) for w in weights]
        d = len(ws)
        return cls(
            [[ws[i] if i == j else Fraction(0) for j in range(d)] for i in range(d)]
        )

    def dot(self, u: Vector, v: Vector) -> Fraction:
        if len(u) != self.dim or len(v) != self.dim:
            raise DimensionError("vector dimension does not match the pairing")
        total = Fraction(0)
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            row = self.gram[i]
            total += ui * sum(row[j] * v[j] for j in range(self.dim) if v[j] != 0)
        return total

    def norm_sq(self, v: Vector) -> Fraction:
        return self.dot(v, v)

    def to_json(self) -> list[list[str]]:
        return [[rat_str(x) for x in row] for row in self.gram]


def _det(a: list[list[Fraction]]) -> Fraction:
    n = len(a)
    a = [row[:] for row in a]
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            det = -det
        det *= a[c][c]
        inv = Fraction(1) / a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


@dataclass(frozen=True)
class HullSolution:
    """The nearest point of a convex hull to the origin, with a witness face."""

    point: Vector
    support: tuple[int, ...]
    barycentric: tuple[Fraction, ...]
    norm_sq: Fraction

    def combination_check(self, points: Sequence[Vector]) -> bool:
        d = len(self.point)
        acc = zero_vector(d)
        for idx, lam in zip(self.support, self.barycentric):
            acc = vec_add(acc, vec_scale(points[idx], lam))
        return (
            acc == self.point
            and all(lam >= 0 for lam in self.barycentric)
            and sum(self.barycentric) == 1
        )


def _check_points(points: Sequence[Vector], ip: InnerProduct) -> None:
    if not points:
        raise DimensionError("need at least one point")
    for p in points:
        if len(p) != ip.dim:
            raise DimensionError("point dimension does not match the pairing")


def _affine_minimizer(
    subset: Sequence[int], points: Sequence[Vector], ip: InnerProduct
) -> Optional[list[Fraction]]:
    """Barycentric coordinates of the min-norm point of the affine hull.

    Solves the bordered Gram system; returns None when the subset is
    affinely dependent (singular system).
    """
    k = len(subset)
    gram = [
        [ip.dot(points[a], points[b]) for b in subset] + [Fraction(1)]
        for a in subset
    ]
    gram.append([Fraction(1)] * k + [Fraction(0)])
    if _det([row[:] for row in gram]) == 0:
        return None
    rhs = [Fraction(0)] * k + [Fraction(1)]
    sol = solve_linear(gram, rhs)
    assert sol is not None
    return sol[:k]


def _point_from_bary(
    subset: Sequence[int], lambdas: Sequence[Fraction], points: Sequence[Vector]
) -> Vector:
    acc = zero_vector(len(points[0]))
    for idx, lam in zip(subset, lambdas):
        if lam != 0:
            acc = vec_add(acc, vec_scale(points[idx], lam))
    return acc


def _canonical_support(
    x: Vector, points: Sequence[Vector], ip: InnerProduct
) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
    """Deterministic witness: the minimal-cardinality, lexicographically
    smallest affinely independent face subset expressing x."""
    xx = ip.norm_sq(x)
    face = [i for i, p in enumerate(points) if ip.dot(x, p) == xx]
    for size in range(1, len(face) + 1):
        for subset in combinations(face, size):
            lambdas = _affine_minimizer(subset, points, ip)
            if lambdas is None:
                continue
            if all(lam >= 0 for lam in lambdas):
                if _point_from_bary(subset, lambdas, points) == x:
                    return subset, tuple(lambdas)
    raise AssertionError("no witness face found for the claimed minimizer")


def closest_point(points: Sequence[Vector], ip: InnerProduct) -> HullSolution:
    """Nearest point of conv(points) to the origin, by an exact active-set
    scheme in the style of Wolfe's nearest-point method.

    The result satisfies the variational inequality <c, p> >= <c, c> for
    every input point p.
    """
    _check_points(points, ip)
    n = len(points)

    # start from the single point of smallest norm (lex tie-break)
    start = min(range(n), key=lambda i: (ip.norm_sq(points[i]), i))
    corral: list[int] = [start]
    lambdas: list[Fraction] = [Fraction(1)]
    x = points[start]

    guard = 0
    while True:
        guard += 1
        if guard > 10000:
            raise AssertionError("active-set iteration cap exceeded")
        xx = ip.norm_sq(x)
        if xx == 0:
            break
        j = min(range(n), key=lambda i: (ip.dot(x, points[i]), i))
        if ip.dot(x, points[j]) >= xx:
            break
        corral.append(j)
        lambdas.append(Fraction(0))
        # minor cycle: restore the corral property
        while True:
            new = _affine_minimizer(corral, points, ip)
            if new is not None and all(lam > 0 for lam in new):
                lambdas = list(new)
                x = _point_from_bary(corral, lambdas, points)
                break
            if new is None:
                # affinely dependent: step fully toward the dependent
                # point is impossible; drop via a zero-length step using
                # the affine solve on the independent part
                new = _dependent_step(corral, points, ip)
            # line search from lambdas toward new, stopping at the
            # boundary of the simplex; drop a vanishing index
            theta = None
            drop = None
            for pos, (old, nw) in enumerate(zip(lambdas, new)):
                if nw < old:
                    t = old / (old - nw)
                    if theta is None or t < theta:
                        theta, drop = t, pos
            assert theta is not None and theta <= 1
            lambdas = [
                old + theta * (nw - old) for old, nw in zip(lambdas, new)
            ]
            keep = [pos for pos in range(len(corral)) if pos != drop and lambdas[pos] > 0]
            # always keep at least one point
            if not keep:
                keep = [max(range(len(corral)), key=lambda p: lambdas[p])]
            corral = [corral[pos] for pos in keep]
            total = sum(lambdas[pos] for pos in keep)
            lambdas = [lambdas[pos] / total for pos in keep]
            x = _point_from_bary(corral, lambdas, points)

    support, bary = _canonical_support(x, points, ip)
    return HullSolution(point=x, support=support, barycentric=bary, norm_sq=ip.norm_sq(x))


def _dependent_step(
    corral: Sequence[int], points: Sequence[Vector], ip: InnerProduct
) -> list[Fraction]:
    """Fallback target coefficients when the corral turned affinely
    dependent: project onto the affine span via a consistent normal
    system, free variables pinned to zero."""
    base = points[corral[0]]
    diffs = [vec_sub(points[i], base) for i in corral[1:]]
    k = len(diffs)
    rows = [[ip.dot(diffs[a], diffs[b]) for b in range(k)] for a in range(k)]
    rhs = [-ip.dot(diffs[a], base) for a in range(k)]
    t = solve_linear(rows, rhs)
    assert t is not None  # normal equations of a convex quadratic
    lambdas = [Fraction(1) - sum(t)] + list(t)
    return lambdas


def closest_point_oracle(points: Sequence[Vector], ip: InnerProduct) -> HullSolution:
    """Independent brute-force route: enumerate every affinely independent
    subset, project the origin onto its affine span, keep projections with
    nonnegative convex coefficients, return the global minimizer."""
    _check_points(points, ip)
    n = len(points)
    best: Optional[tuple[Fraction, int, tuple[int, ...], tuple[Fraction, ...], Vector]] = None
    max_size = min(n, ip.dim + 1)
    for size in range(1, max_size + 1):
        for subset in combinations(range(n), size):
            lambdas = _affine_minimizer(subset, points, ip)
            if lambdas is None:
                continue
            if any(lam < 0 for lam in lambdas):
                continue
            x = _point_from_bary(subset, lambdas, points)
            key = (ip.norm_sq(x), len(subset), subset)
            if best is None or key < (best[0], best[1], best[2]):
                best = (key[0], key[1], subset, tuple(lambdas), x)
    assert best is not None
    norm_sq, _, _, _, x = best
    support, bary = _canonical_support(x, points, ip)
    return HullSolution(point=x, support=support, barycentric=bary, norm_sq=norm_sq)


def weyl_representative(v: Vector) -> Vector:
    """Coordinates sorted weakly decreasing (type A positive chamber)."""
    return tuple(sorted(v, reverse=True))
