"""Shared random-corpus builders for the test suite.

Everything is seeded by the caller; no test draws from global state.
"""

import random
from fractions import Fraction

from stratkit.hntheta import SheafProfile, StableAtom
from stratkit.quotmodel import HNType
from stratkit.ratpoly import Polynomial


def random_vector(rng: random.Random, dim: int, bound: int = 5) -> list:
    return [
        Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        for _ in range(dim)
    ]


def random_hn_type(rng: random.Random, max_steps: int = 4) -> HNType:
    """A degree-1 type: polynomials r*x + c with strictly decreasing
    reduced values c/r."""
    s = rng.randint(1, max_steps)
    seen = set()
    slots = []
    while len(slots) < s:
        r = rng.randint(1, 4)
        c = rng.randint(0, 9)
        key = Fraction(c, r)
        if key in seen:
            continue
        seen.add(key)
        slots.append((r, c))
    slots.sort(key=lambda rc: Fraction(rc[1], rc[0]), reverse=True)
    return HNType([Polynomial([c, r]) for r, c in slots], 1)


def random_profile(
    rng: random.Random, max_layers: int = 3, max_atoms_per_layer: int = 3
) -> SheafProfile:
    """A degree-1 profile. Atoms in one layer are integer multiples of a
    common primitive polynomial, so they share the reduced value."""
    layers = []
    seen = set()
    n_layers = rng.randint(1, max_layers)
    slots = []
    while len(slots) < n_layers:
        r = rng.randint(1, 3)
        c = rng.randint(0, 6)
        key = Fraction(c, r)
        if key in seen:
            continue
        seen.add(key)
        slots.append((r, c))
    slots.sort(key=lambda rc: Fraction(rc[1], rc[0]), reverse=True)
    counter = 0
    for r, c in slots:
        layer = []
        for _ in range(rng.randint(1, max_atoms_per_layer)):
            k = rng.randint(1, 3)
            layer.append(StableAtom(f"a{counter}", Polynomial([k * c, k * r])))
            counter += 1
        layers.append(layer)
    return SheafProfile(layers)


def random_theta(rng: random.Random, s: int) -> list:
    while True:
        theta = [
            Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(s)
        ]
        if s == 1 or len(set(theta)) > 1:
            return theta
