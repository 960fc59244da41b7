"""stratkit: exact-arithmetic instability strata and sheaf stability.

Submodules:
  ratpoly   rational scalars and one-variable polynomials
  convexgeo nearest point of a convex hull to the origin, exact
  strata    stratum index sets, membership predicates, perturbation bounds
  quotmodel filtered-point weight calculus and the beta(tau) identities
  hntheta   stability of symbolic sheaf profiles of fixed filtration type
  cli       batch JSON command line front end
"""

from .ratpoly import Polynomial, Rational, rat, rat_str

__all__ = ["Polynomial", "Rational", "rat", "rat_str"]

__version__ = "0.1.0"
