"""Coordinates on the moduli space of the once-branched torus.

A surface in the family is pinned down either by the branch point
t in C minus {0, 1} of its degree-two covering over the sphere, or by the
period ratio sigma of the covering torus.  The two charts are related by

    sigma(t) = i K(1-t) / K(t),
    t(sigma) = -(theta[1,0](0|sigma) / theta[0,1](0|sigma))^4,

and t is only defined up to the order-6 group generated by
t -> 1/t and t -> 1 - t, so round trips are contracted at the level of
group orbits, not pointwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import BranchConventionWarning, DomainError, NormalizationError
from .specialfn import PeriodRatio, _complete_K, as_sigma, theta

__all__ = [
    "GOrbit",
    "sigma_from_t",
    "t_from_sigma",
    "g_orbit",
    "same_moduli_point",
    "validate_t",
]


def validate_t(t) -> complex:
    """Check that t is a finite complex number away from 0 and 1."""
    tc = complex(t)
    if not (math.isfinite(tc.real) and math.isfinite(tc.imag)):
        raise DomainError("branch point t must be finite")
    if tc == 0 or tc == 1:
        raise DomainError(f"branch point t must avoid 0 and 1, got {tc}")
    return tc


@dataclass(frozen=True)
class GOrbit:
    """Orbit of a branch point under the order-6 group.

    ``members`` lists, in a fixed order and with possible repetitions,
        t, 1/t, 1-t, 1/(1-t), t/(t-1), (t-1)/t.
    ``canonical`` is the member with the lexicographically smallest
    key (|t|, Re t, Im t), which makes it reproducible across the orbit.
    """

    members: tuple[complex, ...]
    canonical: complex

    def __post_init__(self) -> None:
        if len(self.members) != 6:
            raise DomainError("an orbit has exactly six listed members")
        if self.canonical not in self.members:
            raise NormalizationError("canonical member must be one of the six")


def g_orbit(t) -> GOrbit:
    """All six images of t under the group generated by 1/t and 1-t."""
    tc = validate_t(t)
    members = (
        tc,
        1.0 / tc,
        1.0 - tc,
        1.0 / (1.0 - tc),
        tc / (tc - 1.0),
        (tc - 1.0) / tc,
    )
    canonical = min(members, key=lambda m: (abs(m), m.real, m.imag))
    return GOrbit(members=members, canonical=canonical)


def same_moduli_point(t1, t2, tol: float = 1.0e-9) -> bool:
    """True when t2 lies within tol of some member of the orbit of t1."""
    t2c = complex(t2)
    return min(abs(t2c - m) for m in g_orbit(t1).members) <= tol


def sigma_from_t(t) -> PeriodRatio:
    """Period ratio of the covering torus, sigma = i K(1-t) / K(t).

    K is the complete elliptic integral as a function of k^2.  For t on the
    real cuts (-oo, 0) and (1, oo) the limit from the upper half plane is
    taken (a BranchConventionWarning is emitted); this is realized through
    IEEE signed zeros, so no finite nudge of t is involved.
    """
    tc = validate_t(t)
    if tc.imag == 0.0:
        if tc.real < 0.0 or tc.real > 1.0:
            warnings.warn(
                "t lies on a real cut; using the limit from Im t > 0",
                BranchConventionWarning,
                stacklevel=2,
            )
        k2_t = complex(tc.real, +0.0)
        k2_1mt = complex(1.0 - tc.real, -0.0)
    else:
        k2_t = tc
        k2_1mt = 1.0 - tc
    sigma = 1j * _complete_K(k2_1mt) / _complete_K(k2_t)
    if sigma.imag <= 0.0:
        # the principal-branch ratio lands in the upper half plane on the
        # whole slit plane; flipping the sign would only mask a branch bug
        raise NormalizationError(f"period ratio left the upper half plane: {sigma}")
    return PeriodRatio(sigma=sigma)


def t_from_sigma(sigma) -> complex:
    """Branch point from theta constants, t = -(theta[1,0]/theta[0,1])(0|sigma)^4.

    Composing with sigma_from_t returns a point in the same group orbit as
    the input (not necessarily the identical representative).
    """
    s = as_sigma(sigma)
    th10 = theta((1, 0), 0.0, s)
    th01 = theta((0, 1), 0.0, s)
    if th01 == 0:
        raise NormalizationError("theta[0,1] null value vanished unexpectedly")
    ratio = th10 / th01
    return -(ratio**4)


def unimodular_equivalent(s1, s2, tol: float = 1.0e-9) -> bool:
    """True when the two period ratios reduce to the same fundamental point."""
    from .specialfn import reduce_to_fundamental_domain

    r1 = reduce_to_fundamental_domain(as_sigma(s1)).reduced[0]
    r2 = reduce_to_fundamental_domain(as_sigma(s2)).reduced[0]
    if abs(r1 - r2) <= tol:
        return True
    # points on the boundary of the fundamental domain may reduce to either
    # of two identified representatives
    for cand in (complex(r2.real - 1.0, r2.imag), complex(r2.real + 1.0, r2.imag), -1.0 / r2):
        if abs(r1 - cand) <= tol:
            return True
    return False


def _orbit_tag(t) -> complex:
    """Canonical representative used when comparing moduli points."""
    return g_orbit(t).canonical
