"""Closed-form determinant of the Friedrichs Laplacian on the cone surface,
together with the independent routes used to cross-check it.

For a branch point t with period ratio sigma = sigma(t) the determinant is,
up to one universal multiplicative constant,

    det = |Im sigma| |eta(sigma)|^4 F(t),
    F(t) = |t|^(1/24) |t-1|^(1/24) / ( |sqrt(t)-1| + |sqrt(t)+1| )^(1/4),

and F is invariant under the order-6 group acting on t.  Everything here
works with the logarithm of the determinant; the unknown constant is
tracked by a flag on DetValue, so only differences of log values carry
meaning.

Two independent consistency routes are provided.  The first expresses the
determinant through the Bergman tau function, tau = eta(sigma)^2 times a
twelfth root of t (t - 1) continued from a fixed base point.  The second is
the variational identity d/dt log det = (b(0) - b(-oo)) / 2, where the two
coefficients come from the cone point's local geometry: b(-oo) from the
Taylor data of the quarter-disk chart at the preimage of t, and b(0) from
derivatives of tau and Im sigma.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NormalizationError
from .geometry import conformal_map, conformal_map_prime
from .moduli import sigma_from_t, validate_t
from .numdiff import log_aligned, wirtinger
from .specialfn import as_sigma, dedekind_eta

__all__ = [
    "DetValue",
    "LocalTaylorData",
    "F",
    "flat_det",
    "det_value",
    "tau_bergman",
    "det_prelim",
    "s_from_t",
    "taylor_AB",
    "b_minus_inf_from_AB",
    "b_minus_inf_closed",
    "schiffer_b0",
    "TAU_BASE_POINT",
]

# base point for the branch of the twelfth root inside tau_bergman
TAU_BASE_POINT = 0.25 + 0.25j


@dataclass(frozen=True)
class DetValue:
    """Logarithm of a determinant, possibly only defined up to a constant.

    When ``up_to_constant`` is set, the absolute number is meaningless and
    only differences against other DetValue instances are contractual.
    Subtraction returns the plain float difference of the logs.
    """

    log_value: float
    up_to_constant: bool = True

    def __post_init__(self) -> None:
        if not math.isfinite(self.log_value):
            raise DomainError("determinant log value must be finite")

    def __sub__(self, other: "DetValue") -> float:
        return self.log_value - other.log_value


@dataclass(frozen=True)
class LocalTaylorData:
    """Expansion u = A x + B x^3 + O(x^5) between distinguished parameters.

    x^2 = w - t on the base and u^2 = z - s in the quarter-disk chart; the
    pair (A, B) is defined up to a common sign, and only the combinations
    A^2 and B/A enter downstream formulas.
    """

    s: complex
    A: complex
    B: complex


def F(t) -> float:
    """Moduli part of the determinant formula.

    F(t) = |t|^(1/24) |t-1|^(1/24) / (|sqrt(t)-1| + |sqrt(t)+1|)^(1/4).
    Branch of the square root is irrelevant (the two choices swap the
    summands), and F(t) = F(1/t) = F(1-t).
    """
    tc = validate_t(t)
    r = cmath.sqrt(tc)
    denom = (abs(r - 1.0) + abs(r + 1.0)) ** 0.25
    return abs(tc) ** (1.0 / 24.0) * abs(tc - 1.0) ** (1.0 / 24.0) / denom


def flat_det(sigma) -> DetValue:
    """Log determinant of the flat unit-area torus, log(|Im sigma| |eta|^4).

    Modular invariant: unimodular images of sigma give the same value.
    """
    s = as_sigma(sigma)
    return DetValue(math.log(s.imag * abs(dedekind_eta(s)) ** 4))


def det_value(t) -> DetValue:
    """Log determinant of the cone surface at branch point t.

    log det = log(|Im sigma| |eta(sigma)|^4) + log F(t) with
    sigma = sigma_from_t(t); invariant under the order-6 group on t.
    """
    tc = validate_t(t)
    sigma = sigma_from_t(tc)
    return DetValue(flat_det(sigma).log_value + math.log(F(tc)))


def _arg_continuation(w_func, waypoints, n_start: int = 32, n_cap: int = 1 << 15) -> float:
    """Continuously accumulated argument of w_func along a polygonal path."""
    total = cmath.phase(w_func(waypoints[0]))
    for z0, z1 in zip(waypoints[:-1], waypoints[1:]):
        n = n_start
        while True:
            ts = np.linspace(0.0, 1.0, n + 1)
            pts = [z0 + (z1 - z0) * s for s in ts]
            vals = [w_func(p) for p in pts]
            if any(v == 0 for v in vals):
                raise DomainError("continuation path passes through a branch point")
            steps = [cmath.phase(b / a) for a, b in zip(vals[:-1], vals[1:])]
            if all(abs(d) < math.pi / 2 for d in steps):
                total += sum(steps)
                break
            n *= 2
            if n > n_cap:
                raise DomainError(
                    "continuation path needs too fine a subdivision; it runs "
                    "too close to a branch point"
                )
    return total


def tau_bergman(t, via=None) -> complex:
    """Bergman tau function on the family, up to a constant factor.

    tau(t) = eta(sigma(t))^2 * (t (t-1))^(1/12), where the twelfth root is
    continued along a path from the base point 1/4 + i/4 (straight by
    default; ``via`` inserts intermediate waypoints).  Only |tau| enters the
    determinant comparisons; the phase depends on the path class, and a
    closed loop avoiding 0, 1 returns the same value.
    """
    tc = validate_t(t)
    waypoints = [TAU_BASE_POINT, *(complex(v) for v in (via or ())), tc]

    def w_poly(z: complex) -> complex:
        return z * (z - 1.0)

    phi = _arg_continuation(w_poly, waypoints)
    w_end = w_poly(tc)
    root12 = cmath.exp((math.log(abs(w_end)) + 1j * phi) / 12.0)
    return dedekind_eta(sigma_from_t(tc)) ** 2 * root12


def det_prelim(t) -> DetValue:
    """Determinant route through the tau function, up to a constant.

    log( |Im sigma| |tau|^2 * (|t| |t-1| (|sqrt(t)+1| + |sqrt(t)-1|)^2)^(-1/8) ).
    The difference det_prelim(t) - det_value(t) must be independent of t.
    """
    tc = validate_t(t)
    sigma = as_sigma(sigma_from_t(tc))
    tau = tau_bergman(tc)
    r = cmath.sqrt(tc)
    base = abs(tc) * abs(tc - 1.0) * (abs(r + 1.0) + abs(r - 1.0)) ** 2
    log_val = math.log(sigma.imag) + 2.0 * math.log(abs(tau)) - math.log(base) / 8.0
    return DetValue(log_val)


def s_from_t(t) -> complex:
    """Preimage of t in the closed quarter disk under the quarter-disk map.

    Solves ((1 + s^2) / (1 - s^2))^2 = t with |s| <= 1 and 0 <= Arg s <= pi/2.
    The chart covers the closed upper half plane, so Im t >= 0 is required;
    real t is interpreted as the limit from above.  The residual of the
    defining equation is verified to 1e-12.
    """
    tc = validate_t(t)
    if tc.imag < 0.0:
        raise DomainError(
            "the quarter disk covers only the closed upper half plane; Im t >= 0 required"
        )
    r = cmath.sqrt(tc)
    candidates = [(r - 1.0) / (r + 1.0)]
    if candidates[0] != 0:
        candidates.append(1.0 / candidates[0])
    s_sq = None
    for c in candidates:
        if abs(c) <= 1.0 + 1e-12 and c.imag >= -1e-12 * max(1.0, abs(c)):
            s_sq = c
            break
    if s_sq is None:
        raise NormalizationError(f"no quarter-disk branch found for t = {tc}")
    s = cmath.sqrt(s_sq)
    if not (abs(s) <= 1.0 + 1e-9 and s.imag >= -1e-9 and s.real >= -1e-9):
        raise NormalizationError(f"candidate preimage {s} left the quarter disk")
    resid = abs(conformal_map(s) - tc)
    if resid > 1e-12 * max(1.0, abs(tc)):
        raise NormalizationError(f"preimage residual {resid:.3e} too large at t = {tc}")
    return s


def _map_second(z: complex) -> complex:
    # second derivative of the quarter-disk map, 8 (1 + 8 z^2 + 3 z^4) / (1 - z^2)^4
    return 8.0 * (1.0 + 8.0 * z * z + 3.0 * z**4) / (1.0 - z * z) ** 4


def taylor_AB(t) -> LocalTaylorData:
    """Taylor data of the chart between distinguished local parameters.

    With s = s_from_t(t), x^2 = w - t and u^2 = z - s, series reversion of
    w(z) - t = w'(s) u^2 + w''(s) u^4 / 2 + ... gives

        A = w'(s)^(-1/2),     B = -w''(s) / (4 w'(s)^(5/2)),

    where both powers use the same square-root branch, so the pair (A, B)
    is fixed up to the irrelevant common sign.
    """
    tc = validate_t(t)
    s = s_from_t(tc)
    w1 = conformal_map_prime(s)
    if abs(w1) < 1e-13:
        raise DomainError(f"chart derivative vanishes at s = {s}; t is a critical value")
    w2 = _map_second(s)
    sqrt_w1 = cmath.sqrt(w1)
    A = 1.0 / sqrt_w1
    B = -w2 / (4.0 * w1 * w1 * sqrt_w1)
    return LocalTaylorData(s=s, A=A, B=B)


def b_minus_inf_from_AB(t) -> complex:
    """Cone coefficient b(-oo) from the local Taylor data.

    b(-oo) = A^2 * conj(s) / (2 (1 + |s|^2)) - B / A; the first factor is
    the model coefficient of the round metric in the u-parameter.
    """
    data = taylor_AB(t)
    s = data.s
    hat = s.conjugate() / (2.0 * (1.0 + abs(s) ** 2))
    return data.A**2 * hat - data.B / data.A


def _log_density_quarter(t: complex) -> float:
    r = cmath.sqrt(t)
    return 0.25 * math.log(
        abs(t) * abs(t - 1.0) * (abs(r + 1.0) + abs(r - 1.0)) ** 2
    )


def b_minus_inf_closed(t) -> complex:
    """Closed form of b(-oo) as a Wirtinger t-derivative.

    b(-oo) = d/dt log( |t| |t-1| (|sqrt(t)+1| + |sqrt(t)-1|)^2 )^(1/4),
    which is d/dt of -(1/4) log rho at w = t.  Evaluated by Richardson
    central differences at steps 1e-4 and 1e-5.
    """
    tc = validate_t(t)
    return wirtinger(_log_density_quarter, tc)


def schiffer_b0(t) -> complex:
    """Curvature coefficient b(0) = 2 d/dt log tau + 2 d/dt log Im sigma.

    The combination eliminates the Schiffer projective connection: the
    Bergman tau derivative carries the Bergman projective connection and
    the Im sigma derivative removes the abelian-differential square between
    the two, leaving -(1/6) of the Schiffer evaluation at the cone point.
    Both derivatives use the same Wirtinger finite-difference scheme as
    b_minus_inf_closed.  The stencil steps into both half planes, so t must
    stay off the real axis by more than the coarse step.
    """
    tc = validate_t(t)
    if abs(tc.imag) <= 2.0e-4:
        raise DomainError(
            "b(0) differencing crosses the real-axis branch locus; need |Im t| > 2e-4"
        )
    tau_ref = tau_bergman(tc)

    def log_tau(z: complex) -> complex:
        return log_aligned(tau_bergman(z), tau_ref)

    def log_im_sigma(z: complex) -> float:
        return math.log(as_sigma(sigma_from_t(z)).imag)

    return 2.0 * wirtinger(log_tau, tc) + 2.0 * wirtinger(log_im_sigma, tc)
