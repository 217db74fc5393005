"""Jacobi theta functions, Dedekind eta, complete elliptic integrals, and
reduction of a period ratio to the modular fundamental domain.

Conventions fixed once for the whole package:

    theta[a,b](z | sigma) = sum_{n in Z} exp( i pi (n + a/2)^2 sigma
                                  + 2 pi i (n + a/2) (z + b/2) ),
    with half-integer characteristics a, b in {0, 1},

    eta(sigma) = q^(1/24) prod_{n>=1} (1 - q^n),   q = exp(2 pi i sigma),

    K(m) = int_0^(pi/2) (1 - m sin^2 x)^(-1/2) dx,  as a function of m = k^2,
    principal branch, m not in [1, oo).

All of them require Im sigma > 0.  Theta series are truncated with a
certified geometric tail bound: the dropped tail is below 1e-14 relative
to the largest retained term.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchCutError, ConvergenceError, DomainError

__all__ = [
    "PeriodRatio",
    "theta",
    "dedekind_eta",
    "elliptic_K",
    "reduce_to_fundamental_domain",
    "as_sigma",
]

# exp(-_TAIL_EXPONENT) is the absolute size at which theta terms are cut;
# relative to the largest term this leaves a comfortable margin below 1e-14.
_TAIL_EXPONENT = 42.0

_FUND_TOL = 1.0e-12


@dataclass(frozen=True)
class PeriodRatio:
    """A point sigma in the upper half plane, optionally with its reduction.

    ``reduced`` stores ``(sigma_reduced, (a, b, c, d))`` where the integer
    matrix [[a, b], [c, d]] has determinant one and
    sigma_reduced = (a sigma + b) / (c sigma + d) satisfies
    |Re sigma_reduced| <= 1/2 and |sigma_reduced| >= 1.
    """

    sigma: complex
    reduced: tuple[complex, tuple[int, int, int, int]] | None = None

    def __post_init__(self) -> None:
        s = complex(self.sigma)
        if not (math.isfinite(s.real) and math.isfinite(s.imag)):
            raise DomainError("period ratio must be finite")
        if s.imag <= 0.0:
            raise DomainError(f"period ratio needs Im sigma > 0, got {s}")
        if self.reduced is not None:
            red, (a, b, c, d) = self.reduced
            if a * d - b * c != 1:
                raise DomainError("reduction matrix must have determinant one")
            red = complex(red)
            if abs(red.real) > 0.5 + 1e-9 or abs(red) < 1.0 - 1e-9:
                raise DomainError("reduced point is not in the fundamental domain")


def as_sigma(sigma) -> complex:
    """Accept a PeriodRatio or a bare complex number; return the value."""
    if isinstance(sigma, PeriodRatio):
        return complex(sigma.sigma)
    s = complex(sigma)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise DomainError("period ratio must be finite")
    if s.imag <= 0.0:
        raise DomainError(f"period ratio needs Im sigma > 0, got {s}")
    return s


def _theta_core(a: int, b: int, z, sigma: complex, derivative: int, max_terms: int):
    """Evaluate theta[a,b] (or its z-derivative) on an array of arguments.

    The argument is first reduced modulo the lattice Z + sigma Z, which keeps
    the series short and the terms bounded; the quasi-periodicity factor
    exp(i pi (a m - b n) - i pi n^2 sigma - 2 pi i n z_red) restores the value.
    """
    y = sigma.imag
    z = np.asarray(z, dtype=np.complex128)
    if z.size and not np.all(np.isfinite(z)):
        raise DomainError("theta argument must be finite")

    n_sh = np.round(z.imag / y)
    z_mid = z - n_sh * sigma
    m_sh = np.round(z_mid.real)
    z_red = z_mid - m_sh

    # largest |Im z_red| / Im sigma after reduction is about 0.5
    v_ratio = np.max(np.abs(z_red.imag)) / y if z.size else 0.0
    n_max = int(math.ceil(v_ratio + math.sqrt(_TAIL_EXPONENT / (math.pi * y)) + 2.0))
    if 2 * n_max + 1 > max_terms:
        raise ConvergenceError(
            f"theta series needs {2 * n_max + 1} terms, above the cap {max_terms}; "
            "Im sigma is too small"
        )

    ns = np.arange(-n_max, n_max + 1, dtype=np.float64) + 0.5 * a
    zz = z_red.reshape(z_red.shape + (1,))
    expo = (1j * math.pi * sigma) * ns**2 + (2j * math.pi) * ns * (zz + 0.5 * b)
    terms = np.exp(expo)
    series = terms.sum(axis=-1)
    if derivative:
        series_d = ((2j * math.pi) * ns * terms).sum(axis=-1)

    phase = np.exp(
        1j * math.pi * (a * m_sh - b * n_sh)
        - 1j * math.pi * n_sh**2 * sigma
        - 2j * math.pi * n_sh * z_red
    )
    if derivative:
        out = phase * (series_d - 2j * math.pi * n_sh * series)
    else:
        out = phase * series
    return out


def _check_char(char) -> tuple[int, int]:
    try:
        a, b = char
    except (TypeError, ValueError):
        raise DomainError(f"characteristic must be a pair, got {char!r}") from None
    if a not in (0, 1) or b not in (0, 1):
        raise DomainError(f"characteristics are restricted to 0 or 1, got {char!r}")
    return int(a), int(b)


def theta(char, z, sigma, derivative: int = 0, max_terms: int = 100_000):
    """Jacobi theta function with half-integer characteristic.

    theta[a,b](z | sigma) = sum_n exp(i pi (n + a/2)^2 sigma
                                      + 2 pi i (n + a/2)(z + b/2)).

    ``char`` is the pair (a, b) with a, b in {0, 1}.  ``z`` may be a complex
    scalar or an array.  ``derivative=1`` returns the derivative in z.
    Raises ConvergenceError when Im sigma is so small that the truncation
    index would exceed ``max_terms``.
    """
    a, b = _check_char(char)
    if derivative not in (0, 1):
        raise DomainError("only derivative orders 0 and 1 are supported")
    s = as_sigma(sigma)
    scalar = np.isscalar(z) or (isinstance(z, np.ndarray) and z.ndim == 0)
    out = _theta_core(a, b, z, s, derivative, max_terms)
    if scalar:
        return complex(out)
    return out


def _eta_qproduct(sigma: complex) -> complex:
    """Direct q-product for eta; intended for Im sigma >= 1/2."""
    q = cmath.exp(2j * math.pi * sigma)
    absq = abs(q)
    # tail of log prod (1 - q^n) is below |q|^(N+1) / (1 - |q|)^2
    n_terms = int(math.ceil(math.log(1e-17 * (1.0 - absq) ** 2) / math.log(absq)))
    prod = 1.0 + 0j
    qn = 1.0 + 0j
    for _ in range(max(n_terms, 1)):
        qn *= q
        prod *= 1.0 - qn
    return cmath.exp(1j * math.pi * sigma / 12.0) * prod


def dedekind_eta(sigma) -> complex:
    """Dedekind eta, eta(sigma) = q^(1/24) prod (1 - q^n) with q = e^(2 pi i sigma).

    For small Im sigma the argument is first walked into the fundamental
    domain; the multiplier is accumulated from the two generating laws
    eta(sigma + 1) = e^(i pi / 12) eta(sigma) and
    eta(-1/sigma) = sqrt(-i sigma) eta(sigma), so the accuracy is uniform
    in Im sigma.
    """
    cur = as_sigma(sigma)
    factor = 1.0 + 0j
    # invariant: eta(original) = factor * eta(cur)
    for _ in range(10_000):
        n = round(cur.real)
        if n != 0:
            factor *= cmath.exp(1j * math.pi * n / 12.0)
            cur -= n
        if abs(cur) < 1.0 - 1e-15:
            factor /= cmath.sqrt(-1j * cur)
            cur = -1.0 / cur
        else:
            break
    else:
        raise ConvergenceError("fundamental-domain walk did not terminate")
    return factor * _eta_qproduct(cur)


def _complete_K(m: complex, max_iter: int = 60) -> complex:
    """AGM iteration for K(m) without the branch-cut guard.

    Signed zeros in the imaginary part of ``m`` select the side of the cut,
    which implements one-sided limits.
    """
    a = 1.0 + 0j
    # 1.0 - m would collapse an imaginary -0.0 to +0.0 and hop the sqrt cut;
    # negating the parts keeps the zero signs and with them the chosen side
    b = cmath.sqrt(complex(1.0 - m.real, -m.imag))
    for _ in range(max_iter):
        if abs(a - b) <= 1e-17 * abs(a):
            return math.pi / (2.0 * a)
        a, b = (a + b) / 2.0, cmath.sqrt(a * b)
        # choose the square root that keeps the pair in the same half plane
        if abs(a - b) > abs(a + b):
            b = -b
    if abs(a - b) <= 1e-13 * abs(a):
        return math.pi / (2.0 * a)
    raise ConvergenceError(f"AGM did not converge for m = {m}")


def elliptic_K(k_squared, max_iter: int = 60) -> complex:
    """Complete elliptic integral K as a function of m = k^2.

    Computed by the arithmetic-geometric mean, K(m) = pi / (2 AGM(1, sqrt(1-m))),
    principal branch.  Relative accuracy is about 1e-14.  Raises
    BranchCutError for m on the cut [1, oo).
    """
    m = complex(k_squared)
    if not (math.isfinite(m.real) and math.isfinite(m.imag)):
        raise DomainError("k^2 must be finite")
    if m.imag == 0.0 and m.real >= 1.0:
        raise BranchCutError(f"K is evaluated on its branch cut [1, oo) at m = {m}")
    return _complete_K(m, max_iter=max_iter)


def reduce_to_fundamental_domain(sigma, max_steps: int = 10_000) -> PeriodRatio:
    """Reduce sigma under SL(2, Z) to |Re| <= 1/2, |sigma| >= 1.

    Returns a PeriodRatio whose ``reduced`` field holds the reduced point
    and the integer matrix (a, b, c, d) with
    sigma_reduced = (a sigma + b) / (c sigma + d).  Acting on an already
    reduced point is the identity.
    """
    s0 = as_sigma(sigma)
    cur = s0
    a, b, c, d = 1, 0, 0, 1
    for _ in range(max_steps):
        n = round(cur.real)
        if n != 0:
            cur -= n
            a, b = a - n * c, b - n * d
        if abs(cur) < 1.0 - _FUND_TOL:
            cur = -1.0 / cur
            a, b, c, d = -c, -d, a, b
        else:
            if abs(cur.real) <= 0.5 + _FUND_TOL:
                break
    else:
        raise ConvergenceError(f"reduction did not terminate for sigma = {s0}")
    return PeriodRatio(sigma=s0, reduced=(cur, (a, b, c, d)))
