"""Geometric side of the construction: the sphere-to-sphere conformal map,
the curvature-one metric with one 4*pi cone, the degree-two covering of the
sphere by a torus, and the pulled-back conformal factor on a grid.

The base metric on the w-sphere is

    rho(w) |dw|^2,
    rho(w) = 1 / ( |w| |w-1| ( |sqrt(w)+1| + |sqrt(w)-1| )^2 ),

which has curvature one away from w in {0, 1, oo}, cone angle pi at each of
0, 1, oo, and a 4*pi cone at w = t once pulled back through the covering.
The quarter-disk chart

    w(z) = ((1 + z^2) / (1 - z^2))^2

sends the corners i, 0, 1 to 0, 1, oo, and pushes the round density
4 / (1 + |z|^2)^2 forward to rho exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NormalizationError
from .moduli import t_from_sigma, validate_t
from .numdiff import laplacian5
from .specialfn import as_sigma, theta

__all__ = [
    "conformal_map",
    "conformal_map_prime",
    "metric_rho",
    "round_sphere_density",
    "gauss_curvature",
    "TorusCovering",
    "covering_map_torus",
    "ConformalField",
    "conformal_factor_on_torus",
    "save_field",
    "load_field",
]


def conformal_map(z):
    """The degree-four rational map w(z) = ((1 + z^2) / (1 - z^2))^2.

    On the closed quarter disk {|z| <= 1, 0 <= Arg z <= pi/2} it is a
    bijection onto the closed upper half plane; poles sit at z = +-1.
    """
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z == 1.0) or np.any(z == -1.0):
        raise DomainError("conformal map has poles at z = +-1")
    v = (1.0 + z * z) / (1.0 - z * z)
    out = v * v
    return complex(out) if out.ndim == 0 else out


def conformal_map_prime(z):
    """Derivative of the quarter-disk map, w'(z) = 8 z (1 + z^2) / (1 - z^2)^3."""
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z == 1.0) or np.any(z == -1.0):
        raise DomainError("conformal map has poles at z = +-1")
    out = 8.0 * z * (1.0 + z * z) / (1.0 - z * z) ** 3
    return complex(out) if out.ndim == 0 else out


def metric_rho(w):
    """Density of the curvature-one metric on the w-sphere.

    rho(w) = 1 / ( |w| |w-1| (|sqrt(w)+1| + |sqrt(w)-1|)^2 ).  The value does
    not depend on the branch of the square root since the two choices only
    swap the summands.  Raises at the conical points w = 0, 1 where the
    density is infinite.
    """
    w = np.asarray(w, dtype=np.complex128)
    if np.any(w == 0.0) or np.any(w == 1.0):
        raise DomainError("metric density is infinite at the conical points 0, 1")
    r = np.sqrt(w)
    out = 1.0 / (np.abs(w) * np.abs(w - 1.0) * (np.abs(r + 1.0) + np.abs(r - 1.0)) ** 2)
    return float(out) if out.ndim == 0 else out


def round_sphere_density(z):
    """Density 4 / (1 + |z|^2)^2 of the unit round sphere in a plane chart."""
    z = np.asarray(z, dtype=np.complex128)
    out = 4.0 / (1.0 + np.abs(z) ** 2) ** 2
    return float(out) if out.ndim == 0 else out


def gauss_curvature(w, h: float | None = None) -> float:
    """Gauss curvature of rho |dw|^2 at w by finite differences.

    K = -(1 / (2 rho)) Lap log rho with the Euclidean Laplacian approximated
    by the Richardson-extrapolated five-point stencil at steps h and 2h.
    The default step 10^-3 max(1, |w|) grows with |w| because log rho
    flattens out while 1 / (2 rho) amplifies stencil roundoff.  The point
    must keep a distance of at least 10 h from the conical points 0 and 1.
    """
    wc = complex(w)
    if h is None:
        h = 1.0e-3 * max(1.0, abs(wc))
    if min(abs(wc), abs(wc - 1.0)) < 10.0 * h:
        raise DomainError(
            f"step {h} too large at w = {wc}: the stencil reaches a conical point"
        )

    def log_rho(p: complex) -> float:
        return math.log(metric_rho(p))

    lap = laplacian5(log_rho, wc, h)
    return -lap / (2.0 * metric_rho(wc))


def _wp(z, sigma: complex, derivative: int = 0):
    """Even degree-two elliptic function with a double pole at the origin.

    wp(z) = (theta[1,1] / theta[0,1])^2 evaluated at z + sigma/2.  This is an
    affine image of the Weierstrass elliptic function of the lattice
    Z + sigma Z, so the normalized covering built from it is identical to
    the classical (wp - e_a) / (e_b - e_a) family.
    """
    zz = np.asarray(z, dtype=np.complex128) + sigma / 2.0
    t11 = theta((1, 1), zz, sigma)
    t01 = theta((0, 1), zz, sigma)
    val = (t11 / t01) ** 2
    if derivative == 0:
        return val
    d11 = theta((1, 1), zz, sigma, derivative=1)
    d01 = theta((0, 1), zz, sigma, derivative=1)
    return val, 2.0 * val * (d11 / t11 - d01 / t01)


class TorusCovering:
    """Degree-two covering of the w-sphere by the torus C / (Z + sigma Z).

    The map mu is an affine normalization mu = (wp - e_a) / (e_b - e_a) of an
    even degree-two elliptic function wp; its four branch points are the
    half periods, with branch values {0, 1, oo, t}.  The labeling of the
    half periods (which one is sent to 0, to 1, and to t) is fixed at
    construction by searching the six assignments for the one whose
    recovered fourth branch value matches the requested t exactly, not just
    up to the order-6 group.
    """

    _HALF_LABELS = ("1/2", "sigma/2", "(1+sigma)/2")

    def __init__(self, sigma, t=None, match_tol: float = 1.0e-8):
        self.sigma = as_sigma(sigma)
        if t is None:
            t = t_from_sigma(self.sigma)
        self.t = validate_t(t)

        s = self.sigma
        self._half_periods = (0.5 + 0j, s / 2.0, (1.0 + s) / 2.0)
        e_vals = [complex(_wp(h, s)) for h in self._half_periods]
        # wp has a double zero at sigma/2 by construction; pin it exactly
        e_vals[1] = 0.0 + 0j
        self._e_vals = tuple(e_vals)

        best = None
        for ia in range(3):
            for ib in range(3):
                if ia == ib:
                    continue
                ic = 3 - ia - ib
                t_rec = (e_vals[ic] - e_vals[ia]) / (e_vals[ib] - e_vals[ia])
                err = abs(t_rec - self.t)
                if best is None or err < best[0]:
                    best = (err, ia, ib, ic, t_rec)
        err, ia, ib, ic, t_rec = best
        if err > match_tol:
            raise NormalizationError(
                f"no half-period labeling reproduces t = {self.t}; closest "
                f"recovered value {t_rec} differs by {err:.3e} (is (sigma, t) "
                "a consistent pair?)"
            )
        self._ia, self._ib, self._ic = ia, ib, ic
        self.recovered_t = t_rec

    @property
    def labeling(self) -> str:
        """Human-readable record of the half-period assignment."""
        lab = self._HALF_LABELS
        return (
            f"0<-{lab[self._ia]} 1<-{lab[self._ib]} t<-{lab[self._ic]} inf<-0"
        )

    @property
    def cone_point(self) -> complex:
        """The half period lying over w = t, where the 4*pi cone sits."""
        return self._half_periods[self._ic]

    def branch_points(self) -> dict[complex, complex]:
        """Map from ramification point on the torus to its branch value."""
        out = {0j: complex("inf")}
        out[self._half_periods[self._ia]] = 0.0 + 0j
        out[self._half_periods[self._ib]] = 1.0 + 0j
        out[self._half_periods[self._ic]] = self.recovered_t
        return out

    def mu(self, z):
        """Value of the covering map at a point or array of points."""
        ea = self._e_vals[self._ia]
        eb = self._e_vals[self._ib]
        return (_wp(z, self.sigma) - ea) / (eb - ea)

    def mu_and_prime(self, z):
        """Covering map and its z-derivative together."""
        ea = self._e_vals[self._ia]
        eb = self._e_vals[self._ib]
        wp, wp_d = _wp(z, self.sigma, derivative=1)
        return (wp - ea) / (eb - ea), wp_d / (eb - ea)

    def mu_prime(self, z):
        return self.mu_and_prime(z)[1]


def covering_map_torus(z, sigma, t=None):
    """Covering map value at z for the torus of period ratio sigma.

    Convenience wrapper; construct a TorusCovering directly when many
    evaluations with the same sigma are needed.
    """
    return TorusCovering(sigma, t).mu(z)


@dataclass
class ConformalField:
    """Conformal factor e^(2 phi) of the pulled-back cone metric on a grid.

    Samples live at z = (j + 1/2)/n1 + sigma (k + 1/2)/n2 (half-cell offset,
    so no sample hits a ramification point).  ``singular_points`` lists
    pairs ((j, k), order): the grid index nearest to a distinguished point
    of the metric and the local vanishing order of e^(2 phi) there.  The
    order is 2 at the cone point and 0 at the smooth points over 0, 1, oo.
    """

    sigma: complex
    t: complex
    grid_shape: tuple[int, int]
    values: np.ndarray
    singular_points: tuple[tuple[tuple[int, int], int], ...]
    labeling: str = ""

    def area(self) -> float:
        """Midpoint-rule area of the curved metric; tends to 2 pi."""
        n1, n2 = self.grid_shape
        return float(self.values.sum()) * self.sigma.imag / (n1 * n2)


def _grid_points(sigma: complex, n1: int, n2: int) -> np.ndarray:
    p = (np.arange(n1) + 0.5) / n1
    q = (np.arange(n2) + 0.5) / n2
    return p[:, None] + sigma * q[None, :]


def _e2phi_from_cover(cov: TorusCovering, z: np.ndarray) -> np.ndarray:
    """Pullback density rho(mu) |mu'|^2 with a stabilized form off to the pole.

    Near the preimage of w = oo both rho and |mu'|^2 blow up; the product is
    smooth.  For |mu| above a cutoff the cube of |mu| is cancelled
    analytically:  rho(w) |w|^3 = 1 / ( |1 - 1/w| (|1 + r| + |1 - r|)^2 )
    with r = 1/sqrt(w), so e^(2 phi) = (rho |mu|^3) |mu'|^2 / |mu|^3.
    """
    mu, mu_p = cov.mu_and_prime(z)
    out = np.empty(z.shape, dtype=np.float64)
    big = np.abs(mu) > 1.0e3

    w = mu[~big]
    out[~big] = metric_rho(w) * np.abs(mu_p[~big]) ** 2

    wb = mu[big]
    r = 1.0 / np.sqrt(wb)
    stab = 1.0 / (np.abs(1.0 - 1.0 / wb) * (np.abs(1.0 + r) + np.abs(1.0 - r)) ** 2)
    out[big] = stab * np.abs(mu_p[big]) ** 2 / np.abs(wb) ** 3
    return out


def conformal_factor_on_torus(sigma, t, grid_shape) -> ConformalField:
    """Sample the conformal factor of the lifted cone metric on a torus grid.

    ``grid_shape`` is an integer for a square grid or a pair (n1, n2); both
    sides must be at least 32.  The pair (sigma, t) must describe the same
    surface, i.e. t must match one of the six branch values reachable from
    sigma (checked at construction of the covering).
    """
    s = as_sigma(sigma)
    tc = validate_t(t)
    if isinstance(grid_shape, int):
        n1 = n2 = grid_shape
    else:
        n1, n2 = grid_shape
    if n1 < 32 or n2 < 32:
        raise DomainError(f"grid {n1}x{n2} too coarse; need at least 32 points per side")

    cov = TorusCovering(s, tc)
    z = _grid_points(s, n1, n2)
    vals = _e2phi_from_cover(cov, z)
    if np.any(vals < 0.0) or not np.all(np.isfinite(vals)):
        raise NormalizationError("conformal factor must be finite and nonnegative")

    cone = cov.cone_point
    singular = []
    for point, order in ((cone, 2),):
        # locate in (p, q) coordinates; both lie in [0, 1)
        q_coord = point.imag / s.imag
        p_coord = point.real - q_coord * s.real
        j = int(np.clip(round(p_coord * n1 - 0.5), 0, n1 - 1))
        k = int(np.clip(round(q_coord * n2 - 0.5), 0, n2 - 1))
        singular.append(((j, k), order))

    return ConformalField(
        sigma=s,
        t=tc,
        grid_shape=(n1, n2),
        values=vals,
        singular_points=tuple(singular),
        labeling=cov.labeling,
    )


_FIELD_MAGIC = "# conetorus conformal-factor grid v1"


def save_field(field: ConformalField, path) -> None:
    """Write a ConformalField as a text grid file with a self-describing header."""
    with open(path, "w") as fh:
        fh.write(_FIELD_MAGIC + "\n")
        fh.write(f"# sigma {field.sigma.real!r} {field.sigma.imag!r}\n")
        fh.write(f"# t {field.t.real!r} {field.t.imag!r}\n")
        fh.write(f"# grid {field.grid_shape[0]} {field.grid_shape[1]}\n")
        for (j, k), order in field.singular_points:
            fh.write(f"# singular {j} {k} {order}\n")
        fh.write(f"# labeling {field.labeling}\n")
        np.savetxt(fh, field.values, fmt="%.17e")


def load_field(path) -> ConformalField:
    """Read a grid file produced by save_field."""
    header: dict[str, list[str]] = {}
    singular = []
    with open(path) as fh:
        first = fh.readline().rstrip("\n")
        if first != _FIELD_MAGIC:
            raise DomainError(f"not a conformal-factor grid file: {path}")
        pos = fh.tell()
        while True:
            line = fh.readline()
            if not line.startswith("#"):
                break
            parts = line[1:].split()
            if parts[0] == "singular":
                singular.append(((int(parts[1]), int(parts[2])), int(parts[3])))
            elif parts[0] == "labeling":
                header["labeling"] = parts[1:]
            else:
                header[parts[0]] = parts[1:]
            pos = fh.tell()
        fh.seek(pos)
        values = np.loadtxt(fh, ndmin=2)
    sigma = complex(float(header["sigma"][0]), float(header["sigma"][1]))
    t = complex(float(header["t"][0]), float(header["t"][1]))
    n1, n2 = int(header["grid"][0]), int(header["grid"][1])
    if values.shape != (n1, n2):
        raise DomainError(f"grid file body {values.shape} disagrees with header ({n1}, {n2})")
    return ConformalField(
        sigma=sigma,
        t=t,
        grid_shape=(n1, n2),
        values=values,
        singular_points=tuple(singular),
        labeling=" ".join(header.get("labeling", [])),
    )
