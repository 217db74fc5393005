"""Branch-point and period-ratio charts on the moduli space.

Frozen anchors (t with extra symmetry):

    sigma(1/2) = i          the square torus, t = 1/2 fixed by t -> 1 - t
    sigma(2)   = (1+i)/2    same orbit {1/2, 2, -1}
    sigma(-1)  = 1 + i
    t(i)       = -1         the theta-quotient chart picks the member -1

Round trips t -> sigma -> t are contracted at orbit level only.
"""

import warnings

import numpy as np
import pytest

from conetorus import (
    g_orbit,
    same_moduli_point,
    sigma_from_t,
    t_from_sigma,
    unimodular_equivalent,
    validate_t,
)
from conetorus.errors import BranchConventionWarning, DomainError


def sample_t(rng, n):
    # annulus around the forbidden points, same box the acceptance suite uses
    out = []
    while len(out) < n:
        t = complex(rng.uniform(-6.0, 7.0), rng.uniform(-6.0, 6.0))
        if abs(t) > 0.05 and abs(t - 1.0) > 0.05:
            out.append(t)
    return out


def test_sigma_anchor_values():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BranchConventionWarning)
        assert abs(sigma_from_t(0.5).sigma - 1j) <= 1e-12
        assert abs(sigma_from_t(2.0).sigma - (0.5 + 0.5j)) <= 1e-12
        assert abs(sigma_from_t(-1.0).sigma - (1.0 + 1.0j)) <= 1e-12


def test_t_from_sigma_anchor():
    t = t_from_sigma(1j)
    assert abs(t - (-1.0)) <= 1e-12
    assert same_moduli_point(0.5, t, tol=1e-12)


def test_orbit_members_and_closure():
    rng = np.random.default_rng(21)
    for t in sample_t(rng, 30):
        orb = g_orbit(t)
        assert len(orb.members) == 6
        mem = set()
        for m in orb.members:
            mem.add(m)
            # closure under both generators
            assert same_moduli_point(t, 1.0 / m, tol=1e-9)
            assert same_moduli_point(t, 1.0 - m, tol=1e-9)
        assert orb.canonical in mem


def test_canonical_is_orbit_invariant():
    rng = np.random.default_rng(22)
    for t in sample_t(rng, 20):
        base = g_orbit(t).canonical
        for m in g_orbit(t).members:
            again = g_orbit(m).canonical
            assert abs(again - base) <= 1e-9 * max(1.0, abs(base))


def test_roundtrip_lands_in_orbit():
    rng = np.random.default_rng(23)
    for t in sample_t(rng, 50):
        sig = sigma_from_t(t)
        back = t_from_sigma(sig)
        assert same_moduli_point(t, back, tol=1e-9)


def test_sigma_in_upper_half_plane():
    rng = np.random.default_rng(24)
    for t in sample_t(rng, 50):
        assert sigma_from_t(t).sigma.imag > 0.0


def test_orbit_members_share_reduced_sigma():
    # sigma is a well-defined point of the modular curve on each orbit
    rng = np.random.default_rng(25)
    for t in sample_t(rng, 10):
        s0 = sigma_from_t(t).sigma
        for m in g_orbit(t).members:
            assert unimodular_equivalent(s0, sigma_from_t(m).sigma, tol=1e-9)


def test_unimodular_equivalent_detects_images():
    rng = np.random.default_rng(26)
    mats = [(1, 1, 0, 1), (0, -1, 1, 0), (2, 1, 1, 1), (1, 0, 4, 1), (3, -2, 2, -1)]
    for _ in range(10):
        s = complex(rng.uniform(-1.0, 1.0), rng.uniform(0.2, 2.0))
        for a, b, c, d in mats:
            assert a * d - b * c == 1
            img = (a * s + b) / (c * s + d)
            assert unimodular_equivalent(s, img)
        assert not unimodular_equivalent(s, s + 0.3j)


def test_real_cut_warns_and_matches_limit():
    with pytest.warns(BranchConventionWarning):
        s_cut = sigma_from_t(2.0).sigma
    s_lim = sigma_from_t(2.0 + 1e-9j).sigma
    assert abs(s_cut - s_lim) <= 1e-6
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        # inside (0, 1) there is no cut, so no warning
        sigma_from_t(0.5)


def test_validate_t_guards():
    for bad in (0.0, 1.0, complex("inf"), complex("nan")):
        with pytest.raises(DomainError):
            validate_t(bad)
    with pytest.raises(DomainError):
        g_orbit(1.0 + 0.0j)
    assert validate_t(0.5 + 0.0j) == 0.5 + 0.0j
