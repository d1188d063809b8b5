"""Monodromy, Hill discriminant and Bloch eigenvalues of -y'' + 2a cos(2x) y = lambda y.

The fundamental solutions theta (theta(0)=1, theta'(0)=0) and phi (phi(0)=0,
phi'(0)=1) are integrated together with their lambda-derivatives (variational
equations), vectorized over lambda.  Because the potential is even about
x = pi/2, the half-period values already determine the monodromy:

    F - 2 = 4 theta'(pi/2) phi(pi/2),    F + 2 = 4 theta(pi/2) phi'(pi/2),

so periodic and antiperiodic eigenvalues split into four parity factors whose
zeros are simple even where F -/+ 2 has close pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .contour import Disc, Rect, Region, find_roots, winding_numbers
from .errors import ConfigurationError, DomainError, IntegrationError, MissedRootError
from .operator_model import SymmetryClass

DEFAULT_TOL = 1e-12
HALF = 0.5 * math.pi


@dataclass(frozen=True)
class Monodromy:
    theta_pi: complex
    theta_prime_pi: complex
    phi_pi: complex
    phi_prime_pi: complex
    lam: complex
    a: complex

    @property
    def wronskian(self) -> complex:
        return self.theta_pi * self.phi_prime_pi - self.theta_prime_pi * self.phi_pi

    @property
    def F(self) -> complex:
        return self.phi_prime_pi + self.theta_pi


@dataclass(frozen=True)
class DiscriminantValue:
    lam: complex
    F: complex
    F_prime: complex


@dataclass(frozen=True)
class BlochPoint:
    t: float
    mu: complex
    band_index: int


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not (0.0 < tol <= 1e-6):
        raise ConfigurationError(f"integration tolerance must lie in (0, 1e-6], got {tol}")
    return tol


def _integrate(a: complex, lam, x_end: float, tol: float, variational: bool) -> np.ndarray:
    """State at x_end, shape (4 or 8, len(lam)).

    Rows: theta, theta', phi, phi' and (if variational) their lambda-derivatives.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex)).ravel()
    K = lam.size
    rows = 8 if variational else 4
    a = complex(a)

    def rhs(x, y):
        y = y.reshape(rows, K)
        g = 2.0 * a * math.cos(2.0 * x) - lam
        d = np.empty_like(y)
        d[0] = y[1]
        d[1] = g * y[0]
        d[2] = y[3]
        d[3] = g * y[2]
        if variational:
            d[4] = y[5]
            d[5] = g * y[4] - y[0]
            d[6] = y[7]
            d[7] = g * y[6] - y[2]
        return d.ravel()

    y0 = np.zeros((rows, K), dtype=complex)
    y0[0] = 1.0
    y0[3] = 1.0
    sol = solve_ivp(rhs, (0.0, x_end), y0.ravel(), method="DOP853", rtol=tol, atol=1e-2 * tol)
    if sol.status != 0 or not np.all(np.isfinite(sol.y[:, -1])):
        bad = lam[np.argmax(np.abs(lam))] if K else None
        raise IntegrationError(f"integration failed for lambda near {bad}: {sol.message}", lam=bad)
    return sol.y[:, -1].reshape(rows, K)


def half_period_state(a: complex, lam, tol: float = DEFAULT_TOL, variational: bool = True) -> np.ndarray:
    """theta, theta', phi, phi' (and lambda-derivatives) at x = pi/2."""
    return _integrate(a, lam, HALF, _check_tol(tol), variational)


def monodromy(a: complex, lam: complex, tol: float = DEFAULT_TOL) -> Monodromy:
    """Fundamental-solution values at x = pi by direct integration over [0, pi]."""
    tol = _check_tol(tol)
    y = _integrate(a, [lam], math.pi, tol, variational=False)[:, 0]
    m = Monodromy(complex(y[0]), complex(y[1]), complex(y[2]), complex(y[3]), complex(lam), complex(a))
    w = m.wronskian
    if abs(w - 1.0) > max(100.0 * tol, 1e-12 * (abs(y[0] * y[3]) + abs(y[1] * y[2]))):
        raise IntegrationError(f"Wronskian defect {abs(w - 1):.3g} at lambda={lam}", lam=complex(lam))
    return m


def discriminant_array(a: complex, lam, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """F(lambda) and F'(lambda) for an array of lambda (half-period formulas)."""
    y = half_period_state(a, lam, tol, variational=True)
    th, thp, ph, php, dth, dthp, dph, dphp = y
    F = 2.0 + 4.0 * thp * ph
    Fp = 4.0 * (dthp * ph + thp * dph)
    shape = np.shape(lam)
    return F.reshape(shape), Fp.reshape(shape)


def discriminant_values(a: complex, lam, tol: float = DEFAULT_TOL) -> np.ndarray:
    """F(lambda) only (no variational equations)."""
    y = half_period_state(a, lam, tol, variational=False)
    return (2.0 + 4.0 * y[1] * y[2]).reshape(np.shape(lam))


def hill_discriminant(a: complex, lam: complex, tol: float = DEFAULT_TOL) -> DiscriminantValue:
    F, Fp = discriminant_array(a, np.array([lam], dtype=complex), tol)
    return DiscriminantValue(complex(lam), complex(F[0]), complex(Fp[0]))


# ---------------------------------------------------------------------------
# parity factors

# row index of the factor in the half-period state, and of its lambda-derivative
_FACTOR_ROW = {
    SymmetryClass.PN: (1, 5),  # theta'(pi/2) = 0: even about pi/2
    SymmetryClass.PD: (2, 6),  # phi(pi/2) = 0
    SymmetryClass.AD: (0, 4),  # theta(pi/2) = 0
    SymmetryClass.AN: (3, 7),  # phi'(pi/2) = 0
}


def parity_factor(cls: SymmetryClass, a: complex, tol: float = DEFAULT_TOL):
    """Analytic function lambda -> (g, g') whose zeros are the eigenvalues of class ``cls``."""
    r, dr = _FACTOR_ROW[cls]

    def g(z):
        y = half_period_state(a, z, tol, variational=True)
        return y[r], y[dr]

    return g


def parity_roots(
    cls: SymmetryClass, a: complex, region: Region, tol: float = 1e-10, int_tol: float = DEFAULT_TOL,
    seeds: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Eigenvalues of one symmetry class inside ``region``, as roots of its parity factor."""
    return find_roots(parity_factor(cls, a, int_tol), region, tol=tol, seeds=seeds)


def _as_region(region) -> Region:
    if isinstance(region, (Disc, Rect)):
        return region
    if isinstance(region, (int, float)):
        return Disc(0.0, float(region))
    raise DomainError(f"unsupported region {region!r}")


def bloch_roots(
    a: complex,
    t: float,
    region,
    tol: float = 1e-10,
    int_tol: float = DEFAULT_TOL,
    seeds: Optional[np.ndarray] = None,
) -> np.ndarray:
    """All roots of F(lambda) = 2 cos t inside ``region`` with multiplicity, sorted by (Re, Im).

    At t = 0 and t = pi the roots are collected from the two parity factors and
    their total is checked against the winding number of F -/+ 2.
    """
    t = float(t)
    if not (-1e-15 <= t <= math.pi + 1e-15):
        raise DomainError(f"t must lie in [0, pi], got {t}")
    region = _as_region(region)
    c = 2.0 * math.cos(t)
    if t <= 1e-15 or t >= math.pi - 1e-15:
        classes = (SymmetryClass.PN, SymmetryClass.PD) if t < 1.0 else (SymmetryClass.AD, SymmetryClass.AN)
        c = 2.0 if t < 1.0 else -2.0
        parts = [parity_roots(cls, a, region, tol, int_tol, seeds) for cls in classes]
        roots = np.concatenate(parts)
        total = int(winding_numbers(lambda z: discriminant_values(a, z, int_tol), region, [c])[0])
        if roots.size != total:
            raise MissedRootError(
                f"parity factors give {roots.size} roots in {region} but F - {c:g} winds {total} times"
            )
        return roots[np.lexsort((roots.imag, roots.real))]

    def f(z):
        F, Fp = discriminant_array(a, z, int_tol)
        return F - c, Fp

    return find_roots(f, region, tol=tol, seeds=seeds)


def real_spectrum_membership(a: complex, lam_real, tol: float = 1e-9):
    """True where F(lambda) lies in [-2 - tol, 2 + tol] (lambda real)."""
    lam = np.asarray(lam_real, dtype=float)
    F = discriminant_values(a, lam.astype(complex).ravel()).reshape(lam.shape)
    inside = (F.real >= -2.0 - tol) & (F.real <= 2.0 + tol)
    return bool(inside) if lam.ndim == 0 else inside
