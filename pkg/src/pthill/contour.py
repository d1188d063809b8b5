"""Regions in the complex plane, argument-principle counting and contour root finding.

Roots of an analytic ``f`` inside a region are located by vectorized Newton
iteration from a seed grid.  The argument principle supplies the total count
on the region boundary and the multiplicity of every cluster of converged
iterates; clusters holding more than one root are resolved from the contour
moments ``(1/2 pi i) \\oint (z-c)^k f'/f dz``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import MissedRootError

AnalyticFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
ValueFn = Callable[[np.ndarray], np.ndarray]

MAX_PHASE_STEP = math.pi / 4
MAX_BOUNDARY_POINTS = 1 << 16


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    @property
    def scale(self) -> float:
        return float(self.radius)

    def contains(self, z, margin: float = 0.0):
        return np.abs(np.asarray(z) - self.center) < self.radius - margin

    def boundary_param(self, s: np.ndarray) -> np.ndarray:
        """Boundary point at arclength fraction s in [0, 1), counter-clockwise."""
        return self.center + self.radius * np.exp(2j * math.pi * s)

    def grid(self, n: int) -> np.ndarray:
        x = np.linspace(-1.0, 1.0, n + 2)[1:-1]
        X, Y = np.meshgrid(x, x)
        z = (X + 1j * Y).ravel()
        z = z[np.abs(z) < 1.0]
        return self.center + self.radius * z

    def distance_to_boundary(self, z):
        return self.radius - np.abs(np.asarray(z) - self.center)


@dataclass(frozen=True)
class Rect:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @property
    def scale(self) -> float:
        return 0.5 * max(self.xmax - self.xmin, self.ymax - self.ymin)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    def contains(self, z, margin: float = 0.0):
        z = np.asarray(z)
        return (
            (z.real > self.xmin + margin)
            & (z.real < self.xmax - margin)
            & (z.imag > self.ymin + margin)
            & (z.imag < self.ymax - margin)
        )

    def boundary_param(self, s: np.ndarray) -> np.ndarray:
        w, h = self.xmax - self.xmin, self.ymax - self.ymin
        per = 2.0 * (w + h)
        d = np.mod(np.asarray(s, dtype=float), 1.0) * per
        z = np.empty(d.shape, dtype=complex)
        m0 = d < w
        m1 = (d >= w) & (d < w + h)
        m2 = (d >= w + h) & (d < 2 * w + h)
        m3 = d >= 2 * w + h
        z[m0] = self.xmin + d[m0] + 1j * self.ymin
        z[m1] = self.xmax + 1j * (self.ymin + d[m1] - w)
        z[m2] = self.xmax - (d[m2] - w - h) + 1j * self.ymax
        z[m3] = self.xmin + 1j * (self.ymax - (d[m3] - 2 * w - h))
        return z

    def grid(self, n: int) -> np.ndarray:
        w, h = self.xmax - self.xmin, self.ymax - self.ymin
        nx = max(2, int(round(n * math.sqrt(w / h)))) if h > 0 else n
        ny = max(2, int(round(n * math.sqrt(h / w)))) if w > 0 else n
        x = np.linspace(self.xmin, self.xmax, nx + 2)[1:-1]
        y = np.linspace(self.ymin, self.ymax, ny + 2)[1:-1]
        X, Y = np.meshgrid(x, y)
        return (X + 1j * Y).ravel()

    def distance_to_boundary(self, z):
        z = np.asarray(z)
        return np.minimum.reduce(
            [z.real - self.xmin, self.xmax - z.real, z.imag - self.ymin, self.ymax - z.imag]
        )


Region = Disc | Rect


class BoundaryCache:
    """Boundary samples of ``values`` along a region, refined on demand.

    Winding numbers of ``values - shift`` are read off the phase increments;
    the sampling is refined until every increment is below pi/4 for every
    requested shift, so one set of evaluations serves many shifts.
    """

    def __init__(self, values: ValueFn, region: Region, n_initial: int = 512):
        self.values = values
        self.region = region
        self.s = np.linspace(0.0, 1.0, n_initial, endpoint=False)
        self.f = np.asarray(values(region.boundary_param(self.s)), dtype=complex)

    def winding(self, shifts: Sequence[complex] = (0.0,)) -> np.ndarray:
        shifts = np.atleast_1d(np.asarray(shifts, dtype=complex))
        while True:
            s_next = np.append(self.s, 1.0)
            f_next = np.append(self.f, self.f[0])
            g = f_next[None, :] - shifts[:, None]
            if np.any(g == 0):
                raise MissedRootError(f"a zero lies on the boundary of {self.region}")
            dphi = np.angle(g[:, 1:] / g[:, :-1])
            bad = np.any(np.abs(dphi) > MAX_PHASE_STEP, axis=0)
            if not bad.any():
                return np.rint(dphi.sum(axis=1) / (2.0 * math.pi)).astype(int)
            if self.s.size + bad.sum() > MAX_BOUNDARY_POINTS:
                raise MissedRootError(
                    f"boundary of {self.region} not resolvable: a zero lies on or very near the contour"
                )
            mids = 0.5 * (s_next[:-1][bad] + s_next[1:][bad])
            f_mid = np.asarray(self.values(self.region.boundary_param(mids)), dtype=complex)
            s = np.concatenate([self.s, mids])
            f = np.concatenate([self.f, f_mid])
            order = np.argsort(s)
            self.s, self.f = s[order], f[order]


def winding_numbers(
    values: ValueFn,
    region: Region,
    shifts: Sequence[complex] = (0.0,),
    n_initial: int = 512,
) -> np.ndarray:
    """Winding numbers of ``values(z) - shift`` around 0 along the region boundary."""
    return BoundaryCache(values, region, n_initial).winding(shifts)


def count_zeros(func: AnalyticFn, region: Region, shift: complex = 0.0) -> int:
    return int(winding_numbers(lambda z: func(z)[0], region, [shift])[0])


def circle_moments(func: AnalyticFn, center: complex, radius: float, kmax: int, n: int = 64):
    """Moments s_k = (1/2 pi i) \\oint (z - center)^k f'/f dz, k = 0..kmax (trapezoid rule)."""
    theta = 2.0 * math.pi * np.arange(n) / n
    w = radius * np.exp(1j * theta)
    f, fp = func(center + w)
    g = fp / f * w
    return np.array([np.mean(g * w**k) for k in range(kmax + 1)])


def _roots_from_moments(s: np.ndarray, m: int, center: complex) -> np.ndarray:
    """Roots from power sums s_1..s_m (Newton identities)."""
    e = np.zeros(m + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, m + 1):
        acc = 0.0
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * s[i]
        e[k] = acc / k
    coeffs = np.array([(-1) ** k * e[k] for k in range(m + 1)])
    return center + np.roots(coeffs)


def newton(func: AnalyticFn, z0: np.ndarray, region: Region, tol: float, max_iter: int = 60):
    """Vectorized Newton; returns (points, converged-mask)."""
    z = np.array(z0, dtype=complex)
    step_cap = 0.25 * region.scale
    converged = np.zeros(z.size, dtype=bool)
    alive = np.ones(z.size, dtype=bool)
    last_step = np.full(z.size, np.inf)
    for _ in range(max_iter):
        act = np.flatnonzero(alive & ~converged)
        if act.size == 0:
            break
        f, fp = func(z[act])
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / fp
        bad = ~np.isfinite(step)
        step[bad] = 0.0
        big = np.abs(step) > step_cap
        step[big] *= step_cap / np.abs(step[big])
        z[act] -= step
        last_step[act] = np.abs(step)
        alive[act[bad]] = False
        far = ~region.contains(z[act], margin=-0.5 * region.scale)
        alive[act[far]] = False
        converged[act] = np.abs(step) <= tol * np.maximum(1.0, np.abs(z[act]))
    # iterates crawling toward a multiple root converge linearly; keep them as candidates
    slow = alive & ~converged & (last_step < 1e-4 * region.scale)
    return z, converged | slow


def _cluster(points: np.ndarray, radius: float) -> list[np.ndarray]:
    clusters: list[list[complex]] = []
    centers: list[complex] = []
    for p in points[np.lexsort((points.imag, points.real))]:
        for i, c in enumerate(centers):
            if abs(p - c) <= radius:
                clusters[i].append(p)
                break
        else:
            centers.append(p)
            clusters.append([p])
    return [np.array(c) for c in clusters]


def find_roots(
    func: AnalyticFn,
    region: Region,
    tol: float = 1e-10,
    seeds: Optional[np.ndarray] = None,
    grid: int = 14,
    max_refine: int = 3,
    expected: Optional[int] = None,
) -> np.ndarray:
    """All zeros of ``func`` inside ``region``, repeated by multiplicity, sorted by (Re, Im).

    ``func(z)`` returns ``(f(z), f'(z))`` for an array ``z``.  ``expected`` is the
    argument-principle count if the caller already has it.
    """
    total = count_zeros(func, region) if expected is None else int(expected)
    if total < 0:
        raise MissedRootError(f"negative winding number {total} on {region}: poles inside")
    if total == 0:
        return np.empty(0, dtype=complex)
    scale = region.scale
    found = np.empty(0, dtype=complex)
    for attempt in range(max_refine + 1):
        s = region.grid(grid * 2**attempt)
        if seeds is not None:
            s = np.concatenate([np.asarray(seeds, dtype=complex), s])
        z, ok = newton(func, s, region, tol)
        cand = z[ok & region.contains(z)]
        found = _resolve_clusters(func, region, cand, tol, scale)
        if found.size == total:
            return found[np.lexsort((found.imag, found.real))]
        if found.size > total:
            break
    raise MissedRootError(
        f"found {found.size} roots in {region} but the argument principle counts {total}"
    )


def _resolve_clusters(func, region, cand, tol, scale) -> np.ndarray:
    if cand.size == 0:
        return cand
    # fragments of a multiple root sit up to ~eps^(1/m) apart; the moments below split true clusters
    groups = _cluster(cand, max(1e3 * tol, 1e-4 * scale))
    centers = np.array([g.mean() for g in groups])
    out: list[complex] = []
    for i, c in enumerate(centers):
        others = np.delete(centers, i)
        d_other = np.min(np.abs(others - c)) if others.size else math.inf
        rho = min(0.4 * d_other, 0.05 * scale, 0.9 * float(region.distance_to_boundary(c)))
        spread = np.max(np.abs(groups[i] - c))
        rho = max(rho, 0.0)
        if rho <= 10.0 * spread or rho == 0.0:
            # cluster touches another one: fall back to its mean as a simple root
            out.append(complex(c))
            continue
        n = 64
        while True:
            mom = circle_moments(func, c, rho, kmax=1, n=n)
            m_est = mom[0].real
            if abs(mom[0] - round(m_est)) < 1e-3 or n >= 1024:
                break
            n *= 2
        m = int(round(m_est))
        if m <= 0:
            continue
        if m == 1:
            r = c + mom[1]
            r = _polish(func, r, tol)
            out.append(r)
        else:
            mom = circle_moments(func, c, rho, kmax=m, n=max(n, 128))
            rts = _roots_from_moments(mom, m, c)
            out.extend(complex(x) for x in rts)
    return np.array(out, dtype=complex)


def _polish(func, z, tol, iters: int = 4) -> complex:
    z = complex(z)
    for _ in range(iters):
        f, fp = func(np.array([z]))
        if fp[0] == 0:
            break
        dz = complex(f[0] / fp[0])
        z -= dz
        if abs(dz) <= tol * max(1.0, abs(z)):
            break
    return z
