"""Bloch bands, real spectral components and spectral singularities.

Bands are traced over a quasimomentum grid on [0, pi].  At every grid point the
Bloch eigenvalues inside a rectangle are polished roots of F = 2 cos t,
seeded from the Floquet matrix; their number is certified by the winding
number of F - 2 cos t along the rectangle.  Consecutive root sets are matched
by minimum-cost assignment, refining the step where the match is ambiguous.
Where two bands of a pair collide, the conjugate-pair structure decides:
below the collision the lower real value continues the odd band, above it
the member with Im > 0 continues the even band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment

from .contour import BoundaryCache, Rect
from .criticality import Phase, V_of_c, classify_phase
from .discriminant import (
    BlochPoint,
    bloch_roots,
    discriminant_array,
    discriminant_values,
    hill_discriminant,
    real_spectrum_membership,
)
from .errors import DomainError, ModelViolation, PropertyViolation, TracingError
from .operator_model import (
    LabeledEigenvalue,
    antiperiodic_eigenvalues,
    floquet_eigenvalues,
    lookup,
    periodic_eigenvalues,
)

MIN_T_STEPS = 64
MAX_BANDS = 12
MIN_DT = 1e-5 * math.pi
REAL_TOL = 1e-8
ENDPOINT_TOL = 1e-6


@dataclass(frozen=True)
class SpectralSingularity:
    Lambda: float
    t_n: float
    n: int
    F_value: float = 0.0
    F_prime: float = 0.0


@dataclass(frozen=True)
class RealComponent:
    index: int
    lo: float
    hi: float
    degenerate: bool = False

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass
class Band:
    index: int
    t: np.ndarray
    mu: np.ndarray
    endpoint_0: LabeledEigenvalue
    endpoint_pi: LabeledEigenvalue
    real_until: Optional[float] = None
    singularity: Optional[SpectralSingularity] = None

    @property
    def samples(self) -> list[BlochPoint]:
        return [BlochPoint(float(t), complex(m), self.index) for t, m in zip(self.t, self.mu)]

    def real_mask(self, tol: float = REAL_TOL) -> np.ndarray:
        return np.abs(self.mu.imag) <= tol * np.maximum(1.0, np.abs(self.mu))


# ---------------------------------------------------------------------------
# coupling checks and labels


def _kind(a: complex) -> str:
    a = complex(a)
    if a.imag == 0.0 and 0.0 < a.real <= 2.0:
        return "real"
    if abs(a.real) <= 1e-14 * max(1.0, abs(a)) and 0.0 < a.imag < 2.0:
        return "imag"
    raise DomainError(f"coupling must be real in (0, 2] or imaginary in i(0, 2), got {a}")


def _require_imag(a: complex) -> float:
    if _kind(a) != "imag":
        raise DomainError(f"coupling must be imaginary in i(0, 2), got {a}")
    return complex(a).imag


def _region_bound(n_top: int) -> float:
    return max(60.0, float((n_top + 2) ** 2 + 20))


def _trunc_N(bound: float) -> int:
    return max(32, int(math.ceil(math.sqrt(4.0 * bound) / 2.0)) + 8)


def _eigen_lists(a: complex, n_top: int):
    bound = _region_bound(n_top)
    N = _trunc_N(bound)
    return periodic_eigenvalues(a, N=N, region_bound=bound), antiperiodic_eigenvalues(a, N=N, region_bound=bound)


def endpoint_labels(n: int) -> tuple[tuple[int, str], tuple[int, str]]:
    """Labels of mu_n(0) and mu_n(pi)."""
    if n == 1:
        start = (0, "")
    elif n % 2 == 0:
        start = (n, "-")
    else:
        start = (n - 1, "+")
    end = (n, "-") if n % 2 == 1 else (n - 1, "+")
    return start, end


def _component_ends(per, n: int) -> tuple[LabeledEigenvalue, LabeledEigenvalue]:
    lo = lookup(per, 0) if n == 1 else lookup(per, 2 * n - 2, "+")
    return lo, lookup(per, 2 * n, "-")


def _is_real(z: complex) -> bool:
    return abs(complex(z).imag) <= REAL_TOL * max(1.0, abs(z))


# ---------------------------------------------------------------------------
# real components and singularities


def real_components(a: complex, n_max: int = 3, samples: int = 7) -> list[RealComponent]:
    """Real intervals I_n = [lambda_{2n-2}^+, lambda_{2n}^-], n <= n_max, validated by F-membership."""
    c = _require_imag(a)
    if not (1 <= n_max <= MAX_BANDS):
        raise DomainError(f"n_max must lie in [1, {MAX_BANDS}], got {n_max}")
    per, _ = _eigen_lists(a, 2 * n_max)
    phase = classify_phase(V_of_c(c))
    comps: list[RealComponent] = []
    for n in range(1, n_max + 1):
        lo, hi = _component_ends(per, n)
        if n == 1 and phase is not Phase.CASE1:
            if phase is Phase.CASE2:
                x = 0.5 * (lo.value + hi.value).real
                comps.append(RealComponent(1, x, x, degenerate=True))
            continue
        if not (_is_real(lo.value) and _is_real(hi.value)):
            raise ModelViolation(f"component {n} has nonreal ends {lo.value}, {hi.value}")
        comps.append(RealComponent(n, lo.value.real, hi.value.real))
    _validate_components(a, per, comps, n_max, samples)
    return comps


def _validate_components(a, per, comps, n_max, samples) -> None:
    inside, outside = [], []
    for comp in comps:
        if comp.degenerate:
            continue
        w = comp.hi - comp.lo
        inside.extend(comp.lo + w * np.linspace(0.02, 0.98, samples))
    # gaps between consecutive components, and the half-line below the spectrum
    for n in range(1, n_max + 1):
        g_lo, g_hi = lookup(per, 2 * n, "-").value, lookup(per, 2 * n, "+").value
        if _is_real(g_lo) and _is_real(g_hi) and g_hi.real - g_lo.real > 1e-4:
            outside.append(0.5 * (g_lo.real + g_hi.real))
    first = next((c for c in comps if not c.degenerate), None)
    if first is not None:
        outside.append(first.lo - 1.0)
    if not any(c.index == 1 and not c.degenerate for c in comps):
        # the first component is absent: nothing real below lambda_2^+
        top = lookup(per, 2, "+").value.real
        outside.extend(np.linspace(top - 6.0, top - 1e-3, samples))
    pts = np.array(inside + outside, dtype=float)
    if pts.size == 0:
        return
    member = np.atleast_1d(real_spectrum_membership(a, pts))
    expect = np.array([True] * len(inside) + [False] * len(outside))
    bad = np.flatnonzero(member != expect)
    if bad.size:
        raise ModelViolation(
            "membership sampling contradicts the interval structure at lambda = "
            + ", ".join(f"{pts[i]:.10g} (expected {'in' if expect[i] else 'out'})" for i in bad[:5])
        )


def find_singularity(a: complex, n: int) -> SpectralSingularity:
    """Interior double Bloch eigenvalue of the component I_n: F'(Lambda) = 0 with |F(Lambda)| < 2."""
    _require_imag(a)
    per, _ = _eigen_lists(a, 2 * n)
    lo, hi = _component_ends(per, n)
    if not (_is_real(lo.value) and _is_real(hi.value)) or hi.value.real - lo.value.real <= 1e-12:
        raise DomainError(f"component I_{n} is degenerate or absent at a = {a}")
    x0, x1 = lo.value.real, hi.value.real

    def fp(x: float) -> float:
        return hill_discriminant(a, x).F_prime.real

    eps = 1e-9 * (x1 - x0)
    f0, f1 = fp(x0 + eps), fp(x1 - eps)
    if f0 * f1 > 0:
        raise ModelViolation(f"F' has no sign change on I_{n} = [{x0}, {x1}]")
    lam = brentq(fp, x0 + eps, x1 - eps, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    d = hill_discriminant(a, lam)
    F = d.F.real
    if not (-2.0 < F < 2.0):
        raise ModelViolation(f"F(Lambda_{n}) = {F} lies outside (-2, 2)")
    return SpectralSingularity(Lambda=float(lam), t_n=float(math.acos(F / 2.0)), n=int(n),
                               F_value=F, F_prime=abs(d.F_prime))


# ---------------------------------------------------------------------------
# band tracing


class _RootOracle:
    """Bloch eigenvalues inside a fixed rectangle, for arbitrary t."""

    def __init__(self, a: complex, region: Rect, count: int, tol: float):
        self.a = a
        self.region = region
        self.count = count
        self.tol = tol
        self.boundary = BoundaryCache(lambda z: discriminant_values(a, z), region)
        bound = float(max(abs(region.xmin), abs(region.xmax)) + abs(region.ymax))
        self.K = max(16, int(math.ceil(math.sqrt(4.0 * bound) / 2.0)) + 10)
        self.bound = bound
        self.cache: dict[float, np.ndarray] = {}

    def check_counts(self, ts: np.ndarray) -> None:
        w = self.boundary.winding(2.0 * np.cos(ts))
        bad = np.flatnonzero(w != self.count)
        if bad.size:
            raise TracingError(
                f"F - 2cos t winds {w[bad[0]]} times around {self.region} at t = {ts[bad[0]]:.6g}; "
                f"expected {self.count}"
            )

    def seeds(self, t: float) -> np.ndarray:
        ev = floquet_eigenvalues(self.a, t, self.K, region_bound=1.5 * self.bound)
        return ev[self.region.contains(ev)]

    def roots(self, ts) -> None:
        """Compute and cache roots for every t in ts not yet known."""
        ts = [float(t) for t in ts if float(t) not in self.cache]
        if not ts:
            return
        self.check_counts(np.array(ts))
        interior = [t for t in ts if 0.0 < t < math.pi]
        for t in ts:
            if t in (0.0, math.pi):
                self.cache[t] = bloch_roots(self.a, t, self.region, tol=self.tol)
        if not interior:
            return
        seeds, owner = [], []
        for i, t in enumerate(interior):
            s = self.seeds(t)
            seeds.append(s)
            owner.append(np.full(s.size, i))
        z0 = np.concatenate(seeds)
        own = np.concatenate(owner)
        shift = 2.0 * np.cos(np.array(interior))[own]
        z, ok = self._batch_newton(z0, shift)
        for i, t in enumerate(interior):
            sel = own == i
            r = z[sel & ok]
            r = r[self.region.contains(r)]
            if r.size == self.count and _min_gap(r) > 1e-7 * max(1.0, np.max(np.abs(r))):
                self.cache[t] = r[np.lexsort((r.imag, r.real))]
            else:
                # close or double roots: fall back to contour moments
                self.cache[t] = bloch_roots(self.a, t, self.region, tol=self.tol, seeds=seeds[i])
            if self.cache[t].size != self.count:
                raise TracingError(f"found {self.cache[t].size} Bloch eigenvalues at t = {t}, expected {self.count}")

    def _batch_newton(self, z0: np.ndarray, shift: np.ndarray):
        z = z0.copy()
        done = np.zeros(z.size, dtype=bool)
        for _ in range(12):
            act = np.flatnonzero(~done)
            if act.size == 0:
                break
            F, Fp = discriminant_array(self.a, z[act])
            step = (F - shift[act]) / Fp
            step[~np.isfinite(step)] = 0.0
            z[act] -= step
            done[act] = np.abs(step) <= self.tol * np.maximum(1.0, np.abs(z[act]))
        # accept points that still moved only marginally (slow convergence near a double root)
        F, _ = discriminant_array(self.a, z)
        ok = np.isfinite(z) & (np.abs(F - shift) < 1e-7 * np.maximum(1.0, np.abs(F)))
        return z, ok | done

    def __getitem__(self, t: float) -> np.ndarray:
        t = float(t)
        if t not in self.cache:
            self.roots([t])
        return self.cache[t]


def _min_gap(r: np.ndarray) -> float:
    if r.size < 2:
        return math.inf
    d = np.abs(r[:, None] - r[None, :])
    d[np.diag_indices(r.size)] = math.inf
    return float(d.min())


def _choose_right_edge(per, n_top: int) -> tuple[float, int]:
    """Real abscissa inside the periodic gap (lambda_n^-, lambda_n^+) for the smallest even n >= n_top."""
    n = n_top + (n_top % 2)
    while n <= MAX_BANDS + 2:
        try:
            lo, hi = lookup(per, n, "-").value, lookup(per, n, "+").value
        except KeyError:
            break
        if _is_real(lo) and _is_real(hi) and hi.real - lo.real > 1e-6:
            return 0.5 * (lo.real + hi.real), n
        n += 2
    raise TracingError(f"no resolvable real periodic gap above band {n_top}; the bands cannot be isolated")


def _match(prev: np.ndarray, nxt: np.ndarray):
    cost = np.abs(prev[:, None] - nxt[None, :])
    _, col = linear_sum_assignment(cost)
    assigned = nxt[col]
    d = cost[np.arange(prev.size), col]
    ambiguous = []
    for b in range(prev.size):
        others = np.delete(np.arange(nxt.size), col[b])
        # a root numerically identical to the assigned one is not an alternative
        same = np.abs(nxt[others] - assigned[b]) <= 1e-7 * max(1.0, abs(assigned[b]))
        alt = cost[b, others][~same]
        if alt.size and alt.min() < 2.0 * d[b]:
            ambiguous.append(b)
    return assigned, ambiguous


def _pair_rule(assigned: np.ndarray, ambiguous: list[int]) -> Optional[np.ndarray]:
    """Resolve ambiguity inside colliding pairs (bands 2n-1, 2n) from their conjugate structure."""
    amb = set(ambiguous)
    out = assigned.copy()
    for b in sorted(amb):
        partner = b + 1 if b % 2 == 0 else b - 1  # 0-based: (0, 1), (2, 3), ...
        if partner not in amb:
            return None
        odd, even = min(b, partner), max(b, partner)
        x, y = assigned[odd], assigned[even]
        if _is_real(x) and _is_real(y):
            lo, hi = (x, y) if x.real <= y.real else (y, x)
            out[odd], out[even] = lo, hi
        elif abs(x - np.conj(y)) <= 1e-6 * max(1.0, abs(x)):
            up, down = (x, y) if x.imag > y.imag else (y, x)
            out[odd], out[even] = down, up
        else:
            return None
    return out


def trace_bands(a: complex, n_max: int = 4, t_steps: int = 256, tol: float = 1e-11) -> list[Band]:
    """Bands mu_1..mu_{n_max} over [0, pi], numbered by their endpoint eigenvalues."""
    a = complex(a)
    kind = _kind(a)
    if t_steps < MIN_T_STEPS:
        raise DomainError(f"t_steps must be >= {MIN_T_STEPS}, got {t_steps}")
    if not (1 <= n_max <= MAX_BANDS):
        raise DomainError(f"n_max must lie in [1, {MAX_BANDS}], got {n_max}")
    per, anti = _eigen_lists(a, n_max + 4)
    xmax, n_c = _choose_right_edge(per, n_max)
    reach = 2.0 * abs(a.real) + 1.0
    height = 2.0 * abs(a.imag) + 1.0
    region = Rect(-reach, xmax, -height, height)
    oracle = _RootOracle(a, region, n_c, tol)

    sings: dict[int, SpectralSingularity] = {}
    if kind == "imag":
        phase = classify_phase(V_of_c(a.imag))
        for m in range(1, n_c // 2 + 1):
            if m == 1 and phase is not Phase.CASE1:
                continue
            sings[m] = find_singularity(a, m)
    grid = set(np.linspace(0.0, math.pi, t_steps).tolist())
    grid.update(s.t_n for s in sings.values())
    ts = np.array(sorted(grid))
    ts[0], ts[-1] = 0.0, math.pi
    oracle.roots(ts)
    for s in sings.values():
        # the double root is known to full precision from F'(Lambda) = 0; Newton only reaches sqrt(eps)
        r = oracle.cache[float(s.t_n)].copy()
        idx = np.argsort(np.abs(r - s.Lambda))[:2]
        r[idx] = s.Lambda
        oracle.cache[float(s.t_n)] = r

    starts, ends = [], []
    for n in range(1, n_c + 1):
        (i0, s0), (i1, s1) = endpoint_labels(n)
        starts.append(lookup(per, i0, s0))
        ends.append(lookup(anti, i1, s1))
    target = np.array([e.value for e in starts])
    r0 = oracle[0.0]
    cost = np.abs(target[:, None] - r0[None, :])
    _, col = linear_sum_assignment(cost)
    if cost[np.arange(n_c), col].max() > ENDPOINT_TOL:
        raise TracingError("t = 0 roots of F - 2 do not match the periodic eigenvalues")
    cur = r0[col]
    out_t, out_mu = [0.0], [cur]

    def advance(t0: float, mu0: np.ndarray, t1: float):
        assigned, amb = _match(mu0, oracle[t1])
        if not amb:
            return [(t1, assigned)]
        if kind == "imag":
            fixed = _pair_rule(assigned, amb)
            if fixed is not None:
                return [(t1, fixed)]
        if t1 - t0 <= MIN_DT:
            raise TracingError(f"ambiguous band matching on [{t0:.8g}, {t1:.8g}] for bands {[b + 1 for b in amb]}")
        tm = 0.5 * (t0 + t1)
        first = advance(t0, mu0, tm)
        return first + advance(tm, first[-1][1], t1)

    for t0, t1 in zip(ts[:-1], ts[1:]):
        for t, mu in advance(float(t0), out_mu[-1], float(t1)):
            out_t.append(t)
            out_mu.append(mu)
    T = np.array(out_t)
    M = np.array(out_mu)

    bands = []
    for n in range(1, n_max + 1):
        b = n - 1
        end = ends[b]
        if abs(M[-1, b] - end.value) > ENDPOINT_TOL:
            raise TracingError(
                f"band {n} ends at {M[-1, b]:.10g}, expected {end.label} = {end.value:.10g}"
            )
        sing = sings.get((n + 1) // 2)
        bands.append(Band(
            index=n, t=T, mu=M[:, b], endpoint_0=starts[b], endpoint_pi=end,
            real_until=sing.t_n if sing else None, singularity=sing,
        ))
    return bands


# ---------------------------------------------------------------------------
# property checks


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float = 0.0
    detail: str = ""


@dataclass
class PropertyReport:
    a: complex
    n_max: int
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, value: float = 0.0, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), float(value), detail))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def _segments_intersect(z: np.ndarray) -> bool:
    """True if the polyline z has two non-adjacent segments that cross."""
    if z.size < 4:
        return False
    p, q = z[:-1], z[1:]
    # drop zero-length segments (repeated samples at a double point)
    keep = np.abs(q - p) > 0
    p, q = p[keep], q[keep]
    n = p.size
    if n < 3:
        return False

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    d = q - p
    for i in range(n - 2):
        j = np.arange(i + 2, n)
        r, s = d[i], d[j]
        den = cross(np.full(j.size, r), s)
        qp = p[j] - p[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            tt = cross(qp, s) / den
            uu = cross(qp, np.full(j.size, r)) / den
        hit = (np.abs(den) > 1e-30) & (tt > 1e-9) & (tt < 1 - 1e-9) & (uu > 1e-9) & (uu < 1 - 1e-9)
        if hit.any():
            return True
    return False


def verify_properties(
    a: complex, n_max: int = 3, t_steps: int = 256, raise_on_failure: bool = True, tol: float = ENDPOINT_TOL
) -> PropertyReport:
    """Check the band-structure properties at an imaginary coupling in the first phase.

    ``tol`` is the agreement required of endpoint, segment and conjugate-arc comparisons.
    """
    c = _require_imag(a)
    a = 1j * c
    if classify_phase(V_of_c(c)) is not Phase.CASE1:
        raise DomainError(f"a = {a} is not in the phase with a nondegenerate first component")
    n_pairs = (n_max + 1) // 2
    bands = trace_bands(a, n_max=2 * n_pairs, t_steps=t_steps)
    comps = real_components(a, n_max=n_pairs)
    rep = PropertyReport(a=a, n_max=n_max)

    # endpoint identities
    e0 = max(abs(b.mu[0] - b.endpoint_0.value) for b in bands)
    e1 = max(abs(b.mu[-1] - b.endpoint_pi.value) for b in bands)
    rep.add("endpoints", max(e0, e1) < tol, max(e0, e1), "mu_n(0), mu_n(pi) equal their eigenvalue labels")

    # Pr.1: real spectrum equals the union of the components
    per, _ = _eigen_lists(a, 2 * n_pairs)
    lo = comps[0].lo - 2.0
    hi = lookup(per, 2 * n_pairs, "+").value.real
    x = np.linspace(lo, hi, 1200)
    near = np.zeros_like(x, dtype=bool)
    for e in per:
        if _is_real(e.value):
            near |= np.abs(x - e.value.real) < 1e-6
    member = np.asarray(real_spectrum_membership(a, x))
    expect = np.zeros_like(member)
    for comp in comps:
        expect |= (x >= comp.lo) & (x <= comp.hi)
    mism = np.flatnonzero((member != expect) & ~near)
    rep.add("Pr.1 real spectrum", mism.size == 0, mism.size, "F-membership on a real grid matches the union of I_n")

    worst_real, worst_seg, worst_conj, worst_meet = 0.0, 0.0, 0.0, 0.0
    pr2_ok = pr4_ok = pr5_ok = True
    for n in range(1, n_pairs + 1):
        b_odd, b_even = bands[2 * n - 2], bands[2 * n - 1]
        comp = next(cc for cc in comps if cc.index == n)
        sing = b_odd.singularity
        T = b_odd.t
        # Pr.2: real samples lie in I_n
        for b in (b_odd, b_even):
            m = b.real_mask()
            vals = b.mu[m].real
            out = np.maximum(comp.lo - vals, vals - comp.hi).clip(min=0.0)
            worst_real = max(worst_real, float(out.max(initial=0.0)))
        pr2_ok &= worst_real < tol
        # Pr.3: singularity
        Fv = hill_discriminant(a, sing.Lambda)
        pr3 = (comp.lo < sing.Lambda < comp.hi) and abs(Fv.F.real) < 2.0 and abs(Fv.F_prime) < 1e-6
        k = int(np.argmin(np.abs(T - sing.t_n)))
        meet = max(abs(b_odd.mu[k] - sing.Lambda), abs(b_even.mu[k] - sing.Lambda))
        worst_meet = max(worst_meet, meet)
        others = [bb for bb in bands if bb.index not in (b_odd.index, b_even.index)]
        through = 2 + sum(abs(bb.mu[k] - sing.Lambda) < tol for bb in others)
        rep.add(f"Pr.3 singularity n={n}", pr3 and meet < tol and through == 2, meet,
                f"Lambda={sing.Lambda:.12g}, t_n={sing.t_n:.12g}, |F'|={abs(Fv.F_prime):.2g}, bands through={through}")
        # Pr.4: real exactly up to t_n, covering [lo, Lambda] and [Lambda, hi]
        before = T <= sing.t_n
        after = T > sing.t_n
        real_ok = all(b.real_mask()[before].all() and not b.real_mask()[after].any() for b in (b_odd, b_even))
        seg = max(
            abs(b_odd.mu[before].real.min() - comp.lo), abs(b_odd.mu[before].real.max() - sing.Lambda),
            abs(b_even.mu[before].real.min() - sing.Lambda), abs(b_even.mu[before].real.max() - comp.hi),
        )
        worst_seg = max(worst_seg, seg)
        pr4_ok &= real_ok and seg < tol
        # Pr.5: conjugate arcs
        dev = float(np.max(np.abs(b_even.mu[after] - np.conj(b_odd.mu[after])), initial=0.0))
        worst_conj = max(worst_conj, dev)
        pr5_ok &= dev < tol and bool(np.all(b_even.mu[after].imag > 0))
    rep.add("Pr.2 real samples in I_n", pr2_ok, worst_real)
    rep.add("Pr.4 real segments", pr4_ok, worst_seg, "real for t <= t_n only; segments [lo, Lambda], [Lambda, hi]")
    rep.add("Pr.5 conjugate arcs", pr5_ok, worst_conj, "max |mu_2n - conj mu_2n-1| for t > t_n")

    # Pr.6: distinct components are separated
    sets = [np.concatenate([bands[2 * n - 2].mu, bands[2 * n - 1].mu]) for n in range(1, n_pairs + 1)]
    gaps = [comps[i + 1].lo - comps[i].hi for i in range(len(comps) - 1)]
    thresh = min(1e-3, 0.5 * min(gaps)) if gaps else 1e-3
    sep = math.inf
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            sep = min(sep, float(np.min(np.abs(sets[i][:, None] - sets[j][None, :]))))
    rep.add("Pr.6 separation", sep > thresh, sep if math.isfinite(sep) else 0.0, f"threshold {thresh:.3g}")

    # global checks
    loops = [b.index for b in bands if _segments_intersect(b.mu)]
    rep.add("no closed curves", not loops, len(loops), f"self-intersecting bands: {loops}")
    M = np.array([b.mu for b in bands])
    pt = 0.0
    for j in range(M.shape[1]):
        col = M[:, j]
        cost = np.abs(col[:, None] - np.conj(col)[None, :])
        r, cidx = linear_sum_assignment(cost)
        pt = max(pt, float(cost[r, cidx].max()))
    rep.add("PT symmetry", pt < tol, pt, "root sets closed under conjugation at every t")
    if raise_on_failure and not rep.ok:
        names = ", ".join(c.name for c in rep.failures())
        raise PropertyViolation(f"band-structure checks failed: {names}", report=rep)
    return rep
