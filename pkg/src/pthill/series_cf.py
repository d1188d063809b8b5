"""Iterated characteristic series for the two lowest even periodic eigenvalues.

Eliminating every Fourier coefficient except the first two from the even
periodic recurrence gives

    N(a, lam) = lam^2 - 4 lam - 2 a^2 - a^2 lam/(lam - 16) - sum_k lam A_k(a, lam),

whose two zeros in |lam| < 9 are lambda_0 and lambda_2^-.  Each A_k is a sum
over sign paths n_1..n_{2k-3} of reciprocal pole products; truncating after
two terms and clearing denominators gives the degree-8 polynomial P(a^2, lam).

Terms are evaluated as jets (value, first and second lambda-derivative).  The
path sum is available both by explicit enumeration and by a dynamic program
over partial sums, which is what ``characteristic_N`` uses.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import DomainError, ModelViolation, PrecisionError, SingularityError

MAX_K = 12
POLE_GUARD = 1e-6
RATIO = Fraction(16, 189)
GAMMA_RADIUS = 0.00023
GAMMA_CENTERS = (
    complex(2.088438808, 0.0),
    complex(2.088959036, 0.0),
    complex(2.088698925, 0.000232839),
    complex(2.088698925, -0.000232839),
)
SHARP_A2_RANGE = (2.156, 2.158)  # range of -a^2 where the sharp tail bound applies


@dataclass(frozen=True)
class IndexPath:
    signs: tuple[int, ...]

    @property
    def partial_sums(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate(self.signs))

    @property
    def poles(self) -> tuple[int, ...]:
        """(6 + 2 S_s)^2 for each partial sum S_s."""
        return tuple((6 + 2 * s) ** 2 for s in self.partial_sums)


@dataclass(frozen=True)
class SeriesTerm:
    k: int
    value: complex
    d1: complex
    d2: complex


@dataclass(frozen=True)
class CharacteristicEval:
    a: complex
    lam: complex
    N_val: complex
    N_d1: complex
    N_d2: complex
    m_used: int
    tail_bound: float


# ---------------------------------------------------------------------------
# paths


@lru_cache(maxsize=None)
def _paths(k: int) -> tuple[IndexPath, ...]:
    # depth-first with pruning on the even-prefix condition
    L = 2 * k - 3
    out = []

    def rec(prefix, s):
        i = len(prefix)
        if i == L:
            if s in (1, -1):
                out.append(IndexPath(tuple(prefix)))
            return
        if abs(s) - 1 > L - i:
            return
        for n in (1, -1):
            t = s + n
            if (i + 1) % 2 == 0 and i + 1 <= 2 * (k - 2) and t < -1:
                continue
            prefix.append(n)
            rec(prefix, t)
            prefix.pop()

    rec([], 0)
    return tuple(out)


def enumerate_paths(k: int) -> list[IndexPath]:
    """Sign paths of length 2k-3 with total +-1 and 3 + S_{2s} > 1 for s <= k-2."""
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise DomainError(f"paths are defined for integer k >= 2, got {k!r}")
    if k > MAX_K:
        raise DomainError(f"k={k} exceeds the enumeration limit {MAX_K}")
    return list(_paths(int(k)))


# ---------------------------------------------------------------------------
# jets: (f, f', f'') as a stacked complex array of shape (3, ...)


def _jmul(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    return np.stack([f[0] * g[0], f[1] * g[0] + f[0] * g[1], f[2] * g[0] + 2 * f[1] * g[1] + f[0] * g[2]])


def _jrecip_linear(lam: np.ndarray, p: float) -> np.ndarray:
    """Jet of 1/(lam - p)."""
    u = 1.0 / (lam - p)
    return np.stack([u, -(u**2), 2.0 * u**3])


def _jpow_recip(lam: np.ndarray, p: float, e: int) -> np.ndarray:
    """Jet of (lam - p)^(-e)."""
    u = 1.0 / (lam - p)
    return np.stack([u**e, -e * u ** (e + 1), e * (e + 1) * u ** (e + 2)])


def _guard(lam: np.ndarray, poles) -> None:
    for p in poles:
        d = np.min(np.abs(lam - p)) if lam.size else math.inf
        if d <= POLE_GUARD:
            raise SingularityError(f"lambda within {d:.2g} of the pole {p}")


def _prefactor(a: complex, lam: np.ndarray, k: int) -> np.ndarray:
    """Jet of a^(2k+2) / ((lam-16)^2 (lam-36)^2)."""
    c = complex(a) ** (2 * k + 2)
    return c * _jmul(_jpow_recip(lam, 16.0, 2), _jpow_recip(lam, 36.0, 2))


def _A1(a: complex, lam: np.ndarray) -> np.ndarray:
    return complex(a) ** 4 * _jmul(_jpow_recip(lam, 16.0, 2), _jpow_recip(lam, 36.0, 1))


def A_k(a: complex, lam: complex, k: int) -> SeriesTerm:
    """k-th series term and its first two lambda-derivatives, by explicit path summation."""
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    if k == 1:
        _guard(lam_arr, (16, 36))
        j = _A1(a, lam_arr)
    else:
        paths = enumerate_paths(k)
        _guard(lam_arr, sorted({16, 36} | {p for P in paths for p in P.poles}))
        # log-differentiation of each pole product
        acc = np.zeros((3, lam_arr.size), dtype=complex)
        for P in paths:
            poles = np.array(P.poles, dtype=float)
            r = 1.0 / (lam_arr[None, :] - poles[:, None])
            v = np.prod(r, axis=0)
            s1 = r.sum(axis=0)
            s2 = (r**2).sum(axis=0)
            acc += np.stack([v, -v * s1, v * (s1**2 + s2)])
        j = _jmul(_prefactor(a, lam_arr, k), acc)
    return SeriesTerm(k=int(k), value=complex(j[0, 0]), d1=complex(j[1, 0]), d2=complex(j[2, 0]))


def series_terms(a: complex, lam, m: int) -> np.ndarray:
    """Jets of A_1..A_m at lam via a dynamic program over partial sums.

    Returns an array of shape (m, 3, *lam.shape).
    """
    lam_arr = np.asarray(lam, dtype=complex)
    shape = lam_arr.shape
    z = lam_arr.ravel()
    top = 2 * m - 3
    _guard(z, [(6 + 2 * s) ** 2 for s in range(-1, max(top, 0) + 1)])
    out = np.empty((m, 3, z.size), dtype=complex)
    out[0] = _A1(a, z)
    one = np.stack([np.ones_like(z), np.zeros_like(z), np.zeros_like(z)])
    # state: partial sum S -> jet of the summed pole products
    state = {0: one}
    recip = {}
    for L in range(1, top + 1):
        new: dict[int, np.ndarray] = {}
        for s, jet in state.items():
            for n in (1, -1):
                t = s + n
                # the even-prefix condition bounds every A_k using this prefix
                if L % 2 == 0 and t < 0:
                    continue
                if t not in recip:
                    recip[t] = _jrecip_linear(z, float((6 + 2 * t) ** 2))
                term = _jmul(jet, recip[t])
                new[t] = new[t] + term if t in new else term
        state = new
        if L % 2 == 1:
            k = (L + 3) // 2
            if k <= m:
                tot = state.get(1, 0) + state.get(-1, 0)
                out[k - 1] = _jmul(_prefactor(a, z, k), tot)
    return out.reshape((m, 3) + shape)


# ---------------------------------------------------------------------------
# characteristic function


def _ratio(a: complex, lam: np.ndarray) -> np.ndarray:
    return np.abs(4.0 * complex(a) ** 2 / ((lam - 16.0) * (lam - 36.0)))


def term_bounds(a: complex, lam, k) -> tuple:
    """Pointwise bounds on |A_k|, |A_k'|, |A_k''| from the geometric majorant."""
    lam = np.asarray(lam, dtype=complex)
    k = np.asarray(k)
    rho = _ratio(a, lam)
    base = np.abs(complex(a) ** 2 / (8.0 * (lam - 16.0))) * rho**k
    # the path count 2^(2k-3) undercounts the single closed-form term of A_1
    base = np.where(k == 1, 2.0 * base, base)
    d16 = np.abs(lam - 16.0)
    return base, base * (2 * k + 1) / d16, base * (2 * k + 2) * (2 * k + 1) / d16**2


def _value_tail(a: complex, lam: np.ndarray, m: int) -> np.ndarray:
    rho = _ratio(a, lam)
    head = np.abs(complex(a) ** 2 / (8.0 * (lam - 16.0)))
    return np.abs(lam) * head * rho ** (m + 1) / (1.0 - rho)


def _check_region(a: complex, lam: np.ndarray) -> None:
    if abs(complex(a)) >= 2.0:
        raise DomainError(f"|a| must be < 2, got {abs(a)}")
    if lam.size and np.max(np.abs(lam)) > 9.0 + 1e-12:
        raise DomainError("the series is certified only for |lambda| <= 9")


def choose_m(a: complex, lam, target_tail: float = 1e-14) -> int:
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    for m in range(1, MAX_K + 1):
        if np.max(_value_tail(a, lam, m)) <= target_tail:
            return m
    raise PrecisionError(f"tail target {target_tail:g} not reachable with k <= {MAX_K}")


def N_jet(a: complex, lam, m: Optional[int] = None, target_tail: float = 1e-14):
    """(N, N', N'', m, tail) for an array of lambda."""
    a = complex(a)
    lam = np.asarray(lam, dtype=complex)
    _check_region(a, lam.ravel())
    if m is None:
        m = choose_m(a, lam.ravel(), target_tail)
    T = series_terms(a, lam, m).sum(axis=0)
    A, A1, A2 = T[0], T[1], T[2]
    a2 = a * a
    u = 1.0 / (lam - 16.0)
    N = lam**2 - 4.0 * lam - 2.0 * a2 - a2 * lam * u - lam * A
    N1 = 2.0 * lam - 4.0 - a2 * u + lam * a2 * u**2 - (A + lam * A1)
    N2 = 2.0 + 2.0 * a2 * u**2 - 2.0 * lam * a2 * u**3 - (2.0 * A1 + lam * A2)
    tail = _value_tail(a, lam, m)
    return N, N1, N2, m, tail


def characteristic_N(a: complex, lam: complex, target_tail: float = 1e-14) -> CharacteristicEval:
    N, N1, N2, m, tail = N_jet(a, np.array([lam], dtype=complex), target_tail=target_tail)
    return CharacteristicEval(
        a=complex(a), lam=complex(lam), N_val=complex(N[0]), N_d1=complex(N1[0]), N_d2=complex(N2[0]),
        m_used=int(m), tail_bound=float(tail[0]),
    )


def remainder_bound(m: int) -> float:
    """(4/7)(16/189)^m, the uniform bound on the elimination remainder."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return float(Fraction(4, 7) * RATIO**m)


# ---------------------------------------------------------------------------
# sharp tail bound on the gamma circles


@dataclass(frozen=True)
class TailBound:
    geometric_tail: float  # sum_{k>4} |A_k|
    A3_bound: float
    E4_bound: float
    coupling: float  # 1 + F
    A34_bound: float
    lam_factor: float
    total: float
    coupling_kind: str


def _A3_closed(a2: float, lam: float) -> float:
    x16, x36, x64, x100 = lam - 16, lam - 36, lam - 64, lam - 100
    return a2**4 * (
        1 / (x16**4 * x36**3)
        + 1 / (x16**2 * x36**3 * x64**2)
        + 2 / (x16**3 * x36**3 * x64)
        + 1 / (x16**2 * x36**2 * x64**2 * x100)
    )


def _E4_closed(a2: float, lam: float) -> float:
    x16, x36, x64, x100, x144 = lam - 16, lam - 36, lam - 64, lam - 100, lam - 144
    return a2**5 * (
        1 / (x16**2 * x36**2 * x64**2 * x100**2 * x144)
        + 1 / (x16**2 * x36**2 * x64**3 * x100**2)
        + 1 / (x16**2 * x36**3 * x64**3 * x100)
        + 1 / (x16**3 * x36**3 * x64**2 * x100)
    )


def sharp_tail_constants(coupling: str = "printed") -> TailBound:
    """Uniform bound on |sum_{k>=3} lam A_k| over the gamma circles.

    ``coupling="printed"`` doubles the first coupling term,
    ``a^2/((lam-16)(lam-36))``; ``"derived"`` uses the two terms that actually
    relate A_4 to A_3, ``a^2/((lam-16)(lam-36)) + a^2/((lam-64)(lam-36))``.
    """
    hi_a2, lo_lam = 2.16, 2.1
    head = hi_a2 / (8.0 * abs(lo_lam - 16))
    rho = 4.0 * hi_a2 / (abs(lo_lam - 16) * abs(lo_lam - 36))
    geometric = head * rho**5 / (1.0 - rho)
    A3 = -_A3_closed(hi_a2, lo_lam)
    E4 = _E4_closed(-hi_a2, lo_lam)
    lo_a2, lam0 = -2.15, 2.0
    if coupling == "printed":
        F = 2.0 * lo_a2 / ((lam0 - 16) * (lam0 - 36))
    elif coupling == "derived":
        F = lo_a2 / ((lam0 - 16) * (lam0 - 36)) + lo_a2 / ((lam0 - 64) * (lam0 - 36))
    else:
        raise DomainError(f"unknown coupling {coupling!r}")
    A34 = E4 + (1.0 + F) * A3
    lam_factor = 2.1
    return TailBound(
        geometric_tail=geometric, A3_bound=A3, E4_bound=E4, coupling=1.0 + F, A34_bound=A34,
        lam_factor=lam_factor, total=lam_factor * (geometric + A34), coupling_kind=coupling,
    )


def tail_bound_sharp(a_squared: float, lam: complex, coupling: str = "printed") -> TailBound:
    """Certified bound on |sum_{k>=3} lam A_k(a, lam)| for lam on a gamma circle."""
    a2 = float(np.real(a_squared))
    if not (SHARP_A2_RANGE[0] < -a2 < SHARP_A2_RANGE[1]):
        raise DomainError(f"-a^2 must lie in {SHARP_A2_RANGE}, got {-a2}")
    lam = complex(lam)
    if not any(abs(lam - c) <= GAMMA_RADIUS * (1 + 1e-9) for c in GAMMA_CENTERS):
        raise DomainError(f"lambda={lam} is not on or inside any gamma circle")
    return sharp_tail_constants(coupling)


def gamma_circle(i: int, n: int = 360) -> np.ndarray:
    """n points on the circle gamma_i (i = 1..4)."""
    th = 2.0 * math.pi * np.arange(n) / n
    return GAMMA_CENTERS[i - 1] + GAMMA_RADIUS * np.exp(1j * th)


# ---------------------------------------------------------------------------
# second approximation and its polynomial


def Q_value(a_squared, lam):
    """The truncated characteristic function with the first two series terms."""
    a2 = complex(a_squared)
    lam = np.asarray(lam, dtype=complex)
    x16, x36, x64 = lam - 16.0, lam - 36.0, lam - 64.0
    return (
        lam**2
        - 4.0 * lam
        - a2 * lam / x16
        - a2**2 * lam / (x16**2 * x36)
        - a2**3 * lam / (x16**3 * x36**2)
        - a2**3 * lam / (x16**2 * x36**2 * x64)
        - 2.0 * a2
    )


def _pmul(p: list, q: list) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def _padd(*ps: list) -> list:
    n = max(len(p) for p in ps)
    out = [Fraction(0)] * n
    for p in ps:
        for i, x in enumerate(p[::-1]):
            out[n - 1 - i] += x
    return out


def _pscale(p: list, c) -> list:
    return [c * x for x in p]


def _lin(r: int) -> list:
    return [Fraction(1), Fraction(-r)]


def _ppow(p: list, e: int) -> list:
    out = [Fraction(1)]
    for _ in range(e):
        out = _pmul(out, p)
    return out


def _exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    # shortest decimal representation, so -2.15728123 is taken literally
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class ApproxPolynomial:
    a_squared: float
    coeffs: np.ndarray  # descending powers, length 9
    exact: tuple = field(repr=False, compare=False, default=())

    def __call__(self, lam):
        return np.polyval(self.coeffs, np.asarray(lam, dtype=complex))


def build_P(a_squared) -> ApproxPolynomial:
    """(lam-16)^3 (lam-36)^2 (lam-64) Q(a^2, lam), expanded in exact rational arithmetic."""
    a2 = _exact(a_squared)
    lam = [Fraction(1), Fraction(0)]
    D = _pmul(_pmul(_ppow(_lin(16), 3), _ppow(_lin(36), 2)), _lin(64))
    lead = _pmul(_padd([Fraction(1), Fraction(-4), Fraction(0)], [-2 * a2]), D)
    t1 = _pscale(_pmul(lam, _pmul(_pmul(_ppow(_lin(16), 2), _ppow(_lin(36), 2)), _lin(64))), a2)
    t2 = _pscale(_pmul(lam, _pmul(_pmul(_lin(16), _lin(36)), _lin(64))), a2**2)
    t3 = _pscale(_pmul(lam, _lin(64)), a2**3)
    t4 = _pscale(_pmul(lam, _lin(16)), a2**3)
    P = _padd(lead, _pscale(t1, -1), _pscale(t2, -1), _pscale(t3, -1), _pscale(t4, -1))
    assert len(P) == 9 and P[0] == 1
    return ApproxPolynomial(a_squared=float(a2), coeffs=np.array([float(c) for c in P], dtype=complex), exact=tuple(P))


def _pdiv(p: list, q: list) -> tuple[list, list]:
    """Exact polynomial division, descending coefficients."""
    p = list(p)
    out = []
    while len(p) >= len(q):
        c = p[0] / q[0]
        out.append(c)
        for i, x in enumerate(q):
            p[i] -= c * x
        p.pop(0)
    while p and p[0] == 0:
        p.pop(0)
    return out, p


def _pgcd(p: list, q: list) -> list:
    while q:
        _, r = _pdiv(p, q)
        p, q = q, r
    return [x / p[0] for x in p]


def _pderiv(p: list) -> list:
    n = len(p) - 1
    return [c * (n - i) for i, c in enumerate(p[:-1])]


def _squarefree(p: list) -> list[tuple[list, int]]:
    """Yun's square-free factorization: [(factor, multiplicity), ...]."""
    out = []
    dp = _pderiv(p)
    g = _pgcd(p, dp)
    c, _ = _pdiv(p, g)
    d, _ = _pdiv(dp, g)
    d = _padd(d, _pscale(_pderiv(c), -1)) if len(c) > 1 else d
    i = 1
    while len(c) > 1:
        while d and d[0] == 0:
            d = d[1:]
        a = _pgcd(c, d) if d else c
        if len(a) > 1:
            out.append((a, i))
        c, _ = _pdiv(c, a)
        d, _ = _pdiv(d, a) if d else ([], [])
        d = _padd(d, _pscale(_pderiv(c), -1)) if len(c) > 1 and d else (d if d else [])
        i += 1
    return out


def _simple_roots(coeffs: np.ndarray, residual: float) -> np.ndarray:
    if coeffs.size <= 1:
        return np.empty(0, dtype=complex)
    dc = np.polyder(coeffs)
    absc = np.abs(coeffs)
    roots = np.roots(coeffs).astype(complex)
    for i, z in enumerate(roots):
        for _ in range(20):
            f = np.polyval(coeffs, z)
            if abs(f) <= residual * np.polyval(absc, abs(z)):
                break
            d = np.polyval(dc, z)
            if d == 0:
                break
            z = z - f / d
        roots[i] = z
    return roots


def roots_P(a_squared, residual: float = 1e-12) -> np.ndarray:
    """All 8 roots of P(a^2, .) with multiplicity, Newton-polished, sorted by (Re, Im).

    Repeated roots are split off exactly (square-free factorization over the
    rationals) so that, e.g., the triple root 16 at a = 0 is returned exactly.
    """
    P = build_P(a_squared)
    parts = []
    for factor, mult in _squarefree(list(P.exact)):
        r = _simple_roots(np.array([float(c) for c in factor], dtype=complex), residual)
        parts.extend([r] * mult)
    roots = np.concatenate(parts)
    return roots[np.lexsort((roots.imag, roots.real))]


# ---------------------------------------------------------------------------
# the two lowest even periodic eigenvalues from the series


def _circle_sums(a: complex, radius: float = 9.0, n: int = 256, m: Optional[int] = None):
    """Winding number and power sums s1, s2 of the zeros of N inside |lam| = radius."""
    th = 2.0 * math.pi * np.arange(n) / n
    z = radius * np.exp(1j * th)
    N, N1, _, _, _ = N_jet(a, z, m=m)
    g = N1 / N * z
    return np.mean(g), np.mean(g * z), np.mean(g * z * z)


def pn_pair_moments(a: complex, m: Optional[int] = None) -> tuple[complex, complex, complex]:
    """(count, lam_0 + lam_2^-, lam_0^2 + (lam_2^-)^2) from contour moments on |lam| = 9."""
    return _circle_sums(a, m=m)


def pn_roots_in_D9(a: complex, tol: float = 1e-12) -> tuple[complex, complex]:
    """(lambda_0, lambda_2^-) as the zeros of N(a, .) in |lam| < 9.

    Real roots are returned in increasing order, a conjugate pair with the
    Im < 0 member first.
    """
    a = complex(a)
    s0, s1, s2 = pn_pair_moments(a)
    if abs(s0 - 2.0) > 1e-6:
        raise ModelViolation(f"N(a, .) has winding number {s0.real:.6g} on |lambda| = 9, expected 2")
    disc = np.sqrt(complex(2.0 * s2 - s1 * s1))
    roots = [0.5 * (s1 - disc), 0.5 * (s1 + disc)]
    # polish simple roots; near the collision the moment formula is the accurate one
    if abs(disc) > 1e-4:
        a2 = a * a
        seeds = roots_P(a2.real) if abs(a2.imag) < 1e-14 else np.empty(0, dtype=complex)
        seeds = seeds[np.abs(seeds) < 9.0]
        polished = []
        for r in roots:
            if seeds.size:
                cand = seeds[np.argmin(np.abs(seeds - r))]
                r = cand if abs(cand - r) < 0.25 * abs(disc) else r
            for _ in range(30):
                e = characteristic_N(a, r)
                step = e.N_val / e.N_d1
                r = r - step
                if abs(step) <= tol * max(1.0, abs(r)):
                    break
            polished.append(complex(r))
        roots = polished
    x, y = roots
    if abs(x.imag) < 1e-9 and abs(y.imag) < 1e-9:
        x, y = complex(x.real, 0.0), complex(y.real, 0.0)
        return (x, y) if x.real <= y.real else (y, x)
    return (x, y) if x.imag < y.imag else (y, x)
