"""Critical couplings at which neighbouring periodic eigenvalues collide.

Along the imaginary axis a = ic the squared gap between two colliding
eigenvalues is real: positive while both are real, negative once they form a
conjugate pair.  Its sign change is bracketed by bisection in c and mapped
to the optical strength V = sqrt(1 + c^2)/2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .discriminant import hill_discriminant
from .errors import ConfigurationError, DomainError, ModelViolation, NotFoundError
from .operator_model import SymmetryClass, build_truncated_matrix
from .series_cf import pn_pair_moments

IM_TOL = 1e-8
DEFAULT_V_MAX = 30.0


class Phase(enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"


@dataclass(frozen=True)
class GapIndicator:
    a: complex
    delta_sq: float


@dataclass(frozen=True)
class CriticalPoint:
    k: int
    r: float
    V_k: float
    bracket_lo: float
    bracket_hi: float
    collided_pair: tuple[str, str]
    collision_lambda: Optional[float] = None
    F_prime: Optional[float] = None  # |F'| at the collision, when verified
    method: str = ""


def V_of_c(c: float) -> float:
    return 0.5 * math.sqrt(1.0 + c * c)


def c_of_V(V: float) -> float:
    return math.sqrt(4.0 * V * V - 1.0)


def _imag_coupling(a: complex) -> float:
    a = complex(a)
    if abs(a.real) > 1e-14 * max(1.0, abs(a)) or not (0.0 < a.imag < 2.0):
        raise DomainError(f"a must lie on the imaginary segment i(0, 2), got {a}")
    return a.imag


def gap_indicator(a: complex) -> GapIndicator:
    """(lambda_0 - lambda_2^-)^2 from the contour moments of the characteristic series."""
    c = _imag_coupling(a)
    s0, s1, s2 = pn_pair_moments(1j * c)
    if abs(s0 - 2.0) > 1e-6:
        raise ModelViolation(f"expected 2 zeros in |lambda| < 9 at a = {c}i, found {s0.real:.6g}")
    d = 2.0 * s2 - s1 * s1
    if abs(d.imag) >= IM_TOL:
        raise ModelViolation(f"squared gap {d} is not real at a = {c}i")
    return GapIndicator(a=1j * c, delta_sq=float(d.real))


def _bisect(indicator, lo: float, hi: float, f_lo: float, f_hi: float, tol_V: float):
    """Bisection on c until the V-image of [lo, hi] is no wider than tol_V."""
    if f_lo == 0.0:
        return lo, lo
    if f_hi == 0.0:
        return hi, hi
    while V_of_c(hi) - V_of_c(lo) > tol_V:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = indicator(mid)
        if f_mid == 0.0:
            return mid, mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return lo, hi


def _check_tol_V(tol_V: float) -> None:
    if not (tol_V >= 1e-12):
        raise ConfigurationError(f"tol_V must be >= 1e-12, got {tol_V}")


def find_V2(tol_V: float = 1e-9) -> CriticalPoint:
    """Second critical point from the characteristic series."""
    _check_tol_V(tol_V)
    ind = lambda c: gap_indicator(1j * c).delta_sq
    lo, hi = 0.5, 1.99
    f_lo, f_hi = ind(lo), ind(hi)
    if not (f_lo > 0 > f_hi):
        raise NotFoundError(f"squared gap has no sign change on c in [{lo}, {hi}]: {f_lo:.3g}, {f_hi:.3g}")
    lo, hi = _bisect(ind, lo, hi, f_lo, f_hi, tol_V)
    r = 0.5 * (lo + hi)
    s0, s1, _ = pn_pair_moments(1j * r)
    return CriticalPoint(
        k=2, r=r, V_k=V_of_c(r), bracket_lo=V_of_c(lo), bracket_hi=V_of_c(hi),
        collided_pair=("0", "2-"), collision_lambda=float(0.5 * s1.real), method="series",
    )


# ---------------------------------------------------------------------------
# matrix path for general k


def _pair_labels(k: int) -> tuple[str, str]:
    lo = "0" if k == 2 else f"{2 * k - 4}+"
    return lo, f"{2 * k - 2}-"


def _trunc_for(c: float, trunc_N: int) -> int:
    # keep the last diagonal entry far above both the coupling and the pair
    return max(trunc_N, int(math.ceil(math.sqrt(40.0 * (1.0 + c)))) + 8)


def _class_spectrum(cls: SymmetryClass, c: float, trunc_N: int) -> np.ndarray:
    M = build_truncated_matrix(cls, 1j * c, _trunc_for(c, trunc_N))
    return M.eigenvalues()


def pair_class(k: int) -> tuple[SymmetryClass, int]:
    """Class and 0-based position (within the class) of the lower member of the k-th pair.

    For a = ic the even/odd splitting near n^2 carries the sign of (ic)^n, so
    the lower member of each disc pair alternates between PN (n = 2 mod 4) and
    PD (n = 0 mod 4).  The colliding pairs are therefore (a_0, a_2), (b_2, b_4),
    (a_4, a_6), (b_6, b_8), ... with a_n even and b_n odd about x = 0.
    """
    if k % 2 == 0:
        return SymmetryClass.PN, k - 2
    return SymmetryClass.PD, k - 3


def _initial_pair(k: int, c0: float, trunc_N: int):
    cls, pos = pair_class(k)
    ev = _class_spectrum(cls, c0, trunc_N)
    ev = ev[np.argsort(ev.real)]
    return cls, ev[pos : pos + 2].copy()


def _nearest_two(ev: np.ndarray, pair: np.ndarray) -> np.ndarray:
    i = int(np.argmin(np.abs(ev - pair[0])))
    rest = np.delete(ev, i)
    j = int(np.argmin(np.abs(rest - pair[1])))
    return np.array([ev[i], rest[j]])


def _gap_sq(pair: np.ndarray) -> complex:
    return complex((pair[0] - pair[1]) ** 2)


def find_Vk(
    k: int,
    tol_V: float = 1e-9,
    V_max: float = DEFAULT_V_MAX,
    trunc_N: int = 48,
    verify: bool = True,
) -> CriticalPoint:
    """k-th critical point from truncated-matrix eigenvalues.

    The pair (lambda_{2k-4}^+, lambda_{2k-2}^-) belongs to one symmetry class;
    it is identified at small coupling and followed by continuation in c until
    its squared gap changes sign.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if k > 6:
        raise DomainError("k <= 6 is supported")
    _check_tol_V(tol_V)
    if k == 1:
        return CriticalPoint(k=1, r=0.0, V_k=0.5, bracket_lo=0.5, bracket_hi=0.5,
                             collided_pair=("1-", "1+"), method="exact")
    if V_max <= 0.5:
        raise DomainError(f"V_max must exceed 1/2, got {V_max}")
    c_max = c_of_V(V_max)
    c = 0.05
    cls, pair = _initial_pair(k, c, trunc_N)
    g = _gap_sq(pair)
    while True:
        c_next = min(c + 0.01 * (1.0 + c), c_max)
        if c_next <= c:
            raise NotFoundError(
                f"squared gap of ({', '.join(_pair_labels(k))}) keeps its sign for V in (1/2, {V_max}]"
            )
        nxt = _nearest_two(_class_spectrum(cls, c_next, trunc_N), pair)
        g_next = _gap_sq(nxt)
        if abs(g_next.imag) > IM_TOL * max(1.0, abs(g_next)):
            raise ModelViolation(f"squared gap {g_next} not real at c = {c_next}")
        if g_next.real <= 0.0:
            break
        c, pair, g = c_next, nxt, g_next
    anchor = pair

    def ind(x: float) -> float:
        center = np.full(2, 0.5 * (anchor[0] + anchor[1]))
        p = _nearest_two(_class_spectrum(cls, x, trunc_N), center)
        gs = _gap_sq(p)
        if abs(gs.imag) > IM_TOL * max(1.0, abs(gs)):
            raise ModelViolation(f"squared gap {gs} not real at c = {x}")
        return gs.real

    lo, hi = _bisect(ind, c, c_next, g.real, g_next.real, tol_V)
    r = 0.5 * (lo + hi)
    center = np.full(2, 0.5 * (anchor[0] + anchor[1]))
    p = _nearest_two(_class_spectrum(cls, r, trunc_N), center)
    lam_star = float(0.5 * (p[0] + p[1]).real)
    Fp = None
    if verify:
        Fp = abs(hill_discriminant(1j * r, lam_star).F_prime)
    return CriticalPoint(
        k=int(k), r=r, V_k=V_of_c(r), bracket_lo=V_of_c(lo), bracket_hi=V_of_c(hi),
        collided_pair=_pair_labels(k), collision_lambda=lam_star, F_prime=Fp,
        method=f"matrix:{cls.value}",
    )


@lru_cache(maxsize=1)
def _v2_bracket() -> tuple[float, float]:
    cp = find_V2()
    return cp.bracket_lo, cp.bracket_hi


def classify_phase(V: float) -> Phase:
    V = float(V)
    if not (0.5 < V < math.sqrt(5.0) / 2.0):
        raise DomainError(f"V must lie in (1/2, sqrt(5)/2), got {V}")
    lo, hi = _v2_bracket()
    if V < lo:
        return Phase.CASE1
    if V > hi:
        return Phase.CASE3
    return Phase.CASE2
