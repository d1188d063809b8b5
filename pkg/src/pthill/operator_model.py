"""Potential family and truncated Fourier-basis eigensolvers.

The optical potential ``4cos^2 x + 4iV sin 2x`` has the same Hill discriminant
as the Mathieu potential ``2a cos 2x`` with ``a = sqrt(1 - 4V^2)``, so all
computations run in the Mathieu form.  Periodic and antiperiodic problems
split by parity into four three-term recurrences (PN, PD, AD, AN), each of
which becomes a tridiagonal matrix once the Fourier series is truncated.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DegeneracyError, DomainError, TruncationError

SQRT2 = math.sqrt(2.0)
DEFAULT_N = 32
DEFAULT_TOL = 1e-9
MIN_N = 8


class Origin(enum.Enum):
    FROM_V = "FromV"
    FROM_A = "FromA"


class SymmetryClass(enum.Enum):
    PN = "PN"  # periodic, cosine series cos 2kx
    PD = "PD"  # periodic, sine series sin 2kx
    AD = "AD"  # antiperiodic, first diagonal entry 1 + a
    AN = "AN"  # antiperiodic, first diagonal entry 1 - a

    @property
    def periodic(self) -> bool:
        return self in (SymmetryClass.PN, SymmetryClass.PD)


def a_from_V(V: float) -> complex:
    """Mathieu coupling ``sqrt(1 - 4V^2)`` on the principal branch.

    Real and non-negative for ``V <= 1/2``; ``i sqrt(4V^2 - 1)`` above.
    """
    V = float(V)
    if not math.isfinite(V) or V < 0:
        raise DomainError(f"V must be finite and >= 0, got {V!r}")
    s = 1.0 - 4.0 * V * V
    if s >= 0:
        return complex(math.sqrt(s), 0.0)
    return complex(0.0, math.sqrt(-s))


def V_from_a(a: complex) -> Optional[float]:
    """Inverse map ``V = sqrt(1 - a^2)/2``; None unless a^2 is real and <= 1."""
    a2 = complex(a) ** 2
    if abs(a2.imag) > 1e-14 * max(1.0, abs(a2)) or a2.real > 1.0:
        return None
    return 0.5 * math.sqrt(1.0 - a2.real)


@dataclass(frozen=True)
class PotentialSpec:
    V: Optional[float]
    a: complex
    origin: Origin

    @classmethod
    def from_V(cls, V: float) -> "PotentialSpec":
        return cls(V=float(V), a=a_from_V(V), origin=Origin.FROM_V)

    @classmethod
    def from_a(cls, a: complex) -> "PotentialSpec":
        a = complex(a)
        if not (cmath.isfinite(a)):
            raise DomainError(f"coupling must be finite, got {a!r}")
        return cls(V=V_from_a(a), a=a, origin=Origin.FROM_A)

    @classmethod
    def from_a_imag(cls, c: float) -> "PotentialSpec":
        return cls.from_a(complex(0.0, c))


@dataclass(frozen=True)
class TruncatedMatrix:
    cls: SymmetryClass
    a: complex
    N: int
    entries: np.ndarray

    @property
    def diagonal_values(self) -> np.ndarray:
        """Unperturbed diagonal ``(2k)^2`` or ``(2k-1)^2`` without the +-a shift."""
        return _base_diagonal(self.cls, self.N)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.entries)


def _base_diagonal(cls: SymmetryClass, N: int) -> np.ndarray:
    k = np.arange(N, dtype=float)
    if cls is SymmetryClass.PN:
        return (2.0 * k) ** 2
    if cls is SymmetryClass.PD:
        return (2.0 * (k + 1)) ** 2
    return (2.0 * k + 1.0) ** 2


def build_truncated_matrix(cls: SymmetryClass, a: complex, N: int = DEFAULT_N) -> TruncatedMatrix:
    """N x N truncation of the PN/PD/AD/AN recurrence."""
    if int(N) != N or N < MIN_N:
        raise ConfigurationError(f"truncation order must be an integer >= {MIN_N}, got {N!r}")
    N = int(N)
    a = complex(a)
    M = np.diag(_base_diagonal(cls, N).astype(complex))
    idx = np.arange(N - 1)
    M[idx, idx + 1] = a
    M[idx + 1, idx] = a
    if cls is SymmetryClass.PN:
        M[0, 1] = M[1, 0] = SQRT2 * a
    elif cls is SymmetryClass.AD:
        M[0, 0] += a
    elif cls is SymmetryClass.AN:
        M[0, 0] -= a
    return TruncatedMatrix(cls=cls, a=a, N=N, entries=M)


def floquet_matrix(a: complex, t: float, K: int = DEFAULT_N) -> np.ndarray:
    """Fourier matrix of the t-quasiperiodic problem in the basis e^{i(2k + t/pi)x}, |k| <= K."""
    k = np.arange(-K, K + 1, dtype=float)
    M = np.diag(((2.0 * k + t / math.pi) ** 2).astype(complex))
    idx = np.arange(2 * K)
    M[idx, idx + 1] = a
    M[idx + 1, idx] = a
    return M


def floquet_eigenvalues(a: complex, t: float, K: int = DEFAULT_N, region_bound: float = 100.0) -> np.ndarray:
    """Truncated-matrix Bloch eigenvalues with |lambda| <= region_bound, sorted by real part."""
    lim = (2.0 * K - 2.0) ** 2
    if lim <= 4.0 * region_bound:
        raise ConfigurationError(f"K={K} too small for region_bound={region_bound}")
    ev = np.linalg.eigvals(floquet_matrix(a, t, K))
    ev = ev[np.abs(ev) <= region_bound]
    return ev[np.lexsort((ev.imag, ev.real))]


# ---------------------------------------------------------------------------
# Labeling


@dataclass(frozen=True)
class LabeledEigenvalue:
    value: complex
    cls: SymmetryClass
    n: int  # 0 for lambda_0, otherwise the disc index of lambda_n^{+-}
    sign: str  # "", "-" or "+"
    disc_center: float
    disc_radius: float

    @property
    def index(self) -> str:
        return f"{self.n}{self.sign}"

    @property
    def label(self) -> str:
        return f"lambda_{self.index}"


def _disc(cls: SymmetryClass, n: int, a: complex) -> tuple[float, float]:
    """Localization disc (center, radius) for the eigenvalue labeled n."""
    r = abs(a)
    if cls.periodic:
        if r <= 4.0 / 3.0:
            if n == 0:
                return 0.0, SQRT2 * r
            if n == 2:
                return 4.0, (1.0 + SQRT2) * r
            return float(n * n), 2.0 * r
        if r < 2.0:
            if n in (0, 2):
                return 3.0, 6.0
            return float(n * n), 4.0
        return float(n * n) if n else 0.0, math.inf
    if r <= 8.0 / math.sqrt(6.0):
        return float(n * n), 2.0 * r
    if r < 2.0:
        return float(n * n), 4.0
    return float(n * n), math.inf


def _is_real(z: complex, tol: float) -> bool:
    return abs(z.imag) < tol


def _order_pair(x, y, tol: float):
    """(minus, plus) members of a disc pair of (value, class) tuples.

    Increasing order when both are real, Im-sign when they are a conjugate
    pair, lexicographic (Re, Im) otherwise.
    """
    u, v = x[0], y[0]
    if _is_real(u, tol) and _is_real(v, tol):
        swap = u.real > v.real
    elif u.imag * v.imag < 0:
        swap = u.imag > v.imag
    else:
        swap = (u.real, u.imag) > (v.real, v.imag)
    return (y, x) if swap else (x, y)


def _class_sorted(cls: SymmetryClass, a: complex, N: int, region_bound: float) -> np.ndarray:
    M = build_truncated_matrix(cls, a, N)
    last = M.diagonal_values[-1]
    if last <= 4.0 * region_bound:
        raise ConfigurationError(
            f"N={N} too small: last diagonal entry {last:g} must exceed 4*region_bound={4 * region_bound:g}"
        )
    ev = M.eigenvalues()
    # keep a margin beyond region_bound so disc pairs straddling it stay intact
    ev = ev[np.abs(ev) <= 1.5 * region_bound + 10.0]
    return ev[np.lexsort((ev.imag, ev.real))]


def predicted_split(n: int, a: complex) -> float:
    """Small-coupling size of the gap between the two eigenvalues near n^2.

    Leading term |a|^n / (2^(2n-3) ((n-1)!)^2) of the classical Mathieu
    splitting; used only to decide whether a collision is resolvable.
    """
    if n <= 0:
        return math.inf
    return abs(a) ** n / (2.0 ** (2 * n - 3) * math.factorial(n - 1) ** 2)


def _check_pair(x: complex, y: complex, n: int, a: complex, tol: float, what: str) -> None:
    # even/odd classes must stay disjoint; pairs whose true splitting is below double-precision
    # resolution are not checkable and are skipped
    if a == 0 or predicted_split(n, a) <= 100.0 * tol:
        return
    if abs(x - y) <= 10.0 * tol:
        raise DegeneracyError(
            f"{what} eigenvalues near {n}^2 collide at {x:.12g} / {y:.12g} (distance {abs(x - y):.3g})",
            pair=(complex(x), complex(y)),
        )


def _labeled(value, cls, n, sign, a, tol) -> LabeledEigenvalue:
    c, r = _disc(cls, n, a)
    value = complex(value)
    if abs(value - c) > r + 10.0 * tol:
        raise TruncationError(
            f"{cls.value} eigenvalue {value:.12g} (label {n}{sign}) lies outside its disc D_{r:.6g}({c:g}); raise N"
        )
    return LabeledEigenvalue(value=value, cls=cls, n=n, sign=sign, disc_center=c, disc_radius=r)


def periodic_eigenvalues(
    a: complex, N: int = DEFAULT_N, region_bound: float = 100.0, tol: float = DEFAULT_TOL
) -> list[LabeledEigenvalue]:
    """Periodic eigenvalues lambda_0, lambda_2^{-+}, lambda_4^{-+}, ... with |lambda| <= region_bound.

    The two lowest PN values and the lowest PD value form the triple in D_6(3);
    afterwards the k-th PN and (k-1)-th PD values share the disc around (2k)^2.
    """
    a = complex(a)
    pn = _class_sorted(SymmetryClass.PN, a, N, region_bound)
    pd = _class_sorted(SymmetryClass.PD, a, N, region_bound)
    out: list[LabeledEigenvalue] = []
    if pn.size >= 2 and pd.size >= 1:
        p0, p1, d1 = complex(pn[0]), complex(pn[1]), complex(pd[0])
        _check_pair(p0, d1, 2, a, tol, "PN/PD")
        _check_pair(p1, d1, 2, a, tol, "PN/PD")
        if all(_is_real(z, tol) for z in (p0, p1, d1)):
            trio = sorted([(p0, SymmetryClass.PN), (p1, SymmetryClass.PN), (d1, SymmetryClass.PD)], key=lambda z: z[0].real)
            # lambda_0 is the lowest; it is always a PN value
            out.append(_labeled(trio[0][0], trio[0][1], 0, "", a, tol))
            out.append(_labeled(trio[1][0], trio[1][1], 2, "-", a, tol))
            out.append(_labeled(trio[2][0], trio[2][1], 2, "+", a, tol))
        else:
            if _is_real(p0, tol) and _is_real(p1, tol):
                lo, hi = (p0, p1) if p0.real <= p1.real else (p1, p0)
            else:
                # conjugate PN pair: lambda_0 takes the lower half plane member so that
                # band 1 (lambda_0 -> lambda_1^-) stays on one side of the real axis
                lo, hi = (p0, p1) if p0.imag < p1.imag else (p1, p0)
            out.append(_labeled(lo, SymmetryClass.PN, 0, "", a, tol))
            out.append(_labeled(hi, SymmetryClass.PN, 2, "-", a, tol))
            out.append(_labeled(d1, SymmetryClass.PD, 2, "+", a, tol))
    k = 2
    while k < pn.size and k - 1 < pd.size:
        x, y = (complex(pn[k]), SymmetryClass.PN), (complex(pd[k - 1]), SymmetryClass.PD)
        if min(abs(x[0]), abs(y[0])) > region_bound:
            break
        _check_pair(x[0], y[0], 2 * k, a, tol, "PN/PD")
        lo, hi = _order_pair(x, y, tol)
        for (val, cls), sign in ((lo, "-"), (hi, "+")):
            out.append(_labeled(val, cls, 2 * k, sign, a, tol))
        k += 1
    return [e for e in out if abs(e.value) <= region_bound]


def antiperiodic_eigenvalues(
    a: complex, N: int = DEFAULT_N, region_bound: float = 100.0, tol: float = DEFAULT_TOL
) -> list[LabeledEigenvalue]:
    """Antiperiodic eigenvalues lambda_1^{-+}, lambda_3^{-+}, ... with |lambda| <= region_bound."""
    a = complex(a)
    ad = _class_sorted(SymmetryClass.AD, a, N, region_bound)
    an = _class_sorted(SymmetryClass.AN, a, N, region_bound)
    out: list[LabeledEigenvalue] = []
    for k in range(min(ad.size, an.size)):
        x, y = (complex(ad[k]), SymmetryClass.AD), (complex(an[k]), SymmetryClass.AN)
        if min(abs(x[0]), abs(y[0])) > region_bound:
            break
        _check_pair(x[0], y[0], 2 * k + 1, a, tol, "AD/AN")
        lo, hi = _order_pair(x, y, tol)
        for (val, cls), sign in ((lo, "-"), (hi, "+")):
            out.append(_labeled(val, cls, 2 * k + 1, sign, a, tol))
    return [e for e in out if abs(e.value) <= region_bound]


def class_eigenvalues(
    cls: SymmetryClass, a: complex, N: int = DEFAULT_N, region_bound: float = 100.0, tol: float = DEFAULT_TOL
) -> list[LabeledEigenvalue]:
    """Eigenvalues of one symmetry class, labeled by their position in the merged list."""
    merged = (periodic_eigenvalues if cls.periodic else antiperiodic_eigenvalues)(a, N, region_bound, tol)
    return [e for e in merged if e.cls is cls]


def lookup(eigs: list[LabeledEigenvalue], n: int, sign: str = "") -> LabeledEigenvalue:
    for e in eigs:
        if e.n == n and e.sign == sign:
            return e
    raise KeyError(f"lambda_{n}{sign} not in list")
