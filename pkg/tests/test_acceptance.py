"""The eight acceptance criteria, one test each, at their stated tolerances.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line before asserting.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import match_max_error
from pthill import cli
from pthill.band_structure import real_components, verify_properties
from pthill.contour import Disc
from pthill.discriminant import bloch_roots
from pthill.operator_model import a_from_V, antiperiodic_eigenvalues, lookup, periodic_eigenvalues
from pthill.series_cf import (
    A_k,
    N_jet,
    Q_value,
    gamma_circle,
    remainder_bound,
    roots_P,
    series_terms,
    sharp_tail_constants,
)


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return _report


def test_criterion_1_second_critical_point(capsys, report):
    t0 = time.perf_counter()
    code = cli.main(["critical", "--k", "2"])
    elapsed = time.perf_counter() - t0
    doc = json.loads(capsys.readouterr().out)["result"]
    lo, hi = doc["bracket"]["lo"], doc["bracket"]["hi"]
    a2_lo, a2_hi = doc["a_squared"]["lo"], doc["a_squared"]["hi"]
    ok = (
        code == 0
        and 0.8884370025 < lo <= hi < 0.8884370117
        and -2.157281295 < a2_lo <= a2_hi < -2.15728123
        and hi - lo <= 1e-8
        and elapsed < 30.0
    )
    report(1, ok, f"V2 in [{lo:.12g}, {hi:.12g}], a^2 in [{a2_lo:.12g}, {a2_hi:.12g}], {elapsed:.2f} s")


def test_criterion_2_polynomial_roots(report):
    ref_a = [2.088438808, 2.088959036, 15.85581654, 63.99999991,
             15.98321016 + 0.11878598j, 15.98321016 - 0.11878598j,
             36.00018270 + 0.00333046j, 36.00018270 - 0.00333046j]
    ref_b = [2.088698925 + 0.000232839j, 2.088698925 - 0.000232839j,
             15.98321016 + 0.11878599j, 15.98321016 - 0.11878599j, 15.85581654,
             36.00018270 + 0.00333046j, 36.00018270 - 0.00333046j, 63.99999991]
    err_a = match_max_error(roots_P(-2.15728123), ref_a)
    err_b = match_max_error(roots_P(-2.157281295), ref_b)
    report(2, max(err_a, err_b) < 5e-7, f"max root error {err_a:.2e} (real pair), {err_b:.2e} (conjugate pair)")


def test_criterion_3_rouche_floor_and_tail_bound(report):
    pts = np.concatenate([gamma_circle(1, 360), gamma_circle(2, 360)])
    floor = float(np.min(np.abs(Q_value(-2.15728123, pts))))
    tb = sharp_tail_constants("printed")
    ok = floor > 5e-8 and tb.total < 4.7357e-8 and tb.geometric_tail < 4.101e-11 and tb.A3_bound < 2.2707e-8
    report(3, ok, f"min |Q| = {floor:.4e} on {pts.size} points; tail {tb.total:.5e}, "
                  f"k>4 tail {tb.geometric_tail:.4e}, |A3| {tb.A3_bound:.5e}")


def test_criterion_4_small_coupling_asymptotics(report):
    worst = 0.0
    for c in (0.02, 0.05, 0.1):
        a = 1j * c
        per, anti = periodic_eigenvalues(a), antiperiodic_eigenvalues(a)
        r = abs(a)
        # the Im > 0 member is lambda_1^+
        ratios = [
            abs(lookup(anti, 1, "-").value - (1 - a)) / (2 * r**2),
            abs(lookup(anti, 1, "+").value - (1 + a)) / (2 * r**2),
        ]
        ratios.append(abs(lookup(per, 0).value + a * a / 2) / (2 * r**3))
        ratios.append(abs(lookup(per, 2, "-").value - 4 - 5 * a * a / 12) / (2 * r**3))
        ratios.append(abs(lookup(per, 2, "+").value - 4 + a * a / 12) / (2 * r**3))
        worst = max(worst, max(ratios))
    report(4, worst <= 1.0, f"largest error / allowed = {worst:.3f}")


def test_criterion_5_first_threshold(report):
    a = a_from_V(0.49)
    eigs = periodic_eigenvalues(a, region_bound=60) + antiperiodic_eigenvalues(a, region_bound=60)
    eigs = [e for e in eigs if abs(e.value) < 60]
    imag = max(abs(e.value.imag) for e in eigs)
    order = sorted(eigs, key=lambda e: (e.n, e.sign == "+"))
    re = np.array([e.value.real for e in order])
    ordered = bool(np.all(np.diff(re) > -1e-9))
    anti = antiperiodic_eigenvalues(a_from_V(0.51))
    m, p = lookup(anti, 1, "-").value, lookup(anti, 1, "+").value
    pair = abs(m.imag) > 1e-6 and abs(m - np.conj(p)) < 1e-9
    ok = imag < 1e-9 and ordered and pair
    report(5, ok, f"V=0.49: {len(eigs)} eigenvalues, max |Im| {imag:.1e}, ordered={ordered}; "
                  f"V=0.51: lambda_1^+- = {p:.6f}, {m:.6f}")


def test_criterion_6_oracle_equivalence(report):
    worst = 0.0
    region = Disc(0.0, 40.0)
    for a in (0.5, 1.0, 0.8j, 1.5j):
        per = [e.value for e in periodic_eigenvalues(a) if abs(e.value) < 40]
        anti = [e.value for e in antiperiodic_eigenvalues(a) if abs(e.value) < 40]
        worst = max(worst, match_max_error(bloch_roots(a, 0.0, region), per))
        worst = max(worst, match_max_error(bloch_roots(a, math.pi, region), anti))
    report(6, worst < 1e-8, f"max |discriminant root - matrix eigenvalue| = {worst:.2e}")


def test_criterion_7_band_geometry(report):
    rep = verify_properties(a_from_V(0.7), n_max=3, raise_on_failure=False)
    conj = next(c for c in rep.checks if c.name.startswith("Pr.5"))
    case3 = real_components(a_from_V(1.0), 3)
    case3_ok = [c.index for c in case3] == [2, 3] and all(c.length > 0 for c in case3)
    lengths = [real_components(a_from_V(V), 1)[0].length for V in (0.80, 0.85, 0.88, 0.8884)]
    collapse = all(x > y for x, y in zip(lengths, lengths[1:]))
    ok = rep.ok and conj.value < 1e-6 and case3_ok and collapse
    failed = [c.name for c in rep.failures()]
    report(7, ok, f"V=0.7 checks {len(rep.checks) - len(failed)}/{len(rep.checks)} (conjugate arcs {conj.value:.1e}); "
                  f"V=1.0 components {[c.index for c in case3]}; |I1| = {', '.join(f'{x:.4f}' for x in lengths)}")


def _closed_A(a, lam, k):
    a2 = a * a
    x16, x36, x64, x100, x144 = lam - 16, lam - 36, lam - 64, lam - 100, lam - 144
    A2 = a2**3 / (x16**3 * x36**2) + a2**3 / (x16**2 * x36**2 * x64)
    A3 = a2**4 * (1 / (x16**4 * x36**3) + 1 / (x16**2 * x36**3 * x64**2)
                  + 2 / (x16**3 * x36**3 * x64) + 1 / (x16**2 * x36**2 * x64**2 * x100))
    if k == 2:
        return A2
    if k == 3:
        return A3
    E4 = a2**5 * (1 / (x16**2 * x36**2 * x64**2 * x100**2 * x144) + 1 / (x16**2 * x36**2 * x64**3 * x100**2)
                  + 1 / (x16**2 * x36**3 * x64**3 * x100) + 1 / (x16**3 * x36**3 * x64**2 * x100))
    return E4 + (a2 / (x16 * x36) + a2 / (x64 * x36)) * A3


def test_criterion_8_series_machinery(report):
    rng = np.random.default_rng(2024)
    rel = 0.0
    for _ in range(20):
        a = 1.99 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        lam = 9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        for k in (2, 3, 4):
            v, c = A_k(a, lam, k).value, _closed_A(a, lam, k)
            rel = max(rel, abs(v - c) / abs(c))
    # N' and N'' against central differences
    fd = 0.0
    h = 1e-4
    for a, lam in ((0.7j, 1.3 + 0.4j), (1.5j, -2.0), (1.2, 5.0 - 1.0j)):
        N, N1, N2, m, _ = N_jet(a, np.array([lam - h, lam, lam + h]), m=12)
        d1 = (N[2] - N[0]) / (2 * h)
        d2 = (N[2] - 2 * N[1] + N[0]) / h**2
        fd = max(fd, abs(d1 - N1[1]) / max(1, abs(N1[1])), abs(d2 - N2[1]) / max(1, abs(N2[1])))
    # sum bounds on sampled |a| < 2, |lambda| <= 9
    sums = np.zeros(3)
    for _ in range(200):
        a = 1.999 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        lam = 9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        sums = np.maximum(sums, np.abs(series_terms(a, np.array([lam]), 12)[:, :, 0]).sum(axis=0))
    bounds_ok = sums[0] < 1 / 100 and sums[1] < 1 / 200 and sums[2] < 1 / 300
    exact = all(remainder_bound(m) == float(Fraction(4, 7) * Fraction(16, 189) ** m) for m in range(1, 13))
    ok = rel < 1e-12 and fd < 1e-6 and bounds_ok and exact
    report(8, ok, f"closed-form rel err {rel:.1e}; derivative fd err {fd:.1e}; "
                  f"sums {sums[0]:.2e}/{sums[1]:.2e}/{sums[2]:.2e}; remainder exact={exact}")
