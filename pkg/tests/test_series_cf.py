import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pthill.errors import DomainError, PrecisionError, SingularityError
from pthill.operator_model import periodic_eigenvalues
from pthill.series_cf import (
    RATIO,
    A_k,
    build_P,
    characteristic_N,
    enumerate_paths,
    gamma_circle,
    N_jet,
    pn_roots_in_D9,
    remainder_bound,
    roots_P,
    series_terms,
    sharp_tail_constants,
    tail_bound_sharp,
    term_bounds,
)


def brute_paths(k):
    out = []
    for s in itertools.product((1, -1), repeat=2 * k - 3):
        if sum(s) in (1, -1) and all(3 + sum(s[: 2 * j]) > 1 for j in range(1, k - 1)):
            out.append(s)
    return sorted(out)


def test_path_examples():
    assert sorted(p.signs for p in enumerate_paths(2)) == [(-1,), (1,)]
    assert len(enumerate_paths(3)) == 5


@pytest.mark.parametrize("k", range(2, 9))
def test_paths_match_exhaustive_enumeration(k):
    assert sorted(p.signs for p in enumerate_paths(k)) == brute_paths(k)


def test_path_domain():
    with pytest.raises(DomainError):
        enumerate_paths(1)
    with pytest.raises(DomainError):
        enumerate_paths(13)


def test_first_term_example():
    a = np.sqrt(-2 + 0j)
    assert A_k(a, 2.0, 1).value == pytest.approx(-4 / 6664, rel=1e-14)


def test_pole_guard():
    with pytest.raises(SingularityError):
        A_k(0.5, 16.0 + 1e-8, 2)


@given(
    st.complex_numbers(max_magnitude=1.9),
    st.complex_numbers(max_magnitude=9).filter(lambda z: abs(z - 16) > 1),
)
@settings(max_examples=20, deadline=None)
def test_dynamic_program_equals_path_sum(a, lam):
    T = series_terms(a, np.array([lam]), 8)
    for k in range(1, 9):
        t = A_k(a, lam, k)
        assert np.allclose([t.value, t.d1, t.d2], T[k - 1, :, 0], rtol=1e-12, atol=1e-300)


def test_trivial_characteristic_values():
    assert characteristic_N(0.0, 0.0).N_val == 0
    assert characteristic_N(0.0, 4.0).N_val == pytest.approx(0.0, abs=1e-14)


def test_characteristic_region_and_precision():
    with pytest.raises(DomainError):
        characteristic_N(0.5j, 9.5)
    with pytest.raises(DomainError):
        characteristic_N(2.1j, 1.0)
    with pytest.raises(PrecisionError):
        characteristic_N(1.9j, 9.0, target_tail=1e-300)


def test_tail_bound_reported():
    e = characteristic_N(1.2j, 2.0 + 1.0j)
    assert e.m_used >= 1 and e.tail_bound <= 1e-14


def test_term_bounds_majorize_terms():
    rng = np.random.default_rng(3)
    for _ in range(40):
        a = 1.99 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        lam = 9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        T = series_terms(a, np.array([lam]), 10)[:, :, 0]
        b0, b1, b2 = term_bounds(a, lam, np.arange(1, 11))
        assert np.all(np.abs(T[:, 0]) <= b0 * (1 + 1e-12))
        assert np.all(np.abs(T[:, 1]) <= b1 * (1 + 1e-12))
        assert np.all(np.abs(T[:, 2]) <= b2 * (1 + 1e-12))


def test_remainder_bound_values():
    assert remainder_bound(1) == pytest.approx(64 / 1323, rel=1e-15)
    assert remainder_bound(2) == pytest.approx(float(Fraction(4, 7) * Fraction(16, 189) ** 2), rel=1e-15)
    assert remainder_bound(5) / remainder_bound(4) == pytest.approx(float(RATIO), rel=1e-14)
    with pytest.raises(DomainError):
        remainder_bound(0)


def test_polynomial_at_zero_coupling():
    P = build_P(0.0)
    ref = np.poly([0, 4, 16, 16, 16, 36, 36, 64])
    assert np.allclose(P.coeffs, ref, rtol=1e-15)
    assert roots_P(0.0) == pytest.approx([0, 4, 16, 16, 16, 36, 36, 64], abs=1e-12)


@given(st.floats(-3.0, 3.0))
@settings(max_examples=15, deadline=None)
def test_polynomial_is_monic_and_roots_annihilate(a2):
    P = build_P(a2)
    assert P.coeffs[0] == 1
    r = roots_P(a2)
    assert r.size == 8
    scale = np.polyval(np.abs(P.coeffs), np.abs(r))
    assert np.all(np.abs(P(r)) <= 1e-9 * scale)


def test_tail_bound_domain():
    with pytest.raises(DomainError):
        tail_bound_sharp(-2.0, gamma_circle(1)[0])
    with pytest.raises(DomainError):
        tail_bound_sharp(-2.157, 3.0)
    with pytest.raises(DomainError):
        sharp_tail_constants("other")


def test_pn_roots_match_matrix():
    a = 1.2j
    lo, hi = pn_roots_in_D9(a)
    per = periodic_eigenvalues(a)
    assert abs(lo - per[0].value) < 1e-7 and abs(hi - per[1].value) < 1e-7


def test_pn_roots_conjugate_after_collision():
    lo, hi = pn_roots_in_D9(1.6j)
    assert lo.imag < 0 < hi.imag and abs(lo - np.conj(hi)) < 1e-9


def test_N_jet_shapes():
    lam = np.array([[0.5, 1.0], [2.0j, -3.0]])
    N, N1, N2, m, tail = N_jet(0.7j, lam)
    assert N.shape == lam.shape and tail.shape == lam.shape


@pytest.mark.parametrize("a2", [-2.1561, -2.15728123, -2.1579])
def test_sharp_tail_bound_is_sound_on_gamma_circles(a2):
    a = 1j * np.sqrt(-a2)
    bound = sharp_tail_constants("printed").total
    for i in range(1, 5):
        lam = gamma_circle(i, 90)
        T = series_terms(a, lam, 12)[:, 0, :]
        tail = np.abs(lam) * np.abs(T[2:]).sum(axis=0)
        assert tail.max() < bound
