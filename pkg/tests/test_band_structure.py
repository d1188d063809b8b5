import math

import numpy as np
import pytest

import pthill.band_structure as bs
from pthill.band_structure import (
    endpoint_labels,
    find_singularity,
    real_components,
    trace_bands,
    verify_properties,
)
from pthill.criticality import find_V2
from pthill.discriminant import discriminant_array, hill_discriminant
from pthill.errors import DomainError, PropertyViolation
from pthill.operator_model import a_from_V, antiperiodic_eigenvalues, lookup, periodic_eigenvalues


def test_endpoint_labels():
    assert endpoint_labels(1) == ((0, ""), (1, "-"))
    assert endpoint_labels(2) == ((2, "-"), (1, "+"))
    assert endpoint_labels(3) == ((2, "+"), (3, "-"))
    assert endpoint_labels(4) == ((4, "-"), (3, "+"))


def test_real_coupling_bands_are_the_classical_intervals():
    bands = trace_bands(1.0, n_max=4, t_steps=64)
    per, anti = periodic_eigenvalues(1.0), antiperiodic_eigenvalues(1.0)
    lo_prev = -math.inf
    for b in bands:
        assert np.max(np.abs(b.mu.imag)) < 1e-9
        lo, hi = sorted([b.mu[0].real, b.mu[-1].real])
        assert np.all(b.mu.real >= lo - 1e-9) and np.all(b.mu.real <= hi + 1e-9)
        assert lo >= lo_prev
        lo_prev = hi
        assert b.singularity is None
    assert bands[0].mu[0] == pytest.approx(lookup(per, 0).value)
    assert bands[0].mu[-1] == pytest.approx(lookup(anti, 1, "-").value)


def test_samples_satisfy_bloch_equation(bands07, a07):
    b = bands07[2]
    idx = np.arange(0, b.t.size, 17)
    F, _ = discriminant_array(a07, b.mu[idx])
    assert np.allclose(F, 2 * np.cos(b.t[idx]), atol=1e-7)


def test_first_band_joins_lambda0_to_lambda1_minus(bands07, a07):
    b = bands07[0]
    assert abs(b.mu[0].imag) < 1e-9 and b.mu[-1].imag < -1e-3
    assert b.endpoint_0.label == "lambda_0" and b.endpoint_pi.label == "lambda_1-"
    assert [s.band_index for s in b.samples[:2]] == [1, 1]


def test_continuity_step(bands07):
    for b in bands07:
        assert np.max(np.abs(np.diff(b.mu))) < 0.5


def test_singularity_on_bands(bands07, a07):
    s = find_singularity(a07, 1)
    assert 0 < s.t_n < math.pi
    d = hill_discriminant(a07, s.Lambda)
    assert abs(d.F_prime) < 1e-8 and -2 < d.F.real < 2
    k = int(np.argmin(np.abs(bands07[0].t - s.t_n)))
    assert abs(bands07[0].mu[k] - s.Lambda) < 1e-6 and abs(bands07[1].mu[k] - s.Lambda) < 1e-6


def test_real_segments_case1(bands07, a07):
    comp = real_components(a07, 1)[0]
    s = bands07[0].singularity
    before = bands07[0].t <= s.t_n
    assert bands07[0].mu[before].real.min() == pytest.approx(comp.lo, abs=1e-6)
    assert bands07[0].mu[before].real.max() == pytest.approx(s.Lambda, abs=1e-6)
    assert bands07[1].mu[before].real.max() == pytest.approx(comp.hi, abs=1e-6)


def test_conjugate_arcs(bands07):
    after = bands07[0].t > bands07[0].real_until
    dev = np.abs(bands07[1].mu[after] - np.conj(bands07[0].mu[after]))
    assert dev.max() < 1e-6
    assert np.all(bands07[1].mu[after].imag > 0)


def test_verify_properties_v07():
    rep = verify_properties(a_from_V(0.7), n_max=3)
    assert rep.ok and not rep.failures()
    names = {c.name for c in rep.checks}
    assert {"Pr.1 real spectrum", "Pr.4 real segments", "Pr.5 conjugate arcs", "Pr.6 separation"} <= names


def test_verify_properties_reports_violations():
    # an unattainable agreement tolerance must surface as a structured report
    with pytest.raises(PropertyViolation) as exc:
        verify_properties(a_from_V(0.7), n_max=2, t_steps=64, tol=1e-300)
    assert exc.value.report is not None and not exc.value.report.ok


def test_components_case3():
    comps = real_components(a_from_V(1.0), 3)
    assert [c.index for c in comps] == [2, 3]
    assert comps[0].lo < comps[0].hi < comps[1].lo


def test_components_case2():
    cp = find_V2()
    comps = real_components(1j * cp.r, 2)
    assert comps[0].index == 1 and comps[0].degenerate and comps[0].length == 0


def test_gap_midpoint_not_in_spectrum(a07):
    comps = real_components(a07, 2)
    per = periodic_eigenvalues(a07)
    mid = 0.5 * (lookup(per, 2, "-").value + lookup(per, 2, "+").value).real
    assert comps[0].hi < mid < comps[1].lo
    assert not bs.real_spectrum_membership(a07, mid)


def test_first_component_collapses():
    lengths = [real_components(a_from_V(V), 1)[0].length for V in (0.80, 0.85, 0.88, 0.8884)]
    assert all(x > y for x, y in zip(lengths, lengths[1:])) and lengths[-1] > 0


def test_domain_errors(a07):
    with pytest.raises(DomainError):
        trace_bands(a07, n_max=2, t_steps=32)
    with pytest.raises(DomainError):
        trace_bands(a07, n_max=13)
    with pytest.raises(DomainError):
        trace_bands(1 + 1j, n_max=2)
    with pytest.raises(DomainError):
        real_components(0.5, 2)
    with pytest.raises(DomainError):
        verify_properties(a_from_V(1.0))
    with pytest.raises(DomainError):
        find_singularity(a_from_V(1.0), 1)
