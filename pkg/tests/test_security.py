"""Adversary bounds: exhaustive oracles, closed forms, and their ordering."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mubqct import (
    CapabilityError,
    alicki_fannes_iacc,
    bounds_report,
    encoding_average_state,
    f_operator,
    helstrom_multi_bound,
    helstrom_numeric,
    helstrom_paper_single,
    hmin_bits,
    iacc_bound,
    lambda_numeric,
    lambda_numeric_for_d,
    lambda_paper_bound,
    pguess_certified,
    pguess_multi_paper,
    pguess_paper,
    pguess_single_paper,
    pinsker_delta,
    security_distance_bounds,
    simulate_eve_random_basis,
    strategy_monotonicity,
    theorem1_bound,
    trace_norm,
)
from tests.conftest import cached_family

# exhaustive brute-force values over all 2^(d+1) outcome strings, frozen
# as this repository's reference constants
LAMBDA_REFERENCE = {
    2: 2.3660254037844393,
    4: 2.0,
    8: 1.8430703308172536,
    16: 1.7723635432250342,
}


def _sound_cap(d: int) -> float:
    # projector-sum norm applied to the d(d+1)/2 unscaled encoding
    # projectors, then rescaled by the 2/d weight
    l = d * (d + 1) // 2
    return (2.0 / d) * (1.0 + (l - 1) / math.sqrt(d))


def test_f_operator_d2_spectrum_for_every_outcome_string():
    fam = cached_family(1)
    want = np.array([1.5 - math.sqrt(3) / 2, 1.5 + math.sqrt(3) / 2])
    for omega in itertools.product((0, 1), repeat=3):
        f = f_operator(fam, omega)
        assert np.max(np.abs(f - f.conj().T)) < 1e-12
        eig = np.linalg.eigvalsh(f)
        assert np.max(np.abs(eig - want)) < 1e-9


@pytest.mark.parametrize("k", [1, 2, 3])
def test_f_operator_trace_and_positivity(k):
    fam = cached_family(k)
    d = fam.d
    rng = np.random.default_rng(k)
    for _ in range(10):
        omega = rng.integers(0, 2, size=d + 1)
        f = f_operator(fam, omega)
        assert abs(np.trace(f).real - (d + 1)) < 1e-9
        assert np.min(np.linalg.eigvalsh(f)) > -1e-12


def test_f_operator_rejects_wrong_length():
    with pytest.raises(ValueError):
        f_operator(cached_family(1), (0, 1))


@pytest.mark.parametrize("d", [2, 4, 8, 16])
def test_lambda_numeric_matches_frozen_reference(d):
    lam = lambda_numeric_for_d(d)
    assert lam == pytest.approx(LAMBDA_REFERENCE[d], abs=1e-9)
    assert lam >= (d + 1) / d - 1e-12
    assert lam <= _sound_cap(d) + 1e-9


def test_lambda_numeric_d2_closed_form():
    assert lambda_numeric_for_d(2) == pytest.approx(1.5 + math.sqrt(3) / 2, abs=1e-9)


def test_lambda_minus_one_decreases_with_d():
    gaps = [LAMBDA_REFERENCE[d] - 1.0 for d in (4, 8, 16)]
    assert all(g > 0 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)


@pytest.mark.parametrize("d", [2, 4, 8])
def test_every_outcome_string_respects_the_sound_cap(d):
    fam = cached_family(d.bit_length() - 1)
    cap = _sound_cap(d)
    for omega in itertools.product((0, 1), repeat=d + 1):
        top = np.linalg.eigvalsh(f_operator(fam, omega))[-1]
        assert top <= cap + 1e-9


def test_lambda_numeric_cap():
    with pytest.raises(CapabilityError):
        lambda_numeric_for_d(32)
    with pytest.raises(CapabilityError):
        lambda_numeric(cached_family(5))


def test_lambda_paper_bound_examples():
    assert lambda_paper_bound(4) == pytest.approx(1.0 + 18 / 64, abs=1e-12)
    assert lambda_paper_bound(16) == pytest.approx(1.0 + 270 / 2048, abs=1e-12)
    values = [lambda_paper_bound(2**k) for k in range(1, 12)]
    assert all(v > 1.0 for v in values)
    assert values == sorted(values, reverse=True)


def _random_projectors(rng, l, d):
    ops = []
    for _ in range(l):
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        v /= np.linalg.norm(v)
        ops.append(np.outer(v, v.conj()))
    return ops


def test_theorem1_equality_cases():
    v = np.zeros(4, dtype=complex)
    v[1] = 1.0
    proj = np.outer(v, v.conj())
    ops = [proj] * 5
    bound = theorem1_bound(ops)
    exact = np.linalg.eigvalsh(sum(ops))[-1]
    assert bound == pytest.approx(5.0, abs=1e-12)
    assert exact == pytest.approx(bound, abs=1e-9)

    ortho = [np.diag([1.0, 0, 0, 0]), np.diag([0, 1.0, 0, 0]), np.diag([0, 0, 1.0, 0])]
    bound = theorem1_bound([o.astype(complex) for o in ortho])
    assert bound == pytest.approx(1.0, abs=1e-12)

    assert theorem1_bound([proj]) == pytest.approx(1.0, abs=1e-12)


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_theorem1_bound_dominates_exact_norm(seed):
    rng = np.random.default_rng(seed)
    l = int(rng.integers(2, 11))
    d = int(rng.integers(2, 9))
    ops = _random_projectors(rng, l, d)
    exact = np.linalg.eigvalsh(sum(ops))[-1]
    assert exact <= theorem1_bound(ops) + 1e-9


def test_theorem1_rejects_non_projectors():
    with pytest.raises(ValueError):
        theorem1_bound([np.eye(3, dtype=complex)])  # rank 3
    with pytest.raises(ValueError):
        theorem1_bound([np.diag([2.0, 0.0]).astype(complex)])  # not idempotent
    with pytest.raises(ValueError):
        theorem1_bound([])


def test_pguess_paper_examples():
    assert pguess_single_paper(4) == pytest.approx(0.95, abs=1e-12)
    assert pguess_single_paper(16) == pytest.approx(0.7481618, abs=1e-6)
    assert pguess_multi_paper(4, 1) == pytest.approx(0.9375, abs=1e-12)
    # the two closed forms are distinct at m=1; multi never exceeds single
    for d in (4, 8, 16, 64, 1024):
        assert pguess_multi_paper(d, 1) <= pguess_single_paper(d) + 1e-12
    assert pguess_paper(16, 1) == pguess_single_paper(16)
    assert pguess_paper(16, 3) == pguess_multi_paper(16, 3)


def test_pguess_clamping():
    assert pguess_multi_paper(4, 50) == 1.0  # growth clamped at certainty
    assert pguess_single_paper(2) == pytest.approx(
        0.5 + 1 / math.sqrt(2) - 2 / (6 * math.sqrt(2)), abs=1e-12
    )
    big = pguess_multi_paper(4, 10**6)  # log-domain guard: no overflow
    assert big == 1.0


def test_pguess_certified():
    assert pguess_certified(2.0, 1) == 1.0
    assert pguess_certified(LAMBDA_REFERENCE[8], 1) == pytest.approx(
        LAMBDA_REFERENCE[8] / 2, abs=1e-12
    )
    assert pguess_certified(LAMBDA_REFERENCE[16], 2) == 1.0
    assert pguess_certified(1.0, 5) == 0.5  # floor of the clamp window


def test_hmin_bits():
    assert hmin_bits(1.0) == 0.0
    assert hmin_bits(0.5) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        hmin_bits(0.0)
    with pytest.raises(ValueError):
        hmin_bits(1.5)


def test_iacc_bound_examples():
    assert iacc_bound(10**6, 10) == pytest.approx(math.log2(1.02), abs=1e-12)
    assert iacc_bound(16, 0) == 0.0


@given(st.integers(min_value=1, max_value=12), st.integers(min_value=1, max_value=50))
def test_iacc_bound_monotonicity(k, m):
    d = 2**k
    assert iacc_bound(d, m + 1) > iacc_bound(d, m)
    assert iacc_bound(4 * d, m) < iacc_bound(d, m)


def test_pinsker_and_alicki_fannes():
    assert pinsker_delta(0.0) == 0.0
    assert pinsker_delta(0.02) == pytest.approx(0.1, abs=1e-12)
    with pytest.raises(ValueError):
        pinsker_delta(-0.1)
    with pytest.raises(ValueError):
        alicki_fannes_iacc(0.6, 2)
    for iacc in np.linspace(0.005, 0.5, 40):
        delta, back = security_distance_bounds(iacc)
        assert delta == pytest.approx(math.sqrt(iacc / 2), abs=1e-12)
        assert back >= iacc - 1e-12


@pytest.mark.parametrize("d", [2, 4, 8])
def test_helstrom_numeric_matches_closed_form(d):
    fam = cached_family(d.bit_length() - 1)
    closed = 0.5 + 0.5 / math.sqrt(d + 1)
    assert helstrom_numeric(fam, 1) == pytest.approx(closed, abs=1e-9)
    assert helstrom_paper_single(d) == pytest.approx(closed, abs=1e-12)


def test_helstrom_d2_trace_distance():
    fam = cached_family(1)
    rho0 = encoding_average_state(fam, 0)
    rho1 = encoding_average_state(fam, 1)
    assert trace_norm(rho0 - rho1) == pytest.approx(2 / math.sqrt(3), abs=1e-9)
    for rho in (rho0, rho1):
        assert abs(np.trace(rho).real - 1.0) < 1e-12
        assert np.min(np.linalg.eigvalsh(rho)) > -1e-12


def test_helstrom_multi_copy():
    fam = cached_family(1)
    two_copy = helstrom_numeric(fam, 2)
    assert two_copy <= 0.5 + 2 / (2 * math.sqrt(3)) + 1e-12
    assert two_copy >= helstrom_numeric(fam, 1) - 1e-12
    assert helstrom_multi_bound(2, 2) == 1.0  # closed form clamps at certainty
    assert helstrom_multi_bound(16, 1) == pytest.approx(0.5 + 0.5 / math.sqrt(17), abs=1e-12)


def test_helstrom_dimension_cap():
    with pytest.raises(CapabilityError):
        helstrom_numeric(cached_family(4), 4)  # 16^4 far exceeds the cap
    with pytest.raises(CapabilityError):
        helstrom_numeric(cached_family(3), 5)


@pytest.mark.parametrize("d", [2, 4])
def test_eve_random_basis_simulation(d):
    fam = cached_family(d.bit_length() - 1)
    res = simulate_eve_random_basis(fam, n_trials=10**5, seed=31)
    assert res.p_success_analytic == pytest.approx(0.5 + 0.5 / (d + 1), abs=1e-12)
    assert abs(res.p_success - res.p_success_analytic) < 5 * res.standard_error
    assert 0.5 <= res.p_success <= 1.0


def test_eve_simulation_is_deterministic():
    fam = cached_family(2)
    a = simulate_eve_random_basis(fam, n_trials=2000, seed=7)
    b = simulate_eve_random_basis(fam, n_trials=2000, seed=7)
    assert a.p_success == b.p_success


@pytest.mark.parametrize("k", [1, 2])
def test_strategy_monotonicity_exact_linear_law(k):
    fam = cached_family(k)
    report = strategy_monotonicity(fam)
    d = fam.d
    assert report.deltas == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert report.monotone_nonincreasing
    assert report.max_linearity_dev < 1e-9
    assert report.initial_distance == pytest.approx(2 / math.sqrt(d + 1), abs=1e-9)
    assert report.distances[-1] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        strategy_monotonicity(fam, deltas=(0.0, 1.5))


def test_bounds_report_keys_and_oracle_modes():
    keys = [
        "d", "m", "lambda_numeric", "lambda_paper", "pguess_certified",
        "pguess_paper_single", "pguess_paper_multi", "hmin_bits", "iacc_bits",
        "helstrom_single", "helstrom_multi_bound", "delta_pinsker", "oracle_used",
    ]
    rep = bounds_report(16, 1, oracle=False)
    assert list(rep.to_dict()) == keys
    assert rep.lambda_numeric is None
    assert rep.oracle_used is False
    assert rep.pguess_paper_single == pytest.approx(0.7481618, abs=1e-6)
    assert rep.hmin_bits == pytest.approx(-math.log2(0.7481617647058824), abs=1e-9)

    cert = bounds_report(2, 1, oracle=True)
    assert cert.oracle_used is True
    assert cert.lambda_numeric == pytest.approx(LAMBDA_REFERENCE[2], abs=1e-9)
    assert cert.pguess_certified == 1.0
    assert cert.hmin_bits == 0.0

    with pytest.raises(CapabilityError):
        bounds_report(32, 1, oracle=True)
    # without the oracle the same dimension falls back to closed forms
    assert bounds_report(32, 1, oracle=False).lambda_numeric is None


def test_bounds_report_large_d_iacc():
    rep = bounds_report(2**20, 10, oracle=False)
    assert rep.iacc_bits == pytest.approx(math.log2(1 + 20 / 1024), abs=1e-12)
    assert rep.delta_pinsker == pytest.approx(math.sqrt(rep.iacc_bits / 2), abs=1e-12)
