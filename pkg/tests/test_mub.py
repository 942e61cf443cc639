"""Construction and verification of the mutually unbiased basis families."""

import numpy as np
import pytest

from mubqct import (
    Dimension,
    MubFamily,
    basis_state,
    build_mub_family,
    export_family,
    load_family,
    verify_unbiasedness,
)
from tests.conftest import cached_family


def _diagonalizes(basis: np.ndarray, op: np.ndarray) -> bool:
    m = basis.conj().T @ op @ basis
    off = m - np.diag(np.diagonal(m))
    return bool(np.max(np.abs(off)) < 1e-12)


def test_k1_bases_diagonalize_the_three_paulis():
    fam = cached_family(1)
    pauli_x = np.array([[0, 1], [1, 0]], dtype=complex)
    pauli_y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    pauli_z = np.diag([1.0, -1.0]).astype(complex)
    assert np.array_equal(fam.bases[0], np.eye(2))
    assert _diagonalizes(fam.bases[0], pauli_z)
    flags = sorted(
        (_diagonalizes(fam.bases[t], pauli_x), _diagonalizes(fam.bases[t], pauli_y))
        for t in (1, 2)
    )
    assert flags == [(False, True), (True, False)]


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_exhaustive_verification_passes(k):
    fam = cached_family(k)
    assert fam.n_bases == fam.d + 1
    report = verify_unbiasedness(fam, tol=1e-9)
    assert report.passed
    assert report.max_orthonormality_dev <= 1e-9
    assert report.max_unbiasedness_dev <= 1e-9


def test_theta_zero_is_the_computational_basis():
    for k in (1, 2, 3, 4):
        fam = cached_family(k)
        assert np.array_equal(fam.bases[0], np.eye(fam.d))


def test_build_is_deterministic():
    a = build_mub_family(3)
    b = build_mub_family(3)
    assert a.bases.tobytes() == b.bases.tobytes()


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_completeness_of_each_basis(k):
    fam = cached_family(k)
    eye = np.eye(fam.d)
    for theta in range(fam.n_bases):
        b = fam.bases[theta]
        resolved = b @ b.conj().T
        assert np.max(np.abs(resolved - eye)) < 1e-9


def test_first_component_phase_convention():
    for k in (1, 2, 3):
        fam = cached_family(k)
        first_rows = fam.bases[1:, 0, :]
        assert np.all(first_rows.imag == 0)
        assert np.all(first_rows.real > 0)


def test_k2_cross_overlaps_are_exactly_half():
    fam = cached_family(2)
    for t1 in range(5):
        for t2 in range(t1 + 1, 5):
            overlaps = np.abs(fam.bases[t1].conj().T @ fam.bases[t2])
            assert np.max(np.abs(overlaps - 0.5)) < 1e-12


def test_perturbed_family_fails_with_located_deviation():
    fam = cached_family(2)
    bases = fam.bases.copy()
    bases[1][:, 2] *= 1.01
    bad = MubFamily(dimension=fam.dimension, bases=bases)
    report = verify_unbiasedness(bad, tol=1e-9)
    assert not report.passed
    assert report.max_orthonormality_dev == pytest.approx(1.01**2 - 1.0, rel=1e-9)
    assert report.worst_orthonormality == (1, 2, 2)
    # the scaled column also skews cross-basis overlaps by one percent of 1/2
    assert report.max_unbiasedness_dev == pytest.approx(0.005, rel=1e-6)


def test_verification_report_to_dict_shape():
    report = verify_unbiasedness(cached_family(1))
    d = report.to_dict()
    assert d["passed"] is True
    assert d["d"] == 2 and d["n_bases"] == 3
    assert set(d["worst_orthonormality"]) == {"theta", "i", "j"}
    assert set(d["worst_unbiasedness"]) == {"theta1", "theta2", "i", "j"}


def test_export_load_round_trip_is_exact(tmp_path):
    fam = cached_family(3)
    path = tmp_path / "family_d8.txt"
    export_family(fam, path)
    header = path.read_text().splitlines()[0]
    assert header == "d=8 bases=9"
    loaded = load_family(path)
    assert loaded.d == 8
    assert np.array_equal(loaded.bases, fam.bases)


def test_basis_state_norm_and_bounds():
    fam = cached_family(2)
    vec = basis_state(fam, 3, 1)
    assert vec.shape == (4,)
    assert abs(np.linalg.norm(vec) - 1.0) < 1e-12
    assert np.array_equal(basis_state(fam, 0, 0), np.eye(4)[:, 0])
    with pytest.raises(ValueError):
        basis_state(fam, 5, 0)
    with pytest.raises(ValueError):
        basis_state(fam, 0, 4)
    with pytest.raises(ValueError):
        basis_state(fam, -1, 0)


def test_dimension_validation():
    assert Dimension.from_k(3) == Dimension(k=3, d=8)
    assert Dimension.from_d(16).k == 4
    with pytest.raises(ValueError):
        Dimension.from_k(0)
    with pytest.raises(ValueError):
        Dimension.from_d(12)
    with pytest.raises(ValueError):
        Dimension.from_d(1)
    with pytest.raises(ValueError):
        Dimension(k=2, d=8)


def test_build_rejects_out_of_range_k():
    for bad in (0, -1, 9, 1.5, True):
        with pytest.raises(ValueError):
            build_mub_family(bad)


def test_family_array_is_read_only():
    fam = cached_family(2)
    with pytest.raises(ValueError):
        fam.bases[0, 0, 0] = 0.0


def test_mub_family_shape_validation():
    with pytest.raises(ValueError):
        MubFamily(dimension=Dimension.from_k(2), bases=np.zeros((4, 4, 4), dtype=complex))
