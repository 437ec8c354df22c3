import numpy as np
import pytest

from hwsteer import (PhaseSet, ReferenceSet, b_bar, b_bar_n, gamma,
                     qutrit_family, solve_phases_numeric, verify_reference)
from hwsteer.algebra import dag, hw_power, pauli_x, pauli_z, root_powers
from hwsteer.reference import hw_from_reference

from conftest import random_phase_set


def b_bar_double_sum(y: int, phases: PhaseSet) -> np.ndarray:
    """Oracle: Bbar_y = (1/d) sum_{k,j} e^{i phi_{j+1,y}} w^{-kj} XZ^k."""
    d = phases.d
    w = root_powers(d)
    x, z = pauli_x(d), pauli_z(d)
    out = np.zeros((d, d), dtype=complex)
    for k in range(d):
        xzk = x @ np.linalg.matrix_power(z, k)
        for j in range(d):
            out += np.exp(1j * phases.phi[(j + 1) % d, y]) * w[(-k * j) % d] * xzk
    return out / d


@pytest.mark.parametrize("d", [2, 3, 5])
def test_b_bar_matches_double_sum(d, rng):
    ps = random_phase_set(d, rng)
    for y in range(d):
        assert np.allclose(b_bar(y, ps), b_bar_double_sum(y, ps), atol=1e-13)


def test_b_bar_qutrit_matrix_layout():
    p00, p10 = 0.7, -1.3
    ps = qutrit_family(p00, p10, "A")
    b0 = b_bar(0, ps)
    expected = np.zeros((3, 3), dtype=complex)
    expected[1, 0] = np.exp(1j * p10)
    expected[2, 1] = np.exp(-1j * (p00 + p10))
    expected[0, 2] = np.exp(1j * p00)
    assert np.allclose(b0, expected)
    # exactly three nonzero entries, all modulus one
    assert np.count_nonzero(b0) == 3
    assert np.allclose(np.abs(b0[b0 != 0]), 1.0)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_gamma_reconstruction_equals_matrix_powers(d, rng):
    # Bbar^{(n)} built from gamma coefficients equals the plain n-th power
    # for any zero-sum table (in prime dimension)
    ps = random_phase_set(d, rng)
    g = gamma(ps)
    for y in range(d):
        b = b_bar(y, ps)
        for n in range(1, d):
            assert np.allclose(b_bar_n(y, n, g), np.linalg.matrix_power(b, n),
                               atol=1e-13)


def test_b_bar_n_rejects_out_of_range():
    g = gamma(qutrit_family(0.1, 0.2, "A"))
    with pytest.raises(ValueError):
        b_bar_n(0, 0, g)
    with pytest.raises(ValueError):
        b_bar_n(0, 3, g)
    with pytest.raises(ValueError):
        b_bar_n(3, 1, g)


@pytest.mark.parametrize("d,maker", [
    (2, lambda: PhaseSet.from_free(2, [[0.3, 0.3 + np.pi / 2]])),
    (3, lambda: qutrit_family(0.9, 2.2, "A")),
    (3, lambda: qutrit_family(5.1, 0.4, "B")),
    (5, lambda: solve_phases_numeric(5, [0.0, 0.2, -0.3, 0.5], rng_seed=1).phases),
])
def test_verify_reference_passes_for_admissible_tables(d, maker):
    report = verify_reference(maker())
    assert report.ok, report.to_text()
    assert report.max_deviation() < 1e-12


def test_verify_reference_flags_inadmissible_inversion():
    # the all-zero table keeps every power identity but cannot invert back
    # to the Heisenberg-Weyl operators (its gamma matrices are singular)
    report = verify_reference(PhaseSet(3, np.zeros((3, 3))))
    assert not report.ok
    assert not report["hw_inversion"].passed
    for name in ("reference_unitary", "reference_dth_power",
                 "power_consistency", "adjoint_power"):
        assert report[name].passed, name


@pytest.mark.parametrize("d", [2, 3, 5])
def test_adjoint_power_relation_for_reference_operators(d, rng):
    # Bbar^{(d-n)} = (Bbar^{(n)})^dag needs only Bbar^d = 1, so unlike the
    # bare Heisenberg-Weyl relation it holds at even d too
    ps = random_phase_set(d, rng)
    g = gamma(ps)
    for y in range(d):
        for n in range(1, d):
            assert np.allclose(b_bar_n(y, d - n, g), dag(b_bar_n(y, n, g)),
                               atol=1e-13)


def test_reference_set_bundles_consistent_pieces():
    ps = qutrit_family(1.0, 0.5, "B")
    ref = ReferenceSet.build(ps)
    assert ref.d == 3
    assert len(ref.b_bars) == 3
    for y in range(3):
        assert np.allclose(ref.bob_power(y, 2),
                           ref.b_bars[y] @ ref.b_bars[y])
    for k in range(3):
        for n in (1, 2):
            assert np.allclose(hw_from_reference(k, n, ref.gammas, ref.b_bars),
                               hw_power(k, n, 3), atol=1e-13)
