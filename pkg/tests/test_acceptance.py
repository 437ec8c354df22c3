"""End-to-end checks pinning the headline numbers at their stated tolerances.

One test per claim: the classical bound at the distinguished qutrit point,
the quantum maximum d(d-1) across dimensions and families, the range and
distinguished cell of the two-parameter qutrit landscape, agreement of the
two classical searches, the orthogonality constraint system, the operator
identities the construction stands on, the self-testing consequences, and
consistency between the operator, behavior, and deterministic layers.
Wall-clock limits guard against performance regressions.
"""

import time

import numpy as np
import pytest

from hwsteer import (Assignment, PhaseSet, ancilla_realization, b_bar,
                     b_bar_n, born_behavior, brute_force_bound,
                     build_steering_operator, check_orthogonality,
                     conjugate_bob, dag, deterministic_behavior,
                     deterministic_value, equivalence_recovery,
                     functional_from_behavior, gamma, hw_power,
                     max_eigenvalue, projectivity_probe, quantum_value,
                     qutrit_family, reference_realization, scan,
                     separable_bound, solve_phases_numeric, stabilizer_suite)
from hwsteer.cli import main
from hwsteer.steering import Realization

from conftest import haar_unitary, random_ket, random_phase_set

REF_POINT = (4 * np.pi / 9, -2 * np.pi / 9)
REF_VALUE = 6 * np.cos(np.pi / 9)          # 5.638155724715451


def admissible_phases(d):
    """A valid phase table: the qutrit family at d = 3, solver output else."""
    if d == 3:
        return qutrit_family(*REF_POINT, "A")
    out = solve_phases_numeric(d, [0.4] * (d - 1), rng_seed=0)
    if out.phases is None:
        pytest.skip(f"phase solver did not converge at d = {d} "
                    f"(best residual {out.residual:.3e})")
    return out.phases


def test_reference_point_classical_bound(capsys):
    # the distinguished point (4pi/9, -2pi/9) of family A: 6 cos(pi/9)
    t0 = time.monotonic()
    args = ["bound", "--family", "A", "--phi00", f"{REF_POINT[0]:.17g}",
            "--phi10", f"{REF_POINT[1]:.17g}"]
    assert main(args) == 0
    printed = float(capsys.readouterr().out.splitlines()[0].split()[1])
    assert printed == pytest.approx(REF_VALUE, abs=1e-9)
    assert time.monotonic() - t0 < 1.0


def test_quantum_bound_attained(rng):
    t0 = time.monotonic()
    # d = 3: both families, 25 random phase points each
    for _ in range(25):
        p00, p10 = rng.uniform(0.0, 2 * np.pi, 2)
        for family in ("A", "B"):
            g = gamma(qutrit_family(p00, p10, family))
            s = build_steering_operator(g, reference_realization(g).bob_ops)
            assert max_eigenvalue(s) == pytest.approx(6.0, abs=1e-9)
    # d = 2 and d = 5: numerically solved phase tables
    for d in (2, 5):
        g = gamma(admissible_phases(d))
        s = build_steering_operator(g, reference_realization(g).bob_ops)
        assert max_eigenvalue(s) == pytest.approx(d * (d - 1), abs=1e-9)
    assert time.monotonic() - t0 < 10.0


def test_qutrit_landscape():
    # family A over the full inclusive [0, 2pi]^2 square.  361 points per
    # axis (step pi/180) keep the distinguished point on the lattice
    # (4pi/9 = 80 steps, 16pi/9 = 320) and contain an image of the global
    # minimizer; see the companion test for the lattice arithmetic.
    t0 = time.monotonic()
    res = scan(resolution=(361, 361), family="A")
    assert res.min_value == pytest.approx(5.34604, abs=5e-3)
    assert res.max_value == pytest.approx(6.0, abs=1e-6)
    assert res.phi00[80] == pytest.approx(REF_POINT[0], abs=1e-12)
    assert res.phi10[320] == pytest.approx(REF_POINT[1] + 2 * np.pi, abs=1e-12)
    cell_val, _ = res.cell(80, 320)
    assert cell_val == pytest.approx(REF_VALUE, abs=1e-9)
    assert time.monotonic() - t0 < 60.0


def test_qutrit_landscape_lattice_sensitivity():
    # the landscape minimum is exactly 6 cos(3 pi / 20), attained at sharp
    # kink points such as (37 pi / 20, 3 pi / 10) where the optimal
    # strategy switches.  Whether a lattice reports it depends on whether
    # some image of a minimizer is commensurate with the step:
    #   step pi/90  (181 points): no image on the lattice -> min 5.3873
    #   step pi/100 (201 points): hits (37 pi/20, 3 pi/10) -> min exact,
    #                             but 4 pi / 9 is off-lattice
    #   step pi/180 (361 points): contains both special points
    min_closed = 6 * np.cos(3 * np.pi / 20)
    val, _ = separable_bound(gamma(qutrit_family(37 * np.pi / 20,
                                                 3 * np.pi / 10, "A")))
    assert val == pytest.approx(min_closed, abs=1e-12)

    coarse = scan(resolution=(181, 181), family="A")
    assert coarse.values[40, 160] == pytest.approx(REF_VALUE, abs=1e-9)
    assert coarse.max_value == pytest.approx(6.0, abs=1e-6)
    assert coarse.min_value == pytest.approx(5.387320485145350, abs=1e-9)
    assert coarse.min_value > min_closed + 5e-3

    default = scan(resolution=(201, 201), family="A")
    assert default.min_value == pytest.approx(min_closed, abs=1e-12)
    assert default.max_value == pytest.approx(6.0, abs=1e-6)


def test_classical_search_oracle_equivalence(rng):
    # the factorized search must match exhaustive enumeration exactly:
    # same value, same reported strategy under the shared tie-break
    t0 = time.monotonic()
    for d in (2, 3):
        for _ in range(100):
            g = gamma(random_phase_set(d, rng))
            bval, basg = brute_force_bound(g)
            sval, sasg = separable_bound(g)
            assert abs(bval - sval) < 1e-12
            assert basg == sasg
    assert time.monotonic() - t0 < 30.0


def test_orthogonality_constraint_system(rng):
    for _ in range(100):
        p00, p10 = rng.uniform(0.0, 2 * np.pi, 2)
        for family in ("A", "B"):
            rep = check_orthogonality(gamma(qutrit_family(p00, p10, family)))
            assert rep.ok
            assert rep.max_violation < 1e-12
    assert not check_orthogonality(gamma(PhaseSet(3, np.zeros((3, 3))))).ok


@pytest.mark.parametrize("d", [2, 3, 5])
def test_operator_algebra_suite(d):
    phases = admissible_phases(d)
    g = gamma(phases)
    eye = np.eye(d)
    for y in range(d):
        b = b_bar(y, phases)
        assert np.abs(np.linalg.matrix_power(b, d) - eye).max() < 1e-10
        for n in range(1, d):
            bn = b_bar_n(y, n, g)
            # gamma-weighted combination of HW powers == plain matrix power
            assert np.abs(bn - np.linalg.matrix_power(b, n)).max() < 1e-10
            # powers n and d-n are adjoints (holds in every dimension)
            assert np.abs(b_bar_n(y, d - n, g) - dag(bn)).max() < 1e-10
    if d % 2 == 1:
        # odd d: power adjoints and gamma conjugates pair up across n <-> d-n
        for n in range(1, d):
            for k in range(d):
                assert np.abs(hw_power(k, d - n, d)
                              - dag(hw_power(k, n, d))).max() < 1e-12
            assert np.abs(g.values[d - n - 1]
                          - np.conj(g.values[n - 1])).max() < 1e-10
    else:
        # even d: (XZ)^d = -1 for odd k, so the pairing picks up a sign;
        # pin the d = 2 counterexample instead of asserting the identity
        assert np.abs(dag(hw_power(1, 1, 2)) + hw_power(1, 1, 2)).max() < 1e-12
    rep = stabilizer_suite(d)
    assert rep.ok, rep.to_text()


def test_self_testing_consequences(rng):
    g = gamma(qutrit_family(*REF_POINT, "A"))
    ref = reference_realization(g)
    cases = [conjugate_bob(ref, haar_unitary(3, rng)) for _ in range(20)]
    # reference carrying a full-rank two-level ancilla, plain and rotated
    anc = ancilla_realization(g, np.diag([0.6, 0.4]))
    cases += [anc, conjugate_bob(anc, haar_unitary(6, rng))]
    for r in cases:
        assert projectivity_probe(r.bob_ops, g).ok
        out = equivalence_recovery(r, g)
        assert out.recovered, out.detail
        assert out.unitary_quality < 1e-8
        assert out.per_y_deviation < 1e-8


def test_behavior_layer_consistency(rng):
    g = gamma(qutrit_family(*REF_POINT, "A"))
    ref = reference_realization(g)
    # operator layer vs behavior layer on random projective realizations
    for _ in range(20):
        u = haar_unitary(3, rng)
        bob_ops = conjugate_bob(ref, u).bob_ops
        r = Realization(3, random_ket(9, rng), bob_ops)
        s = build_steering_operator(g, bob_ops)
        assert functional_from_behavior(born_behavior(r), g) == pytest.approx(
            quantum_value(s, r.state), abs=1e-8)
    # behavior layer vs deterministic layer on random strategies
    for _ in range(50):
        asg = Assignment(tuple(rng.integers(0, 3, 3)), tuple(rng.integers(0, 3, 3)))
        beh = deterministic_behavior(asg, 3)
        assert functional_from_behavior(beh, g) == pytest.approx(
            deterministic_value(asg, g), abs=1e-8)
