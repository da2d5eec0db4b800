import math

import numpy as np
import pytest

from nanonmr.errors import (
    DegenerateRadial,
    DimensionMismatch,
    InformationSingular,
    InvalidCoherence,
    NotAProbabilityVector,
    NotDensityMatrix,
)
from nanonmr.qfi import (
    Coherence,
    CoherenceDerivative,
    MeasurementBasis,
    QfiBreakdown,
    bures_qfi,
    classical_fi,
    fi_xy_basis,
    fidelity,
    fidelity_qfi,
    infidelity,
    optimal_measurement_angle,
    qubit_density_matrix,
    xy_probabilities,
)
from nanonmr.simple_model import (
    SimpleModelParams,
    coherence_exact,
    coherence_exact_derivative,
    prob_up_y,
)


def test_bures_examples():
    q = bures_qfi(Coherence(0.5, 1.234), CoherenceDerivative(0.0, 2.0))
    assert (q.i_r, q.i_phi, q.total) == (0.0, 1.0, 1.0)
    assert bures_qfi(Coherence(0.3, 0.1), CoherenceDerivative(0.0, 0.0)).total == 0.0
    q = bures_qfi(Coherence(0.6, 0.0), CoherenceDerivative(0.3, 1.5))
    assert q.i_r == pytest.approx(0.140625, rel=1e-14)
    assert q.i_phi == pytest.approx(0.81, rel=1e-14)
    assert q.total == pytest.approx(0.950625, rel=1e-14)


def test_bures_pure_state_limit():
    q = bures_qfi(Coherence(1.0, 0.2), CoherenceDerivative(0.0, 3.0))
    assert q.i_r == 0.0 and q.i_phi == 9.0
    with pytest.raises(DegenerateRadial):
        bures_qfi(Coherence(1.0, 0.2), CoherenceDerivative(1e-3, 3.0))


@pytest.mark.parametrize("r", [-0.1, 1.5, float("nan")])
def test_bures_rejects_bad_radius(r):
    with pytest.raises(InvalidCoherence):
        bures_qfi(Coherence(r, 0.0), CoherenceDerivative(0.0, 1.0))


def test_total_is_exact_sum():
    rng = np.random.default_rng(1)
    for _ in range(200):
        q = bures_qfi(Coherence(rng.uniform(0, 0.99), rng.uniform(-3, 3)),
                      CoherenceDerivative(rng.normal(), rng.normal()))
        assert q.total == q.i_r + q.i_phi


def test_measurement_basis_is_canonical():
    assert MeasurementBasis(-math.pi).alpha == math.pi
    assert MeasurementBasis(3 * math.pi).alpha == pytest.approx(math.pi)
    assert MeasurementBasis(2 * math.pi + 0.5).alpha == pytest.approx(0.5)


def test_optimal_angle_examples():
    assert optimal_measurement_angle(Coherence(0.7, 0.0)).alpha == pytest.approx(math.pi / 2)
    assert optimal_measurement_angle(Coherence(0.7, math.pi / 2)).alpha == pytest.approx(math.pi)


def test_fidelity_identical_states():
    rho = qubit_density_matrix(Coherence(0.4, 0.3))
    assert fidelity_qfi(rho, rho, 1e-3, 2.0) == pytest.approx(0.0, abs=1e-20)
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-14)


def test_fidelity_pure_qubits_small_angle():
    # states on the equator separated by Bloch angle d: QFI -> t^2
    for d in (1e-2, 1e-4):
        a = qubit_density_matrix(Coherence(1.0, 0.0))
        b = qubit_density_matrix(Coherence(1.0, d))
        val = fidelity_qfi(a, b, d, 3.0)
        assert val == pytest.approx(9.0 * 8 * (1 - math.cos(d / 2)) / d**2, rel=1e-8)
        assert val == pytest.approx(9.0, rel=1e-4)


def test_infidelity_matches_direct_definition():
    # oracle: Tr sqrt(sqrt(a) b sqrt(a)) with scipy's general matrix root
    from scipy.linalg import sqrtm

    rng = np.random.default_rng(4)
    for dim in (2, 3, 5):
        mats = []
        for _ in range(2):
            x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            m = x @ x.conj().T
            mats.append(m / np.trace(m).real)
        sa = sqrtm(mats[0])
        direct = np.trace(sqrtm(sa @ mats[1] @ sa)).real
        assert fidelity(*mats) == pytest.approx(direct, rel=1e-10)
        assert infidelity(*mats) == pytest.approx(1 - direct, rel=1e-8)


def test_fidelity_qfi_converges_to_bures_on_qubits():
    # r(theta) = 0.8 cos(theta), phi(theta) = 2 theta at theta = 0.6, t = 1
    th, dth = 0.6, 1e-4
    c = Coherence(0.8 * math.cos(th), 2 * th)
    ref = bures_qfi(c, CoherenceDerivative(-0.8 * math.sin(th), 2.0)).total
    a = qubit_density_matrix(Coherence(0.8 * math.cos(th - dth / 2), 2 * (th - dth / 2)))
    b = qubit_density_matrix(Coherence(0.8 * math.cos(th + dth / 2), 2 * (th + dth / 2)))
    assert fidelity_qfi(a, b, dth, 1.0) == pytest.approx(ref, rel=10 * dth)


def test_fidelity_input_validation():
    good = qubit_density_matrix(Coherence(0.5, 0.0))
    with pytest.raises(DimensionMismatch):
        fidelity(good, np.eye(3) / 3)
    with pytest.raises(NotDensityMatrix):
        fidelity(good, np.array([[1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(NotDensityMatrix):
        fidelity(good, np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(NotDensityMatrix):
        fidelity(good, np.array([[1.5, 0.0], [0.0, -0.5]]))
    with pytest.raises(ValueError):
        fidelity_qfi(good, good, 0.0, 1.0)


def test_classical_fi_examples():
    assert classical_fi([0.5, 0.5], [0.0, 0.0]) == 0.0
    assert classical_fi([0.5, 0.5], [0.1, -0.1]) == pytest.approx(0.04, rel=1e-14)
    # vanishing outcome with vanishing derivative is skipped
    assert classical_fi([0.0, 1.0], [0.0, 0.0]) == 0.0


def test_classical_fi_errors():
    with pytest.raises(NotAProbabilityVector):
        classical_fi([0.6, 0.6], [0.0, 0.0])
    with pytest.raises(NotAProbabilityVector):
        classical_fi([1.2, -0.2], [0.0, 0.0])
    with pytest.raises(NotAProbabilityVector):
        classical_fi([0.5, 0.5], [0.1, 0.1])
    with pytest.raises(InformationSingular):
        classical_fi([0.0, 1.0], [1e-3, -1e-3])


def test_classical_fi_of_y_probability_matches_xy_formula():
    # finite differences of prob_up_y in omega_N vs fi_xy_basis at alpha = pi/2
    p = SimpleModelParams.from_dimensionless(100, 0.01, math.pi / 3)
    h = 1e-6
    pu = prob_up_y(p, exact=True)
    dpu = (prob_up_y(p.with_theta(p.theta + h), exact=True)
           - prob_up_y(p.with_theta(p.theta - h), exact=True)) / (2 * h) * p.t
    fd = classical_fi([pu, 1 - pu], [dpu, -dpu])
    ref = fi_xy_basis(coherence_exact(p), coherence_exact_derivative(p), MeasurementBasis(math.pi / 2))
    assert fd == pytest.approx(ref, rel=1e-5)


def test_fi_xy_examples():
    c, dc = Coherence(0.6, 0.4), CoherenceDerivative(0.0, 1.7)
    assert fi_xy_basis(c, dc, MeasurementBasis(0.4 + math.pi / 2)) == pytest.approx(0.36 * 1.7**2, rel=1e-14)
    assert fi_xy_basis(c, dc, MeasurementBasis(0.4)) == pytest.approx(0.0, abs=1e-30)


def test_fi_xy_equals_classical_fi_of_its_probabilities():
    c, dc, basis = Coherence(0.7, 0.3), CoherenceDerivative(0.05, 1.2), MeasurementBasis(1.0)
    # oracle: p = (1 + r cos(a - phi)) / 2, differentiated by hand
    a = 1.0
    p_plus = 0.5 * (1 + 0.7 * math.cos(a - 0.3))
    dp = 0.5 * (0.05 * math.cos(a - 0.3) + 0.7 * math.sin(a - 0.3) * 1.2)
    ref = classical_fi([p_plus, 1 - p_plus], [dp, -dp])
    assert fi_xy_basis(c, dc, basis) == pytest.approx(ref, rel=1e-10)
    p, dpv = xy_probabilities(c, dc, basis)
    assert p[0] == pytest.approx(p_plus, rel=1e-14) and dpv[0] == pytest.approx(dp, rel=1e-14)


def test_rotation_only_mode():
    rng = np.random.default_rng(7)
    for _ in range(50):
        c = Coherence(rng.uniform(0, 0.95), rng.uniform(-3, 3))
        dc = CoherenceDerivative(0.0, rng.normal())
        b = MeasurementBasis(rng.uniform(-3, 3))
        assert fi_xy_basis(c, dc, b, rotation_only=True) == pytest.approx(fi_xy_basis(c, dc, b),
                                                                        rel=1e-12, abs=1e-300)
    c, dc, b = Coherence(0.5, 0.2), CoherenceDerivative(0.1, 0.8), MeasurementBasis(1.1)
    x = 1.1 - 0.2
    expected = math.sin(x) ** 2 * 0.25 * 0.64 / (1 - 0.25 * math.cos(x) ** 2)
    assert fi_xy_basis(c, dc, b, rotation_only=True) == pytest.approx(expected, rel=1e-14)


def test_optimal_basis_wins_grid_search_in_rotation_mode():
    p = SimpleModelParams.from_dimensionless(10**4, 0.05, 0.1003)
    c, dc = coherence_exact(p), coherence_exact_derivative(p)
    best = fi_xy_basis(c, dc, optimal_measurement_angle(c), rotation_only=True)
    assert best == pytest.approx(c.r**2 * dc.dphi_domega**2, rel=1e-12)
    grid = np.linspace(-math.pi, math.pi, 720, endpoint=False)
    assert all(fi_xy_basis(c, dc, MeasurementBasis(a), rotation_only=True) <= best * (1 + 1e-12) for a in grid)


def test_xy_fi_never_exceeds_bures():
    rng = np.random.default_rng(11)
    for _ in range(100):
        c = Coherence(rng.uniform(0, 0.99), rng.uniform(-3, 3))
        dc = CoherenceDerivative(rng.normal(), rng.normal())
        q = bures_qfi(c, dc).total
        for a in np.linspace(-math.pi, math.pi, 360, endpoint=False):
            assert fi_xy_basis(c, dc, MeasurementBasis(a)) <= q + 1e-8


def test_breakdown_from_terms():
    q = QfiBreakdown.from_terms(1, 2)
    assert q.total == 3.0
