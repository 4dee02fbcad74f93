import numpy as np
import pytest

from protmeas import (IntervalRegion, MeasurementSchedule, NumericalError,
                      OscillatorBasis, PointerGrid, StateVector, expectation,
                      number_state, projector_matrix, zeno_protect_sim,
                      bipartite_protective_sim)
from protmeas.simulation import _run_bipartite

HALF_TAIL = 0.07864960352514258   # erfc(1)/2


@pytest.fixture(scope="module")
def basis32():
    return OscillatorBasis(dim=32)


@pytest.fixture(scope="module")
def tail_projector(basis32):
    return projector_matrix(IntervalRegion(1.0, np.inf), basis32)


def superposition01(basis) -> StateVector:
    amps = np.zeros(basis.dim, dtype=complex)
    amps[0] = amps[1] = 1.0
    return StateVector(amps, basis)


# ---------------------------------------------------------------- bipartite

def test_zero_coupling_leaves_pointer_alone(basis32):
    # a region far outside the state's support makes P effectively zero
    P = projector_matrix(IntervalRegion(50.0, 51.0), basis32)
    res = bipartite_protective_sim(P, MeasurementSchedule(5.0), steps=128)
    assert abs(res.pointer_shift) < 1e-10
    assert res.survival_probability == pytest.approx(1.0, abs=1e-10)


def test_protective_limit_reads_expectation(basis32, tail_projector):
    res = bipartite_protective_sim(tail_projector, MeasurementSchedule(20.0),
                                   steps=1024)
    assert abs(res.pointer_shift - HALF_TAIL) / HALF_TAIL < 0.05
    assert 0.99 <= res.survival_probability <= 1.0 + 1e-10
    assert res.final_norm == pytest.approx(1.0, abs=1e-10)
    assert res.final_state_shape == (32, 512)


def test_energy_shift_scales_inversely_with_duration(basis32, tail_projector):
    r1 = bipartite_protective_sim(tail_projector, MeasurementSchedule(20.0), steps=512)
    r2 = bipartite_protective_sim(tail_projector, MeasurementSchedule(40.0), steps=512)
    ratio = r1.energy_shift_per_p / r2.energy_shift_per_p
    assert abs(ratio - 2.0) < 0.2


def test_shift_converges_monotonically_in_duration(basis32, tail_projector):
    ref = expectation(tail_projector, number_state(basis32, 0))
    errors = []
    for T in (5.0, 10.0, 20.0, 40.0):
        res = bipartite_protective_sim(tail_projector, MeasurementSchedule(T), steps=512)
        errors.append(abs(res.pointer_shift - ref))
    for a, b in zip(errors, errors[1:]):
        assert b <= a + 1e-9


def test_step_ladder_non_convergence_raises(basis32, tail_projector):
    with pytest.raises(NumericalError):
        bipartite_protective_sim(tail_projector, MeasurementSchedule(5.0),
                                 steps=64, shift_tol=0.0, max_refinements=1)


def test_stepper_second_order_in_dt(basis32, tail_projector):
    # halving dt shrinks the pointer-shift defect by about 4
    grid = PointerGrid()
    pre = number_state(basis32, 0)
    sched = MeasurementSchedule(10.0)
    means = []
    for steps in (64, 128, 256, 4096):
        mean, _, _, _ = _run_bipartite(tail_projector, sched, pre, grid, steps)
        means.append(mean)
    ref = means[-1]
    e1, e2 = abs(means[0] - ref), abs(means[1] - ref)
    assert e2 < e1 / 2.5


def test_pointer_grid_validation():
    with pytest.raises(ValueError):
        PointerGrid(points=100)
    with pytest.raises(ValueError):
        PointerGrid(sigma=-1.0)


# --------------------------------------------------------------------- zeno

def test_zeno_two_level_closed_form(basis32, tail_projector):
    # survival after n projections onto the initial state is cos(wT/2n)^2n
    init = superposition01(basis32)
    T = np.pi / basis32.omega
    for n in (1, 4, 8, 16):
        res = zeno_protect_sim(init, n, T, measured=tail_projector)
        oracle = np.cos(basis32.omega * T / (2 * n)) ** (2 * n)
        assert res.survival_probability == pytest.approx(oracle, abs=1e-12)


def test_zeno_survival_monotone_and_saturates(basis32):
    init = superposition01(basis32)
    T = np.pi / basis32.omega
    last = 0.0
    for n in (4, 8, 16, 32, 64, 128, 256):
        surv = zeno_protect_sim(init, n, T).survival_probability
        assert surv >= last
        last = surv
    assert last > 0.99


def test_zeno_failure_rate_bounded_by_c_over_n(basis32):
    init = superposition01(basis32)
    T = np.pi / basis32.omega
    ns = np.array([4, 8, 16, 32, 64, 128, 256])
    fails = np.array([1.0 - zeno_protect_sim(init, int(n), T).survival_probability
                      for n in ns])
    # n (1 - s) grows toward its asymptote, so C fitted at the largest n
    # bounds the failure rate at every tested n
    C = float(ns[-1] * fails[-1])
    assert np.all(fails <= C * (1.0 + 1e-9) / ns)
    # analytic Zeno bound: 1 - s <= (omega T / 2)^2 / n
    assert np.all(fails <= (basis32.omega * T / 2.0) ** 2 / ns + 1e-12)


def test_zeno_operator_snapshots_jump(basis32, tail_projector):
    init = superposition01(basis32)
    res = zeno_protect_sim(init, 6, 2.0, measured=tail_projector)
    assert len(res.snapshots) == 6
    base = np.sort(np.linalg.eigvalsh(tail_projector.entries))
    for snap in res.snapshots:
        assert snap.jump_norm > 0.01
        # before the projection the operator is unitarily similar to the
        # previous "after", so within each interval the motion is smooth
        assert np.max(np.abs(snap.before - snap.before.conj().T)) < 1e-10
    # the very first "before" is a unitary conjugate of P itself
    first = np.sort(np.linalg.eigvalsh(res.snapshots[0].before))
    assert np.max(np.abs(first - base)) < 1e-8


def test_zeno_with_measurement_coupling(basis32, tail_projector):
    init = superposition01(basis32)
    plain = zeno_protect_sim(init, 32, np.pi).survival_probability
    coupled = zeno_protect_sim(init, 32, np.pi, measured=tail_projector,
                               coupling=0.3).survival_probability
    assert 0.0 < coupled <= 1.0 + 1e-12
    assert abs(coupled - plain) < 0.05   # weak coupling barely disturbs


def test_zeno_validation(basis32, tail_projector):
    init = superposition01(basis32)
    with pytest.raises(ValueError):
        zeno_protect_sim(init, 0, 1.0)
    with pytest.raises(ValueError):
        zeno_protect_sim(init, 4, 1.0, coupling=0.5)   # coupling needs an operator
