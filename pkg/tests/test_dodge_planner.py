import numpy as np
import pytest

from nevdodge.errors import InputError, IterationBudgetExceeded, PlanFailure, SplitFailure
from nevdodge.geometry.boundary_geometry import DeformationField, deform, nodes
from nevdodge.process.dodge_planner import (
    MULTIPLE,
    NOT_EIGEN,
    SIMPLE,
    DodgePlan,
    DodgeResult,
    classify,
    dodge,
    plan_simple,
    split_multiple,
)
from nevdodge.process.eigen_scanner import scan
from nevdodge.process.potential_field import gaussian_bump
from nevdodge.process.shape_derivative import eigenvalue_derivative

from tests.conftest import FIRST_PAIR, RADIAL_MODE


@pytest.mark.parametrize(
    "kwargs",
    [
        {"delta": 0.0},
        {"target": 0.1},
        {"sigma_arc": (1.0, 1.0)},
        {"step_schedule": ()},
        {"max_iter": -1},
        {"eps_detect": 0.0},
    ],
)
def test_plan_validation(kwargs):
    with pytest.raises(InputError):
        DodgePlan(**{"target": 10.0, **kwargs})


def test_plan_from_dict():
    plan = DodgePlan.from_dict({"target": 12, "delta": 0.1, "sigma_arc": [0, 1], "step_schedule": [0.05]})
    assert plan.target == 12.0 and plan.sigma_arc == (0.0, 1.0) and plan.step_schedule == (0.05,)
    with pytest.raises(InputError):
        DodgePlan.from_dict({"delta": 0.1})


def test_classification(disk):
    assert classify(disk, None, 10.0, 0.05, n_nodes=64).kind == NOT_EIGEN
    simple = classify(disk, None, RADIAL_MODE + 0.01, 0.05, n_nodes=64)
    assert simple.kind == SIMPLE
    assert simple.eigenvalue == pytest.approx(RADIAL_MODE, abs=1e-7)
    double = classify(disk, None, FIRST_PAIR, 0.05, n_nodes=64)
    assert (double.kind, double.multiplicity) == (MULTIPLE, 2)


def test_classification_near_the_tolerance_edge(disk):
    # λ_k sits 0.045 below the target, inside δ=0.05 but close to its edge
    state = classify(disk, None, RADIAL_MODE + 0.045, 0.05, n_nodes=64)
    assert state.kind == SIMPLE
    assert classify(disk, None, RADIAL_MODE + 0.055, 0.05, n_nodes=64).kind == NOT_EIGEN


def test_bump_keeps_the_frozen_arc(disk):
    plan = DodgePlan(target=RADIAL_MODE + 0.01)
    pair = classify(disk, None, plan.target, plan.delta, n_nodes=64).pair
    bump = plan_simple(pair, plan)
    s = pair.quad.s
    frozen = (s >= 0.0) & (s <= 0.5 * np.pi)
    np.testing.assert_array_equal(bump.displacement(s, pair.quad.points)[frozen], 0.0)
    assert bump.c1_norm(disk) == pytest.approx(1.0)
    # target above λ_k: push λ_k down
    assert eigenvalue_derivative(pair, bump).lambda_dot < 0


def test_null_indicator_fails_to_plan(disk):
    plan = DodgePlan(target=RADIAL_MODE)
    pair = classify(disk, None, plan.target, plan.delta, n_nodes=64).pair
    with pytest.raises(PlanFailure):
        plan_simple(pair, plan, indicator=np.full(pair.quad.n, 1e-12))


def test_regular_target_needs_no_deformation(disk):
    result = dodge(disk, None, DodgePlan(target=10.0), n_nodes=64)
    assert result.steps == 0
    assert result.history == [NOT_EIGEN]
    assert result.curve is disk
    assert result.final_distance >= 0.05
    payload = result.to_dict()
    assert payload["certificate"]["lambda_min"] == pytest.approx(9.75)


def test_budget_is_enforced(disk):
    with pytest.raises(IterationBudgetExceeded):
        dodge(disk, None, DodgePlan(target=RADIAL_MODE, max_iter=0), n_nodes=64)


def test_potential_must_stay_clear(disk):
    wide = gaussian_bump(width=0.5, half_extent=0.9, cells=16)
    with pytest.raises(InputError):
        dodge(disk, wide, DodgePlan(target=10.0), n_nodes=64)


def test_result_serialisation(disk):
    payload = DodgeResult(curve=disk).to_dict()
    assert payload["final_distance"] is None and payload["steps"] == 0


@pytest.mark.slow
def test_dodge_radial_mode_end_to_end(disk, bump):
    # the bump lifts the radial mode; aim at wherever it went
    ((shifted, _),) = scan(disk, bump, 14.7, 16.5, steps=37, n_nodes=64).eigenvalues
    plan = DodgePlan(target=shifted)
    first = dodge(disk, bump, plan, n_nodes=64)
    assert first.final_distance >= plan.delta
    assert first.steps >= 1
    s = nodes(256)
    frozen = s[s <= 0.5 * np.pi]
    np.testing.assert_array_equal(first.curve.points(frozen), disk.points(frozen))
    assert bump.support_clearance(first.curve) >= plan.v_margin
    second = dodge(disk, bump, plan, n_nodes=64)
    assert second.trajectory == first.trajectory


@pytest.mark.slow
def test_dodge_splits_a_double_eigenvalue(disk):
    plan = DodgePlan(target=FIRST_PAIR, seed=7)
    result = dodge(disk, None, plan, n_nodes=64)
    assert result.history[0] == MULTIPLE
    assert result.final_distance >= plan.delta


def test_dilation_never_splits_the_pair(disk):
    # radially symmetric deformation: the pair only moves, to (j′₁,₁)²/1.02²
    moved = deform(disk, DeformationField.dilation(disk), 0.02)
    expected = FIRST_PAIR / 1.02**2
    ((value, mult),) = scan(moved, None, expected - 0.05, expected + 0.05, steps=21, n_nodes=64).eigenvalues
    assert mult == 2
    assert value == pytest.approx(expected, abs=1e-7)


def test_vanishing_draws_cannot_split(disk):
    plan = DodgePlan(target=FIRST_PAIR, coeff_bound=1e-12, split_retries=2, step_schedule=(0.02,))
    with pytest.raises(SplitFailure):
        split_multiple(disk, None, FIRST_PAIR, plan, n_nodes=64)


@pytest.mark.slow
def test_seeded_draw_splits_the_first_pair(disk):
    plan = DodgePlan(target=FIRST_PAIR, seed=7)
    moved = split_multiple(disk, None, FIRST_PAIR, plan, n_nodes=64)
    report = scan(moved, None, FIRST_PAIR - 0.3, FIRST_PAIR + 0.3, steps=240, n_nodes=64, eps_eig=1e-3)
    values = [value for value, mult in report.eigenvalues if mult == 1]
    assert len(values) >= 2
    assert np.min(np.diff(values)) > 1e-3
    s = nodes(256)
    frozen = s[s <= 0.5 * np.pi]
    np.testing.assert_array_equal(moved.points(frozen), disk.points(frozen))
