import math

import numpy as np
import pytest

from coopmetro.linalg import eigh
from coopmetro.qfi import differentiate_pure_state, qfi_pure
from coopmetro.scenarios import (
    ScenarioSpec,
    analytic_coop_spont_qfi,
    controlled_hamiltonian,
    effective_two_spin_ground_qfi,
    tradeoff_width,
)
from coopmetro.sweep import SweepGrid, find_region, maximize_qfi, scenario_objective, sweep

UNITARY = ScenarioSpec(kind="unitary-baseline", b_z=0.1, n_spins=1)
COOP = ScenarioSpec(kind="coop-spont", b_z=0.1, b_x=0.1, gamma=0.5)


class TestSweepGrid:
    def test_values(self):
        grid = SweepGrid("t", 0.0, 2.0, 9)
        np.testing.assert_allclose(grid.values(), np.linspace(0.0, 2.0, 9))

    def test_validation(self):
        with pytest.raises(ValueError):
            SweepGrid("q", 0.0, 1.0, 5)
        with pytest.raises(ValueError):
            SweepGrid("t", 1.0, 0.0, 5)
        with pytest.raises(ValueError):
            SweepGrid("t", 0.0, 1.0, 1)


class TestSweep:
    def test_unitary_baseline_values(self):
        points = sweep(UNITARY, SweepGrid("t", 0.0, 2.0, 9))
        assert [p.value for p in points] == list(np.linspace(0.0, 2.0, 9))
        for p in points:
            assert p.error is None
            assert p.result.value == pytest.approx(4.0 * p.value**2, rel=1e-8, abs=1e-10)

    def test_matches_analytic_curve(self):
        points = sweep(COOP, SweepGrid("t", 0.1, 5.0, 8))
        for p in points:
            assert p.result.value == pytest.approx(
                analytic_coop_spont_qfi(0.1, 0.1, 0.5, p.value), rel=1e-6
            )

    def test_failed_points_recorded(self):
        # b_z = 0 is invalid for cooperative kinds: recorded, not raised
        points = sweep(COOP, SweepGrid("b_z", -0.1, 0.1, 5), t=0.5)
        by_value = {round(p.value, 6): p for p in points}
        assert by_value[0.0].result is None
        assert "b_z" in by_value[0.0].error
        assert by_value[0.1].result is not None
        assert by_value[-0.1].result is not None

    def test_requires_time_for_field_axes(self):
        with pytest.raises(ValueError):
            sweep(COOP, SweepGrid("b_z", 0.05, 0.2, 3))

    def test_parallel_serial_equivalence(self, monkeypatch):
        grid = SweepGrid("t", 0.1, 2.0, 7)
        serial = sweep(COOP, grid, max_workers=1)
        parallel = sweep(COOP, grid, max_workers=4)
        assert serial == parallel
        monkeypatch.setenv("COOPMETRO_THREADS", "3")
        from_env = sweep(COOP, grid)
        assert from_env == serial

    def test_deterministic(self):
        grid = SweepGrid("t", 0.1, 1.0, 4)
        assert sweep(COOP, grid) == sweep(COOP, grid)

    def test_bad_thread_env(self, monkeypatch):
        monkeypatch.setenv("COOPMETRO_THREADS", "many")
        with pytest.raises(ValueError):
            sweep(COOP, SweepGrid("t", 0.1, 1.0, 3))


class TestFindRegion:
    def test_effective_model_width(self):
        objective = lambda b: effective_two_spin_ground_qfi(b, 0.1)
        region = find_region(objective, 16.0, (0.5, 1.5))
        assert region.resolved
        width = region.upper - region.lower
        assert width == pytest.approx(tradeoff_width(50.0, 1.0), abs=1e-3)

    def test_tight_tolerance(self):
        objective = lambda b: effective_two_spin_ground_qfi(b, 0.1)
        region = find_region(objective, 16.0, (0.5, 1.5), xtol=1e-9)
        assert region.upper - region.lower == pytest.approx(tradeoff_width(50.0, 1.0), abs=1e-8)

    def test_unresolved_above_maximum(self):
        objective = lambda b: effective_two_spin_ground_qfi(b, 0.1)
        region = find_region(objective, 100.0, (0.5, 1.5))
        assert not region.resolved
        assert math.isnan(region.lower) and math.isnan(region.upper)

    def test_region_touching_bracket_edges(self):
        region = find_region(lambda x: 1.0, 0.5, (0.0, 1.0))
        assert region.resolved
        assert region.lower == 0.0 and region.upper == 1.0

    def test_invalid_bracket(self):
        with pytest.raises(ValueError):
            find_region(lambda x: x, 1.0, (1.0, 0.0))
        with pytest.raises(ValueError):
            find_region(lambda x: x, -1.0, (0.0, 1.0))


class TestMaximize:
    def test_effective_model_peak(self):
        argmax, value = maximize_qfi(lambda b: effective_two_spin_ground_qfi(b, 0.1), [(0.0, 2.0)])
        assert argmax == pytest.approx(1.0, abs=1e-4)
        assert value == pytest.approx(50.0, abs=1e-6)

    def test_monotone_decreasing_hits_lower_bound(self):
        # ground-state QFI b_x^2/(b_x^2+b_z^2)^2 decreases in b_z > 0
        def objective(b_z):
            def ground(b):
                return eigh(controlled_hamiltonian(b, 0.1)).vector(0)

            psi0, dpsi = differentiate_pure_state(ground, b_z)
            return qfi_pure(psi0, dpsi).value

        argmax, value = maximize_qfi(objective, [(0.05, 1.0)])
        assert argmax == pytest.approx(0.05, abs=1e-4)
        assert value == pytest.approx(0.01 / (0.01 + 0.05**2) ** 2, rel=1e-5)

    def test_unitary_baseline_hits_upper_bound_exactly(self):
        objective = scenario_objective(UNITARY, 0.0, axis="t")
        argmax, value = maximize_qfi(objective, [(0.0, 2.0)])
        assert argmax == 2.0
        assert value == pytest.approx(16.0, rel=1e-9)

    def test_refinement_soundness(self):
        objective = lambda b: effective_two_spin_ground_qfi(b, 0.1)
        coarse_best = max(objective(x) for x in np.linspace(0.0, 2.0, 33))
        _, value = maximize_qfi(objective, [(0.0, 2.0)])
        assert value >= coarse_best

    def test_two_parameter_maximization(self):
        # peak of the effective ground QFI over (b_z, b_x): b_z = 1 and the
        # smallest allowed control, value 1/(2 b_x^2)
        argmax, value = maximize_qfi(
            lambda bz, bx: effective_two_spin_ground_qfi(bz, bx),
            [(0.5, 1.5), (0.05, 0.3)],
        )
        assert argmax[0] == pytest.approx(1.0, abs=1e-3)
        assert argmax[1] == pytest.approx(0.05, abs=1e-3)
        assert value == pytest.approx(200.0, rel=1e-3)

    def test_bounds_validation(self):
        with pytest.raises(ValueError):
            maximize_qfi(lambda x: x, [(0.0, math.inf)])
        with pytest.raises(ValueError):
            maximize_qfi(lambda x, y, z: 0.0, [(0, 1), (0, 1), (0, 1)])
