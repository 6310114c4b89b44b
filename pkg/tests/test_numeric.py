import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kontact.errors import DegenerateSeeds, InputError, PoleEncountered
from kontact.expr import Chart, parse
from kontact.exterior import VectorField
from kontact.numeric import (
    Profile,
    TDepSystem,
    check_constant,
    evaluate_along,
    fd_validate,
    finite_differences,
    integrate,
    riccati_superposition_check,
    spot_check,
)

LINE = Chart(["x"])
PLANE = Chart(["x", "y"])


def growth_system():
    return TDepSystem([VectorField.parse(LINE, ["x"])], ["b"])


class TestProfiles:
    def test_kinds(self):
        assert Profile.from_json(2)(5.0) == 2.0
        assert Profile.from_json({"polynomial": [1, 0, 3]})(2.0) == 13.0
        tab = Profile.from_json({"table": {"t": [0, 1], "v": [0, 2]}})
        assert tab(0.25) == pytest.approx(0.5)
        sin = Profile.from_json({"sin": {"amplitude": 2, "frequency": 3, "t_span": [0, 1], "samples": 20001}})
        assert sin(0.5) == pytest.approx(2 * math.sin(1.5), abs=1e-6)

    def test_bad_profiles(self):
        with pytest.raises(InputError):
            Profile.from_json("fast")
        with pytest.raises(InputError):
            Profile.table([0, 0], [1, 2])
        with pytest.raises(InputError):
            Profile.from_json({"table": {"t": [0, 1], "v": [0, 1]}})(2.0)


class TestIntegrate:
    def test_exponential_growth(self):
        traj = integrate(growth_system(), {"b": Profile.constant(1.0)}, [1.0], (0.0, 1.0), 1e-3)
        assert traj.states[-1, 0] == pytest.approx(math.e, rel=1e-12)
        assert traj.integrals["b"][-1] == pytest.approx(1.0)

    def test_step_is_shrunk_to_divide_span(self):
        traj = integrate(growth_system(), {"b": Profile.constant(0.0)}, [1.0], (0.0, 1.0), 0.3)
        assert len(traj.times) == 5 and traj.times[-1] == pytest.approx(1.0)

    def test_running_integral_of_polynomial_is_exact(self):
        traj = integrate(growth_system(), {"b": Profile.polynomial([0, 0, 1])}, [1.0], (0.0, 1.0), 0.1)
        assert np.allclose(traj.integrals["b"], traj.times ** 3 / 3, atol=1e-14)

    def test_batch_of_initial_conditions(self):
        x0 = np.array([[1.0], [2.0], [-1.0]])
        traj = integrate(growth_system(), {"b": Profile.constant(1.0)}, x0, (0.0, 1.0), 1e-2)
        assert traj.states.shape == (101, 3, 1)
        assert np.allclose(traj.states[-1, :, 0], x0[:, 0] * math.e, rtol=1e-9)

    def test_blow_up_is_reported(self):
        system = TDepSystem([VectorField.parse(LINE, ["x^2"])], ["b"])
        with pytest.raises(PoleEncountered):
            integrate(system, {"b": Profile.constant(1.0)}, [1.0], (0.0, 2.0), 1e-2)

    def test_pole_in_field_is_reported(self):
        system = TDepSystem([VectorField.parse(LINE, ["1/x"])], ["b"])
        with pytest.raises(PoleEncountered):
            integrate(system, {"b": Profile.constant(1.0)}, [0.0], (0.0, 1.0), 1e-3)

    def test_missing_profile(self):
        with pytest.raises(InputError):
            integrate(growth_system(), {}, [1.0], (0.0, 1.0), 0.1)


class TestConstants:
    def test_rotation_preserves_radius(self):
        system = TDepSystem([VectorField.parse(PLANE, ["-y", "x"])], ["w"])
        traj = integrate(system, {"w": Profile.polynomial([1, 2])}, [1.0, 0.0], (0.0, 1.0), 1e-3)
        rep = check_constant(traj, parse("x^2 + y^2", PLANE))
        assert rep.ok and rep.max_drift < 1e-9
        assert not check_constant(traj, parse("x", PLANE)).ok

    def test_quantity_with_time_and_integral(self):
        # x' = b(t) with x0 = 0 gives x = int b
        system = TDepSystem([VectorField.parse(LINE, ["1"])], ["b"])
        traj = integrate(system, {"b": Profile.polynomial([0, 1])}, [0.0], (0.0, 1.0), 1e-2)
        q = parse("x - int_b", LINE, ["int_b"])
        assert check_constant(traj, q, 1e-12).ok
        vals = evaluate_along(traj, parse("x - t^2/2", LINE, ["t"]))
        assert np.max(np.abs(vals)) < 1e-12

    def test_finite_differences(self):
        t = np.linspace(0, 1, 101)
        d3 = finite_differences(t ** 2, 0.01, 3)
        assert np.max(np.abs(d3)) < 1e-6
        assert finite_differences(t ** 3, 0.01, 3) == pytest.approx(6.0, rel=1e-6)


class TestRiccati:
    def test_superposition(self):
        prof = {"b1": Profile.constant(1), "b2": Profile.constant(0), "b3": Profile.constant(1)}
        rep = riccati_superposition_check(prof, [0.0, 0.3, -0.5], 0.5)
        assert rep.ok and rep.max_deviation < 1e-6

    def test_degenerate_seeds(self):
        prof = {"b1": Profile.constant(1), "b2": Profile.constant(0), "b3": Profile.constant(0)}
        with pytest.raises(DegenerateSeeds):
            riccati_superposition_check(prof, [0.0, 0.0, 1.0], 0.5)


class TestDerivatives:
    def test_fd_validate(self):
        e = parse("x^3*y/(1 + x^2)", PLANE)
        rep = fd_validate(e, "x", {"x": 0.7, "y": -1.3})
        assert rep.ok and rep.rel_error < 1e-8

    def test_fd_detects_pole(self):
        with pytest.raises(PoleEncountered):
            fd_validate(parse("1/x", LINE), "x", {"x": 1e-7})

    def test_spot_check(self):
        zero = parse("(x + y)^2 - x^2 - 2*x*y - y^2", PLANE)
        assert spot_check(zero, PLANE) == 0.0
        with pytest.raises(AssertionError):
            spot_check(parse("x", PLANE), PLANE)


rates = st.one_of(st.floats(-2.0, -0.5), st.floats(0.5, 2.0))


@settings(max_examples=200, deadline=None)
@given(rates, st.floats(0.5, 2.0))
def test_rk4_is_fourth_order(c, x0):
    # leading error of x' = c x over [0, 1] is c^5 h^4 x(1) / 120, nonzero for |c| >= 1/2
    exact = x0 * math.exp(c)
    prof = {"b": Profile.constant(c)}
    errs = [abs(integrate(growth_system(), prof, [x0], (0.0, 1.0), h).states[-1, 0] - exact) for h in (0.1, 0.05)]
    assert errs[0] < 1e-3
    assert 14.0 < errs[0] / errs[1] < 18.0
