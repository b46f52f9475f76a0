import math
from fractions import Fraction

import numpy as np
import pytest

from hermlab import control, geometry
from hermlab.control import (
    ControlError,
    ControlProblem,
    G_as_matrix,
    gramian,
    lebeau_robbiano_synthesize,
    min_energy_control,
    observability_lower_bound,
    reference_blowup_exponent,
    resimulate,
)
from hermlab.hermite import basis_state, random_expansion
from hermlab.semigroup import EvolutionSpec
from hermlab.spectral import gram_matrix

STRIPES = geometry.PeriodicPattern(dim=1, period=2.0, kept=0.5)
HEAT = EvolutionSpec(s=1.0, dim=1)


def test_gramian_matches_closed_form():
    Gm = gram_matrix(STRIPES, 8)
    G = np.asarray(Gm.entries)
    lam = HEAT.eigenvalues(8)
    W = gramian(0.5, 8, Gm, HEAT)
    S = lam[:, None] + lam[None, :]
    W_exact = (G @ G) * (1.0 - np.exp(-0.5 * S)) / S
    assert np.linalg.norm(W - W_exact) <= 1e-12 * np.linalg.norm(W_exact)


def test_gramian_needs_positive_duration():
    with pytest.raises(ValueError):
        gramian(0.0, 2, STRIPES, HEAT)


def test_gramian_rejects_unresolvable_sensor():
    # sensor set entirely outside the quadrature-resolved envelope
    far = geometry.interval_union([(50.0, 51.0)])
    with pytest.raises(ControlError):
        gramian(0.5, 4, far, HEAT)


def test_scalar_cost_closed_form():
    # one mode, identity actuator, rate 1: cost = e^{-2} / int_0^1 e^{-2t} dt
    ident = G_as_matrix(np.eye(1), 0, HEAT)
    sig = min_energy_control(basis_state(1, 0, (0,)), 1.0, 0, ident, HEAT)
    expected = math.exp(-2.0) / ((1.0 - math.exp(-2.0)) / 2.0)
    assert sig.duality_cost == pytest.approx(expected, abs=1e-13)
    assert sig.total_cost == pytest.approx(sig.duality_cost, rel=1e-10)
    assert sig.residual <= 1e-12
    assert sig.condition == pytest.approx(1.0)


def test_min_energy_control_on_thick_set(rng):
    g = random_expansion(rng, dim=1, degree=8)
    sig = min_energy_control(g, 0.5, 8, STRIPES, HEAT)
    assert sig.residual <= 1e-8 * g.norm()
    assert sig.total_cost == pytest.approx(sig.duality_cost, rel=1e-8)
    assert len(sig.segments) == 1
    t0, t1 = sig.segments[0].interval
    assert (t0, t1) == (0.0, 0.5)


def test_costlier_to_control_faster(rng):
    g = random_expansion(rng, dim=1, degree=6)
    slow = min_energy_control(g, 1.0, 6, STRIPES, HEAT)
    fast = min_energy_control(g, 0.25, 6, STRIPES, HEAT)
    assert fast.total_cost > slow.total_cost


def test_condition_cap_raises():
    # an actuator that barely sees the second mode pushes the Gramian past
    # the conditioning cap
    weak = G_as_matrix(np.diag([1.0, 3e-7]), 1, HEAT)
    g = basis_state(1, 1, (1,))
    with pytest.raises(ControlError, match="condition"):
        min_energy_control(g, 0.5, 1, weak, HEAT)


def test_problem_validation():
    f0 = basis_state(1, 2, (2,))
    with pytest.raises(ValueError):
        ControlProblem(T=0.0, omega=STRIPES, spec=HEAT, N=4, f0=f0)
    with pytest.raises(ValueError, match="δ < 2s−1 required"):
        ControlProblem(
            T=1.0, omega=STRIPES, spec=EvolutionSpec(s=0.6, dim=1), N=4, f0=f0, delta=0.3
        )
    with pytest.raises(ValueError):
        ControlProblem(T=1.0, omega=STRIPES, spec=HEAT, N=1, f0=f0)


def test_lr_synthesis_steers_to_zero(rng):
    spec = EvolutionSpec(s=0.75, dim=1)
    f0 = random_expansion(rng, dim=1, degree=8)
    problem = ControlProblem(T=2.0, omega=STRIPES, spec=spec, N=8, f0=f0)
    signal, trace = lebeau_robbiano_synthesize(problem)
    assert trace["terminal_residual"] <= 1e-6 * f0.norm()
    assert trace["verified_residual"] <= 1e-6 * f0.norm()
    assert signal.residual == trace["terminal_residual"]


def test_lr_schedule_is_dyadic(rng):
    f0 = random_expansion(rng, dim=1, degree=8)
    problem = ControlProblem(T=2.0, omega=STRIPES, spec=HEAT, N=8, f0=f0)
    _, trace = lebeau_robbiano_synthesize(problem)
    st = trace["stages"]
    levels = [x["level"] for x in st]
    assert levels == [1, 2, 4, 8]
    # window j spans T / 2^{j+1}, starting where the previous one ended
    expected_start = 0.0
    for j, x in enumerate(st):
        width = 2.0 / 2 ** (j + 1)
        assert x["interval"][0] == pytest.approx(expected_start, abs=1e-15)
        assert x["interval"][1] - x["interval"][0] == pytest.approx(width, abs=1e-15)
        expected_start += width
    # dyadic windows plus the free remainder add up to T exactly
    covered = sum(Fraction(1, 2 ** (j + 1)) for j in range(len(st)))
    assert covered <= 1
    assert float(1 - covered) * 2.0 == pytest.approx(2.0 - st[-1]["interval"][1], abs=1e-15)


def test_lr_stage_residuals_vanish(rng):
    f0 = random_expansion(rng, dim=1, degree=8)
    problem = ControlProblem(T=2.0, omega=STRIPES, spec=HEAT, N=8, f0=f0)
    _, trace = lebeau_robbiano_synthesize(problem)
    for stage in trace["stages"]:
        # the controlled block is annihilated to solver accuracy
        assert stage["residual"] <= 1e-8 * f0.norm()
        assert stage["cost"] >= 0.0


def test_lr_costs_more_on_short_horizon(rng):
    f0 = random_expansion(rng, dim=1, degree=6)
    short = ControlProblem(T=0.25, omega=STRIPES, spec=HEAT, N=6, f0=f0)
    unit = ControlProblem(T=1.0, omega=STRIPES, spec=HEAT, N=6, f0=f0)
    _, tr_short = lebeau_robbiano_synthesize(short)
    _, tr_unit = lebeau_robbiano_synthesize(unit)
    assert tr_short["total_cost"] / tr_unit["total_cost"] > 1.0


def test_resimulation_consistency(rng):
    f0 = random_expansion(rng, dim=1, degree=8)
    problem = ControlProblem(T=1.0, omega=STRIPES, spec=HEAT, N=8, f0=f0)
    signal, trace = lebeau_robbiano_synthesize(problem)
    replay = resimulate(problem, signal, oversample=4)
    assert replay <= 1e-6 * f0.norm()
    assert replay == pytest.approx(trace["verified_residual"], abs=1e-9 * f0.norm())


def test_signal_segments_stay_inside_horizon(rng):
    f0 = random_expansion(rng, dim=1, degree=4)
    problem = ControlProblem(T=1.0, omega=STRIPES, spec=HEAT, N=4, f0=f0)
    signal, _ = lebeau_robbiano_synthesize(problem)
    for seg in signal.segments:
        a, b = seg.interval
        assert 0.0 <= a < b <= 1.0 + 1e-12
        assert np.all(seg.times >= a - 1e-12) and np.all(seg.times <= b + 1e-12)
        assert seg.values.shape[1] == seg.times.size


# -- observability ---------------------------------------------------------------


def test_scalar_observability_closed_form():
    ident = G_as_matrix(np.eye(1), 0, HEAT)
    for T in (0.3, 0.7, 1.5):
        rep = observability_lower_bound(T, 0, ident, HEAT)
        expected = 2.0 * math.exp(-2.0 * T) / (1.0 - math.exp(-2.0 * T))
        assert rep.C_T_lower[0] == pytest.approx(expected, rel=1e-12)


def test_observability_grid_monotone_with_blowup_fit():
    Ts = [0.1, 0.2, 0.4, 0.8, 1.6]
    rep = observability_lower_bound(Ts, 8, STRIPES, HEAT)
    assert rep.nonincreasing
    assert rep.fit_kappa is not None and rep.fit_kappa > 0
    assert rep.reference_exponent == pytest.approx(1.0)
    assert len(rep.C_T_lower) == len(Ts)


def test_observability_rejects_nonpositive_horizon():
    with pytest.raises(ValueError):
        observability_lower_bound([0.5, -0.1], 4, STRIPES, HEAT)


def test_reference_exponent_formula():
    assert reference_blowup_exponent(1.0, 0.0) == pytest.approx(1.0)
    assert reference_blowup_exponent(0.75, 0.25) == pytest.approx(1.25 / 0.25)
    with pytest.raises(ValueError, match="δ < 2s−1 required"):
        reference_blowup_exponent(0.6, 0.5)
