"""Damped pressure curves: bracketing, monotonicity, the limit, and the
crossing strength."""

import math

import numpy as np
import pytest

from thermopress.errors import InvariantViolation
from thermopress.ergopt import pressure_on_set, undamped_set
from thermopress.instances import (
    full2_instance,
    golden_mean_instance,
    two_loops_path_instance,
)
from thermopress.pressure import pressure_transfer
from thermopress.sft import EdgePotential, TransitionGraph, full_shift
from thermopress.thermo import (
    ThermoCurve,
    default_schedule,
    find_gap_beta,
    measure_convergence,
    thermo_curve,
    verify_limit,
)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def _random_damped_instance(rng, n, zero_frac=0.5):
    A = np.zeros((n, n), dtype=bool)
    perm = rng.permutation(n)
    for k in range(n):
        A[perm[k], perm[(k + 1) % n]] = True
    A |= rng.random((n, n)) < 0.4
    g = TransitionGraph(A)
    avals = {}
    for e in g.edges():
        avals[e] = 0.0 if rng.random() < zero_frac else float(rng.uniform(0.1, 1.5))
    pvals = {e: float(rng.uniform(-1, 1)) for e in g.edges()}
    return g, EdgePotential.from_edges(g, avals), EdgePotential.from_edges(g, pvals)


# ---------------------------------------------------------------------------
# schedule


def test_default_schedule():
    s = default_schedule()
    assert s[0] == 0.0 and s[-1] == 40.0 and len(s) == 81
    assert default_schedule(2.0, 1.0) == (0.0, 1.0, 2.0)
    assert default_schedule(0.0, 0.5) == (0.0,)


def test_default_schedule_rejects_bad_input():
    with pytest.raises(ValueError):
        default_schedule(10.0, 0.0)
    with pytest.raises(ValueError):
        default_schedule(-1.0, 0.5)
    with pytest.raises(ValueError):
        default_schedule(1.0, 0.3)  # not a multiple


# ---------------------------------------------------------------------------
# the curve on the two-symbol instance: every number has a closed form or
# an independent eigenvalue oracle


def test_full2_curve_endpoints_and_limit():
    g, a, phi = full2_instance()
    curve = thermo_curve(g, a, phi, default_schedule(30.0, 0.5))
    # undamped start: topological entropy of the full 2-shift
    assert curve.values[0] == pytest.approx(math.log(2.0), rel=1e-13)
    assert curve.pressure_phi == pytest.approx(math.log(2.0), rel=1e-13)
    # the only undamped cycle is the 1 -> 1 loop, so the target is 0
    assert curve.limit_target == 0.0
    assert curve.a0 == 0.0
    # machine-precision convergence by beta = 30
    assert abs(curve.values[-1] - curve.limit_target) <= 1e-6
    ok, diag = verify_limit(curve)
    assert ok, diag
    assert diag["failed_check"] is None


def test_full2_point_matches_eigenvalue_oracle():
    g, a, phi = full2_instance()
    curve = thermo_curve(g, a, phi, (0.0, 2.0))
    e = math.exp(-2.0)
    L = np.array([[e, e], [e, 1.0]])
    want = float(np.log(max(abs(np.linalg.eigvals(L)))))
    assert curve.values[-1] == pytest.approx(want, rel=1e-12)
    assert curve.values[-1] == pytest.approx(0.0204763278, abs=1e-9)


def test_curve_values_bracketed_and_monotone_random():
    rng = np.random.default_rng(21)
    betas = default_schedule(6.0, 0.5)
    for _ in range(30):
        n = int(rng.integers(2, 6))
        g, a, phi = _random_damped_instance(rng, n)
        curve = thermo_curve(g, a, phi, betas)
        ok, diag = verify_limit(curve)
        # a short schedule may stop short of the limit; everything else
        # must hold unconditionally
        assert ok or diag["failed_check"] == "limit-gap", diag
        assert diag["lower_margin"] >= -1e-9
        assert diag["upper_margin"] >= -1e-9
        assert diag["worst_monotone_step"] <= 1e-9
        assert diag["average_margin"] >= -1e-9


def test_derivative_matches_equilibrium_average():
    # the raw pressure beta -> Pr(phi - beta a) is convex with slope
    # -avg(a, mu_beta), so each secant is pinched between the endpoint
    # slopes
    g, a, phi = golden_mean_instance()
    betas = default_schedule(4.0, 0.25)
    curve = thermo_curve(g, a, phi, betas)
    raw = curve.values - curve.betas * curve.a0
    for k in range(len(curve) - 1):
        secant = (raw[k + 1] - raw[k]) / (curve.betas[k + 1] - curve.betas[k])
        assert -curve.eq_averages[k] - 1e-8 <= secant <= -curve.eq_averages[k + 1] + 1e-8


def test_raw_pressure_convex_in_beta():
    g, a, phi = full2_instance()
    curve = thermo_curve(g, a, phi, default_schedule(10.0, 0.5))
    raw = curve.values - curve.betas * curve.a0
    second = raw[:-2] - 2 * raw[1:-1] + raw[2:]
    assert (second >= -1e-10).all()


def test_two_loops_path_limit():
    # the critical set is the pair of loops, each with potential 0, so the
    # target is 0; the bridge cycle has length 3, making the approach slow
    # (the coupling enters through a cube root), but strictly from above
    g, a, phi = two_loops_path_instance()
    curve = thermo_curve(g, a, phi, default_schedule(40.0, 2.0))
    assert curve.limit_target == pytest.approx(0.0, abs=1e-12)
    assert (curve.values >= -1e-9).all()
    assert (np.diff(curve.values) <= 1e-9).all()
    assert curve.values[-1] < 1e-3 < curve.values[0]


def test_thermo_curve_rejects_negative_damping():
    g = full_shift(2)
    a = EdgePotential(g, np.array([[0.0, -0.2], [0.0, 0.0]]))
    phi = EdgePotential.constant(g, 0.0)
    with pytest.raises(ValueError, match="nonnegative"):
        thermo_curve(g, a, phi)


def test_thermo_curve_rejects_negative_beta():
    g, a, phi = full2_instance()
    with pytest.raises(ValueError):
        thermo_curve(g, a, phi, (-1.0, 0.0))


def test_curve_csv_shape():
    g, a, phi = full2_instance()
    curve = thermo_curve(g, a, phi, (0.0, 1.0, 2.0))
    lines = curve.to_csv().splitlines()
    assert lines[0] == "beta,pressure_plus_beta_a0,eq_average_a,eq_entropy,limit_target"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[1]) == pytest.approx(math.log(2.0), rel=1e-10)


def test_curve_validation():
    ones = np.ones(3)
    with pytest.raises(ValueError):
        ThermoCurve(np.array([0.0, 1.0, 1.0]), ones, ones, ones, ones,
                    0.0, 1.0, 0.0)  # betas not strictly increasing
    with pytest.raises(ValueError):
        ThermoCurve(np.array([0.0, 1.0]), ones, ones, ones, ones,
                    0.0, 1.0, 0.0)  # length mismatch
    with pytest.raises(ValueError):
        ThermoCurve(np.array([]), np.array([]), np.array([]), np.array([]),
                    np.array([]), 0.0, 1.0, 0.0)  # empty


# ---------------------------------------------------------------------------
# verify_limit failure reporting


def _doctored(curve, **overrides):
    fields = {
        "betas": curve.betas,
        "values": curve.values,
        "eq_averages": curve.eq_averages,
        "eq_entropies": curve.eq_entropies,
        "eq_phi_averages": curve.eq_phi_averages,
        "limit_target": curve.limit_target,
        "pressure_phi": curve.pressure_phi,
        "a0": curve.a0,
    }
    fields.update(overrides)
    return ThermoCurve(**fields)


def test_verify_limit_flags_monotone_breach():
    g, a, phi = full2_instance()
    curve = thermo_curve(g, a, phi, (0.0, 1.0, 2.0))
    vals = curve.values.copy()
    vals[2] = vals[1] + 0.1
    bad = _doctored(curve, values=vals)
    ok, diag = verify_limit(bad)
    assert not ok
    assert diag["failed_check"] in ("monotone", "upper-bracket")
    assert "detail" in diag


def test_verify_limit_flags_lower_bracket_breach():
    g, a, phi = full2_instance()
    curve = thermo_curve(g, a, phi, (0.0, 1.0, 2.0))
    bad = _doctored(curve, limit_target=float(curve.values[-1]) + 1.0)
    ok, diag = verify_limit(bad)
    assert not ok
    assert diag["failed_check"] == "lower-bracket"


def test_verify_limit_flags_average_floor_breach():
    g, a, phi = full2_instance()
    curve = thermo_curve(g, a, phi, (0.0, 1.0, 2.0))
    avgs = curve.eq_averages.copy()
    avgs[0] = curve.a0 - 1.0
    ok, diag = verify_limit(_doctored(curve, eq_averages=avgs))
    assert not ok
    assert diag["failed_check"] == "average-floor"


def test_verify_limit_reports_limit_gap():
    g, a, phi = full2_instance()
    curve = thermo_curve(g, a, phi, (0.0, 1.0, 2.0))  # far from the limit
    ok, diag = verify_limit(curve)
    assert not ok
    assert diag["failed_check"] == "limit-gap"
    assert diag["final_gap"] > 1e-6


# ---------------------------------------------------------------------------
# equilibrium statistics


def test_measure_convergence_full2():
    g, a, phi = full2_instance()
    curve = thermo_curve(g, a, phi, default_schedule(30.0, 0.5))
    rep = measure_convergence(curve)
    assert rep["averages_converged"]
    assert rep["final_average_gap"] <= 1e-6
    assert rep["beta_max"] == 30.0
    assert rep["variational_margin_min"] >= -1e-9 * 31.0
    assert len(rep["eq_entropies"]) == len(curve)
    # entropy drains out of the equilibrium states as damping stiffens
    assert rep["eq_entropies"][-1] <= rep["eq_entropies"][0]


def test_measure_convergence_rejects_impossible_entropy():
    g, a, phi = full2_instance()
    curve = thermo_curve(g, a, phi, (0.0, 1.0))
    bad = _doctored(
        curve,
        eq_entropies=np.zeros(2),
        eq_phi_averages=curve.eq_phi_averages - 1.0,
    )
    with pytest.raises(InvariantViolation):
        measure_convergence(bad)


# ---------------------------------------------------------------------------
# crossing strength


def test_find_gap_beta_requires_negative_target():
    # the undamped loop has potential 0, so no strength ever drives the
    # pressure negative
    g, a, phi = full2_instance()
    with pytest.raises(ValueError, match="nonnegative"):
        find_gap_beta(g, a, phi)


def test_find_gap_beta_bisection():
    g, a, _ = golden_mean_instance()
    phi = EdgePotential.constant(g, -0.1)
    beta = find_gap_beta(g, a, phi, beta_max=80.0)
    assert beta is not None and 0.0 < beta < 80.0
    raw = pressure_transfer(g, phi - beta * a).value
    assert raw < 0.0
    # the pressure is nonincreasing in the strength, so two tolerance
    # widths below the crossing it must still be nonnegative
    before = pressure_transfer(g, phi - (beta - 2e-6) * a).value
    assert before >= 0.0


def test_find_gap_beta_already_negative():
    g, a, _ = golden_mean_instance()
    phi = EdgePotential.constant(g, -1.0)
    assert find_gap_beta(g, a, phi) == 0.0


def test_find_gap_beta_out_of_reach():
    g, a, _ = golden_mean_instance()
    phi = EdgePotential.constant(g, -0.1)
    assert find_gap_beta(g, a, phi, beta_max=0.05) is None
    assert find_gap_beta(g, a, phi, beta_max=0.0) is None


def test_find_gap_beta_validation():
    g, a, _ = golden_mean_instance()
    phi = EdgePotential.constant(g, -0.1)
    neg = EdgePotential(g, np.array([[0.0, -1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        find_gap_beta(g, neg, phi)
    with pytest.raises(ValueError):
        find_gap_beta(g, a, phi, beta_max=-1.0)


# ---------------------------------------------------------------------------
# determinism across thread counts


def test_curve_identical_across_thread_counts(monkeypatch):
    g, a, phi = full2_instance()
    betas = default_schedule(8.0, 0.5)
    monkeypatch.setenv("THERMOPRESS_THREADS", "1")
    seq = thermo_curve(g, a, phi, betas)
    monkeypatch.setenv("THERMOPRESS_THREADS", "4")
    par = thermo_curve(g, a, phi, betas)
    assert np.array_equal(seq.values, par.values)
    assert np.array_equal(seq.eq_averages, par.eq_averages)
    assert np.array_equal(seq.eq_entropies, par.eq_entropies)
