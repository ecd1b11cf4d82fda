"""Large-damping limit of the pressure.

For a nonnegative damping weight a and a reference potential phi, the
curve beta -> Pr(phi - beta a) + beta a0, with a0 the minimal average of
a, decreases monotonically from Pr(phi) down to the pressure of phi
restricted to the critical edge set (the subsystem where the damping
average cannot be beaten).  This module computes the curve together with
its equilibrium statistics, verifies the bracketing and monotonicity
properties, and locates the damping strength where the raw pressure
crosses zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._threads import ordered_map
from .errors import InvariantViolation
from .ergopt import min_average, pressure_on_set, undamped_set
from .pressure import equilibrium_state, pressure_transfer
from .sft import EdgePotential, TransitionGraph, _frozen_array, integrate, ks_entropy

SANDWICH_TOL = 1e-9


def default_schedule(beta_max: float = 40.0, step: float = 0.5) -> tuple:
    """Evenly spaced damping strengths 0, step, 2*step, ..., beta_max."""
    if step <= 0 or beta_max < 0:
        raise ValueError("need step > 0 and beta_max >= 0")
    count = int(round(beta_max / step))
    if abs(count * step - beta_max) > 1e-9:
        raise ValueError("beta_max must be a multiple of step")
    return tuple(n * step for n in range(count + 1))


@dataclass(frozen=True)
class ThermoCurve:
    """Pressure curve over a damping schedule, with the equilibrium
    statistics needed to audit it.

    values[k] = Pr(phi - betas[k] * a) + betas[k] * a0, in nats per step;
    limit_target is the restricted pressure the curve decreases toward;
    pressure_phi is the undamped pressure Pr(phi) bounding it above.
    """

    betas: np.ndarray
    values: np.ndarray
    eq_averages: np.ndarray     # damping average under the equilibrium state
    eq_entropies: np.ndarray
    eq_phi_averages: np.ndarray
    limit_target: float
    pressure_phi: float
    a0: float

    def __post_init__(self):
        arrays = {}
        for name in ("betas", "values", "eq_averages", "eq_entropies",
                     "eq_phi_averages"):
            arr = _frozen_array(getattr(self, name), float)
            if arr.ndim != 1 or not np.isfinite(arr).all():
                raise ValueError(f"{name} must be a finite 1-d array")
            arrays[name] = arr
        m = len(arrays["betas"])
        if m == 0:
            raise ValueError("schedule is empty")
        if any(len(v) != m for v in arrays.values()):
            raise ValueError("curve arrays must share one length")
        if (np.diff(arrays["betas"]) <= 0).any():
            raise ValueError("betas must be strictly increasing")
        if arrays["betas"][0] < 0:
            raise ValueError("betas must be nonnegative")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)
        for name in ("limit_target", "pressure_phi", "a0"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)

    def __len__(self):
        return len(self.betas)

    def to_csv(self) -> str:
        """Columns: beta, pressure_plus_beta_a0 (the curve value),
        eq_average_a, eq_entropy, limit_target; 12 significant digits."""
        lines = ["beta,pressure_plus_beta_a0,eq_average_a,eq_entropy,limit_target"]
        for k in range(len(self)):
            lines.append(
                f"{self.betas[k]:.12g},{self.values[k]:.12g},"
                f"{self.eq_averages[k]:.12g},{self.eq_entropies[k]:.12g},"
                f"{self.limit_target:.12g}"
            )
        return "\n".join(lines) + "\n"


def thermo_curve(graph: TransitionGraph, a: EdgePotential,
                 phi: EdgePotential, betas=None) -> ThermoCurve:
    """Compute the damped pressure curve over the schedule (default
    0..40 in steps of 1/2), one equilibrium state per point.

    Points are independent, so they are mapped over a thread pool sized
    by THERMOPRESS_THREADS.
    """
    if a.min() < 0:
        raise ValueError("damping must be nonnegative")
    if betas is None:
        betas = default_schedule()
    betas = [float(b) for b in betas]
    if any(b < 0 for b in betas):
        raise ValueError("damping strengths must be nonnegative")
    a0 = min_average(graph, a)
    critical = undamped_set(graph, a)
    limit_target = pressure_on_set(graph, phi, critical)
    pressure_phi = pressure_transfer(graph, phi).value

    def point(beta):
        eq = equilibrium_state(graph, phi - beta * a)
        return (
            eq.log_lambda + beta * a0,
            integrate(a, eq.measure),
            ks_entropy(eq.measure),
            integrate(phi, eq.measure),
        )

    rows = ordered_map(point, betas)
    values, avgs, ents, phis = map(np.array, zip(*rows))
    return ThermoCurve(np.array(betas), values, avgs, ents, phis,
                       limit_target, pressure_phi, a0)


_CHECKS = ("lower-bracket", "upper-bracket", "monotone", "average-floor",
           "limit-gap")


def verify_limit(curve: ThermoCurve, tol: float = 1e-6):
    """Audit the curve.  Checks, in order: every value sits above the
    restricted pressure and below the undamped pressure (1e-9 slack), the
    values never increase (1e-9 slack), equilibrium damping averages never
    drop below the optimal average (1e-9 slack), and the final value is
    within tol of the limit target.

    Returns (ok, diagnostics); diagnostics pins the first failing check
    and always carries the extreme margins.
    """
    lower_margin = float((curve.values - curve.limit_target).min())
    upper_margin = float((curve.pressure_phi - curve.values).min())
    steps = np.diff(curve.values)
    worst_step = float(steps.max()) if len(steps) else 0.0
    avg_margin = float((curve.eq_averages - curve.a0).min())
    final_gap = float(abs(curve.values[-1] - curve.limit_target))
    diag = {
        "failed_check": None,
        "lower_margin": lower_margin,
        "upper_margin": upper_margin,
        "worst_monotone_step": worst_step,
        "average_margin": avg_margin,
        "final_gap": final_gap,
        "tol": tol,
    }

    def fail(name, detail):
        diag["failed_check"] = name
        diag["detail"] = detail
        return False, diag

    if lower_margin < -SANDWICH_TOL:
        k = int(np.argmin(curve.values - curve.limit_target))
        return fail("lower-bracket",
                    f"value {curve.values[k]!r} at beta={curve.betas[k]!r} "
                    f"below target {curve.limit_target!r}")
    if upper_margin < -SANDWICH_TOL:
        k = int(np.argmax(curve.values))
        return fail("upper-bracket",
                    f"value {curve.values[k]!r} at beta={curve.betas[k]!r} "
                    f"above Pr(phi) {curve.pressure_phi!r}")
    if worst_step > SANDWICH_TOL:
        k = int(np.argmax(steps))
        return fail("monotone",
                    f"value rises by {steps[k]!r} between "
                    f"beta={curve.betas[k]!r} and {curve.betas[k + 1]!r}")
    if avg_margin < -SANDWICH_TOL:
        k = int(np.argmin(curve.eq_averages))
        return fail("average-floor",
                    f"equilibrium average {curve.eq_averages[k]!r} at "
                    f"beta={curve.betas[k]!r} below optimum {curve.a0!r}")
    if final_gap > tol:
        return fail("limit-gap",
                    f"final value misses the target by {final_gap!r} > {tol!r}")
    return True, diag


def measure_convergence(curve: ThermoCurve, tol: float = 1e-6) -> dict:
    """Equilibrium-statistics report: how close the damping averages are
    to the optimal average at the end of the schedule, with the entropy
    sequence attached for inspection.

    Also asserts the variational lower bound

        h_KS(mu_beta) + avg(phi, mu_beta) >= values[k]

    at every point (it underlies the curve's bracketing), raising
    InvariantViolation if it is breached beyond 1e-9 * (1 + beta)."""
    margin = (curve.eq_entropies + curve.eq_phi_averages) - curve.values
    slack = SANDWICH_TOL * (1.0 + curve.betas)
    if (margin < -slack).any():
        k = int(np.argmin(margin + slack))
        raise InvariantViolation(
            f"entropy {curve.eq_entropies[k]!r} plus potential average "
            f"{curve.eq_phi_averages[k]!r} falls below the curve value "
            f"{curve.values[k]!r} at beta={curve.betas[k]!r}"
        )
    final_gap = float(abs(curve.eq_averages[-1] - curve.a0))
    return {
        "beta_max": float(curve.betas[-1]),
        "final_average_gap": final_gap,
        "averages_converged": bool(final_gap <= tol),
        "tol": tol,
        "variational_margin_min": float(margin.min()),
        "eq_entropies": [float(h) for h in curve.eq_entropies],
    }


def find_gap_beta(graph: TransitionGraph, a: EdgePotential,
                  phi: EdgePotential, beta_max: float = 80.0,
                  xtol: float = 1e-6):
    """Least damping strength at which the raw pressure Pr(phi - beta a)
    turns negative, located by bisection to within xtol.

    A crossing can exist only when the pressure of phi restricted to the
    critical edge set, the limit of the curve, is itself negative; that
    precondition is checked first and its violation is an error.  Returns
    0.0 if the pressure is already negative at beta = 0, None if still
    nonnegative at beta_max; otherwise the upper bisection endpoint, so
    the returned strength is re-verified to give negative pressure.
    """
    if a.min() < 0:
        raise ValueError("damping must be nonnegative")
    if beta_max < 0:
        raise ValueError("beta_max must be nonnegative")
    target = pressure_on_set(graph, phi, undamped_set(graph, a))
    if target >= 0:
        raise ValueError(
            f"restricted pressure {target!r} is nonnegative: the damped "
            "pressure stays above it for every strength, so no crossing "
            "exists"
        )

    def g(beta):
        return pressure_transfer(graph, phi - beta * a).value

    if g(0.0) < 0:
        return 0.0
    if beta_max == 0 or g(beta_max) >= 0:
        return None
    lo, hi = 0.0, beta_max
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            hi = mid
        else:
            lo = mid
    if not g(hi) < 0:
        raise InvariantViolation("bisection endpoint lost negativity")
    return hi
