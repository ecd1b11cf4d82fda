"""Built-in model instances, so experiments and acceptance runs need no
external files.  Each factory returns (graph, a, phi) with a the damping
weight and phi the base potential."""

from __future__ import annotations

import numpy as np

from .catmap import (build_cat_map, damping_from_orbit,
                     expansion_potential, periodic_itinerary)
from .sft import EdgePotential, TransitionGraph, full_shift, golden_mean_shift


def full2_instance():
    """Full 2-shift, damping 1 everywhere except the 1 -> 1 loop."""
    graph = full_shift(2)
    a = EdgePotential(graph, np.array([[1.0, 1.0], [1.0, 0.0]]))
    return graph, a, EdgePotential.constant(graph, 0.0)


def golden_mean_instance():
    """Golden-mean shift, damping on the single edge 0 -> 1."""
    graph = golden_mean_shift()
    a = EdgePotential(graph, np.array([[0.0, 1.0], [0.0, 0.0]]))
    return graph, a, EdgePotential.constant(graph, 0.0)


def two_loops_path_instance():
    """Two undamped loops joined by an undamped path whose return edge is
    damped: the minimizing cycles are the loops, but the connecting path
    is invisible to the damping as well, so the zero set is strictly
    larger than the union of minimizing cycles."""
    allowed = np.zeros((3, 3), dtype=bool)
    vals = np.zeros((3, 3))
    for i, j, w in [(0, 0, 0.0), (0, 1, 0.0), (1, 2, 0.0),
                    (2, 2, 0.0), (2, 0, 0.7)]:
        allowed[i, j] = True
        vals[i, j] = w
    graph = TransitionGraph(allowed)
    a = EdgePotential(graph, vals)
    return graph, a, EdgePotential.constant(graph, 0.0)


def catmap_instance(order: int = 4, strength: float = 1.0):
    """Refined coding of the torus automorphism with damping vanishing on
    the 2^-order neighborhood of the fixed point and the half-expansion
    base potential."""
    if order < 0:
        raise ValueError("order must be >= 0")
    tmap, coding = build_cat_map()
    orbit = periodic_itinerary(coding, (0, 0))
    a = damping_from_orbit(coding, orbit, 2.0 ** (-order), strength)
    ref = coding.refine(order)
    return ref.graph, a, expansion_potential(ref)


BUILTINS = {
    "full2": full2_instance,
    "golden-mean": golden_mean_instance,
    "two-loops-path": two_loops_path_instance,
    "catmap": catmap_instance,
}


def get_builtin(name: str):
    if name not in BUILTINS:
        known = ", ".join(sorted(BUILTINS))
        raise ValueError(f"unknown builtin {name!r} (known: {known})")
    return BUILTINS[name]()
