"""Symbolic dynamics for the hyperbolic torus automorphism [[2,1],[1,1]].

In the expanding/contracting eigencoordinates

    U = g*x + y,   S = x - g*y,        g = (1 + sqrt 5)/2,

the map acts by (U, S) -> (g^2 U, S / g^2) and the integer lattice becomes
the lattice spanned by (g, 1) and (1, -g).  Three half-open rectangles

    C0 = [0, 1) x [0, g),   C1 = [1, g) x [0, g),   C2 = [g, g+1) x [0, 1)

tile the plane under that lattice and form a Markov partition; the induced
subshift has transition matrix [[1,1,1],[1,1,0],[1,1,1]], whose Perron
root g^2 recovers the expansion rate.  Membership is decided in floating
point away from rectangle boundaries and in exact Q(sqrt 5) arithmetic
within 1e-9 of them, so codings of rational points are reproducible.

Refining to words of a fixed length expresses damping supported off a
neighborhood of a periodic orbit, and orbit_damping_report runs the full
pressure-decay computation for one orbit.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import InvariantViolation
from .ergopt import minimize, pressure_on_set
from .pressure import pressure_transfer
from .sft import CyclicWord, EdgePotential, TransitionGraph
from .thermo import default_schedule, find_gap_beta, thermo_curve, verify_limit

_SQRT5 = math.sqrt(5.0)
BOUNDARY_MARGIN = 1e-9


class Qs5:
    """Exact element p + q*sqrt(5) of the quadratic field, p and q rational.

    Comparisons are exact: when p and q disagree in sign the order is
    decided by comparing p^2 against 5 q^2.
    """

    __slots__ = ("p", "q")

    def __init__(self, p=0, q=0):
        self.p = Fraction(p)
        self.q = Fraction(q)

    def __add__(self, other):
        other = _coerce(other)
        return Qs5(self.p + other.p, self.q + other.q)

    def __sub__(self, other):
        other = _coerce(other)
        return Qs5(self.p - other.p, self.q - other.q)

    def __mul__(self, other):
        other = _coerce(other)
        return Qs5(self.p * other.p + 5 * self.q * other.q,
                   self.p * other.q + self.q * other.p)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return Qs5(-self.p, -self.q)

    def sign(self):
        if self.q == 0:
            return (self.p > 0) - (self.p < 0)
        if self.p == 0:
            return (self.q > 0) - (self.q < 0)
        if self.p > 0 and self.q > 0:
            return 1
        if self.p < 0 and self.q < 0:
            return -1
        pp, qq = self.p * self.p, 5 * self.q * self.q
        if self.p > 0:  # q < 0
            return 1 if pp > qq else -1
        return -1 if pp > qq else 1

    def __lt__(self, other):
        return (self - _coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - _coerce(other)).sign() <= 0

    def __eq__(self, other):
        d = self - _coerce(other)
        return d.p == 0 and d.q == 0

    def __hash__(self):
        return hash((self.p, self.q))

    def __float__(self):
        return float(self.p) + float(self.q) * _SQRT5

    def __repr__(self):
        return f"Qs5({self.p}, {self.q})"


def _coerce(v):
    if isinstance(v, Qs5):
        return v
    return Qs5(v)


GOLDEN = Qs5(Fraction(1, 2), Fraction(1, 2))

# rectangle bounds (u_lo, u_hi, s_lo, s_hi), half-open on the high side
_CELLS = (
    (Qs5(0), Qs5(1), Qs5(0), GOLDEN),
    (Qs5(1), GOLDEN, Qs5(0), GOLDEN),
    (GOLDEN, GOLDEN + 1, Qs5(0), Qs5(1)),
)
_CELLS_F = tuple(tuple(float(b) for b in cell) for cell in _CELLS)

# coding transition matrix of the partition
PARTITION_MATRIX = ((1, 1, 1), (1, 1, 0), (1, 1, 1))


class ToralMap:
    """Integer 2x2 torus automorphism, kept hyperbolic with |det| = 1 so
    orbits of rational points can be iterated exactly."""

    def __init__(self, matrix=((2, 1), (1, 1))):
        m = tuple(tuple(int(v) for v in row) for row in matrix)
        if len(m) != 2 or any(len(r) != 2 for r in m):
            raise ValueError("matrix must be 2x2")
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        if det not in (-1, 1):
            raise ValueError(f"determinant must be +-1, got {det}")
        if abs(m[0][0] + m[1][1]) <= 2:
            raise ValueError("matrix is not hyperbolic")
        self.matrix = m

    @property
    def lyapunov(self) -> float:
        """Log of the expanding eigenvalue, in nats per step."""
        tr = self.matrix[0][0] + self.matrix[1][1]
        disc = math.sqrt(tr * tr - 4 * (self.matrix[0][0] * self.matrix[1][1]
                                        - self.matrix[0][1] * self.matrix[1][0]))
        return math.log((abs(tr) + disc) / 2.0)

    def apply(self, point):
        x, y = Fraction(point[0]), Fraction(point[1])
        (a, b), (c, d) = self.matrix
        return ((a * x + b * y) % 1, (c * x + d * y) % 1)

    def __repr__(self):
        return f"ToralMap({self.matrix})"


def _reduction_candidates(uf, sf):
    """Integer lattice-coordinate window certain to contain the translate
    mapping (U, S) into the fundamental domain."""
    denom = _SQRT5 + 2.0  # g + 2 = |det| of the coordinate change
    g = float(GOLDEN)
    alpha = (g * uf + sf) / denom
    beta = (uf - g * sf) / denom
    ma, mb = math.floor(alpha), math.floor(beta)
    return [(m, n)
            for m in range(ma - 2, ma + 3)
            for n in range(mb - 2, mb + 3)]


def _classify_float(uf, sf):
    """Cell index via floats, or None when any candidate is within
    BOUNDARY_MARGIN of a rectangle edge."""
    g = float(GOLDEN)
    hit = None
    for m, n in _reduction_candidates(uf, sf):
        u = uf - m * g - n
        s = sf - m + n * g
        for c, (ulo, uhi, slo, shi) in enumerate(_CELLS_F):
            gaps = (u - ulo, uhi - u, s - slo, shi - s)
            if min(gaps) > BOUNDARY_MARGIN:
                if hit is not None:
                    return None  # double cover can only mean float trouble
                hit = c
            elif min(abs(v) for v in gaps) <= BOUNDARY_MARGIN \
                    and max(u - ulo, uhi - u) > -BOUNDARY_MARGIN \
                    and max(s - slo, shi - s) > -BOUNDARY_MARGIN:
                return None  # near an edge: decide exactly
    return hit


def _classify_exact(x, y):
    """Cell index of (x, y) by exact arithmetic; verifies the translate
    into the fundamental domain is unique."""
    U = GOLDEN * x + Qs5(y)
    S = Qs5(x) - GOLDEN * y
    hits = []
    for m, n in _reduction_candidates(float(U), float(S)):
        u = U - GOLDEN * m - Qs5(n)
        s = S - Qs5(m) + GOLDEN * n
        for c, (ulo, uhi, slo, shi) in enumerate(_CELLS):
            if ulo <= u and u < uhi and slo <= s and s < shi:
                hits.append((c, m, n))
    if len(hits) != 1:
        raise InvariantViolation(
            f"point ({x}, {y}) hit {len(hits)} rectangles; tiling broken"
        )
    return hits[0][0]


class SymbolicRefinement:
    """Subshift on words of length order+1 of the partition coding,
    conjugate to the original system; states are the sorted admissible
    words, edges are overlaps."""

    def __init__(self, base, order, words, graph):
        self.base = base
        self.order = int(order)
        self.words = tuple(tuple(w) for w in words)
        self.graph = graph
        self._index = {w: i for i, w in enumerate(self.words)}

    @property
    def n_states(self):
        return len(self.words)

    def state_of_word(self, word):
        return self._index[tuple(word)]

    def word_of_state(self, state):
        return self.words[state]

    def encode_point(self, point):
        """State whose word is the itinerary of the point over
        order+1 steps."""
        return self.state_of_word(self.base.code(point, self.order + 1))

    def __repr__(self):
        return f"SymbolicRefinement(order={self.order}, states={self.n_states})"


class MarkovCoding:
    """Coding of a point by which partition rectangle each iterate visits."""

    def __init__(self, torus_map=None):
        self.torus_map = torus_map or ToralMap()
        B = np.array(PARTITION_MATRIX, dtype=bool)
        self.graph = TransitionGraph(B)
        self._refinements = {}

    def cell_map(self, point) -> int:
        """Rectangle index of a torus point, boundary-exact for rational
        coordinates (floats are rationals too, so any input is decidable)."""
        x, y = Fraction(point[0]), Fraction(point[1])
        g = float(GOLDEN)
        fast = _classify_float(g * float(x) + float(y),
                               float(x) - g * float(y))
        if fast is not None:
            return fast
        return _classify_exact(x, y)

    def code(self, point, length: int) -> tuple:
        if length < 1:
            raise ValueError("length must be >= 1")
        x, y = Fraction(point[0]) % 1, Fraction(point[1]) % 1
        out = []
        for _ in range(length):
            out.append(self.cell_map((x, y)))
            x, y = self.torus_map.apply((x, y))
        return tuple(out)

    def refine(self, order: int) -> SymbolicRefinement:
        """Recode on words of length order+1; order 0 is the coding itself.
        Results are cached per coding instance."""
        if order < 0:
            raise ValueError("order must be >= 0")
        if order not in self._refinements:
            B = np.array(PARTITION_MATRIX, dtype=bool)
            words = [(s,) for s in range(3)]
            for _ in range(order):
                words = [w + (t,) for w in words for t in range(3)
                         if B[w[-1], t]]
            words.sort()
            index = {w: i for i, w in enumerate(words)}
            n = len(words)
            allowed = np.zeros((n, n), dtype=bool)
            for i, w in enumerate(words):
                for t in range(3):
                    if B[w[-1], t]:
                        allowed[i, index[w[1:] + (t,)]] = True
            graph = TransitionGraph(allowed)
            self._refinements[order] = SymbolicRefinement(
                self, order, words, graph
            )
        return self._refinements[order]


def build_cat_map():
    """The standard [[2,1],[1,1]] torus automorphism with its coding.
    Returns (ToralMap, MarkovCoding)."""
    coding = MarkovCoding()
    return coding.torus_map, coding


def periodic_itinerary(coding: MarkovCoding, point, limit: int = 1024):
    """Itinerary of a periodic point over one period, as a CyclicWord on
    the coding graph; ValueError if the point does not return within
    `limit` steps."""
    start = (Fraction(point[0]) % 1, Fraction(point[1]) % 1)
    seq = []
    p = start
    for _ in range(limit):
        seq.append(coding.cell_map(p))
        p = coding.torus_map.apply(p)
        if p == start:
            return CyclicWord(coding.graph, tuple(seq))
    raise ValueError(f"point {point} did not return within {limit} steps")


def refinement_for_scale(epsilon: float) -> int:
    """Word length exponent making cylinder diameter 2^-order at most
    epsilon.  The symbolic metric never exceeds 1, so scales above 1 are
    meaningless and rejected; scale exactly 1 needs no refinement."""
    if not epsilon > 0:
        raise ValueError("scale must be positive")
    if epsilon > 1:
        raise ValueError("scale exceeds the symbolic diameter 1")
    return max(0, math.ceil(-math.log2(epsilon) - 1e-12))


def damping_from_orbit(coding: MarkovCoding, orbit, epsilon: float,
                       strength: float = 1.0) -> EdgePotential:
    """Damping that vanishes exactly on the symbolic epsilon-neighborhood
    of a periodic orbit and equals `strength` elsewhere.

    The coding is refined so cylinders are no wider than epsilon; an edge
    of the refined graph costs 0 when the first `order` symbols of its
    source word match some cyclic window of the orbit (those cylinders
    meet the neighborhood), else `strength`.  The returned potential lives
    on coding.refine(order).graph.  At order 0 every cylinder meets the
    neighborhood and the weight is identically zero.
    """
    if strength < 0:
        raise ValueError("strength must be nonnegative")
    if isinstance(orbit, CyclicWord):
        itinerary = orbit.states
    else:
        itinerary = tuple(int(s) for s in orbit)
    CyclicWord(coding.graph, itinerary)  # admissibility check
    order = refinement_for_scale(epsilon)
    ref = coding.refine(order)
    p = len(itinerary)
    windows = {tuple(itinerary[(t + i) % p] for i in range(order))
               for t in range(p)}
    zero_source = np.array([w[:order] in windows for w in ref.words])
    graph = ref.graph
    vals = np.where(zero_source[:, None] & graph.allowed, 0.0, strength)
    vals = np.where(graph.allowed, vals, 0.0)
    return EdgePotential(graph, vals)


def half_expansion_rate(torus_map: ToralMap) -> float:
    """Half the log unstable expansion factor per step."""
    return 0.5 * torus_map.lyapunov


def expansion_potential(refinement: SymbolicRefinement) -> EdgePotential:
    """Constant potential: half the log of the backward unstable Jacobian,
    which is minus half the expansion rate.  Its pressure controls energy
    decay rates for the damped flow, and it must be negative."""
    rate = half_expansion_rate(refinement.base.torus_map)
    if not -rate < 0:
        raise InvariantViolation("expansion potential must be negative")
    return EdgePotential.constant(refinement.graph, -rate)


def orbit_pressure_bound(torus_map: ToralMap, orbit: CyclicWord) -> float:
    """Pressure of the expansion potential restricted to one periodic
    orbit: zero entropy plus the constant potential value, so minus half
    the expansion rate, whatever the orbit."""
    phi = EdgePotential.constant(orbit.graph, -half_expansion_rate(torus_map))
    value = pressure_on_set(orbit.graph, phi, sorted(set(orbit.edges())))
    expected = -half_expansion_rate(torus_map)
    if abs(value - expected) > 1e-12 or not value < 0:
        raise InvariantViolation(
            f"orbit pressure {value!r} should be {expected!r} < 0"
        )
    return value


def _lift_orbit_edges(ref: SymbolicRefinement, itinerary) -> tuple:
    """Edges of the orbit in the refined graph: consecutive windows."""
    p = len(itinerary)
    k = ref.order

    def window(t):
        return tuple(itinerary[(t + i) % p] for i in range(k + 1))

    states = [ref.state_of_word(window(t)) for t in range(p)]
    edges = {(states[t], states[(t + 1) % p]) for t in range(p)}
    return tuple(sorted(edges))


def orbit_damping_report(epsilon: float, strength: float = 1.0,
                         point=(0, 0), beta_max: float = 40.0,
                         beta_step: float = 0.5) -> dict:
    """End-to-end pressure-decay computation for damping supported off the
    epsilon-neighborhood of one periodic orbit of the cat map.

    Builds the refinement matching epsilon, the orbit-window damping, and
    the expansion potential, then checks whether the critical edge set is
    exactly the orbit.  If it is (epsilon below the isolation threshold),
    runs the damped pressure curve, audits it, and bisects for the
    strength where the pressure turns negative.  Otherwise reports the
    above-threshold regime, which is a finding, not an error.  All values
    are plain JSON types.
    """
    tmap, coding = build_cat_map()
    order = refinement_for_scale(epsilon)
    ref = coding.refine(order)
    orbit = periodic_itinerary(coding, point)
    a = damping_from_orbit(coding, orbit, epsilon, strength)
    phi = expansion_potential(ref)
    entropy = pressure_transfer(ref.graph,
                                EdgePotential.constant(ref.graph, 0.0)).value
    result = minimize(ref.graph, a, phi)
    orbit_edges = _lift_orbit_edges(ref, orbit.states)
    isolated = result.critical_edges == orbit_edges
    report = {
        "lyapunov": tmap.lyapunov,
        "entropy": entropy,
        "epsilon": float(epsilon),
        "refinement_order": order,
        "symbolic_scale": 2.0 ** (-order),
        "n_states": ref.n_states,
        "orbit_period": len(orbit),
        "orbit_itinerary": list(orbit.states),
        "strength": float(strength),
        "min_average": result.value,
        "undamped_edges": [list(e) for e in result.critical_edges],
        "pressure_on_undamped": result.restricted_pressure,
        "pressure_undamped": pressure_transfer(ref.graph, phi).value,
        "undamped_set_is_orbit": bool(isolated),
    }
    if not isolated:
        # neighborhood admits cycles besides the orbit; the restricted
        # pressure need not be negative and no decay threshold is claimed
        report["regime"] = "above-threshold"
        report["beta_star"] = None
        report["pressure_at_beta_star"] = None
        report["final_pressure"] = None
        report["decays"] = False
        return report
    curve = thermo_curve(ref.graph, a, phi,
                         default_schedule(beta_max, beta_step))
    ok, diag = verify_limit(curve, tol=1e-6)
    # a short schedule may stop before the limit is reached; only the
    # bracketing and monotonicity checks signal an actual bug
    if not ok and diag["failed_check"] != "limit-gap":
        raise InvariantViolation(f"pressure curve failed audit: {diag}")
    beta_star = find_gap_beta(ref.graph, a, phi, beta_max=beta_max)
    report["regime"] = "below-threshold"
    report["limit_verified"] = bool(ok)
    report["beta_star"] = beta_star
    report["pressure_at_beta_star"] = (
        None if beta_star is None
        else pressure_transfer(ref.graph, phi - beta_star * a).value
    )
    report["final_pressure"] = float(curve.values[-1]
                                     - curve.betas[-1] * curve.a0)
    report["final_beta"] = float(curve.betas[-1])
    report["decays"] = bool(beta_star is not None)
    return report
