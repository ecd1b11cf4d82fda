"""Long-run minimization of an edge weight along admissible trajectories.

The minimum of the time average over all invariant measures equals the
minimum mean weight over cycles, so the core computation is a min mean
cycle (Karp's recurrence, run per strongly connected component).  On top
of that this module extracts

* a witness cycle achieving the minimum,
* the critical edge set: edges lying on minimizing cycles, found through
  shortest-path potentials and tight-edge slack,
* for a nonnegative weight with minimum zero, the uncontrolled edge set:
  edges on bi-infinite trajectories of identically zero weight,
* the pressure of a second potential restricted to such an edge set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InvariantViolation, ZeroMassError
from .pressure import perron
from .sft import CyclicWord, EdgePotential, TransitionGraph

SLACK_TOL = 1e-9


def _edge_arrays(graph, values=None):
    src, dst = np.nonzero(graph.allowed)
    if values is None:
        return src, dst
    return src, dst, values[src, dst]


def _scc_labels(graph):
    n = graph.n_states
    mat = csr_matrix(graph.allowed.astype(np.int8))
    _, labels = connected_components(mat, directed=True, connection="strong")
    return labels


def _cyclic_components(graph, labels):
    """Component ids that contain at least one edge (hence a cycle)."""
    src, dst = _edge_arrays(graph)
    internal = labels[src] == labels[dst]
    return sorted(set(labels[src[internal]].tolist()))


def _karp_min_mean(nodes, src, dst, w):
    """Min mean cycle inside one strongly connected node set.

    d[k][v] = least weight of a walk with exactly k edges from the source
    node to v; the answer is min over v of max over k of
    (d[m][v] - d[k][v]) / (m - k).
    """
    m = len(nodes)
    relabel = {v: i for i, v in enumerate(nodes)}
    s = np.array([relabel[v] for v in src])
    t = np.array([relabel[v] for v in dst])
    d = np.full((m + 1, m), np.inf)
    d[0, 0] = 0.0
    for k in range(1, m + 1):
        row = np.full(m, np.inf)
        reach = np.isfinite(d[k - 1, s])
        if reach.any():
            np.minimum.at(row, t[reach], d[k - 1, s[reach]] + w[reach])
        d[k] = row
    best = np.inf
    for v in range(m):
        if not np.isfinite(d[m, v]):
            continue
        worst = -np.inf
        for k in range(m):
            if np.isfinite(d[k, v]):
                worst = max(worst, (d[m, v] - d[k, v]) / (m - k))
        best = min(best, worst)
    return best


def min_average(graph: TransitionGraph, a: EdgePotential) -> float:
    """Minimum over invariant measures of the average edge weight; equals
    the minimum mean cycle weight, minimized across components."""
    if not a.graph.same_graph(graph):
        raise ValueError("weight lives on a different graph")
    labels = _scc_labels(graph)
    src, dst, w = _edge_arrays(graph, a.values)
    best = np.inf
    for comp in _cyclic_components(graph, labels):
        mask = (labels[src] == comp) & (labels[dst] == comp)
        nodes = sorted(np.nonzero(labels == comp)[0].tolist())
        best = min(best, _karp_min_mean(nodes, src[mask], dst[mask], w[mask]))
    if not np.isfinite(best):
        raise ZeroMassError("graph has no cycles")
    return float(best)


def _potentials(graph, a, a0):
    """Shortest-path potentials for the reduced weight a - a0, by n rounds
    of Bellman-Ford from an implicit super-source."""
    n = graph.n_states
    src, dst, w = _edge_arrays(graph, a.values)
    wr = w - a0
    h = np.zeros(n)
    for _ in range(n):
        cand = np.full(n, np.inf)
        np.minimum.at(cand, dst, h[src] + wr)
        nh = np.minimum(h, cand)
        if np.array_equal(nh, h):
            break
        h = nh
    return h


def _tight_edges(graph, a, a0, slack):
    src, dst, w = _edge_arrays(graph, a.values)
    h = _potentials(graph, a, a0)
    tight = (w - a0) + h[src] - h[dst] <= slack
    return list(zip(src[tight].tolist(), dst[tight].tolist()))


def _edge_subgraph_components(graph, edges):
    """Cyclic strongly connected node sets of the subgraph on the given
    edges, plus the edges internal to each."""
    n = graph.n_states
    sub = np.zeros((n, n), dtype=bool)
    for i, j in edges:
        sub[i, j] = True
    _, labels = connected_components(
        csr_matrix(sub.astype(np.int8)), directed=True, connection="strong"
    )
    groups = {}
    for i, j in edges:
        if labels[i] == labels[j]:
            groups.setdefault(labels[i], []).append((i, j))
    return [sorted(g) for _, g in sorted(groups.items())]


def undamped_set(graph: TransitionGraph, a: EdgePotential,
                 slack: float = SLACK_TOL) -> tuple:
    """Edges lying on cycles that achieve the minimum mean weight: tight
    edges of the shortest-path potentials, restricted to the cyclic part.

    Returned sorted; the subgraph they span carries every minimizing
    invariant measure.
    """
    a0 = min_average(graph, a)
    tight = _tight_edges(graph, a, a0, slack)
    out = []
    for group in _edge_subgraph_components(graph, tight):
        out.extend(group)
    return tuple(sorted(out))


def _zero_edges(graph, a):
    src, dst, w = _edge_arrays(graph, a.values)
    z = w == 0.0
    return list(zip(src[z].tolist(), dst[z].tolist()))


def noncontrolled_set(graph: TransitionGraph, a: EdgePotential) -> tuple:
    """Edges of bi-infinite admissible trajectories along which the weight
    vanishes identically: within the exact-zero subgraph, edges reachable
    from a zero cycle and leading back to one.

    Defined only for a nonnegative weight whose minimum average is zero
    (within 1e-12); otherwise no such trajectory exists and the call is a
    usage error.
    """
    if not a.graph.same_graph(graph):
        raise ValueError("weight lives on a different graph")
    if a.min() < 0:
        raise ValueError("weight must be nonnegative")
    a0 = min_average(graph, a)
    if abs(a0) > 1e-12:
        raise ValueError(
            f"minimum average is {a0!r}, not 0: no trajectory avoids the "
            "weight entirely"
        )
    zero = _zero_edges(graph, a)
    n = graph.n_states
    fwd = [[] for _ in range(n)]
    bwd = [[] for _ in range(n)]
    for i, j in zero:
        fwd[i].append(j)
        bwd[j].append(i)
    seeds = set()
    for group in _edge_subgraph_components(graph, zero):
        for i, j in group:
            seeds.add(i)
            seeds.add(j)

    def closure(adj, start):
        seen = set(start)
        stack = list(start)
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    from_cycles = closure(fwd, seeds)
    to_cycles = closure(bwd, seeds)
    out = [
        (i, j) for i, j in zero
        if i in from_cycles and j in to_cycles
    ]
    return tuple(sorted(out))


def pressure_on_set(graph: TransitionGraph, phi: EdgePotential,
                    edges) -> float:
    """Pressure of phi restricted to the subsystem spanned by the given
    edges: the max log Perron root over the cyclic strongly connected
    pieces of that subgraph."""
    if not phi.graph.same_graph(graph):
        raise ValueError("potential lives on a different graph")
    allowed = set(map(tuple, graph.edges()))
    for e in edges:
        if tuple(e) not in allowed:
            raise ValueError(f"edge {tuple(e)} is not allowed in the graph")
    groups = _edge_subgraph_components(graph, [tuple(e) for e in edges])
    if not groups:
        raise ZeroMassError(
            "edge set spans no cycles: no invariant measure lives on it"
        )
    best = -np.inf
    for group in groups:
        nodes = sorted({i for i, _ in group} | {j for _, j in group})
        relabel = {v: k for k, v in enumerate(nodes)}
        F = np.full((len(nodes), len(nodes)), -np.inf)
        for i, j in group:
            F[relabel[i], relabel[j]] = phi.values[i, j]
        best = max(best, perron(F).log_rho)
    return float(best)


def _witness_cycle(graph, tight_groups):
    """Deterministic cycle inside the first tight component: walk least
    successors until a state repeats."""
    group = tight_groups[0]
    succ = {}
    for i, j in group:
        succ.setdefault(i, []).append(j)
    start = min(succ)
    path = [start]
    seen = {start: 0}
    while True:
        nxt = min(succ[path[-1]])
        if nxt in seen:
            cyc = path[seen[nxt]:]
            return CyclicWord(graph, tuple(cyc))
        seen[nxt] = len(path)
        path.append(nxt)


@dataclass(frozen=True)
class MinimizationResult:
    """Everything the minimization yields: the optimal average, a witness
    cycle attaining it, the critical edge set, the zero-weight edge set
    (None unless the weight is nonnegative with zero minimum), and
    optionally the pressure of a second potential on the critical set."""

    value: float
    witness_cycle: CyclicWord
    critical_edges: tuple
    noncontrolled_edges: tuple | None
    restricted_pressure: float | None = None


def minimize(graph: TransitionGraph, a: EdgePotential,
             phi: EdgePotential | None = None,
             slack: float = SLACK_TOL) -> MinimizationResult:
    """Full minimization report for the weight a; if phi is given, also
    the pressure of phi restricted to the critical edge set."""
    a0 = min_average(graph, a)
    tight = _tight_edges(graph, a, a0, slack)
    groups = _edge_subgraph_components(graph, tight)
    critical = tuple(sorted(e for g in groups for e in g))
    witness = _witness_cycle(graph, groups)
    wmean = sum(a.values[i, j] for i, j in witness.edges()) / len(witness)
    if abs(wmean - a0) > 1e-12 * max(1.0, abs(a0)) + len(witness) * slack:
        raise InvariantViolation(
            f"witness mean {wmean!r} deviates from optimum {a0!r}"
        )
    if a.min() >= 0 and abs(a0) <= 1e-12:
        noncontrolled = noncontrolled_set(graph, a)
    else:
        noncontrolled = None
    restricted = None
    if phi is not None:
        restricted = pressure_on_set(graph, phi, critical)
    return MinimizationResult(a0, witness, critical, noncontrolled,
                              restricted)


def format_edge_set(edges) -> str:
    """One 'i j' line per edge, sorted, LF newlines; '' for the empty set."""
    return "".join(f"{i} {j}\n" for i, j in sorted(map(tuple, edges)))


def parse_edge_set(text: str, graph: TransitionGraph) -> tuple:
    """Inverse of format_edge_set, validated against the graph."""
    edges = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {ln}: expected 'i j', got {raw!r}")
        i, j = int(parts[0]), int(parts[1])
        if not (0 <= i < graph.n_states and 0 <= j < graph.n_states):
            raise ValueError(f"line {ln}: state out of range")
        if not graph.allowed[i, j]:
            raise ValueError(f"line {ln}: edge ({i}, {j}) not allowed")
        edges.append((i, j))
    return tuple(sorted(edges))
