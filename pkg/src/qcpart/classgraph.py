"""Clique reformulation of the layer-partition problem, for cross-validation.

Vertices are the LS-classes C_{m,s,l}; two classes are adjacent when they sit
in different S-classes and their union's row submatrix has maximum column
weight 1.  Feasible schemes achieving omega = 1 then correspond exactly to
cliques of size M*S (one vertex per S-class).  This is exponential in general
and exists to cross-check the direct search on small instances, not to scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .qc import SparsePcm, column_weight, ls_class, validate_for_partition
from .partition import ClassProfiles, PartitionScheme, evaluate_omega, scheme_from_selectors

MAX_VERTICES_DEFAULT = 24


@dataclass(frozen=True)
class ClassGraph:
    """Adjacency over LS-class vertices, indexed by (pos, l) = ((m*S + s), l)."""

    M: int
    S: int
    L: int
    Z: int
    adj: np.ndarray  # bool, (MS*L, MS*L)
    valid: np.ndarray  # bool, (MS*L,): omega of the class itself is 1

    @property
    def num_vertices(self) -> int:
        return self.M * self.S * self.L

    def vertex(self, m: int, s: int, l: int) -> int:
        return (m * self.S + s) * self.L + l

    def vertex_label(self, v: int) -> tuple[int, int, int]:
        pos, l = divmod(v, self.L)
        m, s = divmod(pos, self.S)
        return m, s, l


def build_class_graph(h: SparsePcm, L: int, S: int, max_vertices: int = MAX_VERTICES_DEFAULT) -> ClassGraph:
    validate_for_partition(h)
    profiles = ClassProfiles(h, L, S)
    nv = profiles.MS * L
    if nv > max_vertices:
        raise ValueError(
            f"class graph has {nv} vertices (> {max_vertices}); this construction "
            "is a validation device for small instances only"
        )
    adj = np.zeros((nv, nv), dtype=bool)
    # a class whose own submatrix has a column weight > 1 can join no scheme
    valid = np.zeros(nv, dtype=bool)
    for u in range(nv):
        pos_u, l_u = divmod(u, L)
        bu, cu = profiles.profile(pos_u, l_u)
        valid[u] = (cu.max() if len(cu) else 0) <= 1
        for v in range(u + 1, nv):
            pos_v, l_v = divmod(v, L)
            if pos_v == pos_u:
                continue  # same S-class
            bv, cv = profiles.profile(pos_v, l_v)
            acc = np.zeros(profiles.nbuckets, dtype=np.int64)
            acc[bu] += cu
            acc[bv] += cv
            if acc.max() <= 1:
                adj[u, v] = adj[v, u] = True
    return ClassGraph(h.M, S, L, h.Z, adj, valid)


def enumerate_partite_cliques(g: ClassGraph) -> list[tuple[int, ...]]:
    """All cliques with exactly one vertex per S-class, as selector tuples."""
    MS = g.M * g.S
    out = []
    for sel in itertools.product(range(g.L), repeat=MS):
        verts = [pos * g.L + l for pos, l in enumerate(sel)]
        if all(g.valid[v] for v in verts) and all(
            g.adj[a, b] for a, b in itertools.combinations(verts, 2)
        ):
            out.append(tuple(sel))
    return out


def omega_one_selector_sets(h: SparsePcm, L: int, S: int) -> list[tuple[int, ...]]:
    """Selector tuples whose schemes achieve omega = 1, by direct evaluation."""
    profiles = ClassProfiles(h, L, S)
    out = []
    for sel in itertools.product(range(L), repeat=profiles.MS):
        if profiles.omega_of_selectors(sel) <= 1:
            out.append(sel)
    return out


@dataclass(frozen=True)
class EquivalenceReport:
    matched: bool
    clique_count: int
    direct_count: int
    mismatches: tuple[tuple[int, ...], ...]

    def text(self) -> str:
        lines = [
            f"cliques (one per S-class): {self.clique_count}",
            f"omega=1 schemes (direct):  {self.direct_count}",
            f"equivalence: {'OK' if self.matched else 'MISMATCH'}",
        ]
        for sel in self.mismatches[:10]:
            lines.append(f"  differs on selectors {sel}")
        return "\n".join(lines)


def verify_clique_equivalence(h: SparsePcm, L: int, S: int, max_vertices: int = MAX_VERTICES_DEFAULT) -> EquivalenceReport:
    """Check that M*S-cliques coincide with omega=1 schemes on this instance."""
    g = build_class_graph(h, L, S, max_vertices=max_vertices)
    cliques = set(enumerate_partite_cliques(g))
    direct = set(omega_one_selector_sets(h, L, S))
    mism = tuple(sorted(cliques.symmetric_difference(direct)))
    return EquivalenceReport(cliques == direct, len(cliques), len(direct), mism)
