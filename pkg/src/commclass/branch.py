"""Branching graph of centralizer subalgebras and walk counts over it.

Node 0 is M_n(F_q).  For a node Z, the unit group Z* acts on Z by
conjugation; every orbit representative A has a centralizer Z_Z(A) in Z.
The edge weight Z -> Z' is the number of Z*-orbits whose centralizer is
GL_n-conjugate to Z'.  With ``c(Z, 0) = 1`` and
``c(Z, k) = sum_{Z'} w(Z, Z') c(Z', k - 1)``, the number of orbits of
commuting k-tuples is ``c(M_n, k)``, i.e. the weighted count of length-k
walks leaving node 0.  Weighting each walk by |GL_n| / |Z_k*| for its final
node Z_k instead counts the commuting tuples themselves.

Centralizers are first classified under Z* (the group whose orbits are being
counted) and then mapped to their GL_n class, which is the graph node and the
memoisation key.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    ConjugacyClassifier,
    Subalgebra,
    center_of,
    centralizer_in,
    is_commutative,
    max_commutative_dim,
)
from .errors import ConsistencyError, ScaleGuardError
from .field import FqContext
from .grp import gl_enumerate, orbit_partition, unit_group

NODE_ELEMENT_LIMIT = 2**20


@dataclass
class LocalBranch:
    """One Z*-conjugacy class of centralizers inside a node."""

    representative: Subalgebra
    orbits: int
    points: int
    target: int


@dataclass
class BranchNode:
    id: int
    algebra: Subalgebra
    dim: int
    center_dim: int
    commutative: bool
    unit_order: int = 0
    orbit_count: int = 0
    local: list[LocalBranch] = field(default_factory=list)


@dataclass
class BranchGraph:
    n: int
    ctx: FqContext
    gl_order: int
    nodes: list[BranchNode]
    edges: dict[tuple[int, int], int]
    classifier: ConjugacyClassifier = field(repr=False)

    @property
    def q(self) -> int:
        return self.ctx.q

    def out_edges(self, i: int) -> dict[int, int]:
        return {dst: w for (src, dst), w in self.edges.items() if src == i}

    def out_weight(self, i: int) -> int:
        return sum(self.out_edges(i).values())

    def weight_matrix(self) -> list[list[int]]:
        size = len(self.nodes)
        w = [[0] * size for _ in range(size)]
        for (src, dst), weight in self.edges.items():
            w[src][dst] = weight
        return w

    def node_of(self, z: Subalgebra) -> int:
        """Graph node of the GL_n class of z (z must be a centralizer algebra in the graph)."""
        idx = self.classifier.classify(z).index
        if idx >= len(self.nodes):
            raise KeyError("subalgebra is not conjugate to any node of the graph")
        return idx

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "gl_order": str(self.gl_order),
            "nodes": [
                {
                    "id": v.id,
                    "dim": v.dim,
                    "center_dim": v.center_dim,
                    "commutative": v.commutative,
                    "unit_order": str(v.unit_order),
                }
                for v in self.nodes
            ],
            "edges": [
                {"src": s, "dst": d, "weight": str(w)} for (s, d), w in sorted(self.edges.items())
            ],
        }

    def to_dot(self) -> str:
        lines = [f'digraph "branch_n{self.n}_q{self.q}" {{']
        for v in self.nodes:
            shape = "doublecircle" if v.commutative else "circle"
            lines.append(f'  {v.id} [shape={shape}, label="{v.id}\\ndim {v.dim}\\nz {v.center_dim}"];')
        for (s, d), w in sorted(self.edges.items()):
            lines.append(f'  {s} -> {d} [label="{w}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_branch_graph(n: int, ctx: FqContext, workers: int = 1, force: bool = False) -> BranchGraph:
    q = ctx.q
    # node 0 is M_n itself; refuse before enumerating GL_n
    if q ** (n * n) > NODE_ELEMENT_LIMIT and not force:
        raise ScaleGuardError(f"M_{n}(F_{q}) has q^(n^2) = {q ** (n * n)} elements, above {NODE_ELEMENT_LIMIT}")
    gl = gl_enumerate(n, ctx, force)
    clf = ConjugacyClassifier(gl)
    nodes: list[BranchNode] = []
    edges: dict[tuple[int, int], int] = defaultdict(int)

    def add_node(z: Subalgebra) -> int:
        cls = clf.classify(z)
        if cls.index == len(nodes):
            z = cls.representative
            nodes.append(BranchNode(cls.index, z, z.dim, center_of(z).dim, is_commutative(z)))
        return cls.index

    add_node(Subalgebra.full(n, ctx))
    i = 0
    while i < len(nodes):
        node = nodes[i]
        z = node.algebra
        if q**z.dim > NODE_ELEMENT_LIMIT and not force:
            raise ScaleGuardError(f"node {i} has dim {z.dim}: q^dim = {q ** z.dim} exceeds {NODE_ELEMENT_LIMIT}")
        units = gl if i == 0 else unit_group(z, force=True)
        node.unit_order = units.order
        part = orbit_partition(z.elements(force=True), units, "conj", workers)
        if sum(part.orbit_sizes) != q**z.dim:
            raise ConsistencyError(f"orbits of node {i} do not cover the algebra")
        node.orbit_count = part.count
        local = ConjugacyClassifier(units)
        tally: dict[int, list] = {}
        for rep, size in zip(part.representatives, part.orbit_sizes):
            cls = local.classify(centralizer_in(z, rep))
            if cls.index not in tally:
                tally[cls.index] = [cls.representative, 0, 0, add_node(cls.representative)]
            tally[cls.index][1] += 1
            tally[cls.index][2] += size
        for idx in sorted(tally):
            rep, orbits, points, target = tally[idx]
            node.local.append(LocalBranch(rep, orbits, points, target))
            edges[(i, target)] += orbits
        i += 1
    return BranchGraph(n, ctx, gl.order, nodes, dict(edges), clf)


# walk counting ---------------------------------------------------------------

_POWER_THRESHOLD = 64


def _mat_vec(w: list[list[int]], v: list[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, v) if a) for row in w]


def _mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col) if x) for col in cols] for row in a]


def _walk(w: list[list[int]], k: int, v: list[int]) -> list[int]:
    """w^k v, by repeated application or binary powering for large k."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k < _POWER_THRESHOLD:
        for _ in range(k):
            v = _mat_vec(w, v)
        return v
    while k:
        if k & 1:
            v = _mat_vec(w, v)
        k >>= 1
        if k:
            w = _mat_mul(w, w)
    return v


def terminal_factors(g: BranchGraph) -> list[int]:
    """|GL_n| / |Z*| for every node, as exact integers."""
    out = []
    for v in g.nodes:
        f, rem = divmod(g.gl_order, v.unit_order)
        if rem:
            raise ConsistencyError(f"|Z*| = {v.unit_order} of node {v.id} does not divide |GL| = {g.gl_order}")
        out.append(f)
    return out


def walk_count_classes(g: BranchGraph, k: int) -> int:
    """c(n, k, q): number of simultaneous similarity classes of commuting k-tuples."""
    return _walk(g.weight_matrix(), k, [1] * len(g.nodes))[0]


def walk_count_tuples(g: BranchGraph, k: int) -> int:
    """C(n, k, q): number of commuting k-tuples."""
    return _walk(g.weight_matrix(), k, terminal_factors(g))[0]


def walk_counts(g: BranchGraph, k_max: int) -> tuple[list[int], list[int]]:
    """(c(n,k,q), C(n,k,q)) for k = 0..k_max."""
    w = g.weight_matrix()
    v, u = [1] * len(g.nodes), terminal_factors(g)
    cs, Cs = [v[0]], [u[0]]
    for _ in range(k_max):
        v, u = _mat_vec(w, v), _mat_vec(w, u)
        cs.append(v[0])
        Cs.append(u[0])
    return cs, Cs


def limit_constants(g: BranchGraph) -> tuple[Fraction, Fraction]:
    """Exact limits of c(n,k,q)/q^(m k) and C(n,k,q)/q^(m k) as k grows.

    Commutative nodes are absorbing with self-loop q^dim, so only those of
    dimension m contribute; a non-commutative node Z with self-loop s < q^m
    satisfies h(Z) = sum_{Z' != Z} w(Z,Z') h(Z') / (q^m - s).  Children have
    strictly smaller dimension, so nodes are solved by increasing dimension.
    """
    qm = g.q ** max_commutative_dim(g.n)
    factors = terminal_factors(g)
    hc: dict[int, Fraction] = {}
    hC: dict[int, Fraction] = {}
    for v in sorted(g.nodes, key=lambda v: v.dim):
        out = g.out_edges(v.id)
        loop = out.pop(v.id, 0)
        if v.commutative:
            top = v.dim == max_commutative_dim(g.n)
            hc[v.id] = Fraction(1 if top else 0)
            hC[v.id] = Fraction(factors[v.id] if top else 0)
            continue
        if loop >= qm:
            raise ConsistencyError(f"non-commutative node {v.id} has self-loop {loop} >= q^m")
        hc[v.id] = sum((w * hc[d] for d, w in out.items()), Fraction(0)) / (qm - loop)
        hC[v.id] = sum((w * hC[d] for d, w in out.items()), Fraction(0)) / (qm - loop)
    return hc[0], hC[0]


# asymptotics -----------------------------------------------------------------


def eulerian_series(j: int, x: Fraction) -> Fraction:
    """sum_{r >= 0} r^j x^r for |x| < 1, exactly (with 0^0 = 1)."""
    if j == 0:
        return 1 / (1 - x)
    num = Fraction(0)
    for m in range(j):
        e = sum((-1) ** i * math.comb(j + 1, i) * (m + 1 - i) ** j for i in range(m + 1))
        num += e * x ** (m + 1)
    return num / (1 - x) ** (j + 1)


def c2_series(n: int, q: int, f: int) -> Fraction:
    """sum_{j=0}^{n^2-1} binom(f, j+1) q^(n^2 (j+1)) sum_r r^j q^-r."""
    x = Fraction(1, q)
    return sum(
        (math.comb(f, j + 1) * q ** (n * n * (j + 1)) * eulerian_series(j, x) for j in range(n * n)),
        Fraction(0),
    )


def witness_chain(g: BranchGraph) -> list[int]:
    """Graph nodes of the prefix centralizers of the maximal-dimension witness tuple."""
    from .witness import witness_tuple

    return [g.node_of(z) for z in witness_tuple(g.n, g.ctx).prefix_centralizers()]


def witness_reachability(g: BranchGraph) -> bool:
    """True iff the witness centralizer is a commutative node of dimension m(n)."""
    try:
        last = g.nodes[witness_chain(g)[-1]]
    except KeyError:
        return False
    return last.commutative and last.dim == max_commutative_dim(g.n)


@dataclass
class AsymptoticRow:
    k: int
    c: int
    C: int
    c_norm: Fraction
    C_norm: Fraction
    ratio: Fraction | None  # c(k+1)/c(k); None on the last row


@dataclass
class AsymptoticReport:
    n: int
    q: int
    m: int
    rows: list[AsymptoticRow]
    c1_emp: Fraction
    c2_emp: Fraction
    d1_emp: Fraction
    d2_emp: Fraction
    c_limit: Fraction
    C_limit: Fraction
    witness_c1: Fraction | None
    witness_d1: Fraction | None
    node_count: int
    c2_surrogate: Fraction

    @property
    def q_m(self) -> int:
        return self.q**self.m

    def to_json(self) -> dict:
        def s(x):
            return None if x is None else str(x)

        return {
            "n": self.n,
            "q": self.q,
            "m": self.m,
            "q_m": str(self.q_m),
            "rows": [
                {
                    "k": r.k,
                    "c": str(r.c),
                    "C": str(r.C),
                    "c_norm": str(r.c_norm),
                    "C_norm": str(r.C_norm),
                    "ratio": s(r.ratio),
                }
                for r in self.rows
            ],
            "c1_emp": str(self.c1_emp),
            "c2_emp": str(self.c2_emp),
            "d1_emp": str(self.d1_emp),
            "d2_emp": str(self.d2_emp),
            "c_limit": str(self.c_limit),
            "C_limit": str(self.C_limit),
            "witness_c1": s(self.witness_c1),
            "witness_d1": s(self.witness_d1),
            "node_count": self.node_count,
            "c2_surrogate": str(self.c2_surrogate),
            "c2_surrogate_note": "node count used in place of the number of subalgebras",
        }


def asymptotic_report(g: BranchGraph, k_max: int) -> AsymptoticReport:
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    n, q = g.n, g.q
    m = max_commutative_dim(n)
    cs, Cs = walk_counts(g, k_max + 1)
    rows = []
    for k in range(1, k_max + 1):
        rows.append(
            AsymptoticRow(
                k,
                cs[k],
                Cs[k],
                Fraction(cs[k], q ** (m * k)),
                Fraction(Cs[k], q ** (m * k)),
                Fraction(cs[k + 1], cs[k]) if k < k_max else None,
            )
        )
    c_norm = [r.c_norm for r in rows]
    C_norm = [r.C_norm for r in rows]
    c_lim, C_lim = limit_constants(g)

    w1 = d1 = None
    if witness_reachability(g):
        chain = witness_chain(g)
        w = g.weight_matrix()
        prod = w[0][chain[0]]
        for a, b in zip(chain, chain[1:]):
            prod *= w[a][b]
        l0 = len(chain)
        w1 = Fraction(prod, q ** (m * l0))
        d1 = w1 * Fraction(g.gl_order, g.nodes[chain[-1]].unit_order)

    return AsymptoticReport(
        n=n,
        q=q,
        m=m,
        rows=rows,
        c1_emp=min(c_norm),
        c2_emp=max(c_norm),
        d1_emp=min(C_norm),
        d2_emp=max(C_norm),
        c_limit=c_lim,
        C_limit=C_lim,
        witness_c1=w1,
        witness_d1=d1,
        node_count=len(g.nodes),
        c2_surrogate=c2_series(n, q, len(g.nodes)),
    )
