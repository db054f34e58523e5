"""Ground-truth counts: partition formula, Burnside, and brute-force orbits.

Nothing here uses the branching graph; these are the oracles it is checked
against.  All counts are exact Python ints.
"""

from __future__ import annotations

from collections.abc import Iterator

import numpy as np

from .errors import ConsistencyError
from .field import FqContext
from .grp import check_scale, gl_enumerate, orbit_partition
from .linalg import all_vectors, commutator_nullspace, encode

# commuting tuples held in memory by the brute-force oracles
TUPLE_LIMIT = 5_000_000


def partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n as weakly decreasing tuples, largest first part first."""
    if n == 0:
        yield ()
        return
    largest = n if largest is None else largest
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def classes_by_partition(n: int, q: int) -> int:
    """Number of similarity classes in M_n(F_q): sum over partitions of q^(largest part)."""
    if n < 1:
        raise ValueError("n must be positive")
    return sum(q ** lam[0] for lam in partitions(n))


def all_matrices(n: int, ctx: FqContext, force: bool = False) -> np.ndarray:
    check_scale(ctx.q ** (n * n), f"M_{n}(F_{ctx.q})", TUPLE_LIMIT, force)
    return all_vectors(ctx.q, n * n).reshape(-1, n, n)


def burnside_count(n: int, ctx: FqContext, k: int, workers: int = 1, force: bool = False) -> int:
    """Orbits of GL_n(F_q) on all k-tuples of matrices, by Burnside's lemma.

    The fixed-point count of g is |Z(g)|^k; it is constant on conjugacy
    classes, so the sum runs over classes of GL_n weighted by class size.
    """
    if k == 0:
        return 1
    gl = gl_enumerate(n, ctx, force)
    classes = orbit_partition(gl.elements, gl, "conj", workers)
    total = 0
    for rep, size in zip(classes.representatives, classes.orbit_sizes):
        total += size * ctx.q ** (k * commutator_nullspace([rep], ctx=ctx).dim)
    count, rem = divmod(total, gl.order)
    if rem:
        raise ConsistencyError(f"Burnside sum {total} not divisible by |GL| = {gl.order}")
    return count


def commuting_tuples(n: int, ctx: FqContext, k: int, limit: int = TUPLE_LIMIT, force: bool = False) -> np.ndarray:
    """All commuting k-tuples, shape (N, k, n, n), in lexicographic order.

    Built by extension: each (k-1)-tuple is extended by every element of its
    common centralizer.  Prefixes are grouped by centralizer so each
    centralizer is solved once.
    """
    q = ctx.q
    if k == 0:
        return np.zeros((1, 0, n, n), dtype=np.int64)
    tuples = all_matrices(n, ctx, force)[:, None]
    for _ in range(1, k):
        groups: dict = {}
        for t in tuples:
            span = commutator_nullspace(list(t), ctx=ctx)
            groups.setdefault(span, []).append(t)
        size = sum(len(ts) * q**span.dim for span, ts in groups.items())
        check_scale(size, f"commuting {tuples.shape[1] + 1}-tuples in M_{n}(F_{q})", limit, force)
        parts = []
        for span, ts in groups.items():
            ts = np.array(ts)
            ext = span.elements().reshape(-1, 1, n, n)
            left = np.repeat(ts, len(ext), axis=0)
            right = np.tile(ext, (len(ts), 1, 1, 1))
            parts.append(np.concatenate([left, right], axis=1))
        tuples = np.concatenate(parts)
        tuples = tuples[np.argsort(encode(tuples, q, 3), kind="stable")]
    return tuples


def commuting_tuples_blind(n: int, ctx: FqContext, k: int) -> np.ndarray:
    """Commuting k-tuples by filtering the full q^(n^2 k) tuple space (tiny cases only)."""
    check_scale(ctx.q ** (n * n * k), "blind tuple scan", 1 << 22)
    t = all_vectors(ctx.q, n * n * k).reshape(-1, k, n, n)
    keep = np.ones(len(t), dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            keep &= np.all(ctx.matmul(t[:, i], t[:, j]) == ctx.matmul(t[:, j], t[:, i]), axis=(1, 2))
    return t[keep]


def brute_commuting_tuples(n: int, ctx: FqContext, k: int, force: bool = False) -> int:
    """|M_n(F_q)^(k)| by explicit enumeration."""
    if k == 1:
        return ctx.q ** (n * n)
    return len(commuting_tuples(n, ctx, k, force=force))


def brute_orbits_commuting(n: int, ctx: FqContext, k: int, workers: int = 1, force: bool = False):
    """Orbit partition of the commuting k-tuples under simultaneous conjugation."""
    gl = gl_enumerate(n, ctx, force)
    tuples = commuting_tuples(n, ctx, k, force=force)
    return orbit_partition(tuples, gl, "simconj", workers)


def brute_simclasses_commuting(n: int, ctx: FqContext, k: int, workers: int = 1, force: bool = False) -> int:
    """c(n, k, q) by direct orbit enumeration."""
    if k == 0:
        return 1
    return brute_orbits_commuting(n, ctx, k, workers, force).count


def brute_simclasses_all(n: int, ctx: FqContext, k: int, workers: int = 1) -> int:
    """Orbits of GL_n on the full k-tuple space, enumerated directly."""
    gl = gl_enumerate(n, ctx)
    check_scale(ctx.q ** (n * n * k), "full tuple space", TUPLE_LIMIT)
    pts = all_vectors(ctx.q, n * n * k).reshape(-1, k, n, n)
    return orbit_partition(pts, gl, "simconj", workers).count
