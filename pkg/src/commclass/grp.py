"""Finite matrix groups and orbit partitions under conjugation."""

from __future__ import annotations

import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ScaleGuardError
from .field import FqContext
from .linalg import encode, inverse_batch, rank_batch

ENUMERATION_LIMIT = 2**40
_CHUNK = 1 << 16


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


def check_scale(count: int, what: str, limit: int, force: bool = False) -> None:
    if count > limit and not force:
        raise ScaleGuardError(f"{what}: {count} elements exceeds the limit {limit}")


class MatrixGroup:
    """A finite group of invertible matrices held as a stack of arrays.

    ``elements`` has shape (order, n, n); ``inverses`` is aligned with it.
    """

    def __init__(self, n: int, ctx: FqContext, elements: np.ndarray):
        self.n = n
        self.ctx = ctx
        self.elements = np.ascontiguousarray(elements, dtype=np.int64)
        self.elements.setflags(write=False)
        self._inverses = None

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def inverses(self) -> np.ndarray:
        if self._inverses is None:
            inv = inverse_batch(self.elements, self.ctx) if self.order else self.elements
            inv.setflags(write=False)
            self._inverses = inv
        return self._inverses

    def conjugates(self, x: np.ndarray) -> np.ndarray:
        """g x g^-1 for every group element g; x is (n, n) or (k, n, n)."""
        x = np.asarray(x, dtype=np.int64)
        g, gi = self.elements, self.inverses
        if x.ndim == 3:
            g, gi = g[:, None], gi[:, None]
        return self.ctx.matmul(self.ctx.matmul(g, x), gi)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, q={self.ctx.q}, order={self.order})"


class GeneralLinearGroup(MatrixGroup):
    pass


class UnitGroup(MatrixGroup):
    """Invertible elements of a subalgebra, in the subalgebra's element order."""

    def __init__(self, parent, elements: np.ndarray):
        super().__init__(parent.n, parent.ctx, elements)
        self.parent = parent


def invertible_mask(mats: np.ndarray, ctx: FqContext) -> np.ndarray:
    mats = np.asarray(mats, dtype=np.int64)
    if len(mats) == 0:
        return np.zeros(0, dtype=bool)
    out = np.empty(len(mats), dtype=bool)
    for s in range(0, len(mats), _CHUNK):
        out[s : s + _CHUNK] = rank_batch(mats[s : s + _CHUNK], ctx) == mats.shape[-1]
    return out


def gl_enumerate(n: int, ctx: FqContext, force: bool = False) -> GeneralLinearGroup:
    """All of GL_n(F_q) in lexicographic order of row-major entries."""
    q = ctx.q
    check_scale(q ** (n * n), f"M_{n}(F_{q}) enumeration", ENUMERATION_LIMIT, force)
    total = q ** (n * n)
    D = n * n
    powers = q ** np.arange(D - 1, -1, -1, dtype=np.int64)
    found = []
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        mats = ((idx[:, None] // powers[None, :]) % q).reshape(-1, n, n)
        found.append(mats[invertible_mask(mats, ctx)])
    elements = np.concatenate(found) if found else np.zeros((0, n, n), dtype=np.int64)
    group = GeneralLinearGroup(n, ctx, elements)
    if group.order != gl_order(n, q):
        raise AssertionError(f"GL_{n}(F_{q}) enumeration found {group.order} elements")
    return group


def unit_group(z, limit: int = 2**24, force: bool = False) -> UnitGroup:
    """Group of units of a subalgebra (anything with .elements(), .n, .ctx, .dim)."""
    check_scale(z.ctx.q**z.dim, f"subalgebra of dim {z.dim}", limit, force)
    elems = z.elements()
    return UnitGroup(z, elems[invertible_mask(elems, z.ctx)])


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, i: int) -> int:
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        # the smaller index becomes the root so roots are orbit minima
        if rj < ri:
            ri, rj = rj, ri
        self.parent[rj] = ri


@dataclass
class OrbitPartition:
    """Orbits of a finite point set; points are identified by their codes.

    ``codes`` is sorted; ``labels[i]`` is the orbit index of ``codes[i]``.
    Representatives are orbit minima and orbits are numbered by them.
    """

    q: int
    point_ndim: int
    codes: np.ndarray
    labels: np.ndarray
    representatives: np.ndarray
    orbit_sizes: list[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.orbit_sizes)

    def __len__(self) -> int:
        return self.count

    def class_of(self, point) -> int:
        code = encode(np.asarray(point), self.q, self.point_ndim)
        pos = int(np.searchsorted(self.codes, code))
        if pos >= len(self.codes) or self.codes[pos] != code:
            raise KeyError("point not in the partitioned set")
        return int(self.labels[pos])

    def as_sets(self) -> frozenset:
        groups: dict[int, list] = {}
        for c, l in zip(self.codes.tolist(), self.labels.tolist()):
            groups.setdefault(l, []).append(c)
        return frozenset(frozenset(v) for v in groups.values())


def _shard_orbits(task):
    """Full orbits of the not-yet-covered points of one shard (positions)."""
    group, points, codes, q, lo, hi = task
    seen = np.zeros(len(codes), dtype=bool)
    found = []
    for pos in range(lo, hi):
        if seen[pos]:
            continue
        images = encode(group.conjugates(points[pos]), q, points.ndim - 1)
        images = np.unique(images)
        where = np.searchsorted(codes, images)
        if np.any(where >= len(codes)) or np.any(codes[np.minimum(where, len(codes) - 1)] != images):
            raise ValueError("point set is not closed under the group action")
        seen[where] = True
        found.append(where)
    return found


def orbit_partition(
    points,
    group: MatrixGroup,
    action: str | None = None,
    workers: int = 1,
    min_parallel: int = 2048,
) -> OrbitPartition:
    """Partition points into orbits of ``group`` acting by conjugation.

    ``points`` is a stack of matrices (N, n, n), acted on by conjugation, or
    of tuples (N, k, n, n), acted on by simultaneous conjugation.  The point
    set must be closed under the action.  With several workers the points are
    sharded, each worker closes orbits of its shard and a union-find pass
    merges the results; the output does not depend on the worker count.
    Sets smaller than ``min_parallel`` are always handled in-process.
    """
    points = np.asarray(points, dtype=np.int64)
    expected = {3: "conj", 4: "simconj"}.get(points.ndim)
    if expected is None or (action is not None and action != expected):
        raise ValueError(f"action {action!r} does not match points of shape {points.shape}")
    q = group.ctx.q
    point_ndim = points.ndim - 1
    codes = encode(points, q, point_ndim)
    codes, first = np.unique(codes, return_index=True)
    points = points[first]
    group.inverses  # materialise before any fork

    workers = max(1, int(workers))
    if len(codes) < min_parallel:
        workers = 1
    bounds = np.linspace(0, len(codes), workers + 1).astype(int)
    tasks = [(group, points, codes, q, int(bounds[i]), int(bounds[i + 1])) for i in range(workers)]
    if workers == 1:
        results = [_shard_orbits(tasks[0])]
    else:
        with ProcessPoolExecutor(workers, mp_context=mp.get_context("fork")) as ex:
            results = list(ex.map(_shard_orbits, tasks))

    uf = UnionFind(len(codes))
    for found in results:
        for orbit in found:
            root = int(orbit[0])
            for pos in orbit[1:].tolist():
                uf.union(root, pos)
    roots = np.array([uf.find(i) for i in range(len(codes))], dtype=np.int64)
    rep_pos, labels = np.unique(roots, return_inverse=True)
    sizes = np.bincount(labels, minlength=len(rep_pos)).tolist()
    return OrbitPartition(
        q=q,
        point_ndim=point_ndim,
        codes=codes,
        labels=labels.astype(np.int64),
        representatives=points[rep_pos],
        orbit_sizes=[int(s) for s in sizes],
    )
