"""Unital subalgebras of M_n(F_q) and their classification up to conjugacy."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .field import FqContext
from .grp import MatrixGroup, check_scale, invertible_mask
from .linalg import (
    MatFq,
    VecSpan,
    commutator_operator,
    nullspace,
    rank_batch,
    span_closure_product,
)

ELEMENT_LIMIT = 2**24


class Subalgebra:
    """A unital subalgebra of M_n(F_q), stored as a span of flattened matrices."""

    __slots__ = ("n", "ctx", "span", "_center", "_fingerprint", "_elements")

    def __init__(self, span: VecSpan, n: int, check: bool = True):
        self.n = n
        self.ctx = span.ctx
        self.span = span
        self._center = None
        self._fingerprint = None
        self._elements = None
        if check:
            if not bool(span.contains(np.eye(n, dtype=np.int64).reshape(-1))):
                raise ValueError("span does not contain the identity")
            if span_closure_product(span).dim != span.dim:
                raise ValueError("span is not closed under multiplication")

    @classmethod
    def full(cls, n: int, ctx: FqContext) -> "Subalgebra":
        return cls(VecSpan.full(ctx, n * n), n, check=False)

    @classmethod
    def scalars(cls, n: int, ctx: FqContext) -> "Subalgebra":
        return cls(VecSpan.from_vectors(ctx, np.eye(n, dtype=np.int64).reshape(1, -1)), n, check=False)

    @classmethod
    def generated_by(cls, mats, n: int, ctx: FqContext) -> "Subalgebra":
        arrs = [m.a if isinstance(m, MatFq) else np.asarray(m) for m in mats]
        vecs = np.array([a.reshape(-1) for a in arrs], dtype=np.int64).reshape(-1, n * n)
        return cls(span_closure_product(VecSpan.from_vectors(ctx, vecs, n * n)), n, check=False)

    @property
    def dim(self) -> int:
        return self.span.dim

    @property
    def basis(self) -> np.ndarray:
        """Basis as a stack of matrices (dim, n, n)."""
        return self.span.basis.reshape(-1, self.n, self.n)

    @property
    def key(self):
        return self.span.key

    def __eq__(self, other):
        return isinstance(other, Subalgebra) and self.span == other.span

    def __hash__(self):
        return hash(self.span)

    def __repr__(self):
        return f"Subalgebra(n={self.n}, q={self.ctx.q}, dim={self.dim})"

    def size(self) -> int:
        return self.ctx.q**self.dim

    def elements(self, force: bool = False) -> np.ndarray:
        """All elements as matrices, in lexicographic order of their entries."""
        if self._elements is None:
            check_scale(self.size(), f"subalgebra of dim {self.dim}", ELEMENT_LIMIT, force)
            els = self.span.elements().reshape(-1, self.n, self.n)
            els.setflags(write=False)
            self._elements = els
        return self._elements

    def contains(self, a) -> bool:
        a = a.a if isinstance(a, MatFq) else np.asarray(a)
        return bool(self.span.contains(a.reshape(-1)))

    def conjugate(self, g: np.ndarray, g_inv: np.ndarray) -> "Subalgebra":
        b = self.ctx.matmul(self.ctx.matmul(g, self.basis), g_inv)
        return Subalgebra(VecSpan.from_vectors(self.ctx, b.reshape(self.dim, -1), self.n * self.n), self.n, check=False)


def _commuting_subspace(z: Subalgebra, mats: np.ndarray) -> Subalgebra:
    """{x in z : x m = m x for every m in mats}."""
    ctx = z.ctx
    if len(mats) == 0:
        return z
    ops = np.concatenate([commutator_operator(m, ctx) for m in mats])  # (k*n^2, n^2)
    system = ctx.matmul(ops, z.span.basis.T)  # columns: images of the basis of z
    coeffs = nullspace(system, ctx)
    vecs = z.span.combine(coeffs) if len(coeffs) else np.zeros((0, z.n * z.n), dtype=np.int64)
    return Subalgebra(VecSpan.from_vectors(ctx, vecs, z.n * z.n), z.n, check=False)


def centralizer_in(ambient: Subalgebra, a) -> Subalgebra:
    """Centralizer of a in the ambient subalgebra."""
    arr = a.a if isinstance(a, MatFq) else np.asarray(a, dtype=np.int64)
    if not ambient.contains(arr):
        raise ValueError("matrix does not lie in the ambient subalgebra")
    return _commuting_subspace(ambient, arr[None])


def center_of(z: Subalgebra) -> Subalgebra:
    if z._center is None:
        z._center = _commuting_subspace(z, z.basis)
    return z._center


def is_commutative(z: Subalgebra) -> bool:
    b = z.basis
    ctx = z.ctx
    return bool(np.array_equal(ctx.matmul(b[:, None], b[None, :]), ctx.matmul(b[None, :], b[:, None])))


def max_commutative_dim(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    return n * n // 4 + 1


def unital_subspaces(n: int, ctx: FqContext, limit: int = 2**12, force: bool = False) -> list[VecSpan]:
    """Every subspace of M_n(F_q) containing the identity, smallest first."""
    check_scale(ctx.q ** (n * n), f"subspace lattice of M_{n}(F_{ctx.q})", limit, force)
    everything = VecSpan.full(ctx, n * n).elements()
    start = VecSpan.from_vectors(ctx, np.eye(n, dtype=np.int64).reshape(1, -1), n * n)
    found = {start.key: start}
    layer = [start]
    while layer:
        nxt = {}
        for s in layer:
            outside = everything[~s.contains(everything)]
            for v in outside:
                t = s.join(v)
                if t.key not in found and t.key not in nxt:
                    nxt[t.key] = t
        found.update(nxt)
        layer = list(nxt.values())
    return sorted(found.values(), key=lambda s: (s.dim, s.key))


def unital_subalgebras(n: int, ctx: FqContext, force: bool = False) -> list[Subalgebra]:
    """All unital subalgebras of M_n(F_q), found by filtering unital subspaces."""
    return [
        Subalgebra(s, n, check=False)
        for s in unital_subspaces(n, ctx, force=force)
        if span_closure_product(s).dim == s.dim
    ]


def minimal_polynomial_degrees(mats: np.ndarray, ctx: FqContext) -> np.ndarray:
    """Degree of the minimal polynomial of each matrix: rank of I, A, ..., A^n."""
    mats = np.asarray(mats, dtype=np.int64)
    N, n, _ = mats.shape
    out = np.empty(N, dtype=np.int64)
    step = 1 << 15
    for s in range(0, N, step):
        a = mats[s : s + step]
        powers = [np.broadcast_to(np.eye(n, dtype=np.int64), a.shape)]
        for _ in range(n):
            powers.append(ctx.matmul(powers[-1], a))
        stack = np.stack([p.reshape(len(a), -1) for p in powers], axis=1)
        out[s : s + step] = rank_batch(stack, ctx)
    return out


def fingerprint(z: Subalgebra) -> tuple:
    """Conjugation-invariant summary used to bucket subalgebras.

    (dim, center dim, #units, #idempotents, minimal-polynomial degree multiset)
    """
    if z._fingerprint is None:
        ctx = z.ctx
        els = z.elements()
        units = int(invertible_mask(els, ctx).sum())
        idem = int(np.all(ctx.matmul(els, els) == els, axis=(1, 2)).sum())
        degs = tuple(sorted(Counter(minimal_polynomial_degrees(els, ctx).tolist()).items()))
        z._fingerprint = (z.dim, center_of(z).dim, units, idem, degs)
    return z._fingerprint


@dataclass
class AlgebraClassId:
    """A conjugacy class of subalgebras under ``group``.

    ``index`` numbers classes in order of discovery within one classifier.
    """

    index: int
    fingerprint: tuple
    representative: Subalgebra
    group: MatrixGroup = field(repr=False)

    def __hash__(self):
        return hash((id(self.group), self.index))

    def __eq__(self, other):
        return isinstance(other, AlgebraClassId) and self.group is other.group and self.index == other.index


def find_conjugator(z: Subalgebra, target: Subalgebra, group: MatrixGroup):
    """First group element g (in group order) with g z g^-1 = target, or None."""
    if z.dim != target.dim:
        return None
    ctx = z.ctx
    step = max(1, (1 << 20) // max(1, z.dim * z.n * z.n))
    for s in range(0, group.order, step):
        g = group.elements[s : s + step]
        gi = group.inverses[s : s + step]
        images = ctx.matmul(ctx.matmul(g[:, None], z.basis[None]), gi[:, None])
        ok = np.all(target.span.contains(images.reshape(len(g), z.dim, -1)), axis=1)
        hit = np.flatnonzero(ok)
        if len(hit):
            return s + int(hit[0])
    return None


class ConjugacyClassifier:
    """Incremental classification of subalgebras under a fixed group.

    Candidates are bucketed by fingerprint; membership in a class is
    certified by an explicit conjugator, so the fingerprint only prunes.
    """

    def __init__(self, group: MatrixGroup):
        self.group = group
        self.classes: list[AlgebraClassId] = []
        self._buckets: dict[tuple, list[AlgebraClassId]] = {}
        self._seen: dict = {}
        self.conjugators: dict = {}

    def classify(self, z: Subalgebra) -> AlgebraClassId:
        hit = self._seen.get(z.key)
        if hit is not None:
            return hit
        fp = fingerprint(z)
        bucket = self._buckets.setdefault(fp, [])
        for cls in bucket:
            g = find_conjugator(z, cls.representative, self.group)
            if g is not None:
                self._seen[z.key] = cls
                self.conjugators[z.key] = g
                return cls
        cls = AlgebraClassId(len(self.classes), fp, z, self.group)
        self.classes.append(cls)
        bucket.append(cls)
        self._seen[z.key] = cls
        self.conjugators[z.key] = None
        return cls


def conjugacy_classify(algebras, ambient_group: MatrixGroup) -> dict:
    """Map each subalgebra to its conjugacy class under ambient_group."""
    clf = ConjugacyClassifier(ambient_group)
    return {z: clf.classify(z) for z in algebras}

