"""Dense linear algebra over F_q.

Matrices are numpy int64 arrays of field codes.  Whenever a matrix is treated
as a vector it is flattened row-major into an n*n vector; reduced echelon
forms (and therefore span equality) depend on that ordering.

Most routines are batched: they take a stack ``(N, rows, cols)`` and
eliminate all N matrices in lockstep.
"""

from __future__ import annotations

import numpy as np

from .field import FqContext, FqElement

_INT64_SAFE = 2**62


def all_vectors(q: int, d: int) -> np.ndarray:
    """All q**d vectors of length d, in lexicographic order."""
    idx = np.arange(q**d, dtype=np.int64)
    powers = q ** np.arange(d - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % q


def encode(arr: np.ndarray, q: int, point_ndim: int) -> np.ndarray:
    """Integer code of each point; code order is lexicographic order.

    The trailing ``point_ndim`` axes form one point.  Codes fit in int64
    when q**digits allows it, otherwise an object array of Python ints is
    returned.
    """
    arr = np.asarray(arr)
    lead = arr.shape[: arr.ndim - point_ndim]
    flat = arr.reshape(lead + (-1,))
    digits = flat.shape[-1]
    if q**digits < _INT64_SAFE:
        weights = q ** np.arange(digits - 1, -1, -1, dtype=np.int64)
        return flat.astype(np.int64) @ weights
    # split into chunks that fit and recombine with Python ints
    chunk = 1
    while q ** (chunk + 1) < _INT64_SAFE:
        chunk += 1
    out = np.zeros(lead, dtype=object)
    for start in range(0, digits, chunk):
        part = flat[..., start : start + chunk]
        w = q ** np.arange(part.shape[-1] - 1, -1, -1, dtype=np.int64)
        out = out * (q ** part.shape[-1]) + (part.astype(np.int64) @ w).astype(object)
    return out


def rref_batch(a: np.ndarray, ctx: FqContext, ncols: int | None = None):
    """Reduced row echelon form of every matrix in a stack.

    Only the first ``ncols`` columns are used as pivot columns (the rest are
    carried along, e.g. an augmented identity).  Returns ``(R, rank)``.
    """
    a = np.array(a, dtype=np.int64, copy=True)
    squeeze = a.ndim == 2
    if squeeze:
        a = a[None]
    N, R, C = a.shape
    ncols = C if ncols is None else ncols
    rank = np.zeros(N, dtype=np.int64)
    rows = np.arange(R)
    for col in range(ncols):
        mask = (a[:, :, col] != 0) & (rows[None, :] >= rank[:, None])
        has = mask.any(axis=1)
        if not has.any():
            continue
        b = np.nonzero(has)[0]
        piv = np.argmax(mask[b], axis=1)
        rk = rank[b]
        prow = a[b, piv].copy()
        a[b, piv] = a[b, rk]
        a[b, rk] = ctx.mul(prow, ctx.inv(prow[:, col])[:, None])
        factors = a[b, :, col].copy()
        factors[np.arange(len(b)), rk] = 0
        a[b] = ctx.sub(a[b], ctx.mul(factors[:, :, None], a[b, rk][:, None, :]))
        rank[b] += 1
    if squeeze:
        return a[0], int(rank[0])
    return a, rank


def rank_batch(a: np.ndarray, ctx: FqContext) -> np.ndarray:
    return rref_batch(a, ctx)[1]


def rref(m: np.ndarray, ctx: FqContext) -> tuple[np.ndarray, list[int]]:
    """RREF of a single matrix, with its pivot columns."""
    r, rank = rref_batch(m, ctx)
    r = r[:rank]
    pivots = [int(np.flatnonzero(row)[0]) for row in r]
    return r, pivots


def nullspace(m: np.ndarray, ctx: FqContext) -> np.ndarray:
    """Basis (as rows) of {x : m @ x = 0}."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    r, pivots = rref(m, ctx)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, pc in enumerate(pivots):
            basis[i, pc] = ctx.neg(r[row, f])
    return basis


def inverse_batch(a: np.ndarray, ctx: FqContext) -> np.ndarray:
    """Inverse of every matrix in a stack of invertible matrices."""
    a = np.asarray(a, dtype=np.int64)
    N, n, _ = a.shape
    aug = np.concatenate([a, np.broadcast_to(np.eye(n, dtype=np.int64), (N, n, n))], axis=2)
    r, rank = rref_batch(aug, ctx, ncols=n)
    if np.any(rank < n):
        raise np.linalg.LinAlgError("singular matrix in inverse_batch")
    return r[:, :, n:]


def commutator_operator(a: np.ndarray, ctx: FqContext) -> np.ndarray:
    """Matrix of X -> XA - AX acting on row-major flattened X."""
    n = a.shape[0]
    eye = np.eye(n, dtype=np.int64)
    # entries of the Kronecker products are field codes times 0/1, so plain
    # integer kron is valid in any characteristic
    return ctx.sub(np.kron(eye, a.T), np.kron(a, eye))


class MatFq:
    """An immutable n x n matrix over F_q."""

    __slots__ = ("ctx", "a", "_key")

    def __init__(self, ctx: FqContext, entries):
        a = np.array(
            [[e.code if isinstance(e, FqElement) else e for e in row] for row in entries]
            if not isinstance(entries, np.ndarray)
            else entries,
            dtype=np.int64,
        )
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if ctx.prime:
            a = a % ctx.p
        elif a.min(initial=0) < 0 or a.max(initial=0) >= ctx.q:
            raise ValueError("entry codes out of range")
        a.setflags(write=False)
        self.ctx = ctx
        self.a = a
        self._key = None

    @classmethod
    def identity(cls, n: int, ctx: FqContext) -> "MatFq":
        return cls(ctx, np.eye(n, dtype=np.int64))

    @classmethod
    def zero(cls, n: int, ctx: FqContext) -> "MatFq":
        return cls(ctx, np.zeros((n, n), dtype=np.int64))

    @classmethod
    def scalar(cls, n: int, ctx: FqContext, c: int) -> "MatFq":
        return cls(ctx, np.eye(n, dtype=np.int64) * int(c))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def code(self) -> int:
        return int(encode(self.a, self.ctx.q, 2))

    def flat(self) -> np.ndarray:
        return self.a.reshape(-1)

    def __getitem__(self, ij) -> FqElement:
        return FqElement(self.ctx, int(self.a[ij]))

    def _same(self, other: "MatFq"):
        if not isinstance(other, MatFq) or other.ctx != self.ctx or other.n != self.n:
            raise ValueError("matrices must share field and size")

    def __matmul__(self, other: "MatFq") -> "MatFq":
        self._same(other)
        return MatFq(self.ctx, self.ctx.matmul(self.a, other.a))

    def __add__(self, other: "MatFq") -> "MatFq":
        self._same(other)
        return MatFq(self.ctx, self.ctx.add(self.a, other.a))

    def __sub__(self, other: "MatFq") -> "MatFq":
        self._same(other)
        return MatFq(self.ctx, self.ctx.sub(self.a, other.a))

    def scale(self, c: int) -> "MatFq":
        return MatFq(self.ctx, self.ctx.mul(self.a, int(c)))

    def rank(self) -> int:
        return rref_batch(self.a, self.ctx)[1]

    def inverse(self) -> "MatFq":
        if self.rank() < self.n:
            raise np.linalg.LinAlgError("matrix is singular")
        return MatFq(self.ctx, inverse_batch(self.a[None], self.ctx)[0])

    def commutes_with(self, other: "MatFq") -> bool:
        return (self @ other) == (other @ self)

    def __eq__(self, other):
        return isinstance(other, MatFq) and self.ctx == other.ctx and np.array_equal(self.a, other.a)

    def __hash__(self):
        if self._key is None:
            self._key = hash((self.ctx, self.a.shape, self.a.tobytes()))
        return self._key

    def __repr__(self):
        return "MatFq(" + repr(self.a.tolist()) + ")"

    def pretty(self) -> str:
        cells = [[repr(FqElement(self.ctx, int(x))) for x in row] for row in self.a]
        w = max(len(c) for row in cells for c in row)
        return "\n".join("[" + " ".join(c.rjust(w) for c in row) + "]" for row in cells)


def mat_mul(a: MatFq, b: MatFq) -> MatFq:
    return a @ b


def mat_inv(a: MatFq) -> MatFq:
    return a.inverse()


def mat_rank(a: MatFq) -> int:
    return a.rank()


class VecSpan:
    """A subspace of F_q^D stored by its reduced echelon basis.

    The echelon basis is canonical, so two spans are equal exactly when their
    bases are identical arrays.
    """

    __slots__ = ("ctx", "ambient_dim", "basis", "pivots", "_key")

    def __init__(self, ctx: FqContext, ambient_dim: int, basis: np.ndarray, pivots):
        basis = np.asarray(basis, dtype=np.int64).reshape(-1, ambient_dim)
        basis.setflags(write=False)
        self.ctx = ctx
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = tuple(pivots)
        self._key = None

    @classmethod
    def from_vectors(cls, ctx: FqContext, vectors, ambient_dim: int | None = None) -> "VecSpan":
        v = np.asarray(vectors, dtype=np.int64)
        if ambient_dim is None:
            ambient_dim = v.shape[-1]
        v = v.reshape(-1, ambient_dim)
        if len(v) == 0:
            return cls(ctx, ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64), ())
        r, pivots = rref(v, ctx)
        return cls(ctx, ambient_dim, r, pivots)

    @classmethod
    def full(cls, ctx: FqContext, ambient_dim: int) -> "VecSpan":
        return cls(ctx, ambient_dim, np.eye(ambient_dim, dtype=np.int64), range(ambient_dim))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = (self.ctx.q, self.ctx.modulus, self.ambient_dim, self.basis.tobytes())
        return self._key

    def __eq__(self, other):
        return isinstance(other, VecSpan) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"VecSpan(dim={self.dim}, ambient={self.ambient_dim})"

    def coords(self, v: np.ndarray) -> np.ndarray:
        """Coordinates of vectors assumed to lie in the span."""
        return np.asarray(v)[..., list(self.pivots)]

    def combine(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        if self.dim == 0:
            return np.zeros(coords.shape[:-1] + (self.ambient_dim,), dtype=np.int64)
        return self.ctx.matmul(coords, self.basis)

    def contains(self, v: np.ndarray) -> np.ndarray:
        """Membership test, vectorised over leading axes of v."""
        v = np.asarray(v, dtype=np.int64)
        return np.all(self.combine(self.coords(v)) == v, axis=-1)

    def is_subspace_of(self, other: "VecSpan") -> bool:
        return bool(np.all(other.contains(self.basis)))

    def elements(self) -> np.ndarray:
        """All q**dim vectors of the span; coordinate-lexicographic order,
        which coincides with lexicographic order of the vectors."""
        return self.combine(all_vectors(self.ctx.q, self.dim))

    def join(self, vectors) -> "VecSpan":
        v = np.asarray(vectors, dtype=np.int64).reshape(-1, self.ambient_dim)
        return VecSpan.from_vectors(self.ctx, np.concatenate([self.basis, v]), self.ambient_dim)


def commutator_nullspace(mats, n: int | None = None, ctx: FqContext | None = None) -> VecSpan:
    """Common centralizer {X : XA = AX for all A in mats} as a span of n*n vectors."""
    mats = list(mats)
    if mats:
        ctx = mats[0].ctx if isinstance(mats[0], MatFq) else ctx
        arrs = [m.a if isinstance(m, MatFq) else np.asarray(m, dtype=np.int64) for m in mats]
        n = arrs[0].shape[0]
    if ctx is None or n is None:
        raise ValueError("need n and ctx for an empty matrix list")
    if not mats:
        return VecSpan.full(ctx, n * n)
    system = np.concatenate([commutator_operator(a, ctx) for a in arrs])
    return VecSpan.from_vectors(ctx, nullspace(system, ctx), n * n)


def span_closure_product(s: VecSpan) -> VecSpan:
    """Smallest unital, multiplicatively closed span containing s."""
    ctx, D = s.ctx, s.ambient_dim
    n = int(round(D**0.5))
    cur = s.join(np.eye(n, dtype=np.int64).reshape(1, D))
    for _ in range(D + 1):
        mats = cur.basis.reshape(-1, n, n)
        prods = ctx.matmul(mats[:, None], mats[None, :]).reshape(-1, D)
        nxt = cur.join(prods)
        if nxt.dim == cur.dim:
            return cur
        cur = nxt
    raise AssertionError("product closure failed to stabilise")  # pragma: no cover
