"""Commuting tuples whose common centralizer is commutative of maximal dimension.

For n = 2l the tuple is A_1 = [[0, I_l], [0, 0]] together with
A_i = [[0, N_i], [0, 0]] (i = 2..l+1), where N_i is zero except for its last
row, which is the unit row vector e_{i-1}.  For n = 2l+1 the top-right block
is (l+1) x l: I_l stacked over a zero row for A_1, and a zero l x l block
over e_{i-1} for the others.  Either way the common centralizer is
F_q I + (top-right block), of dimension floor(n^2/4) + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Subalgebra, is_commutative, max_commutative_dim
from .field import FqContext
from .linalg import MatFq, commutator_nullspace


@dataclass
class WitnessTuple:
    n: int
    ctx: FqContext
    mats: list[MatFq]

    @property
    def expected_centralizer_dim(self) -> int:
        return max_commutative_dim(self.n)

    def prefix_centralizers(self) -> list[Subalgebra]:
        """Common centralizers of A_1, (A_1, A_2), ..., (A_1, ..., A_l0)."""
        return [
            Subalgebra(commutator_nullspace(self.mats[: i + 1]), self.n, check=False)
            for i in range(len(self.mats))
        ]

    def centralizer(self) -> Subalgebra:
        return Subalgebra(commutator_nullspace(self.mats), self.n, check=False)

    def pairwise_commuting(self) -> bool:
        return all(a.commutes_with(b) for a in self.mats for b in self.mats)

    def verify(self) -> bool:
        z = self.centralizer()
        return self.pairwise_commuting() and z.dim == self.expected_centralizer_dim and is_commutative(z)


def _block_tuple(top: int, bottom: int, ctx: FqContext) -> list[MatFq]:
    """A_1..A_{bottom+1} with a top x bottom upper-right block."""
    n = top + bottom
    l = bottom
    mats = []
    first = np.zeros((n, n), dtype=np.int64)
    first[:l, top : top + l] = np.eye(l, dtype=np.int64)
    mats.append(MatFq(ctx, first))
    for i in range(2, l + 2):
        a = np.zeros((n, n), dtype=np.int64)
        a[top - 1, top + i - 2] = 1  # last row of the block is e_{i-1}
        mats.append(MatFq(ctx, a))
    return mats


def witness_even(l: int, ctx: FqContext) -> WitnessTuple:
    """Witness for n = 2l."""
    if l < 1:
        raise ValueError("l must be >= 1")
    return WitnessTuple(2 * l, ctx, _block_tuple(l, l, ctx))


def witness_odd(l: int, ctx: FqContext) -> WitnessTuple:
    """Witness for n = 2l + 1."""
    if l < 1:
        raise ValueError("l must be >= 1")
    return WitnessTuple(2 * l + 1, ctx, _block_tuple(l + 1, l, ctx))


def witness_tuple(n: int, ctx: FqContext) -> WitnessTuple:
    if n == 1:
        return WitnessTuple(1, ctx, [MatFq(ctx, [[0]])])
    if n % 2 == 0:
        return witness_even(n // 2, ctx)
    return witness_odd(n // 2, ctx)
