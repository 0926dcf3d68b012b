"""Sign bookkeeping for the exterior algebra on dz^1..dz^n, dzbar^1..dzbar^n.

A basis element is written ``dz^I ^ dzbar^J`` with ``I`` and ``J`` strictly
increasing tuples of 0-based indices; holomorphic factors always come first.
Every helper returns ``(sign, I, J)`` for the canonically ordered result, or
``None`` when the result vanishes.  Both the spectral torus forms and the
exact polynomial forms build their operators from these rules, so the sign
conventions cannot drift apart.

Contraction follows ``(eta (x) d/dz^t) -| w = eta ^ (i_t w)`` with ``i_t``
the usual interior product (a graded derivation).
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterator, Optional, Tuple

Index = Tuple[int, ...]
Signed = Optional[Tuple[int, Index, Index]]


def index_sets(n: int, k: int) -> list[Index]:
    """Strictly increasing index tuples of size ``k`` in canonical order."""
    if k < 0 or k > n:
        return []
    return list(combinations(range(n), k))


def merge(a: Index, b: Index) -> Optional[Tuple[int, Index]]:
    """Sign and sorted union of ``dx^a ^ dx^b``; ``None`` if they overlap."""
    if set(a) & set(b):
        return None
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1) ** (inversions & 1), tuple(sorted(a + b))


def wedge(I1: Index, J1: Index, I2: Index, J2: Index) -> Signed:
    """(dz^I1 ^ dzb^J1) ^ (dz^I2 ^ dzb^J2) in canonical form."""
    mi = merge(I1, I2)
    if mi is None:
        return None
    mj = merge(J1, J2)
    if mj is None:
        return None
    # move dzb^J1 past dz^I2
    sign = mi[0] * mj[0] * (-1) ** ((len(J1) * len(I2)) & 1)
    return sign, mi[1], mj[1]


def interior(t: int, I: Index, J: Index) -> Signed:
    """i_{d/dz^t}(dz^I ^ dzb^J)."""
    if t not in I:
        return None
    pos = I.index(t)
    return (-1) ** (pos & 1), I[:pos] + I[pos + 1:], J


def contract(t: int, S: Index, I: Index, J: Index) -> Signed:
    """(dzb^S (x) d/dz^t) -| (dz^I ^ dzb^J) = dzb^S ^ i_t(dz^I ^ dzb^J)."""
    inner = interior(t, I, J)
    if inner is None:
        return None
    s0, I1, J1 = inner
    out = wedge((), S, I1, J1)
    if out is None:
        return None
    return s0 * out[0], out[1], out[2]


def dbar_basis(j: int, I: Index, J: Index) -> Signed:
    """dzb^j ^ (dz^I ^ dzb^J)."""
    return wedge((), (j,), I, J)


def del_basis(j: int, I: Index, J: Index) -> Signed:
    """dz^j ^ (dz^I ^ dzb^J)."""
    return wedge((j,), (), I, J)


def dual_top_sign(n: int, t: int, q: int) -> int:
    """Sign relating a tangent (0,q) form to its contraction with dz^1^..^dz^n.

    ``(dzb^J (x) d/dz^t) -| dz^{1..n} = sign * dz^{[n] minus t} ^ dzb^J`` and the
    inverse map (contraction with d/dz^1 ^ .. ^ d/dz^n) uses the same sign, so
    that the round trip is the identity.
    """
    return (-1) ** ((t + q * (n - 1)) & 1)


def bidegree_components(n: int, p: int, q: int) -> Iterator[Tuple[Index, Index]]:
    for I in index_sets(n, p):
        for J in index_sets(n, q):
            yield I, J
