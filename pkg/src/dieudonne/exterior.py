"""The exterior lattice of ``M = R/(V^(n-1) - F)`` with its Dieudonne structure.

``M`` is free over the p-adic integers on ``a_0, ..., a_{n-1}`` with
``V a_0 = p a_{n-1}``, ``V a_i = a_{i-1}`` and ``F = V^(n-1)``.  On the degree
``q`` part ``Lambda^q`` (basis ``a_I``, ``I`` a sorted ``q``-subset in
lexicographic order) ``V`` and ``F`` are defined recursively::

    V a_I = V(a_{i_1} ^ ... ^ a_{i_{q-1}}) ^ a_{i_q - 1}
    F a_I = a_{i_1 + 1} ^ F(a_{i_2} ^ ... ^ a_{i_q})

with ``Lambda^1 = M`` and ``Lambda^0`` the unit (``V = 1``, ``F = p``).
Everything here is exact integer arithmetic; ``reduce_mod`` passes to
``Z/p^nu``.

Elements are dicts mapping sorted index tuples to integer coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

from . import zplin
from .dmod import FinModule, make_module, dual, twisted_dual
from .zplin import PadicContext


def basis(n: int, q: int) -> list:
    return list(itertools.combinations(range(n), q))


def sort_sign(indices) -> tuple:
    """``(sign, sorted_tuple)`` for a wedge of ``a_i``; sign 0 on a repeat."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def _add(acc: dict, key, c):
    if c:
        v = acc.get(key, 0) + c
        if v:
            acc[key] = v
        else:
            acc.pop(key, None)


def wedge(x: dict, y: dict, n: int = None) -> dict:
    """Exterior product of two elements; indices may be unsorted on input."""
    out = {}
    for kx, cx in x.items():
        for ky, cy in y.items():
            s, key = sort_sign(kx + ky)
            if s:
                _add(out, key, s * cx * cy)
    if n is not None and any(len(k) > n for k in out):
        raise ValueError("degree exceeds n")
    return out


def scale(c: int, x: dict) -> dict:
    return {k: c * v for k, v in x.items() if c * v}


def add(x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        _add(out, k, v)
    return out


def monomial(*indices) -> dict:
    s, key = sort_sign(indices)
    return {key: s} if s else {}


class ExteriorAction:
    """Recursive V and F on the exterior algebra of ``M`` for fixed ``n`` and ``p``."""

    def __init__(self, n: int, p: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.p = p
        self.V = lru_cache(maxsize=None)(self._V)
        self.F = lru_cache(maxsize=None)(self._F)

    def V_M(self, i: int) -> dict:
        return {(self.n - 1,): self.p} if i == 0 else {(i - 1,): 1}

    def F_M(self, i: int) -> dict:
        x = {(i,): 1}
        for _ in range(self.n - 1):
            x = self.apply_linear(self.V_M, x)
        return x

    @staticmethod
    def apply_linear(op, x: dict) -> dict:
        out = {}
        for (i,), c in x.items():
            for k, v in op(i).items():
                _add(out, k, c * v)
        return out

    def _V(self, I: tuple) -> dict:
        q = len(I)
        if q == 0:
            return {(): 1}
        if q == 1:
            return self.V_M(I[0])
        return wedge(self.V(I[:-1]), monomial(I[-1] - 1))

    def _F(self, I: tuple) -> dict:
        q = len(I)
        if q == 0:
            return {(): self.p}
        if q == 1:
            return self.F_M(I[0])
        return wedge(monomial(I[0] + 1), self.F(I[1:]))

    def apply(self, op, x: dict) -> dict:
        """Extend ``op`` (defined on sorted basis tuples) linearly, sorting inputs."""
        out = {}
        for k, c in x.items():
            s, key = sort_sign(k)
            if s:
                for k2, c2 in op(key).items():
                    _add(out, k2, s * c * c2)
        return out

    def V_componentwise(self, indices) -> dict:
        """``V a_{i_1} ^ ... ^ V a_{i_q}`` (the multiplicative form of V)."""
        out = {(): 1}
        for i in indices:
            out = wedge(out, self.V_M(i))
        return out


def _matrix(op, n, q) -> list:
    b = basis(n, q)
    pos = {I: k for k, I in enumerate(b)}
    mat = zplin.zeros(len(b), len(b))
    for j, I in enumerate(b):
        for K, c in op(I).items():
            mat[pos[K]][j] += c
    return mat


@dataclass(frozen=True)
class LambdaLattice:
    n: int
    q: int
    p: int
    basis: tuple
    V: tuple
    F: tuple

    @property
    def rank(self) -> int:
        return len(self.basis)


def build_lattice(n: int, q: int, p: int) -> LambdaLattice:
    """Exact integer V and F on ``Lambda^q`` of ``M = R/(V^(n-1) - F)``."""
    if n < 1 or not 0 <= q <= n:
        raise ValueError(f"need n >= 1 and 0 <= q <= n, got n={n}, q={q}")
    act = ExteriorAction(n, p)
    V = _matrix(act.V, n, q)
    F = _matrix(act.F, n, q)
    return LambdaLattice(n, q, p, tuple(basis(n, q)),
                         tuple(map(tuple, V)), tuple(map(tuple, F)))


def pairing(x: dict, y: dict, n: int) -> int:
    """``<x, y>`` defined by ``x ^ y = <x, y> a_*`` (zero unless degrees add to n)."""
    return wedge(x, y).get(tuple(range(n)), 0)


def pairing_matrix(n: int, q: int) -> list:
    """``P[I][J] = <a_I, a_J>`` for ``|I| = q``, ``|J| = n - q``."""
    rows, cols = basis(n, q), basis(n, n - q)
    return [[pairing({I: 1}, {J: 1}, n) for J in cols] for I in rows]


def check_structure(lat: LambdaLattice) -> list:
    """Exact identities a lattice must satisfy; returns the violated ones."""
    n, q, p = lat.n, lat.q, lat.p
    V, F = [list(r) for r in lat.V], [list(r) for r in lat.F]
    r = lat.rank
    pid = zplin.mat_scale(p, zplin.identity(r))
    bad = []
    if zplin.mat_mul(V, F) != pid:
        bad.append("VF = p")
    if zplin.mat_mul(F, V) != pid:
        bad.append("FV = p")
    if 1 <= q <= n - 1 and zplin.mat_pow(V, n - q) != zplin.mat_pow(F, q):
        bad.append("V^(n-q) = F^q")
    if zplin.mat_pow(V, n) != zplin.mat_scale(p**q, zplin.identity(r)):
        bad.append("V^n = p^q")
    if q == n:
        sign = (-1) ** (n - 1)
        if V != [[sign * p]]:
            bad.append("V a_* = (-1)^(n-1) p a_*")
        if F != [[sign]]:
            bad.append("F a_* = (-1)^(n-1) a_*")
    return bad


def check_pairing_identity(n: int, q: int, p: int) -> bool:
    """``V_q^T P = (-1)^(n-1) P F_{n-q}`` exactly."""
    P = pairing_matrix(n, q)
    Vq = [list(r) for r in build_lattice(n, q, p).V]
    Fc = [list(r) for r in build_lattice(n, n - q, p).F]
    lhs = zplin.mat_mul(zplin.transpose(Vq), P)
    rhs = zplin.mat_scale((-1) ** (n - 1), zplin.mat_mul(P, Fc))
    return lhs == rhs


def is_signed_permutation(P) -> bool:
    if P and len(P) != len(P[0]):
        return False
    for line in list(P) + zplin.transpose(P):
        nz = [x for x in line if x]
        if len(nz) != 1 or abs(nz[0]) != 1:
            return False
    return True


def reduce_mod(lat: LambdaLattice, ctx: PadicContext) -> FinModule:
    if ctx.p != lat.p:
        raise ValueError("prime mismatch")
    return make_module(ctx, [ctx.nu] * lat.rank, lat.V, lat.F)


def duality_map(n: int, q: int, ctx: PadicContext):
    """The pairing map ``Lambda^q(M_nu) -> D Lambda^(n-q)(M_nu)``.

    ``D`` is the plain dual for odd ``n`` and the twisted dual for even ``n``.
    Returns ``(matrix, source, target)``; the matrix is ``P^T`` mod ``p^nu``.
    """
    src = reduce_mod(build_lattice(n, q, ctx.p), ctx)
    other = reduce_mod(build_lattice(n, n - q, ctx.p), ctx)
    tgt = dual(other) if n % 2 else twisted_dual(other)
    h = zplin.mat_mod(zplin.transpose(pairing_matrix(n, q)), ctx.modulus)
    return h, src, tgt


def expected_rank(n: int, q: int) -> int:
    return comb(n, q)
