"""Exact linear algebra over the integers and over the residue rings Z/p^nu.

Matrices are plain lists of rows holding Python integers.  Over ``Z/p^nu``
every routine reduces its entries into ``[0, p^nu)``.  Module elements are
row vectors; a matrix ``a`` acts on the right (``x -> x·a``) unless a function
says otherwise.

Because ``Z/p^nu`` is a local principal ideal ring, every nonzero residue is
``u·p^v`` with ``u`` a unit, so Smith and Howell forms only ever pivot on the
entry of least valuation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import networkx as nx

Matrix = list  # list[list[int]]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PadicContext:
    """An odd prime ``p`` and the precision ``nu``; arithmetic is mod ``p**nu``."""

    p: int
    nu: int

    def __post_init__(self):
        if self.p == 2:
            raise ValueError(
                "p=2 unsupported: the exterior Dieudonne algebra needs the extra "
                "condition that the circle product of two equal elements is zero, "
                "and twisted duality degenerates; only odd primes are handled"
            )
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.nu < 1:
            raise ValueError(f"nu must be >= 1, got {self.nu}")

    @property
    def modulus(self) -> int:
        return self.p**self.nu

    def val(self, x: int) -> int:
        """p-adic valuation of a residue, capped at ``nu`` (so ``val(0) == nu``)."""
        x %= self.modulus
        if x == 0:
            return self.nu
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def inverse(self, u: int) -> int:
        return pow(u, -1, self.modulus)


def valuation(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("valuation of zero is infinite")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# -- plain matrix helpers -------------------------------------------------


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def mat_mul(a: Matrix, b: Matrix, modulus: Optional[int] = None) -> Matrix:
    # row combinations skipping zeros: the matrices here are mostly sparse
    width = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * width
        for x, brow in zip(row, b):
            if x:
                for j, y in enumerate(brow):
                    if y:
                        acc[j] += x * y
        if modulus is not None:
            acc = [v % modulus for v in acc]
        out.append(acc)
    return out


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c: int, a: Matrix) -> Matrix:
    return [[c * x for x in row] for row in a]


def mat_pow(a: Matrix, k: int, modulus: Optional[int] = None) -> Matrix:
    result = identity(len(a))
    base = [row[:] for row in a]
    while k:
        if k & 1:
            result = mat_mul(result, base, modulus)
        base = mat_mul(base, base, modulus)
        k >>= 1
    return result


def mat_mod(a: Matrix, modulus: int) -> Matrix:
    return [[x % modulus for x in row] for row in a]


def vec_mat(x: Sequence[int], a: Matrix, modulus: Optional[int] = None) -> list:
    """Row vector times matrix."""
    if not a:
        return []
    out = [0] * len(a[0])
    for xi, row in zip(x, a):
        if xi:
            for j, aij in enumerate(row):
                if aij:
                    out[j] += xi * aij
    if modulus is not None:
        out = [v % modulus for v in out]
    return out


def mat_vec(a: Matrix, x: Sequence[int], modulus: Optional[int] = None) -> list:
    """Matrix times column vector."""
    out = [sum(aij * xj for aij, xj in zip(row, x)) for row in a]
    if modulus is not None:
        out = [v % modulus for v in out]
    return out


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    na, nb = len(a), len(b)
    out = zeros(na + nb, na + nb)
    for i in range(na):
        out[i][:na] = a[i]
    for i in range(nb):
        out[na + i][na:] = b[i]
    return out


# -- Smith form over Z/p^nu ----------------------------------------------


class SmithForm(NamedTuple):
    """``u·a·w`` is diagonal with entries ``p**vals[i]`` (``vals[i] == nu`` means 0).

    ``vals`` has one entry per column of ``a``; columns beyond the rank get
    ``nu``.  ``u`` is ``None`` when the caller did not ask for it.
    """

    vals: list
    u: Optional[Matrix]
    w: Matrix
    w_inv: Matrix
    rank: int


def smith_mod(a: Matrix, ctx: PadicContext, cols: Optional[int] = None,
              want_u: bool = False) -> SmithForm:
    M = ctx.modulus
    p = ctx.p
    r = len(a)
    c = cols if cols is not None else (len(a[0]) if a else 0)
    A = [[x % M for x in row] for row in a]
    U = identity(r) if want_u else None
    W = identity(c)
    Winv = identity(c)
    vals = [ctx.nu] * c
    k = 0
    while k < min(r, c):
        best = None
        for i in range(k, r):
            row = A[i]
            for j in range(k, c):
                x = row[j]
                if x:
                    v = ctx.val(x)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        if i != k:
            A[i], A[k] = A[k], A[i]
            if U is not None:
                U[i], U[k] = U[k], U[i]
        if j != k:
            for row in A:
                row[j], row[k] = row[k], row[j]
            for row in W:
                row[j], row[k] = row[k], row[j]
            Winv[j], Winv[k] = Winv[k], Winv[j]
        pv = p**v
        unit = A[k][k] // pv
        uinv = ctx.inverse(unit)
        if uinv != 1:
            A[k] = [(x * uinv) % M for x in A[k]]
            if U is not None:
                U[k] = [(x * uinv) % M for x in U[k]]
        rowk = A[k]
        for i2 in range(k + 1, r):
            x = A[i2][k]
            if x:
                f = x // pv
                A[i2] = [(y - f * z) % M for y, z in zip(A[i2], rowk)]
                if U is not None:
                    U[i2] = [(y - f * z) % M for y, z in zip(U[i2], U[k])]
        for j2 in range(k + 1, c):
            x = rowk[j2]
            if x:
                f = x // pv
                rowk[j2] = 0
                for row in W:
                    row[j2] = (row[j2] - f * row[k]) % M
                Winv[k] = [(y + f * z) % M for y, z in zip(Winv[k], Winv[j2])]
        vals[k] = v
        k += 1
    return SmithForm(vals, U, W, Winv, k)


def invariant_factors(a: Matrix, ctx: PadicContext, cols: Optional[int] = None) -> list:
    """Exponents ``e`` (sorted) with rowspan(a) = sum of Z/p^e, zeros dropped."""
    sf = smith_mod(a, ctx, cols)
    return sorted(ctx.nu - v for v in sf.vals[: sf.rank] if v < ctx.nu)


# -- Howell form ----------------------------------------------------------


def howell_form(a: Matrix, ctx: PadicContext) -> tuple:
    """Howell normal form ``h`` of the row span of ``a`` and ``t`` with ``t·a == h``.

    Pivots are powers of ``p``, entries above a pivot ``p^v`` lie in
    ``[0, p^v)``, and the span of the rows whose leading column is at least
    ``j`` contains every span element vanishing in the first ``j`` columns.
    ``h`` has no zero rows, so ``t`` is rectangular in general.
    """
    M = ctx.modulus
    p = ctx.p
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pending = []
    for i, row in enumerate(a):
        comb = [0] * nrows
        comb[i] = 1
        pending.append(([x % M for x in row], comb))
    result = []  # (row, comb, pivot column, pivot valuation)
    for col in range(ncols):
        live = [item for item in pending if item[0][col]]
        if not live:
            continue
        rest = [item for item in pending if not item[0][col]]
        best = min(range(len(live)), key=lambda t: ctx.val(live[t][0][col]))
        prow, pcomb = live.pop(best)
        v = ctx.val(prow[col])
        pv = p**v
        uinv = ctx.inverse(prow[col] // pv)
        prow = [(x * uinv) % M for x in prow]
        pcomb = [(x * uinv) % M for x in pcomb]
        for row, comb in live:
            f = row[col] // pv
            row2 = [(x - f * y) % M for x, y in zip(row, prow)]
            comb2 = [(x - f * y) % M for x, y in zip(comb, pcomb)]
            if any(row2):
                rest.append((row2, comb2))
        if v > 0:
            s = p ** (ctx.nu - v)
            ann = [(s * x) % M for x in prow]
            if any(ann):
                rest.append((ann, [(s * x) % M for x in pcomb]))
        result.append([prow, pcomb, col, v])
        pending = rest
    for i, (row_i, comb_i, col_i, v_i) in enumerate(result):
        pv = p**v_i
        for j in range(i):
            row_j, comb_j = result[j][0], result[j][1]
            f = row_j[col_i] // pv
            if f:
                result[j][0] = [(x - f * y) % M for x, y in zip(row_j, row_i)]
                result[j][1] = [(x - f * y) % M for x, y in zip(comb_j, comb_i)]
    h = [item[0] for item in result]
    t = [item[1] for item in result]
    return h, t


# -- solving ---------------------------------------------------------------


def kernel_mod(a: Matrix, ctx: PadicContext) -> Matrix:
    """Rows generating ``{x : x·a = 0}`` over ``Z/p^nu``."""
    nrows = len(a)
    if nrows == 0:
        return []
    ncols = len(a[0])
    if ncols == 0:
        return identity(nrows)
    M = ctx.modulus
    # x·a = 0  <=>  a^T x^T = 0; use the Smith form of a^T so U carries x.
    sf = smith_mod(transpose(a), ctx, cols=nrows)
    out = []
    for i in range(nrows):
        v = sf.vals[i] if i < sf.rank else ctx.nu
        if v == 0:
            continue
        s = ctx.p ** (ctx.nu - v)
        out.append([(s * row[i]) % M for row in sf.w])
    return out


class Solution(NamedTuple):
    particular: Matrix
    kernel: Matrix


def solve_mod(a: Matrix, b: Matrix, ctx: PadicContext) -> Optional[Solution]:
    """All ``x`` with ``x·a = b`` (one row of ``x`` per row of ``b``), or ``None``."""
    M = ctx.modulus
    nrows = len(a)
    ncols = len(a[0]) if a else len(b[0]) if b else 0
    kern = kernel_mod(a, ctx) if a else []
    if nrows == 0:
        if all(not any(x % M for x in row) for row in b):
            return Solution([[] for _ in b], [])
        return None
    sf = smith_mod(a, ctx, cols=ncols, want_u=True)
    # u·a·w = D  =>  x·a = b  <=>  (x·u^{-1})·D = b·w.  Let z = x·u^{-1}.
    particular = []
    for brow in b:
        target = vec_mat(brow, sf.w, M)
        z = [0] * nrows
        for j in range(ncols):
            tj = target[j]
            if j < sf.rank:
                v = sf.vals[j]
                pv = ctx.p**v
                if tj % pv:
                    return None
                z[j] = (tj // pv) % M
            elif tj:
                return None
        particular.append(vec_mat(z, sf.u, M))
    return Solution(particular, kern)


# -- finite abelian p-groups inside (Z/p^nu)^m -------------------------------


class Span:
    """The submodule of ``(Z/p^nu)^m`` generated by some rows, with a cyclic basis."""

    def __init__(self, rows: Matrix, m: int, ctx: PadicContext):
        self.ctx = ctx
        self.m = m
        sf = smith_mod(rows, ctx, cols=m) if rows else SmithForm([ctx.nu] * m, None, identity(m), identity(m), 0)
        self._sf = sf
        M = ctx.modulus
        self.basis = []
        self.orders = []
        self._slots = []
        for i in range(sf.rank):
            v = sf.vals[i]
            if v >= ctx.nu:
                continue
            pv = ctx.p**v
            self.basis.append([(pv * x) % M for x in sf.w_inv[i]])
            self.orders.append(ctx.nu - v)
            self._slots.append(i)

    @property
    def log_order(self) -> int:
        return sum(self.orders)

    def coords(self, x: Sequence[int]) -> Optional[list]:
        """Coordinates of ``x`` in ``self.basis`` or ``None`` if ``x`` is outside."""
        ctx = self.ctx
        z = vec_mat(x, self._sf.w, ctx.modulus)
        out = []
        used = set(self._slots)
        for i, e in zip(self._slots, self.orders):
            v = ctx.nu - e
            pv = ctx.p**v
            if z[i] % pv:
                return None
            out.append((z[i] // pv) % (ctx.p**e))
        for i in range(self.m):
            if i not in used and z[i]:
                return None
        return out

    def contains(self, x: Sequence[int]) -> bool:
        return self.coords(x) is not None


class Quotient:
    """``(Z/p^nu)^n`` modulo the span of ``relations``, as a sum of cyclic groups.

    ``lifts[k]`` is a vector representing generator ``k`` (of order
    ``p**orders[k]``) and ``coords`` maps any vector to its class.
    """

    def __init__(self, relations: Matrix, n: int, ctx: PadicContext):
        self.ctx = ctx
        self.n = n
        sf = smith_mod(relations, ctx, cols=n)
        self._w = sf.w
        vals = list(sf.vals)
        for i in range(sf.rank, n):
            vals[i] = ctx.nu
        self._slots = [i for i in range(n) if vals[i] > 0]
        self.orders = [vals[i] for i in self._slots]
        self.lifts = [list(sf.w_inv[i]) for i in self._slots]

    @property
    def log_order(self) -> int:
        return sum(self.orders)

    def coords(self, x: Sequence[int]) -> list:
        z = vec_mat(x, self._w, self.ctx.modulus)
        p = self.ctx.p
        return [z[i] % (p**e) for i, e in zip(self._slots, self.orders)]


def embed_scale(orders: Sequence[int], ctx: PadicContext) -> list:
    """Scalars embedding ``sum Z/p^e_i`` into ``(Z/p^nu)^g`` coordinatewise."""
    return [ctx.p ** (ctx.nu - e) for e in orders]


def hom_kernel(a: Matrix, src_orders: Sequence[int], dst_orders: Sequence[int],
               ctx: PadicContext) -> Matrix:
    """Generators of the kernel of ``x -> x·a`` from ``sum Z/p^src`` to ``sum Z/p^dst``.

    ``a`` must define a well-defined homomorphism.  The returned rows are
    reduced mod the source orders.
    """
    M = ctx.modulus
    if not src_orders:
        return []
    if not dst_orders:
        rows = identity(len(src_orders))
    else:
        scale = embed_scale(dst_orders, ctx)
        scaled = [[(x * s) % M for x, s in zip(row, scale)] for row in a]
        rows = kernel_mod(scaled, ctx)
    p = ctx.p
    out = []
    for row in rows:
        r = [x % (p**e) for x, e in zip(row, src_orders)]
        if any(r):
            out.append(r)
    return out


# -- characteristic polynomial and Newton polygon ---------------------------


def _berkowitz(a: Matrix) -> list:
    """Coefficients of det(x·I - a), highest degree first, division free."""
    n = len(a)
    if n == 0:
        return [1]
    vect = [1, -a[0][0]]
    for r in range(1, n):
        row = a[r][:r]
        col = [a[i][r] for i in range(r)]
        sub = [a[i][:r] for i in range(r)]
        q = [1, -a[r][r]]
        s = col
        for _ in range(r):
            q.append(-sum(x * y for x, y in zip(row, s)))
            s = mat_vec(sub, s)
        vect = [
            sum(q[i - j] * vect[j] for j in range(len(vect)) if 0 <= i - j < len(q))
            for i in range(r + 2)
        ]
    return vect


def _poly_mul(f: list, g: list) -> list:
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x:
            for j, y in enumerate(g):
                out[i + j] += x * y
    return out


def charpoly_exact(a: Matrix) -> tuple:
    """Characteristic polynomial ``det(x·I - a)`` as coefficients ``(c_0, ..., c_n)``.

    The matrix is first split along the strongly connected components of its
    support graph (a block triangular form), then Berkowitz's division-free
    recursion runs on each diagonal block.
    """
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("charpoly_exact needs a square matrix")
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((i, j) for i in range(n) for j in range(n) if a[i][j])
    poly = [1]
    for comp in sorted(nx.strongly_connected_components(g), key=min):
        idx = sorted(comp)
        block = [[a[i][j] for j in idx] for i in idx]
        poly = _poly_mul(poly, _berkowitz(block))
    return tuple(reversed(poly))


def poly_eval_matrix(coeffs: Sequence[int], a: Matrix) -> Matrix:
    """Evaluate an integer polynomial (low degree first) at a square matrix."""
    n = len(a)
    out = zeros(n, n)
    for c in reversed(coeffs):
        out = mat_mul(out, a)
        for i in range(n):
            out[i][i] += c
    return out


@dataclass(frozen=True, order=True)
class NewtonSlope:
    slope: Fraction
    multiplicity: int

    def __post_init__(self):
        if self.slope < 0 or self.multiplicity < 1:
            raise ValueError("invalid Newton slope")
        if self.multiplicity % self.slope.denominator:
            raise ValueError("slope denominator must divide its multiplicity")

    def __str__(self):
        return f"{self.slope}^{self.multiplicity}"


def newton_slopes(poly: Sequence[int], p: int) -> list:
    """Slopes of the Newton polygon of a monic polynomial (low degree first).

    Each slope is the common p-adic valuation of the roots on one segment of
    the lower convex hull of ``(i, v_p(c_i))``; the multiplicity is the
    horizontal length.  Returned in increasing slope order.
    """
    poly = list(poly)
    if not poly or poly[-1] != 1:
        raise ValueError("newton_slopes needs a monic polynomial")
    if poly[0] == 0:
        raise ValueError("zero constant term: a root of infinite valuation")
    pts = [(i, valuation(c, p)) for i, c in enumerate(poly) if c]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] unless it lies strictly below the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes = {}
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y1 - y2, x2 - x1)
        slopes[s] = slopes.get(s, 0) + (x2 - x1)
    return sorted(NewtonSlope(s, m) for s, m in slopes.items())
