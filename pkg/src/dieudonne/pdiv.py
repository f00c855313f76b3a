"""Invariants of p-divisible groups read off their Dieudonne lattices."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from . import zplin
from .exterior import LambdaLattice
from .zplin import NewtonSlope


@dataclass(frozen=True)
class Lattice:
    """A free module of finite rank over the p-adic integers with exact V and F."""

    p: int
    V: tuple
    F: tuple

    def __post_init__(self):
        V = tuple(tuple(r) for r in self.V)
        F = tuple(tuple(r) for r in self.F)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "F", F)
        r = len(V)
        if len(F) != r or any(len(row) != r for row in V + F):
            raise ValueError("V and F must be square of the same size")
        pid = zplin.mat_scale(self.p, zplin.identity(r))
        if zplin.mat_mul(V, F) != pid or zplin.mat_mul(F, V) != pid:
            raise ValueError("VF = FV = p fails")

    @property
    def rank(self) -> int:
        return len(self.V)

    @classmethod
    def from_lambda(cls, lat: LambdaLattice) -> "Lattice":
        return cls(lat.p, lat.V, lat.F)


def multiplicative(p: int) -> Lattice:
    return Lattice(p, [[p]], [[1]])


def etale(p: int) -> Lattice:
    return Lattice(p, [[1]], [[p]])


class PdivInvariants(NamedTuple):
    height: int
    dimension: int
    smooth: bool


def _rank_mod_p(a, p) -> int:
    ctx = zplin.PadicContext(p, 1)
    return zplin.smith_mod(a, ctx, cols=len(a)).rank if a else 0


def _nilpotent_mod_p(a, p) -> bool:
    r = len(a)
    if r == 0:
        return True
    return not any(x % p for row in zplin.mat_pow(a, r, p) for x in row)


def invariants(l: Lattice) -> PdivInvariants:
    r = l.rank
    dim = r - _rank_mod_p(l.V, l.p)
    return PdivInvariants(r, dim, _nilpotent_mod_p(l.V, l.p))


def serre_dual(l: Lattice, twisted: bool = False) -> Lattice:
    """Swap F and V through the transpose; the twisted dual also negates both."""
    s = -1 if twisted else 1
    return Lattice(l.p, zplin.mat_scale(s, zplin.transpose(l.F)),
                   zplin.mat_scale(s, zplin.transpose(l.V)))


@dataclass(frozen=True)
class IsogenyType:
    """Slopes of F and the simple components ``(n0, q0, multiplicity)``.

    A slope ``a/b`` in lowest terms belongs to ``R_{b, b-a}``, of rank ``b``.
    """

    slopes: tuple
    components: tuple

    @property
    def height(self) -> int:
        return sum(n0 * m for n0, _, m in self.components)

    @property
    def hasse(self) -> tuple:
        return tuple(Fraction(q0, n0) for n0, q0, _ in self.components)

    def slope_multiset(self) -> Counter:
        return Counter({s.slope: s.multiplicity for s in self.slopes})


def isogeny_type(l: Lattice) -> IsogenyType:
    poly = zplin.charpoly_exact([list(r) for r in l.F])
    slopes = zplin.newton_slopes(poly, l.p)
    comps = []
    for s in slopes:
        a, b = s.slope.numerator, s.slope.denominator
        if s.multiplicity % b:
            raise ValueError(
                f"non-integral decomposition: slope {s.slope} has multiplicity {s.multiplicity}")
        comps.append((b, b - a, s.multiplicity // b))
    return IsogenyType(tuple(slopes), tuple(comps))


def combine(*types: IsogenyType) -> IsogenyType:
    """The isogeny type of a direct sum."""
    total = Counter()
    for t in types:
        total.update(t.slope_multiset())
    slopes = tuple(NewtonSlope(s, m) for s, m in sorted(total.items()))
    comps = []
    for s in slopes:
        b = s.slope.denominator
        comps.append((b, b - s.slope.numerator, s.multiplicity // b))
    return IsogenyType(slopes, tuple(comps))


class ManinVerdict(NamedTuple):
    symmetric: bool
    supersingular: bool
    algebraicizable_possible: bool


def manin_check(t: IsogenyType) -> ManinVerdict:
    ms = t.slope_multiset()
    mirrored = Counter({1 - s: m for s, m in ms.items()})
    symmetric = ms == mirrored
    supersingular = bool(ms) and set(ms) == {Fraction(1, 2)}
    return ManinVerdict(symmetric, supersingular, symmetric)
