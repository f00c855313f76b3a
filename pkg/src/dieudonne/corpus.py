"""A fixed family of small finite Dieudonne modules used by checks and tests."""

from __future__ import annotations

from .dmod import FinModule, direct_sum, dual, make_module, standard_module
from .zplin import PadicContext


def alpha(ctx: PadicContext) -> FinModule:
    """``Z/p`` with ``V = F = 0``."""
    return make_module(ctx, [1], [[0]], [[0]])


def small_corpus(ctx: PadicContext) -> dict:
    """Ten named modules; at ``(3, 1)`` each has order at most ``3^4``."""
    std = lambda kind, n=None, q=None: standard_module(ctx, kind, n, q)
    mods = {
        "unit": std("unit"),
        "dualizing": std("dualizing"),
        "twisted_dualizing": std("twisted_dualizing"),
        "alpha": alpha(ctx),
        "m2": std("morava", 2),
        "m3": std("morava", 3),
        "m4": std("morava", 4),
        "r31": std("rnq", 3, 1),
        "dual_m3": dual(std("morava", 3)),
        "unit+alpha": direct_sum(std("unit"), alpha(ctx)),
    }
    return mods
