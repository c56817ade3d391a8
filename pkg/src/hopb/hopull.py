"""Homotopy pullbacks, model squares and homotopy fiber squares."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import chain
from .chain import (
    ChainComplex,
    ChainMap,
    factorize,
    homology_dims,
    is_weq,
    pullback,
    universal_into_pullback,
)
from .cospan import (
    Cospan,
    Mode,
    Replacement,
    Sigma,
    fibrant_replace,
)


@dataclass(frozen=True, eq=False)
class CommSquare:
    """A commutative square::

        A --u--> B
        |        |
        v        f
        |        |
        C --g--> D
    """

    u: ChainMap
    v: ChainMap
    X: Cospan

    def __post_init__(self):
        if not chain._same(self.u.src, self.v.src):
            raise ValueError("u and v must share their source")
        if not (chain._same(self.u.tgt, self.X.B) and chain._same(self.v.tgt, self.X.C)):
            raise ValueError("u, v do not land in the cospan's B and C")
        if (self.X.f @ self.u) != (self.X.g @ self.v):
            raise ValueError("square does not commute: f∘u != g∘v")

    @property
    def A(self) -> ChainComplex:
        return self.u.src


@dataclass(frozen=True, eq=False)
class HopullResult:
    sigma: Sigma
    mode: Mode
    replacement: Replacement
    pb: chain.Pullback
    homology: dict

    @property
    def P(self) -> ChainComplex:
        return self.pb.P


def homotopy_pullback(X: Cospan, sigma: Sigma = Sigma.INJ, mode: Mode = Mode.FUNCTORIAL) -> HopullResult:
    """Pullback of the sigma-fibrant replacement of X."""
    R = fibrant_replace(X, sigma, mode)
    pb = pullback(R.tgt.f, R.tgt.g)
    return HopullResult(sigma, mode, R, pb, homology_dims(pb.P))


def cocone_oracle(X: Cospan) -> dict[int, int]:
    """Homology of ``E_n = B_n + C_n + D_{n+1}``, ``d(b, c, w) = (db, dc, fb - gc - dw)``.

    Test oracle only: never called by the constructions in this package.
    """
    B, C, D, ctx = X.B, X.C, X.D, X.D.ctx
    supp = [n for Y in (B, C) for n in Y.support] + [n - 1 for n in D.support]
    if not supp:
        return {}
    degs = range(min(supp), max(supp) + 2)
    dims = {n: B.dim(n) + C.dim(n) + D.dim(n + 1) for n in degs}
    d = {}
    for n in degs:
        z = ctx.zeros
        rows = [
            [B.d(n), z(B.dim(n - 1), C.dim(n)), z(B.dim(n - 1), D.dim(n + 1))],
            [z(C.dim(n - 1), B.dim(n)), C.d(n), z(C.dim(n - 1), D.dim(n + 1))],
            [X.f[n], -X.g[n], -D.d(n + 1)],
        ]
        d[n] = np.vstack([np.hstack(r) for r in rows]) % ctx.p
    return homology_dims(ChainComplex(ctx, dims, d))


def _universal_is_weq(S: CommSquare, mb: ChainMap, mc: ChainMap, f: ChainMap, g: ChainMap) -> bool:
    pb = pullback(f, g)
    return is_weq(universal_into_pullback(mb @ S.u, mc @ S.v, pb))


def is_model_square(S: CommSquare, sigma: Sigma = Sigma.INJ, mode: Mode = Mode.FUNCTORIAL) -> bool:
    """Does A map by a weak equivalence to the sigma homotopy pullback?"""
    R = fibrant_replace(S.X, sigma, mode)
    return _universal_is_weq(S, R.map.b, R.map.c, R.tgt.f, R.tgt.g)


def is_model_square_full(S: CommSquare) -> bool:
    """Model square for the full homotopy pullback.

    Uses the injective functorial replacement, which has both legs
    fibrations and so is fibrant in all three structures.
    """
    return is_model_square(S, Sigma.INJ, Mode.FUNCTORIAL)


def is_model_square_rp(S: CommSquare, leg: str) -> bool:
    """Right proper test: replace only one leg (``"first"`` = g, ``"second"`` = f)."""
    X = S.X
    if leg == "second":
        F = factorize(X.f)
        return _universal_is_weq(S, F.i, chain.identity(X.C), F.q, X.g)
    if leg == "first":
        F = factorize(X.g)
        return _universal_is_weq(S, chain.identity(X.B), F.i, X.f, F.q)
    raise ValueError(f"leg must be 'first' or 'second', got {leg!r}")


def is_homotopy_fiber_square(S: CommSquare) -> bool:
    """Is ``A -> Ξ(f) ×_D Ξ(g)`` a weak equivalence?"""
    Ff, Fg = factorize(S.X.f), factorize(S.X.g)
    return _universal_is_weq(S, Ff.i, Fg.i, Ff.q, Fg.q)


def paste(left: CommSquare, right: CommSquare) -> CommSquare:
    """Paste two adjacent squares::

        A --> B --> C
        |     |     |
        D --> E --> F

    ``left`` has corner A over the cospan D -> E <- B, ``right`` has corner B
    over E -> F <- C; they must share the column B -> E.
    """
    if not (chain._same(right.A, left.X.B) and right.v == left.X.f):
        raise ValueError("squares do not share the middle column")
    if not chain._same(right.X.C, left.X.D):
        raise ValueError("squares do not share the middle bottom node")
    total = Cospan(right.X.g @ left.X.g, right.X.f)
    return CommSquare(right.u @ left.u, left.v, total)


def transfer_verdict(S: CommSquare, S2: CommSquare, ws: tuple[ChainMap, ChainMap, ChainMap, ChainMap]) -> bool:
    """Model-square verdict of S, after checking the connectors S -> S2.

    ``ws = (wA, wB, wC, wD)`` must be weak equivalences with all four side
    faces commuting.
    """
    wA, wB, wC, wD = ws
    ends = [(wA, S.A, S2.A), (wB, S.X.B, S2.X.B), (wC, S.X.C, S2.X.C), (wD, S.X.D, S2.X.D)]
    for w, a, b in ends:
        if not (chain._same(w.src, a) and chain._same(w.tgt, b)):
            raise ValueError("connector has the wrong source or target")
    if (wB @ S.u) != (S2.u @ wA) or (wC @ S.v) != (S2.v @ wA):
        raise ValueError("connecting faces at A do not commute")
    if (wD @ S.X.f) != (S2.X.f @ wB) or (wD @ S.X.g) != (S2.X.g @ wC):
        raise ValueError("connecting faces at D do not commute")
    if not all(is_weq(w) for w in ws):
        raise ValueError("connectors must be weak equivalences")
    return is_model_square_full(S)
