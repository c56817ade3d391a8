"""Cospans ``C --g--> D <--f-- B`` of chain complexes and their three model
structures.

* ``Sigma.INJ``  -- injective structure (inverse Reedy degrees c=1, d=0, b=2);
  fibrant iff both legs are fibrations.
* ``Sigma.REE_I`` -- Reedy structure for degrees c=0, d=1, b=2;
  fibrant iff the second leg f is a fibration.
* ``Sigma.REE_D`` -- Reedy structure for degrees c=2, d=1, b=0;
  fibrant iff the first leg g is a fibration.

Weak equivalences are objectwise in all three.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from . import chain
from .chain import (
    ChainComplex,
    ChainMap,
    LiftError,
    factorize,
    identity,
    is_cofibration,
    is_fibration,
    is_weq,
    pullback,
    pushout,
    terminal_map,
    universal_from_pushout,
    universal_into_pullback,
    zero_complex,
    zero_map,
)

NODES = ("b", "c", "d")


class Sigma(enum.Enum):
    INJ = "inj"
    REE_I = "ree-i"
    REE_D = "ree-d"


class Mode(enum.Enum):
    FUNCTORIAL = "functorial"
    LOCAL = "local"


@dataclass(frozen=True, eq=False)
class Cospan:
    """``C --g--> D <--f-- B``; "first arrow" is g, "second arrow" is f."""

    g: ChainMap
    f: ChainMap

    def __post_init__(self):
        if not chain._same(self.g.tgt, self.f.tgt):
            raise ValueError("cospan legs must share their target")

    @property
    def C(self) -> ChainComplex:
        return self.g.src

    @property
    def D(self) -> ChainComplex:
        return self.g.tgt

    @property
    def B(self) -> ChainComplex:
        return self.f.src

    def node(self, r: str) -> ChainComplex:
        return {"b": self.B, "c": self.C, "d": self.D}[r]

    def __eq__(self, other):
        if not isinstance(other, Cospan):
            return NotImplemented
        return self is other or (self.g == other.g and self.f == other.f)

    __hash__ = None


def terminal_cospan(ctx) -> Cospan:
    z = zero_complex(ctx)
    return Cospan(identity(z), identity(z))


@dataclass(frozen=True, eq=False)
class CospanMorphism:
    src: Cospan
    tgt: Cospan
    c: ChainMap
    d: ChainMap
    b: ChainMap

    def __post_init__(self):
        for r in NODES:
            m = self[r]
            if not (chain._same(m.src, self.src.node(r)) and chain._same(m.tgt, self.tgt.node(r))):
                raise ValueError(f"component {r} has the wrong source or target")
        if (self.tgt.g @ self.c) != (self.d @ self.src.g):
            raise ValueError("square at c does not commute")
        if (self.tgt.f @ self.b) != (self.d @ self.src.f):
            raise ValueError("square at b does not commute")

    def __getitem__(self, r: str) -> ChainMap:
        return {"b": self.b, "c": self.c, "d": self.d}[r]

    def __matmul__(self, other: "CospanMorphism") -> "CospanMorphism":
        return CospanMorphism(other.src, self.tgt, self.c @ other.c, self.d @ other.d, self.b @ other.b)

    def __eq__(self, other):
        if not isinstance(other, CospanMorphism):
            return NotImplemented
        return all(self[r] == other[r] for r in NODES)

    __hash__ = None


def identity_morphism(X: Cospan) -> CospanMorphism:
    return CospanMorphism(X, X, identity(X.C), identity(X.D), identity(X.B))


def to_terminal(X: Cospan) -> CospanMorphism:
    T = terminal_cospan(X.D.ctx)
    return CospanMorphism(X, T, zero_map(X.C, T.C), zero_map(X.D, T.D), zero_map(X.B, T.B))


# -- latching / matching ---------------------------------------------------

# Node over which M_r is the limit (None means terminal), per structure.
_MATCHING = {
    Sigma.INJ: {"b": "d", "c": "d", "d": None},
    Sigma.REE_I: {"b": "d", "c": None, "d": None},
    Sigma.REE_D: {"b": None, "c": "d", "d": None},
}
_LATCHING = {
    Sigma.INJ: {"b": None, "c": None, "d": None},
    Sigma.REE_I: {"b": None, "c": None, "d": "c"},
    Sigma.REE_D: {"b": None, "c": None, "d": "b"},
}


def matching_object(X: Cospan, r: str, sigma: Sigma) -> ChainComplex:
    s = _MATCHING[sigma][r]
    return zero_complex(X.D.ctx) if s is None else X.node(s)


def latching_object(X: Cospan, r: str, sigma: Sigma) -> ChainComplex:
    s = _LATCHING[sigma][r]
    return zero_complex(X.D.ctx) if s is None else X.node(s)


def _leg(X: Cospan, r: str) -> ChainMap:
    return X.f if r == "b" else X.g


def relative_matching_map(phi: CospanMorphism, r: str, sigma: Sigma) -> ChainMap:
    """``X_r -> Y_r ×_{M_r Y} M_r X`` for phi: X -> Y."""
    if _MATCHING[sigma][r] is None:
        return phi[r]
    X, Y = phi.src, phi.tgt
    pb = pullback(_leg(Y, r), phi.d)
    return universal_into_pullback(phi[r], _leg(X, r), pb)


def relative_latching_map(phi: CospanMorphism, r: str, sigma: Sigma) -> ChainMap:
    """``X_r ⨿_{L_r X} L_r Y -> Y_r`` for phi: X -> Y."""
    s = _LATCHING[sigma][r]
    if s is None:
        return phi[r]
    X, Y = phi.src, phi.tgt
    po = pushout(_leg(X, s), phi[s])
    return universal_from_pushout(phi.d, _leg(Y, s), po)


def is_weq_cospan(phi: CospanMorphism) -> bool:
    return all(is_weq(phi[r]) for r in NODES)


def is_fibration_sigma(phi: CospanMorphism, sigma: Sigma) -> bool:
    return all(is_fibration(relative_matching_map(phi, r, sigma)) for r in NODES)


def is_cofibration_sigma(phi: CospanMorphism, sigma: Sigma) -> bool:
    return all(is_cofibration(relative_latching_map(phi, r, sigma)) for r in NODES)


def is_fibrant_sigma(X: Cospan, sigma: Sigma) -> bool:
    # Every chain complex is fibrant, so only the legs matter.
    if sigma is Sigma.INJ:
        return is_fibration(X.f) and is_fibration(X.g)
    if sigma is Sigma.REE_I:
        return is_fibration(X.f)
    return is_fibration(X.g)


# -- fibrant replacement ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class Replacement:
    src: Cospan
    tgt: Cospan
    map: CospanMorphism
    sigma: Sigma
    mode: Mode


def fibrant_replace(X: Cospan, sigma: Sigma, mode: Mode = Mode.FUNCTORIAL) -> Replacement:
    """Objectwise weak equivalence from X into a sigma-fibrant cospan.

    Functorial mode always factors the leg(s) that must become fibrations
    through the mapping path space; local mode returns the identity when X
    is already fibrant.
    """
    if mode is Mode.LOCAL and is_fibrant_sigma(X, sigma):
        return Replacement(X, X, identity_morphism(X), sigma, mode)
    g, f = X.g, X.f
    mc, mb = identity(X.C), identity(X.B)
    if sigma in (Sigma.INJ, Sigma.REE_I):
        Ff = factorize(X.f)
        f, mb = Ff.q, Ff.i
    if sigma in (Sigma.INJ, Sigma.REE_D):
        Fg = factorize(X.g)
        g, mc = Fg.q, Fg.i
    tgt = Cospan(g, f)
    return Replacement(X, tgt, CospanMorphism(X, tgt, mc, identity(X.D), mb), sigma, mode)


# Order in which a Reedy induction visits the nodes (by increasing degree).
_REEDY_ORDER = {
    Sigma.INJ: ("d", "c", "b"),
    Sigma.REE_I: ("c", "d", "b"),
    Sigma.REE_D: ("b", "d", "c"),
}


def lift_replacements(X: Cospan, R1: Replacement, R2: Replacement, rng=None) -> CospanMorphism:
    """A morphism l: R1.tgt -> R2.tgt with ``l ∘ R1.map = R2.map``.

    Built node by node in Reedy order: against the relative latching map of
    R1.map on the source side and the matching map of R2.tgt on the target
    side.  R1.map must be a sigma-trivial cofibration.
    """
    sigma = R1.sigma
    if R2.sigma is not sigma:
        raise LiftError("replacements belong to different model structures")
    if not (R1.src == X and R2.src == X):
        raise LiftError("replacements are not of the given cospan")
    if not (is_cofibration_sigma(R1.map, sigma) and is_weq_cospan(R1.map)):
        raise LiftError("first replacement map is not a trivial cofibration")
    if not is_fibrant_sigma(R2.tgt, sigma):
        raise LiftError("second replacement is not fibrant")
    Y1, Y2 = R1.tgt, R2.tgt
    ell: dict[str, ChainMap] = {}
    for r in _REEDY_ORDER[sigma]:
        # Source side: the latching map X_r ⨿ L_r(Y1) -> Y1_r.
        s = _LATCHING[sigma][r]
        if s is None:
            i, u = R1.map[r], R2.map[r]
        else:
            po = pushout(_leg(X, s), R1.map[s])
            i = universal_from_pushout(R1.map.d, _leg(Y1, s), po)
            u = universal_from_pushout(R2.map.d, _leg(Y2, s) @ ell[s], po)
        # Target side: the matching map of Y2 -> terminal.
        if _MATCHING[sigma][r] is None:
            p = terminal_map(Y2.node(r))
            v = terminal_map(Y1.node(r))
        else:
            p = _leg(Y2, r)
            v = ell["d"] @ _leg(Y1, r)
        ell[r] = chain.lift(i, p, u, v, rng=rng)
    out = CospanMorphism(Y1, Y2, ell["c"], ell["d"], ell["b"])
    if (out @ R1.map) != R2.map:
        raise RuntimeError("internal error: lift does not extend the replacement")
    return out


def limit(X: Cospan) -> chain.Pullback:
    """The strict pullback ``B ×_D C``."""
    return pullback(X.f, X.g)


def limit_map(phi: CospanMorphism, src_pb: chain.Pullback, tgt_pb: chain.Pullback) -> ChainMap:
    """``Lim(phi)`` between two pullbacks."""
    return universal_into_pullback(phi.b @ src_pb.pi_b, phi.c @ src_pb.pi_c, tgt_pb)
