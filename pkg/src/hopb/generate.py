"""Seeded random instances.

All randomness comes from :class:`random.Random` (Mersenne Twister
MT19937), whose output for a given integer seed is fixed across platforms
and Python versions.  Trial ``t`` of a run with seed ``s`` uses
``random.Random(s ^ t)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from . import linfp as la
from .chain import (
    ChainComplex,
    ChainMap,
    direct_sum,
    disc,
    identity,
    map_sum,
    pullback,
    pushout,
    sphere,
    splitting,
    transport,
    zero_complex,
)
from .cospan import Cospan, CospanMorphism, Replacement
from .hopull import CommSquare
from .linfp import FieldCtx


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    p: int = 5
    lo: int = -3
    hi: int = 6
    max_dim: int = 4
    trials: int = 1
    span: int = 3  # degrees occupied by one instance

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        try:
            FieldCtx(self.p)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if self.lo > self.hi:
            raise ConfigError(f"empty degree range [{self.lo}, {self.hi}]")
        if self.max_dim < 1:
            raise ConfigError("max_dim must be at least 1")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.span < 1:
            raise ConfigError("span must be at least 1")

    @property
    def ctx(self) -> FieldCtx:
        return FieldCtx(self.p)

    def trial_seed(self, trial: int) -> int:
        return self.seed ^ trial


class Gen:
    """Random complexes and maps in one shared degree window."""

    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.ctx = cfg.ctx
        self.rng = rng
        width = min(cfg.span, cfg.hi - cfg.lo + 1)
        start = rng.randint(cfg.lo, cfg.hi - width + 1)
        self.degs = range(start, start + width)

    def mat(self, rows: int, cols: int):
        return la.random_matrix(rows, cols, self.ctx, self.rng)

    def coin(self, p: float = 0.5) -> bool:
        return self.rng.random() < p

    # -- complexes -------------------------------------------------------

    def complex(self, max_dim: int | None = None) -> ChainComplex:
        """Random complex: each d(n) factors through ker d(n-1) with random rank."""
        ctx, top = self.ctx, self.cfg.max_dim if max_dim is None else max_dim
        dims = {n: self.rng.randint(0, top) for n in self.degs}
        d = {}
        for n in self.degs:
            prev = d.get(n - 1, ctx.zeros(dims.get(n - 2, 0), dims.get(n - 1, 0)))
            K = la.kernel_basis(prev, ctx) if dims.get(n - 1, 0) else ctx.zeros(0, 0)
            r = self.rng.randint(0, min(K.shape[1], dims[n]))
            d[n] = la.mul(ctx, K, self.mat(K.shape[1], r), self.mat(r, dims[n]))
        return ChainComplex(ctx, dims, d)

    def acyclic(self, max_discs: int | None = None) -> ChainComplex:
        """A scrambled direct sum of discs inside the window."""
        ctx = self.ctx
        top = self.cfg.max_dim // 2 if max_discs is None else max_discs
        k = self.rng.randint(0, max(top, 1))
        lo = self.degs.start + (1 if len(self.degs) > 1 else 0)
        parts = [disc(ctx, self.rng.randint(lo, self.degs.stop - 1)) for _ in range(k)]
        if not parts:
            return zero_complex(ctx)
        return self.scramble(direct_sum(*parts).obj)[0]

    def scramble(self, X: ChainComplex):
        """Random basis change; returns ``(X', iso: X -> X', iso_inv)``."""
        T = {n: la.random_invertible(X.dim(n), self.ctx, self.rng) for n in X.support}
        return transport(X, T)

    # -- maps ------------------------------------------------------------

    def null_map(self, X: ChainComplex, Y: ChainComplex) -> ChainMap:
        """``d h + h d`` for a random h of degree +1."""
        ctx = self.ctx
        h = {n: self.mat(Y.dim(n + 1), X.dim(n)) for n in X.support}
        comps = {}
        for n in X.support:
            a = la.matmul(Y.d(n + 1), h[n], ctx)
            if X.dim(n - 1):
                a = (a + la.matmul(h[n - 1], X.d(n), ctx)) % ctx.p
            comps[n] = a
        return ChainMap(X, Y, comps)

    def chain_map(self, X: ChainComplex, Y: ChainComplex) -> ChainMap:
        """Random harmonic part plus a random null-homotopic part."""
        ctx = self.ctx
        SX, SY = splitting(X), splitting(Y)
        comps = {}
        harmonic = self.coin(0.8)
        for n in X.support:
            if harmonic:
                R = self.mat(Y.dim(n), X.dim(n))
                comps[n] = la.mul(ctx, SY.proj(n), R, SX.proj(n))
        f = ChainMap(X, Y, comps)
        if self.coin(0.8):
            f = f + self.null_map(X, Y)
        return f

    def fibration_onto(self, D: ChainComplex) -> ChainMap:
        """Projection ``D + K -> D`` precomposed with a random basis change."""
        S = direct_sum(D, self.complex())
        B, _, inv = self.scramble(S.obj)
        return S.proj[0] @ inv

    def weq_onto(self, C: ChainComplex) -> ChainMap:
        """A weak equivalence ``B -> C`` with B = C plus discs, scrambled."""
        S = direct_sum(C, self.acyclic())
        B, _, inv = self.scramble(S.obj)
        g = S.proj[0] @ inv
        return g + self.null_map(B, C) if self.coin() else g

    def weq_from(self, B: ChainComplex) -> ChainMap:
        """A weak equivalence ``B -> C`` with C = B plus discs, scrambled."""
        S = direct_sum(B, self.acyclic())
        C, iso, _ = self.scramble(S.obj)
        g = iso @ S.inc[0]
        return g + self.null_map(B, C) if self.coin() else g

    # -- cospans and squares --------------------------------------------

    def cospan(self, ensure: str | None = None) -> Cospan:
        """``ensure`` in {None, "first", "second", "both"} forces fibration legs."""
        D = self.complex()
        legs = []
        for which in ("first", "second"):
            if ensure in (which, "both"):
                legs.append(self.fibration_onto(D))
            else:
                legs.append(self.chain_map(self.complex(), D))
        return Cospan(*legs)

    def positive_square(self, X: Cospan | None = None, pad: bool | None = None) -> CommSquare:
        """Strict pullback of a cospan with a fibration leg, optionally padded."""
        if X is None:
            X = self.cospan(self.rng.choice(["first", "second", "both"]))
        pb = pullback(X.f, X.g)
        u, v = pb.pi_b, pb.pi_c
        if self.coin() if pad is None else pad:
            w = self.weq_onto(pb.P)
            u, v = u @ w, v @ w
        return CommSquare(u, v, X)

    def negative_square(self, X: Cospan | None = None) -> CommSquare:
        """A positive square with a sphere summand added to A."""
        S = self.positive_square(X)
        extra = sphere(self.ctx, self.rng.choice(list(self.degs)), self.rng.randint(1, 2))
        A = direct_sum(S.A, extra)
        A2, _, inv = self.scramble(A.obj)
        r = A.proj[0] @ inv
        return CommSquare(S.u @ r, S.v @ r, S.X)

    def unlabeled_square(self, X: Cospan | None = None) -> CommSquare:
        """A random complex mapping into the strict pullback."""
        if X is None:
            X = self.cospan(self.rng.choice([None, "first", "second"]))
        pb = pullback(X.f, X.g)
        w = self.weq_onto(pb.P) if self.coin() else self.chain_map(self.complex(), pb.P)
        return CommSquare(pb.pi_b @ w, pb.pi_c @ w, X)

    def commuting_square(self):
        """``(f, f2, a, b)`` with ``b∘f = f2∘a``."""
        X = self.complex()
        f = self.chain_map(X, self.complex())
        a = self.chain_map(X, self.complex())
        po = pushout(f, a)
        f2, b = po.iota_c, po.iota_d
        if self.coin():
            r = self.chain_map(po.Q, self.complex())
            f2, b = r @ f2, r @ b
        return f, f2, a, b


# -- padding -----------------------------------------------------------------

def _pad_node(gen: Gen, X: ChainComplex):
    """``(X', w: X -> X', r: X' -> X)`` with X' = X plus discs, ``r∘w = id``."""
    S = direct_sum(X, gen.acyclic())
    X2, iso, inv = gen.scramble(S.obj)
    return X2, iso @ S.inc[0], S.proj[0] @ inv


def pad_square(gen: Gen, S: CommSquare):
    """Disc-padded copy S' of S and weq connectors ``(wA, wB, wC, wD)``."""
    X = S.X
    A2, wA, rA = _pad_node(gen, S.A)
    B2, wB, rB = _pad_node(gen, X.B)
    C2, wC, rC = _pad_node(gen, X.C)
    D2, wD, rD = _pad_node(gen, X.D)
    X2 = Cospan(wD @ X.g @ rC, wD @ X.f @ rB)
    S2 = CommSquare(wB @ S.u @ rA, wC @ S.v @ rA, X2)
    return S2, (wA, wB, wC, wD)


def pad_replacement(gen: Gen, R: Replacement) -> Replacement:
    """Another replacement of the same cospan: add acyclic summands.

    The new target keeps the fibration legs of R: D gains a summand P that
    both legs hit identically, C and B gain free acyclic summands sent to 0.
    """
    Y = R.tgt
    P = gen.acyclic()
    Sd = direct_sum(Y.D, P)
    Sc = direct_sum(Y.C, P, gen.acyclic())
    Sb = direct_sum(Y.B, P, gen.acyclic())
    gP = Sd.inc[0] @ Y.g @ Sc.proj[0] + Sd.inc[1] @ Sc.proj[1]
    fP = Sd.inc[0] @ Y.f @ Sb.proj[0] + Sd.inc[1] @ Sb.proj[1]
    _, tD, _ = gen.scramble(Sd.obj)
    _, tC, tCi = gen.scramble(Sc.obj)
    _, tB, tBi = gen.scramble(Sb.obj)
    Y2 = Cospan(tD @ gP @ tCi, tD @ fP @ tBi)
    m = R.map
    phi = CospanMorphism(R.src, Y2, tC @ Sc.inc[0] @ m.c, tD @ Sd.inc[0] @ m.d, tB @ Sb.inc[0] @ m.b)
    return Replacement(R.src, Y2, phi, R.sigma, R.mode)


# -- cospan sums ---------------------------------------------------------------

def cospan_sum(X: Cospan, Y: Cospan):
    """``X + Y`` with inclusions and projections as cospan morphisms."""
    Sc, Sd, Sb = direct_sum(X.C, Y.C), direct_sum(X.D, Y.D), direct_sum(X.B, Y.B)
    T = Cospan(map_sum([X.g, Y.g], Sc, Sd), map_sum([X.f, Y.f], Sb, Sd))
    inc = [CospanMorphism(Z, T, Sc.inc[k], Sd.inc[k], Sb.inc[k]) for k, Z in enumerate((X, Y))]
    proj = [CospanMorphism(T, Z, Sc.proj[k], Sd.proj[k], Sb.proj[k]) for k, Z in enumerate((X, Y))]
    return T, inc, proj


def constant_cospan(D: ChainComplex) -> Cospan:
    return Cospan(identity(D), identity(D))


def gen_cospan(cfg: GenConfig, ensure_fibration: str | None = None, trial: int = 0) -> Cospan:
    """Random cospan for trial ``trial`` of ``cfg``; deterministic in (cfg, trial)."""
    if ensure_fibration not in (None, "first", "second", "both"):
        raise ConfigError(f"ensure_fibration must be first, second or both, got {ensure_fibration!r}")
    return Gen(cfg, random.Random(cfg.trial_seed(trial))).cospan(ensure_fibration)

