"""Chain complexes over F_p as a model category.

Weak equivalences are quasi-isomorphisms, fibrations are degreewise
surjections and cofibrations are degreewise injections.  Every object is
fibrant and cofibrant, so the structure is right proper.

Conventions
-----------
* ``X.d(n)`` is the differential X_n -> X_{n-1}, a ``dim(n-1) x dim(n)`` matrix.
* ``f[n]`` is the degree-n component of a chain map, ``tgt.dim(n) x src.dim(n)``.
* A homotopy h between f and g has components h_n: X_n -> Y_{n+1} with
  ``f - g = d h + h d``.
* The path object is ``P(Y)_n = Y_n + Y_n + Y_{n+1}`` with
  ``d(a, b, c) = (da, db, a - b - dc)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .linfp import (
    FieldCtx,
    complement,
    cokernel_projection,
    inverse,
    is_injective,
    is_surjective,
    kernel_basis,
    matmul,
    random_matrix,
    rank,
    solve,
)


class LiftError(ValueError):
    """A lifting problem violates its preconditions or has no solution."""


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=np.int64)
    m.flags.writeable = False
    return m


def _coerce(ctx: FieldCtx, m, rows: int, cols: int, what: str) -> np.ndarray:
    a = np.asarray(m, dtype=np.int64)
    if a.shape != (rows, cols):
        if a.size == 0 and rows * cols == 0:
            return ctx.zeros(rows, cols)
        raise ValueError(f"{what}: expected shape {rows}x{cols}, got {a.shape}")
    return a % ctx.p


def _blocks(ctx: FieldCtx, rows: list[list[np.ndarray]]) -> np.ndarray:
    return np.vstack([np.hstack(r) for r in rows]) % ctx.p


class ChainComplex:
    """A finitely supported chain complex of F_p-vector spaces."""

    def __init__(self, ctx: FieldCtx, dims: Mapping[int, int], d: Mapping[int, object] | None = None,
                 *, check: bool = True):
        self.ctx = ctx
        self._dims = {int(n): int(k) for n, k in dims.items() if int(k) > 0}
        if any(k < 0 for k in self._dims.values()):
            raise ValueError("negative dimension")
        self.support = tuple(sorted(self._dims))
        self._d: dict[int, np.ndarray] = {}
        for n, m in (d or {}).items():
            n = int(n)
            a = _coerce(ctx, m, self.dim(n - 1), self.dim(n), f"d({n})")
            if a.any():
                self._d[n] = _frozen(a)
        self._split = None
        if check:
            self.validate()

    def dim(self, n: int) -> int:
        return self._dims.get(n, 0)

    @property
    def dims(self) -> dict[int, int]:
        return dict(self._dims)

    def d(self, n: int) -> np.ndarray:
        m = self._d.get(n)
        if m is None:
            return self.ctx.zeros(self.dim(n - 1), self.dim(n))
        return m

    def span(self) -> range:
        """Degrees from the bottom to the top of the support (empty if zero)."""
        if not self.support:
            return range(0)
        return range(self.support[0], self.support[-1] + 1)

    def validate(self):
        for n in self.support:
            if self.dim(n - 1) and self.dim(n - 2):
                if matmul(self.d(n - 1), self.d(n), self.ctx).any():
                    raise ValueError(f"d({n - 1})·d({n}) != 0")

    def is_zero(self) -> bool:
        return not self.support

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        if self is other:
            return True
        if self.ctx != other.ctx or self._dims != other._dims:
            return False
        return all(np.array_equal(self.d(n), other.d(n)) for n in self.support)

    __hash__ = None

    def __repr__(self):
        return f"ChainComplex(p={self.ctx.p}, dims={self._dims})"


def _same(X: ChainComplex, Y: ChainComplex) -> bool:
    return X is Y or X == Y


def _span(*cxs: ChainComplex) -> range:
    supp = [n for X in cxs for n in X.support]
    if not supp:
        return range(0)
    return range(min(supp), max(supp) + 1)


class ChainMap:
    """A chain map ``src -> tgt`` given by its degree components."""

    def __init__(self, src: ChainComplex, tgt: ChainComplex, comps: Mapping[int, object] | None = None,
                 *, check: bool = True):
        if src.ctx != tgt.ctx:
            raise ValueError("source and target live over different fields")
        self.src, self.tgt, self.ctx = src, tgt, src.ctx
        self._f: dict[int, np.ndarray] = {}
        for n, m in (comps or {}).items():
            n = int(n)
            a = _coerce(self.ctx, m, tgt.dim(n), src.dim(n), f"component {n}")
            if a.any():
                self._f[n] = _frozen(a)
        if check:
            self.validate()

    def __getitem__(self, n: int) -> np.ndarray:
        m = self._f.get(n)
        if m is None:
            return self.ctx.zeros(self.tgt.dim(n), self.src.dim(n))
        return m

    def degrees(self) -> range:
        return _span(self.src, self.tgt)

    def validate(self):
        ctx = self.ctx
        for n in range(self.degrees().start, self.degrees().stop + 1):
            lhs = matmul(self.tgt.d(n), self[n], ctx)
            rhs = matmul(self[n - 1], self.src.d(n), ctx)
            if not np.array_equal(lhs, rhs):
                raise ValueError(f"not a chain map: d·f({n}) != f({n - 1})·d")

    def is_zero(self) -> bool:
        return not self._f

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """Composition ``self ∘ other``."""
        if not _same(other.tgt, self.src):
            raise ValueError("maps are not composable")
        comps = {n: matmul(self[n], other[n], self.ctx) for n in other.src.support if self.tgt.dim(n)}
        return ChainMap(other.src, self.tgt, comps, check=False)

    def _check_parallel(self, other):
        if not (_same(self.src, other.src) and _same(self.tgt, other.tgt)):
            raise ValueError("maps are not parallel")

    def __add__(self, other: "ChainMap") -> "ChainMap":
        self._check_parallel(other)
        return ChainMap(self.src, self.tgt, {n: self[n] + other[n] for n in self.degrees()}, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        self._check_parallel(other)
        return ChainMap(self.src, self.tgt, {n: self[n] - other[n] for n in self.degrees()}, check=False)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.src, self.tgt, {n: -m for n, m in self._f.items()}, check=False)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        if not (_same(self.src, other.src) and _same(self.tgt, other.tgt)):
            return False
        return all(np.array_equal(self[n], other[n]) for n in self.degrees())

    __hash__ = None

    def __repr__(self):
        return f"ChainMap({self.src.dims} -> {self.tgt.dims})"


# -- basic objects ---------------------------------------------------------

def zero_complex(ctx: FieldCtx) -> ChainComplex:
    return ChainComplex(ctx, {})


def sphere(ctx: FieldCtx, n: int, k: int = 1) -> ChainComplex:
    """S(n): F_p^k concentrated in degree n."""
    return ChainComplex(ctx, {n: k})


def disc(ctx: FieldCtx, n: int) -> ChainComplex:
    """D(n): F_p in degrees n and n-1 with identity differential."""
    return ChainComplex(ctx, {n: 1, n - 1: 1}, {n: [[1]]})


def identity(X: ChainComplex) -> ChainMap:
    return ChainMap(X, X, {n: X.ctx.eye(X.dim(n)) for n in X.support}, check=False)


def zero_map(X: ChainComplex, Y: ChainComplex) -> ChainMap:
    return ChainMap(X, Y, {}, check=False)


def terminal_map(X: ChainComplex) -> ChainMap:
    return zero_map(X, zero_complex(X.ctx))


class DirectSum(NamedTuple):
    obj: ChainComplex
    inc: tuple[ChainMap, ...]
    proj: tuple[ChainMap, ...]


def direct_sum(*parts: ChainComplex) -> DirectSum:
    ctx = parts[0].ctx
    span = _span(*parts)
    dims = {n: sum(X.dim(n) for X in parts) for n in span}
    d = {}
    for n in span:
        d[n] = _block_diag(ctx, [X.d(n) for X in parts])
    S = ChainComplex(ctx, dims, d, check=False)
    inc, proj = [], []
    for k, X in enumerate(parts):
        ic, pc = {}, {}
        for n in X.support:
            off = sum(Y.dim(n) for Y in parts[:k])
            e = ctx.zeros(S.dim(n), X.dim(n))
            e[off:off + X.dim(n)] = ctx.eye(X.dim(n))
            ic[n], pc[n] = e, e.T.copy()
        inc.append(ChainMap(X, S, ic, check=False))
        proj.append(ChainMap(S, X, pc, check=False))
    return DirectSum(S, tuple(inc), tuple(proj))


def _block_diag(ctx: FieldCtx, mats: list[np.ndarray]) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = ctx.zeros(rows, cols)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def map_sum(maps: list[ChainMap], src: DirectSum, tgt: DirectSum) -> ChainMap:
    """Block-diagonal map ``⊕ src_k -> ⊕ tgt_k``."""
    ctx = src.obj.ctx
    comps = {n: _block_diag(ctx, [f[n] for f in maps]) for n in _span(src.obj, tgt.obj)}
    return ChainMap(src.obj, tgt.obj, comps, check=False)


def transport(X: ChainComplex, T: Mapping[int, np.ndarray]) -> tuple[ChainComplex, ChainMap, ChainMap]:
    """Change basis degreewise by invertible ``T[n]``; returns (X', iso, iso^-1)."""
    ctx = X.ctx
    Tn = {n: T.get(n, ctx.eye(X.dim(n))) for n in X.support}
    Ti = {n: inverse(Tn[n], ctx) for n in X.support}
    d = {}
    for n in X.support:
        if X.dim(n - 1):
            d[n] = matmul(matmul(Tn[n - 1], X.d(n), ctx), Ti[n], ctx)
    Y = ChainComplex(ctx, X.dims, d, check=False)
    return Y, ChainMap(X, Y, Tn, check=False), ChainMap(Y, X, Ti, check=False)


# -- homology and weak equivalences ----------------------------------------

def homology_dims(X: ChainComplex) -> dict[int, int]:
    """dim H_n for every degree with nonzero homology."""
    out = {}
    for n in X.support:
        h = X.dim(n) - rank(X.d(n), X.ctx) - rank(X.d(n + 1), X.ctx)
        if h:
            out[n] = h
    return out


def cone(f: ChainMap) -> ChainComplex:
    """Mapping cone: ``Cone_n = X_{n-1} + Y_n``, ``d(x, y) = (-dx, f x + dy)``."""
    X, Y, ctx = f.src, f.tgt, f.ctx
    base = _span(X, Y)
    span = range(base.start, base.stop + 1) if base else range(0)
    dims = {n: X.dim(n - 1) + Y.dim(n) for n in span}
    d = {}
    for n in span:
        d[n] = _blocks(ctx, [[-X.d(n - 1), ctx.zeros(X.dim(n - 2), Y.dim(n))],
                             [f[n - 1], Y.d(n)]])
    return ChainComplex(ctx, dims, d, check=False)


def is_weq(f: ChainMap) -> bool:
    """Quasi-isomorphism test: the mapping cone is acyclic."""
    return not homology_dims(cone(f))


def is_fibration(f: ChainMap) -> bool:
    return all(is_surjective(f[n], f.ctx) for n in f.tgt.support)


def is_cofibration(f: ChainMap) -> bool:
    return all(is_injective(f[n], f.ctx) for n in f.src.support)


class Splitting:
    """Degreewise decomposition ``X_n = B_n + H_n + C_n``.

    ``B_n = d(C_{n+1})`` are boundaries, ``H_n`` harmonic cycle
    representatives of homology and ``C_n`` a complement of the cycles.  The
    operator ``s`` inverts d from B back onto C and vanishes on H + C, so
    ``id - ds - sd`` is the projection onto H.
    """

    def __init__(self, X: ChainComplex):
        ctx = X.ctx
        self.X = X
        self.gens: dict[int, np.ndarray] = {}
        span = X.span()
        cyc = {n: kernel_basis(X.d(n), ctx) for n in span}
        for n in span:
            self.gens[n] = complement(cyc[n], ctx)
        self.bnd, self.harm, self.coords, self.tinv, self._s = {}, {}, {}, {}, {}
        for n in span:
            C_up = self.gens.get(n + 1, ctx.zeros(X.dim(n + 1), 0))
            B = matmul(X.d(n + 1), C_up, ctx)
            beta = solve(cyc[n], B, ctx)
            H = matmul(cyc[n], complement(beta, ctx), ctx)
            Tinv = inverse(np.hstack([B, H, self.gens[n]]), ctx)
            nb, nh = B.shape[1], H.shape[1]
            self.bnd[n], self.harm[n], self.tinv[n] = B, H, Tinv
            self.coords[n] = Tinv[nb:nb + nh]
            self._s[n] = matmul(C_up, Tinv[:nb], ctx)

    def s(self, n: int) -> np.ndarray:
        """The splitting X_n -> X_{n+1}."""
        m = self._s.get(n)
        return self.X.ctx.zeros(self.X.dim(n + 1), self.X.dim(n)) if m is None else m

    def H(self, n: int) -> np.ndarray:
        m = self.harm.get(n)
        return self.X.ctx.zeros(self.X.dim(n), 0) if m is None else m

    def pi(self, n: int) -> np.ndarray:
        m = self.coords.get(n)
        return self.X.ctx.zeros(0, self.X.dim(n)) if m is None else m

    def proj(self, n: int) -> np.ndarray:
        return matmul(self.H(n), self.pi(n), self.X.ctx)


def splitting(X: ChainComplex) -> Splitting:
    if X._split is None:
        X._split = Splitting(X)
    return X._split


def homology_map(f: ChainMap) -> dict[int, np.ndarray]:
    """Matrices of H_n(f) in the harmonic bases of source and target."""
    sx, sy = splitting(f.src), splitting(f.tgt)
    out = {}
    for n in f.degrees():
        m = matmul(matmul(sy.pi(n), f[n], f.ctx), sx.H(n), f.ctx)
        if m.size:
            out[n] = m
    return out


# -- path objects, limits, colimits ----------------------------------------

class PathObject(NamedTuple):
    P: ChainComplex
    w: ChainMap        # Y -> P, (id, id, 0)
    pr: ChainMap       # P -> Y + Y, (a, b)
    ends: tuple[ChainMap, ChainMap]   # the two evaluations P -> Y


def path_object(Y: ChainComplex) -> PathObject:
    ctx = Y.ctx
    span = range(Y.span().start - 1, Y.span().stop) if Y.support else range(0)
    dims = {n: 2 * Y.dim(n) + Y.dim(n + 1) for n in span}
    d = {}
    for n in span:
        y0, y1, y2 = Y.dim(n - 1), Y.dim(n), Y.dim(n + 1)
        I = ctx.eye(y1)
        z = ctx.zeros
        d[n] = _blocks(ctx, [[Y.d(n), z(y0, y1), z(y0, y2)],
                             [z(y0, y1), Y.d(n), z(y0, y2)],
                             [I, -I, -Y.d(n + 1)]])
    P = ChainComplex(ctx, dims, d)
    YY = direct_sum(Y, Y)
    w, pr, e0, e1 = {}, {}, {}, {}
    for n in Y.support:
        y1, y2 = Y.dim(n), Y.dim(n + 1)
        I, z = ctx.eye(y1), ctx.zeros
        w[n] = np.vstack([I, I, z(y2, y1)])
        e0[n] = np.hstack([I, z(y1, y1), z(y1, y2)])
        e1[n] = np.hstack([z(y1, y1), I, z(y1, y2)])
        pr[n] = np.vstack([e0[n], e1[n]])
    return PathObject(P, ChainMap(Y, P, w), ChainMap(P, YY.obj, pr),
                      (ChainMap(P, Y, e0), ChainMap(P, Y, e1)))


def path_map(b: ChainMap, PY: ChainComplex, PY2: ChainComplex) -> ChainMap:
    """Functoriality of the path object: ``(a, b, c) -> (ba, bb, bc)``."""
    comps = {n: _block_diag(b.ctx, [b[n], b[n], b[n + 1]]) for n in _span(PY, PY2)}
    return ChainMap(PY, PY2, comps)


@dataclass(frozen=True)
class Pullback:
    """The pullback of ``f: B -> D`` and ``g: C -> D`` inside B + C."""

    P: ChainComplex
    pi_b: ChainMap
    pi_c: ChainMap
    f: ChainMap
    g: ChainMap
    basis: dict = field(repr=False)


def pullback(f: ChainMap, g: ChainMap) -> Pullback:
    if not _same(f.tgt, g.tgt):
        raise ValueError("pullback needs a common target")
    B, C, ctx = f.src, g.src, f.ctx
    span = _span(B, C)
    K = {}
    for n in span:
        M = np.hstack([f[n], -g[n]]) % ctx.p
        K[n] = kernel_basis(M, ctx)
    dims = {n: K[n].shape[1] for n in span}
    d = {}
    for n in span:
        if dims[n] and dims.get(n - 1, 0):
            dBC = _block_diag(ctx, [B.d(n), C.d(n)])
            d[n] = solve(K[n - 1], matmul(dBC, K[n], ctx), ctx)
    P = ChainComplex(ctx, dims, d)
    nb = {n: B.dim(n) for n in span}
    pi_b = ChainMap(P, B, {n: K[n][:nb[n]] for n in span})
    pi_c = ChainMap(P, C, {n: K[n][nb[n]:] for n in span})
    return Pullback(P, pi_b, pi_c, f, g, K)


def universal_into_pullback(u: ChainMap, v: ChainMap, pb: Pullback) -> ChainMap:
    """The unique w with ``pi_b w = u`` and ``pi_c w = v``."""
    if not _same(u.src, v.src):
        raise ValueError("u and v need a common source")
    if (pb.f @ u) != (pb.g @ v):
        raise ValueError("f∘u != g∘v; no map into the pullback")
    A, ctx = u.src, u.ctx
    comps = {}
    for n in A.support:
        if pb.P.dim(n):
            w = solve(pb.basis[n], np.vstack([u[n], v[n]]), ctx)
            assert w is not None
            comps[n] = w
    return ChainMap(A, pb.P, comps)


@dataclass(frozen=True)
class Pushout:
    """The pushout ``D ⨿_C C'`` of ``g: C -> D`` and ``h: C -> C'``."""

    Q: ChainComplex
    iota_d: ChainMap
    iota_c: ChainMap
    g: ChainMap
    h: ChainMap
    proj: dict = field(repr=False)


def pushout(g: ChainMap, h: ChainMap) -> Pushout:
    if not _same(g.src, h.src):
        raise ValueError("pushout needs a common source")
    D, C2, ctx = g.tgt, h.tgt, g.ctx
    span = _span(g.src, D, C2)
    Pi = {}
    for n in span:
        Pi[n] = cokernel_projection(np.vstack([g[n], -h[n]]) % ctx.p, ctx)
    dims = {n: Pi[n].shape[0] for n in span}
    d = {}
    for n in span:
        if dims[n] and dims.get(n - 1, 0):
            rhs = matmul(Pi[n - 1], _block_diag(ctx, [D.d(n), C2.d(n)]), ctx)
            d[n] = solve(Pi[n].T, rhs.T, ctx).T
    Q = ChainComplex(ctx, dims, d)
    nd = {n: D.dim(n) for n in span}
    iota_d = ChainMap(D, Q, {n: Pi[n][:, :nd[n]] for n in span})
    iota_c = ChainMap(C2, Q, {n: Pi[n][:, nd[n]:] for n in span})
    return Pushout(Q, iota_d, iota_c, g, h, Pi)


def universal_from_pushout(alpha: ChainMap, beta: ChainMap, po: Pushout) -> ChainMap:
    """The unique w with ``w iota_d = alpha`` and ``w iota_c = beta``."""
    if not _same(alpha.tgt, beta.tgt):
        raise ValueError("alpha and beta need a common target")
    if (alpha @ po.g) != (beta @ po.h):
        raise ValueError("alpha∘g != beta∘h; no map out of the pushout")
    T, ctx = alpha.tgt, alpha.ctx
    comps = {}
    for n in po.Q.support:
        if T.dim(n):
            rhs = np.hstack([alpha[n], beta[n]])
            w = solve(po.proj[n].T, rhs.T, ctx)
            assert w is not None
            comps[n] = w.T
    return ChainMap(po.Q, T, comps)


# -- functorial factorization ----------------------------------------------

@dataclass(frozen=True)
class Factorization:
    """``f = q ∘ i`` through the mapping path space ``N_f = X ×_Y P(Y)``."""

    f: ChainMap
    mid: ChainComplex
    i: ChainMap
    q: ChainMap
    pb: Pullback = field(repr=False)
    path: PathObject = field(repr=False)


def factorize(f: ChainMap) -> Factorization:
    """Trivial cofibration followed by a fibration; functorial in f."""
    path = path_object(f.tgt)
    pb = pullback(f, path.ends[0])
    i = universal_into_pullback(identity(f.src), path.w @ f, pb)
    q = path.ends[1] @ pb.pi_c
    return Factorization(f, pb.P, i, q, pb, path)


def factorize_morphism(f: ChainMap, f2: ChainMap, a: ChainMap, b: ChainMap) -> ChainMap:
    """The map ``N_f -> N_f2`` induced by a commuting square ``b f = f2 a``."""
    if (b @ f) != (f2 @ a):
        raise ValueError("square does not commute: b∘f != f2∘a")
    F, F2 = factorize(f), factorize(f2)
    Pb = path_map(b, F.path.P, F2.path.P)
    return universal_into_pullback(a @ F.pb.pi_b, Pb @ F.pb.pi_c, F2.pb)


# -- homotopies ------------------------------------------------------------

@dataclass(frozen=True)
class ChainHomotopy:
    f: ChainMap
    g: ChainMap
    h: dict

    def component(self, n: int) -> np.ndarray:
        m = self.h.get(n)
        return self.f.ctx.zeros(self.f.tgt.dim(n + 1), self.f.src.dim(n)) if m is None else m

    def validate(self):
        f, g, ctx = self.f, self.g, self.f.ctx
        X, Y = f.src, f.tgt
        for n in f.degrees():
            lhs = (matmul(Y.d(n + 1), self.component(n), ctx)
                   + matmul(self.component(n - 1), X.d(n), ctx)) % ctx.p
            if not np.array_equal(lhs, (f[n] - g[n]) % ctx.p):
                raise ValueError(f"homotopy identity fails in degree {n}")


def chain_homotopy(f: ChainMap, g: ChainMap, method: str = "split") -> ChainHomotopy | None:
    """A homotopy ``f - g = dh + hd`` if one exists, else None."""
    f._check_parallel(g)
    e = f - g
    if method == "linear":
        h = _homotopy_linear(e)
    elif method == "split":
        h = _homotopy_split(e)
    else:
        raise ValueError(f"unknown method {method!r}")
    if h is None:
        return None
    H = ChainHomotopy(f, g, h)
    H.validate()
    return H


def _homotopy_split(e: ChainMap) -> dict | None:
    ctx, X, Y = e.ctx, e.src, e.tgt
    sx, sy = splitting(X), splitting(Y)
    for n in e.degrees():
        if matmul(matmul(sy.pi(n), e[n], ctx), sx.H(n), ctx).any():
            return None
    h = {}
    for n in range(e.degrees().start - 1, e.degrees().stop):
        if X.dim(n) and Y.dim(n + 1):
            h[n] = (matmul(sy.s(n), e[n], ctx)
                    + matmul(matmul(sy.proj(n + 1), e[n + 1], ctx), sx.s(n), ctx)) % ctx.p
    return h


def _vec(m: np.ndarray) -> np.ndarray:
    return m.flatten(order="F")


def _unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return v.reshape((rows, cols), order="F")


class _LinearSystem:
    """Unknown matrices stacked into one vector (column-major)."""

    def __init__(self, ctx: FieldCtx, shapes: dict):
        self.ctx, self.shapes, self.offset = ctx, shapes, {}
        pos = 0
        for key, (r, c) in shapes.items():
            self.offset[key] = pos
            pos += r * c
        self.size = pos
        self.rows: list[np.ndarray] = []
        self.rhs: list[np.ndarray] = []

    def add(self, terms: list[tuple[object, np.ndarray]], rhs: np.ndarray):
        """Add ``sum_k M_k vec(X_key_k) = vec(rhs)``."""
        block = self.ctx.zeros(rhs.size, self.size)
        for key, M in terms:
            if key not in self.offset:
                continue
            o = self.offset[key]
            block[:, o:o + M.shape[1]] = (block[:, o:o + M.shape[1]] + M) % self.ctx.p
        self.rows.append(block)
        self.rhs.append(_vec(rhs) % self.ctx.p)

    def solve(self, rng=None) -> dict | None:
        ctx = self.ctx
        if not self.rows:
            A = ctx.zeros(0, self.size)
            b = ctx.zeros(0, 1)
        else:
            A = np.vstack(self.rows)
            b = np.concatenate(self.rhs).reshape(-1, 1)
        x = solve(A, b, ctx)
        if x is None:
            return None
        x = x[:, 0]
        if rng is not None:
            K = kernel_basis(A, ctx)
            x = (x + matmul(K, random_matrix(K.shape[1], 1, ctx, rng), ctx)[:, 0]) % ctx.p
        return {key: _unvec(x[self.offset[key]:self.offset[key] + r * c], r, c)
                for key, (r, c) in self.shapes.items()}


def _homotopy_linear(e: ChainMap) -> dict | None:
    ctx, X, Y = e.ctx, e.src, e.tgt
    degs = range(e.degrees().start - 1, e.degrees().stop)
    shapes = {n: (Y.dim(n + 1), X.dim(n)) for n in degs if Y.dim(n + 1) and X.dim(n)}
    sysm = _LinearSystem(ctx, shapes)
    for n in e.degrees():
        if not (X.dim(n) and Y.dim(n)):
            continue
        sysm.add([(n, np.kron(ctx.eye(X.dim(n)), Y.d(n + 1))),
                  (n - 1, np.kron(X.d(n).T, ctx.eye(Y.dim(n))))], e[n])
    return sysm.solve()


# -- lifting ---------------------------------------------------------------

def lift(i: ChainMap, p: ChainMap, u: ChainMap, v: ChainMap, rng=None, method: str = "split") -> ChainMap:
    """Solve the lifting problem for a trivial cofibration i: X -> Z against a
    fibration p: E -> Y, given ``p u = v i``.  Returns l: Z -> E with
    ``l i = u`` and ``p l = v``.  With ``rng`` a random lift is chosen among
    all solutions.
    """
    X, Z, E, Y = i.src, i.tgt, p.src, p.tgt
    if not (_same(u.src, X) and _same(u.tgt, E) and _same(v.src, Z) and _same(v.tgt, Y)):
        raise LiftError("lifting data has mismatched sources/targets")
    if (p @ u) != (v @ i):
        raise LiftError("lifting square does not commute")
    if not is_cofibration(i):
        raise LiftError("left map is not levelwise injective")
    if not is_fibration(p):
        raise LiftError("right map is not levelwise surjective")
    if method == "linear":
        if not is_weq(i):
            raise LiftError("left map is not a quasi-isomorphism")
        comps = _lift_linear(i, p, u, v, rng)
        if comps is None:
            raise LiftError("no lift exists")
    elif method == "split":
        comps = _lift_split(i, p, u, v, rng)
    else:
        raise ValueError(f"unknown method {method!r}")
    ell = ChainMap(Z, E, comps)
    if (ell @ i) != u or (p @ ell) != v:
        raise RuntimeError("internal error: lift postconditions fail")
    return ell


def _lift_split(i, p, u, v, rng):
    # Z_n = i(X_n) + W_n; the quotient Q = Z/X is acyclic, so it is a sum of
    # discs.  Choose the lift freely on disc generators subject to p l = v;
    # the chain condition then fixes it on the boundaries.
    ctx, X, Z, E = i.ctx, i.src, i.tgt, p.src
    span = Z.span()
    W, xi, pi, Tinv = {}, {}, {}, {}
    for n in span:
        W[n] = complement(i[n], ctx)
        Tinv[n] = inverse(np.hstack([i[n], W[n]]), ctx)
        xi[n], pi[n] = Tinv[n][:X.dim(n)], Tinv[n][X.dim(n):]

    def get(dct, n, rows, cols):
        return dct.get(n, ctx.zeros(rows, cols))

    k = {n: W[n].shape[1] for n in span}
    dQ, tau = {}, {}
    for n in span:
        if n - 1 in W:
            dZW = matmul(Z.d(n), W[n], ctx)
            dQ[n] = matmul(pi[n - 1], dZW, ctx)
            tau[n] = matmul(xi[n - 1], dZW, ctx)
    Q = ChainComplex(ctx, k, dQ, check=False)
    sq = splitting(Q)
    if any(H.shape[1] for H in sq.harm.values()):
        raise LiftError("left map is not a quasi-isomorphism")
    lam_gen = {}
    for n in Q.support:
        G = sq.gens[n]
        target = matmul(matmul(v[n], W[n], ctx), G, ctx)
        x = solve(p[n], target, ctx)
        if x is None:
            raise LiftError("right map is not surjective")
        if rng is not None:
            K = kernel_basis(p[n], ctx)
            x = (x + matmul(K, random_matrix(K.shape[1], G.shape[1], ctx, rng), ctx)) % ctx.p
        lam_gen[n] = x
    comps = {}
    for n in span:
        if Q.dim(n):
            G_up = sq.gens.get(n + 1, ctx.zeros(Q.dim(n + 1), 0))
            lam_up = lam_gen.get(n + 1, ctx.zeros(E.dim(n + 1), 0))
            tau_up = get(tau, n + 1, X.dim(n), Q.dim(n + 1))
            on_bnd = (matmul(E.d(n + 1), lam_up, ctx)
                      - matmul(matmul(u[n], tau_up, ctx), G_up, ctx)) % ctx.p
            # Basis of Q_n is [boundaries | generators]; no harmonic part.
            lam = matmul(np.hstack([on_bnd, lam_gen[n]]), sq.tinv[n], ctx)
        else:
            lam = ctx.zeros(E.dim(n), 0)
        comps[n] = matmul(np.hstack([u[n], lam]), Tinv[n], ctx)
    return comps


def _lift_linear(i, p, u, v, rng):
    ctx, Z, E = i.ctx, i.tgt, p.src
    shapes = {n: (E.dim(n), Z.dim(n)) for n in Z.support if E.dim(n)}
    sysm = _LinearSystem(ctx, shapes)
    for n in Z.support:
        if not E.dim(n):
            continue
        if i.src.dim(n):
            sysm.add([(n, np.kron(i[n].T, ctx.eye(E.dim(n))))], u[n])
        if p.tgt.dim(n):
            sysm.add([(n, np.kron(ctx.eye(Z.dim(n)), p[n]))], v[n])
    for n in range(Z.span().start, Z.span().stop + 1):
        if Z.dim(n) and E.dim(n - 1):
            sysm.add([(n, np.kron(ctx.eye(Z.dim(n)), E.d(n))),
                      (n - 1, -np.kron(Z.d(n).T, ctx.eye(E.dim(n - 1))))],
                     ctx.zeros(E.dim(n - 1), Z.dim(n)))
    sol = sysm.solve(rng)
    return sol
