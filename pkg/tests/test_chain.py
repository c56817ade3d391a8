import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import make_gen
from hopb import chain as ch
from hopb.chain import (
    ChainComplex,
    ChainMap,
    LiftError,
    chain_homotopy,
    direct_sum,
    disc,
    factorize,
    factorize_morphism,
    homology_dims,
    homology_map,
    identity,
    is_cofibration,
    is_fibration,
    is_weq,
    lift,
    path_object,
    pullback,
    pushout,
    sphere,
    universal_from_pushout,
    universal_into_pullback,
    zero_complex,
    zero_map,
)
from hopb.linfp import FieldCtx

F2, F5 = FieldCtx(2), FieldCtx(5)
seeds = st.integers(0, 2**32 - 1)
primes = st.sampled_from([2, 5])


def proj_S0_S1(ctx=F5):
    S = direct_sum(sphere(ctx, 0), sphere(ctx, 1))
    return S, S.proj[0]


# -- complexes and maps ---------------------------------------------------------

def test_complex_rejects_bad_differential():
    with pytest.raises(ValueError):
        ChainComplex(F5, {0: 1, 1: 1, 2: 1}, {1: [[1]], 2: [[1]]})
    with pytest.raises(ValueError):
        ChainComplex(F5, {0: 1, 1: 1}, {1: [[1, 1]]})


def test_chain_map_rejects_non_chain_map():
    D = disc(F5, 1)
    with pytest.raises(ValueError):
        ChainMap(D, D, {1: [[1]]})


def test_missing_components_are_zero():
    D = disc(F5, 1)
    f = ChainMap(D, D, {})
    assert f == zero_map(D, D)
    assert f[7].shape == (0, 0)


# -- homology ----------------------------------------------------------------------

def test_homology_examples():
    assert homology_dims(sphere(F5, 2)) == {2: 1}
    assert homology_dims(disc(F5, 1)) == {}
    X = ChainComplex(F2, {1: 2, 0: 1}, {1: [[1, 1]]})
    assert homology_dims(X) == {1: 1}


@given(seeds, st.sampled_from([2, 3]))
def test_homology_matches_enumeration(seed, p):
    X = make_gen(seed, p=p, max_dim=3).complex()
    assert homology_dims(X) == oracles.homology(X)


@given(seeds, primes)
def test_homology_map_cross_validates_weq(seed, p):
    g = make_gen(seed, p=p)
    X = g.complex()
    f = g.weq_from(X) if g.coin() else g.chain_map(X, g.complex())
    H = homology_map(f)
    hx, hy = homology_dims(f.src), homology_dims(f.tgt)
    iso = hx == hy and all(ch.rank(H[n], f.ctx) == hx[n] for n in hx)
    assert is_weq(f) == iso


# -- classifiers ----------------------------------------------------------------------

def test_weq_examples():
    z = zero_complex(F5)
    assert is_weq(identity(sphere(F5, 3)))
    assert is_weq(zero_map(z, disc(F5, 1)))
    assert not is_weq(zero_map(z, sphere(F5, 0)))


def test_fibration_cofibration_examples():
    S, pr = proj_S0_S1()
    assert is_fibration(pr)
    assert is_cofibration(S.inc[0])
    assert not is_fibration(zero_map(zero_complex(F5), sphere(F5, 0)))


@given(seeds, primes)
def test_two_out_of_three(seed, p):
    g = make_gen(seed, p=p)
    X = g.complex()
    f = g.weq_from(X) if g.coin() else g.chain_map(X, g.complex())
    h = g.weq_from(f.tgt) if g.coin() else g.chain_map(f.tgt, g.complex())
    verdicts = [is_weq(f), is_weq(h), is_weq(h @ f)]
    assert sum(verdicts) != 2


# -- path objects -----------------------------------------------------------------------

def test_path_object_examples():
    assert path_object(zero_complex(F5)).P.is_zero()
    P = path_object(sphere(F5, 0))
    assert P.P.dims == {-1: 1, 0: 2}
    assert homology_dims(P.P) == {0: 1}
    assert is_weq(P.w)
    assert homology_dims(path_object(disc(F5, 1)).P) == {}


@given(seeds, primes)
def test_path_object_properties(seed, p):
    Y = make_gen(seed, p=p).complex()
    P = path_object(Y)
    P.P.validate()
    assert is_weq(P.w)
    assert is_fibration(P.pr)
    YY = P.pr.tgt
    diag = ChainMap(Y, YY, {n: np.vstack([Y.ctx.eye(Y.dim(n))] * 2) for n in Y.support})
    assert P.pr @ P.w == diag
    for e in P.ends:
        assert e @ P.w == identity(Y)


# -- factorization ------------------------------------------------------------------------

def _fff_ok(f):
    F = factorize(f)
    F.mid.validate()
    return (F.q @ F.i) == f and is_cofibration(F.i) and is_weq(F.i) and is_fibration(F.q)


def test_factorize_examples():
    Y = sphere(F5, 0)
    assert _fff_ok(identity(Y))
    F = factorize(zero_map(zero_complex(F5), Y))
    assert homology_dims(F.mid) == {} and is_fibration(F.q)
    _, pr = proj_S0_S1()
    assert _fff_ok(pr)


@given(seeds, primes)
def test_factorize_random(seed, p):
    g = make_gen(seed, p=p)
    assert _fff_ok(g.chain_map(g.complex(), g.complex()))


def test_factorize_morphism_examples():
    Y = disc(F5, 1)
    f = identity(Y)
    m = factorize_morphism(f, f, identity(Y), identity(Y))
    assert m == identity(factorize(f).mid)
    g = make_gen(5)
    X = g.complex()
    f = g.chain_map(X, g.complex())
    # a is a trivial cofibration, so its pushout b along f is one too.
    a = direct_sum(X, g.acyclic(3)).inc[0]
    po = pushout(f, a)
    f2, b = po.iota_c, po.iota_d
    assert is_weq(a) and is_weq(b)
    assert is_weq(factorize_morphism(f, f2, a, b))
    z = zero_map(X, X)
    m0 = factorize_morphism(f, f, z, zero_map(f.tgt, f.tgt))
    F = factorize(f)
    assert m0 @ F.i == F.i @ z and F.q @ m0 == zero_map(F.mid, f.tgt)
    with pytest.raises(ValueError):
        factorize_morphism(identity(Y), identity(Y), identity(Y), zero_map(Y, Y))


@given(seeds, primes)
def test_factorize_morphism_natural(seed, p):
    g = make_gen(seed, p=p)
    f, f2, a, b = g.commuting_square()
    m = factorize_morphism(f, f2, a, b)
    F, F2 = factorize(f), factorize(f2)
    assert m @ F.i == F2.i @ a
    assert F2.q @ m == b @ F.q


# -- limits and colimits ----------------------------------------------------------------------

def test_pullback_examples():
    Y = make_gen(9).complex()
    pb = pullback(identity(Y), identity(Y))
    assert pb.P.dims == Y.dims and homology_dims(pb.P) == homology_dims(Y)
    S, pr = proj_S0_S1()
    z = zero_map(zero_complex(F5), sphere(F5, 0))
    pb = pullback(pr, z)
    assert pb.P.dims == {1: 1}
    assert homology_dims(pb.P) == {1: 1}


def test_universal_into_pullback_examples():
    g = make_gen(21)
    X = g.cospan("second")
    pb = pullback(X.f, X.g)
    assert universal_into_pullback(pb.pi_b, pb.pi_c, pb) == identity(pb.P)
    z = zero_complex(F5)
    w = universal_into_pullback(zero_map(z, X.B), zero_map(z, X.C), pb)
    assert w.is_zero()
    Y = g.complex()
    pb = pullback(identity(Y), identity(Y))
    w = universal_into_pullback(identity(Y), identity(Y), pb)
    assert is_weq(w) and all(w[n].shape[0] == w[n].shape[1] for n in Y.support)
    with pytest.raises(ValueError):
        universal_into_pullback(identity(Y), zero_map(Y, Y), pb)


@given(seeds, primes)
def test_pullback_properties(seed, p):
    g = make_gen(seed, p=p)
    X = g.cospan(g.rng.choice([None, "first", "second"]))
    pb = pullback(X.f, X.g)
    pb.P.validate()
    assert X.f @ pb.pi_b == X.g @ pb.pi_c
    # (pi_b, pi_c) jointly injective.
    for n in pb.P.support:
        both = np.vstack([pb.pi_b[n], pb.pi_c[n]])
        assert ch.rank(both, pb.P.ctx) == pb.P.dim(n)


def test_pushout_examples():
    C = make_gen(4).complex()
    D = make_gen(5).complex()
    g = make_gen(6).chain_map(C, D)
    po = pushout(g, identity(C))
    assert po.Q.dims == D.dims and homology_dims(po.Q) == homology_dims(D)
    z = zero_complex(F5)
    po = pushout(zero_map(z, D), zero_map(z, C))
    assert po.Q.dims == {n: D.dim(n) + C.dim(n) for n in set(D.support) | set(C.support)}
    # S(0) <- S(0) -> D(1): the pushout is D(1) again.
    S0, D1 = sphere(F5, 0), disc(F5, 1)
    po = pushout(identity(S0), ChainMap(S0, D1, {0: [[1]]}))
    assert po.Q.dims == {0: 1, 1: 1} and homology_dims(po.Q) == {}


@given(seeds, primes)
def test_pushout_properties(seed, p):
    gg = make_gen(seed, p=p)
    C = gg.complex()
    g, h = gg.chain_map(C, gg.complex()), gg.chain_map(C, gg.complex())
    po = pushout(g, h)
    po.Q.validate()
    assert po.iota_d @ g == po.iota_c @ h
    # Every map out of Q is determined by its two restrictions.
    r = gg.chain_map(po.Q, gg.complex())
    assert universal_from_pushout(r @ po.iota_d, r @ po.iota_c, po) == r


# -- homotopies ---------------------------------------------------------------------------------

def test_homotopy_examples():
    Y = sphere(F5, 0)
    H = chain_homotopy(identity(Y), identity(Y))
    assert H is not None and all(not m.any() for m in H.h.values())
    D = disc(F5, 1)
    for method in ("split", "linear"):
        assert chain_homotopy(identity(D), zero_map(D, D), method=method) is not None
        assert chain_homotopy(identity(Y), zero_map(Y, Y), method=method) is None


@given(seeds, primes)
def test_homotopy_methods_agree(seed, p):
    g = make_gen(seed, p=p)
    X, Y = g.complex(), g.complex()
    f = g.chain_map(X, Y)
    other = f + g.null_map(X, Y) if g.coin() else g.chain_map(X, Y)
    a = chain_homotopy(f, other, method="split")
    b = chain_homotopy(f, other, method="linear")
    assert (a is None) == (b is None)
    for H in (a, b):
        if H is not None:
            H.validate()


@given(seeds, primes)
def test_null_homotopic_perturbation_is_homotopic(seed, p):
    g = make_gen(seed, p=p)
    X, Y = g.complex(), g.complex()
    f = g.chain_map(X, Y)
    assert chain_homotopy(f, f + g.null_map(X, Y)) is not None


# -- lifting ----------------------------------------------------------------------------------

def lifting_problem(g):
    """Random ``(i, p, u, v)`` with i a trivial cofibration and p a fibration."""
    X = g.complex()
    S = direct_sum(X, g.acyclic())
    Z, iso, inv = g.scramble(S.obj)
    i = iso @ S.inc[0]
    r = S.proj[0] @ inv
    q = S.proj[1] @ inv
    p = g.fibration_onto(g.complex())
    u = g.chain_map(X, p.src)
    v = p @ u @ r + g.chain_map(q.tgt, p.tgt) @ q
    return i, p, u, v


@given(seeds, primes, st.sampled_from(["split", "linear"]))
def test_lift_postconditions(seed, p, method):
    g = make_gen(seed, p=p)
    i, pr, u, v = lifting_problem(g)
    ell = lift(i, pr, u, v, method=method)
    assert ell @ i == u and pr @ ell == v


@given(seeds, primes)
def test_two_lifts_are_homotopic(seed, p):
    g = make_gen(seed, p=p)
    i, pr, u, v = lifting_problem(g)
    l1 = lift(i, pr, u, v, rng=random.Random(seed))
    l2 = lift(i, pr, u, v, rng=random.Random(seed + 1), method=g.rng.choice(["split", "linear"]))
    assert chain_homotopy(l1, l2) is not None


def test_lift_examples():
    g = make_gen(77)
    # X = 0.
    p = g.fibration_onto(g.complex())
    Z = g.acyclic(3)
    z = zero_complex(F5)
    v = g.chain_map(Z, p.tgt)
    ell = lift(zero_map(z, Z), p, zero_map(z, p.src), v)
    assert p @ ell == v
    # i = id.
    X = g.complex()
    u = g.chain_map(X, p.src)
    assert lift(identity(X), p, u, p @ u) == u
    # Z = X + D(1), Y = 0.
    S = direct_sum(X, disc(F5, 1))
    E = g.complex()
    u = g.chain_map(X, E)
    t = ch.terminal_map(E)
    ell = lift(S.inc[0], t, u, ch.terminal_map(S.obj))
    assert ell @ S.inc[0] == u


def test_lift_preconditions():
    S0 = sphere(F5, 0)
    z = zero_complex(F5)
    # i not a weq.
    with pytest.raises(LiftError):
        lift(zero_map(z, S0), identity(S0), zero_map(z, S0), identity(S0))
    # p not surjective.
    with pytest.raises(LiftError):
        lift(identity(S0), zero_map(z, S0), zero_map(S0, z), zero_map(S0, S0))
    # square does not commute.
    with pytest.raises(LiftError):
        lift(identity(S0), identity(S0), identity(S0), zero_map(S0, S0))


# -- constructions keep d^2 = 0 ------------------------------------------------------------------

@given(seeds, primes)
def test_constructions_are_complexes(seed, p):
    g = make_gen(seed, p=p)
    f = g.chain_map(g.complex(), g.complex())
    for X in (ch.cone(f), path_object(f.tgt).P, factorize(f).mid, pullback(f, f).P,
              pushout(f, f).Q, direct_sum(f.src, f.tgt).obj):
        X.validate()
