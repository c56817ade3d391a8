import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_gen
from hopb.chain import (
    ChainMap,
    direct_sum,
    homology_dims,
    identity,
    pullback,
    sphere,
    zero_complex,
    zero_map,
)
from hopb.cospan import Cospan, Mode, Sigma
from hopb.generate import pad_square
from hopb.hopull import (
    CommSquare,
    cocone_oracle,
    homotopy_pullback,
    is_homotopy_fiber_square,
    is_model_square,
    is_model_square_full,
    is_model_square_rp,
    paste,
    transfer_verdict,
)
from hopb.linfp import FieldCtx

F5 = FieldCtx(5)
seeds = st.integers(0, 2**32 - 1)
primes = st.sampled_from([2, 5])


def zero_into(D):
    return zero_map(zero_complex(D.ctx), D)


def loop_cospan(n, ctx=F5):
    S = sphere(ctx, n)
    return Cospan(zero_into(S), zero_into(S))


def identity_square(Y):
    return CommSquare(identity(Y), identity(Y), Cospan(identity(Y), identity(Y)))


def projection_instance():
    """B = S(0)+S(1) -> D = S(0) projection, C = 0; the pullback is S(1)."""
    S0 = sphere(F5, 0)
    S = direct_sum(S0, sphere(F5, 1))
    X = Cospan(zero_into(S0), S.proj[0])
    pb = pullback(X.f, X.g)
    return X, CommSquare(pb.pi_b, pb.pi_c, X)


def zero_corner(X):
    z = zero_complex(X.D.ctx)
    return CommSquare(zero_map(z, X.B), zero_map(z, X.C), X)


# -- homotopy pullbacks and the oracle ------------------------------------------------

def test_hopb_examples():
    Y = make_gen(2).complex()
    X = Cospan(identity(Y), identity(Y))
    for s in Sigma:
        assert homotopy_pullback(X, s).homology == homology_dims(Y)
    assert cocone_oracle(X) == homology_dims(Y)
    for s in Sigma:
        for m in Mode:
            assert homotopy_pullback(loop_cospan(1), s, m).homology == {0: 1}
            assert homotopy_pullback(loop_cospan(0), s, m).homology == {-1: 1}


def test_oracle_examples():
    z = zero_complex(F5)
    assert cocone_oracle(Cospan(identity(z), identity(z))) == {}
    assert cocone_oracle(loop_cospan(1)) == {0: 1}


def test_hopb_result_fields():
    res = homotopy_pullback(loop_cospan(2), Sigma.REE_D, Mode.LOCAL)
    assert res.P is res.pb.P
    assert res.replacement.tgt.f @ res.pb.pi_b == res.replacement.tgt.g @ res.pb.pi_c
    assert res.homology == homology_dims(res.P)


@given(seeds, primes, st.sampled_from([None, "first", "second", "both"]))
def test_sigma_independence(seed, p, leg):
    X = make_gen(seed, p=p).cospan(leg)
    want = cocone_oracle(X)
    for s in Sigma:
        for m in Mode:
            assert homotopy_pullback(X, s, m).homology == want


def test_hopb_deterministic():
    X = make_gen(31).cospan()
    a, b = homotopy_pullback(X), homotopy_pullback(X)
    assert a.P == b.P and a.homology == b.homology


# -- model squares ------------------------------------------------------------------------

ALL_CHECKS = [
    lambda S: is_model_square_full(S),
    lambda S: is_homotopy_fiber_square(S),
    lambda S: is_model_square_rp(S, "first"),
    lambda S: is_model_square_rp(S, "second"),
] + [lambda S, s=s, m=m: is_model_square(S, s, m) for s in Sigma for m in Mode]


def test_identity_square_is_model():
    S = identity_square(make_gen(40).complex())
    assert all(check(S) for check in ALL_CHECKS)


def test_strict_pullback_along_projection():
    X, S = projection_instance()
    assert homology_dims(S.A) == {1: 1} == cocone_oracle(X)
    assert all(check(S) for check in ALL_CHECKS)
    assert not any(check(zero_corner(X)) for check in ALL_CHECKS)


def test_square_rejects_noncommuting():
    Y = sphere(F5, 2)
    with pytest.raises(ValueError):
        CommSquare(identity(Y), zero_map(Y, Y), Cospan(identity(Y), identity(Y)))
    _, S = projection_instance()
    with pytest.raises(ValueError):
        is_model_square_rp(S, "middle")


@given(seeds, primes)
def test_positive_squares(seed, p):
    S = make_gen(seed, p=p).positive_square()
    assert is_model_square_full(S) and is_homotopy_fiber_square(S)


@given(seeds, primes)
def test_negative_squares(seed, p):
    S = make_gen(seed, p=p).negative_square()
    assert homology_dims(S.A) != cocone_oracle(S.X)
    assert not is_model_square_full(S) and not is_homotopy_fiber_square(S)


@given(seeds, primes)
def test_verdicts_agree(seed, p):
    g = make_gen(seed, p=p)
    S = g.unlabeled_square()
    verdicts = {check(S) for check in ALL_CHECKS}
    assert len(verdicts) == 1
    if verdicts == {True}:
        assert homology_dims(S.A) == cocone_oracle(S.X)


# -- pasting ----------------------------------------------------------------------------------

def test_paste_identities():
    Y = make_gen(41).complex()
    I = identity_square(Y)
    T = paste(I, I)
    assert T.u == identity(Y) and T.v == identity(Y)
    assert T.X.f == identity(Y) and T.X.g == identity(Y)


def test_paste_of_strict_pullbacks_is_pullback():
    g = make_gen(42)
    F = g.complex()
    right_cospan = Cospan(g.chain_map(g.complex(), F), g.fibration_onto(F))
    pr = pullback(right_cospan.f, right_cospan.g)
    right = CommSquare(pr.pi_b, pr.pi_c, right_cospan)
    left_cospan = Cospan(g.chain_map(g.complex(), right_cospan.C), right.v)
    pl = pullback(left_cospan.f, left_cospan.g)
    left = CommSquare(pl.pi_b, pl.pi_c, left_cospan)
    T = paste(left, right)
    total = pullback(T.X.f, T.X.g)
    assert total.P.dims == T.A.dims
    assert homology_dims(total.P) == homology_dims(T.A)
    assert is_model_square_full(T)


def test_paste_rejects_mismatch():
    _, S = projection_instance()
    with pytest.raises(ValueError):
        paste(S, S)


@given(seeds, primes, st.integers(0, 2))
def test_pasting_law(seed, p, kind):
    g = make_gen(seed, p=p)
    F = g.complex()
    Xr = Cospan(g.chain_map(g.complex(), F), g.fibration_onto(F))
    right = g.positive_square(Xr)
    Xl = Cospan(g.chain_map(g.complex(), Xr.C), right.v)
    left = (g.positive_square, g.negative_square, g.unlabeled_square)[kind](Xl)
    assert is_model_square_full(right)
    assert is_model_square_full(left) == is_model_square_full(paste(left, right))


# -- transfer ---------------------------------------------------------------------------------

def test_transfer_identity_connectors():
    _, S = projection_instance()
    ws = (identity(S.A), identity(S.X.B), identity(S.X.C), identity(S.X.D))
    assert transfer_verdict(S, S, ws) is True


def test_transfer_rejects_bad_connectors():
    X, S = projection_instance()
    zA = zero_map(S.A, S.A)
    ws = (zA, zero_map(X.B, X.B), zero_map(X.C, X.C), zero_map(X.D, X.D))
    with pytest.raises(ValueError):
        transfer_verdict(S, S, ws)
    ws = (identity(S.A), identity(X.B), identity(X.C), zero_map(X.D, X.D))
    with pytest.raises(ValueError):
        transfer_verdict(S, S, ws)


@given(seeds, primes, st.booleans())
def test_transfer_padded(seed, p, positive):
    g = make_gen(seed, p=p)
    S = g.positive_square() if positive else g.negative_square()
    S2, ws = pad_square(g, S)
    assert transfer_verdict(S, S2, ws) == is_model_square_full(S2) == positive


def test_commsquare_A_property():
    _, S = projection_instance()
    assert S.A is S.u.src
    assert isinstance(S.u, ChainMap)
