"""Randomized property suites.

Each suite has a generator ``(gen, trial) -> Instance`` and a checker
``Instance -> (ok, details)``.  Everything a checker needs is stored in the
instance (objects plus ``meta``), so a dumped failing instance replays the
failure on its own.
"""
from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .chain import (
    chain_homotopy,
    factorize,
    factorize_morphism,
    homology_dims,
    homology_map,
    identity,
    is_cofibration,
    is_fibration,
    is_weq,
    pullback,
    sphere,
    universal_into_pullback,
    zero_complex,
    zero_map,
)
from .cospan import (
    NODES,
    Cospan,
    CospanMorphism,
    Mode,
    Replacement,
    Sigma,
    fibrant_replace,
    identity_morphism,
    is_cofibration_sigma,
    is_fibrant_sigma,
    is_fibration_sigma,
    lift_replacements,
    limit,
    limit_map,
    to_terminal,
)
from .generate import Gen, GenConfig, constant_cospan, cospan_sum, pad_replacement, pad_square
from .hopull import (
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
from .instance import Instance, to_doc

MODES = (Mode.FUNCTORIAL, Mode.LOCAL)


def _dims(d: dict) -> dict:
    return {str(k): v for k, v in sorted(d.items())}


def _gen_meta(gen: Gen) -> dict:
    c = gen.cfg
    return {"lo": c.lo, "hi": c.hi, "max_dim": c.max_dim, "span": c.span}


def _aux_gen(inst: Instance, offset: int = 0) -> Gen:
    """Rebuild the auxiliary generator recorded in ``inst.meta``."""
    m = inst.meta
    cfg = GenConfig(seed=0, p=inst.ctx.p, **m["gen"])
    return Gen(cfg, random.Random(m["aux_seed"] + offset))


# -- axioms --------------------------------------------------------------------

def _gen_axioms(gen: Gen, trial: int) -> Instance:
    inst = Instance(gen.ctx)
    X = gen.complex()
    kind = trial % 5
    if kind == 0:
        f = identity(X)
    elif kind == 1:
        f = gen.fibration_onto(X)
    elif kind == 2:
        f = gen.weq_from(X)
    else:
        f = gen.chain_map(X, gen.complex())
    inst.add_map(f, "f")
    for name, m in zip(("sq_f", "sq_f2", "sq_a", "sq_b"), gen.commuting_square()):
        inst.add_map(m, name)
    return inst


def _check_axioms(inst: Instance):
    f = inst.maps["f"]
    F = factorize(f)
    det = {
        "q_after_i": (F.q @ F.i) == f,
        "i_injective": is_cofibration(F.i),
        "i_weq": is_weq(F.i),
        "q_surjective": is_fibration(F.q),
    }
    f1, f2, a, b = (inst.maps[k] for k in ("sq_f", "sq_f2", "sq_a", "sq_b"))
    F1, F2 = factorize(f1), factorize(f2)
    m = factorize_morphism(f1, f2, a, b)
    det["natural_i"] = (m @ F1.i) == (F2.i @ a)
    det["natural_q"] = (F2.q @ m) == (b @ F1.q)
    return all(det.values()), det


# -- sigma independence and loops ------------------------------------------------

def _gen_sigma(gen: Gen, trial: int) -> Instance:
    inst = Instance(gen.ctx)
    inst.add_cospan(gen.cospan(gen.rng.choice([None, None, "first", "second", "both"])), "X")
    return inst


def _all_hopb(X: Cospan) -> dict:
    return {f"{s.value}/{m.value}": homotopy_pullback(X, s, m).homology for s in Sigma for m in MODES}


def _check_sigma(inst: Instance):
    X = inst.cospans["X"]
    oracle = cocone_oracle(X)
    got = _all_hopb(X)
    det = {"oracle": _dims(oracle), **{k: _dims(v) for k, v in got.items()}}
    return all(v == oracle for v in got.values()), det


def _gen_loops(gen: Gen, trial: int) -> Instance:
    n = trial % 4
    z = zero_complex(gen.ctx)
    D = sphere(gen.ctx, n)
    inst = Instance(gen.ctx, meta={"n": n})
    inst.add_cospan(Cospan(zero_map(z, D), zero_map(z, D)), "X")
    return inst


def _check_loops(inst: Instance):
    n = inst.meta["n"]
    X = inst.cospans["X"]
    want = {n - 1: 1}
    oracle = cocone_oracle(X)
    got = _all_hopb(X)
    det = {"expected": _dims(want), "oracle": _dims(oracle), **{k: _dims(v) for k, v in got.items()}}
    return oracle == want and all(v == want for v in got.values()), det


# -- lifting independence ----------------------------------------------------------

def _gen_lifting(gen: Gen, trial: int) -> Instance:
    sigma = list(Sigma)[trial % 3]
    meta = {"sigma": sigma.value, "mode": gen.rng.choice(MODES).value,
            "aux_seed": gen.rng.getrandbits(32), "gen": _gen_meta(gen)}
    inst = Instance(gen.ctx, meta=meta)
    inst.add_cospan(gen.cospan(gen.rng.choice([None, "first", "second", "both"])), "X")
    return inst


def _check_lifting(inst: Instance):
    X = inst.cospans["X"]
    sigma, mode = Sigma(inst.meta["sigma"]), Mode(inst.meta["mode"])
    R1 = fibrant_replace(X, sigma, Mode.FUNCTORIAL)
    R2 = pad_replacement(_aux_gen(inst), fibrant_replace(X, sigma, mode))
    l1 = lift_replacements(X, R1, R2, rng=random.Random(inst.meta["aux_seed"] + 1))
    l2 = lift_replacements(X, R1, R2, rng=random.Random(inst.meta["aux_seed"] + 2))
    pb1, pb2 = limit(R1.tgt), limit(R2.tgt)
    L1, L2 = limit_map(l1, pb1, pb2), limit_map(l2, pb1, pb2)
    H1, H2 = homology_map(L1), homology_map(L2)
    det = {
        "lifts_weq": is_weq(l1.c) and is_weq(l1.d) and is_weq(l1.b) and is_weq(l2.c) and is_weq(l2.d) and is_weq(l2.b),
        "lim_weq": is_weq(L1) and is_weq(L2),
        "lifts_homotopic": all(chain_homotopy(l1[r], l2[r]) is not None for r in NODES),
        "lim_homotopic": chain_homotopy(L1, L2) is not None,
        "same_homology_map": H1.keys() == H2.keys() and all(np.array_equal(H1[n], H2[n]) for n in H1),
    }
    ok = all(det.values())
    det["distinct_lifts"] = l1 != l2
    return ok, det


# -- squares -----------------------------------------------------------------------

def _labeled_square(gen: Gen, trial: int):
    kind = trial % 5
    if kind in (0, 1):
        return "positive", gen.positive_square()
    if kind in (2, 3):
        return "negative", gen.negative_square()
    return "unlabeled", gen.unlabeled_square()


def _gen_square(gen: Gen, trial: int) -> Instance:
    label, S = _labeled_square(gen, trial)
    inst = Instance(gen.ctx, meta={"label": label})
    inst.add_square(S, "S")
    return inst


def _label_ok(inst: Instance, S: CommSquare, verdict: bool) -> bool:
    label = inst.meta.get("label", "unlabeled")
    if label == "positive":
        return verdict
    if label == "negative":
        # A weak equivalence would force equal homology.
        return not verdict and homology_dims(S.A) != cocone_oracle(S.X)
    return True


def _check_fibersq(inst: Instance):
    S = inst.squares["S"]
    full = is_model_square_full(S)
    det = {
        "label": inst.meta.get("label"),
        "full": full,
        "fiber_square": is_homotopy_fiber_square(S),
        "sigma_agree": all(is_model_square(S, s, m) == full for s in Sigma for m in MODES),
    }
    det["label_ok"] = _label_ok(inst, S, full)
    ok = det["fiber_square"] == full and det["sigma_agree"] and det["label_ok"]
    return ok, det


def _check_rightproper(inst: Instance):
    S = inst.squares["S"]
    full = is_model_square_full(S)
    det = {"full": full, "rp_first": is_model_square_rp(S, "first"), "rp_second": is_model_square_rp(S, "second")}
    det["label_ok"] = _label_ok(inst, S, full)
    return det["rp_first"] == full and det["rp_second"] == full and det["label_ok"], det


def _gen_corlur(gen: Gen, trial: int) -> Instance:
    leg = ("first", "second", "both")[trial % 3]
    inst = Instance(gen.ctx, meta={"label": "positive", "leg": leg})
    inst.add_square(gen.positive_square(gen.cospan(leg), pad=False), "S")
    return inst


def _check_corlur(inst: Instance):
    S = inst.squares["S"]
    det = {f"{s.value}/{m.value}": is_model_square(S, s, m) for s in Sigma for m in MODES}
    det["fiber_square"] = is_homotopy_fiber_square(S)
    return all(det.values()), det


def _gen_transfer(gen: Gen, trial: int) -> Instance:
    label, S = _labeled_square(gen, trial)
    S2, ws = pad_square(gen, S)
    inst = Instance(gen.ctx, meta={"label": label})
    inst.add_square(S, "S")
    inst.add_square(S2, "S2")
    for name, w in zip(("wA", "wB", "wC", "wD"), ws):
        inst.add_map(w, name)
    return inst


def _check_transfer(inst: Instance):
    S, S2 = inst.squares["S"], inst.squares["S2"]
    ws = tuple(inst.maps[k] for k in ("wA", "wB", "wC", "wD"))
    v, v2 = transfer_verdict(S, S2, ws), is_model_square_full(S2)
    det = {"verdict": v, "verdict_padded": v2, "label_ok": _label_ok(inst, S, v)}
    return v == v2 and det["label_ok"], det


def _gen_pasting(gen: Gen, trial: int) -> Instance:
    # Right square: strict pullback of E -> F <- C with f a fibration.
    F = gen.complex()
    Xr = Cospan(gen.chain_map(gen.complex(), F), gen.fibration_onto(F))
    right = gen.positive_square(Xr)
    # Left square over D -> E <- B.
    Xl = Cospan(gen.chain_map(gen.complex(), Xr.C), right.v)
    left = (gen.positive_square, gen.negative_square, gen.unlabeled_square)[trial % 3](Xl)
    inst = Instance(gen.ctx)
    inst.add_square(right, "right")
    inst.add_square(left, "left")
    return inst


def _check_pasting(inst: Instance):
    left, right = inst.squares["left"], inst.squares["right"]
    total = paste(left, right)
    det = {"right": is_model_square_full(right), "left": is_model_square_full(left),
           "total": is_model_square_full(total)}
    return det["right"] and det["left"] == det["total"], det


def _gen_pastlem(gen: Gen, trial: int) -> Instance:
    D = gen.complex()
    f = gen.fibration_onto(D)
    if trial % 2:
        C = gen.complex()
        g = gen.weq_onto(C)
    else:
        g = gen.weq_from(gen.complex())
    h = gen.chain_map(g.tgt, D)
    inst = Instance(gen.ctx)
    for name, m in (("f", f), ("g", g), ("h", h)):
        inst.add_map(m, name)
    return inst


def _check_pastlem(inst: Instance):
    f, g, h = inst.maps["f"], inst.maps["g"], inst.maps["h"]
    pb1, pb2 = pullback(f, h @ g), pullback(f, h)
    u = universal_into_pullback(pb1.pi_b, g @ pb1.pi_c, pb2)
    det = {"f_fibration": is_fibration(f), "g_weq": is_weq(g), "universal_weq": is_weq(u)}
    return all(det.values()), det


# -- classifiers -----------------------------------------------------------------

def _gen_classifiers(gen: Gen, trial: int) -> Instance:
    ensure = lambda: gen.rng.choice([None, "first", "second", "both"])  # noqa: E731
    X = gen.cospan(ensure())
    kind = trial % 5
    if kind in (0, 1):
        T, inc, proj = cospan_sum(X, gen.cospan(ensure()))
        phi = inc[0] if kind == 0 else proj[0]
    elif kind == 2:
        phi = fibrant_replace(X, gen.rng.choice(list(Sigma)), Mode.FUNCTORIAL).map
    elif kind == 3:
        R = Replacement(X, X, identity_morphism(X), Sigma.INJ, Mode.LOCAL)
        phi = pad_replacement(gen, R).map
    else:
        K = constant_cospan(X.D)
        phi = CospanMorphism(X, K, X.g, identity(X.D), X.f)
    inst = Instance(gen.ctx)
    inst.add_cospan(X, "X")
    inst.add_morphism(phi, "phi")
    return inst


def _check_classifiers(inst: Instance):
    phi, X = inst.morphisms["phi"], inst.cospans["X"]
    objcof = all(is_cofibration(phi[r]) for r in NODES)
    objfib = all(is_fibration(phi[r]) for r in NODES)
    cof = {s: is_cofibration_sigma(phi, s) for s in Sigma}
    fib = {s: is_fibration_sigma(phi, s) for s in Sigma}
    fibrant = {s: is_fibrant_sigma(X, s) for s in Sigma}
    det = {
        "inj_cof_is_objectwise": cof[Sigma.INJ] == objcof,
        "reedy_cof_objectwise": all(objcof or not cof[s] for s in (Sigma.REE_I, Sigma.REE_D)),
        "inj_fib_reedy": not fib[Sigma.INJ] or (fib[Sigma.REE_I] and fib[Sigma.REE_D]),
        "reedy_fib_objectwise": all(objfib or not fib[s] for s in (Sigma.REE_I, Sigma.REE_D)),
        "inj_fibrant_reedy": not fibrant[Sigma.INJ] or (fibrant[Sigma.REE_I] and fibrant[Sigma.REE_D]),
        "fibrant_is_fibration": all(fibrant[s] == is_fibration_sigma(to_terminal(X), s) for s in Sigma),
    }
    ok = all(det.values())
    det["cof"] = {s.value: v for s, v in cof.items()}
    det["fib"] = {s.value: v for s, v in fib.items()}
    det["fibrant"] = {s.value: v for s, v in fibrant.items()}
    return ok, det


# -- registry and driver -------------------------------------------------------------

SUITES = {
    "axioms": (_gen_axioms, _check_axioms),
    "sigma": (_gen_sigma, _check_sigma),
    "loops": (_gen_loops, _check_loops),
    "lifting": (_gen_lifting, _check_lifting),
    "fibersq": (_gen_square, _check_fibersq),
    "pasting": (_gen_pasting, _check_pasting),
    "transfer": (_gen_transfer, _check_transfer),
    "rightproper": (_gen_square, _check_rightproper),
    "corlur": (_gen_corlur, _check_corlur),
    "pastlem": (_gen_pastlem, _check_pastlem),
    "classifiers": (_gen_classifiers, _check_classifiers),
}


def generate_instance(name: str, cfg: GenConfig, trial: int) -> Instance:
    gen_fn, _ = SUITES[name]
    inst = gen_fn(Gen(cfg, random.Random(cfg.trial_seed(trial))), trial)
    inst.meta.update(suite=name, trial=trial, seed=cfg.trial_seed(trial))
    return inst


def check_instance(name: str, inst: Instance) -> tuple[bool, dict]:
    """Run a suite's checker; exceptions become failures."""
    _, check = SUITES[name]
    try:
        ok, det = check(inst)
    except Exception as e:  # noqa: BLE001 - failures are data
        ok, det = False, {"error": f"{type(e).__name__}: {e}"}
    return bool(ok), det


def report(name: str, trial: int, seed: int, inst: Instance) -> dict:
    ok, det = check_instance(name, inst)
    if not ok:
        det["instance"] = to_doc(inst)
    return {"suite": name, "trial": trial, "seed": seed, "pass": ok, "details": det}


def _run_one(args) -> dict:
    name, cfg, trial = args
    return report(name, trial, cfg.trial_seed(trial), generate_instance(name, cfg, trial))


def run_suite(name: str, cfg: GenConfig, jobs: int = 1) -> list[dict]:
    """One report per trial, ordered by trial index."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    work = [(name, cfg, t) for t in range(cfg.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            out = list(ex.map(_run_one, work, chunksize=8))
    else:
        out = [_run_one(w) for w in work]
    return sorted(out, key=lambda r: r["trial"])


def replay(inst: Instance, name: str | None = None) -> dict:
    """Re-check a dumped instance."""
    name = name or inst.meta.get("suite")
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return report(name, inst.meta.get("trial", -1), inst.meta.get("seed", -1), inst)
