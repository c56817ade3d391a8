"""Command-line interface.

Exit codes: 0 when every check passes (or the answer is true), 1 when a
check fails (or the answer is false), 2 on errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .chain import homology_dims, is_cofibration, is_fibration, is_weq
from .cospan import (
    Mode,
    Sigma,
    fibrant_replace,
    is_cofibration_sigma,
    is_fibrant_sigma,
    is_fibration_sigma,
    is_weq_cospan,
)
from .generate import ConfigError, GenConfig
from .hopull import (
    homotopy_pullback,
    is_homotopy_fiber_square,
    is_model_square,
    is_model_square_full,
    is_model_square_rp,
    paste,
)
from .instance import Instance, InstanceError, dumps, loads
from .suites import SUITES, replay, run_suite

EXIT_OK, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _dims(d: dict) -> dict:
    return {str(k): v for k, v in sorted(d.items())}


def _load(args) -> Instance:
    if args.input is None:
        raise UsageError("--input is required for this command")
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    return loads(text)


def _pick(inst: Instance, section: str, name: str | None):
    table = getattr(inst, section)
    if name is None:
        if len(table) != 1:
            raise UsageError(f"instance has {len(table)} {section}; name one explicitly")
        name = next(iter(table))
    if name not in table:
        raise UsageError(f"no {section[:-1]} named {name!r}")
    return name, table[name]


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, sort_keys=True) if args.json else text)


def _verdict(args, payload: dict, text: str, value: bool) -> int:
    _emit(args, {**payload, "result": value}, f"{text}: {str(value).lower()}")
    return EXIT_OK if value else EXIT_FALSE


# -- commands -------------------------------------------------------------------

def cmd_homology(args) -> int:
    inst = _load(args)
    names = [args.complex] if args.complex else sorted(inst.complexes)
    out = {}
    for name in names:
        _, X = _pick(inst, "complexes", name)
        out[name] = _dims(homology_dims(X))
    _emit(args, {"homology": out}, "\n".join(f"{k}: {json.dumps(v)}" for k, v in out.items()))
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load(args)
    sigma = Sigma(args.structure)
    if args.kind == "fibrant":
        name, X = _pick(inst, "cospans", args.cospan)
        return _verdict(args, {"cospan": name, "kind": "fibrant", "structure": sigma.value},
                        f"{name} {sigma.value}-fibrant", is_fibrant_sigma(X, sigma))
    if args.morphism is not None or (args.map is None and inst.morphisms and not inst.maps):
        name, phi = _pick(inst, "morphisms", args.morphism)
        test = {"weq": lambda: is_weq_cospan(phi),
                "fib": lambda: is_fibration_sigma(phi, sigma),
                "cofib": lambda: is_cofibration_sigma(phi, sigma)}[args.kind]
        return _verdict(args, {"morphism": name, "kind": args.kind, "structure": sigma.value},
                        f"{name} {args.kind} ({sigma.value})", test())
    name, f = _pick(inst, "maps", args.map)
    test = {"weq": is_weq, "fib": is_fibration, "cofib": is_cofibration}[args.kind]
    return _verdict(args, {"map": name, "kind": args.kind}, f"{name} {args.kind}", test(f))


def cmd_replace(args) -> int:
    inst = _load(args)
    name, X = _pick(inst, "cospans", args.cospan)
    R = fibrant_replace(X, Sigma(args.structure), Mode(args.mode))
    out = Instance(inst.ctx, meta={"structure": args.structure, "mode": args.mode})
    out.add_cospan(R.src, name)
    out.add_cospan(R.tgt, "R")
    out.add_morphism(R.map, "map")
    print(dumps(out))
    return EXIT_OK


def cmd_hopb(args) -> int:
    inst = _load(args)
    name, X = _pick(inst, "cospans", args.cospan)
    sigmas = list(Sigma) if args.structure == "all" else [Sigma(args.structure)]
    modes = list(Mode) if args.mode == "all" else [Mode(args.mode)]
    res = {f"{s.value}/{m.value}": _dims(homotopy_pullback(X, s, m).homology) for s in sigmas for m in modes}
    agree = len({json.dumps(v) for v in res.values()}) == 1
    _emit(args, {"cospan": name, "homology": res, "agree": agree},
          "\n".join(f"{k}: {json.dumps(v)}" for k, v in res.items()))
    return EXIT_OK if agree else EXIT_FALSE


def cmd_model_square(args) -> int:
    inst = _load(args)
    name, S = _pick(inst, "squares", args.square)
    if args.leg:
        value, how = is_model_square_rp(S, args.leg), f"replacing the {args.leg} leg"
    elif args.structure == "full":
        value, how = is_model_square_full(S), "full"
    else:
        value, how = is_model_square(S, Sigma(args.structure), Mode(args.mode)), f"{args.structure}/{args.mode}"
    return _verdict(args, {"square": name, "how": how}, f"{name} model square ({how})", value)


def cmd_fiber_square(args) -> int:
    inst = _load(args)
    name, S = _pick(inst, "squares", args.square)
    return _verdict(args, {"square": name}, f"{name} homotopy fiber square", is_homotopy_fiber_square(S))


def cmd_paste(args) -> int:
    inst = _load(args)
    _, left = _pick(inst, "squares", args.left)
    _, right = _pick(inst, "squares", args.right)
    total = paste(left, right)
    inst.add_square(total, args.name)
    print(dumps(inst))
    return EXIT_OK


def cmd_suite(args) -> int:
    if args.input is not None:
        inst = _load(args)
        reports = [replay(inst, args.name)]
    else:
        if args.name is None:
            raise UsageError(f"suite name required; choose from {', '.join(SUITES)}")
        cfg = GenConfig(seed=args.seed, p=args.p, lo=args.lo, hi=args.hi, max_dim=args.max_dim,
                        trials=args.trials, span=args.span)
        reports = run_suite(args.name, cfg, jobs=args.jobs)
    failed = [r for r in reports if not r["pass"]]
    if args.json:
        for r in reports:
            print(json.dumps(r, sort_keys=True))
    else:
        suite = reports[0]["suite"]
        print(f"{suite}: {len(reports) - len(failed)}/{len(reports)} passed")
        for r in failed:
            det = {k: v for k, v in r["details"].items() if k != "instance"}
            print(f"  FAIL trial {r['trial']} seed {r['seed']}: {json.dumps(det, sort_keys=True)}")
    if args.dump_dir and failed:
        d = Path(args.dump_dir)
        d.mkdir(parents=True, exist_ok=True)
        for r in failed:
            doc = r["details"]["instance"]
            (d / f"{r['suite']}-{r['trial']}.json").write_text(
                json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
    return EXIT_OK if not failed else EXIT_FALSE


# -- parser -------------------------------------------------------------------------

def _globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--input", default=dflt(None), help="instance file ('-' for stdin)")
    p.add_argument("--seed", type=int, default=dflt(0), help="base seed; trial t uses seed XOR t")
    p.add_argument("--trials", type=int, default=dflt(10), help="number of random trials")
    p.add_argument("--json", action="store_true", default=dflt(False), help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopb", description="Homotopy pullbacks of cospans of chain complexes over F_p.")
    _globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)
    structures = [s.value for s in Sigma]
    modes = [m.value for m in Mode]

    p = sub.add_parser("homology", parents=[common], help="homology dimensions of complexes")
    p.add_argument("--complex")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("check", parents=[common], help="classify a map, cospan morphism or cospan")
    p.add_argument("--kind", choices=["weq", "fib", "cofib", "fibrant"], required=True)
    p.add_argument("--structure", choices=structures, default="inj")
    p.add_argument("--map")
    p.add_argument("--morphism")
    p.add_argument("--cospan")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("replace", parents=[common], help="fibrant replacement of a cospan")
    p.add_argument("--cospan")
    p.add_argument("--structure", choices=structures, default="inj")
    p.add_argument("--mode", choices=modes, default="functorial")
    p.set_defaults(func=cmd_replace)

    p = sub.add_parser("hopb", parents=[common], help="homology of the homotopy pullback")
    p.add_argument("--cospan")
    p.add_argument("--structure", choices=structures + ["all"], default="all")
    p.add_argument("--mode", choices=modes + ["all"], default="all")
    p.set_defaults(func=cmd_hopb)

    p = sub.add_parser("model-square", parents=[common], help="is a square a model square")
    p.add_argument("--square")
    p.add_argument("--structure", choices=structures + ["full"], default="full")
    p.add_argument("--mode", choices=modes, default="functorial")
    p.add_argument("--leg", choices=["first", "second"], help="replace only this leg")
    p.set_defaults(func=cmd_model_square)

    p = sub.add_parser("fiber-square", parents=[common], help="is a square a homotopy fiber square")
    p.add_argument("--square")
    p.set_defaults(func=cmd_fiber_square)

    p = sub.add_parser("paste", parents=[common], help="paste two adjacent squares")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--name", default="total", help="name of the pasted square in the output")
    p.set_defaults(func=cmd_paste)

    p = sub.add_parser("suite", parents=[common], help="run or replay a property suite")
    p.add_argument("name", nargs="?", choices=list(SUITES))
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--lo", type=int, default=-3)
    p.add_argument("--hi", type=int, default=6)
    p.add_argument("--max-dim", type=int, default=4)
    p.add_argument("--span", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--dump-dir", help="write failing instances here")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, ConfigError, UsageError, KeyError, ValueError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"hopb: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
