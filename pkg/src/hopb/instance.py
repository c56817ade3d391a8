"""JSON instance files.

Layout (keys sorted, no insignificant whitespace in canonical form)::

    {"p": 5,
     "complexes": {"X": {"0": {"dim": 1, "d": []}, ...}},
     "maps":      {"f": {"src": "X", "tgt": "Y", "f": {"0": [[1]]}}},
     "cospans":   {"K": {"g": "g0", "f": "f0"}},
     "morphisms": {"phi": {"src": "K", "tgt": "L", "c": "m0", "d": "m1", "b": "m2"}},
     "squares":   {"S": {"u": "u0", "v": "v0", "cospan": "K"}},
     "meta":      {...}}

``d`` under degree n is the differential out of degree n, a
``dim(n-1) x dim(n)`` array of row arrays.  Map components are
``tgt.dim(n) x src.dim(n)``; missing components are zero.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .chain import ChainComplex, ChainMap
from .cospan import Cospan, CospanMorphism
from .hopull import CommSquare
from .linfp import FieldCtx

SECTIONS = ("complexes", "maps", "cospans", "morphisms", "squares")


class InstanceError(ValueError):
    pass


class ParseError(InstanceError):
    """Malformed input; the message starts with a locator."""


class InvariantError(InstanceError):
    """Well-formed input whose objects violate an algebraic identity."""


@dataclass
class Instance:
    ctx: FieldCtx
    complexes: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    cospans: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    squares: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    _PREFIX = {"complexes": "X", "maps": "m", "cospans": "K", "morphisms": "phi", "squares": "S"}

    def _register(self, section: str, obj, name: str | None) -> str:
        table = getattr(self, section)
        for k, o in table.items():
            if o is obj:
                if name is not None and name != k:
                    raise ValueError(f"object already registered as {k!r}")
                return k
        if name is None:
            i = len(table)
            while f"{self._PREFIX[section]}{i}" in table:
                i += 1
            name = f"{self._PREFIX[section]}{i}"
        elif name in table:
            raise ValueError(f"duplicate {section} name {name!r}")
        table[name] = obj
        return name

    def add_complex(self, X: ChainComplex, name: str | None = None) -> str:
        return self._register("complexes", X, name)

    def add_map(self, f: ChainMap, name: str | None = None) -> str:
        self.add_complex(f.src)
        self.add_complex(f.tgt)
        return self._register("maps", f, name)

    def add_cospan(self, X: Cospan, name: str | None = None) -> str:
        self.add_map(X.g)
        self.add_map(X.f)
        return self._register("cospans", X, name)

    def add_morphism(self, phi: CospanMorphism, name: str | None = None) -> str:
        self.add_cospan(phi.src)
        self.add_cospan(phi.tgt)
        for r in "cdb":
            self.add_map(phi[r])
        return self._register("morphisms", phi, name)

    def add_square(self, S: CommSquare, name: str | None = None) -> str:
        self.add_map(S.u)
        self.add_map(S.v)
        self.add_cospan(S.X)
        return self._register("squares", S, name)

    def name_of(self, section: str, obj) -> str:
        for k, o in getattr(self, section).items():
            if o is obj:
                return k
        raise KeyError(f"object not registered in {section}")


# -- serialization ---------------------------------------------------------

def to_doc(inst: Instance) -> dict:
    cx = {}
    for name, X in inst.complexes.items():
        cx[name] = {str(n): {"dim": X.dim(n), "d": X.d(n).tolist()} for n in X.support}
    maps = {}
    for name, f in inst.maps.items():
        comps = {str(n): f[n].tolist() for n in f.src.support if f.tgt.dim(n)}
        maps[name] = {"src": inst.name_of("complexes", f.src),
                      "tgt": inst.name_of("complexes", f.tgt), "f": comps}
    cospans = {name: {"g": inst.name_of("maps", X.g), "f": inst.name_of("maps", X.f)}
               for name, X in inst.cospans.items()}
    morphisms = {}
    for name, phi in inst.morphisms.items():
        morphisms[name] = {"src": inst.name_of("cospans", phi.src), "tgt": inst.name_of("cospans", phi.tgt)}
        for r in "cdb":
            morphisms[name][r] = inst.name_of("maps", phi[r])
    squares = {name: {"u": inst.name_of("maps", S.u), "v": inst.name_of("maps", S.v),
                      "cospan": inst.name_of("cospans", S.X)}
               for name, S in inst.squares.items()}
    doc = {"p": inst.ctx.p, "complexes": cx, "maps": maps, "cospans": cospans,
           "morphisms": morphisms, "squares": squares}
    if inst.meta:
        doc["meta"] = inst.meta
    return doc


def dumps(inst: Instance) -> str:
    """Canonical byte form: sorted keys, no insignificant whitespace."""
    return json.dumps(to_doc(inst), sort_keys=True, separators=(",", ":"))


def dump(inst: Instance, path) -> None:
    Path(path).write_text(dumps(inst) + "\n")


# -- parsing ---------------------------------------------------------------

def _matrix(ctx: FieldCtx, raw, rows: int, cols: int, where: str):
    if not isinstance(raw, list):
        raise ParseError(f"{where}: expected a list of rows")
    if rows == 0:
        if raw:
            raise ParseError(f"{where}: expected 0 rows, got {len(raw)}")
        return ctx.zeros(0, cols)
    if len(raw) != rows:
        raise ParseError(f"{where}: expected {rows} rows, got {len(raw)}")
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise ParseError(f"{where}[{i}]: expected a row of length {cols}, got {got}")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < ctx.p:
                raise ParseError(f"{where}[{i}][{j}]: entry {x!r} is not an integer in [0, {ctx.p})")
    return ctx.mat(raw)


def _degree(key: str, where: str) -> int:
    try:
        return int(key)
    except ValueError:
        raise ParseError(f"{where}: degree key {key!r} is not an integer") from None


def _obj(raw, where: str) -> dict:
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: expected an object")
    return raw


def _ref(table: dict, raw, where: str):
    if raw not in table:
        raise ParseError(f"{where}: unknown name {raw!r}")
    return table[raw]


def from_doc(doc) -> Instance:
    doc = _obj(doc, "<root>")
    try:
        ctx = FieldCtx(doc.get("p"))
    except ValueError as e:
        raise ParseError(f"p: {e}") from None
    inst = Instance(ctx, meta=doc.get("meta", {}))
    for key in doc:
        if key not in SECTIONS + ("p", "meta"):
            raise ParseError(f"<root>: unknown section {key!r}")
    for name, raw in _obj(doc.get("complexes", {}), "complexes").items():
        where = f"complexes.{name}"
        raw = _obj(raw, where)
        dims = {}
        for key, entry in raw.items():
            entry = _obj(entry, f"{where}[{key}]")
            dim = entry.get("dim")
            if isinstance(dim, bool) or not isinstance(dim, int) or dim < 0:
                raise ParseError(f"{where}[{key}].dim: expected a nonnegative integer")
            dims[_degree(key, where)] = dim
        d = {}
        for key, entry in raw.items():
            n = int(key)
            d[n] = _matrix(ctx, entry.get("d", [[0] * dims[n]] * dims.get(n - 1, 0)),
                           dims.get(n - 1, 0), dims[n], f"{where}[{key}].d")
        X = ChainComplex(ctx, dims, d, check=False)
        try:
            X.validate()
        except ValueError as e:
            raise InvariantError(f"{where}: {e}") from None
        inst.complexes[name] = X
    for name, raw in _obj(doc.get("maps", {}), "maps").items():
        where = f"maps.{name}"
        raw = _obj(raw, where)
        src = _ref(inst.complexes, raw.get("src"), f"{where}.src")
        tgt = _ref(inst.complexes, raw.get("tgt"), f"{where}.tgt")
        comps = {}
        for key, m in _obj(raw.get("f", {}), f"{where}.f").items():
            n = _degree(key, f"{where}.f")
            comps[n] = _matrix(ctx, m, tgt.dim(n), src.dim(n), f"{where}.f[{key}]")
        f = ChainMap(src, tgt, comps, check=False)
        try:
            f.validate()
        except ValueError as e:
            raise InvariantError(f"{where}: {e}") from None
        inst.maps[name] = f
    for name, raw in _obj(doc.get("cospans", {}), "cospans").items():
        where = f"cospans.{name}"
        raw = _obj(raw, where)
        g = _ref(inst.maps, raw.get("g"), f"{where}.g")
        f = _ref(inst.maps, raw.get("f"), f"{where}.f")
        try:
            inst.cospans[name] = Cospan(g, f)
        except ValueError as e:
            raise InvariantError(f"{where}: {e}") from None
    for name, raw in _obj(doc.get("morphisms", {}), "morphisms").items():
        where = f"morphisms.{name}"
        raw = _obj(raw, where)
        src = _ref(inst.cospans, raw.get("src"), f"{where}.src")
        tgt = _ref(inst.cospans, raw.get("tgt"), f"{where}.tgt")
        parts = {r: _ref(inst.maps, raw.get(r), f"{where}.{r}") for r in "cdb"}
        try:
            inst.morphisms[name] = CospanMorphism(src, tgt, **parts)
        except ValueError as e:
            raise InvariantError(f"{where}: {e}") from None
    for name, raw in _obj(doc.get("squares", {}), "squares").items():
        where = f"squares.{name}"
        raw = _obj(raw, where)
        u = _ref(inst.maps, raw.get("u"), f"{where}.u")
        v = _ref(inst.maps, raw.get("v"), f"{where}.v")
        X = _ref(inst.cospans, raw.get("cospan"), f"{where}.cospan")
        try:
            inst.squares[name] = CommSquare(u, v, X)
        except ValueError as e:
            raise InvariantError(f"{where}: {e}") from None
    return inst


def loads(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return from_doc(doc)


def parse_instance(path) -> Instance:
    return loads(Path(path).read_text())
