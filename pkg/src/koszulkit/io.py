"""The ``.kz`` presentation format: versioned JSON with exact scalars.

Rationals are written as integers or ``"num/den"`` strings, residues mod p as
integers.  Every schema violation raises :class:`DocumentError` carrying the
JSON path (or line and column for syntax errors) of the offending value.
"""
from __future__ import annotations

import json
from pathlib import Path

from .bimodule import AlgebraError, BaseAlgebra, Bimodule
from .cdg import CdgRingSlice
from .linalg import DimensionError, Field, Subspace, from_rows
from .nonhomog import NonhomogPresentation
from .quadratic import GradedAlgebraSlice, QuadraticPresentation

FORMAT_VERSION = 1
KINDS = ("quadratic", "nonhomogeneous", "cdg_slice")

_TOP_FIELDS = {"format_version", "kind", "name", "field", "base", "bimodules", "presentation",
               "cdg", "metadata"}
_BASE_FIELDS = {"name", "dim", "structure", "unit"}
_BIMODULE_FIELDS = {"dim", "left", "right"}
_PRES_FIELDS = {"generators", "side", "relations", "q", "lifts", "p_values", "h_values"}
_CDG_FIELDS = {"components", "products", "differential", "curvature"}


class DocumentError(ValueError):
    """A schema or parse failure located at ``where``."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where
        self.message = message


# ---------------------------------------------------------------------------
# reading


class _Reader:
    def __init__(self, field: Field | None):
        self.field = field

    def obj(self, x, where: str, allowed: set, required: set) -> dict:
        if not isinstance(x, dict):
            raise DocumentError(where, "expected an object")
        unknown = sorted(set(x) - allowed)
        if unknown:
            raise DocumentError(f"{where}.{unknown[0]}" if where else unknown[0],
                                f"unknown field for format version {FORMAT_VERSION}")
        missing = sorted(required - set(x))
        if missing:
            raise DocumentError(where, f"missing field {missing[0]!r}")
        return x

    def int_(self, x, where: str, minimum: int = 0) -> int:
        if isinstance(x, bool) or not isinstance(x, int):
            raise DocumentError(where, "expected an integer")
        if x < minimum:
            raise DocumentError(where, f"expected an integer >= {minimum}")
        return x

    def scalar(self, x, where: str):
        F = self.field
        if isinstance(x, (bool, float)):
            raise DocumentError(where, "scalars must be integers or \"num/den\" strings")
        if isinstance(x, int):
            return F(x)
        if isinstance(x, str):
            try:
                return F.parse_scalar(x)
            except (ValueError, ZeroDivisionError) as exc:
                raise DocumentError(where, str(exc)) from None
        raise DocumentError(where, "scalars must be integers or \"num/den\" strings")

    def vector(self, x, where: str, n: int) -> list:
        if not isinstance(x, list):
            raise DocumentError(where, "expected a list")
        if len(x) != n:
            raise DocumentError(where, f"expected {n} entries, found {len(x)}")
        return [self.scalar(v, f"{where}[{i}]") for i, v in enumerate(x)]

    def matrix(self, x, where: str, m: int, n: int):
        if not isinstance(x, list) or len(x) != m:
            raise DocumentError(where, f"expected {m} rows")
        rows = [self.vector(r, f"{where}[{i}]", n) for i, r in enumerate(x)]
        return from_rows(self.field, rows, n) if m else self.field.mat(0, n)

    def rows(self, x, where: str, n: int) -> list:
        if not isinstance(x, list):
            raise DocumentError(where, "expected a list of rows")
        return [self.vector(r, f"{where}[{i}]", n) for i, r in enumerate(x)]


def _parse_field(x, where: str) -> Field:
    if not isinstance(x, dict):
        raise DocumentError(where, "expected an object")
    unknown = sorted(set(x) - {"kind", "p"})
    if unknown:
        raise DocumentError(f"{where}.{unknown[0]}", f"unknown field for format version {FORMAT_VERSION}")
    kind = x.get("kind")
    if kind == "q":
        return Field("q")
    if kind == "fp":
        p = x.get("p")
        if isinstance(p, bool) or not isinstance(p, int):
            raise DocumentError(f"{where}.p", "expected an integer")
        try:
            return Field("fp", p)
        except ValueError as exc:
            raise DocumentError(f"{where}.p", str(exc)) from None
    raise DocumentError(f"{where}.kind", "expected \"q\" or \"fp\"")


def _base(rd: _Reader, x) -> BaseAlgebra:
    x = rd.obj(x, "base", _BASE_FIELDS, {"dim", "structure", "unit"})
    r = rd.int_(x["dim"], "base.dim", 1)
    st = x["structure"]
    if not isinstance(st, list) or len(st) != r:
        raise DocumentError("base.structure", f"expected {r} blocks")
    structure = []
    for i, block in enumerate(st):
        if not isinstance(block, list) or len(block) != r:
            raise DocumentError(f"base.structure[{i}]", f"expected {r} products")
        structure.append([rd.vector(v, f"base.structure[{i}][{j}]", r) for j, v in enumerate(block)])
    unit = rd.vector(x["unit"], "base.unit", r)
    name = x.get("name", "R")
    try:
        return BaseAlgebra(rd.field, structure, unit, name=str(name))
    except (AlgebraError, DimensionError) as exc:
        raise DocumentError("base", str(exc)) from None


def _bimodule(rd: _Reader, x, where: str, R: BaseAlgebra, name: str) -> Bimodule:
    x = rd.obj(x, where, _BIMODULE_FIELDS, _BIMODULE_FIELDS)
    d = rd.int_(x["dim"], f"{where}.dim")
    acts = {}
    for side in ("left", "right"):
        mats = x[side]
        if not isinstance(mats, list) or len(mats) != R.dim:
            raise DocumentError(f"{where}.{side}", f"expected {R.dim} matrices")
        acts[side] = [rd.matrix(M, f"{where}.{side}[{i}]", d, d) for i, M in enumerate(mats)]
    try:
        return Bimodule(R, R, d, acts["left"], acts["right"], name=name, check=True)
    except (AlgebraError, DimensionError) as exc:
        raise DocumentError(where, str(exc)) from None


def _quadratic(rd: _Reader, x, R: BaseAlgebra, mods: dict, name: str) -> QuadraticPresentation:
    gen = x["generators"]
    if gen not in mods:
        raise DocumentError("presentation.generators", f"no bimodule named {gen!r}")
    V = mods[gen]
    side = x.get("side", "left")
    if side not in ("left", "right"):
        raise DocumentError("presentation.side", "expected \"left\" or \"right\"")
    d = V.dim
    rows = rd.rows(x["relations"], "presentation.relations", d * d)
    try:
        rel = Subspace.span(rd.field, d * d, from_rows(rd.field, rows, d * d)) if rows \
            else Subspace.zero(rd.field, d * d)
        return QuadraticPresentation(R, V, rel, side, name)
    except (AlgebraError, DimensionError) as exc:
        raise DocumentError("presentation.relations", str(exc)) from None


def from_document(doc, field: Field | None = None):
    """Build a presentation or CDG slice from a parsed document.

    ``field`` reinterprets the scalars over another field.
    """
    rd = _Reader(None)
    doc = rd.obj(doc, "", _TOP_FIELDS, {"format_version", "kind", "field", "base"})
    version = doc["format_version"]
    if isinstance(version, bool) or not isinstance(version, int):
        raise DocumentError("format_version", "expected an integer")
    if version != FORMAT_VERSION:
        raise DocumentError("format_version", f"unsupported version {version} (this reader knows {FORMAT_VERSION})")
    kind = doc["kind"]
    if kind not in KINDS:
        raise DocumentError("kind", f"expected one of {', '.join(KINDS)}")
    rd.field = field or _parse_field(doc["field"], "field")
    name = str(doc.get("name", ""))
    if "metadata" in doc and not isinstance(doc["metadata"], dict):
        raise DocumentError("metadata", "expected an object")
    R = _base(rd, doc["base"])
    mods = {}
    raw_mods = doc.get("bimodules", {})
    if not isinstance(raw_mods, dict):
        raise DocumentError("bimodules", "expected an object")
    for key in raw_mods:
        mods[key] = _bimodule(rd, raw_mods[key], f"bimodules.{key}", R, key)
    if kind == "cdg_slice":
        return _cdg(rd, doc, R, mods, name)
    if "presentation" not in doc:
        raise DocumentError("", "missing field 'presentation'")
    required = {"generators", "relations"}
    if kind == "nonhomogeneous":
        required |= {"q", "lifts", "p_values", "h_values"}
    x = rd.obj(doc["presentation"], "presentation", _PRES_FIELDS, required)
    Q = _quadratic(rd, x, R, mods, name)
    if kind == "quadratic":
        return Q
    d, r = Q.V.dim, R.dim
    q = x["q"]
    if not isinstance(q, list) or len(q) != d:
        raise DocumentError("presentation.q", f"expected {d} blocks")
    qv = []
    for v, block in enumerate(q):
        if not isinstance(block, list) or len(block) != r:
            raise DocumentError(f"presentation.q[{v}]", f"expected {r} values")
        qv.append([rd.vector(val, f"presentation.q[{v}][{s}]", r) for s, val in enumerate(block)])
    lifts = rd.rows(x["lifts"], "presentation.lifts", d * d)
    pv = rd.rows(x["p_values"], "presentation.p_values", d)
    hv = rd.rows(x["h_values"], "presentation.h_values", r)
    try:
        return NonhomogPresentation(Q, qv, lifts, pv, hv, name=name)
    except (AlgebraError, DimensionError) as exc:
        raise DocumentError("presentation", str(exc)) from None


def _cdg(rd: _Reader, doc: dict, R: BaseAlgebra, mods: dict, name: str) -> CdgRingSlice:
    if "cdg" not in doc:
        raise DocumentError("", "missing field 'cdg'")
    x = rd.obj(doc["cdg"], "cdg", _CDG_FIELDS, _CDG_FIELDS)
    comps_names = x["components"]
    if not isinstance(comps_names, list) or not comps_names:
        raise DocumentError("cdg.components", "expected a nonempty list of bimodule names")
    comps = []
    for i, key in enumerate(comps_names):
        if key not in mods:
            raise DocumentError(f"cdg.components[{i}]", f"no bimodule named {key!r}")
        comps.append(mods[key])
    N = len(comps) - 1
    dims = [M.dim for M in comps]
    products = x["products"]
    if not isinstance(products, dict):
        raise DocumentError("cdg.products", "expected an object keyed by \"i,j\"")
    mult = {}
    for i in range(N + 1):
        for j in range(N + 1 - i):
            if i == 0 or j == 0:
                continue
            key = f"{i},{j}"
            if key not in products:
                raise DocumentError("cdg.products", f"missing product {key!r}")
            mult[(i, j)] = rd.matrix(products[key], f"cdg.products.{key}", dims[i + j], dims[i] * dims[j])
    extra = sorted(set(products) - {f"{i},{j}" for (i, j) in mult})
    if extra:
        raise DocumentError(f"cdg.products.{extra[0]}", "product outside the slice")
    diffs = x["differential"]
    if not isinstance(diffs, list) or len(diffs) != N:
        raise DocumentError("cdg.differential", f"expected {N} matrices")
    d = [rd.matrix(M, f"cdg.differential[{n}]", dims[n + 1], dims[n]) for n, M in enumerate(diffs)]
    if N < 2:
        raise DocumentError("cdg.components", "a CDG slice needs degrees 0..2 for the curvature")
    h = rd.matrix([[v] for v in x["curvature"]] if isinstance(x["curvature"], list) else None,
                  "cdg.curvature", dims[2], 1)
    try:
        S = GradedAlgebraSlice.from_tables(R, comps, mult, name=name)
        S.validate()
    except (AlgebraError, DimensionError) as exc:
        raise DocumentError("cdg.products", str(exc)) from None
    pres = None
    if "presentation" in doc:
        px = rd.obj(doc["presentation"], "presentation", _PRES_FIELDS, {"generators", "relations"})
        pres = _quadratic(rd, px, R, mods, name)
    return CdgRingSlice(S, d, h, name=name, presentation=pres)


def loads(text: str, field: Field | None = None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return from_document(doc, field)


def load(path, field: Field | None = None):
    return loads(Path(path).read_text(), field)


# ---------------------------------------------------------------------------
# writing


def _s(F: Field, x):
    return F.format_scalar(x)


def _vec(F: Field, xs) -> list:
    return [_s(F, x) for x in xs]


def _mat(F: Field, M) -> list:
    return [[_s(F, M[i, j]) for j in range(M.ncols())] for i in range(M.nrows())]


def _field_doc(F: Field) -> dict:
    return {"kind": "q"} if F.p is None else {"kind": "fp", "p": F.p}


def _base_doc(R: BaseAlgebra) -> dict:
    F = R.field
    return {"name": R.name, "dim": R.dim,
            "structure": [[_vec(F, R.structure[i][j]) for j in range(R.dim)] for i in range(R.dim)],
            "unit": _vec(F, R.unit)}


def _bimodule_doc(V: Bimodule) -> dict:
    F = V.field
    return {"dim": V.dim, "left": [_mat(F, M) for M in V.left], "right": [_mat(F, M) for M in V.right]}


def _header(kind: str, name: str, R: BaseAlgebra) -> dict:
    return {"format_version": FORMAT_VERSION, "kind": kind, "name": name,
            "field": _field_doc(R.field), "base": _base_doc(R)}


def _quadratic_block(Q: QuadraticPresentation, gen: str) -> dict:
    return {"generators": gen, "side": Q.side, "relations": _mat(Q.field, Q.rel.basis)}


def to_document(obj, metadata: dict | None = None) -> dict:
    """Canonical document for a quadratic or nonhomogeneous presentation or a CDG slice."""
    if isinstance(obj, NonhomogPresentation):
        Q = obj.quad
        F = Q.field
        doc = _header("nonhomogeneous", obj.name, Q.R)
        doc["bimodules"] = {"V": _bimodule_doc(Q.V)}
        block = _quadratic_block(Q, "V")
        block["q"] = [[_vec(F, obj.q[v][s]) for s in range(Q.R.dim)] for v in range(Q.V.dim)]
        block["lifts"] = [_vec(F, row) for row in obj.lifts]
        block["p_values"] = [_vec(F, row) for row in obj.p_values]
        block["h_values"] = [_vec(F, row) for row in obj.h_values]
        doc["presentation"] = block
    elif isinstance(obj, QuadraticPresentation):
        doc = _header("quadratic", obj.name, obj.R)
        doc["bimodules"] = {"V": _bimodule_doc(obj.V)}
        doc["presentation"] = _quadratic_block(obj, "V")
    elif isinstance(obj, CdgRingSlice):
        S = obj.slice
        F = obj.field
        doc = _header("cdg_slice", obj.name, obj.R)
        names = [f"B{n}" for n in range(S.N + 1)]
        doc["bimodules"] = {nm: _bimodule_doc(M) for nm, M in zip(names, S.comps)}
        if obj.presentation is not None:
            doc["presentation"] = _quadratic_block(obj.presentation, "B1")
        doc["cdg"] = {
            "components": names,
            "products": {f"{i},{j}": _mat(F, S.mult[(i, j)])
                         for i in range(1, S.N + 1) for j in range(1, S.N + 1 - i)},
            "differential": [_mat(F, M) for M in obj.d],
            "curvature": [_s(F, obj.h[i, 0]) for i in range(obj.h.nrows())],
        }
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    if metadata:
        doc["metadata"] = metadata
    return doc


def _format(x, indent: int = 0) -> str:
    """JSON with objects and nested lists broken over lines and scalar rows kept inline."""
    pad = " " * (indent + 1)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_format(v, indent + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(x, list) and any(isinstance(v, (list, dict)) for v in x):
        items = [pad + _format(v, indent + 1) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + " " * indent + "]"
    return json.dumps(x)


def dumps(obj, metadata: dict | None = None) -> str:
    return _format(to_document(obj, metadata)) + "\n"


def save(obj, path, metadata: dict | None = None):
    Path(path).write_text(dumps(obj, metadata))


def export_corpus(directory) -> list:
    """Write every corpus entry as ``<name>.kz``; returns the written paths in corpus order."""
    from .corpus import corpus

    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for e in corpus():
        meta = {"expected": e.expected, "oracles": e.oracles, "failing": e.failing}
        path = out / f"{e.name}.kz"
        save(e.presentation, path, metadata=json.loads(json.dumps(meta, default=list)))
        paths.append(path)
    return paths
