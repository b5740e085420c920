"""JSON round-trip for multicomplexes and cover data (scalars as "num/den" strings)."""
from __future__ import annotations

import json
import os
import re
from fractions import Fraction
from typing import Any

from .complex import BigradedMap, MultiComplex, ProductStructure
from .exactla import SparseMatrix

SCHEMA_VERSION = 1
_SCALAR = re.compile(r"^-?\d+(/\d+)?$")
MAP_NAMES = ("rho_MU", "rho_MV", "rho_UUV", "rho_VUV", "e_U", "e_V")
MAP_ENDS = {"rho_MU": ("M", "U"), "rho_MV": ("M", "V"), "rho_UUV": ("U", "UV"),
            "rho_VUV": ("V", "UV"), "e_U": ("UV", "U"), "e_V": ("UV", "V")}


class SchemaError(ValueError):
    pass


def fmt_scalar(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(s) -> Fraction:
    if isinstance(s, bool):
        raise SchemaError(f"bad scalar {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str) or not _SCALAR.match(s.strip()):
        raise SchemaError(f"scalars must be strings 'a/b' or integers, got {s!r}")
    val = Fraction(s.strip())
    return val


def _entries_out(m: SparseMatrix) -> list:
    return [[i, j, fmt_scalar(x)] for (i, j), x in sorted(m.items())]


def _entries_in(raw, rows: int, cols: int, where: str) -> SparseMatrix:
    entries = {}
    for item in raw:
        if not (isinstance(item, list) and len(item) == 3):
            raise SchemaError(f"{where}: entries are [row, col, scalar] triples")
        i, j, x = item
        if not (isinstance(i, int) and isinstance(j, int) and 0 <= i < rows and 0 <= j < cols):
            raise SchemaError(f"{where}: index ({i}, {j}) outside a {rows}x{cols} block")
        entries[(i, j)] = parse_scalar(x)
    return SparseMatrix(rows, cols, entries)


def _int(d: dict, key: str, where: str) -> int:
    v = d.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"{where}: field {key!r} must be an integer")
    return v


# ---------------------------------------------------------------------------


def multicomplex_to_dict(mc: MultiComplex) -> dict:
    out: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "type": "multicomplex",
        "P": mc.P,
        "Q": mc.Q,
        "dims": [[p, q, n] for (p, q), n in sorted(mc.dims.items())],
        "diff": [{"k": k, "p": p, "q": q, "entries": _entries_out(m)}
                 for (k, p, q), m in sorted(mc.diff.items())],
        "product": None,
        "labels": None,
    }
    if mc.product is not None:
        blocks = []
        for (p, q, r, s), pairs in sorted(mc.product.table.items()):
            ent = [[i, j, k, fmt_scalar(c)] for (i, j), vec in sorted(pairs.items())
                   for k, c in sorted(vec.items())]
            blocks.append({"p": p, "q": q, "r": r, "s": s, "entries": ent})
        out["product"] = {"unit": [fmt_scalar(x) for x in mc.product.unit], "blocks": blocks}
    if mc.labels:
        out["labels"] = [[p, q, list(names)] for (p, q), names in sorted(mc.labels.items())]
    return out


def multicomplex_from_dict(d: dict) -> MultiComplex:
    if not isinstance(d, dict):
        raise SchemaError("a multicomplex must be a JSON object")
    _check_version(d)
    if d.get("type", "multicomplex") != "multicomplex":
        raise SchemaError(f"expected a multicomplex, got type {d.get('type')!r}")
    P, Q = _int(d, "P", "multicomplex"), _int(d, "Q", "multicomplex")
    dims = {}
    for item in d.get("dims", []):
        if not (isinstance(item, list) and len(item) == 3 and all(isinstance(x, int) for x in item)):
            raise SchemaError("dims entries are [p, q, n] integer triples")
        p, q, n = item
        dims[(p, q)] = n

    def dim(p, q):
        return dims.get((p, q), 0) if (0 <= p <= P and 0 <= q <= Q) else 0

    diff = {}
    for blk in d.get("diff", []):
        k, p, q = (_int(blk, key, "diff block") for key in ("k", "p", "q"))
        where = f"d_{k} block at ({p},{q})"
        diff[(k, p, q)] = _entries_in(blk.get("entries", []), dim(p + k, q + 1 - k), dim(p, q), where)
    product = None
    if d.get("product") is not None:
        pr = d["product"]
        unit = [parse_scalar(x) for x in pr.get("unit", [])]
        table: dict = {}
        for blk in pr.get("blocks", []):
            p, q, r, s = (_int(blk, key, "product block") for key in ("p", "q", "r", "s"))
            pairs = table.setdefault((p, q, r, s), {})
            for item in blk.get("entries", []):
                if not (isinstance(item, list) and len(item) == 4):
                    raise SchemaError("product entries are [i, j, k, scalar]")
                i, j, k, c = item
                pairs.setdefault((i, j), {})[k] = parse_scalar(c)
        product = ProductStructure.build(table, unit)
    labels = None
    if d.get("labels"):
        labels = {(p, q): tuple(names) for p, q, names in d["labels"]}
    try:
        return MultiComplex.build(P, Q, dims, diff, product, labels)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def _check_version(d: dict) -> None:
    v = d.get("schema_version")
    if v != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {v!r} (expected {SCHEMA_VERSION})")


def _map_to_list(f: BigradedMap) -> list:
    return [{"p": p, "q": q, "entries": _entries_out(m)} for (p, q), m in sorted(f.blocks.items())]


def _map_from_list(raw, source: MultiComplex, target: MultiComplex, name: str) -> BigradedMap:
    blocks = {}
    for blk in raw:
        p, q = _int(blk, "p", name), _int(blk, "q", name)
        blocks[(p, q)] = _entries_in(blk.get("entries", []), target.dim(p, q), source.dim(p, q),
                                     f"{name} block at ({p},{q})")
    return BigradedMap.build(source, target, blocks)


def cover_to_dict(c) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "cover",
        "complexes": {name: multicomplex_to_dict(c.complex(name)) for name in ("M", "U", "V", "UV")},
        "maps": {name: _map_to_list(getattr(c, name)) for name in MAP_NAMES},
        "meta": _jsonable(c.meta),
    }


def cover_from_dict(d: dict, base_dir: str | None = None):
    from .relative import CoverData

    _check_version(d)
    if d.get("type") != "cover":
        raise SchemaError("expected type 'cover'")
    cx = {}
    for name in ("M", "U", "V", "UV"):
        ref = d.get("complexes", {}).get(name)
        if ref is None:
            raise SchemaError(f"cover is missing complex {name}")
        if isinstance(ref, str):
            path = ref if os.path.isabs(ref) or base_dir is None else os.path.join(base_dir, ref)
            with open(path) as fh:
                ref = json.load(fh)
        cx[name] = multicomplex_from_dict(ref)
    maps = {}
    for name in MAP_NAMES:
        s, t = MAP_ENDS[name]
        maps[name] = _map_from_list(d.get("maps", {}).get(name, []), cx[s], cx[t], name)
    return CoverData(cx["M"], cx["U"], cx["V"], cx["UV"], maps["rho_MU"], maps["rho_MV"],
                     maps["rho_UUV"], maps["rho_VUV"], maps["e_U"], maps["e_V"], d.get("meta", {}))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return fmt_scalar(x)
    return x


def to_dict(obj) -> dict:
    if isinstance(obj, MultiComplex):
        return multicomplex_to_dict(obj)
    return cover_to_dict(obj)


def from_dict(d: dict, base_dir: str | None = None):
    if not isinstance(d, dict):
        raise SchemaError("top-level JSON must be an object")
    if d.get("type") == "cover":
        return cover_from_dict(d, base_dir)
    return multicomplex_from_dict(d)


def dumps(obj) -> str:
    data = obj if isinstance(obj, dict) else to_dict(obj)
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def loads(text: str, base_dir: str | None = None):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return from_dict(data, base_dir)


def load_path(path: str):
    with open(path) as fh:
        return loads(fh.read(), os.path.dirname(os.path.abspath(path)))


__all__ = [
    "SCHEMA_VERSION",
    "SchemaError",
    "cover_from_dict",
    "cover_to_dict",
    "dumps",
    "fmt_scalar",
    "from_dict",
    "load_path",
    "loads",
    "multicomplex_from_dict",
    "multicomplex_to_dict",
    "parse_scalar",
    "to_dict",
]
