"""Command-line interface: ``folss <subcommand> [input] [options]``.

Tables go to standard output; ``--output PATH`` additionally writes the JSON
result.  Input is read from a file argument or from standard input.  Failures
exit nonzero and print an error object ``{"schema_version", "error", ...}``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import dataclass, field

from . import __version__
from .serialize import SCHEMA_VERSION, SchemaError, dumps, fmt_scalar, loads

log = logging.getLogger("folss")

GEN_KINDS = ("point_foliation", "product_bundle", "hopf_model", "hopf", "torus_bundle",
             "torus_cover", "torus_point_foliation", "random", "custom")


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    max_r: int | None = None
    verbosity: int = 0
    seed: int = 0
    kind: str | None = None
    params: dict = field(default_factory=dict)
    u_class: str | None = None
    v_class: str | None = None
    d: int | None = None
    representatives: bool = False


class CliError(Exception):
    def __init__(self, kind: str, detail: str, extra: dict | None = None):
        super().__init__(detail)
        self.kind = kind
        self.detail = detail
        self.extra = extra or {}


def _read_input(cfg: RunConfig, stdin):
    path = cfg.inputs[0] if cfg.inputs else "-"
    if path == "-":
        text, base = stdin.read(), None
    else:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError("io_error", str(exc)) from exc
        base = os.path.dirname(os.path.abspath(path))
    if not text.strip():
        raise CliError("schema_error", "empty input")
    return loads(text, base)


def _emit(cfg: RunConfig, payload: dict, table: str, stdout) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    if table:
        stdout.write(table.rstrip("\n") + "\n")
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _require_complex(obj, sub: str):
    from .complex import MultiComplex
    if not isinstance(obj, MultiComplex):
        raise CliError("schema_error", f"{sub} needs a multicomplex, got cover data")
    return obj


def _require_cover(obj, sub: str):
    from .relative import CoverData
    if not isinstance(obj, CoverData):
        raise CliError("schema_error", f"{sub} needs cover data (type 'cover')")
    return obj


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(cfg: RunConfig, stdin, stdout) -> int:
    from .complex import MultiComplex, validate
    from .relative import validate_cover

    obj = _read_input(cfg, stdin)
    rep = validate(obj) if isinstance(obj, MultiComplex) else validate_cover(obj)
    if not rep.ok:
        raise CliError("validation_failed", f"{len(rep.violations)} violated identities",
                       {"report": rep.to_dict()})
    _emit(cfg, {"command": "validate", "report": rep.to_dict()}, "valid: no violated identities", stdout)
    return 0


def cmd_pages(cfg: RunConfig, stdin, stdout) -> int:
    from .pages import compute_pages

    mc = _require_complex(_read_input(cfg, stdin), "pages")
    max_r = cfg.max_r if cfg.max_r is not None else mc.P + 2
    if max_r < 0:
        raise CliError("bad_argument", "--max-r must be >= 0")
    pages = compute_pages(mc, max_r)
    stable = None
    for page in pages:
        if all(m.is_zero() for later in pages[page.r:] for m in later.d.values()):
            stable = page.r
            break
    stable_note = (f"stabilization detected at r = {stable}" if stable is not None
                   else "not stabilized within the computed range")
    lines = []
    for page in pages:
        cells = " ".join(f"({p},{q})={n}" for (p, q), n in sorted(page.nonzero_dims().items()))
        nz = [f"({p},{q})" for (p, q), m in sorted(page.d.items()) if not m.is_zero()]
        lines.append(f"E_{page.r}: {cells or '0'}" + (f"   d_{page.r} != 0 at {' '.join(nz)}" if nz else ""))
    lines.append(stable_note)
    payload = {"command": "pages", "max_r": max_r, "stabilized_at": stable,
               "pages": [p.to_dict(cfg.representatives) for p in pages]}
    _emit(cfg, payload, "\n".join(lines), stdout)
    return 0


def cmd_bounds(cfg: RunConfig, stdin, stdout) -> int:
    from .bounds import bound_report

    mc = _require_complex(_read_input(cfg, stdin), "bounds")
    if mc.product is None:
        raise CliError("schema_error", "bounds needs a product structure")
    rep = bound_report(mc, cfg.d)
    _emit(cfg, {"command": "bounds", **rep.to_dict()}, rep.table(), stdout)
    if not all(rep.verified().values()):
        raise CliError("certificate_failed", "a certificate did not re-verify", rep.to_dict())
    return 0


def cmd_mv_check(cfg: RunConfig, stdin, stdout) -> int:
    from .relative import mv_e1_exactness, validate_cover

    c = _require_cover(_read_input(cfg, stdin), "mv-check")
    cover_rep = validate_cover(c)
    mv_rep = mv_e1_exactness(c) if cover_rep.ok else None
    payload = {"command": "mv-check", "cover": cover_rep.to_dict(),
               "e1": mv_rep.to_dict() if mv_rep is not None else None}
    if not cover_rep.ok or not mv_rep.ok:
        raise CliError("validation_failed", "cover check failed", payload)
    table = "\n".join([
        "cover data: valid (square, E_0 exactness, section property, basic partition)",
        "E_1 Mayer-Vietoris: exact in every bidegree",
        "pi S = id, S d_0 = d_0 S, i Delta = dS - Sd, dJ - Jd = -Delta pi: all hold",
    ])
    _emit(cfg, payload, table, stdout)
    return 0


def _parse_class(spec: str | None, flag: str) -> tuple[int, int, int]:
    if not spec:
        raise CliError("bad_argument", f"{flag} is required (format p,q,index)")
    try:
        p, q, i = (int(x) for x in spec.split(","))
    except ValueError as exc:
        raise CliError("bad_argument", f"{flag} must look like p,q,index") from exc
    return p, q, i


def cmd_relative_cup(cfg: RunConfig, stdin, stdout) -> int:
    from .relative import (
        RelativeProductError,
        compatibility,
        rel_class,
        relative_cup,
        relative_pages,
    )

    c = _require_cover(_read_input(cfg, stdin), "relative-cup")
    rps = {W: relative_pages(c, W) for W in ("U", "V", "M")}
    chosen = []
    for W, spec, flag in (("U", cfg.u_class, "--u-class"), ("V", cfg.v_class, "--v-class")):
        p, q, i = _parse_class(spec, flag)
        sq = rps[W].E2.get((p, q))
        if sq is None or not 0 <= i < sq.dim:
            dim = sq.dim if sq is not None else 0
            raise CliError("bad_argument", f"E_2^{{{p},{q}}}(M,{W}) has dimension {dim}; no class {i}")
        chosen.append(rel_class(rps[W], p, q, sq.reps[i]))
    x, y = chosen
    try:
        out = relative_cup(c, x, y, rp_U=rps["U"], rp_V=rps["V"], rp_M=rps["M"])
    except RelativeProductError as exc:
        raise CliError("relative_product_not_cocycle", str(exc)) from exc
    left, right = compatibility(c, x, y)
    tp, tq = out.bidegree
    sq = rps["M"].E2.get((tp, tq))
    klass = list(map(fmt_scalar, sq.project(out.coords))) if sq is not None else []
    payload = {
        "command": "relative-cup",
        "u_class": {"bidegree": list(x.bidegree), "coords": list(map(fmt_scalar, x.coords))},
        "v_class": {"bidegree": list(y.bidegree), "coords": list(map(fmt_scalar, y.coords))},
        "product": {"bidegree": [tp, tq], "mu": list(map(fmt_scalar, out.mu)),
                    "xi": list(map(fmt_scalar, out.alpha)), "class_in_E2_M_UuV": klass},
        "cocycle": True,
        "compatible_with_page_product": left == right,
        "image_in_E2_M": list(map(fmt_scalar, left)),
        "page_product_in_E2_M": list(map(fmt_scalar, right)),
    }
    table = "\n".join([
        f"x in E_2^{x.bidegree}(M,U), y in E_2^{y.bidegree}(M,V) -> product in E_2^{(tp, tq)}(M,UuV)",
        f"product is a delta-cocycle: yes; class coordinates: {klass or '[] (zero group)'}",
        f"image in E_2(M) matches page product: {'yes' if left == right else 'NO'}",
    ])
    _emit(cfg, payload, table, stdout)
    if left != right:
        raise CliError("compatibility_failed", "relative product does not map to the page product", payload)
    return 0


def _coerce(v: str):
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return json.loads(v)
    except json.JSONDecodeError:
        return v


def cmd_gen(cfg: RunConfig, stdin, stdout) -> int:
    from .fixtures import FixtureError, FixtureSpec, gen_fixture, random_multicomplex

    kind = cfg.kind
    if kind not in GEN_KINDS:
        raise CliError("bad_argument", f"--kind must be one of {', '.join(GEN_KINDS)}")
    if kind == "hopf":
        kind = "hopf_model"
    try:
        if kind == "random":
            rng = random.Random(cfg.seed)
            P = int(cfg.params.get("P", rng.randint(0, 3)))
            Q = int(cfg.params.get("Q", rng.randint(0, 3)))
            if not (0 <= P <= 3 and 0 <= Q <= 3):
                raise FixtureError("random fixtures need 0 <= P, Q <= 3")
            obj = random_multicomplex(rng, P, Q, int(cfg.params.get("max_dim", 6)))
        else:
            obj = gen_fixture(FixtureSpec(kind, dict(cfg.params)))
    except (FixtureError, ValueError) as exc:
        raise CliError("bad_argument", str(exc)) from exc
    text = dumps(obj)
    stdout.write(text)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "pages": cmd_pages,
    "bounds": cmd_bounds,
    "mv-check": cmd_mv_check,
    "relative-cup": cmd_relative_cup,
    "gen": cmd_gen,
}


def run_cli(cfg: RunConfig, stdin=None, stdout=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity, 2), stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    log.info("running %s", cfg.subcommand)
    try:
        return COMMANDS[cfg.subcommand](cfg, stdin, stdout)
    except CliError as exc:
        err = {"schema_version": SCHEMA_VERSION, "error": exc.kind, "detail": exc.detail, **exc.extra}
    except SchemaError as exc:
        err = {"schema_version": SCHEMA_VERSION, "error": "schema_error", "detail": str(exc)}
    text = json.dumps(err, sort_keys=True, indent=1) + "\n"
    stdout.write(text)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    return 2 if err["error"] in ("schema_error", "bad_argument", "io_error") else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="folss", description="Exact spectral sequences of foliated "
                                 "models and cup-length bounds.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p, with_input=True):
        if with_input:
            p.add_argument("input", nargs="?", default="-", help="JSON input (default: stdin)")
        p.add_argument("--output", "-o", help="write the JSON result here")
        p.add_argument("--verbose", "-v", action="count", default=0)
        p.add_argument("--seed", type=int, default=0, help="seed for randomized runs")
        return p

    common(sub.add_parser("validate", help="check the multicomplex or cover identities"))
    pg = common(sub.add_parser("pages", help="dump pages E_0 .. E_R"))
    pg.add_argument("--max-r", type=int, default=None)
    pg.add_argument("--representatives", action="store_true")
    bd = common(sub.add_parser("bounds", help="the four cup-length bounds"))
    bd.add_argument("--d", type=int, default=None, help="tangential dimension (default Q)")
    common(sub.add_parser("mv-check", help="Mayer-Vietoris checks on cover data"))
    rc = common(sub.add_parser("relative-cup", help="relative product of two E_2 classes"))
    rc.add_argument("--u-class", required=True, help="p,q,index of a class of E_2(M,U)")
    rc.add_argument("--v-class", required=True, help="p,q,index of a class of E_2(M,V)")
    gn = common(sub.add_parser("gen", help="emit a fixture as JSON"), with_input=False)
    gn.add_argument("--kind", required=True, choices=GEN_KINDS)
    gn.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    return ap


def main(argv=None, stdin=None, stdout=None) -> int:
    args = build_parser().parse_args(argv)
    params = {}
    for item in getattr(args, "param", []):
        if "=" not in item:
            raise SystemExit(f"--param expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        params[k] = _coerce(v)
    cfg = RunConfig(
        subcommand=args.subcommand,
        inputs=[args.input] if getattr(args, "input", None) else [],
        output=args.output,
        max_r=getattr(args, "max_r", None),
        verbosity=args.verbose,
        seed=args.seed,
        kind=getattr(args, "kind", None),
        params=params,
        u_class=getattr(args, "u_class", None),
        v_class=getattr(args, "v_class", None),
        d=getattr(args, "d", None),
        representatives=getattr(args, "representatives", False),
    )
    return run_cli(cfg, stdin, stdout)


if __name__ == "__main__":
    raise SystemExit(main())
