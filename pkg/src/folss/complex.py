"""Finite bigraded models of a foliated manifold.

A :class:`MultiComplex` is a bigraded space ``Omega^{p,q}`` (``0 <= p <= P``
transverse, ``0 <= q <= Q`` tangential) with differential components ``d_k``
of bidegree ``(k, 1 - k)``.  The total differential ``D = sum_k d_k`` squares
to zero and preserves the decreasing filtration ``F^p = sum_{p' >= p}``.
An optional :class:`ProductStructure` makes it a filtered DGA.

Elements of the total complex are dense vectors over ``Omega^n``; the basis of
``Omega^n`` is the concatenation of the bases of ``Omega^{p, n-p}`` in
increasing ``p``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .exactla import (
    ONE,
    ZERO,
    LinearAlgebraError,
    SparseMatrix,
    Subquotient,
    Subspace,
    Vector,
    as_fraction,
    rank,
    rank_kernel_image,
    unit_vector,
)

Bidegree = tuple[int, int]
# sparse element of the bigraded space: (p, q, i) -> coefficient
Element = dict


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    bidegree: tuple | None = None
    index: tuple | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "bidegree": list(self.bidegree) if self.bidegree is not None else None,
            "index": list(self.index) if isinstance(self.index, tuple) else self.index,
            "detail": self.detail,
        }


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, bidegree=None, index=None, detail: str = "") -> None:
        self.violations.append(Violation(kind, bidegree, index, detail))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {"valid": self.ok, "violations": [v.to_dict() for v in self.violations]}

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, eq=False)
class ProductStructure:
    """Bilinear products Omega^{p,q} x Omega^{r,s} -> Omega^{p+r,q+s} on basis pairs.

    ``table[(p, q, r, s)][(i, j)]`` maps target basis index ``k`` to a coefficient.
    """

    table: Mapping[tuple[int, int, int, int], Mapping[tuple[int, int], Mapping[int, Fraction]]]
    unit: Vector

    @staticmethod
    def build(table, unit) -> "ProductStructure":
        clean = {}
        for key, pairs in table.items():
            cp = {}
            for ij, vec in pairs.items():
                cv = {int(k): as_fraction(c) for k, c in vec.items() if as_fraction(c)}
                if cv:
                    cp[tuple(ij)] = cv
            if cp:
                clean[tuple(key)] = cp
        return ProductStructure(clean, tuple(as_fraction(x) for x in unit))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProductStructure):
            return NotImplemented
        return self.unit == other.unit and _dictify(self.table) == _dictify(other.table)

    def __hash__(self):
        return id(self)


def _dictify(table):
    return {k: {ij: dict(v) for ij, v in pairs.items()} for k, pairs in table.items()}


@dataclass(frozen=True, eq=False)
class MultiComplex:
    P: int
    Q: int
    dims: Mapping[Bidegree, int]
    diff: Mapping[tuple[int, int, int], SparseMatrix]
    product: ProductStructure | None = None
    labels: Mapping[Bidegree, tuple[str, ...]] | None = None

    @staticmethod
    def build(P: int, Q: int, dims, diff=None, product: ProductStructure | None = None,
              labels=None) -> "MultiComplex":
        if P < 0 or Q < 0:
            raise ModelError("box sizes must be non-negative")
        d = {}
        for (p, q), n in dict(dims).items():
            if not (0 <= p <= P and 0 <= q <= Q):
                if n:
                    raise ModelError(f"bidegree ({p},{q}) outside the {P}x{Q} box")
                continue
            if n < 0:
                raise ModelError("negative dimension")
            if n:
                d[(p, q)] = int(n)
        blocks = {}
        for (k, p, q), m in dict(diff or {}).items():
            if k < 0:
                raise ModelError("differential components need k >= 0")
            src = d.get((p, q), 0)
            tgt = d.get((p + k, q + 1 - k), 0) if (0 <= p + k <= P and 0 <= q + 1 - k <= Q) else 0
            if m.shape != (tgt, src):
                raise ModelError(f"d_{k} block at ({p},{q}) has shape {m.shape}, expected {(tgt, src)}")
            if not m.is_zero():
                blocks[(k, p, q)] = m
        if product is not None:
            if len(product.unit) != d.get((0, 0), 0):
                raise ModelError("unit has the wrong length")
            for (p, q, r, s), pairs in product.table.items():
                n1, n2 = d.get((p, q), 0), d.get((r, s), 0)
                nt = d.get((p + r, q + s), 0)
                for (i, j), vec in pairs.items():
                    if not (0 <= i < n1 and 0 <= j < n2):
                        raise ModelError(f"product entry {(i, j)} out of range at {(p, q, r, s)}")
                    for kk in vec:
                        if not 0 <= kk < nt:
                            raise ModelError(
                                f"product at {(p, q, r, s)} lands outside the box or basis range")
        lab = None
        if labels:
            lab = {}
            for bd, names in dict(labels).items():
                names = tuple(names)
                if len(names) != d.get(tuple(bd), 0):
                    raise ModelError(f"label count mismatch at {bd}")
                if names:
                    lab[tuple(bd)] = names
        return MultiComplex(P, Q, d, blocks, product, lab)

    # basic shape -------------------------------------------------------
    def dim(self, p: int, q: int) -> int:
        return self.dims.get((p, q), 0)

    def bidegrees(self) -> list[Bidegree]:
        return [(p, q) for p in range(self.P + 1) for q in range(self.Q + 1)]

    def block(self, k: int, p: int, q: int) -> SparseMatrix:
        m = self.diff.get((k, p, q))
        if m is not None:
            return m
        return SparseMatrix(self.dim(p + k, q + 1 - k), self.dim(p, q))

    @property
    def K(self) -> int:
        return max((k for k, _, _ in self.diff), default=0)

    @property
    def top_degree(self) -> int:
        return self.P + self.Q

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiComplex):
            return NotImplemented
        return (self.P, self.Q, dict(self.dims), dict(self.diff), self.product,
                dict(self.labels or {})) == (other.P, other.Q, dict(other.dims), dict(other.diff),
                                             other.product, dict(other.labels or {}))

    def __hash__(self):
        return id(self)

    def __repr__(self) -> str:
        return f"MultiComplex(P={self.P}, Q={self.Q}, total_dim={sum(self.dims.values())})"

    # total complex -----------------------------------------------------
    @cached_property
    def _layouts(self) -> dict[int, tuple[list[tuple[int, int, int, int]], int]]:
        out = {}
        for n in range(-1, self.P + self.Q + 3):
            blocks = []
            off = 0
            for p in range(0, self.P + 1):
                q = n - p
                if 0 <= q <= self.Q:
                    size = self.dim(p, q)
                    blocks.append((p, q, off, size))
                    off += size
            out[n] = (blocks, off)
        return out

    def layout(self, n: int) -> list[tuple[int, int, int, int]]:
        """[(p, q, offset, size), ...] for the total degree n."""
        return self._layouts.get(n, ([], 0))[0]

    def total_dim(self, n: int) -> int:
        return self._layouts.get(n, ([], 0))[1]

    def offset(self, p: int, q: int) -> int:
        for pp, qq, off, _ in self.layout(p + q):
            if pp == p:
                return off
        raise ModelError(f"bidegree ({p},{q}) not in the box")

    def window(self, n: int, lo: int, hi: int) -> list[int]:
        """Total indices in degree n of components with transverse degree in [lo, hi)."""
        idx = []
        for p, q, off, size in self.layout(n):
            if lo <= p < hi:
                idx.extend(range(off, off + size))
        return idx

    @cached_property
    def _index_table(self) -> dict[int, list[tuple[int, int, int]]]:
        tab = {}
        for n in range(0, self.P + self.Q + 1):
            rows = []
            for p, q, _, size in self.layout(n):
                rows.extend((p, q, i) for i in range(size))
            tab[n] = rows
        return tab

    def index_info(self, n: int, g: int) -> tuple[int, int, int]:
        return self._index_table[n][g]

    @cached_property
    def _total_diffs(self) -> dict[int, SparseMatrix]:
        out = {}
        for n in range(-1, self.P + self.Q + 2):
            rows, cols = self.total_dim(n + 1), self.total_dim(n)
            entries = {}
            for p, q, off, size in self.layout(n):
                if not size:
                    continue
                for k in range(0, self.P - p + 1):
                    tp, tq = p + k, q + 1 - k
                    m = self.diff.get((k, p, q))
                    if m is None:
                        continue
                    toff = self.offset(tp, tq)
                    for (i, j), x in m.items():
                        entries[(toff + i, off + j)] = x
            out[n] = SparseMatrix(rows, cols, entries)
        return out

    def total_differential(self, n: int) -> SparseMatrix:
        if n in self._total_diffs:
            return self._total_diffs[n]
        return SparseMatrix(self.total_dim(n + 1), self.total_dim(n))

    def D(self, n: int, v) -> Vector:
        return self.total_differential(n).apply(v)

    def embed(self, p: int, q: int, local) -> Vector:
        n = p + q
        out = [ZERO] * self.total_dim(n)
        off = self.offset(p, q)
        for i, x in enumerate(local):
            out[off + i] = as_fraction(x)
        return tuple(out)

    def component(self, n: int, p: int, v) -> Vector:
        for pp, qq, off, size in self.layout(n):
            if pp == p:
                return tuple(v[off:off + size])
        return ()

    def truncate(self, n: int, v, lo: int, hi: int) -> Vector:
        keep = set(self.window(n, lo, hi))
        return tuple(x if i in keep else ZERO for i, x in enumerate(v))

    def filtration_degree(self, n: int, v) -> int | None:
        """Largest p with v in F^p (None for v = 0)."""
        for p, q, off, size in self.layout(n):
            if any(v[off:off + size]):
                return p
        return None

    # products ----------------------------------------------------------
    def require_product(self) -> ProductStructure:
        if self.product is None:
            raise ModelError("this operation needs a product structure")
        return self.product

    def to_element(self, n: int, v) -> Element:
        tab = self._index_table.get(n, [])
        return {tab[g]: x for g, x in enumerate(v) if x}

    def from_element(self, n: int, e: Element) -> Vector:
        out = [ZERO] * self.total_dim(n)
        for (p, q, i), x in e.items():
            if x:
                out[self.offset(p, q) + i] += x
        return tuple(out)

    def mult_elements(self, a: Element, b: Element) -> Element:
        table = self.require_product().table
        out: Element = {}
        for (p, q, i), x in a.items():
            for (r, s, j), y in b.items():
                vec = table.get((p, q, r, s), {}).get((i, j))
                if not vec:
                    continue
                xy = x * y
                for k, c in vec.items():
                    key = (p + r, q + s, k)
                    val = out.get(key, ZERO) + xy * c
                    if val:
                        out[key] = val
                    else:
                        out.pop(key, None)
        return out

    def multiply(self, n: int, a, m: int, b) -> Vector:
        """Product of total vectors a in Omega^n and b in Omega^m."""
        prod = self.mult_elements(self.to_element(n, a), self.to_element(m, b))
        return self.from_element(n + m, prod)

    def unit_total(self) -> Vector:
        return self.embed(0, 0, self.require_product().unit)


# ---------------------------------------------------------------------------
# validation


def _first_nonzero(m: SparseMatrix):
    return min(m.items())[0] if m.nnz() else None


def validate(mc: MultiComplex, ps: ProductStructure | None = None, *, check_product: bool = True
             ) -> ValidationReport:
    """Check the component form of D^2 = 0 and, if present, the product axioms."""
    rep = ValidationReport()
    for p, q in mc.bidegrees():
        if not mc.dim(p, q):
            continue
        for n in range(0, 2 * mc.P + 1):
            tp, tq = p + n, q + 2 - n
            if not (0 <= tp <= mc.P and 0 <= tq <= mc.Q) or not mc.dim(tp, tq):
                continue
            acc = SparseMatrix(mc.dim(tp, tq), mc.dim(p, q))
            for j in range(0, n + 1):
                i = n - j
                mp, mq = p + j, q + 1 - j
                if not (0 <= mp <= mc.P and 0 <= mq <= mc.Q):
                    continue
                acc = acc + mc.block(i, mp, mq) @ mc.block(j, p, q)
            if not acc.is_zero():
                rep.add("d_squared", (p, q), _first_nonzero(acc),
                        f"sum of d_i d_j with i + j = {n} is nonzero from ({p},{q}) to ({tp},{tq})")
    product = ps if ps is not None else mc.product
    if product is not None and check_product:
        if ps is not None and ps is not mc.product:
            mc = MultiComplex.build(mc.P, mc.Q, mc.dims, mc.diff, ps, mc.labels)
        rep.extend(_validate_product(mc))
    return rep


def _basis(mc: MultiComplex):
    for p, q in mc.bidegrees():
        for i in range(mc.dim(p, q)):
            yield (p, q, i)


def _validate_product(mc: MultiComplex) -> ValidationReport:
    rep = ValidationReport()
    one = {(0, 0, i): x for i, x in enumerate(mc.product.unit) if x}
    basis = list(_basis(mc))
    for e in basis:
        el = {e: ONE}
        if mc.mult_elements(one, el) != el:
            rep.add("unit_left", e[:2], (e[2],), "unit * e != e")
        if mc.mult_elements(el, one) != el:
            rep.add("unit_right", e[:2], (e[2],), "e * unit != e")

    prods: dict[tuple, Element] = {}
    for a in basis:
        for b in basis:
            ab = mc.mult_elements({a: ONE}, {b: ONE})
            if ab:
                prods[(a, b)] = ab
    # (ab)c = a(bc) holds trivially when both partial products vanish
    triples = set()
    for (a, b) in prods:
        for c in basis:
            triples.add((a, b, c))
            triples.add((c, a, b))
    for a, b, c in sorted(triples):
        ab = prods.get((a, b))
        left = mc.mult_elements(ab, {c: ONE}) if ab else {}
        bc = prods.get((b, c))
        right = mc.mult_elements({a: ONE}, bc) if bc else {}
        if left != right:
            rep.add("associativity", a[:2], (a[2], b[2], c[2]),
                    f"(ab)c != a(bc) for bidegrees {a[:2]}, {b[:2]}, {c[:2]}")

    def dtot(el: Element) -> Element:
        out: Element = {}
        for (p, q, i), x in el.items():
            for k in range(0, mc.P - p + 1):
                m = mc.diff.get((k, p, q))
                if m is None:
                    continue
                for (r, j), c in m.items():
                    if j == i:
                        key = (p + k, q + 1 - k, r)
                        val = out.get(key, ZERO) + x * c
                        if val:
                            out[key] = val
                        else:
                            out.pop(key, None)
        return out

    def add(x: Element, y: Element, c=ONE) -> Element:
        out = dict(x)
        for k, v in y.items():
            val = out.get(k, ZERO) + c * v
            if val:
                out[k] = val
            else:
                out.pop(k, None)
        return out

    dbasis = {e: dtot({e: ONE}) for e in basis}
    for a in basis:
        da = dbasis[a]
        sign = -1 if (a[0] + a[1]) % 2 else 1
        for b in basis:
            lhs = dtot(prods.get((a, b), {}))
            rhs = add(mc.mult_elements(da, {b: ONE}), mc.mult_elements({a: ONE}, dbasis[b]), sign)
            if lhs != rhs:
                rep.add("leibniz", a[:2], (a[2], b[2]),
                        f"d(ab) != (da)b + (-1)^|a| a(db) for bidegrees {a[:2]}, {b[:2]}")
    return rep


# ---------------------------------------------------------------------------
# cohomology of the total complex


def total_cohomology(mc: MultiComplex) -> dict[int, int]:
    out = {}
    for n in range(0, mc.top_degree + 1):
        dn = mc.total_dim(n)
        out[n] = dn - rank(mc.total_differential(n)) - rank(mc.total_differential(n - 1))
    return out


def cohomology(mc: MultiComplex) -> dict[int, Subquotient]:
    """H^n of the total complex as Subquotient(ker D_n, im D_{n-1}) inside Omega^n."""
    out = {}
    for n in range(0, mc.top_degree + 1):
        _, ker, _ = rank_kernel_image(mc.total_differential(n))
        _, _, img = rank_kernel_image(mc.total_differential(n - 1))
        out[n] = Subquotient(ker, img)
    return out


def euler_characteristic(mc: MultiComplex) -> int:
    return sum((-1) ** (p + q) * n for (p, q), n in mc.dims.items())


# ---------------------------------------------------------------------------
# maps between multicomplexes


@dataclass(frozen=True, eq=False)
class BigradedMap:
    """Bidegree-preserving linear map; blocks[(p, q)] : source^{p,q} -> target^{p,q}."""

    source: MultiComplex
    target: MultiComplex
    blocks: Mapping[Bidegree, SparseMatrix]

    @staticmethod
    def build(source: MultiComplex, target: MultiComplex, blocks) -> "BigradedMap":
        clean = {}
        for (p, q), m in dict(blocks).items():
            shape = (target.dim(p, q), source.dim(p, q))
            if m.shape != shape:
                raise ModelError(f"map block at ({p},{q}) has shape {m.shape}, expected {shape}")
            if not m.is_zero():
                clean[(p, q)] = m
        return BigradedMap(source, target, clean)

    @staticmethod
    def identity(mc: MultiComplex) -> "BigradedMap":
        return BigradedMap.build(mc, mc, {bd: SparseMatrix.identity(n) for bd, n in mc.dims.items()})

    def block(self, p: int, q: int) -> SparseMatrix:
        m = self.blocks.get((p, q))
        if m is not None:
            return m
        return SparseMatrix(self.target.dim(p, q), self.source.dim(p, q))

    def total(self, n: int) -> SparseMatrix:
        entries = {}
        for p, q, off, size in self.source.layout(n):
            m = self.blocks.get((p, q))
            if m is None:
                continue
            toff = self.target.offset(p, q)
            for (i, j), x in m.items():
                entries[(toff + i, off + j)] = x
        return SparseMatrix(self.target.total_dim(n), self.source.total_dim(n), entries)

    def apply(self, n: int, v) -> Vector:
        return self.total(n).apply(v)

    def __matmul__(self, other: "BigradedMap") -> "BigradedMap":
        if other.target is not self.source and other.target != self.source:
            raise ModelError("maps are not composable")
        blocks = {bd: self.block(*bd) @ other.block(*bd) for bd in other.source.dims}
        return BigradedMap.build(other.source, self.target, blocks)

    def __add__(self, other: "BigradedMap") -> "BigradedMap":
        blocks = {bd: self.block(*bd) + other.block(*bd)
                  for bd in set(self.source.dims) | set(other.source.dims)}
        return BigradedMap.build(self.source, self.target, blocks)

    def scale(self, c) -> "BigradedMap":
        return BigradedMap.build(self.source, self.target,
                                 {bd: m.scale(c) for bd, m in self.blocks.items()})

    def __neg__(self) -> "BigradedMap":
        return self.scale(-1)


def check_chain_map(f: BigradedMap, ks: Iterable[int] | None = None, name: str = "map") -> ValidationReport:
    """f commutes with the listed d_k blocks (all of them by default)."""
    rep = ValidationReport()
    S, T = f.source, f.target
    kmax = max(S.P, T.P)
    for k in (ks if ks is not None else range(0, kmax + 1)):
        for p, q in S.bidegrees():
            tp, tq = p + k, q + 1 - k
            if not (0 <= tp <= T.P and 0 <= tq <= T.Q):
                continue
            lhs = f.block(tp, tq) @ S.block(k, p, q)
            rhs = T.block(k, p, q) @ f.block(p, q)
            if lhs != rhs:
                rep.add(f"{name}_not_chain_d{k}", (p, q), _first_nonzero(lhs - rhs),
                        f"{name} does not commute with d_{k} at ({p},{q})")
    return rep


def check_multiplicative(f: BigradedMap, name: str = "map") -> ValidationReport:
    rep = ValidationReport()
    S, T = f.source, f.target
    if S.product is None or T.product is None:
        rep.add(f"{name}_no_product", None, None, "both ends need products")
        return rep
    one_s = S.unit_total()
    if f.apply(0, one_s) != T.unit_total():
        rep.add(f"{name}_unit", (0, 0), None, f"{name} does not preserve the unit")

    def fe(e: Element) -> Element:
        out: Element = {}
        for (p, q, i), x in e.items():
            for (r, j), c in f.block(p, q).items():
                if j == i:
                    out[(p, q, r)] = out.get((p, q, r), ZERO) + x * c
        return {k: v for k, v in out.items() if v}

    basis = list(_basis(S))
    images = {e: fe({e: ONE}) for e in basis}
    for a in basis:
        for b in basis:
            lhs = fe(S.mult_elements({a: ONE}, {b: ONE}))
            rhs = T.mult_elements(images[a], images[b])
            if lhs != rhs:
                rep.add(f"{name}_not_multiplicative", a[:2], (a[2], b[2]),
                        f"{name}(ab) != {name}(a){name}(b) for {a[:2]} x {b[:2]}")
    return rep


def validate_restriction(f: BigradedMap, name: str = "restriction") -> ValidationReport:
    rep = check_chain_map(f, name=name)
    rep.extend(check_multiplicative(f, name=name))
    return rep


# ---------------------------------------------------------------------------
# constructions


def tensor_basis(a: MultiComplex, b: MultiComplex) -> dict[Bidegree, list[tuple]]:
    """Ordered basis of (A (x) B)^{p,q} as tuples (pa, qa, i, pb, qb, j)."""
    out: dict[Bidegree, list[tuple]] = {}
    for (pa, qa) in sorted(a.dims):
        for (pb, qb) in sorted(b.dims):
            key = (pa + pb, qa + qb)
            lst = out.setdefault(key, [])
            for i in range(a.dim(pa, qa)):
                for j in range(b.dim(pb, qb)):
                    lst.append((pa, qa, i, pb, qb, j))
    return out


def tensor_product(a: MultiComplex, b: MultiComplex) -> MultiComplex:
    """A (x) B with Koszul signs by total degree.

    d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy and
    (x (x) y)(x' (x) y') = (-1)^{|y||x'|} xx' (x) yy'.
    """
    basis = tensor_basis(a, b)
    index = {bd: {t: n for n, t in enumerate(lst)} for bd, lst in basis.items()}
    P, Q = a.P + b.P, a.Q + b.Q
    dims = {bd: len(lst) for bd, lst in basis.items()}

    def col_of(m: SparseMatrix) -> dict[int, list[tuple[int, Fraction]]]:
        cols: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), x in m.items():
            cols.setdefault(c, []).append((r, x))
        return cols

    acols = {key: col_of(m) for key, m in a.diff.items()}
    bcols = {key: col_of(m) for key, m in b.diff.items()}
    diff_entries: dict[tuple[int, int, int], dict[tuple[int, int], Fraction]] = {}
    for (p, q), lst in basis.items():
        for col, (pa, qa, i, pb, qb, j) in enumerate(lst):
            for k in range(0, P - p + 1):
                tgt = (p + k, q + 1 - k)
                if tgt not in index:
                    continue
                ent = diff_entries.setdefault((k, p, q), {})
                for r, x in acols.get((k, pa, qa), {}).get(i, ()):
                    row = index[tgt][(pa + k, qa + 1 - k, r, pb, qb, j)]
                    ent[(row, col)] = ent.get((row, col), ZERO) + x
                sign = -1 if (pa + qa) % 2 else 1
                for r, y in bcols.get((k, pb, qb), {}).get(j, ()):
                    row = index[tgt][(pa, qa, i, pb + k, qb + 1 - k, r)]
                    ent[(row, col)] = ent.get((row, col), ZERO) + sign * y
    diff = {}
    for (k, p, q), ent in diff_entries.items():
        tgt = (p + k, q + 1 - k)
        diff[(k, p, q)] = SparseMatrix(dims.get(tgt, 0), dims[(p, q)], ent)

    product = None
    if a.product is not None and b.product is not None:
        table: dict = {}
        at, bt = a.product.table, b.product.table
        for (p, q), l1 in basis.items():
            for (r, s), l2 in basis.items():
                pairs = {}
                for n1, (pa, qa, i, pb, qb, j) in enumerate(l1):
                    for n2, (pa2, qa2, i2, pb2, qb2, j2) in enumerate(l2):
                        va = at.get((pa, qa, pa2, qa2), {}).get((i, i2))
                        if not va:
                            continue
                        vb = bt.get((pb, qb, pb2, qb2), {}).get((j, j2))
                        if not vb:
                            continue
                        sign = -1 if ((pb + qb) * (pa2 + qa2)) % 2 else 1
                        tgt_index = index[(p + r, q + s)]
                        vec = {}
                        for k1, c1 in va.items():
                            for k2, c2 in vb.items():
                                kk = tgt_index[(pa + pa2, qa + qa2, k1, pb + pb2, qb + qb2, k2)]
                                vec[kk] = vec.get(kk, ZERO) + sign * c1 * c2
                        pairs[(n1, n2)] = vec
                if pairs:
                    table[(p, q, r, s)] = pairs
        ua, ub = a.product.unit, b.product.unit
        unit = [ZERO] * dims.get((0, 0), 0)
        for i, x in enumerate(ua):
            for j, y in enumerate(ub):
                if x and y:
                    unit[index[(0, 0)][(0, 0, i, 0, 0, j)]] += x * y
        product = ProductStructure.build(table, unit)

    labels = None
    if a.labels and b.labels:
        labels = {}
        for bd, lst in basis.items():
            labels[bd] = tuple(
                f"{a.labels[(pa, qa)][i]}*{b.labels[(pb, qb)][j]}" for pa, qa, i, pb, qb, j in lst)
    return MultiComplex.build(P, Q, dims, diff, product, labels)


def transpose(mc: MultiComplex) -> MultiComplex:
    """Swap transverse and tangential roles (needs only d_0 and d_1)."""
    if any(k > 1 for k, _, _ in mc.diff):
        raise ModelError("transpose needs a multicomplex with only d_0 and d_1")
    dims = {(q, p): n for (p, q), n in mc.dims.items()}
    diff = {(1 - k, q, p): m for (k, p, q), m in mc.diff.items()}
    product = None
    if mc.product is not None:
        table = {(q, p, s, r): pairs for (p, q, r, s), pairs in mc.product.table.items()}
        product = ProductStructure.build(table, mc.product.unit)
    labels = {(q, p): names for (p, q), names in mc.labels.items()} if mc.labels else None
    return MultiComplex.build(mc.Q, mc.P, dims, diff, product, labels)


def direct_sum(a: MultiComplex, b: MultiComplex) -> MultiComplex:
    """A + B; with products on both, the product algebra with componentwise multiplication."""
    P, Q = max(a.P, b.P), max(a.Q, b.Q)
    dims = {}
    for bd in set(a.dims) | set(b.dims):
        dims[bd] = a.dim(*bd) + b.dim(*bd)
    diff = {}
    for k in range(0, P + 1):
        for p in range(P + 1):
            for q in range(Q + 1):
                tp, tq = p + k, q + 1 - k
                if not (0 <= tp <= P and 0 <= tq <= Q):
                    continue
                ma, mb = a.block(k, p, q), b.block(k, p, q)
                blk = SparseMatrix.block([[ma, SparseMatrix(ma.rows, mb.cols)],
                                          [SparseMatrix(mb.rows, ma.cols), mb]])
                if not blk.is_zero():
                    diff[(k, p, q)] = blk
    product = None
    if a.product is not None and b.product is not None:
        table = {}
        for src, shift_of in ((a, lambda bd: 0), (b, lambda bd: a.dim(*bd))):
            for (p, q, r, s), pairs in src.product.table.items():
                o1, o2, ot = shift_of((p, q)), shift_of((r, s)), shift_of((p + r, q + s))
                dst = table.setdefault((p, q, r, s), {})
                for (i, j), vec in pairs.items():
                    dst[(i + o1, j + o2)] = {k + ot: c for k, c in vec.items()}
        unit = tuple(a.product.unit) + tuple(b.product.unit)
        product = ProductStructure.build(table, unit)
    return MultiComplex.build(P, Q, dims, diff, product)


def is_zero_complex(mc: MultiComplex) -> bool:
    return not any(mc.dims.values())


def zero_like(mc: MultiComplex) -> MultiComplex:
    return MultiComplex.build(mc.P, mc.Q, {}, {}, ProductStructure.build({}, ()))


__all__ = [
    "BigradedMap",
    "ModelError",
    "MultiComplex",
    "ProductStructure",
    "ValidationReport",
    "Violation",
    "check_chain_map",
    "check_multiplicative",
    "cohomology",
    "direct_sum",
    "euler_characteristic",
    "tensor_basis",
    "tensor_product",
    "total_cohomology",
    "transpose",
    "validate",
    "validate_restriction",
    "zero_like",
]
