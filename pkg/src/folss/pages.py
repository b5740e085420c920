"""Pages of the spectral sequence of the filtration F^p of a multicomplex.

For a cell at ``(p, q)`` on page ``r`` (total degree ``n = p + q``)::

    Z_r^p = {x in F^p Omega^n : D x in F^{p+r}}
    E_r^{p,q} = Z_r^p / (Z_{r-1}^{p+1} + D Z_{r-1}^{p-r+1})

Everything is computed modulo ``F^L`` with ``L = p + max(r, 1)``; that part
always lies in the denominator.  Cells are therefore subquotients of the total
space ``Omega^n`` whose numerator and denominator vectors are supported on
transverse degrees ``[p, L)``.  Class representatives are honest elements of
``Z_r^p`` and can be multiplied upstairs.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .complex import Bidegree, ModelError, MultiComplex, cohomology
from .exactla import (
    ZERO,
    IncrementalSpan,
    SparseMatrix,
    Subquotient,
    Subspace,
    Vector,
    induced_map,
    kernel,
    lincomb,
    rank_kernel_image,
    to_vector,
    unit_vector,
    zero_vector,
)

THREADS_ENV = "FOLSS_THREADS"


class StabilizationError(RuntimeError):
    """The pages did not stabilize within the bound forced by the finite box."""


@dataclass(frozen=True)
class PageClass:
    r: int
    bidegree: Bidegree
    coords: Vector
    representative: Vector

    @property
    def degree(self) -> int:
        return self.bidegree[0] + self.bidegree[1]

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)


@dataclass(eq=False)
class Page:
    mc: MultiComplex
    r: int
    cells: dict[Bidegree, Subquotient]
    d: dict[Bidegree, SparseMatrix] = field(default_factory=dict)
    stable_from: int | None = None

    def level(self, p: int) -> int:
        return p + max(self.r, 1)

    def dim(self, p: int, q: int) -> int:
        cell = self.cells.get((p, q))
        return cell.dim if cell is not None else 0

    def dims(self) -> dict[Bidegree, int]:
        return {bd: c.dim for bd, c in self.cells.items()}

    def nonzero_dims(self) -> dict[Bidegree, int]:
        return {bd: n for bd, n in self.dims().items() if n}

    def target(self, p: int, q: int) -> Bidegree:
        return (p + self.r, q - self.r + 1)

    def differential_matrix(self, p: int, q: int) -> SparseMatrix:
        m = self.d.get((p, q))
        if m is not None:
            return m
        return SparseMatrix(self.dim(*self.target(p, q)), self.dim(p, q))

    def project(self, p: int, q: int, v) -> Vector:
        """Coordinates of the class of v (an element of Z_r^p in degree p+q)."""
        cell = self.cells.get((p, q))
        if cell is None:
            return ()
        n = p + q
        return cell.project(self.mc.truncate(n, v, p, self.level(p)))

    def contains(self, p: int, q: int, v) -> bool:
        cell = self.cells.get((p, q))
        if cell is None:
            return not any(v)
        return cell.contains(self.mc.truncate(p + q, v, p, self.level(p)))

    def element(self, p: int, q: int, coords) -> PageClass:
        cell = self.cells.get((p, q))
        if cell is None:
            return PageClass(self.r, (p, q), (), zero_vector(self.mc.total_dim(p + q)))
        coords = to_vector(coords)
        return PageClass(self.r, (p, q), coords, cell.lift(coords))

    def from_representative(self, p: int, q: int, v) -> PageClass:
        return PageClass(self.r, (p, q), self.project(p, q, v), to_vector(v))

    def basis(self, p: int, q: int) -> list[PageClass]:
        cell = self.cells.get((p, q))
        if cell is None:
            return []
        out = []
        for i, rep in enumerate(cell.reps):
            coords = [ZERO] * cell.dim
            coords[i] = 1
            out.append(PageClass(self.r, (p, q), to_vector(coords), rep))
        return out

    def differential(self, c: PageClass) -> PageClass:
        self._check(c)
        p, q = c.bidegree
        tp, tq = self.target(p, q)
        coords = self.differential_matrix(p, q).apply(c.coords) if c.coords else ()
        if (tp, tq) not in self.cells:
            return PageClass(self.r, (tp, tq), (), zero_vector(self.mc.total_dim(tp + tq)))
        return PageClass(self.r, (tp, tq), coords,
                         self.mc.truncate(p + q + 1, self.mc.D(p + q, c.representative), tp,
                                          self.level(tp)))

    def _check(self, c: PageClass) -> None:
        if c.r != self.r:
            raise ValueError(f"class lives on page {c.r}, not on page {self.r}")

    def to_dict(self, representatives: bool = False) -> dict:
        out = {
            "r": self.r,
            "dims": [[p, q, n] for (p, q), n in sorted(self.dims().items())],
            "d": [
                {"p": p, "q": q, "rows": m.rows, "cols": m.cols,
                 "entries": [[i, j, _fmt(x)] for (i, j), x in sorted(m.items())]}
                for (p, q), m in sorted(self.d.items()) if m.rows and m.cols
            ],
        }
        if representatives:
            out["representatives"] = [
                {"p": p, "q": q, "vectors": [[_fmt(x) for x in rep] for rep in cell.reps]}
                for (p, q), cell in sorted(self.cells.items()) if cell.dim
            ]
        return out


def _fmt(x) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------


def _window_cycles(mc: MultiComplex, n: int, lo: int, hi: int, cond_hi: int) -> list[Vector]:
    """Vectors of Omega^n supported on [lo, hi) whose D has no component below cond_hi."""
    cols = mc.window(n, lo, hi)
    if not cols:
        return []
    rows = mc.window(n + 1, 0, cond_hi)
    sub = mc.total_differential(n).submatrix(rows, cols)
    ker = kernel(sub)
    size = mc.total_dim(n)
    out = []
    for v in ker.basis:
        full = [ZERO] * size
        for local, g in enumerate(cols):
            full[g] = v[local]
        out.append(tuple(full))
    return out


def compute_cell(mc: MultiComplex, r: int, p: int, q: int) -> Subquotient:
    n = p + q
    L = p + max(r, 1)
    size = mc.total_dim(n)
    num = _window_cycles(mc, n, p, L, p + r)
    den: list[Vector] = []
    if r >= 1:
        den.extend(_window_cycles(mc, n, p + 1, L, p + r))
        for z in _window_cycles(mc, n - 1, p - r + 1, L, p):
            den.append(mc.truncate(n, mc.D(n - 1, z), p, L))
    return Subquotient(Subspace.span(size, num), Subspace.span(size, den))


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def compute_page(mc: MultiComplex, r: int, *, with_differentials: bool = True) -> Page:
    if r < 0:
        raise ValueError("page index must be >= 0")
    bds = mc.bidegrees()
    workers = _workers()
    if workers > 1 and len(bds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = dict(zip(bds, pool.map(lambda bd: compute_cell(mc, r, *bd), bds)))
    else:
        cells = {bd: compute_cell(mc, r, *bd) for bd in bds}
    page = Page(mc, r, cells)
    if with_differentials:
        for (p, q), cell in cells.items():
            tp, tq = p + r, q - r + 1
            dst = cells.get((tp, tq))
            if dst is None:
                page.d[(p, q)] = SparseMatrix(0, cell.dim)
                continue
            n = p + q
            keep = set(mc.window(n + 1, tp, page.level(tp)))
            D = mc.total_differential(n)
            f = SparseMatrix(D.rows, D.cols, {(i, j): x for (i, j), x in D.items() if i in keep})
            page.d[(p, q)] = induced_map(f, cell, dst)
    return page


def compute_pages(mc: MultiComplex, max_r: int) -> list[Page]:
    return [compute_page(mc, r) for r in range(0, max_r + 1)]


def stabilization_index(pages: list[Page]) -> int:
    """Smallest r such that every later listed page has d_r = 0."""
    idx = len(pages)
    for page in reversed(pages):
        if all(m.is_zero() for m in page.d.values()):
            idx = page.r
        else:
            break
    return idx


def infinity_page(mc: MultiComplex) -> Page:
    bound = mc.P + 2
    pages = compute_pages(mc, bound)
    last, prev = pages[bound], pages[bound - 1]
    if last.dims() != prev.dims() or not all(m.is_zero() for m in prev.d.values()) \
            or not all(m.is_zero() for m in last.d.values()):
        raise StabilizationError(f"pages did not stabilize by r = {bound}")
    s = stabilization_index(pages)
    page = pages[s]
    page.stable_from = s
    return page


def page_product(page: Page, a: PageClass, b: PageClass) -> PageClass:
    """Class of rep(a) * rep(b) on the same page."""
    if a.r != page.r or b.r != page.r:
        raise ValueError(f"page_product needs classes on page {page.r}, got {a.r} and {b.r}")
    mc = page.mc
    (p, q), (r, s) = a.bidegree, b.bidegree
    tp, tq = p + r, q + s
    prod = mc.multiply(p + q, a.representative, r + s, b.representative)
    if (tp, tq) not in page.cells:
        return PageClass(page.r, (tp, tq), (), prod)
    return PageClass(page.r, (tp, tq), page.project(tp, tq, prod), prod)


def recursion_dims(page: Page) -> dict[Bidegree, int]:
    """dim H(E_r, d_r) at every bidegree, from the matrices of page r alone."""
    out = {}
    for (p, q) in page.cells:
        out_rank, _, _ = rank_kernel_image(page.differential_matrix(p, q))
        src = (p - page.r, q + page.r - 1)
        in_rank = rank_kernel_image(page.differential_matrix(*src))[0] if src in page.cells else 0
        out[(p, q)] = page.dim(p, q) - out_rank - in_rank
    return out


def induced_page_map(f, src: Page, dst: Page, p: int, q: int) -> SparseMatrix:
    """Matrix on E_r^{p,q} induced by a filtration-preserving map f (a BigradedMap)."""
    if src.r != dst.r:
        raise ValueError("pages differ")
    n = p + q
    keep = set(dst.mc.window(n, p, dst.level(p)))
    F = f.total(n)
    F = SparseMatrix(F.rows, F.cols, {(i, j): x for (i, j), x in F.items() if i in keep})
    return induced_map(F, src.cells[(p, q)], dst.cells[(p, q)])


# ---------------------------------------------------------------------------
# basic classes and the image of E_2^{p,0} in total cohomology


@dataclass
class BasicImage:
    """Image of the basic classes E_2^{p,0} (p > 0) in H^p of the total complex."""

    e2_dims: dict[int, int]
    liftable_dims: dict[int, int]
    flagged: dict[int, list[int]]  # E_2^{p,0} basis indices with no cocycle representative
    classes: dict[int, list[tuple[Vector, Vector]]]  # p -> [(coords in H^p, cocycle rep)]
    cohomology: dict

    def image_dims(self) -> dict[int, int]:
        return {p: len(v) for p, v in self.classes.items()}


def cohomology_product(mc: MultiComplex, H: dict, n: int, a, m: int, b) -> tuple[int, Vector, Vector]:
    prod = mc.multiply(n, a, m, b)
    if n + m not in H:
        return n + m, (), prod
    return n + m, H[n + m].project(prod), prod


def basic_image(mc: MultiComplex, page2: Page | None = None, H: dict | None = None) -> BasicImage:
    mc.require_product()
    page2 = page2 if page2 is not None else compute_page(mc, 2)
    H = H if H is not None else cohomology(mc)
    e2_dims, lift_dims, flagged, classes = {}, {}, {}, {}
    for p in range(1, mc.P + 1):
        cell = page2.cells.get((p, 0))
        if cell is None:
            continue
        n = p
        e2_dims[p] = cell.dim
        L = page2.level(p)
        extra = list(cell.B.basis)
        size = mc.total_dim(n)
        for g in mc.window(n, L, mc.P + 1):
            v = [ZERO] * size
            v[g] = 1
            extra.append(tuple(v))
        gens = list(cell.reps) + extra
        Dn = mc.total_differential(n)
        system = SparseMatrix.from_columns([Dn.apply(g) for g in gens], Dn.rows)
        ker = kernel(system)
        k = cell.dim
        reps = []
        span = IncrementalSpan(k)
        for sol in ker.basis:
            c = sol[:k]
            if any(c) and span.add(c):
                reps.append((c, lincomb(sol, gens, size)))
        lift_dims[p] = len(reps)
        flagged[p] = [i for i in range(k) if not span.contains(unit_vector(k, i))]
        image = []
        img_span = IncrementalSpan(H[n].dim)
        for _, z in reps:
            h = H[n].project(z)
            if any(h) and img_span.add(h):
                image.append((h, z))
        classes[p] = image
    return BasicImage(e2_dims, lift_dims, flagged, classes, H)


__all__ = [
    "BasicImage",
    "Page",
    "PageClass",
    "StabilizationError",
    "basic_image",
    "cohomology_product",
    "compute_cell",
    "compute_page",
    "compute_pages",
    "induced_page_map",
    "infinity_page",
    "page_product",
    "recursion_dims",
    "stabilization_index",
]
