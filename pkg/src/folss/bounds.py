"""Cup-length lower bounds with witness certificates.

The cup length of a slice counts factors: it is the largest k for which some
product a_1 ... a_k of positive-part elements is nonzero (0 for an empty slice).
It is computed exactly by span growth:

    A(1) = positive part,  A(k+1) = span{ g * h : g in basis A(k), h in positive basis }

and the value is the last k with A(k) != 0.  Multilinearity makes basis products
enough.  Each retained element remembers the left-nested factor list producing it,
so a positive value comes with a witness product.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable

from .complex import MultiComplex, cohomology
from .exactla import IncrementalSpan, Vector, is_zero
from .pages import PageClass, basic_image, compute_page, page_product

Grade = Hashable

LCP_CONVENTION = ("cup length counts factors: the largest k with a nonzero product "
                  "a_1 ... a_k of positive-part classes; 0 when there is none, "
                  "matching a category normalized to 0 on contractible spaces")


@dataclass(frozen=True)
class AlgebraClass:
    grade: Grade
    coords: Vector
    representative: Vector

    def to_dict(self) -> dict:
        return {"grade": list(self.grade) if isinstance(self.grade, tuple) else self.grade,
                "coords": [_fmt(x) for x in self.coords],
                "representative": [_fmt(x) for x in self.representative]}


def _fmt(x) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass
class GradedAlgebraSlice:
    """Positive part of a graded algebra given by class bases and a product evaluator.

    ``mult(a, b)`` returns the product class, with empty coords when the product
    leaves the ambient algebra (it is then zero).
    """

    ambient: str
    positive: dict[Grade, list[AlgebraClass]]
    mult: Callable[[AlgebraClass, AlgebraClass], AlgebraClass]
    contains: Callable[[Grade], bool] = field(default=lambda g: True)

    def basis(self) -> list[AlgebraClass]:
        return [c for g in sorted(self.positive, key=_order) for c in self.positive[g]]

    def dims(self) -> dict:
        return {g: len(v) for g, v in self.positive.items() if v}


def _order(g):
    return g if isinstance(g, tuple) else (g,)


@dataclass
class CupLengthCertificate:
    value: int
    ambient: str
    witness: list[AlgebraClass]
    product: AlgebraClass | None
    span_dims: list[int]  # dim A(1), dim A(2), ..., ending with the first 0

    @property
    def first_vanishing_length(self) -> int:
        return len(self.span_dims)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "ambient": self.ambient,
            "witness": [w.to_dict() for w in self.witness],
            "product": self.product.to_dict() if self.product is not None else None,
            "span_dims": list(self.span_dims),
            "first_vanishing_length": self.first_vanishing_length,
        }


def cup_length(a: GradedAlgebraSlice, max_length: int | None = None) -> CupLengthCertificate:
    positive = a.basis()
    layer = [(c, [c]) for c in positive]
    span_dims = [len(layer)]
    value = 0
    best = None
    while layer:
        value += 1
        best = layer[0]
        if max_length is not None and value >= max_length:
            break
        spans: dict[Grade, IncrementalSpan] = {}
        nxt = []
        for g, factors in layer:
            for h in positive:
                prod = a.mult(g, h)
                if not prod.coords or is_zero(prod.coords):
                    continue
                span = spans.setdefault(prod.grade, IncrementalSpan(len(prod.coords)))
                if span.add(prod.coords):
                    nxt.append((prod, factors + [h]))
        layer = nxt
        span_dims.append(len(layer))
    if best is None:
        return CupLengthCertificate(0, a.ambient, [], None, span_dims)
    return CupLengthCertificate(value, a.ambient, best[1], best[0], span_dims)


def verify_certificate(a: GradedAlgebraSlice, cert: CupLengthCertificate) -> bool:
    """Recompute the witness product from stored representatives."""
    # the span record must vanish exactly at length value + 1
    if len(cert.span_dims) != cert.value + 1 or cert.span_dims[-1] != 0:
        return False
    if any(n == 0 for n in cert.span_dims[:-1]):
        return False
    if cert.value == 0:
        return not cert.witness
    if len(cert.witness) != cert.value:
        return False
    known = {(c.grade, c.coords) for c in a.basis()}
    for w in cert.witness:
        if (w.grade, w.coords) not in known and not _in_positive(a, w):
            return False
    prod = cert.witness[0]
    for w in cert.witness[1:]:
        prod = a.mult(prod, w)
        if not prod.coords:
            return False
    if is_zero(prod.coords):
        return False
    return cert.product is None or (prod.grade == cert.product.grade and prod.coords == cert.product.coords)


def _in_positive(a: GradedAlgebraSlice, w: AlgebraClass) -> bool:
    return w.grade in a.positive and a.contains(w.grade) and any(w.coords)


# ---------------------------------------------------------------------------
# the four slices


def page_slice(mc: MultiComplex, r: int, keep: Callable[[int, int], bool], ambient: str,
               page=None) -> GradedAlgebraSlice:
    mc.require_product()
    page = page if page is not None else compute_page(mc, r, with_differentials=False)
    positive = {}
    for (p, q) in sorted(page.cells):
        if keep(p, q) and page.dim(p, q):
            positive[(p, q)] = [AlgebraClass((p, q), b.coords, b.representative) for b in page.basis(p, q)]

    def mult(x: AlgebraClass, y: AlgebraClass) -> AlgebraClass:
        a = PageClass(page.r, x.grade, x.coords, x.representative)
        b = PageClass(page.r, y.grade, y.coords, y.representative)
        out = page_product(page, a, b)
        coords = out.coords if keep(*out.bidegree) else ()
        return AlgebraClass(out.bidegree, coords, out.representative)

    return GradedAlgebraSlice(ambient, positive, mult, lambda g: keep(*g))


def e2_slice(mc: MultiComplex, page=None) -> GradedAlgebraSlice:
    return page_slice(mc, 2, lambda p, q: p > 0, "E_2^{>0,*}", page)


def tangential_slice(mc: MultiComplex, page=None) -> GradedAlgebraSlice:
    return page_slice(mc, 1, lambda p, q: q > 0, "E_1^{*,>0}", page)


def _cohomology_mult(mc: MultiComplex, H: dict, keep: Callable[[int], bool]):
    def mult(x: AlgebraClass, y: AlgebraClass) -> AlgebraClass:
        n = x.grade + y.grade
        prod = mc.multiply(x.grade, x.representative, y.grade, y.representative)
        if n not in H or not keep(n):
            return AlgebraClass(n, (), prod)
        return AlgebraClass(n, H[n].project(prod), prod)
    return mult


def derham_slice(mc: MultiComplex, d: int | None = None, H: dict | None = None) -> GradedAlgebraSlice:
    mc.require_product()
    d = mc.Q if d is None else d
    H = H if H is not None else cohomology(mc)
    positive = {}
    for n in sorted(H):
        if n > d and H[n].dim:
            positive[n] = [AlgebraClass(n, _unit(H[n].dim, i), rep) for i, rep in enumerate(H[n].reps)]
    keep = lambda n: n > d  # noqa: E731
    return GradedAlgebraSlice(f"H^{{>{d}}}", positive, _cohomology_mult(mc, H, keep), keep)


def basic_slice(mc: MultiComplex, H: dict | None = None, image=None) -> GradedAlgebraSlice:
    H = H if H is not None else cohomology(mc)
    image = image if image is not None else basic_image(mc, H=H)
    positive = {}
    for p, classes in image.classes.items():
        if classes:
            positive[p] = [AlgebraClass(p, h, z) for h, z in classes]
    keep = lambda n: n > 0  # noqa: E731
    return GradedAlgebraSlice("pi^* H_b^{>0}", positive, _cohomology_mult(mc, H, keep), keep)


def _unit(n: int, i: int) -> Vector:
    from .exactla import unit_vector
    return unit_vector(n, i)


# ---------------------------------------------------------------------------
# bounds


def bound_basic(mc: MultiComplex) -> CupLengthCertificate:
    return cup_length(basic_slice(mc))


def bound_derham(mc: MultiComplex, d: int | None = None) -> CupLengthCertificate:
    return cup_length(derham_slice(mc, d))


def bound_transverse_e2(mc: MultiComplex) -> CupLengthCertificate:
    return cup_length(e2_slice(mc))


def bound_tangential_e1(mc: MultiComplex) -> CupLengthCertificate:
    return cup_length(tangential_slice(mc))


BOUND_METADATA = {
    "basic": {"slice": "pi^* H_b^{>0}", "bounds": "transverse LS category"},
    "derham": {"slice": "H^{>d}(M), d = dim F", "bounds": "transverse LS category"},
    "e2": {"slice": "E_2^{>0,*}",
           "bounds": "saturated transverse LS category",
           "hypothesis": "valid for saturated transverse category under user-asserted "
                         "compact Hausdorff hypothesis"},
    "tangential": {"slice": "E_1^{*,>0}", "bounds": "tangential LS category"},
}


@dataclass
class BoundReport:
    certificates: dict[str, CupLengthCertificate]
    slices: dict[str, GradedAlgebraSlice]
    d: int
    basic_flagged: dict

    def values(self) -> dict[str, int]:
        return {k: c.value for k, c in self.certificates.items()}

    def verified(self) -> dict[str, bool]:
        return {k: verify_certificate(self.slices[k], c) for k, c in self.certificates.items()}

    def to_dict(self) -> dict:
        return {
            "values": self.values(),
            "certificates": {k: c.to_dict() for k, c in self.certificates.items()},
            "verified": self.verified(),
            "metadata": {
                "convention": LCP_CONVENTION,
                "tangential_dimension": self.d,
                "bounds": BOUND_METADATA,
                "basic_classes_without_cocycle_representative":
                    {str(p): v for p, v in self.basic_flagged.items() if v},
            },
        }

    def table(self) -> str:
        lines = [f"{'bound':<11} {'value':>5}  {'verified':<8}  applies to"]
        ver = self.verified()
        for k in ("basic", "derham", "e2", "tangential"):
            meta = BOUND_METADATA[k]
            note = meta["bounds"] + (" (compact Hausdorff hypothesis user-asserted)" if k == "e2" else "")
            lines.append(f"{k:<11} {self.certificates[k].value:>5}  {str(ver[k]):<8}  {note}")
        lines.append(f"convention: {LCP_CONVENTION}")
        return "\n".join(lines)


def bound_report(mc: MultiComplex, d: int | None = None) -> BoundReport:
    mc.require_product()
    d = mc.Q if d is None else d
    H = cohomology(mc)
    img = basic_image(mc, H=H)
    slices = {
        "basic": basic_slice(mc, H, img),
        "derham": derham_slice(mc, d, H),
        "e2": e2_slice(mc),
        "tangential": tangential_slice(mc),
    }
    certs = {k: cup_length(s) for k, s in slices.items()}
    return BoundReport(certs, slices, d, img.flagged)


__all__ = [
    "AlgebraClass",
    "BOUND_METADATA",
    "BoundReport",
    "CupLengthCertificate",
    "GradedAlgebraSlice",
    "LCP_CONVENTION",
    "basic_slice",
    "bound_basic",
    "bound_derham",
    "bound_report",
    "bound_tangential_e1",
    "bound_transverse_e2",
    "cup_length",
    "derham_slice",
    "e2_slice",
    "page_slice",
    "tangential_slice",
    "verify_certificate",
]
