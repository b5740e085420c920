"""Fixture generators: simplicial cochain algebras, bundle models, covers, random complexes."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .complex import (
    BigradedMap,
    ModelError,
    MultiComplex,
    ProductStructure,
    tensor_basis,
    tensor_product,
    transpose,
)
from .exactla import ONE, ZERO, SparseMatrix, as_fraction, inverse

FIXTURE_KINDS = ("point_foliation", "product_bundle", "hopf_model", "torus_bundle",
                 "torus_cover", "torus_point_foliation", "custom")


class FixtureError(ValueError):
    pass


# ---------------------------------------------------------------------------
# simplicial cochains


@dataclass(frozen=True)
class SimplicialComplex:
    simplices: dict[int, tuple[tuple[int, ...], ...]]  # dimension -> sorted simplices

    @staticmethod
    def from_maximal(faces: Iterable[Sequence[int]]) -> "SimplicialComplex":
        closed: set[tuple[int, ...]] = set()
        for f in faces:
            f = tuple(sorted(set(f)))
            if not f:
                continue
            for k in range(1, len(f) + 1):
                closed.update(itertools.combinations(f, k))
        by_dim: dict[int, list] = {}
        for s in closed:
            by_dim.setdefault(len(s) - 1, []).append(s)
        return SimplicialComplex({d: tuple(sorted(v)) for d, v in sorted(by_dim.items())})

    @property
    def dimension(self) -> int:
        return max(self.simplices, default=-1)

    def index(self, s: tuple[int, ...]) -> int | None:
        lst = self.simplices.get(len(s) - 1, ())
        try:
            return lst.index(s)
        except ValueError:
            return None

    def count(self, d: int) -> int:
        return len(self.simplices.get(d, ()))

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return all(other.index(s) is not None for lst in self.simplices.values() for s in lst)


def circle_complex(n: int = 3) -> SimplicialComplex:
    if n < 3:
        raise FixtureError("a simplicial circle needs at least 3 vertices")
    return SimplicialComplex.from_maximal([(i, (i + 1) % n) for i in range(n)])


def simplicial_cochains(K: SimplicialComplex, P: int | None = None, prefix: str = "") -> MultiComplex:
    """Cochain algebra of K at q = 0 with the Alexander-Whitney cup product.

    The coboundary is the d_1 block; basis of C^p is the sorted list of p-simplices.
    """
    top = K.dimension
    P = top if P is None else P
    if P < top:
        raise FixtureError("box is smaller than the complex")
    dims = {(p, 0): K.count(p) for p in range(0, top + 1)}
    diff = {}
    for p in range(0, top):
        entries = {}
        for row, s in enumerate(K.simplices.get(p + 1, ())):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                col = K.index(face)
                entries[(row, col)] = Fraction((-1) ** i)
        diff[(1, p, 0)] = SparseMatrix(K.count(p + 1), K.count(p), entries)
    table: dict = {}
    for a in range(0, top + 1):
        for b in range(0, top + 1 - a):
            pairs = {}
            for i, s in enumerate(K.simplices.get(a, ())):
                for j, t in enumerate(K.simplices.get(b, ())):
                    if s[-1] != t[0]:
                        continue
                    k = K.index(s + t[1:])
                    if k is not None:
                        pairs[(i, j)] = {k: ONE}
            if pairs:
                table[(a, 0, b, 0)] = pairs
    unit = [ONE] * K.count(0)
    labels = {(p, 0): tuple(prefix + "[" + ",".join(map(str, s)) + "]" for s in K.simplices.get(p, ()))
              for p in range(0, top + 1)}
    return MultiComplex.build(P, 0, dims, diff, ProductStructure.build(table, unit), labels)


def cochain_restriction(K: SimplicialComplex, L: SimplicialComplex, CK: MultiComplex,
                        CL: MultiComplex) -> BigradedMap:
    """Restriction C(K) -> C(L) for a subcomplex L of K."""
    if not L.is_subcomplex_of(K):
        raise FixtureError("restriction needs a subcomplex")
    blocks = {}
    for p in range(0, L.dimension + 1):
        entries = {(row, K.index(s)): ONE for row, s in enumerate(L.simplices[p])}
        blocks[(p, 0)] = SparseMatrix(L.count(p), K.count(p), entries)
    return BigradedMap.build(CK, CL, blocks)


def left_function_multiplication(K: SimplicialComplex, C: MultiComplex, values: dict[int, Fraction]
                                 ) -> BigradedMap:
    """c -> phi u c for a 0-cochain phi (given as vertex -> value)."""
    blocks = {}
    for p in range(0, K.dimension + 1):
        entries = {(i, i): as_fraction(values.get(s[0], 0)) for i, s in enumerate(K.simplices[p])}
        blocks[(p, 0)] = SparseMatrix(K.count(p), K.count(p), entries)
    return BigradedMap.build(C, C, blocks)


# ---------------------------------------------------------------------------
# model fixtures


def point_foliation(K: SimplicialComplex | Iterable[Sequence[int]]) -> MultiComplex:
    if not isinstance(K, SimplicialComplex):
        K = SimplicialComplex.from_maximal(K)
    return simplicial_cochains(K)


def circle(n: int = 3) -> MultiComplex:
    return simplicial_cochains(circle_complex(n))


def product_bundle(base: MultiComplex, fiber: MultiComplex) -> MultiComplex:
    """Trivial bundle model: base contributes transverse degree, fiber tangential degree."""
    if base.Q != 0 or fiber.Q != 0:
        raise FixtureError("product_bundle expects base and fiber concentrated at q = 0")
    return tensor_product(base, transpose(fiber))


def torus_bundle(n_base: int = 3, n_fiber: int = 3) -> MultiComplex:
    return product_bundle(circle(n_base), circle(n_fiber))


def torus_point_foliation(rank: int = 2, n: int = 3) -> MultiComplex:
    """Point foliation on the rank-n torus model (tensor power of the circle)."""
    if rank < 1:
        raise FixtureError("torus rank must be >= 1")
    mc = circle(n)
    for _ in range(rank - 1):
        mc = tensor_product(mc, circle(n))
    return mc


def hopf_model() -> MultiComplex:
    """Generators 1 (0,0), y (0,1), x (2,0), xy (2,1); d_2 y = x; x^2 = y^2 = 0."""
    dims = {(0, 0): 1, (0, 1): 1, (2, 0): 1, (2, 1): 1}
    diff = {(2, 0, 1): SparseMatrix(1, 1, {(0, 0): 1})}
    table = {
        (0, 0, 0, 0): {(0, 0): {0: ONE}},
        (0, 0, 0, 1): {(0, 0): {0: ONE}},
        (0, 0, 2, 0): {(0, 0): {0: ONE}},
        (0, 0, 2, 1): {(0, 0): {0: ONE}},
        (0, 1, 0, 0): {(0, 0): {0: ONE}},
        (2, 0, 0, 0): {(0, 0): {0: ONE}},
        (2, 1, 0, 0): {(0, 0): {0: ONE}},
        (2, 0, 0, 1): {(0, 0): {0: ONE}},  # x * y = xy
        (0, 1, 2, 0): {(0, 0): {0: ONE}},  # y * x = xy, forced by Leibniz
    }
    labels = {(0, 0): ("1",), (0, 1): ("y",), (2, 0): ("x",), (2, 1): ("xy",)}
    return MultiComplex.build(2, 1, dims, diff, ProductStructure.build(table, [ONE]), labels)


# ---------------------------------------------------------------------------
# random valid multicomplexes


def random_multicomplex(rng: random.Random, P: int, Q: int, max_dim: int = 6, *,
                        max_pairs: int | None = None, coeff: int = 2) -> MultiComplex:
    """Random valid multicomplex: cancelling pairs plus harmonic generators, conjugated
    by a random filtration-preserving automorphism of each total degree."""
    counts = {(p, q): rng.randint(0, 2) for p in range(P + 1) for q in range(Q + 1)}
    pairs = []
    n_pairs = rng.randint(0, max_pairs if max_pairs is not None else 2 * (P + 1) * (Q + 1))
    for _ in range(n_pairs):
        p, q = rng.randint(0, P), rng.randint(0, Q)
        k = rng.randint(0, P - p)
        tp, tq = p + k, q + 1 - k
        if not (0 <= tq <= Q):
            continue
        if counts[(p, q)] >= max_dim or counts[(tp, tq)] >= max_dim:
            continue
        src = counts[(p, q)]
        counts[(p, q)] += 1
        tgt = counts[(tp, tq)]
        counts[(tp, tq)] += 1
        pairs.append(((p, q, src), (tp, tq, tgt)))
    dims = {bd: n for bd, n in counts.items() if n}
    base = MultiComplex.build(P, Q, dims, {})

    def gidx(p, q, i):
        return base.offset(p, q) + i

    D0 = {}
    for (p, q, i), (tp, tq, j) in pairs:
        n = p + q
        D0.setdefault(n, {})[(gidx(tp, tq, j), gidx(p, q, i))] = ONE

    gs = {}
    for n in range(0, P + Q + 2):
        size = base.total_dim(n)
        entries = {}
        lay = base.layout(n)
        for pc, qc, offc, sc in lay:
            for pr, qr, offr, sr in lay:
                if pr < pc:
                    continue
                for i in range(sr):
                    for j in range(sc):
                        if pr == pc:
                            if i == j:
                                entries[(offr + i, offc + j)] = ONE
                            elif i > j:
                                entries[(offr + i, offc + j)] = rng.randint(-coeff, coeff)
                        else:
                            entries[(offr + i, offc + j)] = rng.randint(-coeff, coeff)
        lower = SparseMatrix(size, size, entries)
        # an upper unitriangular factor inside each diagonal block keeps g filtration-preserving
        up = {}
        for pc, qc, off, sc in lay:
            for i in range(sc):
                up[(off + i, off + i)] = ONE
                for j in range(i + 1, sc):
                    up[(off + i, off + j)] = rng.randint(-coeff, coeff)
        gs[n] = lower @ SparseMatrix(size, size, up)
    diff = {}
    for n in range(0, P + Q + 1):
        src_size, tgt_size = base.total_dim(n), base.total_dim(n + 1)
        if not src_size or not tgt_size:
            continue
        Dn = SparseMatrix(tgt_size, src_size, D0.get(n, {}))
        Dn = gs[n + 1] @ Dn @ inverse(gs[n])
        for p, q, off, size in base.layout(n):
            for tp, tq, toff, tsize in base.layout(n + 1):
                k = tp - p
                if k < 0 or not size or not tsize:
                    continue
                ent = {(i - toff, j - off): x for (i, j), x in Dn.items()
                       if toff <= i < toff + tsize and off <= j < off + size}
                if ent:
                    diff[(k, p, q)] = SparseMatrix(tsize, size, ent)
        for (i, j), x in Dn.items():
            pi = base.index_info(n + 1, i)[0]
            pj = base.index_info(n, j)[0]
            if pi < pj:
                raise AssertionError("random automorphism broke the filtration")  # generator bug
    return MultiComplex.build(P, Q, dims, diff)


# ---------------------------------------------------------------------------


def tensor_maps(f: BigradedMap, g: BigradedMap, source: MultiComplex, target: MultiComplex) -> BigradedMap:
    """f (x) g between tensor products (degree-0 maps need no signs)."""
    sb = tensor_basis(f.source, g.source)
    tb = tensor_basis(f.target, g.target)
    tindex = {bd: {t: n for n, t in enumerate(lst)} for bd, lst in tb.items()}
    blocks = {}
    for bd, lst in sb.items():
        entries = {}
        for col, (pa, qa, i, pb, qb, j) in enumerate(lst):
            fa = [(r, x) for (r, c), x in f.block(pa, qa).items() if c == i]
            gb = [(r, y) for (r, c), y in g.block(pb, qb).items() if c == j]
            for r1, x in fa:
                for r2, y in gb:
                    row = tindex[bd][(pa, qa, r1, pb, qb, r2)]
                    entries[(row, col)] = entries.get((row, col), ZERO) + x * y
        blocks[bd] = SparseMatrix(target.dim(*bd), source.dim(*bd), entries)
    return BigradedMap.build(source, target, blocks)


@dataclass(frozen=True)
class FixtureSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIXTURE_KINDS:
            raise FixtureError(f"unknown fixture kind {self.kind!r}; choose from {FIXTURE_KINDS}")


def gen_fixture(spec: FixtureSpec):
    """MultiComplex for model kinds, CoverData for torus_cover."""
    prm = dict(spec.params)
    for key in ("n", "n_base", "n_fiber"):
        if key in prm and int(prm[key]) < 3:
            raise FixtureError(f"{key} must be >= 3")
    if spec.kind == "hopf_model":
        return hopf_model()
    if spec.kind == "torus_bundle":
        return torus_bundle(int(prm.get("n_base", 3)), int(prm.get("n_fiber", 3)))
    if spec.kind == "product_bundle":
        base = torus_point_foliation(int(prm.get("base_rank", 1)), int(prm.get("n_base", 3)))
        fiber = torus_point_foliation(int(prm.get("fiber_rank", 1)), int(prm.get("n_fiber", 3)))
        return product_bundle(base, fiber)
    if spec.kind == "torus_point_foliation":
        rank = int(prm.get("rank", 2))
        if not 1 <= rank <= 4:
            raise FixtureError("rank must be between 1 and 4")
        return torus_point_foliation(rank, int(prm.get("n", 3)))
    if spec.kind == "point_foliation":
        faces = prm.get("faces")
        if faces is None:
            return circle(int(prm.get("n", 3)))
        return point_foliation(faces)
    if spec.kind == "torus_cover":
        from .relative import torus_cover
        return torus_cover(int(prm.get("n_base", 3)), int(prm.get("n_fiber", 3)),
                           weights=prm.get("weights"))
    if spec.kind == "custom":
        from .serialize import load_path
        if "path" not in prm:
            raise FixtureError("custom fixtures need a path")
        return load_path(prm["path"])
    raise FixtureError(spec.kind)  # unreachable


__all__ = [
    "FIXTURE_KINDS",
    "FixtureError",
    "FixtureSpec",
    "SimplicialComplex",
    "circle",
    "circle_complex",
    "cochain_restriction",
    "gen_fixture",
    "hopf_model",
    "left_function_multiplication",
    "point_foliation",
    "product_bundle",
    "random_multicomplex",
    "simplicial_cochains",
    "tensor_maps",
    "torus_bundle",
    "torus_point_foliation",
]
