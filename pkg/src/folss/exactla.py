"""Exact sparse linear algebra over the rationals.

Vectors are dense tuples of :class:`fractions.Fraction`; matrices are
:class:`SparseMatrix` objects storing only nonzero entries.  Elimination is
Gauss-Jordan with pivots of smallest bit-size (ties broken by lowest row, then
lowest column), which keeps coefficient growth small and makes every chosen
basis reproducible.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

Vector = tuple  # tuple[Fraction, ...]


class LinearAlgebraError(ValueError):
    pass


class InducedMapError(LinearAlgebraError):
    """Raised when a map does not preserve a subquotient's numerator or denominator."""

    def __init__(self, violation: str, index: int, detail: str = ""):
        self.violation = violation
        self.index = index
        msg = f"{violation} violated at basis index {index}"
        super().__init__(msg + (f": {detail}" if detail else ""))


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def bitsize(x: Fraction) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, i: int) -> Vector:
    v = [ZERO] * n
    v[i] = ONE
    return tuple(v)


def to_vector(values: Iterable) -> Vector:
    return tuple(as_fraction(x) for x in values)


def is_zero(v: Sequence[Fraction]) -> bool:
    return not any(v)


def vadd(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a: Sequence[Fraction]) -> Vector:
    c = as_fraction(c)
    return tuple(c * x for x in a)


def lincomb(coeffs: Sequence[Fraction], vectors: Sequence[Sequence[Fraction]], n: int) -> Vector:
    out = [ZERO] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for i, x in enumerate(v):
                if x:
                    out[i] += c * x
    return tuple(out)


def _sparse(v: Sequence[Fraction]) -> dict[int, Fraction]:
    return {i: x for i, x in enumerate(v) if x}


def _dense(d: Mapping[int, Fraction], n: int) -> Vector:
    out = [ZERO] * n
    for i, x in d.items():
        out[i] = x
    return tuple(out)


class SparseMatrix:
    """Immutable rows x cols matrix over Q with only nonzero entries stored."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object] | None = None):
        if rows < 0 or cols < 0:
            raise LinearAlgebraError("negative matrix shape")
        clean: dict[tuple[int, int], Fraction] = {}
        for (i, j), x in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise LinearAlgebraError(f"entry ({i}, {j}) outside {rows}x{cols}")
            x = as_fraction(x)
            if x:
                clean[(i, j)] = x
        self.rows = rows
        self.cols = cols
        self._entries = clean

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], cols: int | None = None) -> "SparseMatrix":
        nrows = len(rows)
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise LinearAlgebraError("ragged dense matrix")
            for j, x in enumerate(row):
                if x:
                    entries[(i, j)] = x
        return cls(nrows, ncols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "SparseMatrix":
        entries = {}
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise LinearAlgebraError("column length mismatch")
            for i, x in enumerate(col):
                if x:
                    entries[(i, j)] = x
        return cls(rows, len(columns), entries)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["SparseMatrix"]]) -> "SparseMatrix":
        """Assemble a block matrix; every block row must agree in height."""
        row_heights = [blk_row[0].rows for blk_row in blocks]
        col_widths = [b.cols for b in blocks[0]] if blocks else []
        entries = {}
        r0 = 0
        for bi, blk_row in enumerate(blocks):
            c0 = 0
            for bj, b in enumerate(blk_row):
                if b.rows != row_heights[bi] or b.cols != col_widths[bj]:
                    raise LinearAlgebraError("inconsistent block shapes")
                for (i, j), x in b._entries.items():
                    entries[(r0 + i, c0 + j)] = x
                c0 += b.cols
            r0 += row_heights[bi]
        return cls(sum(row_heights), sum(col_widths), entries)

    # access -------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._entries)

    def items(self):
        return self._entries.items()

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self._entries.get(key, ZERO)

    def nnz(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def to_dense(self) -> list[list[Fraction]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (i, j), x in self._entries.items():
            out[i][j] = x
        return out

    def column(self, j: int) -> Vector:
        out = [ZERO] * self.rows
        for (i, jj), x in self._entries.items():
            if jj == j:
                out[i] = x
        return tuple(out)

    def columns(self) -> list[Vector]:
        cols = [[ZERO] * self.rows for _ in range(self.cols)]
        for (i, j), x in self._entries.items():
            cols[j][i] = x
        return [tuple(c) for c in cols]

    def row_dicts(self) -> list[dict[int, Fraction]]:
        rows: list[dict[int, Fraction]] = [{} for _ in range(self.rows)]
        for (i, j), x in self._entries.items():
            rows[i][j] = x
        return rows

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "SparseMatrix":
        rmap = {r: a for a, r in enumerate(row_idx)}
        cmap = {c: b for b, c in enumerate(col_idx)}
        entries = {}
        for (i, j), x in self._entries.items():
            if i in rmap and j in cmap:
                entries[(rmap[i], cmap[j])] = x
        return SparseMatrix(len(row_idx), len(col_idx), entries)

    # arithmetic ---------------------------------------------------------
    def apply(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.cols:
            raise LinearAlgebraError(f"vector of length {len(v)} applied to {self.rows}x{self.cols}")
        out = [ZERO] * self.rows
        for (i, j), x in self._entries.items():
            y = v[j]
            if y:
                out[i] += x * y
        return tuple(out)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise LinearAlgebraError(f"cannot compose {self.shape} with {other.shape}")
        by_row: dict[int, list[tuple[int, Fraction]]] = {}
        for (k, j), y in other._entries.items():
            by_row.setdefault(k, []).append((j, y))
        acc: dict[tuple[int, int], Fraction] = {}
        for (i, k), x in self._entries.items():
            for j, y in by_row.get(k, ()):
                acc[(i, j)] = acc.get((i, j), ZERO) + x * y
        return SparseMatrix(self.rows, other.cols, acc)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise LinearAlgebraError(f"cannot add {self.shape} and {other.shape}")
        acc = dict(self._entries)
        for key, y in other._entries.items():
            acc[key] = acc.get(key, ZERO) + y
        return SparseMatrix(self.rows, self.cols, acc)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, {k: -x for k, x in self._entries.items()})

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, c) -> "SparseMatrix":
        c = as_fraction(c)
        return SparseMatrix(self.rows, self.cols, {k: c * x for k, x in self._entries.items()})

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(j, i): x for (i, j), x in self._entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._entries.items())))

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}, {self.cols}, nnz={len(self._entries)})"


class _Reducer:
    """Incremental Gauss-Jordan form of a growing list of vectors.

    Every stored row has a 1 at its pivot column and zeros at all other pivot
    columns.  ``combos`` records each row as a combination of the accepted
    input vectors, which gives coordinates for free.
    """

    def __init__(self, pivoting: str = "bitsize"):
        if pivoting not in ("bitsize", "first", "last"):
            raise ValueError(f"unknown pivoting rule {pivoting!r}")
        self.pivoting = pivoting
        self.rows: list[dict[int, Fraction]] = []
        self.combos: list[dict[int, Fraction]] = []
        self.pivot_of: dict[int, int] = {}  # column -> row position
        self.count = 0  # accepted inputs

    def residual(self, v: Mapping[int, Fraction]) -> dict[int, Fraction]:
        w = dict(v)
        for c in [c for c in v if c in self.pivot_of]:
            coef = w.get(c)
            if not coef:
                continue
            row = self.rows[self.pivot_of[c]]
            for j, x in row.items():
                y = w.get(j, ZERO) - coef * x
                if y:
                    w[j] = y
                else:
                    w.pop(j, None)
        return w

    def coords(self, v: Mapping[int, Fraction]) -> dict[int, Fraction] | None:
        """Coordinates of v in the accepted inputs, or None if v is outside the span."""
        if self.residual(v):
            return None
        out: dict[int, Fraction] = {}
        for c, coef in v.items():
            pos = self.pivot_of.get(c)
            if pos is None or not coef:
                continue
            for j, x in self.combos[pos].items():
                out[j] = out.get(j, ZERO) + coef * x
        return {j: x for j, x in out.items() if x}

    def insert(self, v: Mapping[int, Fraction]) -> bool:
        w = self.residual(v)
        if not w:
            return False
        combo = {self.count: ONE}
        for c in [c for c in v if c in self.pivot_of]:
            coef = v[c]
            for j, x in self.combos[self.pivot_of[c]].items():
                combo[j] = combo.get(j, ZERO) - coef * x
        if self.pivoting == "bitsize":
            piv = min(w, key=lambda c: (bitsize(w[c]), c))
        elif self.pivoting == "first":
            piv = min(w)
        else:
            piv = max(w)
        inv = ONE / w[piv]
        w = {j: x * inv for j, x in w.items()}
        combo = {j: x * inv for j, x in combo.items() if x}
        for pos, row in enumerate(self.rows):
            coef = row.get(piv)
            if not coef:
                continue
            for j, x in w.items():
                y = row.get(j, ZERO) - coef * x
                if y:
                    row[j] = y
                else:
                    row.pop(j, None)
            cmb = self.combos[pos]
            for j, x in combo.items():
                y = cmb.get(j, ZERO) - coef * x
                if y:
                    cmb[j] = y
                else:
                    cmb.pop(j, None)
        self.pivot_of[piv] = len(self.rows)
        self.rows.append(w)
        self.combos.append(combo)
        self.count += 1
        return True


class IncrementalSpan:
    """Grow a span one vector at a time; ``add`` reports whether v was new."""

    def __init__(self, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self._red = _Reducer()

    @property
    def dim(self) -> int:
        return len(self._red.rows)

    def add(self, v: Sequence[Fraction]) -> bool:
        return self._red.insert(_sparse(v))

    def contains(self, v: Sequence[Fraction]) -> bool:
        return not self._red.residual(_sparse(v))


class Subspace:
    """A subspace of Q^ambient_dim with an explicit basis of independent vectors."""

    __slots__ = ("ambient_dim", "basis", "_reducer")

    def __init__(self, ambient_dim: int, basis: Sequence[Sequence] = ()):
        self.ambient_dim = ambient_dim
        red = _Reducer()
        vecs = []
        for v in basis:
            v = to_vector(v)
            if len(v) != ambient_dim:
                raise LinearAlgebraError("basis vector has wrong length")
            if not red.insert(_sparse(v)):
                raise LinearAlgebraError("basis vectors are linearly dependent")
            vecs.append(v)
        self.basis: tuple[Vector, ...] = tuple(vecs)
        self._reducer = red

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Sequence], pivoting: str = "bitsize") -> "Subspace":
        """Greedy independent subset of ``vectors``, kept in the given order."""
        red = _Reducer(pivoting)
        keep = []
        for v in vectors:
            v = to_vector(v)
            if len(v) != ambient_dim:
                raise LinearAlgebraError("vector has wrong length")
            if red.insert(_sparse(v)):
                keep.append(v)
        sub = cls.__new__(cls)
        sub.ambient_dim = ambient_dim
        sub.basis = tuple(keep)
        sub._reducer = red
        return sub

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, [unit_vector(ambient_dim, i) for i in range(ambient_dim)])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence[Fraction]) -> bool:
        return not self._reducer.residual(_sparse(v))

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def coordinates(self, v: Sequence[Fraction]) -> Vector:
        c = self._reducer.coords(_sparse(v))
        if c is None:
            raise LinearAlgebraError("vector is not in the subspace")
        return _dense(c, self.dim)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(b) for b in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.ambient_dim, list(self.basis) + list(other.basis))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim and self.dim == other.dim
                and self.is_subspace_of(other))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def rank_kernel_image(m: SparseMatrix, pivoting: str = "bitsize") -> tuple[int, Subspace, Subspace]:
    red = _Reducer(pivoting)
    for row in m.row_dicts():
        red.insert(row)
    rank = len(red.rows)
    pivots = set(red.pivot_of)
    free = [c for c in range(m.cols) if c not in pivots]
    kernel = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for c, pos in red.pivot_of.items():
            x = red.rows[pos].get(f)
            if x:
                v[c] = -x
        kernel.append(tuple(v))
    image = Subspace.span(m.rows, m.columns(), pivoting)
    if image.dim != rank:
        raise LinearAlgebraError("row rank and column rank disagree")  # engine bug
    return rank, Subspace(m.cols, kernel), image


def rank(m: SparseMatrix, pivoting: str = "bitsize") -> int:
    red = _Reducer(pivoting)
    for row in m.row_dicts():
        red.insert(row)
    return len(red.rows)


def kernel(m: SparseMatrix) -> Subspace:
    return rank_kernel_image(m)[1]


def image(m: SparseMatrix) -> Subspace:
    return Subspace.span(m.rows, m.columns())


def solve(m: SparseMatrix, b: Sequence[Fraction]) -> Vector | None:
    """Some x with m x = b, or None if the system is inconsistent."""
    cols = m.columns()
    red = _Reducer()
    accepted = []
    for j, c in enumerate(cols):
        if red.insert(_sparse(c)):
            accepted.append(j)
    coords = red.coords(_sparse(b))
    if coords is None:
        return None
    x = [ZERO] * m.cols
    for k, val in coords.items():
        x[accepted[k]] = val
    return tuple(x)


class Subquotient:
    """Z/B for subspaces B of Z, with chosen coset representatives.

    ``reps`` extend the basis of B greedily through the basis of Z (in order),
    so the choice is reproducible.  ``project`` takes a vector of Z to its
    coordinates on ``reps``.
    """

    __slots__ = ("ambient_dim", "Z", "B", "reps", "_zb")

    def __init__(self, Z: Subspace, B: Subspace):
        if Z.ambient_dim != B.ambient_dim:
            raise LinearAlgebraError("ambient dimensions differ")
        for i, b in enumerate(B.basis):
            if not Z.contains(b):
                raise LinearAlgebraError(f"denominator is not contained in numerator (basis index {i})")
        self.ambient_dim = Z.ambient_dim
        self.Z = Z
        self.B = B
        red = _Reducer()
        for b in B.basis:
            red.insert(_sparse(b))
        reps = []
        for z in Z.basis:
            if red.insert(_sparse(z)):
                reps.append(z)
        self.reps: tuple[Vector, ...] = tuple(reps)
        self._zb = red  # inputs ordered as B.basis + reps

    @property
    def dim(self) -> int:
        return len(self.reps)

    def contains(self, v: Sequence[Fraction]) -> bool:
        return self.Z.contains(v)

    def project(self, v: Sequence[Fraction]) -> Vector:
        c = self._zb.coords(_sparse(v))
        if c is None:
            raise LinearAlgebraError("vector is outside the numerator subspace")
        nb = self.B.dim
        out = [ZERO] * self.dim
        for j, x in c.items():
            if j >= nb:
                out[j - nb] = x
        return tuple(out)

    def lift(self, coords: Sequence[Fraction]) -> Vector:
        return lincomb(coords, self.reps, self.ambient_dim)

    def is_zero_class(self, v: Sequence[Fraction]) -> bool:
        return self.B.contains(v)

    def __repr__(self) -> str:
        return f"Subquotient(dim={self.dim}, Z={self.Z.dim}, B={self.B.dim}, ambient={self.ambient_dim})"


def subquotient(Z: Subspace, B: Subspace) -> Subquotient:
    return Subquotient(Z, B)


def induced_map(f: SparseMatrix, src: Subquotient, dst: Subquotient) -> SparseMatrix:
    """Matrix of the map induced by f from src to dst on representative bases."""
    if f.cols != src.ambient_dim or f.rows != dst.ambient_dim:
        raise LinearAlgebraError(f"map of shape {f.shape} does not fit {src} -> {dst}")
    for i, z in enumerate(src.Z.basis):
        if not dst.Z.contains(f.apply(z)):
            raise InducedMapError("numerator", i, "f(Z_src) is not inside Z_dst")
    for i, b in enumerate(src.B.basis):
        if not dst.B.contains(f.apply(b)):
            raise InducedMapError("denominator", i, "f(B_src) is not inside B_dst")
    cols = [dst.project(f.apply(rep)) for rep in src.reps]
    return SparseMatrix.from_columns(cols, dst.dim) if cols else SparseMatrix(dst.dim, 0)


def inverse(m: SparseMatrix) -> SparseMatrix:
    """Inverse of a square matrix; raises if singular."""
    if m.rows != m.cols:
        raise LinearAlgebraError(f"cannot invert a {m.rows}x{m.cols} matrix")
    cols = []
    for j in range(m.rows):
        x = solve(m, unit_vector(m.rows, j))
        if x is None:
            raise LinearAlgebraError("matrix is singular")
        cols.append(x)
    return SparseMatrix.from_columns(cols, m.rows) if cols else SparseMatrix(0, 0)
