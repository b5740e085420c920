from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from folss.exactla import (
    InducedMapError,
    LinearAlgebraError,
    SparseMatrix,
    Subquotient,
    Subspace,
    bitsize,
    induced_map,
    inverse,
    kernel,
    rank,
    rank_kernel_image,
    solve,
    subquotient,
    unit_vector,
)

F = Fraction


def small_matrix(max_dim=5, lo=-3, hi=3):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c),
                               min_size=r, max_size=r)))


def test_zero_matrix_has_full_kernel():
    r, ker, im = rank_kernel_image(SparseMatrix.zero(3, 3))
    assert r == 0 and ker.dim == 3 and im.dim == 0


@pytest.mark.parametrize("n", [1, 2, 5])
def test_identity_is_invertible(n):
    r, ker, im = rank_kernel_image(SparseMatrix.identity(n))
    assert r == n and ker.dim == 0 and im.dim == n


def test_hand_elimination_rank_one():
    m = SparseMatrix.from_dense([[1, 2], [2, 4]])
    r, ker, im = rank_kernel_image(m)
    assert r == 1
    assert ker.contains((F(2), F(-1))) and ker.dim == 1
    assert im.contains((F(1), F(2))) and im.dim == 1


def test_no_stored_zeros_and_reduced_scalars():
    m = SparseMatrix(2, 2, {(0, 0): 0, (1, 1): F(4, 6)})
    assert m.nnz() == 1
    x = m[(1, 1)]
    assert (x.numerator, x.denominator) == (2, 3)
    with pytest.raises(LinearAlgebraError):
        SparseMatrix(2, 2, {(2, 0): 1})


def test_bitsize_prefers_small_entries():
    assert bitsize(F(1)) < bitsize(F(1000, 7))


def test_subquotient_exact_pair_is_zero():
    Z = Subspace.span(3, [(1, 0, 0), (0, 1, 0)])
    assert subquotient(Z, Z).dim == 0


def test_subquotient_with_trivial_denominator_keeps_basis():
    Z = Subspace.span(3, [(1, 0, 0), (0, 1, 0)])
    sq = subquotient(Z, Subspace.zero(3))
    assert sq.dim == 2 and list(sq.reps) == list(Z.basis)


def test_subquotient_of_plane_by_diagonal():
    Z = Subspace.span(3, [(1, 0, 0), (0, 1, 0)])
    B = Subspace.span(3, [(1, 1, 0)])
    sq = subquotient(Z, B)
    assert sq.dim == 1
    e1, e2 = sq.project((1, 0, 0)), sq.project((0, 1, 0))
    assert e1 == tuple(-x for x in e2) and any(e1)


def test_subquotient_rejects_denominator_outside_numerator():
    Z = Subspace.span(3, [(1, 0, 0)])
    B = Subspace.span(3, [(0, 1, 0)])
    with pytest.raises(LinearAlgebraError):
        subquotient(Z, B)


def test_project_rejects_vectors_outside_numerator():
    sq = subquotient(Subspace.span(2, [(1, 0)]), Subspace.zero(2))
    with pytest.raises(LinearAlgebraError):
        sq.project((0, 1))


def test_induced_map_zero_and_identity():
    Z = Subspace.span(3, [(1, 0, 0), (0, 1, 0)])
    sq = subquotient(Z, Subspace.span(3, [(1, 1, 0)]))
    assert induced_map(SparseMatrix.zero(3, 3), sq, sq).is_zero()
    assert induced_map(SparseMatrix.identity(3), sq, sq) == SparseMatrix.identity(1)


def test_induced_map_names_the_failed_inclusion():
    src = subquotient(Subspace.full(2), Subspace.span(2, [(1, 0)]))
    dst = subquotient(Subspace.full(2), Subspace.zero(2))
    with pytest.raises(InducedMapError) as exc:
        induced_map(SparseMatrix.identity(2), src, dst)
    assert exc.value.violation == "denominator"
    narrow = subquotient(Subspace.span(2, [(1, 0)]), Subspace.zero(2))
    with pytest.raises(InducedMapError) as exc:
        induced_map(SparseMatrix.identity(2), subquotient(Subspace.full(2), Subspace.zero(2)), narrow)
    assert exc.value.violation == "numerator"


def test_inverse_and_solve():
    m = SparseMatrix.from_dense([[2, 1], [1, 1]])
    assert m @ inverse(m) == SparseMatrix.identity(2)
    assert solve(m, (F(3), F(2))) == (F(1), F(1))
    assert solve(SparseMatrix.from_dense([[1, 1], [1, 1]]), (F(1), F(0))) is None


@settings(max_examples=60, deadline=None)
@given(small_matrix())
def test_rank_agrees_across_pivot_orders_and_with_sympy(rows):
    m = SparseMatrix.from_dense(rows)
    oracle = sympy.Matrix(rows).rank()
    assert rank(m, "bitsize") == rank(m, "first") == rank(m, "last") == oracle
    r, ker, _ = rank_kernel_image(m)
    assert r + ker.dim == m.cols
    for v in ker.basis:
        assert not any(m.apply(v))


@settings(max_examples=60, deadline=None)
@given(small_matrix(4), small_matrix(4))
def test_projection_round_trip(zrows, brows):
    n = len(zrows[0])
    Z = Subspace.span(n, [tuple(F(x) for x in r) for r in zrows])
    # denominator: combinations of Z's basis, so B is inside Z
    B = Subspace.span(n, [tuple(sum(F(c) * b[i] for c, b in zip(row, Z.basis)) for i in range(n))
                          for row in brows if len(row) >= Z.dim and Z.dim]
                      if Z.dim else [])
    sq = Subquotient(Z, B)
    assert sq.dim == Z.dim - B.dim
    for i, rep in enumerate(sq.reps):
        assert sq.project(rep) == unit_vector(sq.dim, i)
    for z in Z.basis:
        coords = sq.project(z)
        residue = tuple(a - b for a, b in zip(z, sq.lift(coords)))
        assert B.contains(residue)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3), min_size=3, max_size=3))
def test_induced_maps_compose(frows, grows):
    f, g = SparseMatrix.from_dense(frows), SparseMatrix.from_dense(grows)
    # on plain quotients by zero every map is defined
    full = subquotient(Subspace.full(3), Subspace.zero(3))
    assert induced_map(g @ f, full, full) == induced_map(g, full, full) @ induced_map(f, full, full)
    # kernel of f as source, and g-images as target
    ker = kernel(f)
    src = subquotient(ker, Subspace.zero(3))
    assert induced_map(f, src, full).is_zero()
