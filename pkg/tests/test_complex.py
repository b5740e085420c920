import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folss.complex import (
    BigradedMap,
    ModelError,
    MultiComplex,
    ProductStructure,
    check_chain_map,
    direct_sum,
    euler_characteristic,
    tensor_product,
    total_cohomology,
    transpose,
    validate,
    validate_restriction,
)
from folss.exactla import SparseMatrix
from folss.fixtures import (
    SimplicialComplex,
    circle,
    point_foliation,
    random_multicomplex,
    simplicial_cochains,
    torus_bundle,
)

import oracles


def point() -> MultiComplex:
    return simplicial_cochains(SimplicialComplex.from_maximal([(0,)]))


def test_zero_differential_trivial_product_is_valid():
    mc = MultiComplex.build(1, 1, {(0, 0): 1, (1, 1): 2}, {},
                            ProductStructure.build({(0, 0, 0, 0): {(0, 0): {0: 1}},
                                                    (0, 0, 1, 1): {(0, 0): {0: 1}, (0, 1): {1: 1}},
                                                    (1, 1, 0, 0): {(0, 0): {0: 1}, (1, 0): {1: 1}}},
                                                   [1]))
    assert validate(mc).ok


def test_hopf_is_valid(hopf):
    assert validate(hopf).ok


def test_uncompensated_d1_square_names_the_block():
    one = SparseMatrix(1, 1, {(0, 0): 1})
    mc = MultiComplex.build(2, 0, {(0, 0): 1, (1, 0): 1, (2, 0): 1},
                            {(1, 0, 0): one, (1, 1, 0): one})
    rep = validate(mc)
    assert not rep.ok
    assert rep.violations[0].kind == "d_squared" and rep.violations[0].bidegree == (0, 0)


def _two_point_model(xy, yx, unit=(1, 0)):
    # (0,0) = span{e, x}, (1,0) = span{y}, d_1 x = y, e the unit
    d1 = SparseMatrix(1, 2, {(0, 1): 1})
    table = {(0, 0, 0, 0): {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}},
             (0, 0, 1, 0): {(0, 0): {0: 1}, (1, 0): {0: xy}},
             (1, 0, 0, 0): {(0, 0): {0: 1}, (0, 1): {0: yx}}}
    return MultiComplex.build(1, 0, {(0, 0): 2, (1, 0): 1}, {(1, 0, 0): d1},
                              ProductStructure.build(table, list(unit)))


def test_leibniz_violation_is_reported():
    # x * x = 0 but d x * x + x * d x = 2y
    assert "leibniz" in validate(_two_point_model(1, 1)).kinds()
    assert validate(_two_point_model(0, 0)).ok


def test_wrong_unit_is_reported():
    kinds = validate(_two_point_model(0, 0, unit=(2, 0))).kinds()
    assert "unit_left" in kinds and "unit_right" in kinds


def test_shape_errors_are_rejected():
    with pytest.raises(ModelError):
        MultiComplex.build(1, 0, {(0, 0): 1, (1, 0): 1}, {(1, 0, 0): SparseMatrix(2, 1)})
    with pytest.raises(ModelError):
        MultiComplex.build(0, 0, {(1, 0): 1})


def test_circle_cohomology(circle3):
    assert total_cohomology(circle3) == {0: 1, 1: 1}
    assert circle3.dims == {(0, 0): 3, (1, 0): 3}


def test_hopf_cohomology(hopf):
    assert total_cohomology(hopf) == {0: 1, 1: 0, 2: 0, 3: 1}


def test_direct_sum_is_additive(hopf, circle3):
    a, b = total_cohomology(hopf), total_cohomology(circle3)
    s = total_cohomology(direct_sum(hopf, circle3))
    for n in set(a) | set(b):
        assert s.get(n, 0) == a.get(n, 0) + b.get(n, 0)
    assert validate(direct_sum(hopf, circle3)).ok


def test_tensor_with_point_is_a_copy(circle3):
    t = tensor_product(circle3, point())
    assert t.dims == circle3.dims
    assert total_cohomology(t) == total_cohomology(circle3)
    assert validate(t).ok


def test_torus_bundle_dims_are_cochain_products(torus):
    assert torus.dims == {(0, 0): 9, (0, 1): 9, (1, 0): 9, (1, 1): 9}
    assert (torus.P, torus.Q) == (1, 1)
    assert validate(torus).ok


@pytest.mark.parametrize("n_base,n_fiber", [(3, 4), (4, 3)])
def test_kunneth_on_bundles(n_base, n_fiber):
    mc = torus_bundle(n_base, n_fiber)
    assert validate(mc).ok
    assert total_cohomology(mc) == {0: 1, 1: 2, 2: 1}


def test_tensor_of_disk_and_circle_satisfies_kunneth(circle3):
    disk = point_foliation([(0, 1, 2)])
    mc = tensor_product(disk, transpose(circle3))
    assert validate(mc).ok
    assert total_cohomology(mc) == {0: 1, 1: 1, 2: 0, 3: 0}


def test_total_cohomology_matches_sympy(hopf, torus, circle3):
    for mc in (hopf, torus, circle3):
        got = total_cohomology(mc)
        assert {n: got.get(n, 0) for n in oracles.cohomology_dims(mc)} == oracles.cohomology_dims(mc)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_euler_characteristic_matches_cohomology(seed):
    rng = random.Random(seed)
    mc = random_multicomplex(rng, rng.randint(0, 3), rng.randint(0, 3))
    assert validate(mc).ok
    H = total_cohomology(mc)
    assert euler_characteristic(mc) == sum((-1) ** n * h for n, h in H.items())


def test_identity_and_composites_are_restrictions(torus):
    ident = BigradedMap.identity(torus)
    assert validate_restriction(ident).ok
    assert validate_restriction(ident @ ident).ok


def test_non_chain_map_is_flagged(circle3):
    swap = BigradedMap.build(circle3, circle3, {(0, 0): SparseMatrix.from_dense([[0, 1, 0], [1, 0, 0], [0, 0, 1]]),
                                                (1, 0): SparseMatrix.identity(3)})
    assert not check_chain_map(swap).ok


def test_restriction_composition_is_restriction(torus_cover):
    composite = torus_cover.rho_UUV @ torus_cover.rho_MU
    assert validate_restriction(composite).ok


def test_transpose_swaps_roles(circle3):
    t = transpose(circle3)
    assert t.dims == {(0, 0): 3, (0, 1): 3} and (t.P, t.Q) == (0, 1)
    assert validate(t).ok
