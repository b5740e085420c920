import random
from math import comb
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folss.bounds import (
    BOUND_METADATA,
    AlgebraClass,
    CupLengthCertificate,
    GradedAlgebraSlice,
    bound_basic,
    bound_derham,
    bound_report,
    bound_tangential_e1,
    bound_transverse_e2,
    cup_length,
    derham_slice,
    e2_slice,
    verify_certificate,
)
from folss.complex import ProductStructure, MultiComplex
from folss.fixtures import random_multicomplex, torus_point_foliation

import oracles


def exterior_slice(n: int) -> GradedAlgebraSlice:
    """Positive part of the exterior algebra on n generators of degree 1."""
    import itertools

    monos = {k: list(itertools.combinations(range(n), k)) for k in range(n + 1)}

    def mult(a, b):
        k, l = a.grade, b.grade
        if k + l > n:
            return AlgebraClass(k + l, (), ())
        out = [Fraction(0)] * len(monos[k + l])
        for i, x in enumerate(a.coords):
            for j, y in enumerate(b.coords):
                if not x or not y:
                    continue
                s, t = monos[k][i], monos[l][j]
                if set(s) & set(t):
                    continue
                merged = s + t
                sign = (-1) ** sum(1 for u in range(len(merged)) for v in range(u + 1, len(merged))
                                   if merged[u] > merged[v])
                out[monos[k + l].index(tuple(sorted(merged)))] += sign * x * y
        return AlgebraClass(k + l, tuple(out), ())

    positive = {1: [AlgebraClass(1, tuple(Fraction(int(i == j)) for j in range(n)), ()) for i in range(n)]}
    return GradedAlgebraSlice("exterior", positive, mult)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_exterior_algebra_cup_length(n):
    cert = cup_length(exterior_slice(n))
    assert cert.value == n
    assert verify_certificate(exterior_slice(n), cert)
    if n:
        assert cert.span_dims[:n] == [comb(n, k)
                                      for k in range(1, n + 1)]


def test_cup_length_of_empty_slice_is_zero():
    cert = cup_length(GradedAlgebraSlice("empty", {}, lambda a, b: a))
    assert cert.value == 0 and cert.span_dims == [0] and cert.first_vanishing_length == 1
    assert verify_certificate(GradedAlgebraSlice("empty", {}, lambda a, b: a), cert)


def test_forged_certificate_fails_verification():
    sl = exterior_slice(2)
    cert = cup_length(sl)
    forged = CupLengthCertificate(3, cert.ambient, cert.witness + cert.witness[:1], cert.product, [2, 1, 1, 0])
    assert not verify_certificate(sl, forged)
    short = CupLengthCertificate(2, cert.ambient, cert.witness, cert.product, [2, 0])
    assert not verify_certificate(sl, short)


def test_hopf_bounds(hopf):
    rep = bound_report(hopf)
    values = rep.values()
    assert values["basic"] == 0
    assert values["derham"] == 1
    assert values["e2"] == 1
    assert all(rep.verified().values())


def test_hopf_tangential_class_survives_to_e1(hopf):
    # the fiber generator lives in E_1^{0,1}; it is killed only on E_2 by d_2
    cert = bound_tangential_e1(hopf)
    assert cert.witness[0].grade == (0, 1)
    assert compute_dim(hopf, 1, (0, 1)) == 1


def compute_dim(mc, r, bd):
    from folss.pages import compute_page
    return compute_page(mc, r).dim(*bd)


def test_torus_bundle_bounds(torus):
    rep = bound_report(torus)
    assert rep.values() == {"basic": 1, "derham": 1, "e2": 1, "tangential": 1}
    assert all(rep.verified().values())


def test_point_foliation_bounds(t2_points):
    rep = bound_report(t2_points)
    assert rep.values() == {"basic": 2, "derham": 2, "e2": 2, "tangential": 0}
    assert rep.certificates["tangential"].span_dims == [0]


def test_bounds_agree_with_enumeration(hopf, torus, t2_points):
    for mc in (hopf, torus, t2_points):
        assert bound_report(mc).values() == oracles.bound_table(mc)


def test_basic_bound_never_exceeds_e2(hopf, torus, t2_points, circle3):
    for mc in (hopf, torus, t2_points, circle3):
        assert bound_basic(mc).value <= bound_transverse_e2(mc).value


def test_derham_threshold_parameter(torus):
    assert bound_derham(torus, 0).value == 2
    assert bound_derham(torus, 2).value == 0
    cert = bound_derham(torus, 2)
    assert cert.span_dims == [0] and verify_certificate(derham_slice(torus, 2), cert)


def test_scaling_the_product_table_keeps_the_bounds(t2_points):
    # rescale every basis vector of positive degree by 2: an algebra isomorphism
    mc = t2_points
    base = bound_report(mc).values()
    table = {}
    for (p, q, r, s), pairs in mc.product.table.items():
        kp = 2 if p + q else 1
        kr = 2 if r + s else 1
        kt = 2 if p + q + r + s else 1
        table[(p, q, r, s)] = {ij: {k: c * kp * kr / kt for k, c in vec.items()} for ij, vec in pairs.items()}
    scaled = MultiComplex.build(mc.P, mc.Q, mc.dims, mc.diff, ProductStructure.build(table, mc.product.unit))
    assert bound_report(scaled).values() == base


def test_certificates_serialize(torus):
    d = bound_report(torus).to_dict()
    assert d["values"]["e2"] == 1
    assert d["certificates"]["e2"]["first_vanishing_length"] == 2
    assert "hypothesis" in d["metadata"]["bounds"]["e2"]
    assert BOUND_METADATA["e2"]["hypothesis"].startswith("valid for saturated transverse category")


def test_table_mentions_every_bound(torus):
    text = bound_report(torus).table()
    for k in ("basic", "derham", "e2", "tangential"):
        assert k in text


def test_product_free_model_is_refused():
    mc = MultiComplex.build(0, 0, {(0, 0): 1}, {})
    with pytest.raises(Exception):
        bound_report(mc)


def test_t3_point_foliation_e2_is_three():
    mc = torus_point_foliation(3)
    cert = bound_transverse_e2(mc)
    assert cert.value == 3 and verify_certificate(e2_slice(mc), cert)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_certificates_verify(seed):
    rng = random.Random(seed)
    mc = random_multicomplex(rng, rng.randint(0, 2), rng.randint(0, 2), max_dim=3)
    if mc.product is None:
        return
    rep = bound_report(mc)
    assert all(rep.verified().values())


def test_circle_point_foliation_bounds(circle3):
    assert bound_report(circle3).values() == {"basic": 1, "derham": 1, "e2": 1, "tangential": 0}
