"""Action systems, crossed bimodules, and the kernel-as-bimodule reduction."""

import numpy as np
import pytest

from ringcat.crossed import (
    ESystemError,
    bimodule_esystem,
    coker_action_well_defined,
    compose_morphisms,
    compose_xb_morphisms,
    es_to_xb,
    es_to_xb_morphism,
    ideal_esystem,
    identity_esystem,
    identity_morphism,
    induced_kernel_module,
    is_regular,
    multiplier_esystem,
    regularity_witness,
    validate_crossed_bimodule,
    validate_esystem,
    validate_morphism,
    xb_to_es,
    xb_to_es_morphism,
)
from ringcat.rings import dual_numbers, validate_ring, zero_mult, zero_mult_klein, zmod


def doubled_into_z4():
    """Base: additive zmod(4) with product i*j = 2ij; structure map b -> 2b
    into zmod(4) with the scalar action."""
    i = np.arange(4)
    b = validate_ring((i[:, None] + i[None, :]) % 4, (2 * i[:, None] * i[None, :]) % 4, name="2z8")
    scal = (i[:, None] * i[None, :]) % 4
    return validate_esystem(b, zmod(4), (2 * i) % 4, scal, scal, name="d2b")


def scalar_action_d0(n_b, d_ring, reduce_mod):
    b = zero_mult(n_b)
    tl = np.array([[(x % reduce_mod) * c % n_b for c in range(n_b)] for x in range(d_ring.order)])
    return validate_esystem(b, d_ring, np.zeros(n_b, dtype=np.int16), tl, tl)


def test_ideal_esystem_two_in_z4():
    es = ideal_esystem(zmod(4), [0, 2])
    assert es.b.order == 2 and es.b.unit is None
    assert list(es.d.map) == [0, 2]
    assert is_regular(es)
    km = induced_kernel_module(es)
    assert km.module.order == 1
    assert km.quotient.ring.order == 2


def test_ideal_esystem_rejects_non_ideal():
    with pytest.raises(Exception, match="closed|ideal"):
        ideal_esystem(zmod(4), [0, 1])


def test_identity_esystem_regular_and_trivial_reduction():
    es = identity_esystem(zmod(2))
    assert is_regular(es)
    km = induced_kernel_module(es)
    assert km.module.order == 1 and km.quotient.ring.order == 1


def test_multiplier_esystem_of_z2_zero_mult():
    es = multiplier_esystem(zero_mult(2))
    assert es.d_ring.order == 4
    assert (es.d.map == 0).all()
    assert is_regular(es)
    km = induced_kernel_module(es)
    assert km.module.order == 2
    assert km.quotient.ring.order == 4
    assert tuple(km.module.group.factors) == (2,)


def test_multiplier_esystem_of_klein_is_not_regular():
    es = multiplier_esystem(zero_mult_klein())
    assert es.d_ring.order == 256
    w = regularity_witness(es)
    assert w is not None and w[0] == "permutability"
    x, y, a = w[1]
    # replay the witness against the raw tables
    lhs = es.theta_left[x, es.theta_right[y, a]]
    rhs = es.theta_right[y, es.theta_left[x, a]]
    assert lhs != rhs
    with pytest.raises(ESystemError, match="not-regular"):
        es_to_xb(es)


def test_doubled_into_z4_reduction_frozen():
    es = doubled_into_z4()
    assert is_regular(es)
    km = induced_kernel_module(es)
    assert km.carrier == [0, 2]
    assert km.quotient.reps == [0, 1]
    assert km.module.order == 2
    # the nonzero class acts as the identity on the kernel
    assert list(km.module.left[1]) == [0, 1]
    assert list(km.module.right[1]) == [0, 1]


def test_zero_action_is_valid_but_not_regular():
    b = zero_mult(2)
    tl = np.zeros((2, 2), dtype=np.int16)
    es = validate_esystem(b, zmod(2), [0, 0], tl, tl)
    assert regularity_witness(es) == ("unit-action-left", 1)
    with pytest.raises(ESystemError, match="kernel-action-unital"):
        induced_kernel_module(es)


def test_validation_witnesses():
    b2 = zero_mult(2)
    with pytest.raises(ESystemError, match="target-unital"):
        validate_esystem(b2, zero_mult(2), [0, 0], np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(ESystemError, match="structure-map"):
        validate_esystem(b2, zmod(4), [0, 1], np.zeros((4, 2)), np.zeros((4, 2)))
    # theta(0) = identity is a bimultiplication but not additive in x
    tl = np.array([[0, 1], [0, 1]])
    with pytest.raises(ESystemError, match="action-left-additive-in-source"):
        validate_esystem(b2, zmod(2), [0, 0], tl, tl)
    # honest multiplication, trivial action: acting through d is not inner
    z2 = zmod(2)
    with pytest.raises(ESystemError, match="inner-action-left"):
        validate_esystem(z2, z2, [0, 1], np.zeros((2, 2)), np.zeros((2, 2)))
    # zero action with a nonzero square-zero structure map: d fails to
    # intertwine at (unit, generator)
    dn = dual_numbers(2)
    with pytest.raises(ESystemError, match="equivariance-left") as ei:
        validate_esystem(b2, dn, [0, 1], np.zeros((4, 2)), np.zeros((4, 2)))
    assert ei.value.witness == (2, 1)


def test_crossed_bimodule_round_trip():
    for es in (doubled_into_z4(), multiplier_esystem(zero_mult(2)), identity_esystem(zmod(4))):
        xb = es_to_xb(es)
        back = xb_to_es(xb)
        assert (back.theta_left == es.theta_left).all()
        assert (back.theta_right == es.theta_right).all()
        assert (back.d.map == es.d.map).all()


def test_crossed_bimodule_witnesses():
    z2 = zmod(2)
    with pytest.raises(ESystemError, match="bimodule-left-unital"):
        validate_crossed_bimodule(zero_mult(2), z2, [0, 0], np.zeros((2, 2)), np.zeros((2, 2)))
    ident = np.array([[0, 0], [0, 1]])
    with pytest.raises(ESystemError, match="peiffer-left") as ei:
        validate_crossed_bimodule(z2, z2, [0, 0], ident, ident)
    assert ei.value.witness == (1, 1)


def test_morphism_embedding_of_ideal():
    src = ideal_esystem(zmod(4), [0, 2])
    tgt = identity_esystem(zmod(4))
    m = validate_morphism(src, tgt, [0, 2], np.arange(4))
    i = identity_morphism(tgt)
    c = compose_morphisms(i, m)
    assert (c.f1.map == m.f1.map).all() and (c.f0.map == m.f0.map).all()


def test_morphism_mod_two_between_identity_systems():
    src = identity_esystem(zmod(4))
    tgt = identity_esystem(zmod(2))
    m = validate_morphism(src, tgt, np.arange(4) % 2, np.arange(4) % 2)
    assert m.f0.unital
    with pytest.raises(ESystemError, match="morphism-target-unit"):
        validate_morphism(tgt, tgt, [0, 0], [0, 0])
    with pytest.raises(ESystemError, match="morphism-square"):
        validate_morphism(ideal_esystem(zmod(4), [0, 2]), src, [0, 0], np.arange(4))


def test_morphism_composition_preserved_under_conversion():
    a = ideal_esystem(zmod(4), [0, 2])
    b = identity_esystem(zmod(4))
    c = identity_esystem(zmod(2))
    m = validate_morphism(a, b, [0, 2], np.arange(4))
    g = validate_morphism(b, c, np.arange(4) % 2, np.arange(4) % 2)
    xa, xb_, xc = es_to_xb(a), es_to_xb(b), es_to_xb(c)
    mx = es_to_xb_morphism(m, xa, xb_)
    gx = es_to_xb_morphism(g, xb_, xc)
    one_way = compose_xb_morphisms(gx, mx)
    other = es_to_xb_morphism(compose_morphisms(g, m), xa, xc)
    assert (one_way.f1.map == other.f1.map).all()
    assert (one_way.f0.map == other.f0.map).all()
    back = xb_to_es_morphism(mx, a, b)
    assert (back.f1.map == m.f1.map).all() and (back.f0.map == m.f0.map).all()


def test_bimodule_esystem_roundtrips_module_action():
    km = induced_kernel_module(doubled_into_z4())
    es = bimodule_esystem(km.module)
    assert es.b.order == 2 and (es.d.map == 0).all()
    assert is_regular(es)
    assert (es.theta_left == km.module.left).all()
    km2 = induced_kernel_module(es)
    assert (km2.module.left == km.module.left).all()


def test_coker_action_well_defined_even_when_not_regular():
    assert coker_action_well_defined(doubled_into_z4())
    assert coker_action_well_defined(multiplier_esystem(zero_mult_klein()))


def test_scalar_action_with_zero_structure_map():
    es = scalar_action_d0(2, zmod(4), 2)
    assert is_regular(es)
    km = induced_kernel_module(es)
    assert km.module.order == 2 and km.quotient.ring.order == 4
