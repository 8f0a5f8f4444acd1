"""Cochains, differentials and second cohomology over small modules."""

from types import SimpleNamespace

import numpy as np
import pytest

from ringcat.ablin import FinAbGroup
from ringcat.cohomology import (
    Cochain1,
    Cochain2,
    Cochain3,
    CohomologyGuardError,
    add2,
    b2,
    classify_functors,
    complex_for,
    d1,
    d2,
    h2,
    h2_unit_normalised,
    is_coboundary3,
    neg3,
    pullback2,
    pullback3,
    pullback_module,
    random_cochain1,
    sub2,
    z2,
    zero_cochain3,
)
from ringcat.crossed import validate_bimodule
from ringcat.rings import RingHom, decompose_abelian, dual_numbers, identity_hom, zmod


def ring_as_module(r):
    """The ring acting on its own additive group by multiplication."""
    factors, _gens, coords = decompose_abelian(r.add)
    coords_arr = np.array([coords[i] for i in range(r.order)], dtype=np.int64)
    return validate_bimodule(
        r, FinAbGroup(tuple(factors)), r.add, r.neg, r.mul, r.mul.T, coords_arr
    )


def eps_module(r4=None):
    """Two-element module over Z/2[eps]/(eps^2): units act as identity,
    everything else as zero."""
    if r4 is None:
        r4 = dual_numbers(2)
    is_unit = [
        any(int(r4.mul[i, j]) == r4.unit for j in range(4)) for i in range(4)
    ]
    act = np.array([[0, 1] if u else [0, 0] for u in is_unit], dtype=np.int16)
    return validate_bimodule(
        r4,
        FinAbGroup((2,)),
        np.array([[0, 1], [1, 0]]),
        np.array([0, 1]),
        act,
        act,
        np.array([[0], [1]]),
    )


def trivial_module(r):
    shape = np.zeros((r.order, 1), dtype=np.int16)
    return validate_bimodule(
        r,
        FinAbGroup(()),
        np.zeros((1, 1), dtype=np.int16),
        np.zeros(1, dtype=np.int16),
        shape,
        shape,
        np.zeros((1, 0), dtype=np.int64),
    )


# Scalar reimplementations of both differentials, used as the independent
# route against the vectorised gathers.


def slow_d1(mod, t):
    r = mod.ring
    n = r.order

    def madd(*xs):
        acc = 0
        for x in xs:
            acc = int(mod.add[acc, int(x)])
        return acc

    f = np.zeros((n, n), dtype=np.int64)
    g = np.zeros((n, n), dtype=np.int64)
    for u in range(n):
        for v in range(n):
            f[u, v] = madd(t[u], t[v], mod.neg[t[r.add[u, v]]])
            g[u, v] = madd(
                mod.left[u, t[v]], mod.right[v, t[u]], mod.neg[t[r.mul[u, v]]]
            )
    return f, g


def slow_d2(mod, f, g):
    r = mod.ring
    n = r.order

    def madd(*xs):
        acc = 0
        for x in xs:
            acc = int(mod.add[acc, int(x)])
        return acc

    def mneg(x):
        return int(mod.neg[int(x)])

    xi = np.zeros((n, n, n), dtype=np.int64)
    eta = np.zeros((n, n), dtype=np.int64)
    ax = np.zeros((n, n, n), dtype=np.int64)
    ll = np.zeros((n, n, n), dtype=np.int64)
    rr = np.zeros((n, n, n), dtype=np.int64)
    for u in range(n):
        for v in range(n):
            eta[u, v] = madd(f[u, v], mneg(f[v, u]))
            for w in range(n):
                xi[u, v, w] = madd(
                    f[u, r.add[v, w]], f[v, w], mneg(f[u, v]), mneg(f[r.add[u, v], w])
                )
                ax[u, v, w] = madd(
                    mod.left[u, g[v, w]],
                    mneg(g[r.mul[u, v], w]),
                    g[u, r.mul[v, w]],
                    mneg(mod.right[w, g[u, v]]),
                )
                ll[u, v, w] = madd(
                    g[u, r.add[v, w]],
                    mneg(g[u, v]),
                    mneg(g[u, w]),
                    mod.left[u, f[v, w]],
                    mneg(f[r.mul[u, v], r.mul[u, w]]),
                )
                rr[u, v, w] = madd(
                    g[r.add[u, v], w],
                    mneg(g[u, w]),
                    mneg(g[v, w]),
                    mod.right[w, f[u, v]],
                    mneg(f[r.mul[u, w], r.mul[v, w]]),
                )
    return xi, eta, ax, ll, rr


def test_d1_on_the_two_element_identity_module():
    mod = ring_as_module(zmod(2))
    c = d1(Cochain1(mod, [0, 1]))
    assert c.f.tolist() == [[0, 0], [0, 0]]
    assert c.g.tolist() == [[0, 0], [0, 1]]


def test_d2_kills_both_generators_over_z2():
    mod = ring_as_module(zmod(2))
    f = np.array([[0, 0], [0, 1]])
    zero = np.zeros((2, 2), dtype=int)
    assert d2(Cochain2(mod, f, zero)).is_zero()
    assert d2(Cochain2(mod, zero, f)).is_zero()


def test_cochain_normalisation_enforced():
    mod = ring_as_module(zmod(2))
    with pytest.raises(ValueError, match="vanish"):
        Cochain1(mod, [1, 0])
    with pytest.raises(ValueError, match="vanish"):
        Cochain2(mod, np.array([[0, 1], [0, 0]]), np.zeros((2, 2), dtype=int))
    with pytest.raises(ValueError, match="shape"):
        Cochain2(mod, np.zeros((3, 3), dtype=int), np.zeros((3, 3), dtype=int))


def test_vectorised_differentials_match_scalar_route():
    mod = eps_module()
    rng = np.random.default_rng(40)
    for _ in range(20):
        t = random_cochain1(mod, rng)
        sf, sg = slow_d1(mod, t.t)
        c = d1(t)
        assert np.array_equal(c.f, sf) and np.array_equal(c.g, sg)
        f = rng.integers(0, 2, size=(4, 4))
        g = rng.integers(0, 2, size=(4, 4))
        f[0] = f[:, 0] = g[0] = g[:, 0] = 0
        c2 = Cochain2(mod, f, g)
        slow = slow_d2(mod, f, g)
        fast = d2(c2)
        for got, want in zip([t_ for t_, _ in fast.tables()], slow, strict=True):
            assert np.array_equal(got, want)


def test_d2_after_d1_vanishes():
    rng = np.random.default_rng(41)
    for mod in (ring_as_module(zmod(2)), eps_module(), ring_as_module(zmod(4))):
        for _ in range(50):
            assert d2(d1(random_cochain1(mod, rng))).is_zero()


def test_counts_over_z2_identity_match_full_enumeration():
    mod = ring_as_module(zmod(2))
    # Only the (1,1) slots are free, so there are four normalised cochains.
    all_cochains = []
    for fv in range(2):
        for gv in range(2):
            f = np.zeros((2, 2), dtype=int)
            g = np.zeros((2, 2), dtype=int)
            f[1, 1], g[1, 1] = fv, gv
            all_cochains.append(Cochain2(mod, f, g))
    cocycles = [c for c in all_cochains if d2(c).is_zero()]
    assert len(cocycles) == 4

    boundary_keys = set()
    for t1 in range(2):
        c = d1(Cochain1(mod, [0, t1]))
        boundary_keys.add((tuple(c.f.ravel()), tuple(c.g.ravel())))
    assert len(boundary_keys) == 2

    assert z2(mod).order == 4
    assert b2(mod).order == 2
    hd = h2(mod)
    assert hd.order == 2 and hd.factors == (2,)
    reps = hd.representatives()
    key = lambda c: (tuple(c.f.ravel()), tuple(c.g.ravel()))
    assert len({key(r) for r in reps}) == 2
    diff = sub2(reps[0], reps[1])
    assert key(diff) not in boundary_keys
    assert hd.class_of(reps[0]) != hd.class_of(reps[1])


def test_boundaries_are_cocycles():
    for mod in (eps_module(), ring_as_module(zmod(4))):
        zg = z2(mod)
        for c in b2(mod).elements():
            assert zg.contains(c)


def test_z2_b2_h2_orders_are_consistent():
    for mod in (ring_as_module(zmod(2)), eps_module(), ring_as_module(zmod(3))):
        assert z2(mod).order == b2(mod).order * h2(mod).order


def test_h2_classes_are_stable_under_boundary_shifts():
    mod = eps_module()
    hd = h2(mod)
    reps = hd.representatives()
    assert len(reps) == hd.order
    labels = {hd.class_of(r) for r in reps}
    assert len(labels) == hd.order
    rng = np.random.default_rng(43)
    for r in reps:
        shifted = add2(r, d1(random_cochain1(mod, rng)))
        assert hd.class_of(shifted) == hd.class_of(r)


def test_trivial_module_has_trivial_h2():
    mod = trivial_module(zmod(2))
    assert h2(mod).order == 1
    assert z2(mod).order == 1


def test_pullback_module_along_unit_embedding():
    r4 = dual_numbers(2)
    mod = eps_module(r4)
    psi = RingHom(zmod(2), r4, [0, r4.unit])
    pulled = pullback_module(psi, mod)
    assert pulled.ring is psi.source
    assert pulled.left.tolist() == [[0, 0], [0, 1]]

    bad = RingHom(zmod(2), r4, [0, 0])
    with pytest.raises(AssertionError):
        pullback_module(bad, mod)


def test_pullback_is_functorial():
    r4 = dual_numbers(2)
    z2r = zmod(2)
    mod = eps_module(r4)
    psi = RingHom(z2r, r4, [0, r4.unit])
    sigma = RingHom(zmod(4), z2r, [0, 1, 0, 1])
    combined = psi.compose(sigma)

    one_step = pullback_module(combined, mod)
    two_step = pullback_module(sigma, pullback_module(psi, mod))
    assert np.array_equal(one_step.left, two_step.left)
    assert np.array_equal(one_step.right, two_step.right)

    rng = np.random.default_rng(44)
    f = rng.integers(0, 2, size=(4, 4))
    g = rng.integers(0, 2, size=(4, 4))
    f[0] = f[:, 0] = g[0] = g[:, 0] = 0
    c2 = Cochain2(mod, f, g)
    a = pullback2(combined, c2, one_step)
    b = pullback2(sigma, pullback2(psi, c2, pullback_module(psi, mod)), two_step)
    assert np.array_equal(a.f, b.f) and np.array_equal(a.g, b.g)

    k = d2(c2)
    ka = pullback3(combined, k, one_step)
    kb = pullback3(sigma, pullback3(psi, k, pullback_module(psi, mod)), two_step)
    for (ta, _), (tb, _) in zip(ka.tables(), kb.tables(), strict=True):
        assert np.array_equal(ta, tb)


def test_is_coboundary3_recovers_an_image():
    mod = eps_module()
    rng = np.random.default_rng(45)
    f = rng.integers(0, 2, size=(4, 4))
    g = rng.integers(0, 2, size=(4, 4))
    f[0] = f[:, 0] = g[0] = g[:, 0] = 0
    k = d2(Cochain2(mod, f, g))
    verdict = is_coboundary3(k)
    assert verdict.is_coboundary
    assert d2(verdict.witness).equals(k)


def test_is_coboundary3_certificate_on_unreachable_target():
    # Over Z/2 with identity action every 2-cochain is a cocycle, so the
    # image of d2 is trivial and any nonzero target must be refused.
    mod = ring_as_module(zmod(2))
    xi = np.zeros((2, 2, 2), dtype=int)
    xi[1, 1, 1] = 1
    k = Cochain3(
        mod, xi, np.zeros((2, 2), int), np.zeros((2, 2, 2), int),
        np.zeros((2, 2, 2), int), np.zeros((2, 2, 2), int),
    )
    verdict = is_coboundary3(k)
    assert not verdict.is_coboundary
    assert verdict.witness is None and verdict.certificate is not None


def test_classify_functors_unobstructed_identity():
    mod = ring_as_module(zmod(2))
    rc = SimpleNamespace(module=mod, k=zero_cochain3(mod))
    out = classify_functors(identity_hom(mod.ring), rc)
    assert out.vanishes and out.count == 2
    hd = h2(out.pulled_module)
    assert len({hd.class_of(c) for c in out.classes}) == 2
    for c in out.classes:
        assert d2(c).equals(neg3(out.obstruction))


def test_classify_functors_reports_obstruction():
    mod = ring_as_module(zmod(2))
    xi = np.zeros((2, 2, 2), dtype=int)
    xi[1, 1, 1] = 1
    k = Cochain3(
        mod, xi, np.zeros((2, 2), int), np.zeros((2, 2, 2), int),
        np.zeros((2, 2, 2), int), np.zeros((2, 2, 2), int),
    )
    rc = SimpleNamespace(module=mod, k=k)
    out = classify_functors(identity_hom(mod.ring), rc)
    assert not out.vanishes and out.count == 0 and out.certificate is not None


def test_unit_normalised_h2_agrees():
    for mod in (ring_as_module(zmod(2)), eps_module(), ring_as_module(zmod(4))):
        order, _factors, reps = h2_unit_normalised(mod)
        assert order == h2(mod).order
        hd = h2(mod)
        assert len({hd.class_of(r) for r in reps}) == order


def test_coordinate_guard_refuses_large_complexes():
    with pytest.raises(CohomologyGuardError):
        complex_for(ring_as_module(zmod(4)), guard=10)


def test_encode_decode_roundtrip():
    mod = eps_module()
    cx = complex_for(mod)
    rng = np.random.default_rng(46)
    f = rng.integers(0, 2, size=(4, 4))
    g = rng.integers(0, 2, size=(4, 4))
    f[0] = f[:, 0] = g[0] = g[:, 0] = 0
    c = Cochain2(mod, f, g)
    back = cx.decode2(cx.encode2(c))
    assert back.equals(c)
