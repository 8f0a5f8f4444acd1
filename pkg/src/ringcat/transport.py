"""Reduction of an action system to data over the cokernel of its
structure map.

A section lifts each cokernel class back into the target ring, picking a
definite representative with the zero and unit classes pinned.  The lift
fails to be additive or multiplicative by base-valued defect tables, and
those defects in turn fail five coherence comparisons by kernel-valued
tables.  Together the five tables form a degree-three cochain whose class
does not depend on any of the choices; `reduce_esystem` materialises it
and `reduced_axiom_check` verifies the identities it must satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .anncat import AnnFunctor, CheckReport, LawResult
from .cohomology import (
    Cochain2,
    Cochain3,
    CohomologyGuardError,
    d2,
    pullback3,
    pullback_module,
    sub3,
)
from .crossed import Bimodule, ESystem, KernelModule, induced_kernel_module
from .rings import FiniteRing, IdealQuotient, RingHom, ideal_cokernel

# The coherence checker walks grids of quartic size in the quotient order.
CHECK_GUARD = 10**7


@dataclass(eq=False)
class Section:
    """A lift of the cokernel into the target ring plus its two defects.

    `sigma` maps classes to target-ring elements, `fplus` and `ftimes`
    are base-valued and push forward to the additive and multiplicative
    failures of `sigma`.
    """

    es: ESystem
    quotient: IdealQuotient
    sigma: np.ndarray
    fplus: np.ndarray
    ftimes: np.ndarray


def validate_section(es: ESystem, sigma, fplus, ftimes, quo: IdealQuotient | None = None) -> Section:
    if quo is None:
        quo = ideal_cokernel(es.d)
    rq, dd, bb = quo.ring, es.d_ring, es.b
    n = rq.order
    sigma = np.asarray(sigma, dtype=np.int64)
    fplus = np.asarray(fplus, dtype=np.int64)
    ftimes = np.asarray(ftimes, dtype=np.int64)
    if sigma.shape != (n,) or fplus.shape != (n, n) or ftimes.shape != (n, n):
        raise ValueError("section tables have the wrong shape")
    proj = quo.projection.map
    if not (proj[sigma] == np.arange(n)).all():
        raise ValueError("sigma does not pick representatives")
    if sigma[0] != 0:
        raise ValueError("sigma must lift the zero class to zero")
    assert rq.unit is not None and dd.unit is not None
    # In the zero quotient the unit class is the zero class and stays at 0.
    if rq.unit != 0 and sigma[rq.unit] != dd.unit:
        raise ValueError("sigma must lift the unit class to the unit")

    dm = es.d.map.astype(np.int64)
    s2 = sigma[:, None]
    r2 = sigma[None, :]
    want_add = dd.add[dd.add[s2, r2], dd.neg[sigma[rq.add]]]
    if not (dm[fplus] == want_add).all():
        bad = tuple(int(v) for v in np.argwhere(dm[fplus] != want_add)[0])
        raise ValueError(f"additive defect misses its class at {bad}")
    want_mul = dd.add[dd.mul[s2, r2], dd.neg[sigma[rq.mul]]]
    if not (dm[ftimes] == want_mul).all():
        bad = tuple(int(v) for v in np.argwhere(dm[ftimes] != want_mul)[0])
        raise ValueError(f"multiplicative defect misses its class at {bad}")

    if fplus[0].any() or fplus[:, 0].any():
        raise ValueError("additive defect must vanish when an argument is zero")
    u = rq.unit
    if ftimes[0].any() or ftimes[:, 0].any() or ftimes[u].any() or ftimes[:, u].any():
        raise ValueError("multiplicative defect must vanish at zero and unit slots")
    if fplus.min() < 0 or fplus.max() >= bb.order or ftimes.min() < 0 or ftimes.max() >= bb.order:
        raise ValueError("defect entry out of range")
    return Section(es, quo, sigma, fplus, ftimes)


def choose_section(es: ESystem, flavor: str = "least", quo: IdealQuotient | None = None) -> Section:
    """Deterministic section: least (or greatest) class representatives and
    defect preimages, except where normalisation forces the value."""
    assert flavor in ("least", "greatest")
    pick = min if flavor == "least" else max
    if quo is None:
        quo = ideal_cokernel(es.d)
    rq, dd = quo.ring, es.d_ring
    n = rq.order
    proj = quo.projection.map

    members: list[list[int]] = [[] for _ in range(n)]
    for x in range(dd.order):
        members[int(proj[x])].append(x)
    sigma = np.array([pick(m) for m in members], dtype=np.int64)
    sigma[rq.unit] = dd.unit
    sigma[0] = 0

    pre: dict[int, list[int]] = {}
    for b in range(es.b.order):
        pre.setdefault(int(es.d.map[b]), []).append(b)

    s2 = sigma[:, None]
    r2 = sigma[None, :]
    want_add = dd.add[dd.add[s2, r2], dd.neg[sigma[rq.add]]]
    want_mul = dd.add[dd.mul[s2, r2], dd.neg[sigma[rq.mul]]]
    fplus = np.zeros((n, n), dtype=np.int64)
    ftimes = np.zeros((n, n), dtype=np.int64)
    u = rq.unit
    for s in range(n):
        for r in range(n):
            if s and r:
                fplus[s, r] = pick(pre[int(want_add[s, r])])
            if s and r and s != u and r != u:
                ftimes[s, r] = pick(pre[int(want_mul[s, r])])
    return validate_section(es, sigma, fplus, ftimes, quo=quo)


@dataclass(eq=False)
class ReducedAnnCat:
    """Quotient ring, kernel module, and the obstruction cochain of one
    section of an action system."""

    ring: FiniteRing
    module: Bimodule
    k: Cochain3
    es: ESystem
    section: Section
    kernel_module: KernelModule


def reduce_esystem(
    es: ESystem,
    section: Section | None = None,
    flavor: str = "least",
    km: KernelModule | None = None,
    check: bool = True,
) -> ReducedAnnCat:
    if km is None:
        km = induced_kernel_module(es)
    quo = km.quotient
    if section is None:
        section = choose_section(es, flavor, quo=quo)
    else:
        assert np.array_equal(section.quotient.projection.map, quo.projection.map), (
            "section lives over a different quotient presentation"
        )
    rq = quo.ring
    n = rq.order
    bb = es.b
    sig = section.sigma
    fp = section.fplus
    ft = section.ftimes
    tl, tr = es.theta_left, es.theta_right
    bneg = bb.neg

    def bsum(*terms):
        acc = terms[0]
        for t in terms[1:]:
            acc = bb.add[acc, t]
        return acc

    ar = np.arange(n)
    s = ar[:, None, None]
    r = ar[None, :, None]
    t = ar[None, None, :]
    rt_a = rq.add[r, t]
    sr_a = rq.add[s, r]
    sr_m = rq.mul[s, r]
    rt_m = rq.mul[r, t]

    xi_b = bsum(fp[s, rt_a], fp[r, t], bneg[fp[s, r]], bneg[fp[sr_a, t]])
    eta_b = bb.add[fp, bneg[fp.T]]
    ax_b = bsum(
        tl[sig[s], ft[r, t]],
        bneg[ft[sr_m, t]],
        ft[s, rt_m],
        bneg[tr[sig[t], ft[s, r]]],
    )
    ll_b = bsum(
        ft[s, rt_a],
        bneg[ft[s, r]],
        bneg[ft[s, t]],
        tl[sig[s], fp[r, t]],
        bneg[fp[sr_m, rq.mul[s, t]]],
    )
    rr_b = bsum(
        ft[sr_a, t],
        bneg[ft[s, t]],
        bneg[ft[r, t]],
        tr[sig[t], fp[s, r]],
        bneg[fp[rq.mul[s, t], rt_m]],
    )

    b2m = np.full(bb.order, -1, dtype=np.int64)
    for i, bx in enumerate(km.carrier):
        b2m[bx] = i
    tables = []
    for tbl in (xi_b, eta_b, ax_b, ll_b, rr_b):
        mapped = b2m[tbl]
        assert (mapped >= 0).all(), "obstruction value escapes the kernel"
        tables.append(mapped)
    k = Cochain3(km.module, *tables)
    rc = ReducedAnnCat(rq, km.module, k, es, section, km)
    if check:
        report = reduced_axiom_check(rq, km.module, k)
        assert report.ok, f"reduced data breaks {report.failures()[0].law}"
    return rc


def reduced_axiom_check(
    ring: FiniteRing,
    module: Bimodule,
    k: Cochain3,
    guard: int = CHECK_GUARD,
    stop_at_first: bool = False,
) -> CheckReport:
    """All coherence identities a reduced obstruction cochain must satisfy.

    Each law compares two table expressions over full index grids; a
    failing law reports the first witness in scan order.
    """
    n = ring.order
    if n**4 > guard:
        raise CohomologyGuardError(f"{n ** 4} grid entries, over the guard {guard}")
    assert k.module is module and module.ring is ring
    xi, eta, ax, ll, rr = (tbl for tbl, _ in k.tables())
    ma, mn, mlft, mrgt = module.add, module.neg, module.left, module.right
    radd, rmul = ring.add, ring.mul
    ar = np.arange(n)
    x3, y3, z3 = ar[:, None, None], ar[None, :, None], ar[None, None, :]
    x4 = ar[:, None, None, None]
    y4 = ar[None, :, None, None]
    z4 = ar[None, None, :, None]
    t4 = ar[None, None, None, :]

    def msum(*terms):
        acc = terms[0]
        for t in terms[1:]:
            acc = ma[acc, t]
        return acc

    results: list[LawResult] = []
    complete = True

    def run(law, fn):
        nonlocal complete
        if stop_at_first and any(not lr.ok for lr in results):
            complete = False
            return
        lhs, rhs = fn()
        diff = lhs != rhs
        wit = None
        if diff.any():
            wit = tuple(int(v) for v in np.argwhere(diff)[0])
        results.append(LawResult(law, wit is None, wit, int(np.broadcast(lhs, rhs).size)))

    run(
        "pentagon_add",
        lambda: (
            msum(xi[x4, y4, radd[z4, t4]], xi[radd[x4, y4], z4, t4]),
            msum(xi[y4, z4, t4], xi[x4, radd[y4, z4], t4], xi[x4, y4, z4]),
        ),
    )
    run("unit_add", lambda: (xi[:, 0, :], np.zeros((n, n), dtype=np.int64)))
    run("symmetry_inverse", lambda: (ma[eta, eta.T], np.zeros((n, n), dtype=np.int64)))
    run("symmetry_diagonal", lambda: (eta[ar, ar], np.zeros(n, dtype=np.int64)))
    run(
        "hexagon_add",
        lambda: (
            msum(xi[x3, y3, z3], eta[radd[x3, y3], z3], xi[z3, x3, y3]),
            msum(eta[y3, z3], xi[x3, z3, y3], eta[x3, z3]),
        ),
    )
    run(
        "pentagon_mul",
        lambda: (
            msum(ax[x4, y4, rmul[z4, t4]], ax[rmul[x4, y4], z4, t4]),
            msum(mlft[x4, ax[y4, z4, t4]], ax[x4, rmul[y4, z4], t4], mrgt[t4, ax[x4, y4, z4]]),
        ),
    )
    run(
        "left_distrib_add_assoc",
        lambda: (
            msum(
                ll[x4, y4, radd[z4, t4]],
                ll[x4, z4, t4],
                xi[rmul[x4, y4], rmul[x4, z4], rmul[x4, t4]],
            ),
            msum(mlft[x4, xi[y4, z4, t4]], ll[x4, radd[y4, z4], t4], ll[x4, y4, z4]),
        ),
    )
    run(
        "left_distrib_add_comm",
        lambda: (
            msum(ll[x3, y3, z3], eta[rmul[x3, y3], rmul[x3, z3]]),
            msum(mlft[x3, eta[y3, z3]], ll[x3, z3, y3]),
        ),
    )
    run(
        "right_distrib_add_assoc",
        lambda: (
            msum(
                rr[x4, radd[y4, z4], t4],
                rr[y4, z4, t4],
                xi[rmul[x4, t4], rmul[y4, t4], rmul[z4, t4]],
            ),
            msum(mrgt[t4, xi[x4, y4, z4]], rr[radd[x4, y4], z4, t4], rr[x4, y4, t4]),
        ),
    )
    run(
        "right_distrib_add_comm",
        lambda: (
            msum(rr[x3, y3, z3], eta[rmul[x3, z3], rmul[y3, z3]]),
            msum(mrgt[z3, eta[x3, y3]], rr[y3, x3, z3]),
        ),
    )
    run(
        "mul_assoc_left_distrib",
        lambda: (
            msum(ax[x4, y4, radd[z4, t4]], ll[rmul[x4, y4], z4, t4]),
            msum(
                mlft[x4, ll[y4, z4, t4]],
                ll[x4, rmul[y4, z4], rmul[y4, t4]],
                ax[x4, y4, z4],
                ax[x4, y4, t4],
            ),
        ),
    )
    run(
        "mul_assoc_right_distrib",
        lambda: (
            msum(
                ax[radd[x4, y4], z4, t4],
                mrgt[t4, rr[x4, y4, z4]],
                rr[rmul[x4, z4], rmul[y4, z4], t4],
            ),
            msum(rr[x4, y4, rmul[z4, t4]], ax[x4, z4, t4], ax[y4, z4, t4]),
        ),
    )
    run(
        "mul_assoc_mixed_distrib",
        lambda: (
            msum(
                ax[x4, radd[y4, z4], t4],
                mrgt[t4, ll[x4, y4, z4]],
                rr[rmul[x4, y4], rmul[x4, z4], t4],
            ),
            msum(
                mlft[x4, rr[y4, z4, t4]],
                ll[x4, rmul[y4, t4], rmul[z4, t4]],
                ax[x4, y4, t4],
                ax[x4, z4, t4],
            ),
        ),
    )

    def interchange():
        u, w, xx, yy = x4, y4, z4, t4
        p = rmul[u, xx]
        q = rmul[w, xx]
        rp = rmul[u, yy]
        sp = rmul[w, yy]
        mix = msum(
            mn[xi[p, q, radd[rp, sp]]],
            xi[q, rp, sp],
            eta[q, rp],
            mn[xi[rp, q, sp]],
            xi[p, rp, radd[q, sp]],
        )
        lhs = msum(ll[radd[u, w], xx, yy], rr[u, w, xx], rr[u, w, yy], mix)
        rhs = msum(rr[u, w, radd[xx, yy]], ll[u, xx, yy], ll[w, xx, yy])
        return lhs, rhs

    run("distrib_interchange", interchange)
    return CheckReport(f"reduced_{ring.name}", results, complete)


@dataclass(eq=False)
class ReducedFunctor:
    """Image of a functor after reduction on both sides: a quotient-ring
    map, a kernel-module map over it, and the comparison 2-cochain."""

    p: RingHom
    q: np.ndarray
    g: Cochain2
    source: ReducedAnnCat
    target: ReducedAnnCat


def reduce_functor(
    fun: AnnFunctor, rc_src: ReducedAnnCat, rc_tgt: ReducedAnnCat, check: bool = True
) -> ReducedFunctor:
    """Push a functor down to the quotient data on both sides.

    The comparison cochain g measures how far the functor is from
    matching the chosen sections; it ties the two obstruction cochains
    together by q*k - p*k' = d2(g), which is asserted when check is on.
    """
    m = fun.morphism
    assert rc_src.es is m.source and rc_tgt.es is m.target
    f1 = m.f1.map.astype(np.int64)
    f0 = m.f0.map.astype(np.int64)
    es2 = m.target
    b2, d2r = es2.b, es2.d_ring
    rq, rq2 = rc_src.ring, rc_tgt.ring
    proj2 = rc_tgt.kernel_module.quotient.projection.map.astype(np.int64)
    src_proj = rc_src.kernel_module.quotient.projection.map.astype(np.int64)

    # The class map must not depend on the representative.
    comp = proj2[f0]
    for cls in range(rq.order):
        vals = comp[src_proj == cls]
        assert (vals == vals[0]).all(), f"class map splits on class {cls}"
    p = RingHom(rq, rq2, comp[rc_src.section.sigma])
    assert p.unital

    carrier = rc_src.kernel_module.carrier
    b_to_m2 = rc_tgt.kernel_module.b_to_m
    q = np.zeros(len(carrier), dtype=np.int64)
    for i, bx in enumerate(carrier):
        img = int(f1[bx])
        assert img in b_to_m2, "kernel does not map into the kernel"
        q[i] = b_to_m2[img]

    sig, sig2 = rc_src.section.sigma, rc_tgt.section.sigma
    pre2: dict[int, list[int]] = {}
    for b in range(b2.order):
        pre2.setdefault(int(es2.d.map[b]), []).append(b)
    t1 = np.zeros(rq.order, dtype=np.int64)
    for s in range(rq.order):
        target = int(d2r.add[sig2[p.map[s]], d2r.neg[f0[sig[s]]]])
        t1[s] = pre2[target][0]

    def bsum(*terms):
        acc = terms[0]
        for t in terms[1:]:
            acc = b2.add[acc, t]
        return acc

    fp, ft = rc_src.section.fplus, rc_src.section.ftimes
    fp2, ft2 = rc_tgt.section.fplus, rc_tgt.section.ftimes
    pm = p.map.astype(np.int64)
    ix = np.ix_(pm, pm)
    bneg2 = b2.neg
    tau = bsum(
        f1[fp],
        bneg2[fp2[ix]],
        t1[:, None],
        t1[None, :],
        bneg2[t1[rq.add]],
        np.int64(fun.add_defect),
    )
    f0sig = f0[sig]
    nu = bsum(
        f1[ft],
        bneg2[ft2[ix]],
        bneg2[t1[rq.mul]],
        np.int64(fun.mul_defect),
        b2.mul[t1[:, None], t1[None, :]],
        es2.theta_right[f0sig[None, :], t1[:, None]],
        es2.theta_left[f0sig[:, None], t1[None, :]],
    )
    g_f = b2.add[tau, bneg2[np.int64(fun.add_defect)]]
    g_g = b2.add[nu, bneg2[np.int64(fun.mul_defect)]]
    dm2 = es2.d.map.astype(np.int64)
    assert not dm2[g_f].any() and not dm2[g_g].any(), "comparison cochain leaves the kernel"

    b2m2 = np.full(b2.order, -1, dtype=np.int64)
    for i, bx in enumerate(rc_tgt.kernel_module.carrier):
        b2m2[bx] = i
    pulled = pullback_module(p, rc_tgt.module)
    g = Cochain2(pulled, b2m2[g_f], b2m2[g_g])
    out = ReducedFunctor(p, q, g, rc_src, rc_tgt)
    if check:
        ktab = [q[tbl] for tbl, _ in rc_src.k.tables()]
        qk = Cochain3(pulled, *ktab)
        pk = pullback3(p, rc_tgt.k, pulled)
        assert sub3(qk, pk).equals(d2(g)), "reduction does not intertwine the obstructions"
    return out
