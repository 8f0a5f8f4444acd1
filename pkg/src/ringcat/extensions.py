"""Ring extensions that realise an action system as a two-sided ideal.

An extension is a unital ring holding the base of an action system
(B, D, d, theta) as an ideal, with a prescribed quotient ring and a
compatible map to the action target.  Choosing a set-lift of the
quotient casts the ring onto the product carrier B x Q, leaving behind a
factor system: one bimultiplication per quotient element plus additive
and multiplicative defect tables.  `crossed_product` rebuilds the ring
from a factor system, `enumerate_extensions` walks the degree-two
cohomology classes instead of raw tables, and
`exhaustive_extension_search` re-derives existence by a staged search
over all ring structures on the carrier, as an independent route for
tiny orders.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .bimult import (
    Bimult,
    BimultError,
    bm_zero,
    enumerate_bimultiplications,
    permutability_witness,
    validate_bimult,
)
from .cohomology import FunctorClassification, classify_functors
from .crossed import ESystem, ESystemError, is_regular, validate_esystem, validate_morphism
from .rings import (
    FiniteRing,
    HomError,
    IdealQuotient,
    RingHom,
    find_unit,
    ideal_cokernel,
    validate_ring,
)
from .transport import ReducedAnnCat, Section, choose_section, reduce_esystem

# Candidate-space cap shared by the equivalence search and the staged
# brute-force search.
SEARCH_GUARD = 10**6


class ExtensionError(ValueError):
    def __init__(self, condition: str, witness):
        self.condition = condition
        self.witness = witness
        super().__init__(f"{condition} fails at {witness}")


class FactorSystemError(ValueError):
    def __init__(self, condition: str, witness, detail: str = ""):
        self.condition = condition
        self.witness = witness
        tail = f": {detail}" if detail else ""
        super().__init__(f"{condition} fails at {witness}{tail}")


class SearchGuardError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Extensions.


@dataclass(eq=False)
class Extension:
    """A unital ring with the base embedded as an ideal.

    `j` embeds the base, `p` projects onto the quotient, `eps` maps into
    the action target; `validate_extension` is the only constructor.
    """

    name: str
    base: ESystem
    ring: FiniteRing
    j: RingHom
    p: RingHom
    eps: RingHom

    @property
    def quotient(self) -> FiniteRing:
        return self.p.target

    def describe(self) -> str:
        return (
            f"extension {self.name}: order {self.ring.order} = "
            f"{self.base.b.order} x {self.quotient.order}"
        )


def validate_extension(base: ESystem, ring: FiniteRing, q: FiniteRing, j, p, eps,
                       name: str = "ext") -> Extension:
    """Check exactness, the ideal property, the induced action system on
    (base, ring) and its compatibility with the given one."""
    try:
        jh = RingHom(base.b, ring, j)
        ph = RingHom(ring, q, p)
        eh = RingHom(ring, base.d_ring, eps)
    except HomError as e:
        raise ExtensionError("structure-hom", str(e)) from e
    if not jh.is_injective():
        raise ExtensionError("embedding-injective", ())
    if not ph.is_surjective():
        raise ExtensionError("projection-surjective", ())
    kernel, image = set(ph.kernel_elements()), set(jh.image_elements())
    if kernel != image:
        raise ExtensionError("exactness", tuple(sorted(kernel ^ image)))
    if ring.unit is None:
        raise ExtensionError("unit", ())
    jinv = np.full(ring.order, -1, dtype=np.int64)
    jinv[jh.map] = np.arange(base.b.order)
    lt = ring.mul[:, jh.map]
    rt = ring.mul[jh.map, :].T
    for tbl, side in ((lt, "left"), (rt, "right")):
        mapped = jinv[tbl]
        if (mapped < 0).any():
            x, bi = (int(v) for v in np.argwhere(mapped < 0)[0])
            raise ExtensionError(f"ideal-{side}", (x, int(jh.map[bi])))
    try:
        inner = validate_esystem(
            base.b, ring, jh.map, jinv[lt], jinv[rt], name=f"{name}_inner"
        )
    except ESystemError as e:
        raise ExtensionError("induced-system", str(e)) from e
    try:
        validate_morphism(inner, base, np.arange(base.b.order), eh.map)
    except ESystemError as e:
        raise ExtensionError("target-compatibility", str(e)) from e
    return Extension(name, base, ring, jh, ph, eh)


def induced_psi(ext: Extension, quo: IdealQuotient | None = None) -> RingHom:
    """The quotient-level map carried by eps, checked over every preimage.

    Well-definedness is automatic (eps sends the ideal into the image of
    the structure map), but the check is kept as part of the contract.
    """
    if quo is None:
        quo = ideal_cokernel(ext.base.d)
    vals = quo.projection.map[ext.eps.map]
    q = ext.quotient
    psi = np.full(q.order, -1, dtype=np.int64)
    for x in range(ext.ring.order):
        u = int(ext.p.map[x])
        if psi[u] < 0:
            psi[u] = vals[x]
        elif psi[u] != vals[x]:
            raise ExtensionError("induced-map", (u, x))
    h = RingHom(q, quo.ring, psi)
    if not h.unital:
        raise ExtensionError("induced-unit", (int(psi[q.unit]),))
    return h


# ---------------------------------------------------------------------------
# Factor systems.


@dataclass(eq=False)
class FactorSystem:
    """Defect tables left on b x q by a set-lift of q into an extension.

    Row u of `act_left`/`act_right` is the bimultiplication through
    which u acts on b; `f` and `g` absorb the additive and
    multiplicative failures of the lift.  `validate_factor_system` is
    the only constructor.
    """

    b: FiniteRing
    q: FiniteRing
    act_left: np.ndarray
    act_right: np.ndarray
    f: np.ndarray
    g: np.ndarray

    def action(self, u: int) -> Bimult:
        return Bimult(
            tuple(int(v) for v in self.act_left[u]),
            tuple(int(v) for v in self.act_right[u]),
        )


def _flat(b_elem: int, u: int, nb: int) -> int:
    # Carrier layout for crossed products: (b, u) sits at u*nb + b.
    return u * nb + b_elem


def validate_factor_system(b: FiniteRing, q: FiniteRing, act_left, act_right, f, g) -> FactorSystem:
    if q.unit is None:
        raise FactorSystemError("quotient-unit", ())
    n, m = q.order, b.order
    al = np.asarray(act_left, dtype=np.int16)
    ar_ = np.asarray(act_right, dtype=np.int16)
    f = np.asarray(f, dtype=np.int16)
    g = np.asarray(g, dtype=np.int16)
    for tbl, shape, nm in (
        (al, (n, m), "act_left"),
        (ar_, (n, m), "act_right"),
        (f, (n, n), "f"),
        (g, (n, n), "g"),
    ):
        if tbl.shape != shape:
            raise FactorSystemError(f"{nm}-shape", tbl.shape)
        if tbl.size and (tbl.min() < 0 or tbl.max() >= m):
            raise FactorSystemError(f"{nm}-range", ())
    for tbl, nm in ((f, "f"), (g, "g")):
        edge = np.zeros((n, n), dtype=bool)
        edge[0, :] |= tbl[0, :] != 0
        edge[:, 0] |= tbl[:, 0] != 0
        if edge.any():
            raise FactorSystemError(
                f"{nm}-normalisation", tuple(int(v) for v in np.argwhere(edge)[0])
            )

    acts = []
    for u in range(n):
        try:
            acts.append(validate_bimult(b, al[u], ar_[u]))
        except BimultError as e:
            raise FactorSystemError(f"action-{e.condition}", (u,) + tuple(
                w for w in (e.witness if isinstance(e.witness, tuple) else (e.witness,))
            )) from e
    arm = np.arange(m)
    if al[0].any() or ar_[0].any():
        raise FactorSystemError("action-zero", (0,))
    if not ((al[q.unit] == arm).all() and (ar_[q.unit] == arm).all()):
        raise FactorSystemError("action-unit", (int(q.unit),))
    for u in range(n):
        for v in range(u, n):
            w = permutability_witness(acts[u], acts[v])
            if w is not None:
                side, a = w
                if side == "first-around-second":
                    triple = (_flat(0, u, m), _flat(a, 0, m), _flat(0, v, m))
                else:
                    triple = (_flat(0, v, m), _flat(a, 0, m), _flat(0, u, m))
                raise FactorSystemError(
                    "permutability",
                    triple,
                    detail="crossed-product triple that fails to associate",
                )

    qa, qm = q.add, q.mul
    badd, bneg, bmul = b.add, b.neg, b.mul

    def bsum(*terms):
        acc = terms[0]
        for t in terms[1:]:
            acc = badd[acc, t]
        return acc

    arq = np.arange(n)
    u3, v3, w3 = arq[:, None, None], arq[None, :, None], arq[None, None, :]
    vw_a, uv_a = qa[v3, w3], qa[u3, v3]
    uv_m, vw_m, uw_m = qm[u3, v3], qm[v3, w3], qm[u3, w3]

    conditions = [
        (
            "additive-cocycle",
            bsum(f[u3, vw_a], f[v3, w3], bneg[f[u3, v3]], bneg[f[uv_a, w3]]),
        ),
        ("additive-symmetry", badd[f, bneg[f.T]]),
        (
            "multiplicative-cocycle",
            bsum(al[u3, g[v3, w3]], bneg[g[uv_m, w3]], g[u3, vw_m], bneg[ar_[w3, g[u3, v3]]]),
        ),
        (
            "left-distributivity",
            bsum(g[u3, vw_a], bneg[g[u3, v3]], bneg[g[u3, w3]], al[u3, f[v3, w3]], bneg[f[uv_m, uw_m]]),
        ),
        (
            "right-distributivity",
            bsum(g[uv_a, w3], bneg[g[u3, w3]], bneg[g[v3, w3]], ar_[w3, f[u3, v3]], bneg[f[uw_m, qm[v3, w3]]]),
        ),
    ]
    # The action must be additive and multiplicative up to the inner
    # bimultiplications of the defect values.
    c3 = arm[None, None, :]
    f3 = f[:, :, None]
    g3 = g[:, :, None]
    conditions += [
        (
            "action-additive-left",
            bsum(al[:, None, :], al[None, :, :], bneg[bmul[f3, c3]], bneg[al[qa]]),
        ),
        (
            "action-additive-right",
            bsum(ar_[:, None, :], ar_[None, :, :], bneg[bmul[c3, f3]], bneg[ar_[qa]]),
        ),
        (
            "action-multiplicative-left",
            bsum(al[arq[:, None, None], al[None, :, :]], bneg[bmul[g3, c3]], bneg[al[qm]]),
        ),
        (
            "action-multiplicative-right",
            bsum(ar_[arq[None, :, None], ar_[arq[:, None, None], c3]], bneg[bmul[c3, g3]], bneg[ar_[qm]]),
        ),
    ]
    for nm, diff in conditions:
        if diff.any():
            raise FactorSystemError(nm, tuple(int(v) for v in np.argwhere(diff != 0)[0]))
    return FactorSystem(b, q, al, ar_, f, g)


def crossed_tables(b: FiniteRing, q: FiniteRing, act_left, act_right, f, g):
    """Addition and multiplication tables on b x q, with no validity checks.

    Feeding tables that break the factor-system conditions is allowed;
    validate_ring on the result then locates the concrete broken triple.
    """
    nb, nq = b.order, q.order
    e = np.arange(nb * nq)
    bp, qp = e % nb, e // nb
    bi, bj = bp[:, None], bp[None, :]
    ui, uj = qp[:, None], qp[None, :]
    f = np.asarray(f)
    g = np.asarray(g)
    al = np.asarray(act_left)
    ar_ = np.asarray(act_right)
    add = q.add[ui, uj] * nb + b.add[b.add[bi, bj], f[ui, uj]]
    prod = b.add[b.add[b.mul[bi, bj], ar_[uj, bi]], b.add[al[ui, bj], g[ui, uj]]]
    mul = q.mul[ui, uj] * nb + prod
    return add.astype(np.int16), mul.astype(np.int16)


def crossed_ring(fs: FactorSystem, name: str | None = None) -> FiniteRing:
    """The validated ring a factor system builds on b x q.

    The unit is (-g(1,1), 1): the multiplicative action condition at
    (1,1) forces g(1,1) to annihilate b on both sides, and the action
    relations make its negative correct the lift of 1.
    """
    add, mul = crossed_tables(fs.b, fs.q, fs.act_left, fs.act_right, fs.f, fs.g)
    e0 = int(fs.b.neg[fs.g[fs.q.unit, fs.q.unit]])
    unit = _flat(e0, int(fs.q.unit), fs.b.order)
    return validate_ring(add, mul, unit, name=name or f"{fs.b.name}_x_{fs.q.name}")


def _tables_equal(r1: FiniteRing, r2: FiniteRing) -> bool:
    return (
        r1.order == r2.order
        and np.array_equal(r1.add, r2.add)
        and np.array_equal(r1.mul, r2.mul)
        and r1.unit == r2.unit
    )


def _align_psi(psi: RingHom, q: FiniteRing, rq: FiniteRing) -> RingHom:
    # Rebuild the map against the context's ring objects; the tables
    # must agree because downstream code indexes with `psi.map` directly.
    for mine, given in ((q, psi.source), (rq, psi.target)):
        if mine is not given and not _tables_equal(mine, given):
            raise ExtensionError("quotient-presentation", (given.name, mine.name))
    if psi.source is q and psi.target is rq:
        return psi
    return RingHom(q, rq, psi.map)


def crossed_product(
    fs: FactorSystem,
    base: ESystem,
    psi: RingHom,
    section: Section | None = None,
    name: str | None = None,
) -> tuple[FiniteRing, Extension]:
    """Ring and extension built from a factor system in a reduction context.

    The context pins the compatible map into the action target as
    eps(b, u) = d(b) + l(u), where l lifts psi through the section except
    that l(1) = 1 is forced.  (The default section already sends the
    quotient's unit class to 1, so the forcing only matters when the
    cokernel is trivial and the unit class is the zero class.)  For eps
    to be a homomorphism the factor system's action must be theta after
    l and its defect tables must push forward, under d, to l's defects.
    """
    assert fs.b is base.b, "factor system must live over the context base"
    if section is None:
        section = choose_section(base)
    rq = section.quotient.ring
    q = fs.q
    psi = _align_psi(psi, q, rq)
    dd = base.d_ring
    lift = section.sigma[psi.map].copy()
    lift[q.unit] = dd.unit
    if not (
        np.array_equal(fs.act_left, base.theta_left[lift])
        and np.array_equal(fs.act_right, base.theta_right[lift])
    ):
        raise ExtensionError("context-action", ())
    dm = base.d.map
    for tbl, op, nm in (
        (fs.f, dd.add, "additive"),
        (fs.g, dd.mul, "multiplicative"),
    ):
        qop = q.add if nm == "additive" else q.mul
        want = dd.add[op[lift[:, None], lift[None, :]], dd.neg[lift[qop]]]
        got = dm[tbl]
        if not np.array_equal(got, want):
            w = np.argwhere(got != want)[0]
            raise ExtensionError(f"context-{nm}-defect", tuple(int(v) for v in w))
    ring = crossed_ring(fs, name=name)
    nb = base.b.order
    e = np.arange(ring.order)
    bp, qp = e % nb, e // nb
    eps = dd.add[dm[bp], lift[qp]]
    ext = validate_extension(base, ring, q, np.arange(nb), qp, eps, name=name or ring.name)
    return ring, ext


def _least_lift(p: RingHom) -> np.ndarray:
    t = np.full(p.target.order, -1, dtype=np.int64)
    for x in range(p.source.order - 1, -1, -1):
        t[p.map[x]] = x
    assert (t >= 0).all(), "projection is not surjective"
    return t


def factor_system_from_extension(ext: Extension, lifts=None) -> FactorSystem:
    """Read the defect tables off a set-lift of the quotient.

    Default lift: least preimage per class, except that 0 lifts to 0
    (automatic for the least lift) and the quotient unit lifts to the
    ring unit.
    """
    e, q, b = ext.ring, ext.quotient, ext.base.b
    if lifts is None:
        lifts = _least_lift(ext.p)
        lifts[q.unit] = e.unit
    else:
        lifts = np.asarray(lifts, dtype=np.int64)
        if lifts.shape != (q.order,) or not (ext.p.map[lifts] == np.arange(q.order)).all():
            raise ExtensionError("lift-section", ())
        if lifts[0] != 0:
            raise ExtensionError("lift-zero", (int(lifts[0]),))
    jinv = np.full(e.order, -1, dtype=np.int64)
    jinv[ext.j.map] = np.arange(b.order)

    def down(tbl, what):
        out = jinv[tbl]
        assert (out >= 0).all(), f"{what} leaves the embedded base"
        return out

    t = lifts
    f = down(e.add[e.add[t[:, None], t[None, :]], e.neg[t[q.add]]], "additive defect")
    g = down(e.add[e.mul[t[:, None], t[None, :]], e.neg[t[q.mul]]], "multiplicative defect")
    al = down(e.mul[t[:, None], ext.j.map[None, :]], "left action")
    ar_ = down(e.mul[ext.j.map[None, :], t[:, None]], "right action")
    return validate_factor_system(b, q, al, ar_, f, g)


def equivalent(e1: Extension, e2: Extension, guard: int = SEARCH_GUARD) -> RingHom | None:
    """Search for an equivalence: a ring isomorphism fixing the embedded
    base pointwise, covering the identity on the quotient and commuting
    with the maps into the action target.

    Any such map sends j1(b) + t1(u) to j2(b + c(u)) + t2(u) for some
    correction c: Q -> B with c(0) = 0, so the space has |B|^(|Q|-1)
    candidates.  Returns the isomorphism, or None once it is exhausted.
    """
    assert e1.base is e2.base, "equivalence needs a common base system"
    b = e1.base.b
    q = e1.quotient
    if q is not e2.quotient and not _tables_equal(q, e2.quotient):
        raise ExtensionError("quotient-presentation", (e2.quotient.name, q.name))
    nb, nq = b.order, q.order
    if nb ** (nq - 1) > guard:
        raise SearchGuardError(
            f"{nb}^{nq - 1} candidate corrections, over the guard {guard}"
        )
    r1, r2 = e1.ring, e2.ring
    if r1.order != r2.order:
        return None
    t1, t2 = _least_lift(e1.p), _least_lift(e2.p)
    jinv1 = np.full(r1.order, -1, dtype=np.int64)
    jinv1[e1.j.map] = np.arange(nb)
    xs = np.arange(r1.order)
    u_of = np.asarray(e1.p.map, dtype=np.int64)
    b_of = jinv1[r1.add[xs, r1.neg[t1[u_of]]]]
    assert (b_of >= 0).all()
    j2m = np.asarray(e2.j.map, dtype=np.int64)
    eps1, eps2 = e1.eps.map, e2.eps.map
    add1, mul1, add2, mul2 = r1.add, r1.mul, r2.add, r2.mul
    for tail in itertools.product(range(nb), repeat=nq - 1):
        c = np.zeros(nq, dtype=np.int64)
        c[1:] = tail
        eta = add2[j2m[b.add[b_of, c[u_of]]], t2[u_of]]
        # j- and p-compatibility hold by construction; check the cheap
        # eps condition first, then the two homomorphism laws.
        if not np.array_equal(eps2[eta], eps1):
            continue
        if not np.array_equal(eta[add1], add2[eta[:, None], eta[None, :]]):
            continue
        if not np.array_equal(eta[mul1], mul2[eta[:, None], eta[None, :]]):
            continue
        return RingHom(r1, r2, eta)
    return None


# ---------------------------------------------------------------------------
# Obstruction and enumeration.


def extension_obstruction(
    base: ESystem, q: FiniteRing, psi: RingHom, rc: ReducedAnnCat | None = None
) -> FunctorClassification:
    """Pull the reduced obstruction back along psi and decide bounding.

    The result carries either an unsolvability certificate or one
    comparison cochain per class; `enumerate_extensions` consumes the
    latter.
    """
    assert is_regular(base), "obstruction theory needs a regular system"
    if rc is None:
        rc = reduce_esystem(base)
    psi = _align_psi(psi, q, rc.ring)
    return classify_functors(psi, rc)


def enumerate_extensions(
    base: ESystem,
    q: FiniteRing,
    psi: RingHom,
    rc: ReducedAnnCat | None = None,
    classification: FunctorClassification | None = None,
    check_inequivalent: bool = True,
    name: str | None = None,
) -> list[Extension]:
    """One extension per cohomology class over psi; empty iff obstructed.

    Each comparison cochain lands in the kernel module; adding it to the
    transported section defects yields a factor system whose crossed
    product represents the class.  The representatives are checked to be
    pairwise inequivalent.
    """
    assert is_regular(base), "enumeration needs a regular system"
    if rc is None:
        rc = reduce_esystem(base)
    psi = _align_psi(psi, q, rc.ring)
    cls = classification if classification is not None else classify_functors(psi, rc)
    if not cls.vanishes:
        return []
    km = rc.kernel_module
    sec = rc.section
    carrier = np.asarray(km.carrier, dtype=np.int64)
    dd = base.d_ring
    dm = base.d.map
    lift = sec.sigma[psi.map].copy()
    lift[q.unit] = dd.unit
    al = base.theta_left[lift]
    ar_ = base.theta_right[lift]
    # Base defect tables for the unit-adjusted lift, as least d-preimages.
    # With a nontrivial cokernel the lift is the transported section and
    # these reproduce the section's own defect tables.
    least_pre = np.full(dd.order, -1, dtype=np.int64)
    for bi in range(base.b.order - 1, -1, -1):
        least_pre[dm[bi]] = bi
    dadd = dd.add[dd.add[lift[:, None], lift[None, :]], dd.neg[lift[q.add]]]
    dmul = dd.add[dd.mul[lift[:, None], lift[None, :]], dd.neg[lift[q.mul]]]
    assert (least_pre[dadd] >= 0).all() and (least_pre[dmul] >= 0).all()
    fp, ft = least_pre[dadd], least_pre[dmul]
    stem = name or f"{base.name}_by_{q.name}"
    out = []
    for i, c in enumerate(cls.classes):
        f = base.b.add[fp, carrier[c.f]]
        g = base.b.add[ft, carrier[c.g]]
        fs = validate_factor_system(base.b, q, al, ar_, f, g)
        _, ext = crossed_product(fs, base, psi, section=sec, name=f"{stem}_{i}")
        out.append(ext)
    if check_inequivalent:
        for i in range(len(out)):
            for k in range(i + 1, len(out)):
                assert equivalent(out[i], out[k]) is None, f"classes {i} and {k} collapse"
    return out


# ---------------------------------------------------------------------------
# Independent existence check by staged table search.


def exhaustive_extension_search(
    base: ESystem,
    q: FiniteRing,
    psi: RingHom,
    quo: IdealQuotient | None = None,
    stop_at_first: bool = True,
    guard: int = SEARCH_GUARD,
) -> list[Extension]:
    """Find extensions by staged search over ring structures on b x q.

    Independent of the cohomology route: every extension admits a
    presentation on the product carrier with block embedding and
    projection, so the stages below cover all ring tables of order
    |b|*|q| extending the data.  Stage order: symmetric associative
    additive defects, then per-class actions drawn from the
    bimultiplication ring, then multiplicative defects pinned slotwise
    by the composite-action rows, then a unit scan and the search for a
    compatible map into the action target.
    """
    b, dd = base.b, base.d_ring
    nb, nq = b.order, q.order
    assert q.unit is not None, "the quotient must be unital"
    if quo is None:
        quo = ideal_cokernel(base.d)
    psi = _align_psi(psi, q, quo.ring)
    assert psi.unital, "the induced quotient map must be unital"
    proj = quo.projection.map
    dm = base.d.map
    arb, arq = np.arange(nb), np.arange(nq)
    u3, v3, w3 = arq[:, None, None], arq[None, :, None], arq[None, None, :]
    qa, qm = q.add, q.mul

    free_f = [(u, v) for u in range(1, nq) for v in range(u, nq)]
    if nb ** len(free_f) > guard:
        raise SearchGuardError(f"{nb}^{len(free_f)} additive defect candidates")
    f_pool = []
    for vals in itertools.product(range(nb), repeat=len(free_f)):
        f = np.zeros((nq, nq), dtype=np.int16)
        for (u, v), val in zip(free_f, vals, strict=True):
            f[u, v] = f[v, u] = val
        lhs = b.add[f[v3, w3], f[u3, qa[v3, w3]]]
        rhs = b.add[f[u3, v3], f[qa[u3, v3], w3]]
        if np.array_equal(lhs, rhs):
            f_pool.append(f)

    pool = enumerate_bimultiplications(b)
    npool = len(pool)
    if npool ** (nq - 1) > guard:
        raise SearchGuardError(f"{npool}^{nq - 1} action candidates")
    pl = np.array([s.left for s in pool], dtype=np.int16)
    pr = np.array([s.right for s in pool], dtype=np.int16)
    zero_idx = pool.index(bm_zero(b))
    around = (pl[:, pr] == pr[:, pl].transpose(1, 0, 2)).all(axis=-1)
    perm_ok = around & around.T

    results: list[Extension] = []
    c3b = arb[None, None, :]
    for f in f_pool:
        dmf = dm[f]
        fl3 = b.mul[f[:, :, None], c3b]
        fr3 = b.mul[c3b, f[:, :, None]]
        for choice in itertools.product(range(npool), repeat=nq - 1):
            acts = np.concatenate(([zero_idx], np.asarray(choice)))
            if not perm_ok[acts[:, None], acts[None, :]].all():
                continue
            left = pl[acts]
            right = pr[acts]
            ok = (
                b.add[left[:, None, :], left[None, :, :]]
                == b.add[fl3, left[qa]]
            ).all() and (
                b.add[right[:, None, :], right[None, :, :]]
                == b.add[fr3, right[qa]]
            ).all()
            if not ok:
                continue
            ext = _search_g_stage(
                base, q, psi, quo, f, left, right, guard, stop_at_first, results
            )
            if ext and stop_at_first:
                return results
    return results


def _search_g_stage(base, q, psi, quo, f, left, right, guard, stop_at_first, results):
    """Inner stages of the exhaustive search: multiplicative defects,
    unit scan, target map.  Appends finds to `results`, returns whether
    anything was appended."""
    b, dd = base.b, base.d_ring
    nb, nq = b.order, q.order
    dm = base.d.map
    proj = quo.projection.map
    arq = np.arange(nq)
    qa, qm = q.add, q.mul

    # The composite-action rows pin each g(u, v) to the elements whose
    # inner bimultiplication matches the defect of the action product.
    cands: list[list[int]] = []
    slots = [(u, v) for u in range(1, nq) for v in range(1, nq)]
    for u, v in slots:
        lrow = b.add[left[u][left[v]], b.neg[left[qm[u, v]]]]
        rrow = b.add[right[v][right[u]], b.neg[right[qm[u, v]]]]
        opts = [
            x
            for x in range(nb)
            if np.array_equal(b.mul[x, :], lrow) and np.array_equal(b.mul[:, x], rrow)
        ]
        if not opts:
            return False
        cands.append(opts)
    total = 1
    for opts in cands:
        total *= len(opts)
        if total > guard:
            raise SearchGuardError(f"{total}+ multiplicative defect candidates")
    gs = np.zeros((total, nq, nq), dtype=np.int16)
    for ci, combo in enumerate(itertools.product(*cands)):
        for (u, v), val in zip(slots, combo, strict=True):
            gs[ci, u, v] = val

    u3, v3, w3 = arq[:, None, None], arq[None, :, None], arq[None, None, :]
    G_uvm_w = gs[:, qm[:, :, None], arq[None, None, :]]
    G_uva_w = gs[:, qa[:, :, None], arq[None, None, :]]
    G_u_vwm = gs[:, arq[:, None, None], qm[None, :, :]]
    G_u_vwa = gs[:, arq[:, None, None], qa[None, :, :]]
    G_vw = gs[:, None, :, :]
    # mixed associativity: r_w(g(u,v)) + g(uv,w) == l_u(g(v,w)) + g(u,vw)
    lhs = b.add[right[arq[None, None, None, :], gs[:, :, :, None]], G_uvm_w]
    rhs = b.add[left[arq[None, :, None, None], G_vw], G_u_vwm]
    ok = (lhs == rhs).all(axis=(1, 2, 3))
    # distributivity across the quotient: both defect kinds interact.
    f_uw_vw = f[qm[u3, w3], qm[v3, w3]]
    lhs = b.add[right[arq[None, None, None, :], f[None, :, :, None]], G_uva_w]
    rhs = b.add[b.add[gs[:, :, None, :], G_vw], f_uw_vw[None]]
    ok &= (lhs == rhs).all(axis=(1, 2, 3))
    f_uv_uw = f[qm[u3, v3], qm[u3, w3]]
    lhs = b.add[left[arq[None, :, None, None], f[None, None, :, :]], G_u_vwa]
    rhs = b.add[b.add[gs[:, :, :, None], gs[:, :, None, :]], f_uv_uw[None]]
    ok &= (lhs == rhs).all(axis=(1, 2, 3))

    found = False
    for ci in np.nonzero(ok)[0]:
        g = gs[ci]
        add, mul = crossed_tables(b, q, left, right, f, g)
        unit = find_unit(add, mul)
        if unit is None:
            continue
        # Lift candidates into the action target, one fibre per class.
        xc = []
        for u in range(nq):
            opts = [
                x
                for x in range(dd.order)
                if proj[x] == psi.map[u]
                and np.array_equal(base.theta_left[x], left[u])
                and np.array_equal(base.theta_right[x], right[u])
            ]
            if not opts:
                break
            xc.append(opts)
        if len(xc) < nq:
            continue
        total_x = 1
        for opts in xc:
            total_x *= len(opts)
        if total_x > guard:
            raise SearchGuardError(f"{total_x} target-lift candidates")
        X = np.array(list(itertools.product(*xc)), dtype=np.int64)
        okx = (X[:, qa] == dd.add[dd.add[X[:, :, None], X[:, None, :]], dm[f][None]]).all(
            axis=(1, 2)
        )
        okx &= (X[:, qm] == dd.add[dd.mul[X[:, :, None], X[:, None, :]], dm[g][None]]).all(
            axis=(1, 2)
        )
        u0, e0 = divmod(int(unit), nb)
        okx &= dd.add[dm[e0], X[:, u0]] == dd.unit
        rows = np.nonzero(okx)[0]
        if rows.size == 0:
            continue
        xrow = X[rows[0]]
        ring = validate_ring(add, mul, unit, name=f"{base.name}_search_{len(results)}")
        e = np.arange(ring.order)
        bp, qp = e % nb, e // nb
        eps = dd.add[dm[bp], xrow[qp]]
        ext = validate_extension(
            base, ring, q, np.arange(nb), qp, eps, name=ring.name
        )
        results.append(ext)
        found = True
        if stop_at_first:
            return True
    return found
