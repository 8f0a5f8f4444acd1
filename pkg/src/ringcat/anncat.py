"""The strict 2-ring carried by an action system, and its axiom checker.

Objects are the elements of the target ring D.  A morphism x -> y is a
base element b with y = d(b) + x, written (b, x).  Vertical composition
adds base parts, morphism addition is componentwise, and the tensor of
(b, x) and (b', x') is (bb' + b.theta(x') + theta(x).b', xx').

The checker re-evaluates every categorical law directly on the tables,
without assuming the action system validates, so it doubles as a detector
for corrupted inputs.  Laws quantified over triples of morphisms are
scanned in chunks over the first object to bound memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crossed import ESystem, ESystemMorphism, validate_esystem, validate_morphism
from .rings import validate_ring


@dataclass
class LawResult:
    law: str
    ok: bool
    witness: tuple | None
    checked: int


@dataclass
class CheckReport:
    name: str
    results: list[LawResult]
    complete: bool

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list[LawResult]:
        return [r for r in self.results if not r.ok]

    def describe(self) -> str:
        lines = [f"2-ring laws for {self.name}:"]
        for r in self.results:
            if r.ok:
                lines.append(f"  {r.law}: ok ({r.checked} instances)")
            else:
                lines.append(f"  {r.law}: FAIL at {r.witness}")
        if not self.complete:
            lines.append("  (stopped at first failure)")
        return "\n".join(lines)


def _wit(ok: np.ndarray):
    return tuple(int(v) for v in np.argwhere(~ok)[0])


class AnnCategory:
    """Computed view of the 2-ring; morphisms are (base, source) pairs."""

    def __init__(self, es: ESystem):
        self.es = es
        self.objects = range(es.d_ring.order)

    def target(self, f):
        b, x = f
        return int(self.es.d_ring.add[self.es.d.map[b], x])

    def identity(self, x):
        return (0, x)

    def hom(self, x, y):
        return [(b, x) for b in range(self.es.b.order) if self.target((b, x)) == y]

    def compose(self, g, f):
        """g after f; sources must match up."""
        if g[1] != self.target(f):
            raise ValueError(f"not composable: {f} then {g}")
        return (int(self.es.b.add[f[0], g[0]]), f[1])

    def add(self, f, g):
        return (
            int(self.es.b.add[f[0], g[0]]),
            int(self.es.d_ring.add[f[1], g[1]]),
        )

    def neg(self, f):
        return (int(self.es.b.neg[f[0]]), int(self.es.d_ring.neg[f[1]]))

    def tensor(self, f, g):
        es = self.es
        b = es.b.add[
            es.b.add[es.b.mul[f[0], g[0]], es.theta_right[g[1], f[0]]],
            es.theta_left[f[1], g[0]],
        ]
        return (int(b), int(es.d_ring.mul[f[1], g[1]]))


def build_anncat(es: ESystem) -> AnnCategory:
    return AnnCategory(es)


def anncat_to_esystem(ac: AnnCategory, name: str | None = None) -> ESystem:
    """Read the action system back off the categorical operations.

    The base is the set of morphisms out of 0, d is the target map, and
    the action tensors with identity morphisms.  Returns an equal-tables
    copy of the underlying system.
    """
    es = ac.es
    nb, nd = es.b.order, es.d_ring.order
    out0 = [(b, 0) for b in range(nb)]
    add = np.zeros((nb, nb), dtype=np.int16)
    mul = np.zeros((nb, nb), dtype=np.int16)
    for b1, x1 in out0:
        for b2, x2 in out0:
            add[b1, b2] = ac.add((b1, x1), (b2, x2))[0]
            mul[b1, b2] = ac.tensor((b1, x1), (b2, x2))[0]
    d_map = np.array([ac.target((b, 0)) for b in range(nb)], dtype=np.int16)
    tl = np.zeros((nd, nb), dtype=np.int16)
    tr = np.zeros((nd, nb), dtype=np.int16)
    for x in ac.objects:
        for b in range(nb):
            tl[x, b] = ac.tensor(ac.identity(x), (b, 0))[0]
            tr[x, b] = ac.tensor((b, 0), ac.identity(x))[0]
    base = validate_ring(add, mul, None if es.b.unit is None else es.b.unit, name=es.b.name)
    return validate_esystem(base, es.d_ring, d_map, tl, tr, name=name or es.name)


# ---------------------------------------------------------------------------
# The axiom checker.


def anncat_axiom_check(es: ESystem, stop_at_first: bool = False) -> CheckReport:
    """Evaluate every strict 2-ring law on the morphism tables.

    Returns a report with one entry per law; each failing law carries the
    first witness in scan order.  With stop_at_first, later laws are
    skipped once one fails.
    """
    b, d = es.b, es.d_ring
    tl, tr = es.theta_left, es.theta_right
    dm = es.d.map.astype(np.int64)
    nb, nd = b.order, d.order
    ab = np.arange(nb)
    ad = np.arange(nd)
    results: list[LawResult] = []
    complete = True

    def run(law, fn):
        nonlocal complete
        if stop_at_first and any(not r.ok for r in results):
            complete = False
            return
        ok, witness, checked = fn()
        results.append(LawResult(law, ok, witness, checked))

    def grid_law(lhs, rhs):
        ok = lhs == rhs
        if ok.all():
            return True, None, int(ok.size)
        return False, _wit(ok), int(ok.size)

    def add_comm():
        ok = (b.add == b.add.T).all() and (d.add == d.add.T).all()
        if ok:
            return True, None, nb * nb + nd * nd
        for t, in_b in ((b.add, True), (d.add, False)):
            bad = t != t.T
            if bad.any():
                i, j = _wit(~bad)
                return False, ("base" if in_b else "object", i, j), nb * nb + nd * nd
        raise AssertionError

    run("add-commutative", add_comm)

    def add_assoc():
        for t, tag in ((b.add, "base"), (d.add, "object")):
            lhs = t[t[:, :, None], np.arange(t.shape[0])[None, None, :]]
            rhs = t[np.arange(t.shape[0])[:, None, None], t[None, :, :]]
            ok = lhs == rhs
            if not ok.all():
                return False, (tag, *_wit(ok)), nb**3 + nd**3
        return True, None, nb**3 + nd**3

    run("add-associative", add_assoc)

    def add_inverse():
        for t, tag in ((b.add, "base"), (d.add, "object")):
            has = (t == 0).any(axis=1)
            if not has.all():
                return False, (tag, int(np.nonzero(~has)[0][0])), nb + nd
        return True, None, nb + nd

    run("add-inverse", add_inverse)

    def compose_identity():
        ok = (b.add[ab, 0] == ab) & (b.add[0, ab] == ab)
        if ok.all():
            return True, None, 2 * nb
        return False, (int(np.nonzero(~ok)[0][0]),), 2 * nb

    run("compose-identity", compose_identity)

    run(
        "compose-associative",
        lambda: grid_law(
            b.add[b.add[:, :, None], ab[None, None, :]],
            b.add[ab[:, None, None], b.add[None, :, :]],
        ),
    )

    def add_interchange():
        # (g o f) + (g' o f') vs (g + g') o (f + f'), base parts
        lhs = b.add[b.add[:, :, None, None], b.add[None, None, :, :]]
        rhs = b.add[b.add[ab[:, None, None, None], ab[None, None, :, None]],
                    b.add[ab[None, :, None, None], ab[None, None, None, :]]]
        return grid_law(lhs, rhs)

    run("add-interchange", add_interchange)

    def tensor_unit():
        one = d.unit
        left = b.add[b.add[b.mul[0, ab], tr[:, 0][:, None]], tl[one][None, :]]
        ok = left == ab[None, :]
        if not ok.all():
            x, c = _wit(ok)
            return False, ("left", x, c), 2 * nb * nd + 2 * nd
        right = b.add[b.add[b.mul[ab, 0], tr[one][None, :]], tl[:, 0][:, None]]
        ok = right == ab[None, :]
        if not ok.all():
            x, c = _wit(ok)
            return False, ("right", x, c), 2 * nb * nd + 2 * nd
        ok = (d.mul[one, ad] == ad) & (d.mul[ad, one] == ad)
        if not ok.all():
            return False, ("object", int(np.nonzero(~ok)[0][0])), 2 * nb * nd + 2 * nd
        return True, None, 2 * nb * nd + 2 * nd

    run("tensor-unit", tensor_unit)

    def tensor_cod():
        # axes (b1, x1, b2, x2)
        tens = b.add[
            b.add[
                b.mul[ab[:, None, None, None], ab[None, None, :, None]],
                tr[ad[None, None, None, :], ab[:, None, None, None]],
            ],
            tl[ad[None, :, None, None], ab[None, None, :, None]],
        ]
        lhs = d.add[dm[tens], d.mul[ad[None, :, None, None], ad[None, None, None, :]]]
        rhs = d.mul[
            d.add[dm[ab][:, None, None, None], ad[None, :, None, None]],
            d.add[dm[ab][None, None, :, None], ad[None, None, None, :]],
        ]
        return grid_law(lhs, rhs)

    run("tensor-cod", tensor_cod)

    def chunked(law_fn):
        # scan over the first object; law_fn(x1) -> ok-grid whose axes are
        # documented per law
        total = 0
        for x1 in range(nd):
            ok = law_fn(x1)
            total += ok.size
            if not ok.all():
                return False, (x1, *_wit(ok)), total
        return True, None, total

    def tensor_interchange(x1):
        # axes (b1, c1, b2, c2, x2)
        b1 = ab[:, None, None, None, None]
        c1 = ab[None, :, None, None, None]
        b2 = ab[None, None, :, None, None]
        c2 = ab[None, None, None, :, None]
        x2 = ad[None, None, None, None, :]
        t12 = b.add[b.add[b.mul[b1, b2], tr[x2, b1]], tl[x1][b2]]
        y1 = d.add[dm[ab], x1]  # (nb,)
        y2 = d.add[dm[b2], x2]
        tg = b.add[b.add[b.mul[c1, c2], tr[y2, c1]], tl[y1[:, None, None, None, None], c2]]
        lhs = b.add[t12, tg]
        s1 = b.add[b1, c1]
        s2 = b.add[b2, c2]
        rhs = b.add[b.add[b.mul[s1, s2], tr[x2, s1]], tl[x1][s2]]
        return lhs == rhs

    run("tensor-interchange", lambda: chunked(tensor_interchange))

    def tensor_assoc(x1):
        # axes (b1, b2, b3, x2, x3)
        b1 = ab[:, None, None, None, None]
        b2 = ab[None, :, None, None, None]
        b3 = ab[None, None, :, None, None]
        x2 = ad[None, None, None, :, None]
        x3 = ad[None, None, None, None, :]
        t12 = b.add[b.add[b.mul[b1, b2], tr[x2, b1]], tl[x1][b2]]
        x12 = d.mul[x1, ad][None, None, None, :, None]
        lhs = b.add[b.add[b.mul[t12, b3], tr[x3, t12]], tl[x12, b3]]
        t23 = b.add[b.add[b.mul[b2, b3], tr[x3, b2]], tl[x2, b3]]
        x23 = d.mul[ad[:, None], ad[None, :]][None, None, None, :, :]
        rhs = b.add[b.add[b.mul[b1, t23], tr[x23, b1]], tl[x1][t23]]
        obj = d.mul[d.mul[x1, ad][:, None], ad[None, :]] == d.mul[x1, d.mul[ad[:, None], ad[None, :]]]
        return (lhs == rhs) & obj[None, None, None, :, :]

    run("tensor-associative", lambda: chunked(tensor_assoc))

    def distrib_left(x1):
        # f (g + h): axes (b1, b2, b3, x2, x3)
        b1 = ab[:, None, None, None, None]
        b2 = ab[None, :, None, None, None]
        b3 = ab[None, None, :, None, None]
        x2 = ad[None, None, None, :, None]
        x3 = ad[None, None, None, None, :]
        s = b.add[b2, b3]
        sx = d.add[x2, x3]
        lhs = b.add[b.add[b.mul[b1, s], tr[sx, b1]], tl[x1][s]]
        t12 = b.add[b.add[b.mul[b1, b2], tr[x2, b1]], tl[x1][b2]]
        t13 = b.add[b.add[b.mul[b1, b3], tr[x3, b1]], tl[x1][b3]]
        rhs = b.add[t12, t13]
        obj = d.mul[x1, d.add[ad[:, None], ad[None, :]]] == d.add[
            d.mul[x1, ad][:, None], d.mul[x1, ad][None, :]
        ]
        return (lhs == rhs) & obj[None, None, None, :, :]

    run("tensor-distributive-left", lambda: chunked(distrib_left))

    def distrib_right(x1):
        # (g + h) f: axes (b1, b2, b3, x2, x3); x1 is the source of f
        b1 = ab[:, None, None, None, None]
        b2 = ab[None, :, None, None, None]
        b3 = ab[None, None, :, None, None]
        x2 = ad[None, None, None, :, None]
        x3 = ad[None, None, None, None, :]
        s = b.add[b2, b3]
        sx = d.add[x2, x3]
        lhs = b.add[b.add[b.mul[s, b1], tr[x1][s]], tl[sx, b1]]
        t21 = b.add[b.add[b.mul[b2, b1], tr[x1][b2]], tl[x2, b1]]
        t31 = b.add[b.add[b.mul[b3, b1], tr[x1][b3]], tl[x3, b1]]
        rhs = b.add[t21, t31]
        obj = d.mul[d.add[ad[:, None], ad[None, :]], x1] == d.add[
            d.mul[ad, x1][:, None], d.mul[ad, x1][None, :]
        ]
        return (lhs == rhs) & obj[None, None, None, :, :]

    run("tensor-distributive-right", lambda: chunked(distrib_right))

    return CheckReport(es.name, results, complete)


# ---------------------------------------------------------------------------
# Functors between the 2-rings, with unit defects.


@dataclass(eq=False)
class AnnFunctor:
    """A morphism of action systems plus two kernel-valued constants: the
    component of the constraint F(x)+F(y) -> F(x+y) and of the constraint
    F(x)F(y) -> F(xy), both independent of x and y.

    Coherence with tensor associativity and the two distributivities pins
    them down hard: acting by anything in the image of f0 kills both
    constants, and the tensor constant is the negative of the additive
    one.  Validation checks the raw coherence equations and asserts the
    consequences."""

    morphism: ESystemMorphism
    add_defect: int
    mul_defect: int

    @property
    def source(self) -> ESystem:
        return self.morphism.source

    @property
    def target(self) -> ESystem:
        return self.morphism.target

    def same_form(self, other: "AnnFunctor") -> bool:
        return (
            (self.morphism.f1.map == other.morphism.f1.map).all()
            and (self.morphism.f0.map == other.morphism.f0.map).all()
        )


def validate_ann_functor(src: ESystem, tgt: ESystem, f1, f0, add_defect=0, mul_defect=0) -> AnnFunctor:
    m = validate_morphism(src, tgt, f1, f0)
    bp = tgt.b
    fp, ft = int(add_defect), int(mul_defect)
    if tgt.d.map[fp] != 0 or tgt.d.map[ft] != 0:
        raise ValueError("constraint constants must lie in the kernel of the structure map")
    img = m.f0.map
    tlp, trp = tgt.theta_left, tgt.theta_right
    # tensor associativity: acting on the tensor constant from either side
    # must give one common value, whatever acts
    vals = {int(v) for v in tlp[img, ft]} | {int(v) for v in trp[img, ft]}
    if len(vals) != 1:
        raise ValueError("tensor constraint breaks associativity coherence")
    # distributivity: acting on the additive constant gives its sum with
    # the tensor constant
    want = int(bp.add[fp, ft])
    if not (tlp[img, fp] == want).all() or not (trp[img, fp] == want).all():
        raise ValueError("constraint constants break distributivity coherence")
    # consequences of the above at x = 0
    assert vals == {0} and ft == int(bp.neg[fp])
    return AnnFunctor(m, fp, ft)


def functor_from_morphism(
    m: ESystemMorphism, add_defect: int = 0, mul_defect: int = 0
) -> AnnFunctor:
    checked = validate_ann_functor(
        m.source, m.target, m.f1.map, m.f0.map, add_defect, mul_defect
    )
    return AnnFunctor(m, checked.add_defect, checked.mul_defect)


def morphism_from_functor(fun: AnnFunctor) -> ESystemMorphism:
    """Strip the constraint constants, keeping the underlying morphism.

    Inverse to functor_from_morphism only up to homotopy: the round trip
    lands on the constant-free functor of the same form."""
    return fun.morphism


def homotopy_between(f: AnnFunctor, g: AnnFunctor):
    """Constant natural transformation from f to g, or None.

    One exists iff the functors share their underlying maps; its component
    is then the difference of additive constants, and compatibility with
    both constraints is automatic (asserted here, not assumed)."""
    if f.source is not g.source or f.target is not g.target:
        return None
    if not f.same_form(g):
        return None
    bp = f.target.b
    alpha = int(bp.sub(f.add_defect, g.add_defect))
    assert f.target.d.map[alpha] == 0
    assert alpha == int(bp.sub(g.mul_defect, f.mul_defect))
    img = f.morphism.f0.map
    tlp, trp = f.target.theta_left, f.target.theta_right
    assert (tlp[img, alpha] == 0).all() and (trp[img, alpha] == 0).all()
    return alpha
