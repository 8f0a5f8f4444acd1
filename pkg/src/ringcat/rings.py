"""Finite rings as explicit addition and multiplication tables.

A ring of order n lives on the index set 0..n-1 with element 0 the
additive identity.  Tables are n x n numpy arrays, row-major in the left
operand.  Rings need not be unital; `unit` is an index or None.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .ablin import FinAbGroup


class RingAxiomError(ValueError):
    """A ring axiom failed; carries the axiom name and a witness tuple."""

    def __init__(self, axiom: str, witness: tuple, detail: str = ""):
        self.axiom = axiom
        self.witness = witness
        msg = f"{axiom} fails at {witness}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


def _table(t, n: int, what: str) -> np.ndarray:
    a = np.asarray(t, dtype=np.int16)
    if a.shape != (n, n):
        raise ValueError(f"{what} table must be {n}x{n}, got {a.shape}")
    if a.size and (a.min() < 0 or a.max() >= n):
        bad = tuple(int(x) for x in np.argwhere((a < 0) | (a >= n))[0])
        raise RingAxiomError("table-range", bad, what)
    return a


def _first_bad(ok: np.ndarray) -> tuple:
    return tuple(int(x) for x in np.argwhere(~ok)[0])


@dataclass(eq=False)
class FiniteRing:
    """Validated ring tables.  Instances compare and hash by identity so
    they can key caches."""

    name: str
    add: np.ndarray
    mul: np.ndarray
    unit: int | None
    neg: np.ndarray = field(repr=False, default=None)

    @property
    def order(self) -> int:
        return self.add.shape[0]

    def sub(self, i, j):
        return int(self.add[i, self.neg[j]])

    def elements(self):
        return range(self.order)

    def additive_order(self, i) -> int:
        k, x = 1, int(i)
        while x != 0:
            x = int(self.add[x, i])
            k += 1
        return k if i != 0 else 1

    def describe(self) -> str:
        u = "none" if self.unit is None else str(self.unit)
        return f"ring {self.name}: order {self.order}, unit {u}"


def validate_ring(add, mul, unit=None, name: str = "ring") -> FiniteRing:
    """Check every ring axiom on the tables; raise RingAxiomError with the
    first witness (lexicographic) on failure."""
    add = np.asarray(add)
    n = add.shape[0] if add.ndim == 2 else 0
    if n == 0:
        raise ValueError("a ring needs at least the zero element")
    add = _table(add, n, "addition")
    mul = _table(mul, n, "multiplication")

    idx = np.arange(n, dtype=np.int16)
    if not np.array_equal(add[0], idx):
        raise RingAxiomError("zero-element", (0, _first_bad(add[0] == idx)[0]))
    if not np.array_equal(add[:, 0], idx):
        raise RingAxiomError("zero-element", (_first_bad(add[:, 0] == idx)[0], 0))

    ok = add == add.T
    if not ok.all():
        raise RingAxiomError("add-commutative", _first_bad(ok))

    # a + (b + c) == (a + b) + c, fully vectorised: [i,j,k] indexing
    ok = add[:, add] == add[add, :]
    if not ok.all():
        raise RingAxiomError("add-associative", _first_bad(ok))

    has_neg = (add == 0).any(axis=1)
    if not has_neg.all():
        raise RingAxiomError("add-inverse", (_first_bad(has_neg),))

    ok = mul[:, mul] == mul[mul, :]
    if not ok.all():
        raise RingAxiomError("mul-associative", _first_bad(ok))

    # a * (b + c) == a*b + a*c
    ok = mul[:, add] == add[mul[:, :, None], mul[:, None, :]]
    if not ok.all():
        raise RingAxiomError("distributive-left", _first_bad(ok))
    # (a + b) * c == a*c + b*c
    ok = mul[add, :] == add[mul[:, None, :], mul[None, :, :]]
    if not ok.all():
        raise RingAxiomError("distributive-right", _first_bad(ok))

    if unit is not None:
        unit = int(unit)
        if not (0 <= unit < n):
            raise ValueError(f"unit index {unit} out of range")
        if not np.array_equal(mul[unit], idx):
            raise RingAxiomError("unit", (unit, _first_bad(mul[unit] == idx)[0]))
        if not np.array_equal(mul[:, unit], idx):
            raise RingAxiomError("unit", (_first_bad(mul[:, unit] == idx)[0], unit))

    neg = np.argmax(add == 0, axis=1).astype(np.int16)
    return FiniteRing(name, add, mul, unit, neg)


def find_unit(add, mul) -> int | None:
    n = np.asarray(add).shape[0]
    idx = np.arange(n)
    for e in range(n):
        if np.array_equal(mul[e], idx) and np.array_equal(mul[:, e], idx):
            return e
    return None


# ---------------------------------------------------------------- presets


def zmod(n: int) -> FiniteRing:
    i = np.arange(n)
    return validate_ring(
        (i[:, None] + i) % n, (i[:, None] * i) % n, 1 % n, name=f"z{n}"
    )


def zero_mult(n: int) -> FiniteRing:
    """Cyclic additive group with every product zero."""
    i = np.arange(n)
    return validate_ring(
        (i[:, None] + i) % n, np.zeros((n, n), int), None, name=f"z{n}_zero"
    )


def zero_mult_klein() -> FiniteRing:
    """Klein four-group additively, every product zero."""
    pairs = [(a, b) for a in range(2) for b in range(2)]
    ix = {p: k for k, p in enumerate(pairs)}
    n = 4
    add = [[ix[((a + c) % 2, (b + d) % 2)] for (c, d) in pairs] for (a, b) in pairs]
    return validate_ring(add, np.zeros((n, n), int), None, name="klein_zero")


def product_ring(r1: FiniteRing, r2: FiniteRing, name: str | None = None) -> FiniteRing:
    n1, n2 = r1.order, r2.order
    i1, j1 = np.divmod(np.arange(n1 * n2), n2)
    add = r1.add[np.ix_(i1, i1)] * n2 + r2.add[np.ix_(j1, j1)]
    mul = r1.mul[np.ix_(i1, i1)] * n2 + r2.mul[np.ix_(j1, j1)]
    unit = None
    if r1.unit is not None and r2.unit is not None:
        unit = r1.unit * n2 + r2.unit
    return validate_ring(add, mul, unit, name=name or f"{r1.name}x{r2.name}")


def dual_numbers(n: int) -> FiniteRing:
    """Z/n with a square-zero generator adjoined: elements a + b*eps."""
    a, b = np.divmod(np.arange(n * n), n)
    add = ((a[:, None] + a) % n) * n + (b[:, None] + b) % n
    mul = ((a[:, None] * a) % n) * n + (a[:, None] * b + b[:, None] * a) % n
    return validate_ring(add, mul, 1 * n if n > 1 else 0, name=f"z{n}_dual")


def subring(r: FiniteRing, subset, name: str | None = None):
    """Reindex a subset closed under both operations as its own ring.

    Returns (ring, embedding map as an index array into r)."""
    subset = sorted(int(x) for x in subset)
    assert subset and subset[0] == 0, "a subring contains 0 first"
    back = {x: k for k, x in enumerate(subset)}
    m = len(subset)
    add = np.zeros((m, m), int)
    mul = np.zeros((m, m), int)
    for i, x in enumerate(subset):
        for j, y in enumerate(subset):
            sx, px = int(r.add[x, y]), int(r.mul[x, y])
            assert sx in back and px in back, f"subset not closed at ({x}, {y})"
            add[i, j], mul[i, j] = back[sx], back[px]
    emb = np.array(subset, dtype=np.int16)
    u = find_unit(add, mul)
    ring = validate_ring(add, mul, u, name=name or f"{r.name}_sub{m}")
    return ring, emb


# ------------------------------------------------------------ homomorphisms


class HomError(ValueError):
    pass


@dataclass(eq=False)
class RingHom:
    """Map between rings given elementwise; validated on construction."""

    source: FiniteRing
    target: FiniteRing
    map: np.ndarray

    def __post_init__(self):
        self.map = np.asarray(self.map, dtype=np.int16)
        if self.map.shape != (self.source.order,):
            raise HomError(
                f"map must list {self.source.order} images, got {self.map.shape}"
            )
        if self.map.size and (self.map.min() < 0 or self.map.max() >= self.target.order):
            raise HomError("image index out of range")
        f, s, t = self.map, self.source, self.target
        ok = f[s.add] == t.add[f[:, None], f[None, :]]
        if not ok.all():
            raise HomError(f"not additive at {_first_bad(ok)}")
        ok = f[s.mul] == t.mul[f[:, None], f[None, :]]
        if not ok.all():
            raise HomError(f"not multiplicative at {_first_bad(ok)}")

    @property
    def unital(self) -> bool:
        return (
            self.source.unit is not None
            and self.target.unit is not None
            and int(self.map[self.source.unit]) == self.target.unit
        )

    def apply(self, i: int) -> int:
        return int(self.map[i])

    def compose(self, other: "RingHom") -> "RingHom":
        # self after other
        assert other.target is self.source
        return RingHom(other.source, self.target, self.map[other.map])

    def kernel_elements(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.map == 0)[0]]

    def image_elements(self) -> list[int]:
        return sorted(int(x) for x in set(self.map.tolist()))

    def is_injective(self) -> bool:
        return len(set(self.map.tolist())) == self.source.order

    def is_surjective(self) -> bool:
        return len(set(self.map.tolist())) == self.target.order


def identity_hom(r: FiniteRing) -> RingHom:
    return RingHom(r, r, np.arange(r.order, dtype=np.int16))


@dataclass
class IdealQuotient:
    ring: FiniteRing
    projection: RingHom
    reps: list[int]


def ideal_cokernel(h: RingHom, name: str | None = None) -> IdealQuotient:
    """Quotient of h.target by the image of h.

    The image must be a two-sided ideal; otherwise raises with a witness
    pair (ring element, image element).
    """
    t = h.target
    image = h.image_elements()
    iset = set(image)
    for r in t.elements():
        for b in image:
            if int(t.mul[r, b]) not in iset:
                raise HomError(f"image not an ideal: witness ({r}, {b})")
            if int(t.mul[b, r]) not in iset:
                raise HomError(f"image not an ideal: witness ({b}, {r})")
    # Additive cosets x + image; each class is represented by its least member.
    class_of = np.full(t.order, -1, dtype=np.int64)
    reps = []
    for x in t.elements():
        if class_of[x] >= 0:
            continue
        coset = sorted(int(t.add[x, b]) for b in image)
        k = len(reps)
        reps.append(coset[0])
        for y in coset:
            class_of[y] = k
    order = np.argsort(np.array(reps))
    relabel = np.empty(len(reps), dtype=np.int64)
    relabel[order] = np.arange(len(reps))
    class_of = relabel[class_of]
    reps = [reps[i] for i in order]
    assert reps[0] == 0
    ridx = np.array(reps)
    qadd = class_of[t.add[np.ix_(ridx, ridx)]]
    qmul = class_of[t.mul[np.ix_(ridx, ridx)]]
    # Well-definedness across every representative choice, not just the least.
    assert np.array_equal(class_of[t.add], qadd[class_of[:, None], class_of[None, :]])
    assert np.array_equal(class_of[t.mul], qmul[class_of[:, None], class_of[None, :]])
    unit = int(class_of[t.unit]) if t.unit is not None else find_unit(qadd, qmul)
    q = validate_ring(qadd, qmul, unit, name=name or f"{t.name}_mod_{h.source.name}")
    return IdealQuotient(q, RingHom(t, q, class_of), reps)


# ------------------------------------------------- additive decomposition


def _additive_order(add: np.ndarray, x: int) -> int:
    k, y = 1, int(x)
    while y != 0:
        y = int(add[y, x])
        k += 1
    return k if x != 0 else 1


def _cyclic(add: np.ndarray, g: int) -> list[int]:
    out, y = [0], int(g)
    while y != 0:
        out.append(y)
        y = int(add[y, g])
    return out


def decompose_abelian(add: np.ndarray, elements=None):
    """Invariant-factor decomposition of an additive table (or a subset
    closed under addition).

    Returns (factors, gens, coords) with factors in ascending divisibility
    order, gens a list of elements, and coords mapping each element to its
    tuple of coordinates.
    """
    add = np.asarray(add)
    elems = sorted(int(x) for x in (elements if elements is not None else range(add.shape[0])))
    assert elems[0] == 0

    def neg(x):
        return int(np.nonzero(add[x] == 0)[0][0])

    # Peel off a maximal-order cyclic summand, then recurse on the quotient.
    gens_desc: list[int] = []
    factors_desc: list[int] = []
    # Work with explicit coset structures: current congruence is "differ by
    # an element of span", starting from the trivial subgroup.
    span = {0}

    def coset_rep(x):
        return min(int(add[x, s]) for s in span)

    while True:
        reps = sorted({coset_rep(x) for x in elems})
        if reps == [0]:
            break
        # order of x in the quotient = least k with k*x in span
        def qorder(x):
            k, y = 1, x
            while coset_rep(y) != 0:
                y = int(add[y, x])
                k += 1
            return k

        best = max(reps, key=qorder)
        e = qorder(best)
        # e * best lies in span; divide it by e there (span is pure, being a
        # sum of earlier maximal-order summands) and correct the lift so its
        # order drops to e.
        target = _order_multiple(add, best, e)
        corr = None
        for s in span:
            if _order_multiple(add, s, e) == target:
                corr = s
                break
        assert corr is not None, "purity correction must exist"
        best = int(add[best, neg(corr)])
        assert _additive_order(add, best) == e
        gens_desc.append(best)
        factors_desc.append(e)
        span = {int(add[s, c]) for s in span for c in _cyclic(add, best)}

    factors = list(reversed(factors_desc))
    gens = list(reversed(gens_desc))
    eset = set(elems)
    coords: dict[int, tuple[int, ...]] = {}
    for combo in itertools.product(*[range(m) for m in factors]):
        x = 0
        for c, g in zip(combo, gens, strict=True):
            x = int(add[x, _order_multiple(add, g, c)])
        assert x in eset and x not in coords, "decomposition must be a bijection"
        coords[x] = combo
    assert len(coords) == len(elems)
    return tuple(factors), gens, coords


def _order_multiple(add: np.ndarray, x: int, k: int) -> int:
    y = 0
    for _ in range(k):
        y = int(add[y, x])
    return y


def additive_group(r: FiniteRing):
    """(FinAbGroup, coords dict, elements-by-coords dict) for (r, +)."""
    factors, _, coords = decompose_abelian(r.add)
    group = FinAbGroup(factors)
    back = {v: k for k, v in coords.items()}
    return group, coords, back


# ------------------------------------------------------------- isomorphism

ISO_GUARD = 16


def find_ring_isomorphism(r1: FiniteRing, r2: FiniteRing):
    """Brute-force an isomorphism between small rings; None if there is none.

    Guarded to order <= 16; searches images of additive generators only.
    """
    n = r1.order
    if n != r2.order:
        return None
    assert n <= ISO_GUARD, f"isomorphism search is guarded to order {ISO_GUARD}"
    if (r1.unit is None) != (r2.unit is None):
        return None
    orders1 = sorted(_additive_order(r1.add, x) for x in r1.elements())
    orders2 = sorted(_additive_order(r2.add, x) for x in r2.elements())
    if orders1 != orders2:
        return None
    factors, gens, coords = decompose_abelian(r1.add)
    pools = [
        [y for y in r2.elements() if _additive_order(r2.add, y) == m] for m in factors
    ]
    for images in itertools.product(*pools):
        f = np.zeros(n, dtype=np.int16)
        for x, cs in coords.items():
            y = 0
            for c, g in zip(cs, images, strict=True):
                y = int(r2.add[y, _order_multiple(r2.add, g, c)])
            f[x] = y
        if len(set(f.tolist())) != n:
            continue
        if not np.array_equal(f[r1.mul], r2.mul[f[:, None], f[None, :]]):
            continue
        if r1.unit is not None and int(f[r1.unit]) != r2.unit:
            continue
        return RingHom(r1, r2, f)
    return None
