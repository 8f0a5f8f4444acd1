"""Low-degree cohomology of a finite ring acting on a finite bimodule.

Cochains are dense tables of module elements indexed by ring elements and
normalised to vanish whenever an argument is zero.  Degree one measures
corrections to a section, degree two the additive/multiplicative defect
pair (f, g) of a factor system, degree three the five obstruction tables
that the reduced structure checker evaluates.

The two differentials exist twice over: once as table evaluations (cheap,
used by property checks) and once as integer matrices over the invariant
factor coordinates of the module (used for kernels, images, quotients and
certificates).  The matrices are assembled once per module and cached.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ablin import (
    FinAbGroup,
    HomologyData,
    LinearMap,
    Subgroup,
    UnsolvableWitness,
    homology,
    kernel,
    solve_with_certificate,
    span_subgroup,
)
from .crossed import Bimodule, validate_bimodule
from .rings import FiniteRing, RingHom

# Refuse to materialise linear systems beyond this many coordinates.
COORD_GUARD = 10**4


class CohomologyGuardError(ValueError):
    pass


def _as_table(module: Bimodule, a, shape, name: str) -> np.ndarray:
    t = np.asarray(a, dtype=np.int64)
    if t.shape != shape:
        raise ValueError(f"{name} has shape {t.shape}, expected {shape}")
    if t.size and (t.min() < 0 or t.max() >= module.order):
        raise ValueError(f"{name} holds an out-of-range module element")
    return t


def _check_normalised(t: np.ndarray, name: str) -> None:
    for axis in range(t.ndim):
        sl = tuple(0 if i == axis else slice(None) for i in range(t.ndim))
        if t[sl].any():
            raise ValueError(f"{name} must vanish when an argument is zero")


@dataclass(eq=False)
class Cochain1:
    """One ring argument; t(0) = 0."""

    module: Bimodule
    t: np.ndarray

    def __post_init__(self):
        n = self.module.ring.order
        self.t = _as_table(self.module, self.t, (n,), "t")
        _check_normalised(self.t, "t")

    @property
    def ring(self) -> FiniteRing:
        return self.module.ring


@dataclass(eq=False)
class Cochain2:
    """Additive defect f and multiplicative defect g, normalised at zero."""

    module: Bimodule
    f: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        n = self.module.ring.order
        self.f = _as_table(self.module, self.f, (n, n), "f")
        self.g = _as_table(self.module, self.g, (n, n), "g")
        _check_normalised(self.f, "f")
        _check_normalised(self.g, "g")

    @property
    def ring(self) -> FiniteRing:
        return self.module.ring

    def is_zero(self) -> bool:
        return not (self.f.any() or self.g.any())

    def equals(self, other: "Cochain2") -> bool:
        return (
            self.module is other.module
            and np.array_equal(self.f, other.f)
            and np.array_equal(self.g, other.g)
        )


@dataclass(eq=False)
class Cochain3:
    """The five obstruction tables, normalised at zero in every slot."""

    module: Bimodule
    xi: np.ndarray
    eta: np.ndarray
    alpha_x: np.ndarray
    lambda_l: np.ndarray
    rho_r: np.ndarray

    def __post_init__(self):
        n = self.module.ring.order
        self.xi = _as_table(self.module, self.xi, (n, n, n), "xi")
        self.eta = _as_table(self.module, self.eta, (n, n), "eta")
        self.alpha_x = _as_table(self.module, self.alpha_x, (n, n, n), "alpha_x")
        self.lambda_l = _as_table(self.module, self.lambda_l, (n, n, n), "lambda_l")
        self.rho_r = _as_table(self.module, self.rho_r, (n, n, n), "rho_r")
        for t, nm in self.tables():
            _check_normalised(t, nm)

    @property
    def ring(self) -> FiniteRing:
        return self.module.ring

    def tables(self):
        return (
            (self.xi, "xi"),
            (self.eta, "eta"),
            (self.alpha_x, "alpha_x"),
            (self.lambda_l, "lambda_l"),
            (self.rho_r, "rho_r"),
        )

    def is_zero(self) -> bool:
        return not any(t.any() for t, _ in self.tables())

    def equals(self, other: "Cochain3") -> bool:
        return self.module is other.module and all(
            np.array_equal(a, b)
            for (a, _), (b, _) in zip(self.tables(), other.tables(), strict=True)
        )


def zero_cochain1(module: Bimodule) -> Cochain1:
    return Cochain1(module, np.zeros(module.ring.order, dtype=np.int64))


def zero_cochain2(module: Bimodule) -> Cochain2:
    n = module.ring.order
    z = np.zeros((n, n), dtype=np.int64)
    return Cochain2(module, z, z.copy())


def zero_cochain3(module: Bimodule) -> Cochain3:
    n = module.ring.order
    z3 = np.zeros((n, n, n), dtype=np.int64)
    z2 = np.zeros((n, n), dtype=np.int64)
    return Cochain3(module, z3, z2, z3.copy(), z3.copy(), z3.copy())


def random_cochain1(module: Bimodule, rng) -> Cochain1:
    t = rng.integers(0, module.order, size=module.ring.order)
    t[0] = 0
    return Cochain1(module, t)


def add2(a: Cochain2, b: Cochain2) -> Cochain2:
    assert a.module is b.module
    m = a.module
    return Cochain2(m, m.add[a.f, b.f], m.add[a.g, b.g])


def neg2(a: Cochain2) -> Cochain2:
    m = a.module
    return Cochain2(m, m.neg[a.f], m.neg[a.g])


def sub2(a: Cochain2, b: Cochain2) -> Cochain2:
    return add2(a, neg2(b))


def neg3(a: Cochain3) -> Cochain3:
    m = a.module
    return Cochain3(m, *[m.neg[t] for t, _ in a.tables()])


def sub3(a: Cochain3, b: Cochain3) -> Cochain3:
    assert a.module is b.module
    m = a.module
    return Cochain3(
        m,
        *[m.add[ta, m.neg[tb]] for (ta, _), (tb, _) in zip(a.tables(), b.tables(), strict=True)],
    )


# ---------------------------------------------------------------------------
# The differentials, as table evaluations.


def d1(c: Cochain1) -> Cochain2:
    m, r = c.module, c.module.ring
    n = r.order
    t = c.t
    us = np.arange(n)
    f = m.add[m.add[t[:, None], t[None, :]], m.neg[t[r.add]]]
    g = m.add[
        m.add[m.left[us[:, None], t[None, :]], m.right[us[None, :], t[:, None]]],
        m.neg[t[r.mul]],
    ]
    return Cochain2(m, f, g)


def d2(c: Cochain2) -> Cochain3:
    m, r = c.module, c.module.ring
    n = r.order
    f, g = c.f, c.g
    us = np.arange(n)
    u = us[:, None, None]
    v = us[None, :, None]
    w = us[None, None, :]
    uv = r.add[u, v]
    vw = r.add[v, w]
    uv_m = r.mul[u, v]
    vw_m = r.mul[v, w]

    def msum(*terms):
        acc = terms[0]
        for t in terms[1:]:
            acc = m.add[acc, t]
        return acc

    neg = m.neg
    xi = msum(f[u, vw], f[v, w], neg[f[u, v]], neg[f[uv, w]])
    eta = m.add[f, neg[f.T]]
    alpha_x = msum(
        m.left[u, g[v, w]],
        neg[g[uv_m, w]],
        g[u, vw_m],
        neg[m.right[w, g[u, v]]],
    )
    lambda_l = msum(
        g[u, vw],
        neg[g[u, v]],
        neg[g[u, w]],
        m.left[u, f[v, w]],
        neg[f[uv_m, r.mul[u, w]]],
    )
    rho_r = msum(
        g[uv, w],
        neg[g[u, w]],
        neg[g[v, w]],
        m.right[w, f[u, v]],
        neg[f[r.mul[u, w], vw_m]],
    )
    return Cochain3(m, xi, eta, alpha_x, lambda_l, rho_r)


# ---------------------------------------------------------------------------
# Coordinates and materialised matrices.


def _tiled_group(module: Bimodule, slots: int) -> FinAbGroup:
    return FinAbGroup(tuple(module.group.factors) * slots)


def _coords_of(module: Bimodule, values: np.ndarray) -> np.ndarray:
    """Invariant-factor coordinates of a flat array of module elements."""
    if module.group.rank == 0:
        return np.zeros((values.size, 0), dtype=np.int64)
    fac = np.asarray(module.group.factors, dtype=np.int64)
    return module.coords[values.reshape(-1)] % fac


def _gen_elements(module: Bimodule) -> list[int]:
    gens = []
    for i in range(module.group.rank):
        e = tuple(1 if j == i else 0 for j in range(module.group.rank))
        gens.append(module.from_coords(e))
    return gens


@dataclass(eq=False)
class CochainComplex:
    """Everything needed to treat the degree 1..3 cochains of one module as
    finite abelian groups with explicit differential matrices."""

    module: Bimodule
    c1_group: FinAbGroup
    c2_group: FinAbGroup
    c3_group: FinAbGroup
    d1_map: LinearMap
    d2_map: LinearMap
    _nz: np.ndarray = field(repr=False, default=None)

    def encode1(self, c: Cochain1) -> np.ndarray:
        return _coords_of(self.module, c.t[self._nz]).reshape(-1)

    def encode2(self, c: Cochain2) -> np.ndarray:
        nz = self._nz
        parts = [c.f[np.ix_(nz, nz)], c.g[np.ix_(nz, nz)]]
        return np.concatenate([_coords_of(self.module, p).reshape(-1) for p in parts])

    def encode3(self, c: Cochain3) -> np.ndarray:
        nz = self._nz
        cube = np.ix_(nz, nz, nz)
        sq = np.ix_(nz, nz)
        parts = [c.xi[cube], c.eta[sq], c.alpha_x[cube], c.lambda_l[cube], c.rho_r[cube]]
        return np.concatenate([_coords_of(self.module, p).reshape(-1) for p in parts])

    def _fill(self, flat_coords: np.ndarray, axes: int) -> np.ndarray:
        m = self.module
        rank = m.group.rank
        nz = self._nz
        k = len(nz) ** axes
        vals = np.zeros(k, dtype=np.int64)
        cs = flat_coords.reshape(k, rank)
        for i in range(k):
            vals[i] = m.from_coords(cs[i])
        n = m.ring.order
        out = np.zeros((n,) * axes, dtype=np.int64)
        out[np.ix_(*[nz] * axes)] = vals.reshape((len(nz),) * axes)
        return out

    def decode1(self, vec) -> Cochain1:
        vec = np.asarray(vec, dtype=np.int64)
        return Cochain1(self.module, self._fill(vec, 1))

    def decode2(self, vec) -> Cochain2:
        vec = np.asarray(vec, dtype=np.int64)
        half = vec.size // 2
        f = self._fill(vec[:half], 2)
        g = self._fill(vec[half:], 2)
        return Cochain2(self.module, f, g)


_complexes: dict[Bimodule, CochainComplex] = {}


def complex_for(module: Bimodule, guard: int = COORD_GUARD) -> CochainComplex:
    if module in _complexes:
        return _complexes[module]
    n = module.ring.order
    rank = module.group.rank
    k = n - 1
    dims = {
        "degree 1": k * rank,
        "degree 2": 2 * k * k * rank,
        "degree 3": (4 * k**3 + k * k) * rank,
    }
    for nm, d in dims.items():
        if d > guard:
            raise CohomologyGuardError(f"{nm} needs {d} coordinates, over the guard {guard}")
    nz = np.arange(1, n)
    cx = CochainComplex(
        module,
        _tiled_group(module, k),
        _tiled_group(module, 2 * k * k),
        _tiled_group(module, 4 * k**3 + k * k),
        None,
        None,
        nz,
    )

    gens = _gen_elements(module)
    cols1 = []
    for u in range(1, n):
        for e in gens:
            t = np.zeros(n, dtype=np.int64)
            t[u] = e
            cols1.append(cx.encode2(d1(Cochain1(module, t))))
    mat1 = (
        np.array(cols1, dtype=np.int64).T
        if cols1
        else np.zeros((cx.c2_group.rank, 0), dtype=np.int64)
    )
    cx.d1_map = LinearMap(cx.c1_group, cx.c2_group, mat1)

    cols2 = []
    zero = np.zeros((n, n), dtype=np.int64)
    for which in range(2):
        for u in range(1, n):
            for v in range(1, n):
                for e in gens:
                    f = zero.copy()
                    g = zero.copy()
                    (f if which == 0 else g)[u, v] = e
                    cols2.append(cx.encode3(d2(Cochain2(module, f, g))))
    mat2 = (
        np.array(cols2, dtype=np.int64).T
        if cols2
        else np.zeros((cx.c3_group.rank, 0), dtype=np.int64)
    )
    cx.d2_map = LinearMap(cx.c2_group, cx.c3_group, mat2)

    # The composite must vanish on every generator.
    comp = cx.d2_map.matrix @ cx.d1_map.matrix
    if comp.size:
        fac = np.asarray(cx.c3_group.factors, dtype=np.int64).reshape(-1, 1)
        assert not np.any(comp % fac), "d2 after d1 is nonzero"
    _complexes[module] = cx
    return cx


# ---------------------------------------------------------------------------
# Cocycles, coboundaries, cohomology.


@dataclass(eq=False)
class CocycleGroup:
    complex: CochainComplex
    subgroup: Subgroup

    @property
    def order(self) -> int:
        return self.subgroup.order

    def elements(self):
        for x in self.subgroup.elements():
            yield self.complex.decode2(np.asarray(x, dtype=np.int64))

    def contains(self, c: Cochain2) -> bool:
        return self.subgroup.contains(tuple(int(v) for v in self.complex.encode2(c)))


def z2(module: Bimodule, guard: int = COORD_GUARD) -> CocycleGroup:
    cx = complex_for(module, guard)
    return CocycleGroup(cx, kernel(cx.d2_map))


def b2(module: Bimodule, guard: int = COORD_GUARD) -> CocycleGroup:
    cx = complex_for(module, guard)
    return CocycleGroup(cx, span_subgroup(cx.c2_group, cx.d1_map.matrix))


@dataclass(eq=False)
class H2Data:
    complex: CochainComplex
    data: HomologyData

    @property
    def order(self) -> int:
        return self.data.order

    @property
    def factors(self) -> tuple[int, ...]:
        return self.data.group.factors

    def representatives(self) -> list[Cochain2]:
        return [self.complex.decode2(np.asarray(r, dtype=np.int64)) for r in self.data.representatives()]

    def class_of(self, c: Cochain2) -> tuple[int, ...]:
        return self.data.class_of(tuple(int(v) for v in self.complex.encode2(c)))


def h2(module: Bimodule, guard: int = COORD_GUARD) -> H2Data:
    cx = complex_for(module, guard)
    return H2Data(cx, homology(cx.d1_map, cx.d2_map))


def annihilated_submodule(module: Bimodule) -> list[int]:
    """Elements killed by every left and every right action."""
    dead = (module.left == 0).all(axis=0) & (module.right == 0).all(axis=0)
    return [int(x) for x in np.nonzero(dead)[0]]


def h2_unit_normalised(module: Bimodule, guard: int = COORD_GUARD):
    """H2 computed from cochains that also vanish at the ring unit.

    Correction terms must then keep the unit slots clean, which pins their
    unit value to the two-sided annihilator.  Returns (order, factors,
    representatives); agreement with h2 is checked by tests, and any
    mismatch is a finding to report rather than smooth over.
    """
    cx = complex_for(module, guard)
    m = module
    r = m.ring
    n = r.order
    one = r.unit
    assert one is not None and n >= 2
    gens = _gen_elements(m)

    ann = annihilated_submodule(m)
    ann_cols = _coords_of(m, np.array(ann, dtype=np.int64)).T
    ann_sub = span_subgroup(m.group, ann_cols)
    ann_gens = [m.from_coords(g) for g in ann_sub.gens]

    # Source: one slot per nonzero u, the unit slot restricted.
    src_factors: list[int] = []
    basis: list[tuple[int, int]] = []  # (slot u, module element)
    for u in range(1, n):
        if u == one:
            for gf, ge in zip(ann_sub.group.factors, ann_gens, strict=True):
                src_factors.append(gf)
                basis.append((u, ge))
        else:
            for gf, ge in zip(m.group.factors, gens, strict=True):
                src_factors.append(gf)
                basis.append((u, ge))
    c1u = FinAbGroup(tuple(src_factors))

    # Middle: all f slots, g slots avoiding the unit.
    keep_g = [(u, v) for u in range(1, n) for v in range(1, n) if one not in (u, v)]
    mid_factors = tuple(m.group.factors) * ((n - 1) ** 2) + tuple(m.group.factors) * len(keep_g)
    c2u = FinAbGroup(mid_factors)
    nzsq = [(u, v) for u in range(1, n) for v in range(1, n)]

    def enc2u(c: Cochain2) -> np.ndarray:
        fpart = _coords_of(m, c.f[tuple(np.array(nzsq).T)]).reshape(-1)
        for u in range(1, n):
            assert not (c.g[u, one] or c.g[one, u]), "not unit-normalised"
        if keep_g:
            gpart = _coords_of(m, c.g[tuple(np.array(keep_g).T)]).reshape(-1)
        else:
            gpart = np.zeros(0, dtype=np.int64)
        return np.concatenate([fpart, gpart])

    def dec2u(vec) -> Cochain2:
        vec = np.asarray(vec, dtype=np.int64)
        rank = m.group.rank
        f = np.zeros((n, n), dtype=np.int64)
        g = np.zeros((n, n), dtype=np.int64)
        pos = 0
        for u, v in nzsq:
            f[u, v] = m.from_coords(vec[pos : pos + rank])
            pos += rank
        for u, v in keep_g:
            g[u, v] = m.from_coords(vec[pos : pos + rank])
            pos += rank
        return Cochain2(m, f, g)

    cols1 = []
    for u, e in basis:
        t = np.zeros(n, dtype=np.int64)
        t[u] = e
        cols1.append(enc2u(d1(Cochain1(m, t))))
    mat1 = np.array(cols1, dtype=np.int64).T if cols1 else np.zeros((c2u.rank, 0), dtype=np.int64)
    d1u = LinearMap(c1u, c2u, mat1)

    cols2 = [cx.encode3(d2(dec2u(e))) for e in np.eye(c2u.rank, dtype=np.int64)]
    mat2 = np.array(cols2, dtype=np.int64).T if cols2 else np.zeros((cx.c3_group.rank, 0), dtype=np.int64)
    d2u = LinearMap(c2u, cx.c3_group, mat2)

    hdata = homology(d1u, d2u)
    reps = [dec2u(np.asarray(r, dtype=np.int64)) for r in hdata.representatives()]
    return hdata.order, hdata.group.factors, reps


# ---------------------------------------------------------------------------
# Pullbacks along a unital ring map.


def pullback_module(psi: RingHom, module: Bimodule) -> Bimodule:
    """The same group seen as a bimodule over psi's source."""
    assert psi.target is module.ring and psi.unital
    return validate_bimodule(
        psi.source,
        module.group,
        module.add,
        module.neg,
        module.left[psi.map],
        module.right[psi.map],
        module.coords,
    )


def pullback2(psi: RingHom, c: Cochain2, pulled: Bimodule) -> Cochain2:
    assert psi.target is c.module.ring and pulled.ring is psi.source
    p = psi.map
    return Cochain2(pulled, c.f[np.ix_(p, p)], c.g[np.ix_(p, p)])


def pullback3(psi: RingHom, c: Cochain3, pulled: Bimodule) -> Cochain3:
    assert psi.target is c.module.ring and pulled.ring is psi.source
    p = psi.map
    cube = np.ix_(p, p, p)
    return Cochain3(
        pulled, c.xi[cube], c.eta[np.ix_(p, p)], c.alpha_x[cube], c.lambda_l[cube], c.rho_r[cube]
    )


# ---------------------------------------------------------------------------
# Coboundary membership and functor classification.


@dataclass
class CoboundaryVerdict:
    is_coboundary: bool
    witness: Cochain2 | None
    certificate: UnsolvableWitness | None


def is_coboundary3(k: Cochain3, guard: int = COORD_GUARD) -> CoboundaryVerdict:
    cx = complex_for(k.module, guard)
    x, cert = solve_with_certificate(cx.d2_map, cx.encode3(k))
    if x is None:
        return CoboundaryVerdict(False, None, cert)
    c = cx.decode2(np.asarray(x, dtype=np.int64))
    assert d2(c).equals(k), "solver witness must differentiate to k"
    return CoboundaryVerdict(True, c, None)


@dataclass
class FunctorClassification:
    """Either the obstruction certificate, or one 2-cochain per class."""

    pulled_module: Bimodule
    obstruction: Cochain3
    vanishes: bool
    certificate: UnsolvableWitness | None
    classes: list[Cochain2]
    h2_factors: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.classes)


def classify_functors(psi: RingHom, rc, guard: int = COORD_GUARD) -> FunctorClassification:
    """All classes of structure maps over psi against the reduced data rc.

    rc carries `module` (coefficients over the base's quotient ring) and
    `k` (its obstruction cochain).  A class exists iff the pulled-back
    obstruction bounds; then the solutions of d2(c) = -psi*k form a coset
    of Z2 and are listed one per cohomology class.
    """
    pulled = pullback_module(psi, rc.module)
    kq = pullback3(psi, rc.k, pulled)
    verdict = is_coboundary3(neg3(kq), guard)
    if not verdict.is_coboundary:
        return FunctorClassification(pulled, kq, False, verdict.certificate, [], ())
    g0 = verdict.witness
    hd = h2(pulled, guard)
    classes = [add2(g0, rep) for rep in hd.representatives()]
    for c in classes:
        assert d2(c).equals(neg3(kq))
    assert len(classes) == hd.order
    return FunctorClassification(pulled, kq, True, None, classes, hd.factors)
