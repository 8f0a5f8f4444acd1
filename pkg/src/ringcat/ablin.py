"""Exact integer linear algebra over finite abelian groups.

Smith normal form with its unimodular transforms, and solve / kernel /
image / cokernel for additive maps between groups presented by invariant
factors.  Everything is integer arithmetic; no floats appear anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

# Inputs are kept below this bound so int64 accumulation stays exact.
ENTRY_BOUND = 2**31


def as_int_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.int64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2d integer matrix, got shape {m.shape}")
    if m.size and int(np.abs(m).max()) >= ENTRY_BOUND:
        raise OverflowError("matrix entry exceeds the exact arithmetic bound")
    return m


@dataclass
class SNFResult:
    """Diagonalisation s = u @ a @ v with u, v unimodular.

    The diagonal of s is nonnegative and each entry divides the next.
    uinv and vinv are the exact integer inverses of u and v.
    """

    s: np.ndarray
    u: np.ndarray
    v: np.ndarray
    uinv: np.ndarray
    vinv: np.ndarray

    @property
    def diagonal(self) -> list[int]:
        k = min(self.s.shape)
        return [int(self.s[i, i]) for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(a) -> SNFResult:
    """Smith normal form over the integers, tracking both transforms.

    Total on any integer matrix, including empty and rank-deficient ones.
    """
    s = as_int_matrix(a).copy()
    nr, nc = s.shape
    u = np.eye(nr, dtype=np.int64)
    uinv = np.eye(nr, dtype=np.int64)
    v = np.eye(nc, dtype=np.int64)
    vinv = np.eye(nc, dtype=np.int64)

    def swap_rows(i, j):
        if i != j:
            s[[i, j]] = s[[j, i]]
            u[[i, j]] = u[[j, i]]
            uinv[:, [i, j]] = uinv[:, [j, i]]

    def swap_cols(i, j):
        if i != j:
            s[:, [i, j]] = s[:, [j, i]]
            v[:, [i, j]] = v[:, [j, i]]
            vinv[[i, j]] = vinv[[j, i]]

    def add_row(i, j, q):
        # row_i += q * row_j
        s[i] += q * s[j]
        u[i] += q * u[j]
        uinv[:, j] -= q * uinv[:, i]

    def add_col(i, j, q):
        # col_i += q * col_j
        s[:, i] += q * s[:, j]
        v[:, i] += q * v[:, j]
        vinv[j] -= q * vinv[i]

    def negate_row(i):
        s[i] = -s[i]
        u[i] = -u[i]
        uinv[:, i] = -uinv[:, i]

    t = 0
    while t < min(nr, nc):
        sub = s[t:, t:]
        if not sub.any():
            break
        # Move a least nonzero entry to the pivot position.
        nz = np.nonzero(sub)
        k = int(np.argmin(np.abs(sub[nz])))
        swap_rows(t, t + int(nz[0][k]))
        swap_cols(t, t + int(nz[1][k]))
        # Clear row and column t; remainders shrink, so this terminates.
        while True:
            piv = int(s[t, t])
            col = s[t + 1 :, t]
            if col.any():
                i = t + 1 + int(np.nonzero(col)[0][0])
                q = -(int(s[i, t]) // piv)
                add_row(i, t, q)
                if s[i, t] != 0:
                    swap_rows(i, t)
                continue
            row = s[t, t + 1 :]
            if row.any():
                j = t + 1 + int(np.nonzero(row)[0][0])
                q = -(int(s[t, j]) // piv)
                add_col(j, t, q)
                if s[t, j] != 0:
                    swap_cols(j, t)
                continue
            break
        # Fold any entry the pivot does not divide into the pivot block.
        rest = s[t + 1 :, t + 1 :]
        if rest.size and np.any(rest % s[t, t]):
            i, j = np.argwhere(rest % s[t, t])[0]
            add_row(t, t + 1 + int(i), 1)
            continue
        if s[t, t] < 0:
            negate_row(t)
        t += 1

    return SNFResult(s, u, v, uinv, vinv)


def det_exact(a) -> int:
    """Fraction-free determinant in arbitrary precision (small matrices)."""
    m = [[int(x) for x in row] for row in as_int_matrix(a)]
    n = len(m)
    if n == 0:
        return 1
    if n != len(m[0]):
        raise ValueError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class FinAbGroup:
    """Direct sum of cyclic groups; factors[i] is the modulus of slot i.

    Factors of 1 are legal and contribute nothing.  Elements are integer
    tuples reduced componentwise.
    """

    factors: tuple[int, ...]

    def __post_init__(self):
        assert all(int(m) >= 1 for m in self.factors), self.factors

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        n = 1
        for m in self.factors:
            n *= m
        return n

    def reduce(self, vec) -> tuple[int, ...]:
        return tuple(int(x) % m for x, m in zip(vec, self.factors, strict=True))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % m for a, b, m in zip(x, y, self.factors, strict=True))

    def neg(self, x) -> tuple[int, ...]:
        return tuple((-a) % m for a, m in zip(x, self.factors, strict=True))

    def sub(self, x, y) -> tuple[int, ...]:
        return self.add(x, self.neg(y))

    def elements(self):
        return itertools.product(*[range(m) for m in self.factors])

    def element_order(self, x) -> int:
        k = 1
        for a, m in zip(x, self.factors, strict=True):
            if a:
                k = np.lcm(k, m // np.gcd(a, m))
        return int(k)

    def random_element(self, rng) -> tuple[int, ...]:
        return tuple(int(rng.integers(0, m)) for m in self.factors)


def group_from_factors(factors) -> FinAbGroup:
    return FinAbGroup(tuple(int(m) for m in factors))


@dataclass
class LinearMap:
    """Additive map given by generator images; column j is the image of e_j.

    Well-definedness requires source.factors[j] * column_j to vanish in the
    target, which __post_init__ enforces.
    """

    source: FinAbGroup
    target: FinAbGroup
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = as_int_matrix(self.matrix)
        assert self.matrix.shape == (self.target.rank, self.source.rank), (
            self.matrix.shape,
            self.target.rank,
            self.source.rank,
        )
        for j, m in enumerate(self.source.factors):
            img = self.target.reduce(m * self.matrix[:, j])
            assert img == self.target.zero(), f"generator {j} breaks the modulus {m}"

    def apply(self, x) -> tuple[int, ...]:
        vec = self.matrix @ np.asarray(x, dtype=np.int64)
        return self.target.reduce(vec)

    def compose(self, other: "LinearMap") -> "LinearMap":
        # self after other
        assert other.target.factors == self.source.factors
        return LinearMap(other.source, self.target, self.matrix @ other.matrix)


def identity_map(g: FinAbGroup) -> LinearMap:
    return LinearMap(g, g, np.eye(g.rank, dtype=np.int64))


def _augmented(lm: LinearMap) -> np.ndarray:
    """[matrix | diag(target moduli)]: solving over Z against this block
    is solving in the target group."""
    n = np.diag(np.asarray(lm.target.factors, dtype=np.int64))
    return np.hstack([lm.matrix, n]) if lm.target.rank else np.zeros((0, lm.source.rank), dtype=np.int64)


@dataclass
class UnsolvableWitness:
    """Proof that a system has no solution: pairing any candidate image
    with `row` is forced to `residue` mod `modulus`, which is nonzero."""

    row: np.ndarray
    modulus: int
    residue: int

    def describe(self) -> str:
        return (
            f"pairing with {self.row.tolist()} is {self.residue} mod {self.modulus}"
        )


def solve_with_certificate(lm: LinearMap, b):
    """Solve lm(x) = b.  Returns (x, None) or (None, UnsolvableWitness)."""
    h, g = lm.target.rank, lm.source.rank
    if h == 0:
        return lm.source.zero(), None
    m = _augmented(lm)
    res = smith_normal_form(m)
    c = res.u @ np.asarray(b, dtype=np.int64)
    w = np.zeros(g + h, dtype=np.int64)
    # The diagonal block has full row rank, so every diagonal entry is nonzero.
    for i in range(h):
        d = int(res.s[i, i])
        assert d > 0, "target moduli must make the system full row rank"
        if c[i] % d:
            return None, UnsolvableWitness(res.u[i].copy(), d, int(c[i] % d))
        w[i] = c[i] // d
    x = lm.source.reduce((res.v @ w)[:g])
    assert lm.apply(x) == lm.target.reduce(b), "solver postcondition"
    return x, None


def solve(lm: LinearMap, b):
    x, _ = solve_with_certificate(lm, b)
    return x


@dataclass
class Subgroup:
    """A subgroup of `ambient`, abstractly presented by `group` and embedded
    by `gens` (one ambient element per abstract generator)."""

    ambient: FinAbGroup
    group: FinAbGroup
    gens: list[tuple[int, ...]]
    _embed: LinearMap = field(repr=False, default=None)

    def __post_init__(self):
        cols = np.array([list(g) for g in self.gens], dtype=np.int64).T
        if not self.gens:
            cols = np.zeros((self.ambient.rank, 0), dtype=np.int64)
        self._embed = LinearMap(self.group, self.ambient, cols)

    @property
    def order(self) -> int:
        return self.group.order

    def embed(self, coords) -> tuple[int, ...]:
        return self._embed.apply(coords)

    def coords_of(self, x):
        """Abstract coordinates of ambient x, or None if x lies outside."""
        return solve(self._embed, x)

    def contains(self, x) -> bool:
        return self.coords_of(x) is not None

    def elements(self):
        seen = set()
        for c in self.group.elements():
            e = self.embed(c)
            if e not in seen:
                seen.add(e)
                yield e


def span_subgroup(ambient: FinAbGroup, cols) -> Subgroup:
    """Subgroup of `ambient` generated by the columns of `cols`.

    The presentation comes from the lattice spanned by the columns together
    with the ambient moduli; its index in Z^rank gives the subgroup order.
    """
    g = ambient.rank
    if g == 0:
        return Subgroup(ambient, FinAbGroup(()), [])
    cols = np.asarray(cols, dtype=np.int64).reshape(g, -1)
    mdiag = np.diag(np.asarray(ambient.factors, dtype=np.int64))
    span = smith_normal_form(np.hstack([cols, mdiag]))
    assert span.rank == g, "the moduli force a full-rank lattice"
    d1 = np.asarray(span.diagonal[:g], dtype=np.int64)
    basis = span.uinv * d1  # column i is d1[i] * uinv[:, i]
    # Relations of the moduli lattice in that basis present the quotient.
    rel = span.u @ mdiag
    assert not np.any(rel % d1[:, None]), "moduli must lie in the lattice"
    rel = rel // d1[:, None]
    rel_res = smith_normal_form(rel)
    newbasis = basis @ rel_res.uinv
    gens, factors = [], []
    for i in range(g):
        d = int(rel_res.s[i, i])
        if d > 1:
            factors.append(d)
            gens.append(ambient.reduce(newbasis[:, i]))
    sub = Subgroup(ambient, FinAbGroup(tuple(factors)), gens)
    expected = ambient.order // (int(np.prod(d1)) or 1)
    assert sub.order == expected, "subgroup order must match the lattice index"
    return sub


def kernel(lm: LinearMap) -> Subgroup:
    """Kernel of lm as a presented subgroup of the source."""
    g = lm.source.rank
    if g == 0:
        return Subgroup(lm.source, FinAbGroup(()), [])
    res = smith_normal_form(_augmented(lm))
    r = res.rank
    # x-parts of an integer basis of the kernel lattice of the augmented block;
    # together with the source moduli they span the kernel as a lattice.
    kz = res.v[:g, r:]
    sub = span_subgroup(lm.source, kz)
    for x in sub.gens:
        assert lm.apply(x) == lm.target.zero(), "kernel generator sanity"
    return sub


@dataclass
class Quotient:
    """target / image, with an explicit projection and a section.

    project maps an ambient element to quotient coordinates; lift picks a
    preimage of quotient coordinates.
    """

    ambient: FinAbGroup
    group: FinAbGroup
    _rows: np.ndarray
    _moduli: tuple[int, ...]
    _lift_cols: np.ndarray

    def project(self, x) -> tuple[int, ...]:
        vec = self._rows @ np.asarray(x, dtype=np.int64)
        return tuple(int(a) % m for a, m in zip(vec, self._moduli, strict=True))

    def lift(self, c) -> tuple[int, ...]:
        x = self.ambient.reduce(self._lift_cols @ np.asarray(c, dtype=np.int64))
        assert self.project(x) == self.group.reduce(c), "section postcondition"
        return x


def cokernel(lm: LinearMap) -> Quotient:
    """target / image(lm), presented by invariant factors."""
    h = lm.target.rank
    m = _augmented(lm)
    res = smith_normal_form(m)
    rows, moduli, lifts = [], [], []
    for i in range(h):
        d = int(res.s[i, i])
        assert d > 0
        if d > 1:
            rows.append(res.u[i])
            moduli.append(d)
            lifts.append(res.uinv[:, i])
    rows = np.array(rows, dtype=np.int64) if rows else np.zeros((0, h), dtype=np.int64)
    lifts = np.array(lifts, dtype=np.int64).T if lifts else np.zeros((h, 0), dtype=np.int64)
    return Quotient(lm.target, FinAbGroup(tuple(moduli)), rows, tuple(moduli), lifts)


def kernel_order(lm: LinearMap) -> int:
    return kernel(lm).order


def image_order(lm: LinearMap) -> int:
    """Order of the image; checked against |source| = |kernel| * |image|."""
    via_coker = lm.target.order // cokernel(lm).group.order
    via_kernel = lm.source.order // kernel(lm).order
    assert via_coker == via_kernel, "rank-nullity over the two routes"
    return via_coker


@dataclass
class HomologyData:
    """Ker(outgoing) / Im(incoming) at the middle group of a two-step
    complex, with explicit representatives in the middle group."""

    cycles: Subgroup
    group: FinAbGroup
    _quot: Quotient = field(repr=False, default=None)

    @property
    def order(self) -> int:
        return self.group.order

    def class_of(self, x) -> tuple[int, ...]:
        c = self.cycles.coords_of(x)
        assert c is not None, "not a cycle"
        return self._quot.project(c)

    def representative(self, h) -> tuple[int, ...]:
        return self.cycles.embed(self._quot.lift(h))

    def representatives(self) -> list[tuple[int, ...]]:
        return [self.representative(h) for h in self.group.elements()]


def homology(incoming: LinearMap, outgoing: LinearMap) -> HomologyData:
    """Homology of `incoming` followed by `outgoing` (must compose to zero)."""
    assert incoming.target.factors == outgoing.source.factors
    cyc = kernel(outgoing)
    cols = []
    for j in range(incoming.source.rank):
        b = incoming.target.reduce(incoming.matrix[:, j])
        c = cyc.coords_of(b)
        assert c is not None, f"boundary {j} is not a cycle"
        cols.append(c)
    mat = (
        np.array(cols, dtype=np.int64).T
        if cols
        else np.zeros((cyc.group.rank, 0), dtype=np.int64)
    )
    quot = cokernel(LinearMap(incoming.source, cyc.group, mat))
    return HomologyData(cyc, quot.group, quot)
