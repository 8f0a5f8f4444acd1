"""Text formats for rings, systems, modules, sections and extensions.

Files are UTF-8 and whitespace-separated: a keyword introduces each
field and the payload is a flat list of indices, so any line breaking
works.  `#` starts a comment.  Composite objects reference their parts
by path, resolved relative to the referencing file.  Parse errors carry
the file, line and column of the offending token.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .ablin import FinAbGroup
from .crossed import (
    Bimodule,
    ESystem,
    validate_bimodule,
    validate_esystem,
)
from .extensions import Extension, validate_extension
from .rings import FiniteRing, decompose_abelian, ideal_cokernel, validate_ring
from .transport import Section, validate_section

__all__ = [
    "ParseError",
    "load_extension",
    "load_module",
    "load_ring",
    "load_section",
    "load_esystem",
    "module_from_tables",
    "write_extension",
    "write_esystem",
    "write_module",
    "write_ring",
    "write_section",
]


class ParseError(ValueError):
    def __init__(self, path, line: int, col: int, message: str):
        self.path = str(path)
        self.line = line
        self.col = col
        super().__init__(f"{self.path}:{line}:{col}: {message}")


class _Tokens:
    """Whitespace token stream remembering line and column positions."""

    def __init__(self, path):
        self.path = Path(path)
        try:
            text = self.path.read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(path, 0, 0, f"cannot read file: {e.strerror}") from e
        self.toks: list[tuple[str, int, int]] = []
        line = 1
        for line, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0]
            for mo in re.finditer(r"\S+", body):
                self.toks.append((mo.group(), line, mo.start() + 1))
        self.end_pos = (line, 1)
        self.i = 0

    def _fail(self, message: str):
        if self.i < len(self.toks):
            _, line, col = self.toks[self.i]
        else:
            line, col = self.end_pos
        raise ParseError(self.path, line, col, message)

    def take(self, what: str) -> str:
        if self.i >= len(self.toks):
            self._fail(f"expected {what}, found end of file")
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def keyword(self, kw: str):
        if self.i >= len(self.toks):
            self._fail(f"expected keyword '{kw}', found end of file")
        tok = self.toks[self.i][0]
        if tok != kw:
            self._fail(f"expected keyword '{kw}', found '{tok}'")
        self.i += 1

    def integer(self, what: str, lo: int, hi: int) -> int:
        tok = self.take(what)
        try:
            v = int(tok)
        except ValueError:
            self.i -= 1
            self._fail(f"expected {what}, found '{tok}'")
        if not lo <= v < hi:
            self.i -= 1
            self._fail(f"{what} {v} out of range [{lo}, {hi})")
        return v

    def table(self, what: str, shape: tuple[int, ...], hi: int) -> np.ndarray:
        flat = [
            self.integer(f"{what} entry", 0, hi) for _ in range(int(np.prod(shape)))
        ]
        return np.array(flat, dtype=np.int64).reshape(shape)

    def path_ref(self, what: str) -> Path:
        return self.path.parent / self.take(what)

    def done(self):
        if self.i < len(self.toks):
            self._fail(f"unexpected trailing token '{self.toks[self.i][0]}'")


def load_ring(path) -> FiniteRing:
    t = _Tokens(path)
    t.keyword("ring")
    name = t.take("ring name")
    t.keyword("order")
    n = t.integer("order", 1, 4097)
    t.keyword("add")
    add = t.table("add", (n, n), n)
    t.keyword("mul")
    mul = t.table("mul", (n, n), n)
    t.keyword("unit")
    tok = t.take("unit index or 'none'")
    if tok == "none":
        unit = None
    else:
        t.i -= 1
        unit = t.integer("unit index", 0, n)
    t.done()
    return validate_ring(add, mul, unit, name=name)


def load_esystem(path) -> ESystem:
    t = _Tokens(path)
    t.keyword("esystem")
    name = t.take("system name")
    t.keyword("B")
    b = load_ring(t.path_ref("base ring file"))
    t.keyword("D")
    d_ring = load_ring(t.path_ref("target ring file"))
    t.keyword("d")
    d_map = t.table("d", (b.order,), d_ring.order)
    t.keyword("theta_left")
    tl = t.table("theta_left", (d_ring.order, b.order), b.order)
    t.keyword("theta_right")
    tr = t.table("theta_right", (d_ring.order, b.order), b.order)
    t.done()
    return validate_esystem(b, d_ring, d_map, tl, tr, name=name)


def module_from_tables(ring: FiniteRing, add, left, right, name: str = "module") -> Bimodule:
    """Bimodule from raw tables; negation and coordinates are derived."""
    add = np.asarray(add)
    m = add.shape[0]
    factors, _, coord_of = decompose_abelian(add)
    group = FinAbGroup(tuple(factors))
    neg = np.array(
        [int(np.nonzero(add[i] == 0)[0][0]) for i in range(m)], dtype=np.int64
    )
    coords = np.array([coord_of[i] for i in range(m)], dtype=np.int64).reshape(
        m, group.rank
    )
    return validate_bimodule(ring, group, add, neg, left, right, coords)


def load_module(path, ring: FiniteRing) -> Bimodule:
    """Module files carry no ring of their own; the caller supplies it."""
    t = _Tokens(path)
    t.keyword("module")
    t.take("module name")
    t.keyword("order")
    m = t.integer("order", 1, 4097)
    t.keyword("add")
    add = t.table("add", (m, m), m)
    t.keyword("left")
    left = t.table("left", (ring.order, m), m)
    t.keyword("right")
    right = t.table("right", (ring.order, m), m)
    t.done()
    return module_from_tables(ring, add, left, right)


def load_section(path, es: ESystem) -> Section:
    t = _Tokens(path)
    t.keyword("section")
    t.take("section name")
    t.keyword("sigma")
    n = ideal_cokernel(es.d).ring.order
    sigma = t.table("sigma", (n,), es.d_ring.order)
    t.keyword("fplus")
    fplus = t.table("fplus", (n, n), es.b.order)
    t.keyword("ftimes")
    ftimes = t.table("ftimes", (n, n), es.b.order)
    t.done()
    return validate_section(es, sigma, fplus, ftimes)


def load_extension(path) -> Extension:
    t = _Tokens(path)
    t.keyword("extension")
    name = t.take("extension name")
    t.keyword("base")
    base = load_esystem(t.path_ref("base system file"))
    t.keyword("E")
    ring = load_ring(t.path_ref("total ring file"))
    t.keyword("Q")
    q = load_ring(t.path_ref("quotient ring file"))
    t.keyword("j")
    j = t.table("j", (base.b.order,), ring.order)
    t.keyword("p")
    p = t.table("p", (ring.order,), q.order)
    t.keyword("eps")
    eps = t.table("eps", (ring.order,), base.d_ring.order)
    t.done()
    return validate_extension(base, ring, q, j, p, eps, name=name)


# ---------------------------------------------------------------------------
# Writers.  Output is canonical: one table row per line, no comments.


def _rows(a: np.ndarray) -> str:
    a = np.asarray(a)
    if a.ndim == 1:
        a = a[None, :]
    return "\n".join(" ".join(str(int(v)) for v in row) for row in a)


def write_ring(r: FiniteRing, path) -> Path:
    unit = "none" if r.unit is None else str(int(r.unit))
    text = (
        f"ring {r.name}\norder {r.order}\n"
        f"add\n{_rows(r.add)}\nmul\n{_rows(r.mul)}\nunit {unit}\n"
    )
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path


def write_esystem(es: ESystem, directory, stem: str | None = None) -> Path:
    """Writes `<stem>.esys` plus the two ring files it references."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or es.name
    write_ring(es.b, directory / f"{stem}_B.ring")
    write_ring(es.d_ring, directory / f"{stem}_D.ring")
    text = (
        f"esystem {es.name}\nB {stem}_B.ring\nD {stem}_D.ring\n"
        f"d\n{_rows(es.d.map)}\n"
        f"theta_left\n{_rows(es.theta_left)}\n"
        f"theta_right\n{_rows(es.theta_right)}\n"
    )
    path = directory / f"{stem}.esys"
    path.write_text(text, encoding="utf-8")
    return path


def write_module(mod: Bimodule, path, name: str = "module") -> Path:
    text = (
        f"module {name}\norder {mod.order}\n"
        f"add\n{_rows(mod.add)}\nleft\n{_rows(mod.left)}\nright\n{_rows(mod.right)}\n"
    )
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path


def write_section(sec: Section, path, name: str = "section") -> Path:
    text = (
        f"section {name}\nsigma\n{_rows(sec.sigma)}\n"
        f"fplus\n{_rows(sec.fplus)}\nftimes\n{_rows(sec.ftimes)}\n"
    )
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path


def write_extension(ext: Extension, directory, stem: str | None = None) -> Path:
    """Writes `<stem>.ext` plus the system and ring files it references."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or ext.name
    write_esystem(ext.base, directory, stem=f"{stem}_base")
    write_ring(ext.ring, directory / f"{stem}_E.ring")
    write_ring(ext.quotient, directory / f"{stem}_Q.ring")
    text = (
        f"extension {ext.name}\nbase {stem}_base.esys\n"
        f"E {stem}_E.ring\nQ {stem}_Q.ring\n"
        f"j\n{_rows(ext.j.map)}\np\n{_rows(ext.p.map)}\neps\n{_rows(ext.eps.map)}\n"
    )
    path = directory / f"{stem}.ext"
    path.write_text(text, encoding="utf-8")
    return path
