"""The input language.

    ring A = QQ[u,v];                    # optional: / (relations) domain
    supports S on A = (u,v), (w);
    ideal I = (u, v^2);                  # optional: on A
    module M = coker [[v],[-u]];         # rows = generators, columns = relations
    valuation V on A = [[1,2]];          # 'inf' sends that variable to zero

Polynomials are read in the named ring, or the most recent ring when no
``on`` clause is given.  ``#`` starts a comment.  Errors carry the character
position in the original text.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .cakernel import Ideal, PolyRing, make_ring, parse_poly
from .depth import PresentedModule
from .errors import ParseError, PhiflatError
from .philocal import ValuationData
from .phiring import PhiRing

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
KINDS = ("ring", "supports", "ideal", "module", "valuation")


@dataclass
class Binding:
    kind: str
    name: str
    value: object
    ring: str
    # extra data needed to print the binding back
    extra: dict = field(default_factory=dict)


@dataclass
class Session:
    bindings: dict = field(default_factory=dict)
    order: str = "grevlex"
    degenerate_ok: bool = False

    def add(self, b, pos):
        if b.name in self.bindings:
            raise ParseError(f"name {b.name!r} is already bound", pos)
        self.bindings[b.name] = b

    def get(self, name, kind):
        b = self.bindings.get(name)
        if b is None:
            raise ParseError(f"unknown name {name!r}")
        if b.kind != kind:
            raise ParseError(f"{name!r} is a {b.kind}, not a {kind}")
        return b.value

    def last(self, kind):
        for b in reversed(list(self.bindings.values())):
            if b.kind == kind:
                return b
        return None

    def select(self, kind, name=None):
        """Binding by name, or the most recent one of that kind."""
        if name is not None:
            self.get(name, kind)
            return self.bindings[name]
        b = self.last(kind)
        if b is None:
            raise ParseError(f"the session has no {kind} binding")
        return b

    def ring_of(self, b):
        return self.bindings[b.ring].value

    def to_text(self):
        out = []
        for b in self.bindings.values():
            out.append(_print_binding(self, b))
        return "\n".join(out) + ("\n" if out else "")

    def canonical(self):
        return self.to_text()


def _polys(ps):
    return ", ".join(str(p) for p in ps)


def _print_binding(sess, b):
    if b.kind == "ring":
        R = b.value
        s = f"ring {b.name} = {R.base}"
        if R.defining:
            s += f" / ({_polys(R.defining)})"
            if R.is_domain:
                s += " domain"
        return s + ";"
    if b.kind == "supports":
        fam = ", ".join(f"({_polys(I.gens)})" for I in b.value.phi0)
        return f"supports {b.name} on {b.ring} = {fam};"
    if b.kind == "ideal":
        return f"ideal {b.name} on {b.ring} = ({_polys(b.value.gens)});"
    if b.kind == "module":
        rows = ", ".join("[" + ", ".join(str(p) for p in r) + "]" for r in b.extra["rows"])
        return f"module {b.name} on {b.ring} = coker [{rows}];"
    if b.kind == "valuation":
        rows = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in b.extra["rows"])
        return f"valuation {b.name} on {b.ring} = [{rows}];"
    raise AssertionError(b.kind)


# ---------------------------------------------------------------------------
# scanner
# ---------------------------------------------------------------------------

def _strip_comments(text):
    # replace comments by spaces so positions stay put
    return re.sub(r"#[^\n]*", lambda m: " " * len(m.group(0)), text)


class _Cursor:
    def __init__(self, text, start, end):
        self.text, self.pos, self.end = text, start, end

    def ws(self):
        while self.pos < self.end and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self):
        self.ws()
        return self.pos >= self.end

    def peek_word(self, word):
        self.ws()
        if not self.text.startswith(word, self.pos):
            return False
        after = self.pos + len(word)
        return after >= self.end or not (self.text[after].isalnum() or self.text[after] == "_") or not word.isalpha()

    def word(self, word):
        if not self.peek_word(word):
            raise ParseError(f"expected {word!r}", self.pos)
        self.pos += len(word)

    def name(self):
        self.ws()
        m = _NAME.match(self.text, self.pos)
        if not m or m.end() > self.end:
            raise ParseError("expected a name", self.pos)
        self.pos = m.end()
        return m.group(0), m.start()

    def group(self, open_, close):
        """Contents of a balanced bracket group; returns (inner_start, inner_end)."""
        self.ws()
        if self.pos >= self.end or self.text[self.pos] != open_:
            raise ParseError(f"expected {open_!r}", self.pos)
        depth = 0
        for i in range(self.pos, self.end):
            ch = self.text[i]
            if ch in "([":
                depth += 1
            elif ch in ")]":
                depth -= 1
                if depth == 0:
                    if ch != close:
                        raise ParseError(f"expected {close!r}", i)
                    start = self.pos + 1
                    self.pos = i + 1
                    return start, i
        raise ParseError(f"unclosed {open_!r}", self.end)


def _split_top(text, start, end):
    """Split text[start:end] at top-level commas; returns (start, end) pieces."""
    pieces, depth, s = [], 0, start
    for i in range(start, end):
        ch = text[i]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            pieces.append((s, i))
            s = i + 1
    pieces.append((s, end))
    if len(pieces) == 1 and not text[start:end].strip():
        return []
    return pieces


def _poly_list(text, start, end, ring, allow_empty=True):
    out = []
    pieces = _split_top(text, start, end)
    if not pieces and not allow_empty:
        raise ParseError("expected at least one polynomial", end)
    for s, e in pieces:
        if not text[s:e].strip():
            raise ParseError("expected a polynomial", e)
        out.append(ring.reduce(parse_poly(ring.base, text[s:e], s)))
    return out


# ---------------------------------------------------------------------------
# statements
# ---------------------------------------------------------------------------

def _ring_clause(sess, cur, pos):
    """Optional ``on NAME``; defaults to the most recent ring."""
    if cur.peek_word("on"):
        cur.word("on")
        name, p = cur.name()
        b = sess.bindings.get(name)
        if b is None or b.kind != "ring":
            raise ParseError(f"unknown ring {name!r}", p)
        return name
    b = sess.last("ring")
    if b is None:
        raise ParseError("no ring declared yet", pos)
    return b.name


def _stmt_ring(sess, cur, text):
    name, p = cur.name()
    cur.word("=")
    cur.word("QQ")
    s, e = cur.group("[", "]")
    names = []
    for a, b in _split_top(text, s, e):
        v = text[a:b].strip()
        if not _NAME.fullmatch(v):
            raise ParseError(f"bad variable name {v!r}", a)
        if v in names:
            raise ParseError(f"duplicate variable {v!r}", a)
        names.append(v)
    if not names:
        raise ParseError("a ring needs at least one variable", e)
    base = PolyRing(tuple(names), sess.order)
    rels, domain = [], False
    if not cur.at_end() and cur.text[cur.pos] == "/":
        cur.pos += 1
        s, e = cur.group("(", ")")
        rels = _poly_list(text, s, e, base)
        if cur.peek_word("domain"):
            cur.word("domain")
            domain = True
    ring = make_ring(base, rels, is_domain=domain)
    return Binding("ring", name, ring, name), p


def _stmt_supports(sess, cur, text):
    name, p = cur.name()
    cur.word("on")
    rname, rp = cur.name()
    rb = sess.bindings.get(rname)
    if rb is None or rb.kind != "ring":
        raise ParseError(f"unknown ring {rname!r}", rp)
    ring = rb.value
    cur.word("=")
    fam = []
    while True:
        s, e = cur.group("(", ")")
        fam.append(Ideal(ring, _poly_list(text, s, e, ring, allow_empty=False)))
        cur.ws()
        if cur.pos < cur.end and cur.text[cur.pos] == ",":
            cur.pos += 1
            continue
        break
    return Binding("supports", name, PhiRing(ring, tuple(fam), sess.degenerate_ok), rname), p


def _stmt_ideal(sess, cur, text):
    name, p = cur.name()
    rname = _ring_clause(sess, cur, p)
    ring = sess.bindings[rname].value
    cur.word("=")
    s, e = cur.group("(", ")")
    return Binding("ideal", name, Ideal(ring, _poly_list(text, s, e, ring)), rname), p


def _matrix(cur, text, cell):
    s, e = cur.group("[", "]")
    rows = []
    for a, b in _split_top(text, s, e):
        inner = _Cursor(text, a, b)
        rs, re_ = inner.group("[", "]")
        if not inner.at_end():
            raise ParseError("unexpected text after matrix row", inner.pos)
        row = []
        for x, y in _split_top(text, rs, re_):
            if not text[x:y].strip():
                raise ParseError("empty matrix entry", y)
            row.append(cell(text[x:y], x))
        rows.append(row)
    if any(len(r) != len(rows[0]) for r in rows):
        raise ParseError("matrix rows have different lengths", s)
    return rows


def _stmt_module(sess, cur, text):
    name, p = cur.name()
    rname = _ring_clause(sess, cur, p)
    ring = sess.bindings[rname].value
    cur.word("=")
    cur.word("coker")
    rows = _matrix(cur, text, lambda t, off: ring.reduce(parse_poly(ring.base, t, off)))
    M = PresentedModule.from_matrix(ring, rows)
    return Binding("module", name, M, rname, {"rows": rows}), p


def _int_cell(t, off):
    v = t.strip()
    if v == "inf":
        return "inf"
    if not re.fullmatch(r"[-+]?\d+", v):
        raise ParseError(f"expected an integer or 'inf', got {v!r}", off)
    return int(v)


def _stmt_valuation(sess, cur, text):
    name, p = cur.name()
    cur.word("on")
    rname, rp = cur.name()
    rb = sess.bindings.get(rname)
    if rb is None or rb.kind != "ring":
        raise ParseError(f"unknown ring {rname!r}", rp)
    ring = rb.value
    cur.word("=")
    at = cur.pos
    rows = _matrix(cur, text, _int_cell)
    n = ring.base.nvars
    if not rows or len(rows[0]) != n:
        raise ParseError(f"weight matrix needs {n} columns", at)
    inf = {j for r in rows for j, x in enumerate(r) if x == "inf"}
    w = [[0 if x == "inf" else x for x in r] for r in rows]
    V = ValuationData(tuple(map(tuple, w)), frozenset(inf), n)
    return Binding("valuation", name, V, rname, {"rows": rows}), p


_STATEMENTS = {
    "ring": _stmt_ring,
    "supports": _stmt_supports,
    "ideal": _stmt_ideal,
    "module": _stmt_module,
    "valuation": _stmt_valuation,
}


def parse_session(text, order="grevlex", degenerate_ok=False):
    sess = Session(order=order, degenerate_ok=degenerate_ok)
    clean = _strip_comments(text)
    pos = 0
    while True:
        semi = clean.find(";", pos)
        if semi < 0:
            if clean[pos:].strip():
                raise ParseError("missing ';' at end of statement", len(clean))
            break
        cur = _Cursor(clean, pos, semi)
        if cur.at_end():
            pos = semi + 1
            continue
        kw, kp = cur.name()
        handler = _STATEMENTS.get(kw)
        if handler is None:
            raise ParseError(f"unknown statement {kw!r}", kp)
        try:
            b, bp = handler(sess, cur, clean)
        except ValueError as e:
            if isinstance(e, PhiflatError):
                raise
            raise ParseError(str(e), kp) from e
        if not cur.at_end():
            raise ParseError("unexpected text before ';'", cur.pos)
        sess.add(b, bp)
        pos = semi + 1
    return sess
