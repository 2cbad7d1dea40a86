"""Polynomial rings over QQ, sparse polynomials and an infix parser.

Monomials are stored as tuples ``(comp, e_1, ..., e_n)``; ``comp`` is the
position in a free module and is always 0 for plain polynomials.  This lets
the Groebner engine treat ideals as rank-1 submodules.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from gmpy2 import mpq

from ..errors import ParseError

ORDERS = ("grevlex", "lex")


def parse_order(order):
    """Normalise an order spec to ``'grevlex'``, ``'lex'`` or ``('block', k)``."""
    if isinstance(order, tuple):
        if len(order) == 2 and order[0] == "block" and int(order[1]) >= 0:
            return ("block", int(order[1]))
        raise ValueError(f"bad monomial order {order!r}")
    if order in ORDERS:
        return order
    m = re.fullmatch(r"block\(?(\d+)\)?", str(order))
    if m:
        return ("block", int(m.group(1)))
    raise ValueError(f"bad monomial order {order!r}")


def _grevlex_key(e):
    return (sum(e),) + tuple(-x for x in reversed(e))


class MonomialOrder:
    """Sort keys for module monomials, position-over-term.

    Component 0 dominates component 1, and so on.  Larger key means larger
    monomial.  Keys are memoised; the cache is a plain dict (racy inserts of
    identical values are harmless).
    """

    def __init__(self, spec):
        self.spec = parse_order(spec)
        self._cache = {}
        if self.spec == "grevlex":
            self._mono_key = _grevlex_key
        elif self.spec == "lex":
            self._mono_key = tuple
        else:
            k = self.spec[1]
            self._mono_key = lambda e: _grevlex_key(e[:k]) + _grevlex_key(e[k:])

    def key(self, m):
        k = self._cache.get(m)
        if k is None:
            k = (-m[0],) + self._mono_key(m[1:])
            self._cache[m] = k
        return k

    def __repr__(self):
        return f"MonomialOrder({self.spec!r})"


_ORDER_CACHE = {}


def monomial_order(spec):
    spec = parse_order(spec)
    o = _ORDER_CACHE.get(spec)
    if o is None:
        o = _ORDER_CACHE[spec] = MonomialOrder(spec)
    return o


_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class PolyRing:
    """QQ[x_1, ..., x_n] with a monomial order."""

    names: tuple
    order: object = "grevlex"

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "order", parse_order(self.order))
        if not names:
            raise ValueError("a polynomial ring needs at least one variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for n in names:
            if not _NAME_RE.match(n):
                raise ValueError(f"bad variable name {n!r}")

    # a PolyRing is its own base with no defining relations
    @property
    def base(self):
        return self

    @property
    def defining(self):
        return ()

    @property
    def is_domain(self):
        return True

    @property
    def nvars(self):
        return len(self.names)

    @property
    def monomial_order(self):
        return monomial_order(self.order)

    def with_order(self, order):
        return PolyRing(self.names, order)

    def reduce(self, f):
        return f

    def extend(self, new_names):
        return PolyRing(self.names + tuple(new_names), self.order)

    def index(self, name):
        return self.names.index(name)

    def zero(self):
        return Poly(self, {})

    def one(self):
        return self.const(1)

    def const(self, c):
        c = mpq(c)
        if c == 0:
            return self.zero()
        return Poly(self, {(0,) * (self.nvars + 1): c})

    def var(self, name):
        e = [0] * (self.nvars + 1)
        e[self.names.index(name) + 1] = 1
        return Poly(self, {tuple(e): mpq(1)})

    def gens(self):
        return [self.var(n) for n in self.names]

    def monomial(self, exps, coeff=1):
        if len(exps) != self.nvars:
            raise ValueError("exponent vector length mismatch")
        return Poly(self, {(0,) + tuple(exps): mpq(coeff)})

    def parse(self, text):
        return parse_poly(self, text)

    def __call__(self, x):
        if isinstance(x, Poly):
            if x.ring != self:
                raise ValueError("polynomial from a different ring")
            return x
        if isinstance(x, str):
            return self.parse(x)
        return self.const(x)

    def __str__(self):
        return "QQ[" + ",".join(self.names) + "]"


class Poly:
    """Immutable sparse polynomial; ``terms`` maps monomial tuples to mpq."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = {m: c for m, c in terms.items() if c != 0}
        self._hash = None

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("ring mismatch")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return Poly(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = t.get(m, 0) + c1 * c2
        return Poly(self.ring, t)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative int")
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        c = mpq(c)
        return Poly(self.ring, {m: c * v for m, v in self.terms.items()})

    # -- comparisons ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, mpq)) or type(other).__name__ == "Fraction":
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- inspection -------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(m[1:]) for m in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * (self.ring.nvars + 1), mpq(0))

    def sorted_terms(self, order=None):
        """Terms as ``(exponents, coeff)`` in descending monomial order."""
        key = monomial_order(order or self.ring.order).key
        return [(m[1:], self.terms[m]) for m in sorted(self.terms, key=key, reverse=True)]

    def leading_term(self, order=None):
        st = self.sorted_terms(order)
        return st[0] if st else None

    def total_degree(self):
        return max((sum(m[1:]) for m in self.terms), default=-1)

    def degree_in(self, i):
        return max((m[i + 1] for m in self.terms), default=-1)

    def variables(self):
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m[1:]) if e)
        return [self.ring.names[i] for i in sorted(used)]

    def monic(self, order=None):
        lt = self.leading_term(order)
        return self if lt is None else self.scale(1 / lt[1])

    # -- maps -------------------------------------------------------------
    def substitute(self, images, target=None):
        """Evaluate with variable i replaced by ``images[i]`` (Polys of ``target``)."""
        if target is None:
            target = images[0].ring if images else self.ring
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        powers = [dict() for _ in images]
        acc = {}
        for m, c in self.terms.items():
            term = target.const(c)
            for i, e in enumerate(m[1:]):
                if e:
                    p = powers[i].get(e)
                    if p is None:
                        p = powers[i][e] = images[i] ** e
                    term = term * p
            for mm, cc in term.terms.items():
                acc[mm] = acc.get(mm, 0) + cc
        return Poly(target, acc)

    def rehome(self, ring):
        """Copy into a ring whose variables include ours (matched by name)."""
        if ring == self.ring:
            return self
        idx = [ring.names.index(n) for n in self.ring.names]
        t = {}
        for m, c in self.terms.items():
            e = [0] * (ring.nvars + 1)
            for i, x in zip(idx, m[1:]):
                e[i + 1] = x
            t[tuple(e)] = c
        return Poly(ring, t)

    # -- printing ---------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(self.ring.names, exps) if e
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = _fmt_q(a)
            elif a == 1:
                body = mono
            else:
                body = f"{_fmt_q(a)}*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Poly({str(self)!r})"


def _fmt_q(c):
    c = mpq(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def fmt_rational(c):
    """Rational as a ``"p/q"`` (or ``"p"``) string."""
    return _fmt_q(c)


# ---------------------------------------------------------------------------
# infix parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def tokenize(text, offset=0):
    pos, toks = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", offset + pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", m.group(1), offset + start))
        elif m.group(2):
            toks.append(("name", m.group(2), offset + start))
        else:
            toks.append(("op", m.group(3), offset + start))
        pos = m.end()
    toks.append(("end", "", offset + len(text)))
    return toks


class _PolyParser:
    def __init__(self, ring, toks):
        self.ring, self.toks, self.i = ring, toks, 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val):
        t = self.take()
        if t[1] != val:
            raise ParseError(f"expected {val!r}, got {t[1] or 'end of input'!r}", t[2])
        return t

    def expr(self):
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.power()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            tok = self.take()
            rhs = self.power()
            if tok[1] == "*":
                acc = acc * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise ParseError("division only by nonzero constants", tok[2])
                acc = acc.scale(1 / rhs.constant_value())
        return acc

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] in ("^", "**"):
            self.take()
            t = self.take()
            if t[0] != "num":
                raise ParseError("exponent must be a nonnegative integer", t[2])
            return base ** int(t[1])
        return base

    def atom(self):
        t = self.take()
        if t[0] == "num":
            return self.ring.const(int(t[1]))
        if t[0] == "name":
            if t[1] not in self.ring.names:
                raise ParseError(f"unknown variable {t[1]!r}", t[2])
            return self.ring.var(t[1])
        if t[1] == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t[1] == "-":
            return -self.atom()
        raise ParseError(f"unexpected {t[1] or 'end of input'!r}", t[2])


def parse_poly(ring, text, offset=0):
    """Parse an infix polynomial such as ``"3/2*u^2 - v*(u+1)"``."""
    toks = tokenize(text, offset)
    p = _PolyParser(ring, toks)
    out = p.expr()
    if p.peek()[0] != "end":
        t = p.peek()
        raise ParseError(f"unexpected {t[1]!r}", t[2])
    return out


@dataclass(frozen=True)
class QuotientRing:
    """``base / (defining)``; ``defining`` is stored as a reduced Groebner basis.

    ``is_domain`` is a declaration, not a computed fact: chart rings of
    domains set it, user quotients default to False.
    """

    base: PolyRing
    defining: tuple
    is_domain: bool = field(default=False, compare=False)

    def __post_init__(self):
        from .ideals import reduced_basis

        gens = [g.rehome(self.base) if g.ring != self.base else g for g in self.defining]
        object.__setattr__(self, "defining", tuple(reduced_basis(self.base, gens)))

    @property
    def names(self):
        return self.base.names

    @property
    def nvars(self):
        return self.base.nvars

    @property
    def order(self):
        return self.base.order

    def parse(self, text):
        return self.reduce(parse_poly(self.base, text))

    def reduce(self, f):
        from .ideals import normal_form_polys

        return normal_form_polys(f, list(self.defining)) if self.defining else f

    def var(self, name):
        return self.base.var(name)

    def gens(self):
        return self.base.gens()

    def zero(self):
        return self.base.zero()

    def one(self):
        return self.base.one()

    def const(self, c):
        return self.base.const(c)

    def __call__(self, x):
        return self.base(x)

    def is_zero_ring(self):
        return any(g.is_constant() and not g.is_zero() for g in self.defining)

    def __str__(self):
        if not self.defining:
            return str(self.base)
        return f"{self.base}/(" + ", ".join(str(g) for g in self.defining) + ")"


def make_ring(base, defining=(), is_domain=False):
    """PolyRing when there are no relations, QuotientRing otherwise."""
    defining = [g for g in defining if not g.is_zero()]
    if not defining:
        return base
    q = QuotientRing(base, tuple(defining), is_domain)
    if not q.defining:
        return base
    return q


def base_of(ring):
    return ring.base


def ring_is_domain(ring):
    return ring.is_domain
