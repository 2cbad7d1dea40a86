"""Ideals and submodules of free modules over QQ[x] or QQ[x]/J.

Quotient rings are handled by lifting: every computation in ``R = S/J``
is done in ``S`` after adjoining ``J * e_k`` for each basis vector ``e_k``.
"""
from __future__ import annotations

from functools import cached_property

from gmpy2 import mpq

from ..errors import RingMismatch
from . import groebner as gb
from .poly import Poly, PolyRing, monomial_order


# ---------------------------------------------------------------------------
# conversions between Poly vectors and engine dicts
# ---------------------------------------------------------------------------

def vec_to_dict(vec, offset=0):
    d = {}
    for comp, p in enumerate(vec):
        for m, c in p.terms.items():
            d[(comp + offset,) + m[1:]] = c
    return d


def dict_to_vec(d, base, rank, offset=0):
    parts = [dict() for _ in range(rank)]
    for m, c in d.items():
        k = m[0] - offset
        if 0 <= k < rank:
            parts[k][(0,) + m[1:]] = c
    return tuple(Poly(base, t) for t in parts)


def _ring_of(*objs):
    rings = {o.ring for o in objs}
    if len(rings) != 1:
        raise RingMismatch("objects live in different rings")
    return rings.pop()


def _lifted_dicts(ring, rank, columns, offset=0):
    out = [vec_to_dict(c, offset) for c in columns]
    for g in ring.defining:
        for k in range(rank):
            out.append({(k + offset,) + m[1:]: c for m, c in g.terms.items()})
    return [d for d in out if d]


def _gb(ring, dicts, order=None):
    order = monomial_order(order or ring.order)
    return gb.groebner(dicts, order)


def _basis_pairs(ring, gbasis, order=None):
    key = monomial_order(order or ring.order).key
    return [(gb.leading(g, key), g) for g in gbasis]


def reduced_basis(base, polys, order=None):
    """Reduced Groebner basis of polynomials in a PolyRing, as Polys."""
    basis = _gb(base, [vec_to_dict((p,)) for p in polys if not p.is_zero()], order)
    return [dict_to_vec(g, base, 1)[0] for g in basis]


def normal_form_polys(f, basis_polys, order=None):
    """Normal form of ``f`` modulo polynomials assumed to form a Groebner basis."""
    ring = f.ring
    key = monomial_order(order or ring.order).key
    pairs = []
    for g in basis_polys:
        d = gb.monic(vec_to_dict((g,)), key)
        pairs.append((gb.leading(d, key), d))
    r = gb.reduce(vec_to_dict((f,)), pairs, key)
    return dict_to_vec(r, ring, 1)[0]


# ---------------------------------------------------------------------------
# FreeSubmodule
# ---------------------------------------------------------------------------

class FreeSubmodule:
    """Submodule of ``ring^rank`` generated by ``columns`` (tuples of Polys).

    Polys belong to ``ring.base``; for quotient rings the defining ideal is
    implicitly adjoined in every computation.
    """

    def __init__(self, ring, rank, columns):
        self.ring = ring
        self.rank = int(rank)
        cols = []
        for c in columns:
            c = tuple(c)
            if len(c) != self.rank:
                raise ValueError(f"column of length {len(c)} in rank {self.rank} module")
            cols.append(tuple(ring.reduce(p) for p in c))
        self.columns = tuple(c for c in cols if any(not p.is_zero() for p in c))

    @property
    def base(self):
        return self.ring.base

    @cached_property
    def _gb_dicts(self):
        return _gb(self.ring, _lifted_dicts(self.ring, self.rank, self.columns))

    @cached_property
    def _gb_pairs(self):
        return _basis_pairs(self.ring, self._gb_dicts)

    def groebner(self):
        """Reduced Groebner basis (lifted; defining relations stripped)."""
        out = []
        for g in self._gb_dicts:
            v = dict_to_vec(g, self.base, self.rank)
            if self.ring.defining and all(self.ring.reduce(p).is_zero() for p in v):
                continue
            out.append(v)
        return FreeSubmodule(self.ring, self.rank, out)

    def reduce(self, vec):
        vec = tuple(vec)
        key = monomial_order(self.ring.order).key
        r = gb.reduce(vec_to_dict(vec), self._gb_pairs, key)
        return dict_to_vec(r, self.base, self.rank)

    def contains(self, vec):
        return all(p.is_zero() for p in self.reduce(vec))

    def __contains__(self, vec):
        return self.contains(vec)

    def is_subset(self, other):
        _check_same(self, other)
        return all(other.contains(c) for c in self.columns)

    def equals(self, other):
        return self.is_subset(other) and other.is_subset(self)

    def is_zero(self):
        return not self.columns

    def is_full(self):
        return all(self.contains(unit_vector(self.base, self.rank, k)) for k in range(self.rank))

    def __add__(self, other):
        _check_same(self, other)
        return FreeSubmodule(self.ring, self.rank, self.columns + other.columns)

    def scale(self, f):
        return FreeSubmodule(self.ring, self.rank, [tuple(f * p for p in c) for c in self.columns])

    def canonical(self):
        """Canonical generator strings (reduced Groebner basis)."""
        return [[str(p) for p in c] for c in self.groebner().columns]

    def __repr__(self):
        return f"FreeSubmodule(rank={self.rank}, columns={[[str(p) for p in c] for c in self.columns]})"


def unit_vector(base, rank, k, coeff=None):
    return tuple((coeff if coeff is not None else base.one()) if i == k else base.zero() for i in range(rank))


def _check_same(a, b):
    if a.ring != b.ring:
        raise RingMismatch("submodules over different rings")
    if a.rank != b.rank:
        raise ValueError("submodules of free modules of different rank")


# ---------------------------------------------------------------------------
# Ideal
# ---------------------------------------------------------------------------

class Ideal:
    """Finitely generated ideal; generators are Polys of ``ring.base``."""

    def __init__(self, ring, gens):
        self.ring = ring
        gs = []
        for g in gens:
            if not isinstance(g, Poly):
                g = ring.base(g)
            if g.ring != ring.base:
                raise RingMismatch(f"generator {g} is not in {ring}")
            gs.append(ring.reduce(g))
        self.gens = tuple(gs)

    @cached_property
    def module(self):
        return FreeSubmodule(self.ring, 1, [(g,) for g in self.gens])

    def groebner(self):
        return Ideal(self.ring, [c[0] for c in self.module.groebner().columns])

    def reduce(self, f):
        return self.module.reduce((f,))[0]

    def contains(self, f):
        if not isinstance(f, Poly):
            f = self.ring.base(f)
        return self.reduce(f).is_zero()

    def __contains__(self, f):
        return self.contains(f)

    def is_subset(self, other):
        return all(other.contains(g) for g in self.gens)

    def equals(self, other):
        if self.ring != other.ring:
            return False
        return self.is_subset(other) and other.is_subset(self)

    def is_unit(self):
        return self.contains(self.ring.base.one())

    def is_zero(self):
        return all(g.is_zero() for g in self.gens)

    def __add__(self, other):
        _ring_of(self, other)
        return Ideal(self.ring, self.gens + other.gens)

    def __mul__(self, other):
        _ring_of(self, other)
        return Ideal(self.ring, [a * b for a in self.gens for b in other.gens])

    def __pow__(self, n):
        out = Ideal(self.ring, [self.ring.base.one()])
        for _ in range(n):
            out = Ideal(self.ring, (out * self).groebner().gens)
        return out

    def nonzero_gens(self):
        return [g for g in self.gens if not g.is_zero()]

    def canonical(self):
        return [str(g) for g in self.groebner().gens]

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.gens) + ")"

    def __repr__(self):
        return f"Ideal{self}"


def ideal(ring, *gens):
    if len(gens) == 1 and isinstance(gens[0], (list, tuple)):
        gens = gens[0]
    return Ideal(ring, [ring.parse(g) if isinstance(g, str) else g for g in gens])


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def groebner_basis(target, order=None):
    """Reduced Groebner basis of an Ideal or FreeSubmodule.

    ``order`` overrides the ring order for ideals of polynomial rings (used
    for lex / elimination computations); the result then lives in the ring
    re-equipped with that order.
    """
    if isinstance(target, Ideal):
        if order is not None and target.ring.order != monomial_order(order).spec:
            if target.ring.defining:
                raise ValueError("order override is only supported over polynomial rings")
            ring = target.ring.with_order(order)
            return Ideal(ring, [g.rehome(ring) for g in target.gens]).groebner()
        return target.groebner()
    if isinstance(target, FreeSubmodule):
        if order is not None and target.ring.order != monomial_order(order).spec:
            raise ValueError("submodule bases use the ring order")
        return target.groebner()
    raise TypeError(f"cannot compute a Groebner basis of {type(target).__name__}")


def normal_form(f, basis):
    """Remainder of ``f`` on division by a Groebner basis (Ideal or submodule)."""
    if isinstance(basis, Ideal):
        if f.ring != basis.ring.base:
            raise RingMismatch("polynomial and basis live in different rings")
        return basis.reduce(f)
    if isinstance(basis, FreeSubmodule):
        return basis.reduce(f)
    raise TypeError("basis must be an Ideal or FreeSubmodule")


def intersect(a, b):
    """Intersection of two submodules of the same free module."""
    _check_same(a, b)
    ring, r = a.ring, a.rank
    dicts = []
    for c in a.columns:
        dicts.append({**vec_to_dict(c), **vec_to_dict(c, r)})
    dicts += [vec_to_dict(c) for c in b.columns]
    for d in _lifted_dicts(ring, r, [], 0):
        dicts.append(d)
        dicts.append({**d, **{(k[0] + r,) + k[1:]: c for k, c in d.items()}})
    basis = _gb(ring, [d for d in dicts if d])
    out = []
    for g in basis:
        if all(k[0] >= r for k in g):
            out.append(dict_to_vec(g, ring.base, r, offset=r))
    return FreeSubmodule(ring, r, out)


def intersect_ideals(i, j):
    m = intersect(i.module, j.module)
    return Ideal(i.ring, [c[0] for c in m.columns])


def exact_divide(f, g):
    """f / g in the polynomial ring, or None when g does not divide f."""
    if g.is_zero():
        return None
    key = monomial_order(f.ring.order).key
    gd = vec_to_dict((g,))
    lm = gb.leading(gd, key)
    lc = gd[lm]
    p = vec_to_dict((f,))
    q = {}
    while p:
        m = max(p, key=key)
        if not gb.divides(lm, m):
            return None
        c = p[m] / lc
        t = gb.mono_quot(m, lm)
        q[t] = q.get(t, 0) + c
        gb._sub_multiple(p, gd, t, c)
    return Poly(f.ring, q)


def colon_element(n, g):
    """(N : g) for a single ring element g."""
    ring, r = n.ring, n.rank
    if g.is_zero() or (ring.defining and ring.reduce(g).is_zero()):
        return FreeSubmodule(ring, r, [unit_vector(ring.base, r, k) for k in range(r)])
    lifted = FreeSubmodule(ring.base, r, list(n.columns) + [
        unit_vector(ring.base, r, k, d) for d in ring.defining for k in range(r)])
    gF = FreeSubmodule(ring.base, r, [unit_vector(ring.base, r, k, g) for k in range(r)])
    inter = intersect(lifted, gF)
    out = []
    for c in inter.columns:
        q = [exact_divide(p, g) for p in c]
        if any(x is None for x in q):  # pragma: no cover - intersect guarantees divisibility
            raise ArithmeticError("non-exact division in colon")
        out.append(tuple(q))
    return FreeSubmodule(ring, r, out).groebner()


def colon_module(n, j):
    """(N :_F J) = {v in F : J v subset N} for a submodule N and ideal J."""
    if n.ring != j.ring:
        raise RingMismatch("colon of objects over different rings")
    gens = j.nonzero_gens()
    if not gens:
        return FreeSubmodule(n.ring, n.rank, [unit_vector(n.base, n.rank, k) for k in range(n.rank)])
    result = None
    for g in gens:
        c = colon_element(n, g)
        result = c if result is None else intersect(result, c)
    return result.groebner()


def colon(i, j):
    """Ideal quotient (I : J)."""
    if isinstance(i, FreeSubmodule):
        return colon_module(i, j)
    if i.ring != j.ring:
        raise RingMismatch("colon of ideals in different rings")
    m = colon_module(i.module, j)
    return Ideal(i.ring, [c[0] for c in m.columns])


def saturate(target, j, max_steps=None):
    """(target : J^infinity) by iterated colon; returns (result, N).

    N is the smallest exponent with (target : J^N) = (target : J^{N+1}).
    """
    if target.ring != j.ring:
        raise RingMismatch("saturation of objects over different rings")
    cur = target
    n = 0
    while True:
        nxt = colon(cur, j)
        if nxt.is_subset(cur):
            return cur, n
        cur = nxt
        n += 1
        if max_steps is not None and n > max_steps:
            raise ArithmeticError("saturation did not stabilize")


def radical_member(f, i):
    """True iff f^N lies in I for some N, decided by (I : f^infinity) = (1)."""
    if f.ring != i.ring.base:
        raise RingMismatch("element and ideal live in different rings")
    sat, _ = saturate(i, Ideal(i.ring, [f]))
    return sat.is_unit()


def syzygies(columns):
    """Generators of the relation module of the columns of a FreeSubmodule.

    Returned as a FreeSubmodule of ring^s, s = number of columns.  Over a
    quotient ring the relations hold modulo the defining ideal.
    """
    ring, r = columns.ring, columns.rank
    cols = list(columns.columns)
    s = len(cols)
    if s == 0:
        return FreeSubmodule(ring, 0, [])
    dicts = []
    for i, c in enumerate(cols):
        d = vec_to_dict(c)
        d[(r + i,) + (0,) * ring.nvars] = mpq(1)
        dicts.append(d)
    dicts += _lifted_dicts(ring, r, [], 0)
    basis = _gb(ring, dicts)
    out = []
    for g in basis:
        if all(k[0] >= r for k in g):
            out.append(dict_to_vec(g, ring.base, s, offset=r))
    return FreeSubmodule(ring, s, out)


def syzygies_of(ring, rank, cols):
    """Syzygies of an explicit column list (zero columns allowed)."""
    cols = [tuple(c) for c in cols]
    nz = [i for i, c in enumerate(cols) if any(not ring.reduce(p).is_zero() for p in c)]
    out = []
    for i, c in enumerate(cols):
        if i not in nz:
            out.append(unit_vector(ring.base, len(cols), i))
    if nz:
        sub = FreeSubmodule(ring, rank, [cols[i] for i in nz])
        for v in syzygies(sub).columns:
            full = [ring.base.zero()] * len(cols)
            for i, p in zip(nz, v):
                full[i] = p
            out.append(tuple(full))
    return FreeSubmodule(ring, len(cols), out)


def module_kernel(ring, matrix):
    """Kernel of the map ring^n -> ring^m given by an m x n matrix (list of rows)."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    cols = [tuple(matrix[i][j] for i in range(m)) for j in range(n)]
    if m == 0:
        return FreeSubmodule(ring, n, [unit_vector(ring.base, n, k) for k in range(n)])
    return syzygies_of(ring, m, cols)


def preimage(ring, matrix, target):
    """{x in ring^n : matrix * x in target}, target a submodule of ring^m."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    if m == 0:
        return FreeSubmodule(ring, n, [unit_vector(ring.base, n, k) for k in range(n)])
    cols = [tuple(matrix[i][j] for i in range(m)) for j in range(n)]
    cols += [tuple(-p for p in c) for c in target.columns]
    syz = syzygies_of(ring, m, cols)
    return FreeSubmodule(ring, n, [c[:n] for c in syz.columns]).groebner()


def lift(vec, gens):
    """Coefficients a with sum a_i gens_i = vec, or None if vec is not in the span.

    ``gens`` is a FreeSubmodule; coefficients refer to ``gens.columns``.
    """
    ring, r = gens.ring, gens.rank
    cols = list(gens.columns)
    s = len(cols)
    if all(ring.reduce(p).is_zero() for p in vec):
        return tuple(ring.base.zero() for _ in range(s))
    dicts = []
    for i, c in enumerate(cols):
        d = vec_to_dict(c)
        d[(r + i,) + (0,) * ring.nvars] = mpq(1)
        dicts.append(d)
    dicts += _lifted_dicts(ring, r, [], 0)
    basis = _gb(ring, dicts)
    pairs = _basis_pairs(ring, basis)
    key = monomial_order(ring.order).key
    nf = gb.reduce(vec_to_dict(tuple(vec)), pairs, key)
    if any(k[0] < r for k in nf):
        return None
    coeffs = dict_to_vec(nf, ring.base, s, offset=r)
    return tuple(ring.reduce(-p) for p in coeffs)


def eliminate(i, k):
    """I intersected with QQ[x_{k+1}..x_n] (first k variables eliminated), via a block order."""
    ring = i.ring
    if ring.defining:
        raise ValueError("elimination is done over polynomial rings")
    big = ring.with_order(("block", k))
    basis = reduced_basis(big, [g.rehome(big) for g in i.gens])
    keep = [g for g in basis if all(not any(m[1 : k + 1]) for m in g.terms)]
    return Ideal(ring, [Poly(ring, g.terms) for g in keep])


def is_nonzerodivisor(f, ring):
    """True iff f is a nonzerodivisor on ``ring`` (i.e. (0 : f) = 0)."""
    return colon(Ideal(ring, []), Ideal(ring, [f])).is_zero()
