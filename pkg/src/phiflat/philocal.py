"""Phi-local models: a local ring plus a valuation ring of its residue field.

Valuations are monomial: a k x n integer weight matrix sends a monomial to
a vector of Z^k, compared lexicographically, and a polynomial to the minimum
over its monomials.  Variables listed in ``infinite`` are sent to zero and
their monomials are ignored.  Values are additive: ``|f| <= |g|`` is
``value(f) >= value(g)``, with ``INF`` the value of zero.

A model with split index j reads the first j-1 coordinates as the coarse
valuation whose ring is the closure B, and the remaining coordinates as the
valuation R on the residue field of B.  A is the preimage of R, i.e. the
elements of nonnegative value; m is the set of elements whose coarse value is
positive.
"""
from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .cakernel import FreeSubmodule, Ideal, PolyRing, saturate, syzygies_of
from .errors import (
    IncompleteTorsionTest,
    InputError,
    NotAdmissible,
    RingMismatch,
    ZeroAdmissibleImage,
)


@functools.total_ordering
class _Infinity:
    def __eq__(self, other):
        return isinstance(other, _Infinity)

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return not isinstance(other, _Infinity)

    def __hash__(self):
        return hash("inf")

    def __repr__(self):
        return "INF"


INF = _Infinity()


def add_values(a, b):
    if a is INF or b is INF:
        return INF
    return tuple(x + y for x, y in zip(a, b))


def sub_values(a, b):
    """a - b for finite b."""
    if a is INF:
        return INF
    return tuple(x - y for x, y in zip(a, b))


def is_positive(vec):
    """Lexicographically > 0."""
    for x in vec:
        if x:
            return x > 0
    return False


def is_nonneg(vec):
    return vec is INF or not is_positive(tuple(-x for x in vec))


@dataclass(frozen=True)
class ValuationData:
    weights: tuple
    infinite: frozenset = frozenset()
    nvars_hint: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        w = tuple(tuple(int(x) for x in row) for row in self.weights)
        n = len(w[0]) if w else self.nvars_hint
        if n is None:
            raise InputError("a rank-0 valuation needs an explicit variable count")
        if any(len(row) != n for row in w):
            raise InputError("weight matrix rows have different lengths")
        inf = frozenset(int(i) for i in self.infinite)
        if any(i < 0 or i >= n for i in inf):
            raise InputError("infinite-variable index out of range")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "infinite", inf)
        object.__setattr__(self, "nvars_hint", n)

    @property
    def rank(self):
        return len(self.weights)

    @property
    def nvars(self):
        return self.nvars_hint

    def column(self, i):
        if i in self.infinite:
            return INF
        return tuple(row[i] for row in self.weights)

    def monomial_value(self, exps):
        if any(exps[i] for i in self.infinite):
            return INF
        return tuple(sum(r * e for r, e in zip(row, exps)) for row in self.weights)

    def value(self, f):
        if f.ring.nvars != self.nvars:
            raise RingMismatch(f"valuation on {self.nvars} variables applied in {f.ring}")
        best = INF
        for m in f.terms:
            v = self.monomial_value(m[1:])
            if v < best:
                best = v
        return best

    def ideal_value(self, gens):
        return min((self.value(g) for g in gens), default=INF)

    def rows(self, start, stop=None):
        """Valuation given by a band of rows (0-based, half open)."""
        return ValuationData(self.weights[start:stop], self.infinite, self.nvars)

    def canonical(self):
        return {
            "weights": [list(r) for r in self.weights],
            "infinite": sorted(self.infinite),
        }


def value(V, f):
    return V.value(f)


@dataclass(frozen=True)
class PhiLocalModel:
    ring: PolyRing
    valuation: ValuationData
    split: int = 1

    def __post_init__(self):
        if not isinstance(self.ring, PolyRing):
            raise InputError("Phi-local models live over a polynomial ring")
        if self.ring.nvars != self.valuation.nvars:
            raise RingMismatch("valuation and ring have different variable counts")
        if not 1 <= self.split <= self.valuation.rank + 1:
            raise InputError(f"split index must lie in 1..{self.valuation.rank + 1}")

    def value(self, f):
        return self.valuation.value(f)

    def coarse(self, val):
        return INF if val is INF else val[: self.split - 1]

    def fine(self, val):
        return INF if val is INF else val[self.split - 1:]

    def in_A(self, f):
        return is_nonneg(self.value(f))

    def in_m(self, f):
        v = self.value(f)
        return v is INF or is_positive(self.coarse(v))

    def is_admissible_element(self, f):
        return self.in_A(f) and not self.in_m(f)

    def is_unit_in_closure(self, f):
        """f is invertible in B: coarse values of f and 1/f are both >= 0."""
        v = self.value(f)
        if v is INF:
            return False
        c = self.coarse(v)
        return is_nonneg(c) and is_nonneg(tuple(-x for x in c))

    def residue_valuation(self):
        """Valuation R on the residue field: fine rows, coarse-prime variables killed."""
        dead = set(self.valuation.infinite)
        for i in range(self.ring.nvars):
            col = self.valuation.column(i)
            if col is not INF and any(self.coarse(col)):
                dead.add(i)
        return ValuationData(self.valuation.weights[self.split - 1:], frozenset(dead), self.ring.nvars)

    def _prime(self, coords):
        gens = []
        for i, name in enumerate(self.ring.names):
            col = self.valuation.column(i)
            if col is INF or is_positive(coords(col)):
                gens.append(self.ring.var(name))
        return Ideal(self.ring, gens)

    def center(self):
        """Prime of the polynomial ring where the valuation is positive."""
        return self._prime(lambda c: c)

    def coarse_prime(self):
        """Prime of the polynomial ring where the coarse valuation is positive."""
        return self._prime(self.coarse)


def admissible_gen(model, gens):
    """Index of a generator that generates the ideal in the model."""
    gens = list(gens)
    if not gens:
        raise NotAdmissible("empty generator list")
    vals = [model.value(g) for g in gens]
    for g, v in zip(gens, vals):
        if not is_nonneg(v):
            raise InputError(f"{g} is not in the valuation ring of the model")
    i = min(range(len(gens)), key=lambda k: vals[k])
    if vals[i] is INF or model.in_m(gens[i]):
        raise NotAdmissible(f"no generator of ({', '.join(map(str, gens))}) lies outside m")
    return i


@dataclass
class StructureReport:
    checked: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def _tick(self, item):
        self.checked[item] = self.checked.get(item, 0) + 1


def _ideal_admissible(model, gens):
    try:
        admissible_gen(model, gens)
    except NotAdmissible:
        return False
    return True


def _residue_contains(model, R, I, g):
    """I (A/m) inside g (A/m), computed with the residue valuation."""
    if model.in_m(g):
        return all(model.in_m(f) for f in I)
    vg = R.value(g)
    return all(model.in_m(f) or R.value(f) >= vg for f in I)


def structure_check(model, samples, pairs=None):
    """Compare admissibility and containment in the model against the residue valuation, on samples.

    ``pairs`` is an optional list of ``(I_gens, g)``; by default every
    ordered pair of samples and every (two samples, sample) triple is used.
    """
    samples = list(samples)
    for a in samples:
        if not model.in_A(a):
            raise InputError(f"sample {a} is not in the valuation ring of the model")
    rep = StructureReport()
    R = model.residue_valuation()

    for a in samples:
        rep._tick("principal")
        if _ideal_admissible(model, [a]) != model.is_unit_in_closure(a):
            rep.violations.append(("principal", str(a)))

    units = [a for a in samples if not model.in_m(a)]
    for a in units:
        for s in units:
            rep._tick("residue")
            divides = is_nonneg(sub_values(model.value(a), model.value(s)))
            residue = R.value(a) >= R.value(s)
            rev = is_nonneg(sub_values(model.value(s), model.value(a)))
            if divides != residue or not (divides or rev):
                rep.violations.append(("residue", str(a), str(s)))

    if pairs is None:
        pairs = [([a], g) for a in samples for g in samples]
        pairs += [([a, b], g) for i, a in enumerate(samples) for b in samples[i + 1:] for g in samples]
    for I, g in pairs:
        I = list(I)
        if not _ideal_admissible(model, I + [g]):
            continue
        rep._tick("containment")
        lhs = _residue_contains(model, R, I, g)
        vg = model.value(g)
        rhs = all(is_nonneg(sub_values(model.value(f), vg)) for f in I) if vg is not INF else all(
            model.value(f) is INF for f in I
        )
        if lhs != rhs:
            rep.violations.append(("containment", [str(f) for f in I], str(g)))
    return rep


@dataclass(frozen=True)
class PushResult:
    """Coarsening prime ``p`` and residue valuation ``R`` from pushing S."""

    prime: Ideal
    residue: ValuationData
    split: int
    w0: tuple

    def as_model(self, ring, S):
        return PhiLocalModel(ring, S, self.split)


def push_valuation(A, S):
    """Prime and residue valuation induced by a valuation S on a Phi-ring A."""
    ring = A.base
    base = ring.base
    if base.nvars != S.nvars:
        raise RingMismatch("valuation and ring have different variable counts")
    for i in range(S.nvars):
        col = S.column(i)
        if col is not INF and not is_nonneg(col):
            raise InputError(f"variable {base.names[i]} has negative value; the map does not land in S")
    for g in ring.defining:
        if S.value(g) is not INF:
            raise InputError(f"defining relation {g} does not vanish under the valuation")
    w0 = S.ideal_value(A.product.gens)
    if w0 is INF:
        raise ZeroAdmissibleImage("the support product has infinite value")
    j = next((i + 1 for i, x in enumerate(w0) if x), S.rank + 1)
    dead = set(S.infinite)
    for i in range(S.nvars):
        col = S.column(i)
        if col is not INF and any(col[: j - 1]):
            dead.add(i)
    p = Ideal(ring, [base.var(base.names[i]) for i in sorted(dead)])
    R = ValuationData(S.weights[j - 1:], frozenset(dead), S.nvars)
    return PushResult(p, R, j, w0)


def push_avoids_admissible(A, S, res):
    """No admissible ideal lies in p: P is not inside p and v(P) has zero coarse part."""
    coarse = res.w0[: res.split - 1]
    return not any(coarse) and not A.product.is_subset(res.prime)


def push_transfers_containment(A, S, res, I, g):
    """IR inside gR iff IS inside gS; None when (I, g) is not admissible."""
    from .phiring import is_admissible

    ring = A.base
    if not is_admissible(A, Ideal(ring, list(I) + [g])).admissible:
        return None
    vS = S.value(g)
    in_S = all(S.value(f) >= vS for f in I)
    vR = res.residue.value(g)
    in_R = all(res.residue.value(f) >= vR for f in I)
    return in_S == in_R


# ---------------------------------------------------------------------------
# flatness over a Phi-local model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlatVerdict:
    flat: bool
    reason: Optional[str] = None
    witness: object = None
    torsion_complete: bool = False

    def __bool__(self):
        return self.flat


def _annihilator(M, vec):
    """{a : a vec in N} as an ideal."""
    syz = syzygies_of(M.ring, M.ngens, [tuple(vec)] + list(M.relations))
    return Ideal(M.ring, [c[0] for c in syz.columns])


def _local_torsion(M, sat, center):
    """A vector of sat that stays nonzero in M localized at ``center``."""
    N = M.submodule
    for t in sat.columns:
        if N.contains(t):
            continue
        if _annihilator(M, t).is_subset(center):
            return t
    return None


def flat_over_philocal(model, M, s_gen):
    """Flat iff M is torsion free for the admissible elements and M (x) B is free.

    Torsion is tested with the supplied generators of the multiplicative set;
    for split 1 (B the fraction field) a complete test through the generic
    Fitting ideal is run as well.
    """
    from .flatten import fitting_ideal, generic_rank

    if M.ring != model.ring:
        raise RingMismatch("module is not over the model's ring")
    if M.ngens == 0:
        return FlatVerdict(True, torsion_complete=True)
    center = model.center()
    s_gen = list(s_gen)
    for s in s_gen:
        if not model.is_admissible_element(s):
            raise InputError(f"{s} does not generate an admissible ideal of the model")
    witness = None
    for s in s_gen:
        sat, _ = saturate(M.submodule, Ideal(M.ring, [s]))
        t = _local_torsion(M, sat, center)
        if t is not None:
            witness = (str(s), [str(p) for p in t])
            break
    r = generic_rank(M)
    complete = model.split == 1
    if complete:
        fitt = fitting_ideal(M, r)
        d = next(g for g in fitt.gens if not g.is_zero())
        sat, _ = saturate(M.submodule, Ideal(M.ring, [d]))
        t = _local_torsion(M, sat, center)
        if (t is None) != (witness is None):
            warnings.warn(
                "the supplied generators missed torsion found by the generic-rank test",
                IncompleteTorsionTest,
                stacklevel=2,
            )
        if t is not None and witness is None:
            witness = (str(d), [str(p) for p in t])
    elif not s_gen:
        warnings.warn("no multiplicative generators given; torsion not tested", IncompleteTorsionTest, stacklevel=2)
    if witness is not None:
        return FlatVerdict(False, "torsion", witness, complete)
    fitt = fitting_ideal(M, r)
    if fitt.is_subset(model.coarse_prime()):
        return FlatVerdict(False, "not free over the closure", [str(g) for g in fitt.gens], complete)
    return FlatVerdict(True, None, None, complete)
