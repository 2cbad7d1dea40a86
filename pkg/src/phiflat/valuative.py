"""Valuative points as monomial valuations, basic opens, and chart selection.

A point is a monomial valuation on a polynomial base ring with nonnegative
weights.  Following a point through blow-ups keeps every chart variable as a
fraction num/den of base polynomials, so values on chart rings (which may be
quotients) are computed in the fraction field of the base.
"""
from __future__ import annotations

from dataclasses import dataclass

from .cakernel import Ideal, PolyRing
from .errors import InfiniteValue, InputError, RingMismatch
from .philocal import INF, ValuationData, is_nonneg, sub_values


@dataclass(frozen=True)
class ValuativePoint:
    ring: PolyRing
    valuation: ValuationData

    def __post_init__(self):
        if not isinstance(self.ring, PolyRing):
            raise InputError("valuative points are defined over polynomial rings only")
        if self.ring.nvars != self.valuation.nvars:
            raise RingMismatch("valuation and ring have different variable counts")
        for i in range(self.ring.nvars):
            col = self.valuation.column(i)
            if col is not INF and any(x < 0 for x in col):
                raise InputError(f"variable {self.ring.names[i]} has a negative weight")

    def value(self, f):
        return self.valuation.value(f)

    def ideal_value(self, I):
        gens = I.gens if isinstance(I, Ideal) else I
        return self.valuation.ideal_value(gens)


@dataclass(frozen=True)
class BasicOpen:
    """U(g^-1 I): points where every generator of I has value at least v(g)."""

    gens: tuple
    g: object

    @classmethod
    def make(cls, A, I, g):
        """Checked constructor: (I, g) must be admissible in the Phi-ring A."""
        from .phiring import is_admissible

        gens = tuple(I.gens if isinstance(I, Ideal) else I)
        if not is_admissible(A, Ideal(A.base, list(gens) + [g])).admissible:
            raise InputError("(I, g) is not admissible")
        return cls(gens, g)


def point_is_admissible(pt, A):
    """The support product has finite value at the point."""
    if A.base != pt.ring:
        raise RingMismatch("point and Phi-ring over different rings")
    return pt.ideal_value(A.product) is not INF


def in_basic_open(pt, bo):
    v = pt.ideal_value(list(bo.gens))
    return v >= pt.value(bo.g)


def select_chart(pt, I):
    """Smallest index of a generator attaining the minimal value."""
    gens = list(I.gens if isinstance(I, Ideal) else I)
    return _min_index([pt.value(f) for f in gens])


def _min_index(vals):
    if not vals:
        raise InfiniteValue("empty center")
    best = min(vals)
    if best is INF:
        raise InfiniteValue("every generator of the center has infinite value")
    return vals.index(best)


# ---------------------------------------------------------------------------
# tracing through blow-ups
# ---------------------------------------------------------------------------

def _frac_eval(f, fracs, root):
    """f(x_k = num_k / den_k) as a fraction (num, den) of root polynomials."""
    n = f.ring.nvars
    degs = [max((m[k + 1] for m in f.terms), default=0) for k in range(n)]
    den = root.one()
    for (_, d), e in zip(fracs, degs):
        if e:
            den = den * d ** e
    num = root.zero()
    for m, c in f.terms.items():
        term = root.const(c)
        for k in range(n):
            e = m[k + 1]
            nk, dk = fracs[k]
            if e:
                term = term * nk ** e
            if degs[k] - e:
                term = term * dk ** (degs[k] - e)
        num = num + term
    return num, den


def frac_value(pt, frac):
    num, den = frac
    vn = pt.value(num)
    if vn is INF:
        return INF
    vd = pt.value(den)
    if vd is INF:
        raise InfiniteValue("denominator vanishes at the point")
    return sub_values(vn, vd)


@dataclass(frozen=True)
class TraceStep:
    chart_index: int
    ring: object
    # chart variable name -> value at the point
    weights: dict
    center_value: tuple


def trace_through_blowups(pt, centers):
    """Follow a point through successive blow-ups.

    ``centers[k]`` is either an Ideal of the previous chart ring or a list of
    generator strings parsed there.  Chart rings are built by ``rees_chart``.
    """
    from .blowup import rees_chart

    root = pt.ring
    ring = root
    fracs = [(root.var(n), root.one()) for n in root.names]
    out = []
    for center in centers:
        I = center if isinstance(center, Ideal) else Ideal(ring, [ring.parse(s) if isinstance(s, str) else s for s in center])
        if I.ring != ring:
            raise RingMismatch("center is not an ideal of the current chart ring")
        gens = list(I.gens)
        gfr = [_frac_eval(f, fracs, root) for f in gens]
        vals = [frac_value(pt, fr) for fr in gfr]
        i = _min_index(vals)
        chart = rees_chart(ring, I, i)
        # fractions for the chart ring's variables
        new_fracs = []
        cur_names = ring.base.names
        for n in chart.ring.base.names:
            if n in cur_names:
                new_fracs.append(fracs[cur_names.index(n)])
            else:
                j = chart.chart_vars[n]
                (a, b), (c, d) = gfr[j], gfr[i]
                new_fracs.append((a * d, b * c))
        fracs = new_fracs
        ring = chart.ring
        weights = {n: frac_value(pt, fr) for n, fr in zip(ring.base.names, fracs)}
        out.append(TraceStep(i, ring, weights, vals[i]))
    return out


def trace_is_consistent(pt, trace):
    """Chart variables have nonnegative value at every stage."""
    return all(is_nonneg(v) for step in trace for v in step.weights.values())
