"""Affine charts of blow-ups, strict transforms, and blow-up sequences.

Chart i of the blow-up of A along I = (f_1..f_r) is
``A[t_j : j != i] / ((f_j - t_j f_i) : f_i^inf)``.  Relations that solve
for a single variable linearly are used to drop that variable, so the
chart of (u, v) at u comes out as QQ[u, t] rather than QQ[u, v, t]/(v - tu).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .cakernel import Ideal, PolyRing, make_ring, saturate
from .depth import PresentedModule
from .errors import InadmissibleCenter, InputError, RingMismatch, ZeroGenerator
from .phiring import PhiRing, RingMap, induced_supports, is_admissible

_CHART_VAR = re.compile(r"^t(\d+)_\d+$")


def chart_var_name(stage, j):
    """Name of the chart variable f_j / f_i at a given stage (j is 1-based)."""
    return f"t{stage}_{j}"


def next_stage(ring):
    """One more than the largest stage already used in the variable names."""
    stages = [int(m.group(1)) for n in ring.base.names if (m := _CHART_VAR.match(n))]
    return max(stages, default=0) + 1


def _solvable(g, protected):
    """A variable x with g = c*x + h, h free of x, c constant; None otherwise."""
    ring = g.ring
    order = [i for i in range(ring.nvars) if ring.names[i] not in protected]
    order += [i for i in range(ring.nvars) if ring.names[i] in protected]
    for i in order:
        lin = [m for m in g.terms if m[i + 1]]
        if len(lin) == 1 and lin[0][i + 1] == 1 and sum(lin[0][1:]) == 1:
            return i
    return None


def _drop_linear_variables(base, gens, keep_last):
    """Eliminate variables solved linearly by a generator.

    Returns ``(new_base, new_gens, images)`` where ``images`` sends each
    variable of ``base`` to a polynomial of ``new_base``.  Variables in
    ``keep_last`` (the chart variables) are eliminated only as a last resort.
    """
    images = {n: base.var(n) for n in base.names}
    cur_base = base
    gens = [g for g in gens if not g.is_zero()]
    while True:
        gb = Ideal(cur_base, gens).groebner().gens if gens else ()
        hit = None
        for g in gb:
            i = _solvable(g, keep_last)
            if i is not None:
                hit = (g, i)
                break
        if hit is None or cur_base.nvars == 1:
            return cur_base, list(gb), images
        g, i = hit
        x = cur_base.names[i]
        mono = next(m for m in g.terms if m[i + 1])
        c = g.terms[mono]
        rest = g - cur_base.var(x).scale(c)
        value = rest.scale(-1 / c)
        new_base = PolyRing(tuple(n for n in cur_base.names if n != x), cur_base.order)
        subs = [value if n == x else cur_base.var(n) for n in cur_base.names]

        def push(p):
            return _restrict(p.substitute(subs, cur_base), new_base)

        gens = [push(h) for h in gb if h != g]
        gens = [h for h in gens if not h.is_zero()]
        images = {n: push(p) for n, p in images.items()}
        cur_base = new_base


def _restrict(p, ring):
    """Copy a polynomial into a ring with a subset of the variables."""
    from .cakernel import Poly

    idx = [p.ring.names.index(n) for n in ring.names]
    keep = set(idx)
    t = {}
    for m, c in p.terms.items():
        if any(m[k + 1] for k in range(p.ring.nvars) if k not in keep):
            raise ValueError("polynomial involves a dropped variable")
        t[(0,) + tuple(m[k + 1] for k in idx)] = c
    return Poly(ring, t)


@dataclass(frozen=True, eq=False)
class BlowUpChart:
    parent: object
    center: Ideal
    index: int
    ring: object
    structure: RingMap
    exceptional: object
    stage: int
    # chart variable name -> generator index j (0-based) it stands for, f_j / f_i
    chart_vars: dict = field(default_factory=dict)
    exponent: int = 0

    @property
    def generator(self):
        return self.center.gens[self.index]

    def is_empty(self):
        return getattr(self.ring, "is_zero_ring", lambda: False)()

    def canonical(self):
        return {
            "ring": str(self.ring),
            "index": self.index,
            "center": [str(g) for g in self.center.gens],
            "images": {n: str(p) for n, p in zip(self.parent.base.names, self.structure.images)},
            "exceptional": str(self.exceptional),
        }


def rees_chart(A, I, i, stage=None):
    """Chart of the blow-up of ``A`` along ``I`` where ``I`` becomes (f_i)."""
    if I.ring != A:
        raise RingMismatch("center is not an ideal of the ring")
    f = list(I.gens)
    if not 0 <= i < len(f):
        raise InputError(f"chart index {i} out of range for {len(f)} generators")
    if f[i].is_zero():
        raise ZeroGenerator(f"generator {i} of the center is zero")
    if stage is None:
        stage = next_stage(A)
    base = A.base
    new = {chart_var_name(stage, j + 1): j for j in range(len(f)) if j != i}
    clash = set(new) & set(base.names)
    if clash:
        raise InputError(f"chart variable names {sorted(clash)} collide with ring variables")
    ext = base.extend(sorted(new, key=new.get))
    fi = f[i].rehome(ext)
    rels = [g.rehome(ext) for g in A.defining]
    rels += [f[j].rehome(ext) - ext.var(n) * fi for n, j in new.items()]
    J, _ = saturate(Ideal(ext, rels), Ideal(ext, [fi]))
    small, gens, images = _drop_linear_variables(ext, list(J.gens), set(new))
    ring = make_ring(small, gens, is_domain=A.is_domain)
    structure = RingMap(A, ring, tuple(ring.reduce(images[n]) for n in base.names))
    chart_vars = {n: j for n, j in new.items() if n in small.names}
    exc = structure(f[i])
    return BlowUpChart(A, I, i, ring, structure, exc, stage, chart_vars)


def blowup_charts(A, I, stage=None):
    """Charts for every nonzero generator of the center, in generator order."""
    if stage is None:
        stage = next_stage(A)
    return [rees_chart(A, I, i, stage) for i, g in enumerate(I.gens) if not g.is_zero()]


def pullback_module(M, chart):
    rm = chart.structure
    cols = [tuple(rm(p) for p in c) for c in M.relations]
    return PresentedModule(chart.ring, M.ngens, tuple(cols))


def strict_transform_module(M, chart):
    """Pull back, then divide out sections killed by a power of the exceptional element."""
    if M.ring != chart.parent:
        raise RingMismatch("module is not over the chart's parent ring")
    pb = pullback_module(M, chart)
    sat, n = saturate(pb.submodule, Ideal(chart.ring, [chart.exceptional]))
    return PresentedModule(chart.ring, M.ngens, sat.columns)


def strict_transform_algebra(B, chart):
    """Strict transform of an algebra ``B`` = A[x..]/(J) along a chart.

    Returns ``(ring, map)`` with ``map`` the structure map from ``B``.
    """
    A = chart.parent
    extra = [n for n in B.base.names if n not in A.base.names]
    if any(n not in B.base.names for n in A.base.names):
        raise RingMismatch("algebra does not contain the variables of the chart's parent")
    clash = set(extra) & set(chart.ring.base.names)
    if clash:
        raise InputError(f"algebra variables {sorted(clash)} collide with chart variables")
    base = chart.ring.base.extend(extra)
    img = dict(zip(A.base.names, chart.structure.images))
    subs = [img[n].rehome(base) if n in img else base.var(n) for n in B.base.names]
    rels = [g.substitute(subs, base) for g in B.defining]
    rels += [g.rehome(base) for g in chart.ring.defining]
    exc = chart.exceptional.rehome(base)
    J, _ = saturate(Ideal(base, rels), Ideal(base, [exc]))
    ring = make_ring(base, list(J.gens), is_domain=False)
    return ring, RingMap(B, ring, tuple(ring.reduce(s) for s in subs))


@dataclass(frozen=True, eq=False)
class BlowUpSequence:
    """Blow-ups applied one after the other, each on a chart of the previous."""

    root: PhiRing
    steps: tuple = ()

    @property
    def current(self):
        """Phi-ring of the last chart, with supports induced from the root."""
        return self.steps[-1][1] if self.steps else self.root

    @property
    def charts(self):
        return [c for c, _ in self.steps]

    @property
    def exceptionals(self):
        return [c.exceptional for c, _ in self.steps]

    def total_map(self):
        rm = RingMap.identity(self.root.base)
        for c, _ in self.steps:
            rm = rm.compose(c.structure)
        return rm

    def __len__(self):
        return len(self.steps)


def compose(seq, center, i):
    """Blow up an admissible center on the current chart and move to chart i."""
    cur = seq.current
    adm = is_admissible(cur, center)
    if not adm.admissible:
        raise InadmissibleCenter(center, len(seq) + 1, adm.witness)
    chart = rees_chart(cur.base, center, i, stage=next_stage(cur.base))
    chart = BlowUpChart(
        chart.parent, chart.center, chart.index, chart.ring, chart.structure,
        chart.exceptional, chart.stage, chart.chart_vars, adm.exponent,
    )
    supports = induced_supports(chart.structure, cur, degenerate_ok=True)
    return BlowUpSequence(seq.root, seq.steps + ((chart, supports),))
