import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from helpers import I, coker, monomial_strings
from phiflat.blowup import (
    BlowUpSequence,
    blowup_charts,
    chart_var_name,
    compose,
    next_stage,
    rees_chart,
    strict_transform_algebra,
    strict_transform_module,
)
from phiflat.cakernel import Ideal, PolyRing, colon, is_nonzerodivisor, make_ring
from phiflat.depth import PresentedModule, purify
from phiflat.errors import InadmissibleCenter, InputError, ZeroGenerator
from phiflat.phiring import make_phi_ring

R = PolyRing(("u", "v"))


def free_rank(M):
    P = M.pruned()
    return P.ngens if not P.relations else None


def check_chart(ch):
    """center * chart ring = (exceptional), exceptional a nonzerodivisor."""
    J = ch.structure.map_ideal(ch.center)
    E = Ideal(ch.ring, [ch.exceptional])
    assert J.equals(E)
    assert is_nonzerodivisor(ch.exceptional, ch.ring)


def test_names():
    assert chart_var_name(1, 2) == "t1_2"
    assert next_stage(R) == 1
    assert next_stage(PolyRing(("u", "t1_2", "t3_1"))) == 4


def test_chart_of_origin():
    ch = rees_chart(R, I(R, "u", "v"), 0)
    assert ch.ring.names == ("u", "t1_2")
    assert [str(p) for p in ch.structure.images] == ["u", "u*t1_2"]
    assert str(ch.exceptional) == "u"
    check_chart(ch)
    # oracle: (v - t u) : u^inf = (v - t u) in QQ[u, v, t]
    E = PolyRing(("u", "v", "t"))
    assert O.saturation([E.parse("v - t*u")], E.parse("u"), E.names) == O.gb([E.parse("v - t*u")], E.names)
    ch = rees_chart(R, I(R, "u", "v"), 1)
    assert ch.ring.names == ("v", "t1_1")
    check_chart(ch)


def test_principal_center_is_trivial():
    ch = rees_chart(R, I(R, "u"), 0)
    assert ch.ring == R
    check_chart(ch)


def test_three_variables():
    S = PolyRing(("u", "v", "w"))
    ch = rees_chart(S, I(S, "u", "v", "w"), 0)
    assert ch.ring.names == ("u", "t1_2", "t1_3")
    assert [str(p) for p in ch.structure.images] == ["u", "u*t1_2", "u*t1_3"]
    check_chart(ch)


def test_chart_errors():
    with pytest.raises(ZeroGenerator):
        rees_chart(R, Ideal(R, [R.zero(), R.parse("u")]), 0)
    with pytest.raises(InputError):
        rees_chart(R, I(R, "u", "v"), 2)
    clash = PolyRing(("u", "t1_2"))
    with pytest.raises(InputError):
        rees_chart(clash, I(clash, "u", "t1_2"), 0, stage=1)


def test_quadric_cone_chart():
    base = PolyRing(("x", "y", "z"))
    A = make_ring(base, [base.parse("x*y - z^2")], is_domain=True)
    for ch in blowup_charts(A, I(A, "x", "y", "z")):
        check_chart(ch)


@settings(max_examples=20)
@given(st.lists(monomial_strings(("u", "v"), 3), min_size=1, max_size=3), st.data())
def test_chart_invariants_random_monomial_centers(gens, data):
    J = I(R, *gens)
    i = data.draw(st.integers(0, len(gens) - 1))
    check_chart(rees_chart(R, J, i))


def test_strict_transform_examples():
    M = coker(R, [["v"], ["-u"]])
    ch = rees_chart(R, I(R, "u", "v"), 0)
    st_ = strict_transform_module(M, ch)
    assert free_rank(st_) == 1
    assert free_rank(strict_transform_module(PresentedModule.free(R, 2), ch)) == 2
    Q = strict_transform_module(PresentedModule.quotient(I(R, "u")), ch)
    assert Q.is_zero()


@settings(max_examples=15)
@given(st.lists(st.lists(st.one_of(st.just("0"), monomial_strings(("u", "v"), 2)), min_size=1, max_size=2), min_size=1, max_size=2), st.integers(0, 1))
def test_strict_transform_has_no_exceptional_torsion(rows, i):
    width = min(len(r) for r in rows)
    rows = [r[:width] for r in rows]
    M = coker(R, rows)
    ch = rees_chart(R, I(R, "u", "v"), i)
    S = strict_transform_module(M, ch)
    N = S.submodule
    assert colon(N, Ideal(ch.ring, [ch.exceptional])).is_subset(N)
    # it is the purification of the pullback for the exceptional supports
    from phiflat.blowup import pullback_module

    E = make_phi_ring(ch.ring, [Ideal(ch.ring, [ch.exceptional])])
    assert purify(pullback_module(M, ch), E).same_presentation(S)


def test_strict_transform_algebra_examples():
    ch = rees_chart(R, I(R, "u", "v"), 0)
    ring, _ = strict_transform_algebra(R, ch)
    assert ring.base == ch.ring.base and not ring.defining
    ext = R.extend(["x"])
    B = make_ring(ext, [ext.parse("u*x - v")])
    ring, rm = strict_transform_algebra(B, ch)
    assert [str(g) for g in Ideal(ring.base, ring.defining).groebner().gens] == ["t1_2 - x"]
    B2 = make_ring(ext, [ext.parse("x^2")])
    ring, _ = strict_transform_algebra(B2, ch)
    assert [str(g) for g in ring.defining] == ["x^2"]


def test_compose():
    A = make_phi_ring(R, [I(R, "u", "v")])
    seq = compose(BlowUpSequence(A), I(R, "u", "v"), 0)
    assert len(seq) == 1
    cur = seq.current
    assert cur.product.equals(Ideal(cur.base, [cur.base.parse("u")]))
    seq2 = compose(seq, Ideal(cur.base, [cur.base.parse("u")]), 0)
    assert len(seq2) == 2 and seq2.current.base == cur.base
    with pytest.raises(InadmissibleCenter) as e:
        compose(seq, Ideal(cur.base, [cur.base.parse("t1_2 - 1")]), 0)
    assert e.value.stage == 2
    tm = seq2.total_map()
    assert [str(p) for p in tm.images] == ["u", "u*t1_2"]
