import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from helpers import I, coker, poly_strings
from phiflat.cakernel import PolyRing
from phiflat.depth import PresentedModule
from phiflat.errors import IncompleteTorsionTest, InputError, NotAdmissible, ZeroAdmissibleImage
from phiflat.philocal import (
    INF,
    PhiLocalModel,
    ValuationData,
    add_values,
    admissible_gen,
    flat_over_philocal,
    is_nonneg,
    push_avoids_admissible,
    push_transfers_containment,
    push_valuation,
    structure_check,
    sub_values,
    value,
)
from phiflat.phiring import is_admissible, make_phi_ring

R = PolyRing(("u", "v"))
T = PolyRing(("t",))
LEX2 = ValuationData(((1, 0), (0, 1)))

weights2 = st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=1, max_size=3)


def test_value_examples():
    W = ValuationData(((1, 2),))
    assert value(W, R.parse("u")) == (1,)
    assert value(W, R.parse("v + u^2")) == (2,)
    assert value(LEX2, R.parse("v")) == (0, 1)
    assert value(LEX2, R.parse("u")) == (1, 0)
    assert value(LEX2, R.parse("u")) > value(LEX2, R.parse("v"))
    assert value(W, R.zero()) is INF
    killed = ValuationData(((1, 2),), frozenset({0}))
    assert value(killed, R.parse("u + v")) == (2,)
    assert value(killed, R.parse("u*v")) is INF


def test_value_arithmetic():
    assert add_values((1, 2), (0, -1)) == (1, 1)
    assert add_values(INF, (1,)) is INF
    assert sub_values((1, 0), (0, 1)) == (1, -1)
    assert is_nonneg((0, 0)) and is_nonneg((1, -5)) and not is_nonneg((0, -1))
    assert INF > (10**9,) and not INF < (0,)


@given(weights2, poly_strings(("u", "v")), poly_strings(("u", "v")))
def test_value_is_a_valuation(W, a, b):
    V = ValuationData(tuple(map(tuple, W)))
    f, g = R.parse(a), R.parse(b)
    assert V.value(f) == O.poly_value(W, set(), f)
    if not (f * g).is_zero():
        assert V.value(f * g) == add_values(V.value(f), V.value(g))
    assert V.value(f + g) >= min(V.value(f), V.value(g))


def test_admissible_gen_examples():
    m1 = PhiLocalModel(T, ValuationData(((1,),)), split=1)
    assert admissible_gen(m1, [T.parse("t^2"), T.parse("t^3")]) == 0
    assert admissible_gen(m1, [T.parse("t^5"), T.parse("t^2 + t^3")]) == 1
    m2 = PhiLocalModel(R, LEX2, split=1)
    assert admissible_gen(m2, [R.parse("u"), R.parse("v")]) == 1
    # first coordinate coarse: u lies in m, v does not
    m22 = PhiLocalModel(R, LEX2, split=2)
    assert admissible_gen(m22, [R.parse("u"), R.parse("v")]) == 1
    with pytest.raises(NotAdmissible):
        admissible_gen(m22, [R.parse("u"), R.parse("u*v")])


def test_admissible_gen_rejects_outside_A():
    m = PhiLocalModel(R, ValuationData(((1, -1),)), split=1)
    with pytest.raises(InputError):
        admissible_gen(m, [R.parse("u"), R.parse("v")])


@settings(max_examples=30)
@given(st.lists(poly_strings(("u", "v"), max_terms=2), min_size=1, max_size=3), st.sampled_from([1, 2, 3]))
def test_admissible_gen_is_lexmin(gens, split):
    model = PhiLocalModel(R, LEX2, split=split)
    fs = [R.parse(g) for g in gens]
    fs = [f for f in fs if not f.is_zero() and model.in_A(f)]
    if not fs:
        return
    try:
        i = admissible_gen(model, fs)
    except NotAdmissible:
        assert model.in_m(min(fs, key=model.value))
        return
    vi = model.value(fs[i])
    assert vi == min(model.value(f) for f in fs)
    assert all(is_nonneg(sub_values(model.value(f), vi)) for f in fs)
    assert i == [model.value(f) for f in fs].index(vi)


def test_structure_check_examples():
    samples = [R.parse(s) for s in ("u", "v", "u+v")]
    for split in (1, 2, 3):
        assert structure_check(PhiLocalModel(R, LEX2, split), samples).ok
    m1 = PhiLocalModel(T, ValuationData(((1,),)), 1)
    assert structure_check(m1, [T.parse("t")]).ok
    model = PhiLocalModel(R, LEX2, 2)
    rep = structure_check(model, samples, pairs=[([R.parse("u*v"), R.parse("v^2")], R.parse("v"))])
    assert rep.ok and rep.checked.get("containment") == 1


def test_structure_check_rejects_samples_outside_A():
    with pytest.raises(InputError):
        structure_check(PhiLocalModel(R, ValuationData(((1, -1),)), 1), [R.parse("v")])


def test_push_examples():
    Av = make_phi_ring(R, [I(R, "v")])
    res = push_valuation(Av, LEX2)
    assert res.w0 == (0, 1) and res.split == 2
    assert res.prime.equals(I(R, "u"))
    assert res.residue.weights == ((0, 1),) and res.residue.infinite == {0}
    assert push_avoids_admissible(Av, LEX2, res)

    Au = make_phi_ring(R, [I(R, "u")])
    res = push_valuation(Au, LEX2)
    assert res.w0 == (1, 0) and res.split == 1
    assert res.prime.is_zero()
    assert res.residue.weights == LEX2.weights
    assert push_avoids_admissible(Au, LEX2, res)

    with pytest.raises(ZeroAdmissibleImage):
        push_valuation(Au, ValuationData(((1, 0), (0, 1)), frozenset({0})))


def test_push_requires_nonnegative_columns():
    A = make_phi_ring(R, [I(R, "u")])
    with pytest.raises(InputError):
        push_valuation(A, ValuationData(((1, -1),)))


@settings(max_examples=20)
@given(
    st.lists(st.lists(st.integers(0, 2), min_size=2, max_size=2), min_size=1, max_size=2),
    st.sampled_from([["u"], ["v"], ["u", "v"], ["u*v"], ["u + v"]]),
    st.lists(poly_strings(("u", "v"), max_terms=2, max_deg=2), min_size=1, max_size=2),
    poly_strings(("u", "v"), max_terms=2, max_deg=2),
)
def test_push_properties(W, support, Igens, g):
    S = ValuationData(tuple(map(tuple, W)))
    A = make_phi_ring(R, [I(R, *support)])
    try:
        res = push_valuation(A, S)
    except ZeroAdmissibleImage:
        return
    assert push_avoids_admissible(A, S, res)
    for p in A.product.gens:
        v = S.value(p)
        assert v is INF or not any(v[: res.split - 1]) or v > res.w0
    fs = [R.parse(x) for x in Igens]
    gg = R.parse(g)
    d = push_transfers_containment(A, S, res, fs, gg)
    admissible = is_admissible(A, I(R, *Igens, g)).admissible
    assert (d is None) == (not admissible)
    if d is not None:
        assert d


# -- flatness over a model --------------------------------------------------

def _t_model():
    return PhiLocalModel(T, ValuationData(((1,),)), 1)


def test_flat_examples():
    m = _t_model()
    t = [T.parse("t")]
    M = PresentedModule.free(T, 1).direct_sum(PresentedModule.quotient(I(T, "t")))
    v = flat_over_philocal(m, M, t)
    assert not v.flat and v.reason == "torsion"
    assert flat_over_philocal(m, PresentedModule.free(T, 2), t).flat
    assert flat_over_philocal(m, PresentedModule.from_ideal(I(T, "t")), t).flat


def test_flat_direct_sum_stability():
    m = _t_model()
    t = [T.parse("t")]
    for M in (PresentedModule.free(T, 1), PresentedModule.from_ideal(I(T, "t^2", "t^3")), coker(T, [["1+t"], ["t"]])):
        if flat_over_philocal(m, M, t).flat:
            assert flat_over_philocal(m, M.direct_sum(PresentedModule.free(T, 1)), t).flat


def test_flat_warns_when_generators_miss_torsion():
    m = _t_model()
    M = PresentedModule.quotient(I(T, "t^2"))
    with pytest.warns(IncompleteTorsionTest):
        v = flat_over_philocal(m, M, [])
    assert not v.flat and v.torsion_complete


def test_flat_split_two_without_generators_warns():
    m = PhiLocalModel(R, LEX2, 2)
    with pytest.warns(IncompleteTorsionTest):
        v = flat_over_philocal(m, PresentedModule.free(R, 1), [])
    assert v.flat and not v.torsion_complete


def test_flat_not_free_over_closure():
    # A/(u) has no v-torsion, but B is the localization at (u) where it is not free
    m = PhiLocalModel(R, LEX2, 2)
    v = flat_over_philocal(m, PresentedModule.quotient(I(R, "u")), [R.parse("v")])
    assert not v.flat and v.reason == "not free over the closure"
