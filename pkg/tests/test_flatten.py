import copy
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from helpers import I, coker, monomial_matrices
from phiflat.blowup import rees_chart, strict_transform_module
from phiflat.cakernel import PolyRing, make_ring
from phiflat.depth import PresentedModule
from phiflat.errors import InputNotFlatOnU, NotADomain, Unresolved
from phiflat.flatten import (
    FlatteningProblem,
    fitting_ideal,
    flatten,
    generic_rank,
    is_flat_finite,
    verify_certificate,
)
from phiflat.phiring import is_admissible, make_phi_ring

R = PolyRing(("u", "v"))
T = PolyRing(("t",))


def fit_strs(M, i):
    return sorted(str(O.to_expr(g)) for g in fitting_ideal(M, i).groebner().gens if not g.is_zero())


def flagship():
    A = make_phi_ring(R, [I(R, "u", "v")])
    return FlatteningProblem(A, coker(R, [["v"], ["-u"]]))


# -- Fitting ideals ---------------------------------------------------------

def test_fitting_examples():
    M = coker(R, [["v"], ["-u"]])
    assert fit_strs(M, 0) == []
    assert fit_strs(M, 1) == ["u", "v"]
    assert fit_strs(M, 2) == ["1"]
    F = PresentedModule.free(R, 3)
    assert fit_strs(F, 2) == [] and fit_strs(F, 3) == ["1"]
    N = PresentedModule.free(T, 1).direct_sum(PresentedModule.quotient(I(T, "t")))
    assert fit_strs(N, 0) == [] and fit_strs(N, 1) == ["t"]


@settings(max_examples=20)
@given(monomial_matrices(max_gens=3, max_rels=3))
def test_fitting_matches_determinant_oracle(rows):
    M = coker(R, rows)
    for i in range(M.ngens + 1):
        assert fit_strs(M, i) == O.fitting_gb(M, i, R.names)
        if i:
            assert fitting_ideal(M, i - 1).is_subset(fitting_ideal(M, i))
    assert fitting_ideal(M, M.ngens).is_unit()


@settings(max_examples=15)
@given(monomial_matrices(max_gens=2, max_rels=2), st.sampled_from(["u", "v", "1", "u*v"]))
def test_fitting_is_presentation_independent(rows, extra):
    M = coker(R, rows)
    # add a redundant relation and a new generator killed by a unit relation
    redundant = [r + [R.parse(extra) * R.parse(r[0]) if r[0] != "0" else "0"] for r in rows]
    M2 = coker(R, redundant)
    z = "0"
    bigger = [r + [z] for r in rows] + [[z] * len(rows[0]) + ["1"]]
    M3 = coker(R, bigger)
    for i in range(M.ngens + 1):
        F = fitting_ideal(M, i)
        assert F.equals(fitting_ideal(M2, i))
        assert F.equals(fitting_ideal(M3, i))


def test_generic_rank_examples():
    assert generic_rank(coker(R, [["v"], ["-u"]])) == 1
    assert generic_rank(PresentedModule.free(R, 4)) == 4
    assert generic_rank(PresentedModule.quotient(I(T, "t"))) == 0
    Q = make_ring(R, [R.parse("u*v")])
    with pytest.raises(NotADomain):
        generic_rank(PresentedModule.free(Q, 1))


@settings(max_examples=20)
@given(monomial_matrices(max_gens=3, max_rels=3))
def test_generic_rank_matches_fraction_field_rank(rows):
    M = coker(R, rows)
    assert generic_rank(M) == M.ngens - O.fraction_rank(M, R.names)


def test_is_flat_finite_examples():
    v = is_flat_finite(coker(R, [["v"], ["-u"]]))
    assert not v and v.locus.equals(I(R, "u", "v"))
    assert is_flat_finite(PresentedModule.free(R, 2))
    ch = rees_chart(R, I(R, "u", "v"), 0)
    assert is_flat_finite(strict_transform_module(coker(R, [["v"], ["-u"]]), ch))


# -- the driver ---------------------------------------------------------------

def assert_sound(cert):
    for node in cert.nodes:
        if node.status == "flat":
            assert is_flat_finite(node.module)
        if node.center is not None:
            assert is_admissible(node.supports, node.center).admissible
            assert (node.supports.product ** node.center_exponent).is_subset(node.center)
        assert node.saturation_exponent >= 0


def test_flagship():
    prob = flagship()
    cert = flatten(prob)
    assert cert.verdict == "Success" and cert.rounds == 1
    (path, center, _), = cert.centers()
    assert path == () and center.equals(I(R, "u", "v"))
    leaves = cert.leaves()
    assert len(leaves) == 2
    for leaf in leaves:
        assert leaf.verdict.rank == 1 and leaf.verdict.fitt_prev_zero and leaf.verdict.fitt_r_unit
        assert leaf.module.ngens == 1 and not leaf.module.relations
    assert verify_certificate(cert, prob).valid
    assert_sound(cert)


def test_torsion_kill():
    A = make_phi_ring(T, [I(T, "t")])
    M = PresentedModule.free(T, 1).direct_sum(PresentedModule.quotient(I(T, "t")))
    prob = FlatteningProblem(A, M)
    cert = flatten(prob)
    assert cert.verdict == "Success" and cert.rounds == 1
    (leaf,) = cert.leaves()
    assert leaf.ring == T and leaf.module.ngens == 1 and not leaf.module.relations
    assert verify_certificate(cert, prob)


def test_not_flat_on_U():
    A = make_phi_ring(R, [I(R, "u")])
    with pytest.raises(InputNotFlatOnU) as e:
        flatten(FlatteningProblem(A, PresentedModule.quotient(I(R, "v"))))
    assert e.value.center.equals(I(R, "v"))
    assert str(e.value.witness) == "u"
    assert not O.radical_member(e.value.witness, [R.parse("v")], R.names)


def test_two_rounds():
    A = make_phi_ring(R, [I(R, "u", "v")])
    prob = FlatteningProblem(A, PresentedModule.from_ideal(I(R, "u^2", "v")))
    cert = flatten(prob)
    assert cert.verdict == "Success" and cert.rounds == 2
    assert verify_certificate(cert, prob)
    assert_sound(cert)


def test_already_flat():
    A = make_phi_ring(R, [I(R, "u", "v")])
    prob = FlatteningProblem(A, PresentedModule.free(R, 2))
    cert = flatten(prob)
    assert cert.rounds == 0 and cert.verdict == "Success"
    assert verify_certificate(cert, prob)


def test_unresolved_carries_partial_certificate():
    A = make_phi_ring(R, [I(R, "u", "v")])
    prob = FlatteningProblem(A, PresentedModule.from_ideal(I(R, "u^2", "v")), max_rounds=1)
    with pytest.raises(Unresolved) as e:
        flatten(prob)
    cert = e.value.certificate
    assert cert.verdict == "Unresolved" and cert.rounds == 1
    assert verify_certificate(cert, prob).valid


def test_tampered_certificates():
    prob = flagship()
    d = flatten(prob).to_dict()
    bad = copy.deepcopy(d)
    bad["nodes"][0]["center"] = ["u"]
    r = verify_certificate(bad, prob)
    assert not r.valid and "center" in r.divergence
    bad = copy.deepcopy(d)
    bad["nodes"][1]["module"]["relations"] = [["u"]]
    assert not verify_certificate(bad, prob).valid
    bad = copy.deepcopy(d)
    bad["nodes"][0]["center_exponent"] = 0
    assert not verify_certificate(bad, prob).valid
    bad = copy.deepcopy(d)
    bad["rounds"] = 2
    assert not verify_certificate(bad, prob).valid
    bad = copy.deepcopy(d)
    del bad["nodes"][2]
    assert not verify_certificate(bad, prob).valid


def test_threads_do_not_change_certificate():
    prob = FlatteningProblem(make_phi_ring(R, [I(R, "u", "v")]), PresentedModule.from_ideal(I(R, "u^2", "v")))
    a = json.dumps(flatten(prob, threads=1).to_dict(), sort_keys=True)
    b = json.dumps(flatten(prob, threads=4).to_dict(), sort_keys=True)
    assert a == b


def test_flat_stays_flat_under_extra_blowup():
    cert = flatten(flagship())
    for leaf in cert.leaves():
        ring = leaf.ring
        names = ring.base.names
        center = I(ring, *names)
        for i in range(len(names)):
            ch = rees_chart(ring, center, i)
            assert is_flat_finite(strict_transform_module(leaf.module, ch))


@settings(max_examples=8)
@given(st.lists(st.sampled_from(["u", "v", "u^2", "u*v", "v^2", "u^2*v"]), min_size=1, max_size=3, unique=True))
def test_monomial_ideals_flatten_soundly(gens):
    A = make_phi_ring(R, [I(R, "u", "v")])
    prob = FlatteningProblem(A, PresentedModule.from_ideal(I(R, *gens)), max_rounds=4)
    try:
        cert = flatten(prob)
    except Unresolved as e:
        cert = e.certificate
    assert_sound(cert)
    assert verify_certificate(cert, prob).valid
