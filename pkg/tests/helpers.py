"""Small constructors and hypothesis strategies shared by the tests."""
from hypothesis import strategies as st

from phiflat.cakernel import Ideal
from phiflat.depth import PresentedModule


def I(ring, *gens):
    return Ideal(ring, [ring.parse(g) if isinstance(g, str) else g for g in gens])


def coker(ring, rows):
    return PresentedModule.from_matrix(ring, [[ring.parse(x) if isinstance(x, str) else x for x in r] for r in rows])


# -- strategies ---------------------------------------------------------------

def monomial_strings(names, max_deg=3):
    """Nonconstant monomials of degree at most max_deg."""
    picks = st.lists(st.integers(0, len(names) - 1), min_size=1, max_size=max_deg)

    def render(ix):
        e = [ix.count(k) for k in range(len(names))]
        return "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(names, e) if k)

    return picks.map(render)


def poly_strings(names, max_terms=3, max_deg=3, coeffs=(-3, 3)):
    term = st.tuples(st.integers(*coeffs).filter(lambda c: c != 0), monomial_strings(names, max_deg) | st.just("1"))
    return st.lists(term, min_size=1, max_size=max_terms).map(
        lambda ts: " + ".join(f"({c})*{m}" for c, m in ts)
    )


def binomial_strings(names, max_deg=3):
    return st.tuples(monomial_strings(names, max_deg), monomial_strings(names, max_deg), st.sampled_from(["+", "-"])).map(
        lambda t: f"{t[0]} {t[2]} {t[1]}" if t[0] != t[1] else t[0]
    )


def monomial_matrices(names=("u", "v"), max_gens=2, max_rels=3, max_deg=2):
    """Presentation matrices (rows = generators) with monomial or zero entries."""
    entry = st.one_of(st.just("0"), monomial_strings(names, max_deg))

    def build(shape):
        g, s = shape
        return st.lists(st.lists(entry, min_size=s, max_size=s), min_size=g, max_size=g)

    return st.tuples(st.integers(1, max_gens), st.integers(1, max_rels)).flatmap(build)
