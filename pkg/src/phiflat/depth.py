"""Depth with respect to constructible supports.

A module is given by a presentation ``F / N`` with ``F = ring^g`` and ``N``
generated by the relation columns.  Torsion, purification, Hom(I, M) and the
closure (ideal transform) are all computed on the level of submodules of
free modules.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cakernel import (
    FreeSubmodule,
    Ideal,
    Poly,
    colon,
    lift,
    preimage,
    saturate,
    syzygies_of,
    unit_vector,
)
from .errors import NoRegularElement, NotStabilized, RingMismatch, ZeroSupport

DEFAULT_MAX_STEPS = 32


@dataclass(frozen=True, eq=False)
class PresentedModule:
    """Cokernel of a g x s matrix; ``relations`` holds the s columns."""

    ring: object
    ngens: int
    relations: tuple = ()

    def __post_init__(self):
        cols = []
        for c in self.relations:
            c = tuple(self.ring.base(p) if not isinstance(p, Poly) else p for p in c)
            if len(c) != self.ngens:
                raise ValueError(f"relation of length {len(c)} for {self.ngens} generators")
            c = tuple(self.ring.reduce(p) for p in c)
            if any(not p.is_zero() for p in c):
                cols.append(c)
        object.__setattr__(self, "relations", tuple(cols))

    # -- constructors -----------------------------------------------------
    @classmethod
    def free(cls, ring, n):
        return cls(ring, n, ())

    @classmethod
    def quotient(cls, I):
        """ring / I as a cyclic module."""
        return cls(I.ring, 1, tuple((g,) for g in I.gens))

    @classmethod
    def from_ideal(cls, I):
        """I as a module, generated by its generators, relations = syzygies."""
        gens = list(I.gens)
        syz = syzygies_of(I.ring, 1, [(g,) for g in gens])
        return cls(I.ring, len(gens), syz.columns)

    @classmethod
    def from_submodule(cls, N):
        return cls(N.ring, N.rank, N.columns)

    @classmethod
    def from_matrix(cls, ring, rows):
        """Rows are generators, columns are relations."""
        g = len(rows)
        s = len(rows[0]) if g else 0
        if any(len(r) != s for r in rows):
            raise ValueError("ragged presentation matrix")
        return cls(ring, g, tuple(tuple(rows[i][j] for i in range(g)) for j in range(s)))

    def direct_sum(self, other):
        if self.ring != other.ring:
            raise RingMismatch("direct sum of modules over different rings")
        z = self.ring.base.zero()
        cols = [c + (z,) * other.ngens for c in self.relations]
        cols += [(z,) * self.ngens + c for c in other.relations]
        return PresentedModule(self.ring, self.ngens + other.ngens, tuple(cols))

    # -- views ------------------------------------------------------------
    @property
    def submodule(self):
        return FreeSubmodule(self.ring, self.ngens, self.relations)

    def matrix(self):
        """g x s matrix, rows = generators."""
        return [[c[i] for c in self.relations] for i in range(self.ngens)]

    def is_zero(self):
        return self.submodule.is_full()

    def same_presentation(self, other):
        """Same free module and same relation submodule."""
        return (
            self.ring == other.ring
            and self.ngens == other.ngens
            and self.submodule.equals(other.submodule)
        )

    def canonical(self):
        return {
            "ring": str(self.ring),
            "generators": self.ngens,
            "relations": self.submodule.canonical(),
        }

    def prune(self):
        """Drop generators that a unit-entry relation expresses via the others.

        Returns ``(pruned, images)`` where ``images[k]`` is the vector of the
        old generator k in the pruned module's generators.
        """
        ring = self.ring
        base = ring.base
        cols = [list(c) for c in self.submodule.groebner().columns]
        alive = list(range(self.ngens))
        # images of old generators in terms of current ones (index into alive)
        images = {k: {k: base.one()} for k in range(self.ngens)}
        while True:
            pivot = None
            for ci, c in enumerate(cols):
                for ri, p in enumerate(c):
                    if not p.is_zero() and p.is_constant():
                        pivot = (ci, ri)
                        break
                if pivot:
                    break
            if pivot is None:
                break
            ci, ri = pivot
            pc = cols.pop(ci)
            unit = pc[ri].constant_value()
            gen = alive[ri]
            # gen = -(1/unit) * sum_{k != ri} pc[k] * alive[k]
            subst = {alive[k]: ring.reduce(pc[k].scale(-1 / unit)) for k in range(len(pc)) if k != ri and not pc[k].is_zero()}
            for old, img in images.items():
                if gen in img:
                    coef = img.pop(gen)
                    for g2, q in subst.items():
                        img[g2] = ring.reduce(img.get(g2, base.zero()) + coef * q)
                    for g2 in [g for g, q in img.items() if q.is_zero()]:
                        del img[g2]
            newcols = []
            for c in cols:
                f = c[ri]
                if not f.is_zero():
                    c = [ring.reduce(c[k] - f * pc[k].scale(1 / unit)) for k in range(len(c))]
                del c[ri]
                if any(not p.is_zero() for p in c):
                    newcols.append(c)
            cols = newcols
            alive.pop(ri)
        pos = {g: i for i, g in enumerate(alive)}
        out = PresentedModule(ring, len(alive), tuple(tuple(c) for c in cols))
        imgs = []
        for k in range(self.ngens):
            v = [base.zero()] * len(alive)
            for g, q in images[k].items():
                v[pos[g]] = q
            imgs.append(tuple(v))
        return out, imgs

    def pruned(self):
        return self.prune()[0]

    def __str__(self):
        rows = self.matrix()
        return f"coker {[[str(p) for p in r] for r in rows]} over {self.ring}"


def _check_supports(A):
    if A.is_degenerate and not A.degenerate_ok:
        raise ZeroSupport("support product is zero")


@dataclass(frozen=True, eq=False)
class TorsionResult:
    """H^0 of M as ``saturated / relations`` inside the free module."""

    module: PresentedModule
    saturated: FreeSubmodule
    exponent: int
    purified: PresentedModule

    @property
    def is_zero(self):
        return self.saturated.is_subset(self.module.submodule)

    def generators(self):
        """Generators of H^0 (vectors of F not in the relation module)."""
        rel = self.module.submodule
        return [c for c in self.saturated.columns if not rel.contains(c)]


def torsion_wrt(M, I):
    """Torsion of M with respect to a single ideal I."""
    if M.ring != I.ring:
        raise RingMismatch("module and ideal over different rings")
    sat, n = saturate(M.submodule, I)
    pur = PresentedModule(M.ring, M.ngens, sat.columns)
    return TorsionResult(M, sat, n, pur)


def torsion_H0(M, A):
    """Sections of M killed by a power of the support product."""
    _check_supports(A)
    return torsion_wrt(M, A.product)


def purify(M, A):
    """M / H^0(M); same generators, saturated relations."""
    return torsion_H0(M, A).purified


@dataclass(frozen=True, eq=False)
class HomModule:
    """Hom(I, M) as tuples (m_1..m_r) = (psi(f_1), .., psi(f_r)) in M^r.

    ``tuples`` lists generators as vectors of F^r (length r * g, block k
    holding psi(f_k)); ``module`` presents the span of the tuples modulo N^r.
    ``canonical_images[k]`` is the image of generator k of M, m -> (f_i m).
    """

    ideal: Ideal
    target: PresentedModule
    tuples: tuple
    module: PresentedModule
    canonical_images: tuple

    @property
    def r(self):
        return len(self.ideal.gens)

    def block_relations(self):
        return _block(self.target, self.r)

    def image_submodule(self):
        """Image of M -> Hom(I, M) plus N^r, inside F^r."""
        return FreeSubmodule(
            self.target.ring,
            self.r * self.target.ngens,
            list(self.canonical_images) + list(self.block_relations().columns),
        )

    def surjectivity_witness(self):
        """A Hom generator outside the image of M, or None."""
        im = self.image_submodule()
        for t in self.tuples:
            if not im.contains(t):
                return t
        return None

    def is_surjective(self):
        return self.surjectivity_witness() is None

    def element_as_tuple(self, vec):
        """Split a vector of F^r into the r components psi(f_i) in F."""
        g = self.target.ngens
        return [tuple(vec[i * g:(i + 1) * g]) for i in range(self.r)]


def _block(M, r):
    """N^r inside F^r."""
    g = M.ngens
    z = M.ring.base.zero()
    cols = []
    for i in range(r):
        for c in M.relations:
            v = [z] * (r * g)
            v[i * g:(i + 1) * g] = c
            cols.append(tuple(v))
    return FreeSubmodule(M.ring, r * g, cols)


def _linear_map_matrix(M, coeff_rows):
    """Matrix of F^r -> F^t, x -> (sum_i a_{l,i} x_i)_l, for coefficient rows a_l."""
    g = M.ngens
    r = len(coeff_rows[0]) if coeff_rows else 0
    z = M.ring.base.zero()
    rows = []
    for a in coeff_rows:
        for k in range(g):
            row = [z] * (r * g)
            for i in range(r):
                row[i * g + k] = a[i]
            rows.append(row)
    return rows


def _quotient_presentation(ring, gens, sub):
    """Presentation of span(gens) / sub, where sub lies in span(gens)."""
    rank = sub.rank
    gens = list(gens)
    a = len(gens)
    if a == 0:
        return PresentedModule(ring, 0, ())
    cols = gens + [tuple(-p for p in c) for c in sub.columns]
    syz = syzygies_of(ring, rank, cols)
    rels = [c[:a] for c in syz.columns]
    return PresentedModule(ring, a, tuple(rels))


def hom_from_ideal(I, M, route="syzygy"):
    """Hom(I, M) for an ideal I = (f_1..f_r).

    ``route="syzygy"``: tuples killed by every syzygy of the f_i (valid for
    any M).  ``route="cross"``: tuples with f_i m_j = f_j m_i (valid when M
    has no I-torsion).
    """
    if I.ring != M.ring:
        raise RingMismatch("ideal and module over different rings")
    ring = M.ring
    f = list(I.gens)
    r = len(f)
    g = M.ngens
    if route == "syzygy":
        syz = syzygies_of(ring, 1, [(x,) for x in f])
        coeff_rows = [list(c) for c in syz.columns]
    elif route == "cross":
        z = ring.base.zero()
        coeff_rows = []
        for i in range(r):
            for j in range(i + 1, r):
                row = [z] * r
                row[j] = f[i]
                row[i] = -f[j]
                coeff_rows.append(row)
    else:
        raise ValueError(f"unknown route {route!r}")
    blockN = _block(M, r)
    if coeff_rows:
        matrix = _linear_map_matrix(M, coeff_rows)
        target = _block(M, len(coeff_rows))
        K = preimage(ring, matrix, target)
    else:
        K = FreeSubmodule(ring, r * g, [unit_vector(ring.base, r * g, k) for k in range(r * g)])
    tuples = tuple(c for c in K.columns if not blockN.contains(c))
    module = _quotient_presentation(ring, tuples, blockN)
    canon = []
    for k in range(g):
        v = [ring.base.zero()] * (r * g)
        for i in range(r):
            v[i * g + k] = f[i]
        canon.append(tuple(v))
    return HomModule(I, M, tuples, module, tuple(canon))


def canonical_map_injective(I, M):
    """m -> (x -> x m) is injective iff (N : I) is inside N."""
    N = M.submodule
    return colon(N, I).is_subset(N)


@dataclass(frozen=True)
class DepthVerdict:
    deep: bool
    depth_tested: int
    # which test failed: "torsion" or "hom" plus the offending support ideal
    failure: Optional[str] = None
    ideal: Optional[Ideal] = None
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.deep


def is_deep(M, d, A, family=None):
    """d-deep test for d in {0, 1, 2}, using the generating family (or ``family``)."""
    if d not in (0, 1, 2):
        raise ValueError("depth is only decided for d <= 2")
    if d == 0:
        return DepthVerdict(True, 0)
    tor = torsion_H0(M, A)
    if not tor.is_zero:
        gens = tor.generators()
        return DepthVerdict(False, d, "torsion", A.product, gens[0] if gens else None)
    if d == 1:
        return DepthVerdict(True, 1)
    for P0 in family if family is not None else A.phi0:
        H = hom_from_ideal(P0, M)
        w = H.surjectivity_witness()
        if w is not None:
            return DepthVerdict(False, 2, "hom", P0, w)
    return DepthVerdict(True, 2)


# ---------------------------------------------------------------------------
# closure
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClosureResult:
    """M^closure with the structure map from the purification of M.

    ``structure[k]`` is the image of generator k of M in the generators of
    ``module``.  ``exponent`` is the level n where the colon chain stopped;
    ``regular`` is the element used to embed into M[1/f].
    """

    source: PresentedModule
    purified: PresentedModule
    module: PresentedModule
    structure: tuple
    exponent: int
    regular: Optional[Poly]
    level_submodule: Optional[FreeSubmodule] = None

    @property
    def is_isomorphism(self):
        return self.exponent == 0


def find_regular_element(M, P):
    """An element of P that is a nonzerodivisor on M, tried in a fixed order."""
    N = M.submodule
    gens = [g for g in P.gens if not M.ring.reduce(g).is_zero()]
    candidates = list(gens)
    if len(gens) > 1:
        candidates.append(sum(gens[1:], gens[0]))
        for w in (2, 3):
            candidates.append(sum((g.scale(w ** i) for i, g in enumerate(gens)), M.ring.base.zero()))
    for f in candidates:
        if colon(N, Ideal(M.ring, [f])).is_subset(N):
            return f
    return None


def _next_level(X, N, P, f):
    """X_{n+1} = (f X_n + N) : P, since P^(n+1) x in M iff P x lies in level n."""
    g = X.rank
    fX = FreeSubmodule(X.ring, g, [tuple(f * p for p in c) for c in X.columns] + list(N.columns))
    return colon(fX, P), fX


def closure(M, A, max_steps=DEFAULT_MAX_STEPS):
    """Ideal transform of the purification of M with respect to the supports.

    Level n of the chain is {x in M[1/f] : P^n x in M} = f^-n X_n with
    X_n = ((N + f^n F) : P^n); it stabilises once X_{n+1} = f X_n + N, and
    then equals the full colimit.
    """
    _check_supports(A)
    Mp = purify(M, A)
    ring, g = Mp.ring, Mp.ngens
    if Mp.is_zero():
        zero = PresentedModule(ring, 0, ())
        return ClosureResult(M, Mp, zero, tuple(() for _ in range(g)), 0, None)
    P = A.product
    f = find_regular_element(Mp, P)
    if f is None:
        raise NoRegularElement(f"no tried element of {P} is regular on the purification")
    N = Mp.submodule
    X = FreeSubmodule(ring, g, [unit_vector(ring.base, g, k) for k in range(g)])
    for n in range(0, max_steps + 1):
        Xn1, fX = _next_level(X, N, P, f)
        if Xn1.is_subset(fX):
            gens = [c for c in X.groebner().columns]
            module = _quotient_presentation(ring, gens, N)
            span = FreeSubmodule(ring, g, gens)
            fn = f ** n
            structure = []
            for k in range(g):
                coeffs = lift(unit_vector(ring.base, g, k, fn), span)
                if coeffs is None:  # pragma: no cover - f^n F lies in X_n
                    raise ArithmeticError("structure map failed to lift")
                structure.append(coeffs)
            pruned, images = module.prune()
            new_structure = []
            for coeffs in structure:
                v = [ring.base.zero()] * pruned.ngens
                for c, img in zip(coeffs, images):
                    for i, q in enumerate(img):
                        v[i] = ring.reduce(v[i] + c * q)
                new_structure.append(tuple(v))
            return ClosureResult(M, Mp, pruned, tuple(new_structure), n, f, X)
        X = Xn1
    raise NotStabilized(max_steps)


def structure_map_is_isomorphism(res):
    """Closure structure map Mp -> closure is bijective (it is always injective)."""
    if res.module.ngens == 0:
        return res.purified.is_zero()
    sub = FreeSubmodule(
        res.module.ring,
        res.module.ngens,
        list(res.structure) + list(res.module.relations),
    )
    return sub.is_full()


# ---------------------------------------------------------------------------
# Cech cohomology in degrees 0 and 1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CechResult:
    degree: int
    is_zero: bool
    # q=0: a torsion element of F; q=1: a Hom(I, M^pur) tuple outside the image
    witness: Optional[tuple] = None
    description: str = ""


def cech_h(M, gens, q):
    """Vanishing of H^q_I(M), I = (gens), for q in {0, 1}.

    q=0: no I-torsion.  q=1: M^pur -> Hom(I, M^pur) is onto; since M^pur has
    no I-torsion, Hom(I^{n+1}, M^pur) = Hom(I, Hom(I^n, M^pur)) and the n=1
    case decides all n.
    """
    if q not in (0, 1):
        raise ValueError("only degrees 0 and 1 are decided")
    I = gens if isinstance(gens, Ideal) else Ideal(M.ring, list(gens))
    tor = torsion_wrt(M, I)
    if q == 0:
        if tor.is_zero:
            return CechResult(0, True)
        w = tor.generators()[0]
        return CechResult(0, False, w, f"class of {[str(p) for p in w]} is I-torsion")
    Mp = tor.purified
    if Mp.is_zero():
        return CechResult(1, True)
    H = hom_from_ideal(I, Mp)
    w = H.surjectivity_witness()
    if w is None:
        return CechResult(1, True)
    comps = H.element_as_tuple(w)
    desc = "hom " + ", ".join(
        f"{f} -> {[str(p) for p in c]}" for f, c in zip(I.gens, comps)
    ) + " is not multiplication by an element"
    return CechResult(1, False, w, desc)


# ---------------------------------------------------------------------------
# Mayer-Vietoris and vanishing transfer
# ---------------------------------------------------------------------------

def mv_check(M, I, J, A=None):
    """Exactness of 0 -> H0_{I+J} -> H0_I + H0_J -> H0_{IJ} at the first two spots."""
    from .cakernel import intersect

    N = M.submodule
    T_sum = saturate(N, I + J)[0]
    T_I = saturate(N, I)[0]
    T_J = saturate(N, J)[0]
    T_prod = saturate(N, I * J)[0]
    # well-defined maps: T_{I+J} into both, both into T_{IJ}
    if not (T_sum.is_subset(T_I) and T_sum.is_subset(T_J)):
        return False
    if not (T_I.is_subset(T_prod) and T_J.is_subset(T_prod)):
        return False
    # injectivity of the first arrow is automatic (submodules); exactness in
    # the middle: pairs (a, b) with a = b mod N are exactly the diagonal image
    inter = intersect(T_I, T_J)
    if not inter.equals(T_sum):
        return False
    g = M.ngens
    ring = M.ring
    cols = [tuple(c) for c in T_I.columns] + [tuple(-p for p in c) for c in T_J.columns]
    cols += list(N.columns)
    a, b = len(T_I.columns), len(T_J.columns)
    syz = syzygies_of(ring, g, cols)
    for c in syz.columns:
        # element (x, y) of T_I + T_J with x - y in N: x must lie in T_{I+J} mod N
        x = [ring.base.zero()] * g
        for coef, col in zip(c[:a], T_I.columns):
            x = [ring.reduce(xi + coef * p) for xi, p in zip(x, col)]
        if not (T_sum + N).contains(tuple(x)):
            return False
    return True


def h_vanishing_transfer_check(M, I, J, d):
    """If H^q_I(M) = 0 for q < d then H^q_J(M) = 0 for q < d.

    Needs V(J) inside V(I), i.e. I inside the radical of J.
    """
    from .cakernel import radical_member

    if d not in (0, 1, 2):
        raise ValueError("d must be 0, 1 or 2")
    if not all(radical_member(g, J) for g in I.gens):
        raise ValueError("the transfer check needs I inside the radical of J")
    # H^0_J -> H^0_I is always injective: J-torsion is I-torsion
    if not torsion_wrt(M, J).saturated.is_subset(torsion_wrt(M, I).saturated):
        return False
    hyp = all(cech_h(M, I, q).is_zero for q in range(d))
    if not hyp:
        return True
    return all(cech_h(M, J, q).is_zero for q in range(d))
