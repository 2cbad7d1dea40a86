"""Rings with constructible supports generated by a finite family of ideals.

An ideal is admissible when it contains a finite product of members of the
generating family, equivalently a power of their product ``P``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cakernel import Ideal, Poly, colon, radical_member
from .errors import EmptyFamily, RingMismatch, ZeroSupport

MAX_EXPONENT = 64


def _is_zero_ideal(I):
    return all(I.ring.reduce(g).is_zero() for g in I.gens)


@dataclass(frozen=True, eq=False)
class PhiRing:
    base: object
    phi0: tuple
    degenerate_ok: bool = False
    product: Ideal = field(init=False, repr=False)

    def __post_init__(self):
        if not self.phi0:
            raise EmptyFamily("the generating family of supports is empty")
        for I in self.phi0:
            if I.ring != self.base:
                raise RingMismatch(f"support ideal {I} is not an ideal of {self.base}")
        P = self.phi0[0]
        for I in self.phi0[1:]:
            P = Ideal(self.base, (P * I).groebner().gens)
        if len(self.phi0) == 1:
            P = Ideal(self.base, P.gens)
        object.__setattr__(self, "phi0", tuple(self.phi0))
        object.__setattr__(self, "product", P)
        if _is_zero_ideal(P) and not self.degenerate_ok:
            raise ZeroSupport(f"the product of the supports is zero in {self.base}")

    @property
    def is_degenerate(self):
        return _is_zero_ideal(self.product)

    def __str__(self):
        return f"{self.base} with supports " + ", ".join(str(I) for I in self.phi0)


def make_phi_ring(base, phi0, degenerate_ok=False):
    """Validate a generating family and cache the product ideal."""
    phi0 = [I if isinstance(I, Ideal) else Ideal(base, I) for I in phi0]
    return PhiRing(base, tuple(phi0), degenerate_ok)


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    exponent: Optional[int] = None
    # generator of P that is not in the radical of I, when inadmissible
    witness: Optional[Poly] = None

    def __bool__(self):
        return self.admissible

    @property
    def exponent_known(self):
        return self.exponent is not None


def is_admissible(A, I, max_exponent=MAX_EXPONENT):
    """Decide whether ``I`` contains a power of the support product.

    Decision: every generator of ``P`` is in the radical of ``I``.  Exponent:
    first ``N`` with ``(I : P^N) = (1)``, i.e. ``P^N`` inside ``I``; reported
    as None past ``max_exponent`` even though admissibility is proved.
    """
    if I.ring != A.base:
        raise RingMismatch("ideal is not in the base ring of the Phi-ring")
    for p in A.product.gens:
        if A.base.reduce(p).is_zero():
            continue
        if not radical_member(p, I):
            return Admissibility(False, None, p)
    if I.is_unit():
        return Admissibility(True, 0)
    cur = I
    for n in range(1, max_exponent + 1):
        cur = colon(cur, A.product)
        if cur.is_unit():
            return Admissibility(True, n)
    return Admissibility(True, None)


@dataclass(frozen=True, eq=False)
class RingMap:
    """Ring homomorphism given by the images of the source variables."""

    source: object
    target: object
    images: tuple

    def __post_init__(self):
        imgs = tuple(self.target.base(x) if not isinstance(x, Poly) else x for x in self.images)
        if len(imgs) != self.source.base.nvars:
            raise ValueError("need one image per source variable")
        for x in imgs:
            if x.ring != self.target.base:
                raise RingMismatch(f"image {x} is not in {self.target}")
        object.__setattr__(self, "images", imgs)

    def __call__(self, f):
        return self.target.reduce(f.substitute(list(self.images), self.target.base))

    def map_ideal(self, I):
        return Ideal(self.target, [self(g) for g in I.gens])

    def is_well_defined(self):
        return all(self(g).is_zero() for g in self.source.defining)

    def compose(self, other):
        """``other`` after ``self``."""
        return RingMap(self.source, other.target, tuple(other(x) for x in self.images))

    @classmethod
    def identity(cls, ring):
        return cls(ring, ring, tuple(ring.base.gens()))

    @classmethod
    def inclusion(cls, source, target):
        """Send each source variable to the target variable of the same name."""
        return cls(source, target, tuple(target.base.var(n) for n in source.base.names))


@dataclass(frozen=True, eq=False)
class PhiMorphism:
    source: PhiRing
    target: PhiRing
    images: tuple

    @property
    def ring_map(self):
        return RingMap(self.source.base, self.target.base, self.images)


def is_phi_morphism(f):
    """True iff f(P0) generates an admissible ideal of the target for every P0 in phi0."""
    rm = f.ring_map
    if not rm.is_well_defined():
        raise ValueError("variable images do not define a ring homomorphism")
    return all(is_admissible(f.target, rm.map_ideal(P0)).admissible for P0 in f.source.phi0)


def induced_supports(f, A, degenerate_ok=None):
    """Target Phi-ring whose generating family is the image of A's."""
    if degenerate_ok is None:
        degenerate_ok = A.degenerate_ok
    return PhiRing(f.target, tuple(f.map_ideal(P0) for P0 in A.phi0), degenerate_ok)
