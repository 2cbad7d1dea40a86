"""phiflat: rings with constructible supports, depth, blow-ups and flattening."""
__version__ = "0.1.0"

from .cakernel import Ideal, PolyRing, make_ring
from .depth import PresentedModule, cech_h, closure, is_deep, purify
from .dsl import parse_session
from .flatten import FlatteningProblem, fitting_ideal, flatten, verify_certificate
from .phiring import is_admissible, make_phi_ring

__all__ = [
    "FlatteningProblem",
    "Ideal",
    "PolyRing",
    "PresentedModule",
    "cech_h",
    "closure",
    "fitting_ideal",
    "flatten",
    "is_admissible",
    "is_deep",
    "make_phi_ring",
    "make_ring",
    "parse_session",
    "purify",
    "verify_certificate",
]
