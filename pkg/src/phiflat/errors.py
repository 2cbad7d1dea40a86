"""Exception hierarchy.  Every error carries a machine-readable ``code``."""


class PhiflatError(Exception):
    code = "internal"
    exit_code = 5


class InputError(PhiflatError, ValueError):
    code = "input"
    exit_code = 4


class ParseError(InputError):
    code = "parse"

    def __init__(self, message, pos=None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} (at position {pos})")


class RingMismatch(InputError):
    code = "ring_mismatch"


class EmptyFamily(InputError):
    code = "empty_family"


class ZeroSupport(InputError):
    code = "zero_support"


class NotADomain(InputError):
    code = "not_a_domain"


class NoRegularElement(PhiflatError):
    code = "no_regular_element"


class NotStabilized(PhiflatError):
    code = "not_stabilized"

    def __init__(self, max_steps):
        self.max_steps = max_steps
        super().__init__(f"colon chain did not stabilize within {max_steps} steps")


class NotAdmissible(PhiflatError):
    code = "not_admissible"


class ZeroAdmissibleImage(PhiflatError):
    code = "zero_admissible_image"


class InfiniteValue(PhiflatError):
    code = "infinite_value"


class ZeroGenerator(InputError):
    code = "zero_generator"


class InadmissibleCenter(PhiflatError):
    code = "inadmissible_center"

    def __init__(self, center, stage, witness=None):
        self.center, self.stage, self.witness = center, stage, witness
        super().__init__(f"center {center} is not admissible at stage {stage}")


class InputNotFlatOnU(PhiflatError):
    code = "input_not_flat_on_u"
    exit_code = 3

    def __init__(self, center, chart, witness=None):
        self.center, self.chart, self.witness = center, chart, witness
        msg = f"non-flat locus {center} on chart {chart or 'root'} is not admissible"
        if witness is not None:
            msg += f" ({witness} is not in its radical)"
        super().__init__(msg)


class Unresolved(PhiflatError):
    code = "unresolved"
    exit_code = 2


class IncompleteTorsionTest(UserWarning):
    """The supplied multiplicative generators may miss some torsion."""
