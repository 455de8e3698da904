"""Exception hierarchy shared by every subpackage."""


class PpError(Exception):
    """Base class for all errors raised by ppbass."""


class DimensionMismatch(PpError, ValueError):
    pass


class AmbientMismatch(PpError, ValueError):
    pass


class RingMismatch(PpError, ValueError):
    pass


class NotContained(PpError, ValueError):
    pass


class ModuleMismatch(PpError, ValueError):
    pass


class NotWellDefined(PpError, ValueError):
    """A candidate morphism sends a source relation outside the target relations."""

    def __init__(self, relation, image):
        super().__init__(f"relation {list(relation)} maps to {list(image)}, not a target relation")
        self.relation = tuple(relation)
        self.image = tuple(image)


class NotInjective(PpError, ValueError):
    def __init__(self, kernel_element):
        super().__init__(f"morphism has nonzero kernel element {list(kernel_element)}")
        self.kernel_element = tuple(kernel_element)


class TooLarge(PpError):
    pass


class RingNotFinite(PpError, ValueError):
    pass


class ArityMismatch(PpError, ValueError):
    pass


class BadIndex(PpError, IndexError):
    pass


class NotComparable(PpError, ValueError):
    pass


class NotDescending(PpError):
    def __init__(self, index, witness=None):
        super().__init__(f"chain is not descending at stage {index}")
        self.index = index
        self.witness = witness


class NotDescendingIdeals(PpError):
    def __init__(self, index):
        super().__init__(f"principal ideal at stage {index + 1} is not contained in the one at stage {index}")
        self.index = index


class Stabilized(PpError):
    pass


class ChainStabilized(PpError):
    def __init__(self, index):
        super().__init__(f"chain stabilizes at stage {index}; no Mittag-Leffler failure evidence")
        self.index = index


class StageOutOfRange(PpError, IndexError):
    pass


class ParseError(PpError, ValueError):
    def __init__(self, message, position=None, text=None):
        where = "" if position is None else f" at position {position}"
        super().__init__(f"{message}{where}")
        self.position = position
        self.text = text


class UnknownVariable(ParseError):
    pass


class RingLiteralError(ParseError):
    pass
