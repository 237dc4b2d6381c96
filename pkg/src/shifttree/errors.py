"""Exception hierarchy for shifttree."""


class ShiftTreeError(Exception):
    """Base class for all library errors."""


class SpecParseError(ShiftTreeError):
    """A spec file could not be parsed.

    ``line`` carries the 1-based line number of the offending text when it can
    be located, otherwise ``None``.
    """

    def __init__(self, msg, line=None):
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.line = line


class InvalidTree(SpecParseError):
    """Edges do not describe a leafless, connected directed tree."""


class InvalidWeights(SpecParseError):
    """Weights are missing, negative, or otherwise malformed."""


class UnknownVertex(ShiftTreeError, KeyError):
    pass


class UnknownBuiltin(ShiftTreeError, KeyError):
    pass


class InvalidParam(ShiftTreeError, ValueError):
    pass


class NotLeftInvertible(ShiftTreeError):
    """Some column norm ||S e_u|| vanishes, so S*S is not bounded below."""


class NotFredholm(ShiftTreeError):
    pass


class OnEssentialSpectrum(ShiftTreeError):
    """The Fredholm index was requested at a point of the essential spectrum."""


class OutsideDelta(ShiftTreeError):
    pass


class NoGeneralizedRoot(ShiftTreeError):
    pass


class OutsideDisc(ShiftTreeError, UserWarning):
    """Evaluation point lies outside the estimated disc of convergence.

    Usable both as a warning category and as an exception.
    """
