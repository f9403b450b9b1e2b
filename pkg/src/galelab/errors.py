"""Exception types raised across galelab.

Every error derives from ``GaleLabError`` (itself a ``ValueError``) so the CLI
can map any library-level input problem to exit status 2.
"""


class GaleLabError(ValueError):
    pass


# core
class SumNotOne(GaleLabError):
    def __init__(self, actual):
        super().__init__(f"weights sum to {actual}, not 1")
        self.actual = actual


class BadBlockLength(GaleLabError):
    pass


class NegativeWeight(GaleLabError):
    pass


class PrefixTooLong(GaleLabError):
    pass


class ZeroMarginal(GaleLabError):
    def __init__(self, context):
        super().__init__(f"context {context!r} has zero marginal mass")
        self.context = context


# entropy
class LengthNotMultiple(GaleLabError):
    pass


class WordTooShort(GaleLabError):
    pass


class EmptyCounts(GaleLabError):
    pass


class StreamExhausted(GaleLabError):
    pass


# gale
class NotSingleFactor(GaleLabError):
    pass


class NotAntichain(GaleLabError):
    pass


class DepthTooLarge(GaleLabError):
    pass


class ThresholdNeverReached(GaleLabError):
    pass


# gambler
class RowNotStochastic(GaleLabError):
    def __init__(self, state, row):
        super().__init__(f"bet row {row} at state {state!r} does not sum to 1")
        self.state = state
        self.row = row


class MissingTransition(GaleLabError):
    def __init__(self, state, symbol):
        super().__init__(f"no transition for ({state!r}, {symbol!r})")
        self.state = state
        self.symbol = symbol


class UnknownStartState(GaleLabError):
    pass


# construct
class FloorTooLarge(GaleLabError):
    pass


class SmoothingDistortion(GaleLabError):
    pass


class ZeroMassBlock(GaleLabError):
    pass


# dimension
class TooFewCheckpoints(GaleLabError):
    pass


class SBelowEntropy(GaleLabError):
    pass


# seqgen
class FileNotReadable(GaleLabError):
    pass


class BadSymbol(GaleLabError):
    def __init__(self, glyph, offset):
        super().__init__(f"symbol {glyph!r} at byte offset {offset} is not in the alphabet")
        self.glyph = glyph
        self.offset = offset
