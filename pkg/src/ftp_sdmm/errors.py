"""Exception hierarchy shared by all modules."""


class FtpError(Exception):
    """Base class for every error raised by this package."""


# -- field construction and arithmetic ---------------------------------------

class NonPrime(FtpError):
    pass


class NoIrreducible(FtpError):
    pass


class PrimesNotAscendingDistinct(FtpError):
    pass


class ZeroInverse(FtpError):
    pass


class FieldMismatch(FtpError):
    pass


class BadGroupIndex(FtpError):
    pass


class SingularGram(FtpError):
    pass


class Singular(FtpError):
    pass


# -- polynomials --------------------------------------------------------------

class DuplicatePoint(FtpError):
    pass


class IndexOutOfRange(FtpError):
    pass


# -- matrices and scheme ------------------------------------------------------

class DimMismatch(FtpError):
    pass


class NotDivisible(FtpError):
    pass


class TooFewEvalPoints(FtpError):
    pass


class MissingBundle(FtpError):
    pass


class ShapeMismatch(FtpError):
    pass


class TooLargeForExhaustive(FtpError):
    pass


# -- baselines ----------------------------------------------------------------

class BadVariantParams(FtpError):
    pass


class TooFewPoints(FtpError):
    pass


# -- analysis -----------------------------------------------------------------

class InvalidParams(FtpError):
    pass


class HypothesesFail(FtpError):
    pass


# -- wire protocol ------------------------------------------------------------

class MalformedFrame(FtpError):
    pass


class VersionMismatch(FtpError):
    pass


class DigitOverflow(FtpError):
    pass


class ConnectionFailed(FtpError):
    def __init__(self, server_index, message=""):
        super().__init__(f"server {server_index}: {message}" if message else f"server {server_index}")
        self.server_index = server_index


class ProtocolError(FtpError):
    pass


class ProtocolTimeout(FtpError):
    pass
