"""Exception hierarchy shared by every module of the package."""


class CosmashError(Exception):
    """Base class for all domain errors raised by this package."""


class ShapeError(CosmashError, ValueError):
    """A table has the wrong shape or contains out-of-range indices."""


class AxiomViolation(CosmashError):
    def __init__(self, op, witness, detail=""):
        self.op = op
        self.witness = tuple(witness)
        msg = f"axiom for {op!r} fails at {self.witness}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NonQuasigroup(CosmashError):
    def __init__(self, line, index, duplicate):
        self.line = line  # "row" or "col"
        self.index = index
        self.duplicate = duplicate
        super().__init__(f"{line} {index} of mul repeats entry {duplicate}")


class NotHomomorphism(CosmashError):
    def __init__(self, op, witness):
        self.op = op
        self.witness = tuple(witness)
        super().__init__(f"map does not preserve {op!r} at {self.witness}")


class ParseError(CosmashError):
    def __init__(self, position, expected, text=""):
        self.position = position
        self.expected = expected
        super().__init__(f"at position {position}: expected {expected}" + (f" in {text!r}" if text else ""))


class UnboundLetter(CosmashError):
    pass


class UnsupportedOperation(CosmashError):
    pass


class InternalInconsistency(CosmashError):
    """Two independent routes disagreed. Always a bug, never a valid answer."""


class PreconditionFailed(CosmashError):
    def __init__(self, message, witness=()):
        self.witness = tuple(witness)
        super().__init__(message)


class NotNormal(CosmashError):
    pass


class WrongKind(CosmashError):
    pass


class NotAnAction(CosmashError):
    def __init__(self, message, witness=()):
        self.witness = tuple(witness)
        super().__init__(message)


class NotPrecrossed(CosmashError):
    pass


class InvalidSquare(CosmashError):
    pass


class UnknownEntry(CosmashError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class BadParams(CosmashError, ValueError):
    pass


class FormatError(CosmashError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}" if line else reason)


class IoError(CosmashError, OSError):
    pass
