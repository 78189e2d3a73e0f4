"""Exception hierarchy shared by every module.

Input problems derive from :class:`InputError`, resource caps from
:class:`CapExceeded`, and failed self-checks from :class:`VerificationError`.
The CLI maps these to exit codes 2, 3 and 1 respectively.
"""

from __future__ import annotations


class PointlikeError(Exception):
    pass


class InputError(PointlikeError, ValueError):
    """Malformed or invalid user input."""


class IndexOutOfRange(InputError):
    pass


class NonAssociative(InputError):
    def __init__(self, i: int, j: int, k: int):
        self.triple = (i, j, k)
        super().__init__(f"(x{i}*x{j})*x{k} != x{i}*(x{j}*x{k})")


class EmptyGeneratorSet(InputError):
    pass


class NotIdempotent(InputError):
    pass


class NotSurjective(InputError):
    pass


class ArityMismatch(InputError):
    pass


class UniverseMismatch(InputError):
    pass


class NotAChain(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class EmptyWordAccepted(InputError):
    pass


class NotDisjoint(InputError):
    def __init__(self, word: str):
        self.word = word
        super().__init__(f"languages intersect, common word {word!r}")


class AlphabetMismatch(InputError):
    pass


class CapExceeded(PointlikeError):
    pass


class StateExplosion(CapExceeded):
    pass


class VerificationError(PointlikeError):
    pass


class StrategiesDisagree(VerificationError):
    def __init__(self, message: str, witness):
        self.witness = witness
        super().__init__(f"{message}: {witness}")


class AxiomViolation(VerificationError):
    def __init__(self, axiom: str, witness):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"blowup axiom {axiom} fails at {witness}")
