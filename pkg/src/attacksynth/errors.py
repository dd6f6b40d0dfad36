"""Exception types shared across the package."""


class AttackSynthError(Exception):
    """Base class for all errors raised by this package."""


class AlphabetMismatch(AttackSynthError):
    pass


class NondeterministicInput(AttackSynthError):
    pass


class UnknownState(AttackSynthError):
    pass


class PartitionInvalid(AttackSynthError):
    pass


class EmptySupervisor(AttackSynthError):
    pass


class UnsupportedCombination(AttackSynthError):
    pass


class PlantIsTrim(AttackSynthError):
    """The plant has no blocking states, so no liveness attack can exist."""


class ModelIncorrect(AttackSynthError):
    """The nominal model already violates the property it is checked against.

    ``witness`` holds the offending state label (a marked state of H_nom for
    safety, a blocking state of G_nom for liveness).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnknownScenario(AttackSynthError):
    pass


class UnknownModel(AttackSynthError):
    pass


class EmptyOperand(AttackSynthError):
    pass


class DocumentError(AttackSynthError):
    """Malformed automaton document; ``line``/``column`` locate the problem when known."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column
