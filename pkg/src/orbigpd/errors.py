"""Exception hierarchy shared by all modules."""


class OrbiError(Exception):
    """Base class. ``witness`` carries whatever concrete data exposed the failure."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InputError(OrbiError):
    """Malformed or inconsistent input (CLI exit code 2)."""


class MathFailure(OrbiError):
    """A verified mathematical claim did not hold (CLI exit code 1)."""


class AxiomViolation(InputError):
    pass


class ResourceLimit(InputError):
    pass


class NotNormal(InputError):
    pass


class PreconditionFailed(InputError):
    pass


class SubgroupMismatch(InputError):
    pass


class NotSimplicial(InputError):
    pass


class NotAdmissible(InputError):
    pass


class NotFree(InputError):
    pass


class NeedsSubdivision(InputError):
    pass


class NoLift(InputError):
    pass


class NotAComplex(MathFailure):
    pass


class DomainMismatch(InputError):
    pass


class NotEssentialEquivalence(InputError):
    pass


class MiddleMismatch(InputError):
    pass


class NotTranslation(InputError):
    pass


class NotMorita(InputError):
    pass


class MissingCharacterData(InputError):
    pass


class NotOrbifoldSystem(InputError):
    pass


class NotExtendable(MathFailure):
    """A pushed-forward system admits no functorial extension with the chosen data."""


class PathInvalid(InputError):
    pass


class IsomorphismFailure(MathFailure):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message, witness=(line, column))
        self.line = line
        self.column = column


class ValidationError(InputError):
    def __init__(self, entity, invariant, witness=None):
        super().__init__(f"{entity}: {invariant}", witness=witness)
        self.entity = entity
        self.invariant = invariant


class UnknownCommand(InputError):
    pass
