"""Exception types raised across the package."""


class ModuliLabError(Exception):
    """Base class for all errors raised by moduli_lab."""


class BranchAmbiguity(ModuliLabError):
    """A logarithm was requested at an eigenvalue too close to -1."""


class NotCentral(ModuliLabError):
    """The relator does not evaluate to the prescribed central element."""


class DegenerateSigma(ModuliLabError):
    """The cochain-level symplectic pairing has a nontrivial kernel."""

    def __init__(self, rank, dim):
        super().__init__(f"cup_sigma has rank {rank} on C^1 of dimension {dim}")
        self.rank = rank
        self.dim = dim


class NotACocycle(ModuliLabError):
    pass


class NotInSliceVariety(ModuliLabError):
    pass


class NotInChart(ModuliLabError):
    pass


class NoConvergence(ModuliLabError):
    pass


class Infeasible(ModuliLabError):
    """No representation exists for the requested group/genus/target."""


class ConfigError(ModuliLabError):
    pass


class SchemaError(ModuliLabError):
    """A report or representation file does not match the expected schema."""
