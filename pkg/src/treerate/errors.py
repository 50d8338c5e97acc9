"""Exception types shared across the package."""


class InstanceError(ValueError):
    """Malformed or inconsistent problem input."""


class GuardExceeded(RuntimeError):
    """A configured size guard (vertex count, support size, grid size) was hit."""


class DeterminabilityError(InstanceError):
    """The target function is not determined by the requested side information.

    Raised when two positive-probability source tuples share the same
    conditioning context but produce different function values, so no
    zero-error encoding over that context can exist.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class MarkovPropertyError(InstanceError):
    """Operation requires the source law to factorize along the tree."""

    def __init__(self, message, node=None, witness=None):
        super().__init__(message)
        self.node = node
        self.witness = witness


class SchemeConstructionError(RuntimeError):
    """No deterministic message scheme could be constructed for the instance."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class CertificationFailure(RuntimeError):
    """Zero-error decoding failed at the root; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
