"""Exception taxonomy shared by all egflab modules.

The CLI maps these onto exit codes: DomainError (and any other
EgflabError) -> 1, usage errors -> 2, ResourceLimitError -> 3.
"""


class EgflabError(Exception):
    """Base class for all errors raised by egflab."""


class OrderMismatchError(EgflabError):
    """Binary series operation applied to series of different truncation orders."""


class DomainError(EgflabError):
    """Input outside the mathematical domain of the operation."""


class ResourceLimitError(EgflabError):
    """Enumeration guard tripped; raise instead of hanging on huge inputs."""
