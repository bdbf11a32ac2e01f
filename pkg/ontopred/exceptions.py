"""exceptions.py"""

# pylint:disable=unnecessary-pass


class OntoPredException(Exception):
    """
    Generic ontopred exception.
    """

    pass


class PreconditionError(OntoPredException):
    """
    Raised when a function is called with arguments violating its contract,
    e.g. an out of range term index or an unpropagated annotation set.
    """

    pass


class UsageError(OntoPredException):
    """
    Raised for command line usage problems.
    """

    pass


class DataError(OntoPredException):
    """
    Generic problem with input data.
    """

    pass


class ParseError(DataError):
    """
    Raised upon a malformed line or stanza in an input file.
    """

    def __init__(self, message: str, line_number: int = None, source: str = None):
        self.message = message
        self.line_number = line_number
        self.source = source
        location = source or "<input>"
        if line_number is not None:
            location = f"{location}:{line_number}"
        super().__init__(f"{location}: {message}")


class UnknownTermError(DataError):
    """
    Raised when an is_a target is not defined in the ontology document.
    """

    pass


class CycleError(DataError):
    """
    Raised when the is_a graph contains a cycle.
    """

    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("is_a cycle: " + " -> ".join(cycle + cycle[:1]))


class CrossNamespaceError(DataError):
    """
    Raised when an is_a edge connects terms of different namespaces.
    """

    pass


class EmptyNamespaceError(DataError):
    """
    Raised when a namespace has no terms or no annotations.
    """

    pass


class ShapeMismatchError(DataError):
    """
    Raised when array dimensions disagree.
    """

    pass


class NonFiniteError(DataError):
    """
    Raised when NaN or inf shows up in activations or the loss.
    """

    def __init__(self, message: str, epoch: int = None, batch: int = None):
        self.epoch = epoch
        self.batch = batch
        if epoch is not None:
            message = f"{message} (epoch {epoch}, batch {batch})"
        super().__init__(message)


class EmptyBenchmarkError(DataError):
    """
    Raised when no benchmark protein has a true term.
    """

    pass


class CheckpointError(DataError):
    """
    Raised upon a malformed checkpoint file.
    """

    pass
