class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class BracketError(DomainError):
    """A root-finding bracket does not contain a sign change."""


class ScenarioError(ValueError):
    """A scenario file failed to parse or validate.

    ``path`` is a dotted/indexed location inside the document, e.g.
    ``detection_matrix.Keylogger.Merged``.
    """

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}" if path else reason)
