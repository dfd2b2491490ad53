"""Exception types shared across the toolkit."""


class ParseError(ValueError):
    """Malformed input file. Carries the offending 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None, path: str | None = None):
        self.line_no = line_no
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line_no is not None:
            where += f"line {line_no}: "
        super().__init__(where + message)


class InfeasibleError(ValueError):
    """Fit instance cannot be solved as posed, e.g. an edge covered by no community."""
