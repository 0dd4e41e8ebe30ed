class ProdbgError(Exception):
    """Base class for tool errors."""


class PrologSyntaxError(ProdbgError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}" if line else message)


class UnsupportedConstruct(PrologSyntaxError):
    def __init__(self, construct: str, line: int = 0, col: int = 0):
        self.construct = construct
        super().__init__(f"unsupported construct: {construct}", line, col)


class SuiteError(ProdbgError):
    pass


class EncodingError(ProdbgError):
    """Raised for malformed mutation encodings or models."""


class CorpusError(ProdbgError):
    pass
