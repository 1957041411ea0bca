class VlgError(Exception):
    """Raíz de todos los errores del proyecto."""


class IndexCapacityError(VlgError):
    pass


class IndexFileError(VlgError):
    pass


class IndexFormatError(IndexFileError):
    pass


class IndexTruncatedError(IndexFileError):
    pass


class IndexChecksumError(IndexFileError):
    pass


class PatternSyntaxError(VlgError, ValueError):
    def __init__(self, message: str, offset: int, line: int | None = None):
        self.offset = offset
        self.line = line
        where = f"línea {line}, " if line is not None else ""
        super().__init__(f"{message} ({where}offset {offset})")
        self.message = message


class GapConstraintError(VlgError, ValueError):
    pass


class BenchConfigError(VlgError, ValueError):
    pass
