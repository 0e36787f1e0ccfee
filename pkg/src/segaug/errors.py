"""Exception hierarchy.

Every error carries the process exit code the CLI should use for it.
"""

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_TRANSLATOR = 4
EXIT_INVARIANT = 5


class SegaugError(Exception):
    exit_code = EXIT_INVARIANT


class ConfigError(SegaugError):
    exit_code = EXIT_CONFIG


class EmptyCorpus(ConfigError):
    pass


class InputError(SegaugError):
    """Bad or unreadable input data."""

    exit_code = EXIT_IO


class CorpusIOError(InputError):
    pass


class LineCountMismatch(InputError):
    def __init__(self, source_lines, target_lines, detail=""):
        self.source_lines = source_lines
        self.target_lines = target_lines
        msg = f"line count mismatch: {source_lines} vs {target_lines}"
        super().__init__(f"{msg} ({detail})" if detail else msg)


class EncodingError(InputError):
    def __init__(self, path, byte_offset):
        self.path = path
        self.byte_offset = byte_offset
        super().__init__(f"{path}: invalid UTF-8 at byte offset {byte_offset}")


class EmptyLine(InputError):
    def __init__(self, path, line_number):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}: blank line at line {line_number}")


class EmptyInput(InputError):
    pass


class MalformedLink(InputError):
    def __init__(self, item, position):
        self.item = item
        self.position = position
        super().__init__(f"malformed alignment link {item!r} at item {position}")


class IndexOutOfRange(InputError):
    pass


class SpanMismatch(SegaugError):
    pass


class InvariantViolation(SegaugError):
    pass


class TranslatorError(SegaugError):
    exit_code = EXIT_TRANSLATOR

    def __init__(self, message, batch_range=None):
        self.batch_range = batch_range
        if batch_range is not None:
            message = f"{message} [batch {batch_range[0]}:{batch_range[1]}]"
        super().__init__(message)


class ProcessSpawnError(TranslatorError):
    pass


class ProcessExitNonZero(TranslatorError):
    pass


class TranslatorLineCountMismatch(TranslatorError):
    pass


class HttpError(TranslatorError):
    pass


class ShapeMismatch(TranslatorError):
    pass


class StageError(SegaugError):
    """Wraps an error raised inside a pipeline stage, keeping its exit code."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", EXIT_INVARIANT)
        super().__init__(f"[{stage}] {cause}")
