"""Exception hierarchy shared by the toolchain."""


class WubiError(ValueError):
    """Base class for all data errors raised by wubimt."""


class TableParseError(WubiError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class TableConflictError(WubiError):
    def __init__(self, line_no, character, first, second):
        self.line_no = line_no
        self.character = character
        super().__init__(
            f"line {line_no}: {character!r} has conflicting codes {first!r} and {second!r}"
        )


class UnknownCharacterError(WubiError):
    def __init__(self, character, position=None):
        self.character = character
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"character {character!r} (U+{ord(character):04X}) not in table{where}")


class MixedTokenError(WubiError):
    def __init__(self, token, position=None):
        self.token = token
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"token {token!r}{where} mixes Chinese and non-Chinese characters")


class MalformedSentenceError(WubiError):
    """Whitespace in a sentence other than single-space token separators."""


class DecodeError(WubiError):
    def __init__(self, token, code=None, message=None):
        self.token = token
        self.code = code
        if message is None:
            message = f"cannot decode code {code!r} in token {token!r}"
        super().__init__(message)
