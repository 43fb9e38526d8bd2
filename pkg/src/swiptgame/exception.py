class SwiptGameError(Exception):
    pass


class ConfigurationError(SwiptGameError):
    def __init__(self, message, field=None):
        SwiptGameError.__init__(self, message)
        self.field = field


class ConfigParseError(ConfigurationError):
    def __init__(self, message, line=None):
        ConfigurationError.__init__(self, message)
        self.line = line


class DomainError(SwiptGameError, ValueError):
    pass


class NumericError(SwiptGameError, ArithmeticError):
    pass


class CapabilityError(SwiptGameError):
    pass
