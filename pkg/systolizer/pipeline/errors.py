# Exceptions raised by the systolizer library; the CLI maps all of them to exit code 2


class SystolizerError(RuntimeError):
    pass


class InputError(SystolizerError):
    pass


class EligibilityError(SystolizerError):
    pass


class ResourceLimitError(SystolizerError):
    pass


class PreconditionError(SystolizerError):
    pass
