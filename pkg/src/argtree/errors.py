"""Exception hierarchy shared by every argtree layer."""

from __future__ import annotations


class ArgTreeError(Exception):
    """Base class for all argtree failures."""


class CoercionError(ArgTreeError):
    """A raw value cannot be converted to an argument's declared kind."""

    def __init__(self, arg_name: str, raw: object, expected: str, reason: str = ""):
        self.arg_name = arg_name
        self.raw = raw
        self.expected = expected
        msg = f"cannot coerce {raw!r} for argument '{arg_name}' (expected {expected})"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class DuplicateNameError(ArgTreeError):
    """A module name is already registered (available or missing)."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"module name '{name}' is already registered")


class InvalidDescriptorError(ArgTreeError):
    """A descriptor failed self-validation on registration."""

    def __init__(self, name: str, violations):
        self.name = name
        self.violations = list(violations)
        lines = "; ".join(v.render() for v in self.violations)
        super().__init__(f"descriptor '{name}' is invalid: {lines}")


class UnknownModuleError(ArgTreeError, KeyError):
    """No module of this name was ever registered."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no module named '{name}' is registered")

    def __str__(self) -> str:  # KeyError would quote the whole message
        return self.args[0]


class MissingModuleError(ArgTreeError):
    """The module is known but unavailable (e.g. optional plugin absent)."""

    def __init__(self, name: str, reason: str):
        self.name = name
        self.reason = reason
        super().__init__(f"module '{name}' is unavailable: {reason}")


class RegistryFrozenError(ArgTreeError):
    """Mutation attempted on a frozen registry."""


class ConfigSyntaxError(ArgTreeError):
    """The configuration file is not a JSON object."""


class NonScalarValueError(ArgTreeError):
    """A configuration value is not a scalar (string, number, boolean)."""

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"value for key '{key}' must be a string, number, or boolean")


class MalformedKeyError(ArgTreeError):
    """A configuration key matches none of the accepted key forms."""

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"key '{key}' matches no accepted key form")


class AmbiguousValueError(ArgTreeError):
    """Two applicable keys resolve the same argument to different raw values."""

    def __init__(self, arg_name: str, keys):
        self.arg_name = arg_name
        self.keys = list(keys)
        super().__init__(
            f"argument '{arg_name}' is set by conflicting keys: {', '.join(self.keys)}"
        )


class UnknownPlaceholderError(ArgTreeError):
    """A braced token in a value names no known placeholder."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown placeholder '{{{name}}}'")


class BuildError(ArgTreeError):
    """Tree construction failed; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join("  " + v.render() for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s):\n{lines}")


class InvalidTreeError(ArgTreeError):
    """An operation requiring a violation-free tree received a violating one."""

    def __init__(self, violations, detail: str = ""):
        self.violations = list(violations)
        msg = detail or "tree has violations"
        if self.violations:
            msg += ": " + "; ".join(v.render() for v in self.violations)
        super().__init__(msg)


class MissingSelectionError(ArgTreeError):
    """Finalization reached a multi-candidate node with no selection entry."""

    def __init__(self, node_name: str):
        self.node_name = node_name
        super().__init__(f"no candidate selection for node '{node_name}'")


class SelectionIndexError(ArgTreeError, IndexError):
    """A selected candidate index is outside the candidate list."""

    def __init__(self, node_name: str, index: int, count: int):
        self.node_name = node_name
        self.index = index
        super().__init__(
            f"selection index {index} out of range for node '{node_name}' ({count} candidates)"
        )


class ConstructionError(ArgTreeError):
    """Instantiating a module from a tree node or state record failed."""

    def __init__(self, name: str, detail: str, path: str = ""):
        self.name = name
        self.path = path
        where = f" at {path}" if path else ""
        super().__init__(f"cannot construct '{name}'{where}: {detail}")


class RuntimeFailure(ArgTreeError):
    """A module raised while an instantiated task was running."""

    def __init__(self, path: str, cause: BaseException):
        self.path = path
        self.cause = cause
        super().__init__(f"run failed at {path}: {cause}")
