class ScaleGuardError(RuntimeError):
    """An enumeration would exceed the configured size limit."""


class ConsistencyError(ArithmeticError):
    """An exact identity that must hold failed (e.g. a non-exact division)."""
