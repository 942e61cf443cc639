"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific one that applies rather than a bare ValueError.
"""


class CapabilityError(RuntimeError):
    """A requested exact computation exceeds the supported problem size."""


class ConstraintError(ValueError):
    """Parameters violate a protocol security constraint."""


class DegenerateModeError(ValueError):
    """A statistics mode is undefined for these parameters (no click mass)."""
