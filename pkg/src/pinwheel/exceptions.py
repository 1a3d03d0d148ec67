"""Exception types shared across the package."""


class PinwheelError(Exception):
    """Base class for all package errors."""


class CapacityError(PinwheelError):
    """A configured resource guard (depth cap, enumeration budget) was exceeded."""


class PatchCorruptionError(PinwheelError, ValueError):
    """A patch violates a structural invariant (duplicate tiles, bad pairing)."""


class CoincidenceError(PinwheelError, ValueError):
    """Distinct powder grains share a point other than the origin."""
