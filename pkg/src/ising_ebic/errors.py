class CapacityError(RuntimeError):
    """Raised when a requested exact computation exceeds its enumeration budget."""
