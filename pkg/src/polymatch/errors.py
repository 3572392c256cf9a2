"""Exception types raised across the package."""


class PolymatchError(Exception):
    pass


class ZeroPolynomial(PolymatchError, ValueError):
    pass


class DegreeTooLow(PolymatchError, ValueError):
    pass


class DegenerateConfiguration(PolymatchError, ValueError):
    """Coincident points or rays make a minimal problem rank deficient."""


class BehindCamera(PolymatchError, ValueError):
    pass


class InsufficientPoints(PolymatchError, ValueError):
    pass


class EmptyTensor(PolymatchError, ValueError):
    pass
