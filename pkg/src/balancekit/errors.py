"""Exception types shared across the package."""


class BalanceKitError(Exception):
    """Base class for all balancekit errors."""


class DataError(BalanceKitError):
    """Unreadable, malformed or invariant-violating input data."""
