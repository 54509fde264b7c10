"""Exception hierarchy shared by every gotcha module."""


class GotchaError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GotchaError):
    """Caller supplied an argument that violates a documented precondition."""


class DuplicateUserError(GotchaError):
    """Registration attempted for a username that already has a record."""


class SessionError(GotchaError):
    """Session is unknown, expired, or already consumed."""


class LockoutError(GotchaError):
    """Too many failed login attempts; account temporarily locked."""


class StoreError(GotchaError):
    """Account store file is missing a header, corrupt, or unwritable."""


class BudgetExceededError(GotchaError):
    """A sweep would exceed its configured hash-call budget; refused outright."""


class ConservativeViolationError(GotchaError):
    """An attack strategy tried to reach state outside the oracle boundary."""
