"""
Exceptions raised by the bandit library.

Library code raises these and never prints or exits. The management
commands catch them and convert them to ``CommandError`` with the exit
code the CLI contract requires (2 for usage errors, 1 for runtime errors).
"""


class BanditError(Exception):
    """
    Base exception for the bandit library.

    Attributes:
        message: Error message describing the failure
    """

    def __init__(self, message: str):
        """
        Initialize BanditError with a message.

        Args:
            message: Error message describing the failure
        """
        self.message = message
        super().__init__(self.message)


class UsageError(BanditError, ValueError):
    """
    Raised when a caller passes invalid arguments.

    Covers dimension mismatches, out-of-range parameters and invalid
    experiment configuration fields. The message names the offending field.
    """


class DomainError(BanditError, ArithmeticError):
    """
    Raised when inputs are well-formed but mathematically invalid.

    Covers matrices that are not positive definite, zero vectors passed to
    basis completion and actions outside the unit ball.
    """
