"""
Security Error Handling Module
------------------------------

Errors raised when opening sealed payloads and resolving probe-pair tokens.

Classes:
--------
SecurityError
    Base of the security errors.
IntegrityError
    The recomputed digest differs from the sealed one.
DecryptError
    The wrapped key blob cannot be opened with the controller private key.
UnknownToken
    The token was never issued or its validity window has lapsed.
"""

from ..error.error import ErrorStack, TopoManError


class SecurityError(TopoManError):
    """Base class for payload security errors."""


class IntegrityError(SecurityError):
    """Digest mismatch over the ciphertext or the authenticated header fields."""


class DecryptError(SecurityError):
    """The wrapped blob is not openable with the private key."""


class UnknownToken(SecurityError):
    """Token not live in the controller table; possibly a spoofed probe."""


_module_name = 'SEC'

error_stack = ErrorStack({
    f'{_module_name}-INTEGRITY': dict(type=IntegrityError, info='Payload digest mismatch'),
    f'{_module_name}-DECRYPT': dict(type=DecryptError, info='Cannot unwrap payload key'),
    f'{_module_name}-PLAINTEXT': dict(type=IntegrityError, info='Opened segment is not a payload entry'),
    f'{_module_name}-TOKEN': dict(type=UnknownToken, info='Unknown or expired probe-pair token'),
})
