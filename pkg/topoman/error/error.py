"""
ErrorStack module
-----------------

This module defines the `ErrorStack` class that every TopoMan sub-package uses to
register its error IDs. Each ID maps to an exception type and a fixed message; raising
through the stack yields messages of the form ``[ERROR-ID] info: detail`` so that
transcripts and CLI output carry a stable, greppable identifier.

Classes:
--------
TopoManError
    Root of every exception raised by the package.
ErrorStack
    Registry of error IDs with their exception types and messages.
"""


class TopoManError(Exception):
    """
    Base class for all TopoMan errors.

    Attributes:
    ----------
    errid : str
        The registered error ID, or None when raised directly.
    """

    def __init__(self, *args: object, errid=None) -> None:
        super().__init__(*args)
        self.errid = errid


class ErrorStack(object):
    """
    A registry of errors addressed by error ID.

    Attributes:
    ----------
    _err_unknown : tuple
        Error ID, message and type used when an unregistered ID is raised.
    errs : dict
        Maps error ID to a dictionary with 'info' (message) and 'type' (exception class).

    Methods:
    -------
    __getitem__(errid)
        Raises the error registered under `errid` without detail.
    __call__(errid, detail=None)
        Raises the error registered under `errid`, appending `detail` to its message.
    build(errid, detail=None)
        Returns the exception instance without raising it.
    """

    _err_unknown = ('ERR-UNKNOWN', 'Unknown error', TopoManError)

    def __init__(self, errs):
        """
        Initializes the ErrorStack with a set of errors.

        Parameters:
        ----------
        errs : dict
            Maps each error ID to a dictionary containing 'info' and 'type'.
        """
        self.errs = errs

    def __len__(self):
        """Returns the number of registered errors."""
        return len(self.errs)

    def __contains__(self, errid):
        return errid in self.errs

    def build(self, errid, detail=None):
        """
        Builds the exception registered under `errid`.

        Parameters:
        ----------
        errid : str
            The error ID.
        detail : str, optional
            Context appended to the registered message.

        Returns:
        -------
        TopoManError
            The exception instance, or an unknown error if `errid` is not registered.
        """
        if errid not in self.errs:
            _id, _info, _type = self._err_unknown
            return _type(f'[{_id}] {_info}: {errid}', errid=_id)
        info = self.errs[errid]['info']
        message = f'[{errid}] {info}' if detail is None else f'[{errid}] {info}: {detail}'
        return self.errs[errid]['type'](message, errid=errid)

    def __call__(self, errid, detail=None):
        """
        Raises the error registered under `errid`.

        Raises:
        ------
        TopoManError
            The registered exception type, or the unknown error.
        """
        raise self.build(errid, detail)

    def __getitem__(self, errid):
        raise self.build(errid)
