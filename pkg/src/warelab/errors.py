"""Common exception base.

Every domain error raised by this package derives from WarelabError so that
callers (CLI, gateway) can separate expected rule violations from bugs.
"""


class WarelabError(Exception):
    pass
