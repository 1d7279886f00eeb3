"""Shared error base so callers can catch any emulator failure in one place."""


class HansimError(Exception):
    pass
