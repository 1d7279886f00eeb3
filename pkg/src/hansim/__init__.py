"""Desk-scale home area network emulator: virtual smart load nodes, a master
load management unit, and demand-limit scheduling over a latency-injecting
message link."""

from .errors import HansimError

__all__ = ["HansimError"]
__version__ = "0.1.0"
