"""Renewable generation forecasting: deterministic GBRT + changepoint trends."""

from renecast._renecast import *  # noqa: F401,F403
from renecast._renecast import __doc__  # noqa: F401

__version__ = "0.1.0"
