"""Latency- and complexity-aware modeling of short-packet links.

The package combines finite-blocklength rate math for the BI-AWGN channel,
an analytic complexity/latency model of ordered-statistics decoding, an
empirical complexity-vs-power-penalty law, a Monte Carlo eBCH/OSD link
simulator, and three parameter-optimization scenarios built on top of them.
"""

from osdlat.fblmath import Snr, InfeasibleError

__version__ = "0.1.0"

__all__ = ["Snr", "InfeasibleError", "__version__"]
