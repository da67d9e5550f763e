"""
srtsim: security-reliability tradeoff of relay selection under eavesdropping.

Closed-form intercept and outage probabilities of direct transmission and
of opportunistic decode-and-forward relay selection, a seeded Monte Carlo
event simulator that checks them, and the sweeps behind the tradeoff
curves.
"""

__version__ = "1.0.0"
