"""
Exception hierarchy.

Every failure raised by srtsim derives from SrtError so the CLI can turn
it into a one-line, machine-parseable message and exit status 1.
"""

from __future__ import annotations

from typing import Iterable, List


class SrtError(Exception):
    """Base class for all srtsim errors."""

    kind = "error"

    def one_line(self) -> str:
        """Render as `<kind>: <message>` on a single line."""
        message = " ".join(str(self).split())
        return f"{self.kind}: {message}"


class DomainError(SrtError, ValueError):
    """A parameter lies outside the domain of an operation."""

    kind = "domain"


class CapacityError(SrtError):
    """Exact subset enumeration was asked for more relays than the cap allows."""

    kind = "capacity"

    def __init__(self, n_relays: int, cap: int) -> None:
        super().__init__(
            f"exact enumeration supports N <= {cap} relays, got N = {n_relays}; "
            f"use the i.i.d. engine (ors-iid) for large N"
        )
        self.n_relays = n_relays
        self.cap = cap


class InfeasibleError(SrtError):
    """A constraint inversion has no root in the admissible range."""

    kind = "infeasible"


class NumericalError(SrtError):
    """Quadrature or root finding did not converge."""

    kind = "numerical"


class ConfigError(SrtError):
    """Run configuration is malformed, incomplete or contradictory."""

    kind = "config"

    def __init__(
        self,
        message: str,
        missing: Iterable[str] = (),
        unknown: Iterable[str] = (),
    ) -> None:
        super().__init__(message)
        self.missing: List[str] = list(missing)
        self.unknown: List[str] = list(unknown)
