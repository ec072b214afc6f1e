"""Shared error types."""

from __future__ import annotations


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed to reach tolerance; carries the residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
