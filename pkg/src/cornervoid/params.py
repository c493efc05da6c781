"""Nondimensional problem inputs."""
from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class PhysicalParams:
    """Anisotropy ``epsilon``, load ratio ``chi`` = s_yy/s_xx at infinity,
    elastic strength ``Lambda`` and Poisson ratio ``nu``."""

    epsilon: float = 0.0
    chi: float = 0.0
    Lambda: float = 0.0
    nu: float = 0.3

    def __post_init__(self):
        if not abs(self.epsilon) < 1.0:
            raise ValueError("|epsilon| must be below 1")
        if self.Lambda < 0.0:
            raise ValueError("Lambda must be non-negative")
        if not -1.0 < self.nu < 0.5:
            raise ValueError("nu must lie in (-1, 0.5)")

    def with_lambda(self, Lambda: float) -> "PhysicalParams":
        return PhysicalParams(self.epsilon, self.chi, Lambda, self.nu)

    def to_dict(self) -> dict:
        return asdict(self)
