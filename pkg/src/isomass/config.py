"""Normalisation constants for the scalar/Ricci volume comparison."""
import dataclasses
import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class ComparisonConfig:
    """Pinching fraction and curvature/volume normalisation.

    The defaults describe the unit round 3-sphere: scalar curvature 6,
    Ricci curvature 2, volume 2 pi^2.
    """

    eps: float = 1.0
    R0: float = 6.0
    Ric0: float = 2.0
    V0: float = 2.0 * math.pi ** 2
    n: int = 3

    def __post_init__(self):
        if not 0.0 < self.eps <= 1.0:
            raise DomainError(f"eps must lie in (0, 1], got {self.eps}")
        for name in ("R0", "Ric0", "V0"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")

    def with_eps(self, eps):
        return dataclasses.replace(self, eps=eps)

    def as_dict(self):
        return dataclasses.asdict(self)
