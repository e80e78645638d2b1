"""The geometric parameter alpha and its derived integers.

Three ways of choosing alpha along a sequence indexed by k are supported:
fixed remainder (alpha = pi/(2(k + r))), remainder proportional to alpha
(r = C alpha) and vanishing remainder (alpha = pi/(2k)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .so3_kinematics import DomainError

# floor(pi/(2 alpha)) is snapped to the nearest integer inside this band so
# that alpha = pi/(2k) really gives remainder 0.
INT_SNAP = 1e-9


def _split(alpha: float):
    q = math.pi / (2.0 * alpha)
    n = round(q)
    if abs(q - n) <= INT_SNAP * max(1.0, q):
        return int(n), 0.0
    k = math.floor(q)
    return int(k), q - k


def n_mon(alpha: float) -> int:
    """Largest k for which T_k(s) = s + k v(s) is guaranteed increasing."""
    k2 = 1.0 / math.tan(alpha) ** 2
    return int(math.floor((k2 - 1.0) ** 2 / (2.0 * k2 - 1.0)))


@dataclass(frozen=True)
class AlphaParam:
    alpha: float
    remainder: float
    k_max: int
    n_mon: int

    @classmethod
    def from_alpha(cls, alpha: float) -> "AlphaParam":
        alpha = float(alpha)
        if not (0.0 < alpha < math.pi / 4):
            raise DomainError(f"alpha={alpha!r} outside (0, pi/4)")
        k, r = _split(alpha)
        return cls(alpha, r, k, n_mon(alpha))

    @property
    def leading_sign(self) -> int:
        """Sign of the branch that starts the closed front at k_max pi."""
        return 1 if self.k_max % 2 == 1 else -1


def alpha_from_rbar(k: int, r_bar: float) -> float:
    if not (0.0 <= r_bar < 1.0):
        raise DomainError("r_bar must lie in [0, 1)")
    return math.pi / (2.0 * (k + r_bar))


def alpha_from_c(k: int, c: float) -> float:
    """Solve pi/(2 alpha) = k + c alpha for the root near pi/(2k)."""
    if c <= 0.0:
        raise DomainError("C must be positive")
    return math.pi / (k + math.sqrt(k * k + 2.0 * math.pi * c))


def alpha_r0(k: int) -> float:
    return math.pi / (2.0 * k)


def kmon_threshold(lo: float = 1e-3, hi: float = math.pi / 4 - 1e-9, n: int = 20000) -> float:
    """Largest alpha on a grid below which k_max <= n_mon holds everywhere."""
    step = (hi - lo) / n
    last = lo
    for i in range(n + 1):
        a = lo + i * step
        k, _ = _split(a)
        if k > n_mon(a):
            return last
        last = a
    return hi
