"""Arithmetic on the unit lattices N_a = {a, a+1, ...}.

Rising/falling factorials, Taylor monomials, generalized binomial
coefficients and the delta/nabla exponentials that build the discrete
gamma families.  Everything here is scalar and pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "DomainError",
    "LatticePoint",
    "rising_factorial",
    "falling_factorial",
    "taylor_monomial",
    "generalized_binomial",
    "delta_exponential",
    "nabla_exponential",
    "sigma",
    "rho",
    "rising_factorial_vec",
    "falling_factorial_vec",
]

_EXACT_MAX = 64
_LATTICE_ATOL = 1e-12


class DomainError(ValueError):
    """Argument outside the domain of a lattice function."""


def _is_int(v: float) -> bool:
    return float(v).is_integer()


def sigma(x: float) -> float:
    """Forward jump x + 1."""
    return x + 1.0


def rho(x: float) -> float:
    """Backward jump x - 1."""
    return x - 1.0


@dataclass(frozen=True)
class LatticePoint:
    """A point ``offset + m`` of the lattice N_offset, m a nonnegative integer."""

    value: float
    offset: float = 0.0

    def __post_init__(self):
        m = self.value - self.offset
        if m < -_LATTICE_ATOL or abs(m - round(m)) > _LATTICE_ATOL:
            raise DomainError(f"{self.value} is not on the lattice N_{self.offset}")

    @property
    def index(self) -> int:
        return int(round(self.value - self.offset))

    def __float__(self) -> float:
        return float(self.value)


def rising_factorial(x: float, k: float) -> float:
    """Gamma(x + k) / Gamma(x), for x > 0 and x + k > 0."""
    x = float(x)
    k = float(k)
    if x <= 0 or x + k <= 0:
        raise DomainError(f"rising factorial needs x > 0 and x + k > 0, got ({x}, {k})")
    if k >= 0 and _is_int(k) and k <= _EXACT_MAX:
        out = 1.0
        for j in range(int(k)):
            out *= x + j
        return out
    return math.exp(gammaln(x + k) - gammaln(x))


def falling_factorial(x: float, k: float) -> float:
    """Gamma(x + 1) / Gamma(x + 1 - k).

    Vanishes when the denominator hits a pole with integer ``k``
    (e.g. integer x < k); non-integer pole configurations are rejected.
    """
    x = float(x)
    k = float(k)
    if x + 1 <= 0:
        raise DomainError(f"falling factorial needs x + 1 > 0, got x={x}")
    if k >= 0 and _is_int(k) and k <= _EXACT_MAX:
        out = 1.0
        for j in range(int(k)):
            out *= x - j
        return out
    b = x + 1 - k
    if b > 0:
        return math.exp(gammaln(x + 1) - gammaln(b))
    if _is_int(b):
        if _is_int(k) and _is_int(x):
            return 0.0
        raise DomainError(f"falling factorial pole at Gamma({b}) with x={x}, k={k}")
    # b negative, non-integer: Gamma(b) finite with sign (-1)^ceil(-b)
    sign = -1.0 if math.ceil(-b) % 2 else 1.0
    return sign * math.exp(gammaln(x + 1) - gammaln(b))


def taylor_monomial(kind: str, k: float, x: float) -> float:
    """h_k(x) on the delta (falling) or nabla (rising) lattice."""
    if kind == "delta":
        num = falling_factorial(x, k)
    elif kind == "nabla":
        num = rising_factorial(x, k)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return num / math.gamma(k + 1) if k + 1 < 171 else num * math.exp(-gammaln(k + 1))


def generalized_binomial(a: float, j: int) -> float:
    """a (a-1) ... (a-j+1) / j! for real ``a`` and integer j >= 0."""
    if j < 0 or not _is_int(j):
        raise DomainError(f"binomial index must be a nonnegative integer, got {j}")
    out = 1.0
    for m in range(int(j)):
        out *= (a - m) / (m + 1)
    return out


def delta_exponential(beta: float, x: float) -> float:
    """(1 + beta)^sigma(x), the denominator of the delta gamma pmf."""
    if beta <= -1:
        raise DomainError(f"delta exponential needs beta > -1, got {beta}")
    return (1.0 + beta) ** sigma(float(x))


def nabla_exponential(beta: float, x: float) -> float:
    """(1 - beta)^(-rho(x)); the pmf denominator of the nabla gamma family."""
    if not 0 < beta < 1:
        raise DomainError(f"nabla exponential needs 0 < beta < 1, got {beta}")
    return (1.0 - beta) ** (-rho(float(x)))


# Vectorized counterparts used by the series code.  ``k`` is a scalar order.

def rising_factorial_vec(x, k: float):
    """Elementwise Gamma(x + k) / Gamma(x) for an array of x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x + k <= 0):
        raise DomainError("rising factorial needs x > 0 and x + k > 0")
    if k >= 0 and _is_int(k) and k <= _EXACT_MAX:
        out = np.ones_like(x)
        for j in range(int(k)):
            out = out * (x + j)
        return out
    return np.exp(gammaln(x + k) - gammaln(x))


def falling_factorial_vec(x, k: int):
    """Elementwise x (x-1) ... (x-k+1) for integer k >= 0 (zero past integer x)."""
    if k < 0 or not _is_int(k):
        raise DomainError("vectorized falling factorial needs integer k >= 0")
    x = np.asarray(x, dtype=float)
    if k <= _EXACT_MAX:
        out = np.ones_like(x)
        for j in range(int(k)):
            out = out * (x - j)
        return out
    out = np.zeros_like(x)
    ok = x + 1 - k > 0
    out[ok] = np.exp(gammaln(x[ok] + 1) - gammaln(x[ok] + 1 - k))
    return out
