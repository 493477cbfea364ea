"""Conic divisor bookkeeping, Gauss-Bonnet-Chern arithmetic, and coordinate maps.

Curvature totals are carried in units of pi^2 throughout (the natural unit in
dimension 4, where the per-point conic contribution is 8 pi^2 beta), so the
interesting golden values stay exactly representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence


class DivisorError(ValueError):
    """Invalid conic divisor or classification input."""


@dataclass(frozen=True)
class ConicDivisor:
    """Marked points with cone indices beta in (-1, 0), sorted ascending."""

    entries: tuple[tuple[str, float], ...]

    @staticmethod
    def from_betas(betas: Sequence[float], labels: Sequence[str] | None = None) -> "ConicDivisor":
        if labels is None:
            labels = [f"p{i+1}" for i in range(len(betas))]
        if len(labels) != len(betas):
            raise DivisorError("labels and betas must align")
        for b in betas:
            if not (-1.0 < b < 0.0):
                raise DivisorError(f"cone index {b} outside the open interval (-1, 0)")
        pairs = sorted(zip(labels, betas), key=lambda lb: lb[1])
        return ConicDivisor(tuple(pairs))

    @property
    def betas(self) -> tuple[float, ...]:
        return tuple(b for _, b in self.entries)

    @property
    def beta_min(self) -> float:
        if not self.entries:
            raise DivisorError("empty divisor has no minimal index")
        return self.entries[0][1]

    def sum_betas(self) -> float:
        return math.fsum(self.betas)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ClassificationInput:
    """Background total curvature (units of pi^2) plus a divisor."""

    k_g0_pi2: float
    divisor: ConicDivisor
    dimension: int = 4

    def __post_init__(self):
        if self.dimension < 4 or self.dimension % 2 != 0:
            raise DivisorError(f"dimension must be even and >= 4, got {self.dimension}")


@dataclass(frozen=True)
class Criticality:
    label: str  # "subcritical" | "critical" | "supercritical"
    margin_pi2: float
    beta_min: float


def sphere_volume(n: int) -> float:
    """Volume of the unit n-sphere, 2 pi^((n+1)/2) / Gamma((n+1)/2)."""
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def gamma_n(n: int) -> float:
    """Per-point conic curvature quantum (n-1)! |S^n| / 2; equals 8 pi^2 at n=4."""
    if n < 4 or n % 2 != 0:
        raise DivisorError(f"dimension must be even and >= 4, got {n}")
    return math.factorial(n - 1) * sphere_volume(n) / 2.0


def gamma_n_pi2(n: int) -> float:
    """gamma_n in units of pi^2 (exactly 8.0 in dimension 4)."""
    if n == 4:
        return 8.0
    return gamma_n(n) / math.pi ** 2


def total_q_integral_pi2(inp: ClassificationInput) -> float:
    """Total curvature of the conic metric: k_g0 + gamma_n * sum(beta_i)."""
    return inp.k_g0_pi2 + gamma_n_pi2(inp.dimension) * inp.divisor.sum_betas()


def classify(inp: ClassificationInput, tol_pi2: float | None = None) -> Criticality:
    """Trichotomy by the sign of total - gamma_n (2 + 2 beta_min).

    The margin is reported raw (units of pi^2) so callers can re-decide ties;
    |margin| <= tol counts as critical.  Default tolerance is 1e-12 * gamma_n.
    """
    if len(inp.divisor) == 0:
        raise DivisorError("classification threshold undefined for an empty divisor")
    g = gamma_n_pi2(inp.dimension)
    if tol_pi2 is None:
        tol_pi2 = 1e-12 * g
    beta1 = inp.divisor.beta_min
    margin = total_q_integral_pi2(inp) - g * (2.0 + 2.0 * beta1)
    if abs(margin) <= tol_pi2:
        label = "critical"
    elif margin < 0:
        label = "subcritical"
    else:
        label = "supercritical"
    return Criticality(label=label, margin_pi2=margin, beta_min=beta1)


# ---------------------------------------------------------------------------
# Coordinate maps between cylinder, plane, and inverted coordinates
# ---------------------------------------------------------------------------

def cylinder_to_plane(ts: Sequence[float], vs: Sequence[float]) -> tuple[list[float], list[float]]:
    """Map a cylinder profile v(t) to the radial plane profile u(r).

    Under r = e^t the conformal factors match via u = v(log r) - log r.
    """
    if len(ts) != len(vs):
        raise ValueError("grid and values must align")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t grid must be strictly increasing")
    rs = [math.exp(t) for t in ts]
    us = [v - t for t, v in zip(ts, vs)]
    return rs, us


def kelvin_invert(rs: Sequence[float], us: Sequence[float], beta_inf: float
                  ) -> tuple[list[float], list[float]]:
    """Move a conical singularity at infinity to the origin.

    w(s) = u(1/s) - (2 + beta) log s on the reciprocal grid s = 1/r; applying
    the map twice with the same beta is the identity on the common grid.
    """
    if len(rs) != len(us):
        raise ValueError("grid and values must align")
    if any(r <= 0 for r in rs):
        raise ValueError("radial grid must be strictly positive (r = 0 cannot invert)")
    pairs = sorted(((1.0 / r, u - (2.0 + beta_inf) * math.log(1.0 / r))
                    for r, u in zip(rs, us)))
    ss = [s for s, _ in pairs]
    ws = [w for _, w in pairs]
    return ss, ws
