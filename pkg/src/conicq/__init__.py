"""Constant Q-curvature conic structures on the 4-sphere.

Four computational pieces behind one CLI:

- geometry: divisor bookkeeping, Gauss-Bonnet-Chern totals, the
  subcritical/critical/supercritical trichotomy, and the cylinder/plane/
  inverted coordinate maps.
- ode: the radial fourth-order dynamics as a first-order system with its
  conserved quantity, the closed-form round sphere, and an adaptive
  embedded Runge-Kutta integrator with event detection.
- shooting: the bounded-orbit search q0 = sup Q by bisection on a trapped/
  escaped membership oracle, cone-angle extraction, and curvature
  reconstruction.
- polyexp: exact-rational radial-log polynomial calculus, the spectrum of
  r^2*Delta on homogeneous polynomials, biharmonic solvers including the
  logarithmic resonant channel, and the formal expansion generator near a
  conical singularity.
- adams: sharp-constant evaluation, the exact 1-D reduction of the weighted
  exponential integral, and sharpness probes for the singular
  Moser-Trudinger-Adams inequality.
"""

from . import adams, cli, geometry, ode, polyexp, shooting

__version__ = "0.1.0"

__all__ = ["adams", "cli", "geometry", "ode", "polyexp", "shooting", "__version__"]
