"""Interval projection operators in the number basis and their Heisenberg dynamics.

The projector onto a position interval V has matrix elements
<m|P_V|n> = integral over V of phi_m(x) phi_n(x) dx, computed by adaptive
composite Gauss-Legendre quadrature.  In the Heisenberg picture the matrix
acquires phases e^{-i(m-n) omega t}; averaging those phases over a
measurement window suppresses every off-diagonal entry by at least
2 / (|m-n| omega T).
"""

from dataclasses import dataclass
from math import isinf, sqrt

import numpy as np

from .errors import QuadratureError
from .oscillator import OscillatorBasis, hermite_functions
from .quadrature import panel_nodes

ENTRY_TOL = 1e-10
MAX_PANELS = 2 ** 20
_PANEL_CHUNK = 8192


@dataclass(frozen=True)
class IntervalRegion:
    """A position interval [lower, upper]; either end may be infinite."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"region requires lower < upper, got [{self.lower}, {self.upper}]")

    def contains(self, x):
        return (np.asarray(x) >= self.lower) & (np.asarray(x) <= self.upper)

    def is_finite(self) -> bool:
        return not (isinf(self.lower) or isinf(self.upper))


FULL_LINE = IntervalRegion(-np.inf, np.inf)


@dataclass(frozen=True, eq=False)
class ProjectorMatrix:
    """Dense complex matrix of P_V on a truncated basis."""

    entries: np.ndarray
    region: IntervalRegion
    basis: OscillatorBasis

    def __post_init__(self):
        h = np.max(np.abs(self.entries - self.entries.conj().T))
        if h > 1e-10:
            raise ValueError(f"projector entries not Hermitian (defect {h:.3e})")


def _integration_bounds(region: IntervalRegion, basis: OscillatorBasis):
    # Beyond the top basis state's classical turning point the integrand is
    # Gaussian-suppressed; 10 extra widths put it far below ENTRY_TOL.
    reach = sqrt(2.0 * basis.dim - 1.0) + 10.0
    a = max(region.lower, -reach)
    b = min(region.upper, reach)
    return a, b


def _entry_integrals(basis: OscillatorBasis, a: float, b: float, panels: int,
                     order: int) -> np.ndarray:
    total = np.zeros((basis.dim, basis.dim))
    done = 0
    while done < panels:
        chunk = min(_PANEL_CHUNK, panels - done)
        lo = a + (b - a) * done / panels
        hi = a + (b - a) * (done + chunk) / panels
        x, w = panel_nodes(lo, hi, chunk, order)
        phi = hermite_functions(x, basis.dim)
        total += (phi * w) @ phi.T
        done += chunk
    return total


def projector_matrix(region: IntervalRegion, basis: OscillatorBasis,
                     tol: float = ENTRY_TOL, order: int = 16,
                     max_panels: int = MAX_PANELS) -> ProjectorMatrix:
    """Build P_V by panel-doubling quadrature to `tol` per entry."""
    a, b = _integration_bounds(region, basis)
    if not a < b:
        return ProjectorMatrix(np.zeros((basis.dim, basis.dim), dtype=np.complex128),
                               region, basis)
    panels = 1
    prev = _entry_integrals(basis, a, b, panels, order)
    while panels < max_panels:
        panels *= 2
        cur = _entry_integrals(basis, a, b, panels, order)
        delta = float(np.max(np.abs(cur - prev)))
        if delta < tol:
            sym = 0.5 * (cur + cur.T)  # exact symmetry despite roundoff
            return ProjectorMatrix(sym.astype(np.complex128), region, basis)
        prev = cur
    raise QuadratureError(
        f"projector quadrature on [{a}, {b}] stalled at delta={delta:.3e} "
        f"(tol {tol:g}, {max_panels} panels)", achieved=delta)


def _phases(basis: OscillatorBasis, t: float) -> np.ndarray:
    m = np.arange(basis.dim)
    return np.exp(-1j * (m[:, None] - m[None, :]) * basis.omega * t)


def heisenberg_projector(P: ProjectorMatrix, t: float) -> np.ndarray:
    """P_V(t) with entries e^{-i(m-n) omega t} <m|P_V|n>."""
    return P.entries * _phases(P.basis, t)


def time_averaged_projector(P: ProjectorMatrix, duration: float) -> np.ndarray:
    """(1/T) integral of P_V(t) over [0, T], phase factors in closed form."""
    if not duration > 0:
        raise ValueError(f"averaging window must be positive, got {duration}")
    m = np.arange(P.basis.dim)
    delta = (m[:, None] - m[None, :]) * P.basis.omega
    z = delta * duration
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(z == 0.0, 1.0 + 0.0j, (1.0 - np.exp(-1j * z)) / (1j * z))
    return P.entries * factor


def bin_regions(width: float = 0.1, extent: float = 6.0) -> list[IntervalRegion]:
    """Contiguous bins of `width` covering [-extent, extent] for sketching."""
    if width <= 0 or extent <= 0:
        raise ValueError("bin width and extent must be positive")
    n = int(round(2.0 * extent / width))
    edges = np.linspace(-extent, extent, n + 1)
    return [IntervalRegion(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:])]
