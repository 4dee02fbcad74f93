"""Truncated Fock-space harmonic oscillator: states, wavefunctions, evolution.

Everything is dimensionless: positions in units of sqrt(hbar/(m*omega)) = 1
and hbar = 1, so the energy ladder is n*omega or (n + 1/2)*omega depending on
the phase convention of the basis.  The two conventions differ by a global
phase only; any expectation value or weak value computed downstream is
identical under either choice.

States are plain complex amplitude vectors over |0>, ..., |dim-1>.  Bras are
represented by :class:`DualState`, whose components d_n satisfy
<Phi| = sum_n d_n <n| (i.e. d_n is the conjugate of the corresponding ket
amplitude).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import TruncationError

COHERENT_TAIL_LIMIT = 1e-10


@dataclass(frozen=True)
class OscillatorBasis:
    """Truncated number basis of a single oscillator mode.

    dim:
        truncation size; the basis spans |0> .. |dim-1>.
    omega:
        angular frequency in rad/s.
    include_zero_point:
        if True the evolution phases use E_n = (n + 1/2)*omega, otherwise
        E_n = n*omega.
    """

    dim: int = 64
    omega: float = 1.0
    include_zero_point: bool = False

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"basis dim must be >= 2, got {self.dim}")
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    def energies(self) -> np.ndarray:
        n = np.arange(self.dim, dtype=float)
        if self.include_zero_point:
            n = n + 0.5
        return self.omega * n

    def period(self) -> float:
        return 2.0 * np.pi / self.omega


def _normalized(amplitudes, dim) -> np.ndarray:
    a = np.asarray(amplitudes, dtype=np.complex128).copy()
    if a.shape != (dim,):
        raise ValueError(f"amplitude vector has shape {a.shape}, expected ({dim},)")
    norm = np.linalg.norm(a)
    if norm == 0.0:
        raise ValueError("cannot normalize a zero amplitude vector")
    return a / norm


@dataclass(frozen=True, eq=False)
class StateVector:
    """Forward-evolving ket; amplitudes are normalized on construction."""

    amplitudes: np.ndarray
    basis: OscillatorBasis

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _normalized(self.amplitudes, self.basis.dim))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def dual(self) -> "DualState":
        """The bra <psi| of this ket."""
        return DualState(np.conj(self.amplitudes), self.basis)

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|^2; the global-phase-free comparison."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass(frozen=True, eq=False)
class DualState:
    """Backward-evolving bra with row components d_n: <Phi| = sum d_n <n|."""

    amplitudes: np.ndarray
    basis: OscillatorBasis

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _normalized(self.amplitudes, self.basis.dim))


def overlap(dual: DualState, state: StateVector) -> complex:
    """<Phi|Psi> for a bra and a ket over the same basis."""
    return complex(np.dot(dual.amplitudes, state.amplitudes))


def number_state(basis: OscillatorBasis, n: int) -> StateVector:
    """The energy eigenstate |n>."""
    if not 0 <= n < basis.dim:
        raise ValueError(f"number state index {n} outside [0, {basis.dim})")
    amps = np.zeros(basis.dim, dtype=np.complex128)
    amps[n] = 1.0
    return StateVector(amps, basis)


def coherent_tail(dim: int, alpha: complex) -> float:
    """Probability weight of a coherent state beyond the truncation.

    This is the Poisson survival function sum_{n>=dim} |alpha|^2n e^-|alpha|^2 / n!.
    """
    lam = abs(alpha) ** 2
    if lam == 0.0:
        return 0.0
    return float(special.gammainc(dim, lam))


def required_coherent_dim(alpha: complex, limit: float = COHERENT_TAIL_LIMIT) -> int:
    """Smallest truncation for which the coherent tail drops below `limit`."""
    dim = 2
    while coherent_tail(dim, alpha) >= limit:
        dim += 1
        if dim > 100_000:
            raise TruncationError(f"no reasonable truncation holds alpha={alpha!r}")
    return dim


def coherent_state(basis: OscillatorBasis, alpha: complex) -> StateVector:
    """The coherent state |alpha> with c_n = e^{-|a|^2/2} a^n / sqrt(n!).

    The truncated amplitude vector is renormalized; construction fails if the
    discarded tail weight exceeds COHERENT_TAIL_LIMIT.
    """
    tail = coherent_tail(basis.dim, alpha)
    if tail >= COHERENT_TAIL_LIMIT:
        need = required_coherent_dim(alpha)
        raise TruncationError(
            f"coherent state alpha={alpha!r} has truncation tail {tail:.3e} "
            f"on dim={basis.dim}; requires dim >= {need}"
        )
    if alpha == 0:
        return number_state(basis, 0)
    n = np.arange(basis.dim)
    # log-domain to keep n! under control for large dim
    log_mag = -abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - special.gammaln(n + 1) / 2
    amps = np.exp(log_mag) * np.exp(1j * np.angle(alpha) * n)
    return StateVector(amps, basis)


def evolve(state: StateVector, t: float) -> StateVector:
    """Free evolution: c_n -> e^{-i E_n t} c_n."""
    phases = np.exp(-1j * state.basis.energies() * t)
    return StateVector(state.amplitudes * phases, state.basis)


def backward_state(final: DualState, t: float, duration: float) -> DualState:
    """The backward-evolving bra at time t: <Phi_f(t)| = <Phi_f| U(duration - t).

    For a coherent bra <alpha| this is the bra of |alpha e^{i omega (T-t)}| up
    to a global phase, so its position-space mean sits at
    sqrt(2)|alpha| cos(omega (T-t) + delta).
    """
    if not 0.0 <= t <= duration:
        raise ValueError(f"t={t} outside the measurement window [0, {duration}]")
    phases = np.exp(-1j * final.basis.energies() * (duration - t))
    return DualState(final.amplitudes * phases, final.basis)


def hermite_functions(x, n_max: int) -> np.ndarray:
    """Orthonormal Hermite-Gaussian eigenfunctions phi_0..phi_{n_max-1} at x.

    Uses the stable three-term recurrence on the normalized functions
    phi_{n+1} = sqrt(2/(n+1)) x phi_n - sqrt(n/(n+1)) phi_{n-1},
    which never forms raw Hermite polynomials and stays finite for large n.
    Returns an array of shape (n_max,) + shape(x).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max,) + x.shape, dtype=float)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1.0)) * out[n - 1]
    return out


def position_wavefunction(state: StateVector, x):
    """psi(x) = sum_n c_n phi_n(x); scalar in, scalar out."""
    xarr = np.asarray(x, dtype=float)
    phi = hermite_functions(xarr, state.basis.dim)
    psi = np.tensordot(state.amplitudes, phi, axes=(0, 0))
    return complex(psi) if np.isscalar(x) or xarr.shape == () else psi


def hamiltonian(basis: OscillatorBasis) -> np.ndarray:
    """H as a dense complex matrix (diagonal in this basis)."""
    return np.diag(basis.energies()).astype(np.complex128)
