"""Bare energy-level structure of the transmon and the flux-tunable CSFQ.

Both qubits are diagonalized numerically from their circuit parameters:
the transmon in the charge basis, the CSFQ on a periodic phase grid after
reducing its two-dimensional potential to the soft (in-phase) direction.
All frequencies are linear frequencies in GHz; angular factors appear only
inside time-evolution exponents elsewhere in the package.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import RegimeError, TruncationError

__all__ = [
    "TransmonParams",
    "CsfqParams",
    "FluxBias",
    "SpectrumTable",
    "transmon_spectrum",
    "csfq_spectrum",
    "flux_derivative",
]


@dataclass(frozen=True)
class TransmonParams:
    """Transmon junction and charging energies, both in GHz."""

    e_j: float
    e_c: float
    n_levels: int = 6
    charge_cutoff: int = 30

    def __post_init__(self):
        if self.e_j <= 0 or self.e_c <= 0:
            raise ValueError("E_J and E_C must be positive")
        if self.n_levels < 3:
            raise ValueError("need at least 3 levels")
        if self.n_levels > 2 * self.charge_cutoff:
            raise ValueError("n_levels exceeds charge-basis size")
        if self.e_j / self.e_c <= 10:
            warnings.warn(
                f"E_J/E_C = {self.e_j / self.e_c:.1f} is outside the transmon "
                "regime (expected > 10)",
                stacklevel=3,
            )


@dataclass(frozen=True)
class CsfqParams:
    """Capacitively shunted flux qubit parameters.

    ``e_j`` is the Josephson energy of each large junction and ``alpha``
    the small/large critical-current ratio.  ``e_c`` is the charging
    energy of the qubit mode as commonly quoted for the half-phase
    (junction-branch) variable; see :func:`csfq_spectrum` for how it
    enters the kinetic term.
    """

    e_j: float
    e_c: float
    alpha: float
    n_levels: int = 6
    basis_size: int = 201

    def __post_init__(self):
        if self.e_j <= 0 or self.e_c <= 0:
            raise ValueError("E_J and E_C must be positive")
        if not 0 < self.alpha < 0.5:
            raise RegimeError(
                f"alpha = {self.alpha} outside the single-well CSFQ regime "
                "(0 < alpha < 0.5)"
            )
        if self.basis_size < 2 * self.n_levels + 5:
            raise ValueError("basis_size too small for requested levels")


@dataclass(frozen=True)
class FluxBias:
    """Normalized flux bias f = Phi/Phi_0; the sweet spot sits at 0.5."""

    f: float

    def __post_init__(self):
        if not 0.0 <= self.f <= 1.0:
            raise ValueError(f"flux bias {self.f} outside [0, 1]")


@dataclass(frozen=True)
class SpectrumTable:
    """Eigenenergies (ground state at zero), transitions and anharmonicities.

    ``transitions[n]`` is the n -> n+1 frequency and ``anharmonicities[n]``
    is ``transitions[n+1] - transitions[n]``, all in GHz.
    """

    levels: np.ndarray
    transitions: np.ndarray = field(init=False)
    anharmonicities: np.ndarray = field(init=False)

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        levels = levels - levels[0]
        if np.any(np.diff(levels) <= 0):
            raise ValueError("levels must be strictly increasing")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "transitions", np.diff(levels))
        object.__setattr__(self, "anharmonicities", np.diff(self.transitions))

    @property
    def omega01(self) -> float:
        return float(self.transitions[0])

    @property
    def delta(self) -> float:
        return float(self.anharmonicities[0])

    def transition(self, n: int) -> float:
        return float(self.transitions[n])


def _transmon_levels(e_j: float, e_c: float, ng: float, cutoff: int, n_levels: int) -> np.ndarray:
    n = np.arange(-cutoff, cutoff + 1)
    diag = 4.0 * e_c * (n - ng) ** 2
    off = np.full(2 * cutoff, -e_j / 2.0)
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_levels - 1))[0]
    return vals


def transmon_spectrum(p: TransmonParams, ng: float = 0.0) -> SpectrumTable:
    """Diagonalize H = 4 E_C (n - ng)^2 - E_J cos(phi) in the charge basis.

    Raises TruncationError if doubling the charge cutoff still moves a
    retained transition by more than 1 kHz.
    """
    if p.charge_cutoff < 10:
        raise ValueError("charge_cutoff must be at least 10")
    vals = _transmon_levels(p.e_j, p.e_c, ng, p.charge_cutoff, p.n_levels)
    check = _transmon_levels(p.e_j, p.e_c, ng, 2 * p.charge_cutoff, p.n_levels)
    shift = np.max(np.abs(np.diff(vals) - np.diff(check)))
    if shift > 1e-6:
        raise TruncationError(
            f"transmon transitions move by {shift * 1e6:.2f} kHz when the "
            f"charge cutoff is doubled from {p.charge_cutoff}"
        )
    return SpectrumTable(levels=vals)


def _csfq_hamiltonian(p: CsfqParams, f: float, n_grid: int) -> np.ndarray:
    # Uniform phase grid over [-pi, pi) with periodic boundary; the kinetic
    # term is spectral (exact integer charge states under the DFT).  The
    # quoted charging energy refers to the half-phase variable of the small
    # junction branch, which spans twice the reduced phase phi_m, so the
    # kinetic coefficient for n_m is E_C (not 4 E_C).
    phi = -np.pi + 2.0 * np.pi * np.arange(n_grid) / n_grid
    potential = -2.0 * p.e_j * np.cos(phi) - p.alpha * p.e_j * np.cos(
        2.0 * np.pi * f - 2.0 * phi
    )
    charge = np.fft.fftfreq(n_grid, d=1.0 / n_grid)
    kinetic_diag = p.e_c * charge**2
    dft = np.fft.fft(np.eye(n_grid), axis=0) / np.sqrt(n_grid)
    kinetic = dft.conj().T @ (kinetic_diag[:, None] * dft)
    h = kinetic + np.diag(potential)
    return 0.5 * (h + h.conj().T)


def _csfq_levels(p: CsfqParams, f: float, n_grid: int) -> np.ndarray:
    h = _csfq_hamiltonian(p, f, n_grid)
    vals = np.linalg.eigvalsh(h)
    return vals[: p.n_levels]


def csfq_spectrum(p: CsfqParams, f: FluxBias | float) -> SpectrumTable:
    """Diagonalize the 1D CSFQ Hamiltonian at a given flux bias.

    The potential is -2 E_J cos(phi) - alpha E_J cos(2 pi f - 2 phi) with
    the fast out-of-phase mode frozen out.  Raises TruncationError if the
    lowest retained levels have not converged in basis size.
    """
    fb = f if isinstance(f, FluxBias) else FluxBias(f)
    vals = _csfq_levels(p, fb.f, p.basis_size)
    check = _csfq_levels(p, fb.f, 2 * p.basis_size + 1)
    shift = np.max(np.abs(np.diff(vals) - np.diff(check)))
    if shift > 1e-6:
        raise TruncationError(
            f"CSFQ transitions move by {shift * 1e6:.2f} kHz when the phase "
            f"grid is doubled from {p.basis_size} points"
        )
    return SpectrumTable(levels=vals)


def flux_derivative(p: CsfqParams, f: FluxBias | float, step: float = 1e-4) -> float:
    """Qubit-frequency gradient d(omega01)/df in GHz per Phi_0.

    Central finite difference of the 0 -> 1 transition.  Vanishes at the
    f = 0.5 sweet spot by symmetry; positive for f slightly above 0.5
    (the CSFQ frequency rises away from the sweet spot).
    """
    fb = f if isinstance(f, FluxBias) else FluxBias(f)
    if not 0.0 < fb.f < 1.0:
        raise ValueError("flux derivative needs f in the open interval (0, 1)")
    if step <= 0 or step < 1e-9:
        raise ValueError("finite-difference step underflow")
    up = csfq_spectrum(p, FluxBias(fb.f + step)).omega01
    down = csfq_spectrum(p, FluxBias(fb.f - step)).omega01
    return (up - down) / (2.0 * step)
