"""Cross-resonance drive in the dressed rotating frame.

A microwave tone on the control qubit (the CSFQ) at the dressed target
frequency becomes, after the rotating-wave approximation, a static 15x15
Hamiltonian on the states with at most four total excitations.  Least-action
block diagonalization decouples the computational 4x4 block, whose Pauli
decomposition yields the effective gate generators: the ZX rate, the
drive-dependent ZZ, and the classical-crosstalk terms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import golden

from .coupling import DressedFrame
from .errors import BlockDiagonalizationError, FitError, LabelingError

__all__ = [
    "CANONICAL_STATES",
    "CrDrive",
    "TruncatedFrame",
    "BlockDecomposition",
    "PauliCoefficients",
    "build_rotating_hamiltonian",
    "least_action_block_diag",
    "pauli_decompose",
    "pauli_coefficients",
    "echoed_cr_frequency",
    "gamma_slope",
    "dynamic_zz",
    "dynamic_zz_auto",
    "anticrossing_amplitude",
    "fit_drive_expansion",
]

# States |n1 n2> with n1 + n2 <= 4, in the conventional order
CANONICAL_STATES: tuple[tuple[int, int], ...] = (
    (0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0), (0, 3), (1, 2),
    (2, 1), (3, 0), (0, 4), (1, 3), (2, 2), (3, 1), (4, 0),
)

_PAULI = {
    "I": np.eye(2),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]]),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]]),
}


def pauli2(label: str) -> np.ndarray:
    """Two-qubit Pauli matrix from a two-letter label, control first."""
    return np.kron(_PAULI[label[0]], _PAULI[label[1]])


@dataclass(frozen=True)
class CrDrive:
    """CR tone: amplitude in MHz, frequency in GHz, phases in radians.

    ``r`` scales the stray copy of the drive felt by the target qubit
    (classical crosstalk) and ``phi1`` is its phase lag.
    """

    omega: float
    omega_d: float
    phi0: float = np.pi
    phi1: float = np.pi
    r: float = 0.0

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("drive amplitude must be nonnegative")
        if self.r < 0:
            raise ValueError("crosstalk scale must be nonnegative")

    def negated(self) -> "CrDrive":
        """The echoed partner pulse: both drive terms flip sign."""
        return CrDrive(
            omega=self.omega,
            omega_d=self.omega_d,
            phi0=self.phi0 + np.pi,
            phi1=self.phi1 + np.pi,
            r=self.r,
        )


@dataclass(frozen=True)
class TruncatedFrame:
    """Rotating-frame Hamiltonian on the 15 lowest-excitation states (GHz)."""

    states: tuple[tuple[int, int], ...]
    h_rot: np.ndarray
    drive: CrDrive

    def index(self, n1: int, n2: int) -> int:
        return self.states.index((n1, n2))


def _lowering_ops(dims: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    d1, d2 = dims
    a1 = np.kron(np.diag(np.sqrt(np.arange(1, d1)), k=1), np.eye(d2))
    a2 = np.kron(np.eye(d1), np.diag(np.sqrt(np.arange(1, d2)), k=1))
    return a1, a2


def build_rotating_hamiltonian(d: DressedFrame, drive: CrDrive) -> TruncatedFrame:
    """RWA Hamiltonian of the driven system in the dressed rotating frame.

    The dressed energies are shifted by -omega_d times the excitation
    number; the bare ladder operators of control and target are conjugated
    by the dressing unitary before the rotating-wave truncation, so the
    drive inherits every J-induced matrix element.
    """
    d1, d2 = d.dims
    if d1 < 5 or d2 < 5:
        raise ValueError("dressed frame must retain at least 5 levels per qubit")
    if abs(drive.omega_d - d.omega2) > 0.100:
        warnings.warn(
            f"drive frequency is {abs(drive.omega_d - d.omega2) * 1e3:.0f} MHz "
            "away from the dressed target transition",
            stacklevel=2,
        )
    a1, a2 = _lowering_ops(d.dims)
    a1_dressed = d.u.conj().T @ a1 @ d.u
    a2_dressed = d.u.conj().T @ a2 @ d.u

    n_exc = np.add.outer(np.arange(d1), np.arange(d2)).reshape(-1)
    h_full = np.diag(d.dressed_levels.reshape(-1) - drive.omega_d * n_exc).astype(
        complex
    )
    amp = drive.omega * 1e-3 / 2.0  # MHz -> GHz, cos -> RWA half
    h_full += amp * (np.exp(1j * drive.phi0) * a1_dressed
                     + np.exp(-1j * drive.phi0) * a1_dressed.conj().T)
    h_full += drive.r * amp * (np.exp(1j * drive.phi1) * a2_dressed
                               + np.exp(-1j * drive.phi1) * a2_dressed.conj().T)

    keep = [n1 * d2 + n2 for n1, n2 in CANONICAL_STATES]
    h15 = h_full[np.ix_(keep, keep)]
    h15 = 0.5 * (h15 + h15.conj().T)
    return TruncatedFrame(states=CANONICAL_STATES, h_rot=h15, drive=drive)


@dataclass(frozen=True)
class BlockDecomposition:
    """Result of least-action block diagonalization of the rotating frame.

    ``h_comp`` spans {00, 01, 10, 11}; its control-conditioned halves are
    exposed as ``h_ctrl0``/``h_ctrl1``.  ``t_matrix`` is the least-action
    unitary, closest to the identity among block diagonalizers.
    """

    h_comp: np.ndarray
    h_leak: np.ndarray
    t_matrix: np.ndarray

    @property
    def h_ctrl0(self) -> np.ndarray:
        return self.h_comp[:2, :2]

    @property
    def h_ctrl1(self) -> np.ndarray:
        return self.h_comp[2:, 2:]


def _assign_columns(vecs: np.ndarray) -> np.ndarray:
    """Order eigenvector columns so column j belongs to basis state j.

    Globally optimal overlap assignment; the least-action unitary is
    invariant under within-block reassignment, so only the block split
    matters here.
    """
    from scipy.optimize import linear_sum_assignment

    weights = np.abs(vecs) ** 2
    rows, cols = linear_sum_assignment(-weights)
    perm = np.empty(vecs.shape[1], dtype=int)
    perm[rows] = cols
    return perm


_BLOCK_SPLIT = ((0, 2), (2, 4), (4, 15))


def least_action_block_diag(
    t: TruncatedFrame, residue_tol: float = 1e-10
) -> BlockDecomposition:
    """Decouple the qubit blocks with the least-action unitary.

    The partition is {00, 01}, {10, 11} and the eleven leakage states:
    eliminating the far-off-resonant drive on the control ladder this way
    folds its Stark shifts into the block diagonals, which is what makes
    the effective ZZ grow with drive amplitude.  T = X X_BD^dagger
    X_P^{-1/2} with X the label-ordered eigenvector matrix, X_BD its
    block-diagonal part and X_P = X_BD X_BD^dagger.  Fails with
    BlockDiagonalizationError when a block of X turns singular, which
    happens when a drive-induced anticrossing mixes the blocks beyond
    repair.
    """
    h = t.h_rot
    vals, vecs = np.linalg.eigh(h)
    perm = _assign_columns(vecs)
    x = vecs[:, perm]

    x_bd = np.zeros_like(x)
    for lo, hi in _BLOCK_SPLIT:
        x_bd[lo:hi, lo:hi] = x[lo:hi, lo:hi]
    x_p = x_bd @ x_bd.conj().T

    p_vals, p_vecs = np.linalg.eigh(x_p)
    if p_vals.min() < 1e-8:
        raise BlockDiagonalizationError(
            f"block of the eigenvector matrix is singular at drive amplitude "
            f"{t.drive.omega:.3f} MHz (qubit and leakage states are "
            "strongly mixed)"
        )
    x_p_inv_sqrt = p_vecs @ np.diag(p_vals**-0.5) @ p_vecs.conj().T
    t_mat = x @ x_bd.conj().T @ x_p_inv_sqrt

    h_bd = t_mat.conj().T @ h @ t_mat
    off = h_bd.copy()
    for lo, hi in _BLOCK_SPLIT:
        off[lo:hi, lo:hi] = 0.0
    scale = np.linalg.norm(h_bd)
    if scale > 0 and np.linalg.norm(off) / scale > residue_tol:
        raise BlockDiagonalizationError(
            f"off-block residue {np.linalg.norm(off) / scale:.2e} exceeds "
            f"{residue_tol:.0e} at drive amplitude {t.drive.omega:.3f} MHz"
        )
    h_comp = np.zeros((4, 4), dtype=complex)
    h_comp[:2, :2] = h_bd[:2, :2]
    h_comp[2:, 2:] = h_bd[2:4, 2:4]
    h_comp = 0.5 * (h_comp + h_comp.conj().T)
    h_leak = 0.5 * (h_bd[4:, 4:] + h_bd[4:, 4:].conj().T)
    return BlockDecomposition(h_comp=h_comp, h_leak=h_leak, t_matrix=t_mat)


@dataclass(frozen=True)
class PauliCoefficients:
    """Effective-Hamiltonian Pauli components in linear MHz."""

    beta_zi: float
    beta_ix: float
    beta_iy: float
    beta_zx: float
    beta_zy: float
    beta_zz: float


def pauli_decompose(h4: np.ndarray) -> PauliCoefficients:
    """Project a 4x4 computational block (GHz) onto the CR Pauli terms.

    The single-Pauli terms carry the conventional /2 normalization and ZZ
    carries /4; the identity component is dropped as a global phase.
    Output in MHz.
    """
    h4 = np.asarray(h4)
    if h4.shape != (4, 4):
        raise ValueError("computational block must be 4x4")
    if np.linalg.norm(h4 - h4.conj().T) > 1e-9 * max(1.0, np.linalg.norm(h4)):
        raise ValueError("computational block must be Hermitian")

    def tr(label):
        return float(np.real(np.trace(h4 @ pauli2(label))))

    to_mhz = 1e3
    return PauliCoefficients(
        beta_zi=tr("ZI") / 2.0 * to_mhz,
        beta_ix=tr("IX") / 2.0 * to_mhz,
        beta_iy=tr("IY") / 2.0 * to_mhz,
        beta_zx=tr("ZX") / 2.0 * to_mhz,
        beta_zy=tr("ZY") / 2.0 * to_mhz,
        beta_zz=tr("ZZ") * to_mhz,
    )


def pauli_coefficients(d: DressedFrame, drive: CrDrive) -> PauliCoefficients:
    """Convenience pipeline: rotating frame, block diagonalization, projection."""
    frame = build_rotating_hamiltonian(d, drive)
    blocks = least_action_block_diag(frame)
    return pauli_decompose(blocks.h_comp)


def echoed_cr_frequency(b: PauliCoefficients) -> float:
    """Oscillation frequency of the echoed CR sequence (linear MHz).

    The two square roots add the contributions of the two control states;
    with crosstalk and ZZ absent this reduces to 2 beta_ZX.
    """
    zz_half = b.beta_zz / 2.0
    s_plus = np.sqrt((b.beta_zx + b.beta_ix) ** 2 + (b.beta_zy + b.beta_iy) ** 2 + zz_half**2)
    s_minus = np.sqrt((b.beta_zx - b.beta_ix) ** 2 + (b.beta_zy - b.beta_iy) ** 2 + zz_half**2)
    return float(s_plus + s_minus)


def gamma_slope(
    d: DressedFrame,
    drive_template: CrDrive,
    omega_lo: float = 10.0,
    omega_hi: float = 20.0,
) -> float:
    """Low-amplitude echoed-CR rate per unit drive amplitude (dimensionless).

    Finite-difference slope of f_ECR between two small amplitudes, which
    cancels the static-ZZ floor of the rate formula.
    """
    from dataclasses import replace

    f_lo = echoed_cr_frequency(pauli_coefficients(d, replace(drive_template, omega=omega_lo)))
    f_hi = echoed_cr_frequency(pauli_coefficients(d, replace(drive_template, omega=omega_hi)))
    return (f_hi - f_lo) / (omega_hi - omega_lo)


def dynamic_zz(
    d: DressedFrame,
    drive_template: CrDrive,
    amplitudes: np.ndarray | list[float],
) -> tuple[float, float]:
    """Fit beta_ZZ(Omega) = zeta0 + eta Omega^2 over a small-amplitude sweep.

    Returns (zeta0 in GHz, eta in 1/MHz).  Raises FitError when the
    quadratic model misses by more than 10% of the swept range, which
    signals proximity to the drive-induced anticrossing.
    """
    from dataclasses import replace

    amps = np.asarray(amplitudes, dtype=float)
    if len(amps) < 5:
        raise ValueError("need at least 5 amplitudes below the anticrossing")
    zz = np.array(
        [
            pauli_coefficients(d, replace(drive_template, omega=om)).beta_zz
            for om in amps
        ]
    )
    design = np.column_stack([np.ones_like(amps), amps**2])
    coef, *_ = np.linalg.lstsq(design, zz, rcond=None)
    fitted = design @ coef
    span = np.ptp(zz)
    rms = float(np.sqrt(np.mean((fitted - zz) ** 2)))
    if span > 0 and rms > 0.10 * span:
        raise FitError(
            "beta_ZZ(Omega) deviates from zeta0 + eta Omega^2 by more than "
            "10% of its range; sweep amplitudes approach the anticrossing"
        )
    zeta0_mhz, eta = coef
    return float(zeta0_mhz * 1e-3), float(eta)


def dynamic_zz_auto(
    d: DressedFrame,
    drive_template: CrDrive,
    fraction: float = 0.85,
    n_points: int = 9,
    omega_max: float = 300.0,
) -> tuple[float, float]:
    """Dynamic-ZZ fit over amplitudes spanning up to the anticrossing.

    The quadratic coefficient depends on how far the sweep reaches; the
    experimentally relevant window extends to where the echoed-CR rate
    levels off, so the default covers [0.1, 0.85] of the anticrossing
    amplitude.
    """
    om_ac = anticrossing_amplitude(d, drive_template, omega_max=omega_max)
    amps = np.linspace(0.1, fraction, n_points) * om_ac
    return dynamic_zz(d, drive_template, amps)


def _tracked_gap(d: DressedFrame, drive_template: CrDrive, omega: float) -> float:
    """|E_11 - E_02| of the rotating frame, eigenvalues tracked by overlap."""
    from dataclasses import replace

    frame = build_rotating_hamiltonian(d, replace(drive_template, omega=omega))
    vals, vecs = np.linalg.eigh(frame.h_rot)
    weights = np.abs(vecs) ** 2
    i11 = frame.index(1, 1)
    i02 = frame.index(0, 2)
    col11 = int(np.argmax(weights[i11]))
    col02 = int(np.argmax(weights[i02]))
    if col11 == col02:
        # at the anticrossing both labels point at the same eigenvector;
        # use the two largest weights instead
        order = np.argsort(weights[i11] + weights[i02])[::-1]
        col11, col02 = int(order[0]), int(order[1])
    return abs(vals[col11] - vals[col02])


def anticrossing_amplitude(
    d: DressedFrame,
    drive_template: CrDrive,
    omega_max: float = 300.0,
    coarse_points: int = 61,
    tol_mhz: float = 0.01,
) -> float:
    """Drive amplitude (MHz) where the 11 and 02 levels anticross.

    Coarse scan followed by golden-section refinement of the tracked gap;
    the tolerance is 0.01 MHz in amplitude.
    """
    grid = np.linspace(0.0, omega_max, coarse_points)
    gaps = [_tracked_gap(d, drive_template, om) for om in grid]
    k = int(np.argmin(gaps))
    if k == 0 or k == len(grid) - 1:
        raise FitError(
            f"no 11/02 anticrossing found below {omega_max:.0f} MHz drive amplitude"
        )
    brack = (grid[k - 1], grid[k], grid[k + 1])
    xmin = golden(
        lambda om: _tracked_gap(d, drive_template, om),
        brack=brack,
        tol=tol_mhz / max(brack[2], 1.0),
    )
    return float(xmin)


def fit_drive_expansion(
    d: DressedFrame,
    drive_template: CrDrive,
    amplitudes: np.ndarray | list[float],
) -> dict[str, float]:
    """Polynomial drive-expansion coefficients of the Pauli terms.

    Fits beta_ZX/beta_ZY to an odd cubic of the drive amplitude and
    beta_IX/beta_IY to an odd cubic plus the linear crosstalk term, using
    the configured phases: the ZX/ZY pair shares (b1, b3) through
    cos/sin(phi0) and the IX/IY pair shares (d1, e3, k1) with the
    crosstalk channel at phi1.  Coefficient units: MHz per MHz^n.
    """
    from dataclasses import replace

    amps = np.asarray(amplitudes, dtype=float)
    betas = [pauli_coefficients(d, replace(drive_template, omega=om)) for om in amps]
    zx = np.array([b.beta_zx for b in betas])
    zy = np.array([b.beta_zy for b in betas])
    ix = np.array([b.beta_ix for b in betas])
    iy = np.array([b.beta_iy for b in betas])

    c0, s0 = np.cos(drive_template.phi0), np.sin(drive_template.phi0)
    c1, s1 = np.cos(drive_template.phi1), np.sin(drive_template.phi1)
    r = drive_template.r

    # [zx; zy] = [amp cos0, amp^3 cos0; amp sin0, amp^3 sin0] @ [b1, b3]
    design_z = np.vstack(
        [
            np.column_stack([amps * c0, amps**3 * c0]),
            np.column_stack([amps * s0, amps**3 * s0]),
        ]
    )
    (b1, b3), *_ = np.linalg.lstsq(design_z, np.concatenate([zx, zy]), rcond=None)

    design_i = np.vstack(
        [
            np.column_stack([amps * c0, amps**3 * c0, r * amps * c1]),
            np.column_stack([amps * s0, amps**3 * s0, r * amps * s1]),
        ]
    )
    (d1, e3, k1), *_ = np.linalg.lstsq(design_i, np.concatenate([ix, iy]), rcond=None)
    return {"b1": float(b1), "b3": float(b3), "d1": float(d1), "e3": float(e3), "k1": float(k1)}
