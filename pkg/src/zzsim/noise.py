"""Decoherence channels and the flux-noise dephasing model.

Channels are completely positive maps stored as superoperators acting on
row-major vectorized density matrices.  The combined relaxation/dephasing
map is implemented exactly as used in the gate-error simulation: a Z/I
mixture weighted by the T2 decay plus a half-rate population transfer to
the ground state.  It is trace preserving, and completely positive for
any physical card (T2 <= 2 T1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnphysicalCardError

__all__ = [
    "CoherenceCard",
    "DephasingModel",
    "QuantumChannel",
    "decoherence_channel",
    "unitary_channel",
    "zz_phase_channel",
    "pure_dephasing_rate",
    "effective_t2",
]

LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class CoherenceCard:
    """T1/T2 times in microseconds; qubit 1 is the CSFQ."""

    t1_q1: float
    t2_q1: float
    t1_q2: float
    t2_q2: float

    def __post_init__(self):
        for name in ("t1_q1", "t2_q1", "t1_q2", "t2_q2"):
            if getattr(self, name) <= 0:
                raise UnphysicalCardError(f"{name} must be positive")
        if self.t2_q1 > 2 * self.t1_q1 or self.t2_q2 > 2 * self.t1_q2:
            raise UnphysicalCardError("T2 exceeds 2*T1")


@dataclass(frozen=True)
class DephasingModel:
    """Flux-noise dephasing: rate versus qubit-frequency gradient.

    ``a_phi_sqrt`` is the 1-Hz flux-noise amplitude in micro-flux-quanta.
    The benchmarking-effective mode divides the flux-noise slope by
    ``slope_reduction`` while keeping the flux-independent ``offset``;
    when ``slope`` (in milli-flux-quanta) is given it pins the effective
    slope directly instead of deriving it from the amplitude.
    """

    a_phi_sqrt: float = 1.5
    slope_reduction: float = 2.7
    offset: float = 0.039
    slope: float | None = None

    def __post_init__(self):
        if self.a_phi_sqrt < 0 or self.offset < 0 or self.slope_reduction <= 0:
            raise ValueError("dephasing model parameters must be nonnegative")


def pure_dephasing_rate(
    d_phi: float, m: DephasingModel | None = None, mode: str = "rb_effective"
) -> float:
    """Pure dephasing rate in 1/us for a gradient d_phi in GHz per flux quantum.

    ``raw`` mode applies the 1/f flux-noise law 2 pi sqrt(A ln2) |D| plus
    the flux-independent offset; ``rb_effective`` reduces the flux-noise
    slope by the configured factor, reflecting the slower fidelity decay
    of randomized benchmarking under 1/f noise.
    """
    m = m or DephasingModel()
    d_inv_us = abs(d_phi) * 1e3  # GHz/Phi0 -> 1/(us Phi0)
    raw_slope = 2.0 * np.pi * (m.a_phi_sqrt * 1e-6) * np.sqrt(LN2)
    if mode == "raw":
        return raw_slope * d_inv_us + m.offset
    if mode == "rb_effective":
        slope = m.slope * 1e-3 if m.slope is not None else raw_slope / m.slope_reduction
        return slope * d_inv_us + m.offset
    raise ValueError(f"unknown dephasing mode {mode!r}")


def effective_t2(t1: float, gamma_phi: float) -> float:
    """T2 in us from 1/T2 = 1/(2 T1) + Gamma_phi."""
    if t1 <= 0:
        raise ValueError("T1 must be positive")
    if gamma_phi < 0:
        raise ValueError("dephasing rate must be nonnegative")
    return 1.0 / (0.5 / t1 + gamma_phi)


@dataclass(frozen=True)
class QuantumChannel:
    """Linear map rho -> sum_i c_i A_i rho B_i^dagger as a superoperator.

    The superoperator convention is row-major vectorization, so the
    matrix for A rho B^dagger is kron(A, conj(B)).
    """

    superop: np.ndarray
    label: str = ""
    dim: int = field(init=False)

    def __post_init__(self):
        d2 = self.superop.shape[0]
        d = int(round(np.sqrt(d2)))
        if d * d != d2 or self.superop.shape != (d2, d2):
            raise ValueError("superoperator must be d^2 x d^2")
        object.__setattr__(self, "dim", d)

    @classmethod
    def from_terms(cls, terms, dim: int, label: str = "") -> "QuantumChannel":
        s = np.zeros((dim * dim, dim * dim), dtype=complex)
        for coeff, a, b in terms:
            s += coeff * np.kron(a, b.conj())
        return cls(superop=s, label=label)

    @classmethod
    def identity(cls, dim: int) -> "QuantumChannel":
        return cls(superop=np.eye(dim * dim, dtype=complex), label="identity")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        out = (self.superop @ rho.reshape(-1)).reshape(self.dim, self.dim)
        return 0.5 * (out + out.conj().T)

    def compose(self, other: "QuantumChannel") -> "QuantumChannel":
        """Channel applying ``other`` first, then this one."""
        if self.dim != other.dim:
            raise ValueError("channel dimensions differ")
        label = f"{self.label}∘{other.label}" if self.label and other.label else ""
        return QuantumChannel(superop=self.superop @ other.superop, label=label)

    def __matmul__(self, other: "QuantumChannel") -> "QuantumChannel":
        return self.compose(other)

    def on_qubit(self, qubit: int, n_qubits: int = 2) -> "QuantumChannel":
        """Lift a single-qubit channel to act on one factor of a register."""
        if self.dim != 2:
            raise ValueError("only single-qubit channels can be lifted")
        if n_qubits != 2 or qubit not in (0, 1):
            raise ValueError("lifting is implemented for two-qubit registers")
        s1 = self.superop.reshape(2, 2, 2, 2)  # [i, j, k, l]: rho'_ij <- rho_kl
        eye = np.eye(2)
        if qubit == 0:
            s2 = np.einsum("ijkl,ac,bd->iajbkcld", s1, eye, eye)
        else:
            s2 = np.einsum("ijkl,ac,bd->aibjckdl", s1, eye, eye)
        return QuantumChannel(superop=s2.reshape(16, 16), label=self.label)

    def trace_preservation_defect(self, rng=None, n_samples: int = 20) -> float:
        """Max |tr(channel(rho)) - 1| over random density matrices."""
        rng = rng or np.random.default_rng(7)
        worst = 0.0
        for _ in range(n_samples):
            rho = random_density_matrix(self.dim, rng)
            worst = max(worst, abs(np.trace(self.apply(rho)).real - 1.0))
        return worst

    def positivity_defect(self, rng=None, n_samples: int = 20) -> float:
        """Most negative output eigenvalue over random density matrices."""
        rng = rng or np.random.default_rng(11)
        worst = 0.0
        for _ in range(n_samples):
            rho = random_density_matrix(self.dim, rng)
            worst = min(worst, float(np.linalg.eigvalsh(self.apply(rho)).min()))
        return worst


def random_density_matrix(dim: int, rng) -> np.ndarray:
    """Haar-ish random full-rank density matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def unitary_channel(u: np.ndarray, label: str = "") -> QuantumChannel:
    u = np.asarray(u, dtype=complex)
    return QuantumChannel.from_terms([(1.0, u, u)], dim=u.shape[0], label=label)


def zz_phase_channel(zeta_ghz: float, duration_ns: float) -> QuantumChannel:
    """Conditional-phase error exp(-i 2 pi zeta t ZZ / 4) as a channel."""
    zz = np.diag([1.0, -1.0, -1.0, 1.0])
    angle = 2.0 * np.pi * zeta_ghz * duration_ns / 4.0
    u = np.diag(np.exp(-1j * angle * np.diag(zz)))
    return unitary_channel(u, label="zz-phase")


def decoherence_channel(t1: float, t2: float, duration: float) -> QuantumChannel:
    """Single-qubit relaxation/dephasing map over ``duration`` (all in us).

    The map mixes identity and Z with weights (1 +- e^{-t/T2})/2 and
    transfers excited-state population to the ground state at half the
    1 - e^{-t/T1} rate, leaving coherences to the T2 factor alone.
    """
    if duration < 0:
        raise ValueError("duration must be nonnegative")
    if t2 > 2 * t1:
        raise UnphysicalCardError("T2 exceeds 2*T1")
    g2 = np.exp(-duration / t2)
    lam = 1.0 - np.exp(-duration / t1)
    eye = np.eye(2)
    z = np.diag([1.0, -1.0])
    low = np.zeros((2, 2))
    low[0, 1] = 1.0
    p11 = np.diag([0.0, 1.0])
    terms = [
        ((1.0 + g2) / 2.0, eye, eye),
        ((1.0 - g2) / 2.0, z, z),
        (lam / 2.0, low, low),
        (-lam / 2.0, p11, p11),
    ]
    return QuantumChannel.from_terms(terms, dim=2, label=f"T1T2({duration:g}us)")
