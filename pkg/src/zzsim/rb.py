"""Randomized benchmarking over the channel model.

Clifford groups are stored as phase-canonical unitaries: the single-qubit
group is generated from the physical primitives {I, +-X90, +-Y90}, the
two-qubit group from single-qubit layers around entangling cores (one per
conjugacy class), which also fixes the number of ZX90 primitives each
element costs.  Sequences evolve a density matrix through the noisy
primitives, and the survival decay A alpha^m + B yields the error per
gate via the standard exponent conversions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .errors import FitError
from .noise import QuantumChannel, unitary_channel

__all__ = [
    "CliffordGroup",
    "DecayFit",
    "build_clifford_group",
    "simulate_rb",
    "error_per_gate",
    "conventional_primitive_count",
    "fit_gaussian_echo_decay",
]

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_Z = np.diag([1.0, -1.0]).astype(complex)
_I2 = np.eye(2, dtype=complex)


def _rot(axis: np.ndarray, angle: float) -> np.ndarray:
    return np.cos(angle / 2) * _I2 - 1j * np.sin(angle / 2) * axis


def _canonical_key(u: np.ndarray, decimals: int = 8) -> bytes:
    """Phase-insensitive hashable form of a unitary.

    The global phase is removed against the first entry whose magnitude
    clears 30% of the maximum; that choice is stable against rounding
    noise because Clifford entries sit at algebraic magnitudes well away
    from the threshold.
    """
    flat = u.reshape(-1)
    mags = np.abs(flat)
    idx = int(np.argmax(mags >= 0.3 * mags.max()))
    phase = flat[idx] / abs(flat[idx])
    normal = np.round(u / phase, decimals) + 0.0  # kill negative zeros
    return normal.tobytes()


def conventional_primitive_count(n_qubits: int) -> float:
    """Average primitive gates per Clifford used in error-per-gate conversions."""
    if n_qubits == 1:
        return 2.205
    if n_qubits == 2:
        return 1.5
    raise ValueError("only one- and two-qubit groups are supported")


@dataclass
class CliffordGroup:
    """Clifford group with primitive costs per element."""

    n_qubits: int
    elements: list
    primitive_counts: list
    primitive_count_avg: float
    _index: dict

    def __len__(self) -> int:
        return len(self.elements)

    def unitary(self, idx: int) -> np.ndarray:
        return self.elements[idx]

    def find(self, u: np.ndarray) -> int:
        """Index of the group element equal to ``u`` up to global phase."""
        key = _canonical_key(u)
        if key not in self._index:
            raise KeyError("unitary is not a group element")
        return self._index[key]

    def contains(self, u: np.ndarray) -> bool:
        return _canonical_key(u) in self._index

    def verify_closure(self, rng=None, n_samples: int = 50) -> None:
        """Spot-check that products of random elements stay in the group."""
        rng = rng or np.random.default_rng(3)
        for _ in range(n_samples):
            a, b = rng.integers(0, len(self.elements), size=2)
            prod = self.elements[a] @ self.elements[b]
            if not self.contains(prod):
                raise AssertionError(
                    f"closure violated: product of elements {a} and {b} left the group"
                )


def _single_qubit_elements() -> tuple[list, list]:
    prims = {
        "I": _I2,
        "X90": _rot(_X, np.pi / 2),
        "X-90": _rot(_X, -np.pi / 2),
        "Y90": _rot(_Y, np.pi / 2),
        "Y-90": _rot(_Y, -np.pi / 2),
    }
    elements = [_I2]
    counts = [1]  # the identity Clifford still costs one pulse slot
    seen = {_canonical_key(_I2): 0}
    frontier = [(_I2, 0)]
    depth_count = 0
    while len(elements) < 24 and depth_count < 6:
        depth_count += 1
        new_frontier = []
        for u, depth in frontier:
            for name, p in prims.items():
                if name == "I":
                    continue
                cand = p @ u
                key = _canonical_key(cand)
                if key not in seen:
                    seen[key] = len(elements)
                    elements.append(cand)
                    counts.append(depth + 1)
                    new_frontier.append((cand, depth + 1))
        frontier = new_frontier
    if len(elements) != 24:
        raise AssertionError(f"single-qubit Clifford generation found {len(elements)} elements")
    return elements, counts


def _axis_cycle() -> np.ndarray:
    # 120-degree rotation about (1,1,1): cycles X -> Y -> Z -> X
    n = (_X + _Y + _Z) / np.sqrt(3.0)
    return _rot(n, 2.0 * np.pi / 3.0)


def _two_qubit_elements() -> tuple[list, list]:
    c1, c1_counts = _single_qubit_elements()
    v = _axis_cycle()
    s_set = [_I2, v, v @ v]
    cnot = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    iswap = np.array(
        [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex
    )
    swap = np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    )
    elements = []
    counts = []
    for a in range(24):
        for b in range(24):
            layer = np.kron(c1[a], c1[b])
            elements.append(layer)
            counts.append(0)
            for si in s_set:
                for sj in s_set:
                    tail = np.kron(si, sj)
                    elements.append(layer @ cnot @ tail)
                    counts.append(1)
                    elements.append(layer @ iswap @ tail)
                    counts.append(2)
            elements.append(layer @ swap)
            counts.append(3)
    return elements, counts


def build_clifford_group(n_qubits: int) -> CliffordGroup:
    """Enumerate the Clifford group with primitive-cost bookkeeping.

    The two-qubit group is built from 24 x 24 single-qubit layers times
    twenty entangling cores (identity, nine CNOT-like, nine iSWAP-like,
    SWAP), costing 0/1/2/3 ZX90 primitives; the construction is verified
    to produce 11520 distinct elements.
    """
    if n_qubits == 1:
        elements, counts = _single_qubit_elements()
        expected = 24
    elif n_qubits == 2:
        elements, counts = _two_qubit_elements()
        expected = 11520
    else:
        raise ValueError("only one- and two-qubit groups are supported")
    index = {}
    for i, u in enumerate(elements):
        key = _canonical_key(u)
        if key in index:
            raise AssertionError(f"duplicate Clifford at positions {index[key]} and {i}")
        index[key] = i
    if len(elements) != expected:
        raise AssertionError(f"expected {expected} elements, built {len(elements)}")
    return CliffordGroup(
        n_qubits=n_qubits,
        elements=elements,
        primitive_counts=counts,
        primitive_count_avg=conventional_primitive_count(n_qubits),
        _index=index,
    )


@dataclass
class DecayFit:
    """Fidelity-decay fit A alpha^m + B and the derived error per gate."""

    a: float
    b: float
    alpha: float
    alpha_std: float
    epsilon: float
    covariance: np.ndarray
    seed: int
    lengths: np.ndarray
    survival: np.ndarray


def _ground_observable(n_qubits: int, target_only: bool) -> np.ndarray:
    if n_qubits == 1:
        return np.diag([1.0, 0.0]).astype(complex)
    if target_only:
        # ground-state population of the target (second) qubit
        return np.kron(np.eye(2), np.diag([1.0, 0.0])).astype(complex)
    return np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)


def simulate_rb(
    group: CliffordGroup,
    noise_per_primitive: QuantumChannel | None,
    lengths,
    n_seeds: int = 20,
    seed: int = 1234,
    n_shots: int | None = None,
    noise_per_clifford: QuantumChannel | None = None,
    target_only: bool = True,
) -> DecayFit:
    """Simulate randomized benchmarking and fit the survival decay.

    Each random sequence is closed with the exact inverse Clifford; the
    noise channel is applied once per primitive (per the element's
    decomposition cost) or, if ``noise_per_clifford`` is given, once per
    Clifford.  Survival is the exact ground-state population, optionally
    binomial-sampled with ``n_shots``.
    """
    rng = np.random.default_rng(seed)
    lengths = np.asarray(list(lengths), dtype=int)
    dim = 2**group.n_qubits
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[0, 0] = 1.0
    obs = _ground_observable(group.n_qubits, target_only)

    superops = {}

    def channel_for(idx: int) -> np.ndarray:
        if idx not in superops:
            s = unitary_channel(group.unitary(idx)).superop
            if noise_per_clifford is not None:
                s = noise_per_clifford.superop @ s
            elif noise_per_primitive is not None:
                reps = max(1, group.primitive_counts[idx])
                s = np.linalg.matrix_power(noise_per_primitive.superop, reps) @ s
            superops[idx] = s
        return superops[idx]

    survival = np.zeros(len(lengths))
    for li, m in enumerate(lengths):
        acc = 0.0
        for _ in range(n_seeds):
            seq = rng.integers(0, len(group), size=m)
            total = np.eye(dim, dtype=complex)
            rho = rho0.reshape(-1).copy()
            for idx in seq:
                rho = channel_for(int(idx)) @ rho
                total = group.unitary(int(idx)) @ total
            rec = group.find(total.conj().T)
            rho = channel_for(rec) @ rho
            p0 = float(np.real(np.sum(obs.reshape(-1).conj() * rho)))
            if n_shots:
                p0 = rng.binomial(n_shots, min(max(p0, 0.0), 1.0)) / n_shots
            acc += p0
        survival[li] = acc / n_seeds

    def decay(m, a, alpha, b):
        return a * alpha**m + b

    b_floor = 0.5 if (group.n_qubits == 2 and target_only) else 1.0 / dim
    try:
        popt, pcov = curve_fit(
            decay,
            lengths,
            survival,
            p0=[1.0 - b_floor, 0.99, b_floor],
            bounds=([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]),
            maxfev=20000,
        )
    except RuntimeError as exc:
        raise FitError(
            f"decay fit did not converge; raw survival: {survival.tolist()}"
        ) from exc
    a, alpha, b = popt
    alpha_std = float(np.sqrt(pcov[1, 1]))
    eps = error_per_gate(alpha, n_qubits=group.n_qubits)
    return DecayFit(
        a=float(a),
        b=float(b),
        alpha=float(alpha),
        alpha_std=alpha_std,
        epsilon=eps,
        covariance=pcov,
        seed=seed,
        lengths=lengths,
        survival=survival,
    )


def error_per_gate(alpha: float, n: float | None = None, n_qubits: int = 2) -> float:
    """Error per primitive gate from the decay parameter.

    Single qubit: (1/2)(1 - alpha^(1/N)) with N = 2.205 primitives per
    Clifford; two qubits: (3/4)(1 - alpha^(1/N)) with N = 1.5 ZX90 gates
    per Clifford.
    """
    if alpha <= 0:
        raise ValueError("decay parameter must be positive")
    if alpha > 1.0:
        warnings.warn("decay parameter exceeds 1; clamping error to 0", stacklevel=2)
        return 0.0
    if n is None:
        n = conventional_primitive_count(n_qubits)
    scale = 0.5 if n_qubits == 1 else 0.75
    return float(scale * (1.0 - alpha ** (1.0 / n)))


def fit_gaussian_echo_decay(t, y, t1: float):
    """Fit A + B exp(-t/(2 T1) - (t/T_phi)^2) to echo-decay data.

    Returns (a, b, t_phi); ``t`` in us.  This is the measurement-side
    model used to extract pure dephasing rates from Hahn-echo data.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)

    def model(tt, a, b, t_phi):
        return a + b * np.exp(-tt / (2.0 * t1) - (tt / t_phi) ** 2)

    span = max(t.max() - t.min(), 1e-9)
    try:
        popt, _ = curve_fit(
            model, t, y, p0=[y.min(), max(y.max() - y.min(), 0.1), span / 2.0],
            maxfev=20000,
        )
    except RuntimeError as exc:
        raise FitError(f"echo-decay fit failed: {exc}") from exc
    return float(popt[0]), float(popt[1]), float(popt[2])
