"""Multilevel two-qubit Hamiltonian, exchange couplings and static ZZ.

The coupled CSFQ-transmon system is modeled as two anharmonic ladders with
an excitation-conserving exchange coupling J between neighbouring levels.
J can be computed from the lumped-element capacitance network via the bus
(direct plus indirect two-photon terms) or supplied from measurement.
Dressing is exact diagonalization with max-overlap relabeling; ZZ is
available both from the dressed eigenvalues and from the second-order
two-denominator formula.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DispersiveBreakdownError, LabelingError, SingularNetworkError
from .spectra import SpectrumTable

__all__ = [
    "CapacitanceNetwork",
    "CouplingSet",
    "CoupledHamiltonian",
    "DressedFrame",
    "capacitance_combinations",
    "couplings_from_network",
    "indirect_j",
    "build_j_table",
    "build_hamiltonian",
    "build_qubit_bus_hamiltonian",
    "dress",
    "dress_with_bus",
    "static_zz_exact",
    "static_zz_perturbative",
]

_NETWORK_FIELDS = (
    "c_rt", "c_ab", "c_b0", "c_sht", "c_t", "c_c0", "c_cd", "c_r",
    "c_rcsfq", "c_gh", "c_g0", "c_shcsfq", "c_1", "c_e0", "c_de", "c_3",
    "l_r", "l_rt", "l_rcsfq",
)


@dataclass(frozen=True)
class CapacitanceNetwork:
    """Lumped-element circuit values: capacitances in fF, inductances in nH."""

    c_rt: float
    c_ab: float
    c_b0: float
    c_sht: float
    c_t: float
    c_c0: float
    c_cd: float
    c_r: float
    c_rcsfq: float
    c_gh: float
    c_g0: float
    c_shcsfq: float
    c_1: float
    c_e0: float
    c_de: float
    c_3: float
    l_r: float
    l_rt: float
    l_rcsfq: float

    def __post_init__(self):
        for name in _NETWORK_FIELDS:
            if getattr(self, name) <= 0:
                raise ValueError(f"network value {name} must be positive")


@dataclass(frozen=True)
class CouplingSet:
    """Signed coupling strengths (GHz) and the bare bus frequency."""

    g_rm: float
    g_rt: float
    g_mt: float
    g_hm: float
    g_at: float
    omega_r: float

    @property
    def j_direct(self) -> float:
        return self.g_mt


def capacitance_combinations(net: CapacitanceNetwork) -> dict[str, float]:
    """Derived capacitance combinations of the reduced 5x5 circuit (fF)."""
    c = net
    comb = {}
    comb["c_t0"] = c.c_ab + c.c_b0 + c.c_c0 + c.c_cd
    comb["c_h0"] = c.c_g0 + c.c_gh
    comb["c_m0"] = c.c_de + c.c_e0 + c.c_g0 + c.c_gh
    comb["c_dm"] = c.c_de + c.c_e0
    comb["c_dt"] = c.c_cd + c.c_c0
    comb["c_a0"] = c.c_ab + c.c_b0
    comb["c_gs"] = 2 * c.c_1 + 4 * c.c_g0 + 4 * c.c_gh + 4 * (c.c_3 + c.c_shcsfq)
    comb["c_gt"] = c.c_cd + c.c_c0 + c.c_sht + c.c_t
    comb["c_cder"] = c.c_cd + c.c_de + c.c_r
    # Effective mode capacitances (diagonal of the reduced matrix)
    comb["c_a_eff"] = -c.c_ab**2 / comb["c_t0"] + c.c_ab + c.c_rt
    comb["c_t_eff"] = comb["c_dt"] + c.c_sht + c.c_t - comb["c_dt"] ** 2 / comb["c_t0"]
    comb["c_r_eff"] = (
        -c.c_cd**2 / comb["c_t0"] + c.c_cd + c.c_de + c.c_r - c.c_de**2 / comb["c_m0"]
    )
    comb["c_m_eff"] = (
        2 * c.c_1
        + 4 * (c.c_3 + c.c_shcsfq)
        - 4 * comb["c_h0"] ** 2 / comb["c_m0"]
        + 4 * comb["c_h0"]
    )
    comb["c_h_eff"] = -c.c_gh**2 / comb["c_m0"] + c.c_gh + c.c_rcsfq
    return comb


def _resonator_frequency(l_nh: float, c_ff: float) -> float:
    # 1/(2 pi sqrt(LC)) in GHz with L in nH and C in fF
    return 1.0 / (2.0 * np.pi * np.sqrt(l_nh * c_ff)) * 1e3


def couplings_from_network(
    net: CapacitanceNetwork, omega_csfq: float, omega_transmon: float
) -> CouplingSet:
    """Evaluate the five exchange couplings from the capacitance network.

    The printed circuit-reduction expressions give inverse capacitances;
    each acquires the usual oscillator prefactor
    ``sqrt(C_i C_j omega_i omega_j) / 2`` built from the effective mode
    capacitances and mode frequencies.  Resonator frequencies come from
    the network inductances; the qubit frequencies must be supplied.
    """
    comb = capacitance_combinations(net)
    c = net
    den_m = comb["c_gs"] * comb["c_m0"] - 4 * comb["c_h0"] ** 2
    den_t = comb["c_gt"] * comb["c_t0"] - comb["c_a0"] ** 2
    den_rt = comb["c_dt"] ** 2 - comb["c_gt"] * comb["c_t0"]
    for name, val in (("CSFQ branch", den_m), ("transmon branch", den_t)):
        if abs(val) < 1e-12:
            raise SingularNetworkError(f"singular capacitance combination in {name}")
    if abs(comb["c_cder"]) < 1e-12 or abs(c.c_gh + c.c_rcsfq) < 1e-12 or abs(c.c_ab + c.c_rt) < 1e-12:
        raise SingularNetworkError("singular capacitance combination in a resonator branch")

    omega_r = _resonator_frequency(c.l_r, comb["c_r_eff"])
    omega_a = _resonator_frequency(c.l_rt, comb["c_a_eff"])
    omega_h = _resonator_frequency(c.l_rcsfq, comb["c_h_eff"])

    def prefactor(ci, cj, wi, wj):
        return 0.5 * np.sqrt(ci * cj * wi * wj)

    g_hm = -2 * c.c_gh * comb["c_dm"] / ((c.c_gh + c.c_rcsfq) * den_m)
    g_rm = 2 * c.c_de * comb["c_h0"] / (comb["c_cder"] * -den_m)
    g_at = c.c_ab * comb["c_dt"] / ((c.c_ab + c.c_rt) * den_t)
    g_rt = -c.c_cd * comb["c_a0"] / (comb["c_cder"] * den_rt)
    g_mt = -2 * c.c_cd * c.c_de * comb["c_a0"] * comb["c_h0"] / (comb["c_cder"] * den_t * den_m)

    return CouplingSet(
        g_rm=g_rm * prefactor(comb["c_r_eff"], comb["c_m_eff"], omega_r, omega_csfq),
        g_rt=g_rt * prefactor(comb["c_r_eff"], comb["c_t_eff"], omega_r, omega_transmon),
        g_mt=g_mt * prefactor(comb["c_m_eff"], comb["c_t_eff"], omega_csfq, omega_transmon),
        g_hm=g_hm * prefactor(comb["c_h_eff"], comb["c_m_eff"], omega_h, omega_csfq),
        g_at=g_at * prefactor(comb["c_a_eff"], comb["c_t_eff"], omega_a, omega_transmon),
        omega_r=omega_r,
    )


def indirect_j(
    c: CouplingSet,
    spec1: SpectrumTable,
    spec2: SpectrumTable,
    n1: int,
    n2: int,
    saturate: bool = False,
) -> float:
    """Exchange coupling J_{n1,n2} (GHz): direct term plus bus-mediated term.

    ``spec1`` is the CSFQ and ``spec2`` the transmon; the level dependence
    enters through the transition frequencies in the four denominators.
    The sqrt((n1+1)(n2+1)) ladder scaling belongs to the coupled
    Hamiltonian matrix elements, not to J itself; that reading reproduces
    the measured J_01 < J_00 < J_10 ordering.

    A bus-resonant denominator raises DispersiveBreakdownError unless
    ``saturate`` is set, in which case its magnitude is floored at twice
    the corresponding coupling (the maximal coherent-mixing scale); high
    CSFQ levels approach the bus and need this when filling full tables.
    """
    w_m = spec1.transition(n1)
    w_t = spec2.transition(n2)
    dl_m = c.omega_r - w_m
    dl_t = c.omega_r - w_t
    dens = [dl_m, dl_t]
    for i, (name, g) in enumerate((("CSFQ", c.g_rm), ("transmon", c.g_rt))):
        det = dens[i]
        if abs(det) < 2.0 * abs(g):
            if not saturate:
                raise DispersiveBreakdownError(
                    f"bus-{name} detuning {det * 1e3:.1f} MHz is resonant at "
                    f"level ({n1},{n2}); the dispersive J formula does not apply"
                )
            dens[i] = np.copysign(2.0 * abs(g), det if det != 0 else 1.0)
            warnings.warn(
                f"bus-{name} detuning saturated at level ({n1},{n2})",
                stacklevel=2,
            )
        elif abs(g / det) > 0.33:
            warnings.warn(
                f"bus-{name} coupling/detuning ratio {abs(g / det):.2f} "
                "strains dispersive validity",
                stacklevel=2,
            )
    sm = c.omega_r + w_m
    st = c.omega_r + w_t
    j_ind = -(c.g_rm * c.g_rt / 2.0) * (
        1.0 / dens[0] + 1.0 / dens[1] + 1.0 / sm + 1.0 / st
    )
    return c.g_mt + j_ind


def build_j_table(
    c: CouplingSet,
    spec1: SpectrumTable,
    spec2: SpectrumTable,
    shape: tuple[int, int],
    overrides: dict[tuple[int, int], float] | None = None,
    rescale_to_j00: float | None = None,
) -> np.ndarray:
    """J_{n1,n2} for all levels, with optional measured-value anchoring.

    ``rescale_to_j00`` multiplies the whole computed table so its (0,0)
    entry matches a fitted value; ``overrides`` then pins individual
    entries (keyed (n1, n2)) to measured numbers.
    """
    table = np.empty(shape)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for i in range(shape[0]):
            for k in range(shape[1]):
                table[i, k] = indirect_j(c, spec1, spec2, i, k, saturate=True)
    if rescale_to_j00 is not None:
        table *= rescale_to_j00 / table[0, 0]
    if overrides:
        for (i, k), val in overrides.items():
            table[i, k] = val
    return table


@dataclass(frozen=True)
class CoupledHamiltonian:
    """Two-ladder exchange Hamiltonian in the bare product basis (GHz)."""

    dims: tuple[int, int]
    matrix: np.ndarray
    j_table: np.ndarray

    def index(self, n1: int, n2: int) -> int:
        return n1 * self.dims[1] + n2


def build_hamiltonian(
    spec1: SpectrumTable, spec2: SpectrumTable, j_table: np.ndarray
) -> CoupledHamiltonian:
    """Assemble the multilevel exchange Hamiltonian.

    Diagonal entries are cumulative bare energies; the only off-diagonal
    elements couple |n1+1, n2> to |n1, n2+1> with strength
    sqrt((n1+1)(n2+1)) J_{n1,n2}.
    """
    d1 = len(spec1.levels)
    d2 = len(spec2.levels)
    j_table = np.asarray(j_table, dtype=float)
    if j_table.shape != (d1 - 1, d2 - 1):
        raise ValueError(
            f"J table shape {j_table.shape} does not match level counts ({d1}, {d2})"
        )
    dim = d1 * d2
    h = np.zeros((dim, dim))
    energies = spec1.levels[:, None] + spec2.levels[None, :]
    np.fill_diagonal(h, energies.reshape(-1))
    for n1 in range(d1 - 1):
        for n2 in range(d2 - 1):
            row = (n1 + 1) * d2 + n2
            col = n1 * d2 + (n2 + 1)
            val = np.sqrt((n1 + 1) * (n2 + 1)) * j_table[n1, n2]
            h[row, col] += val
            h[col, row] += val
    return CoupledHamiltonian(dims=(d1, d2), matrix=h, j_table=j_table)


@dataclass(frozen=True)
class DressedFrame:
    """Eigenbasis of the coupled system labeled by max bare overlap."""

    dims: tuple[int, int]
    u: np.ndarray
    dressed_levels: np.ndarray

    def level(self, n1: int, n2: int) -> float:
        return float(self.dressed_levels[n1, n2])

    def transition_q1(self, n: int = 0) -> float:
        return self.level(n + 1, 0) - self.level(n, 0)

    def transition_q2(self, n: int = 0) -> float:
        return self.level(0, n + 1) - self.level(0, n)

    @property
    def omega1(self) -> float:
        return self.transition_q1(0)

    @property
    def omega2(self) -> float:
        return self.transition_q2(0)


def _max_overlap_permutation(
    vectors: np.ndarray, tie_tol: float = 1e-6, strict: bool = True
) -> np.ndarray:
    """Column permutation assigning each eigenvector to its dominant basis state.

    In strict mode an ambiguous or colliding assignment raises
    LabelingError; otherwise the globally optimal assignment is used,
    which tolerates strong mixing in high-energy manifolds.
    """
    dim = vectors.shape[0]
    weights = np.abs(vectors) ** 2
    if not strict:
        from scipy.optimize import linear_sum_assignment

        rows, cols = linear_sum_assignment(-weights)
        perm = np.empty(dim, dtype=int)
        perm[rows] = cols
        return perm
    perm = np.full(dim, -1, dtype=int)
    claimed = {}
    for col in range(dim):
        order = np.argsort(weights[:, col])[::-1]
        best, second = order[0], order[1]
        if weights[best, col] - weights[second, col] < tie_tol:
            raise LabelingError(
                f"eigenvector {col} overlaps basis states {best} and {second} "
                "equally; labels are ambiguous (too close to a resonance)"
            )
        if best in claimed:
            raise LabelingError(
                f"eigenvectors {claimed[best]} and {col} both claim bare label {best}"
            )
        claimed[best] = col
        perm[best] = col
    return perm


def dress(h: CoupledHamiltonian) -> DressedFrame:
    """Diagonalize and reattach bare labels by maximum overlap."""
    vals, vecs = np.linalg.eigh(h.matrix)
    perm = _max_overlap_permutation(vecs)
    u = vecs[:, perm]
    # fix the gauge so each column's dominant amplitude is real positive
    dom = np.argmax(np.abs(u), axis=0)
    phases = u[dom, np.arange(u.shape[1])]
    u = u * (np.abs(phases) / phases)[None, :]
    levels = vals[perm].reshape(h.dims)
    levels = levels - levels.flat[0]
    return DressedFrame(dims=h.dims, u=u, dressed_levels=levels)


def static_zz_exact(d: DressedFrame) -> float:
    """ZZ strength from the four dressed computational eigenvalues (GHz)."""
    return (d.level(1, 1) - d.level(1, 0)) - (d.level(0, 1) - d.level(0, 0))


def static_zz_perturbative(
    j01: float, j10: float, delta: float, delta1: float, delta2: float
) -> float:
    """Second-order ZZ: -2 J01^2/(Delta + delta2) + 2 J10^2/(Delta - delta1)."""
    den1 = delta + delta2
    den2 = delta - delta1
    jmax = max(abs(j01), abs(j10))
    if abs(den1) < 2.0 * jmax or abs(den2) < 2.0 * jmax:
        raise DispersiveBreakdownError(
            "perturbative ZZ denominator straddles a pole "
            f"(Delta+delta2 = {den1 * 1e3:.1f} MHz, Delta-delta1 = {den2 * 1e3:.1f} MHz)"
        )
    return -2.0 * j01**2 / den1 + 2.0 * j10**2 / den2


def build_qubit_bus_hamiltonian(
    spec1: SpectrumTable,
    spec2: SpectrumTable,
    c: CouplingSet,
    bus_levels: int = 3,
) -> CoupledHamiltonian:
    """Three-mode CSFQ-bus-transmon exchange Hamiltonian.

    Used to obtain bus-dressed qubit frequencies from bare inputs; the
    basis ordering is (n1, n_bus, n2) row-major and the returned ``dims``
    collapse the bus index so :func:`dress` labels still apply after
    projecting onto zero bus photons via :func:`dress_with_bus`.
    """
    d1 = len(spec1.levels)
    d2 = len(spec2.levels)
    db = bus_levels
    dim = d1 * db * d2
    h = np.zeros((dim, dim))

    def idx(n1, nb, n2):
        return (n1 * db + nb) * d2 + n2

    for n1 in range(d1):
        for nb in range(db):
            for n2 in range(d2):
                h[idx(n1, nb, n2), idx(n1, nb, n2)] = (
                    spec1.levels[n1] + nb * c.omega_r + spec2.levels[n2]
                )
    for n1 in range(d1 - 1):
        for nb in range(db - 1):
            for n2 in range(d2):
                val = c.g_rm * np.sqrt((n1 + 1) * (nb + 1))
                h[idx(n1 + 1, nb, n2), idx(n1, nb + 1, n2)] += val
                h[idx(n1, nb + 1, n2), idx(n1 + 1, nb, n2)] += val
    for n1 in range(d1):
        for nb in range(db - 1):
            for n2 in range(d2 - 1):
                val = c.g_rt * np.sqrt((nb + 1) * (n2 + 1))
                h[idx(n1, nb + 1, n2), idx(n1, nb, n2 + 1)] += val
                h[idx(n1, nb, n2 + 1), idx(n1, nb + 1, n2)] += val
    for n1 in range(d1 - 1):
        for nb in range(db):
            for n2 in range(d2 - 1):
                val = c.g_mt * np.sqrt((n1 + 1) * (n2 + 1))
                h[idx(n1 + 1, nb, n2), idx(n1, nb, n2 + 1)] += val
                h[idx(n1, nb, n2 + 1), idx(n1 + 1, nb, n2)] += val
    return CoupledHamiltonian(dims=(d1, db * d2), matrix=h, j_table=np.zeros((0, 0)))


def dress_with_bus(
    spec1: SpectrumTable,
    spec2: SpectrumTable,
    c: CouplingSet,
    bus_levels: int = 3,
) -> DressedFrame:
    """Dress the three-mode model and project onto zero bus photons.

    Returns a two-qubit DressedFrame whose levels are the bus-vacuum
    dressed energies; ``u`` is the full three-mode unitary.
    """
    d1 = len(spec1.levels)
    d2 = len(spec2.levels)
    db = bus_levels
    h3 = build_qubit_bus_hamiltonian(spec1, spec2, c, bus_levels)
    vals, vecs = np.linalg.eigh(h3.matrix)
    perm = _max_overlap_permutation(vecs, strict=False)
    full = vals[perm].reshape(d1, db, d2)
    levels = full[:, 0, :] - full[0, 0, 0]
    return DressedFrame(dims=(d1, d2), u=vecs[:, perm], dressed_levels=levels)
