"""Device cards and the assembled simulation pipeline.

A card is a YAML document with explicit unit suffixes in its keys.  It
carries the junction parameters of both qubits, measured anchor
frequencies, either the capacitance network or direct coupling strengths,
optional measured exchange couplings, coherence times, the dephasing and
crosstalk models, drive phases, and the projection scenarios.

DeviceModel memoizes the per-flux chain: anchored spectra, exchange
table, dressed frame, calibration slope.
"""

from __future__ import annotations

import hashlib
import importlib.resources
from dataclasses import dataclass

import numpy as np
import yaml

from .coupling import (
    CapacitanceNetwork,
    CouplingSet,
    CoupledHamiltonian,
    DressedFrame,
    build_hamiltonian,
    build_j_table,
    couplings_from_network,
    dress,
    static_zz_exact,
    static_zz_perturbative,
)
from .cr import CrDrive, gamma_slope, pauli_coefficients
from .errors import CardValidationError
from .noise import CoherenceCard, DephasingModel, effective_t2, pure_dephasing_rate
from .pulses import CrosstalkModel, PulseSchedule, crosstalk_scale
from .spectra import CsfqParams, SpectrumTable, TransmonParams, csfq_spectrum, transmon_spectrum

__all__ = [
    "DeviceScenario",
    "DeviceModel",
    "load_card",
    "dump_card",
    "validate_card",
    "bundled_card_path",
    "card_hash",
]

_NETWORK_KEYS = {
    "c_rt_ff", "c_ab_ff", "c_b0_ff", "c_sht_ff", "c_t_ff", "c_c0_ff",
    "c_cd_ff", "c_r_ff", "c_rcsfq_ff", "c_gh_ff", "c_g0_ff", "c_shcsfq_ff",
    "c_1_ff", "c_e0_ff", "c_de_ff", "c_3_ff", "l_r_nh", "l_rt_nh", "l_rcsfq_nh",
}

_SCENARIO_KEYS = {
    "t1_q1_us", "t2_q1_us", "t1_q2_us", "t2_q2_us",
    "omega1_ghz", "omega2_ghz", "delta1_mhz", "delta2_mhz",
    "eta_per_mhz", "zeta0_ghz", "crosstalk", "gamma",
}

_SCHEMA = {
    "name": None,
    "transmon": {"e_j_ghz", "e_c_ghz", "n_levels", "charge_cutoff"},
    "csfq": {"e_j_ghz", "e_c_ghz", "alpha", "n_levels", "basis_size"},
    "anchors": {"omega1_ghz", "omega2_ghz"},
    "network": _NETWORK_KEYS,
    "couplings": {"g_rm_ghz", "g_rt_ghz", "g_mt_ghz", "g_hm_ghz", "g_at_ghz", "omega_r_ghz"},
    "j_overrides_mhz": None,  # mapping "n1,n2" -> MHz
    "coherence": {"t1_q1_us", "t2_q1_us", "t1_q2_us", "t2_q2_us"},
    "dephasing": {"a_phi_sqrt_uphi0", "slope_reduction", "offset_per_us", "slope_mphi0"},
    "crosstalk": {"a0", "slope", "exponent_flux", "exponent_time"},
    "drive": {"phi0_rad", "phi1_rad"},
    "scenarios": None,  # mapping label -> scenario keys
}


def validate_card(card: dict) -> None:
    """Reject unknown keys and missing required sections."""
    if not isinstance(card, dict):
        raise CardValidationError("card must be a mapping")
    for key in card:
        if key not in _SCHEMA:
            raise CardValidationError(f"unknown top-level key {key!r}")
    for section in ("transmon", "csfq", "anchors", "coherence"):
        if section not in card:
            raise CardValidationError(f"missing required section {section!r}")
    if "network" not in card and "couplings" not in card and "j_overrides_mhz" not in card:
        raise CardValidationError(
            "card needs a capacitance network, coupling strengths, or a measured J table"
        )
    for section, allowed in _SCHEMA.items():
        if section not in card or allowed is None:
            continue
        body = card[section]
        if not isinstance(body, dict):
            raise CardValidationError(f"section {section!r} must be a mapping")
        for key in body:
            if key not in allowed:
                raise CardValidationError(f"unknown key {key!r} in section {section!r}")
    if "j_overrides_mhz" in card:
        for key in card["j_overrides_mhz"]:
            parts = str(key).split(",")
            if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
                raise CardValidationError(
                    f"J override key {key!r} must look like 'n1,n2'"
                )
    if "scenarios" in card:
        for label, body in card["scenarios"].items():
            if not isinstance(body, dict):
                raise CardValidationError(f"scenario {label!r} must be a mapping")
            for key in body:
                if key not in _SCENARIO_KEYS:
                    raise CardValidationError(
                        f"unknown key {key!r} in scenario {label!r}"
                    )


def load_card(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        card = yaml.safe_load(fh)
    validate_card(card)
    return card


def dump_card(card: dict, path) -> None:
    validate_card(card)
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(card, fh, sort_keys=True)


def bundled_card_path(name: str = "paper-device"):
    """Filesystem path of a card shipped with the package."""
    fname = name.replace("-", "_") + ".yaml"
    ref = importlib.resources.files("zzsim") / "cards" / fname
    if not ref.is_file():
        raise CardValidationError(f"no bundled card named {name!r}")
    return ref


def card_hash(card: dict) -> str:
    """Stable digest of a card's canonical YAML form."""
    text = yaml.safe_dump(card, sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class DeviceScenario:
    """Projection scenario: coherence set plus effective ZZ parameters."""

    label: str
    coherence: CoherenceCard
    eta: float
    zeta0: float | None = None
    crosstalk: bool = False
    gamma: float | None = None
    omega1: float | None = None
    omega2: float | None = None
    delta1: float | None = None
    delta2: float | None = None


class DeviceModel:
    """Simulation pipeline assembled from a device card."""

    def __init__(self, card: dict):
        validate_card(card)
        self.card = card
        self.name = card.get("name", "unnamed")

        t = card["transmon"]
        self.transmon = TransmonParams(
            e_j=t["e_j_ghz"],
            e_c=t["e_c_ghz"],
            n_levels=t.get("n_levels", 5),
            charge_cutoff=t.get("charge_cutoff", 30),
        )
        c = card["csfq"]
        self.csfq = CsfqParams(
            e_j=c["e_j_ghz"],
            e_c=c["e_c_ghz"],
            alpha=c["alpha"],
            n_levels=c.get("n_levels", 5),
            basis_size=c.get("basis_size", 201),
        )
        self.anchor1 = card["anchors"]["omega1_ghz"]
        self.anchor2 = card["anchors"]["omega2_ghz"]

        coh = card["coherence"]
        self.coherence = CoherenceCard(
            t1_q1=coh["t1_q1_us"],
            t2_q1=coh["t2_q1_us"],
            t1_q2=coh["t1_q2_us"],
            t2_q2=coh["t2_q2_us"],
        )
        deph = card.get("dephasing", {})
        self.dephasing = DephasingModel(
            a_phi_sqrt=deph.get("a_phi_sqrt_uphi0", 1.5),
            slope_reduction=deph.get("slope_reduction", 2.7),
            offset=deph.get("offset_per_us", 0.039),
            slope=deph.get("slope_mphi0"),
        )
        ct = card.get("crosstalk", {})
        self.crosstalk = CrosstalkModel(
            a0=ct.get("a0", 0.07),
            slope=ct.get("slope", 40.0),
            exponent_flux=ct.get("exponent_flux", 1.2),
            exponent_time=ct.get("exponent_time", 2.0 / 3.0),
        )
        drv = card.get("drive", {})
        self.phi0 = drv.get("phi0_rad", float(np.pi))
        self.phi1 = drv.get("phi1_rad", float(np.pi))

        self.j_overrides = {
            tuple(int(x) for x in str(key).split(",")): val * 1e-3
            for key, val in card.get("j_overrides_mhz", {}).items()
        }
        self._network = None
        if "network" in card:
            n = card["network"]
            self._network = CapacitanceNetwork(
                c_rt=n["c_rt_ff"], c_ab=n["c_ab_ff"], c_b0=n["c_b0_ff"],
                c_sht=n["c_sht_ff"], c_t=n["c_t_ff"], c_c0=n["c_c0_ff"],
                c_cd=n["c_cd_ff"], c_r=n["c_r_ff"], c_rcsfq=n["c_rcsfq_ff"],
                c_gh=n["c_gh_ff"], c_g0=n["c_g0_ff"], c_shcsfq=n["c_shcsfq_ff"],
                c_1=n["c_1_ff"], c_e0=n["c_e0_ff"], c_de=n["c_de_ff"],
                c_3=n["c_3_ff"], l_r=n["l_r_nh"], l_rt=n["l_rt_nh"],
                l_rcsfq=n["l_rcsfq_nh"],
            )
        self._couplings_card = card.get("couplings")
        self._cache: dict = {}

    # -- scenario access ------------------------------------------------

    def scenarios(self) -> dict[str, DeviceScenario]:
        out = {}
        for label, body in self.card.get("scenarios", {}).items():
            out[label] = DeviceScenario(
                label=label,
                coherence=CoherenceCard(
                    t1_q1=body["t1_q1_us"],
                    t2_q1=body["t2_q1_us"],
                    t1_q2=body["t1_q2_us"],
                    t2_q2=body["t2_q2_us"],
                ),
                eta=body.get("eta_per_mhz", 0.0),
                zeta0=body.get("zeta0_ghz"),
                crosstalk=bool(body.get("crosstalk", False)),
                gamma=body.get("gamma"),
                omega1=body.get("omega1_ghz"),
                omega2=body.get("omega2_ghz"),
                delta1=body.get("delta1_mhz"),
                delta2=body.get("delta2_mhz"),
            )
        return out

    # -- per-flux chain ---------------------------------------------------

    def _memo(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def spectra(self, f: float) -> tuple[SpectrumTable, SpectrumTable]:
        """Anchored bare-level tables at flux bias f (CSFQ first)."""

        def build():
            s1_model = csfq_spectrum(self.csfq, f)
            s1_ref = csfq_spectrum(self.csfq, 0.5)
            s2_model = transmon_spectrum(self.transmon)
            off1 = self.anchor1 - s1_ref.omega01
            off2 = self.anchor2 - s2_model.omega01
            n1 = np.arange(len(s1_model.levels))
            n2 = np.arange(len(s2_model.levels))
            return (
                SpectrumTable(s1_model.levels + off1 * n1),
                SpectrumTable(s2_model.levels + off2 * n2),
            )

        return self._memo(("spectra", f), build)

    def couplings(self) -> CouplingSet:
        def build():
            if self._couplings_card is not None:
                cc = self._couplings_card
                return CouplingSet(
                    g_rm=cc["g_rm_ghz"], g_rt=cc["g_rt_ghz"], g_mt=cc["g_mt_ghz"],
                    g_hm=cc.get("g_hm_ghz", 0.0), g_at=cc.get("g_at_ghz", 0.0),
                    omega_r=cc["omega_r_ghz"],
                )
            if self._network is None:
                raise CardValidationError(
                    "card has neither couplings nor a capacitance network"
                )
            return couplings_from_network(self._network, self.anchor1, self.anchor2)

        return self._memo(("couplings",), build)

    def j_table(self, f: float) -> np.ndarray:
        def build():
            s1, s2 = self.spectra(f)
            shape = (len(s1.levels) - 1, len(s2.levels) - 1)
            if self._network is None and self._couplings_card is None:
                table = np.zeros(shape)
                for (i, k), val in self.j_overrides.items():
                    table[i, k] = val
                return table
            return build_j_table(
                self.couplings(), s1, s2, shape, overrides=self.j_overrides
            )

        return self._memo(("j_table", f), build)

    def coupled(self, f: float) -> CoupledHamiltonian:
        def build():
            s1, s2 = self.spectra(f)
            return build_hamiltonian(s1, s2, self.j_table(f))

        return self._memo(("coupled", f), build)

    def dressed(self, f: float) -> DressedFrame:
        return self._memo(("dressed", f), lambda: dress(self.coupled(f)))

    def static_zz(self, f: float) -> float:
        """Exact static ZZ (GHz) from the dressed eigenvalues."""
        return static_zz_exact(self.dressed(f))

    def static_zz_pert(self, f: float) -> float:
        """Second-order static ZZ (GHz) from the same inputs."""
        s1, s2 = self.spectra(f)
        jt = self.j_table(f)
        return static_zz_perturbative(
            jt[0, 1], jt[1, 0], s2.omega01 - s1.omega01, s1.delta, s2.delta
        )

    def flux_gradient(self, f: float, step: float = 1e-4) -> float:
        """d omega1 / df in GHz per flux quantum (anchors cancel)."""
        up = csfq_spectrum(self.csfq, f + step).omega01
        down = csfq_spectrum(self.csfq, f - step).omega01
        return (up - down) / (2.0 * step)

    def csfq_t2_effective(self, f: float) -> float:
        """Benchmarking-effective CSFQ T2 (us) from the flux-noise model."""
        rate = pure_dephasing_rate(self.flux_gradient(f), self.dephasing)
        return effective_t2(self.coherence.t1_q1, rate)

    def coherence_at(self, f: float) -> CoherenceCard:
        """Coherence card with the CSFQ T2 replaced by its flux model."""
        return CoherenceCard(
            t1_q1=self.coherence.t1_q1,
            t2_q1=min(self.csfq_t2_effective(f), 2 * self.coherence.t1_q1),
            t1_q2=self.coherence.t1_q2,
            t2_q2=self.coherence.t2_q2,
        )

    def gamma(self, f: float) -> float:
        """Low-amplitude echoed-CR rate slope at flux f (pure CR drive)."""

        def build():
            d = self.dressed(f)
            drive = CrDrive(omega=0.0, omega_d=d.omega2, phi0=self.phi0, phi1=self.phi1, r=0.0)
            return gamma_slope(d, drive)

        return self._memo(("gamma", f), build)

    def drive_for(
        self,
        f: float,
        schedule: PulseSchedule,
        with_crosstalk: bool = True,
        refine: bool = True,
    ) -> CrDrive:
        """Calibrated CR drive for a ZX90 of the given schedule at flux f.

        The amplitude starts from the slope calibration 1/(4 gamma tau)
        and, like the experimental phase-estimation step, is refined
        against the exact echoed-CR rate so the composite rotation hits a
        quarter turn even where the rate has bent over.
        """
        from .cr import echoed_cr_frequency
        from .pulses import amplitude_for_zx90

        def build(omega_mhz: float) -> CrDrive:
            r = crosstalk_scale(f, schedule, self.crosstalk) if with_crosstalk else 0.0
            d = self.dressed(f)
            return CrDrive(
                omega=omega_mhz, omega_d=d.omega2, phi0=self.phi0, phi1=self.phi1, r=r
            )

        key = ("omega", f, schedule.tau_eff, with_crosstalk, refine)
        if key not in self._cache:
            omega = amplitude_for_zx90(self.gamma(f), schedule.tau_eff)
            if refine:
                target = 1e3 / (4.0 * schedule.tau_eff)  # MHz
                d = self.dressed(f)
                for _ in range(3):
                    rate = echoed_cr_frequency(pauli_coefficients(d, build(omega)))
                    if rate <= 0:
                        break
                    omega *= target / rate
            self._cache[key] = omega
        return build(self._cache[key])

    def zeta_of_omega(self, f: float, omega: float) -> float:
        """Total ZZ (GHz) during a drive of amplitude omega (MHz)."""
        d = self.dressed(f)
        drive = CrDrive(omega=omega, omega_d=d.omega2, phi0=self.phi0, phi1=self.phi1, r=0.0)
        return pauli_coefficients(d, drive).beta_zz * 1e-3
