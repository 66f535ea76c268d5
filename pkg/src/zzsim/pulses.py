"""Echoed-CR schedule bookkeeping and calibration maps.

A gate of length t_g consists of two flat-top CR pulses with 20 ns edges
and two 40 ns control pi-pulses, so t_g = 2 tau0 + 160 ns.  Rotation-angle
accounting maps each Gaussian flat-top to an equivalent square pulse one
edge-width longer than its flat top.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ScheduleError

__all__ = [
    "PulseSchedule",
    "CrosstalkModel",
    "schedule_from_gate_length",
    "amplitude_for_zx90",
    "crosstalk_scale",
]


@dataclass(frozen=True)
class PulseSchedule:
    """Echoed-CR timing in nanoseconds."""

    tau0: float
    rise_fall: float = 20.0
    pi_pulse: float = 40.0

    def __post_init__(self):
        if self.tau0 < 0:
            raise ScheduleError("flat-top length cannot be negative")
        if self.rise_fall < 0 or self.pi_pulse < 0:
            raise ScheduleError("edge and pi-pulse durations cannot be negative")

    @property
    def t_g(self) -> float:
        """Total gate length: two flat tops, four edges, two pi-pulses."""
        return 2.0 * self.tau0 + 4.0 * self.rise_fall + 2.0 * self.pi_pulse

    @property
    def tau_eff(self) -> float:
        """Square-pulse-equivalent length of each CR pulse."""
        return self.tau0 + self.rise_fall

    @property
    def tau_total_us(self) -> float:
        """Total effective CR drive time (both pulses) in microseconds."""
        return 2.0 * self.tau_eff * 1e-3


def schedule_from_gate_length(t_g: float) -> PulseSchedule:
    """Invert t_g = 2 tau0 + 160 ns for the default edge and pi durations."""
    if t_g < 160.0:
        raise ScheduleError(f"gate length {t_g} ns is below the 160 ns overhead")
    return PulseSchedule(tau0=(t_g - 160.0) / 2.0)


def amplitude_for_zx90(gamma_f: float, tau_eff: float) -> float:
    """CR amplitude (MHz) rotating the target by 90 degrees.

    From the small-amplitude rate f_ECR = gamma(f) Omega and the quarter
    -turn condition, Omega = 1/(4 gamma tau) with tau the effective
    square-pulse length of each CR pulse (here in ns).
    """
    if gamma_f <= 0:
        raise ScheduleError("rotation is unreachable with nonpositive rate slope")
    if tau_eff <= 0:
        raise ScheduleError("effective pulse length must be positive")
    return 1e3 / (4.0 * gamma_f * tau_eff)


@dataclass(frozen=True)
class CrosstalkModel:
    """Flux- and duration-dependent crosstalk amplitude scale.

    R = max(0, a0 - slope |f - 1/2|^exponent_flux) * tau^exponent_time
    with tau the total CR drive time in microseconds.
    """

    a0: float = 0.07
    slope: float = 40.0
    exponent_flux: float = 1.2
    exponent_time: float = 2.0 / 3.0


def crosstalk_scale(
    f: float, s: PulseSchedule, m: CrosstalkModel | None = None
) -> float:
    """Crosstalk amplitude ratio R for flux bias f and schedule s."""
    m = m or CrosstalkModel()
    flux_part = m.a0 - m.slope * abs(f - 0.5) ** m.exponent_flux
    if flux_part <= 0.0:
        return 0.0
    return flux_part * s.tau_total_us**m.exponent_time
