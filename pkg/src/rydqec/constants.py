"""Physical constants shared across modules.

Everything here can be overridden per call; these are the documented
defaults used by the presets and the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass, field

LATTICE_SPACING_UM = 1.7
"""Atom spacing of the array, in micrometers."""

TAU_E_NS = 1.825
"""Edge time constant of the Rabi envelope's logistic turn-on/off, in ns."""

CROSSTALK_THRESHOLD = 0.01
"""Upper limit on the blockade-crosstalk metric x_i for concurrent CZ pairs."""

LOCAL_GATE_FIXED_US = 3.5
"""Fixed illumination cost of all single-qubit layers per QEC round, in us."""

LOCAL_SWITCH_UNITS = 4
"""Beam-switching slots consumed by the single-qubit layers per round."""

LEVEL_LIFETIMES_US = {
    "50s1/2": 60.4,
    "83s1/2": 209.0,
    "90s1/2": 252.0,
}
"""Radiative lifetimes of the Cs Rydberg levels used by the gate classes."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Bundle of the override-able constants, mostly for config-driven runs."""

    lattice_spacing_um: float = LATTICE_SPACING_UM
    tau_e_ns: float = TAU_E_NS
    crosstalk_threshold: float = CROSSTALK_THRESHOLD
    local_gate_fixed_us: float = LOCAL_GATE_FIXED_US
    local_switch_units: int = LOCAL_SWITCH_UNITS
    level_lifetimes_us: dict[str, float] = field(
        default_factory=lambda: dict(LEVEL_LIFETIMES_US)
    )


DEFAULTS = PhysicalConstants()
