"""Model parameters for the driven qubit + finite electron calorimeter.

All quantities are SI floating point.  Characteristic magnitudes for the
standard operating point (level spacing 0.5 K * k_B, phonon bath at 0.1 K):

    omega            ~ 6.5e10  rad/s
    jump rates       ~ 1e8 .. 1e10  1/s
    heat capacity C  ~ 2.1e-20 J/K^2   (1500 k_B per kelvin)
    X = Te^2 quantum ~ 3.3e-4  K^2     (level_spacing / C)
    phonon drift     ~ 1e3     K^2/s near the operating point
    phonon diffusion ~ 0.64    K^4/s (variance rate of X at T_p)

The calorimeter enters only through the combination C = N * gamma
(energy E = C * Te^2), so the electron count N is pure bookkeeping: any
physical output is invariant under changing N at fixed C.  N appears
explicitly only where the perturbative corrections of the reduced
temperature equation are assembled, and there it cancels against the
per-electron coefficient gamma = C / N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .constants import HBAR, KB
from .errors import ConfigError

__all__ = ["PhysicalParams", "nominal_params", "params_to_text", "params_from_text"]


@dataclass(frozen=True)
class PhysicalParams:
    """Immutable bundle of all physical constants of the model.

    Fields
    ------
    level_spacing : qubit gap hbar*omega, joule
    drive_strength : kappa, dimensionless drive amplitude (>= 0)
    drive_frequency : omega_d, rad/s
    coupling : g, dimensionless qubit-calorimeter coupling (>= 0)
    heat_capacity_coeff : C, joule/kelvin^2, so that dX = dE / C
    electron_count : N, dimensionless bookkeeping parameter (see module docs)
    sigma_v : Sigma*V, watt/kelvin^5, electron-phonon coupling times volume
    phonon_temp : T_p, kelvin
    gamma_floor : decay rate used below the jump threshold X <= deltaX_q, 1/s
    """

    level_spacing: float = 0.5 * KB
    drive_strength: float = 0.05
    drive_frequency: float = 0.5 * KB / HBAR
    coupling: float = math.sqrt(0.1)
    heat_capacity_coeff: float = 1500.0 * KB
    electron_count: float = 1.0
    sigma_v: float = 2.0e-12
    phonon_temp: float = 0.1
    gamma_floor: float = 1.0

    def __post_init__(self):
        positive = [
            "level_spacing",
            "drive_frequency",
            "heat_capacity_coeff",
            "electron_count",
            "sigma_v",
            "phonon_temp",
            "gamma_floor",
        ]
        for name in positive:
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be strictly positive, got {getattr(self, name)!r}")
        # kappa = 0 (undriven) and g = 0 (uncoupled) are meaningful limits.
        if self.drive_strength < 0.0:
            raise ConfigError(f"drive_strength must be >= 0, got {self.drive_strength!r}")
        if self.coupling < 0.0:
            raise ConfigError(f"coupling must be >= 0, got {self.coupling!r}")

    # -- derived quantities -------------------------------------------------

    @property
    def omega(self) -> float:
        """Qubit angular frequency, rad/s."""
        return self.level_spacing / HBAR

    @property
    def level_spacing_K(self) -> float:
        """Qubit gap expressed as hbar*omega / k_B, kelvin."""
        return self.level_spacing / KB

    @property
    def delta_xq(self) -> float:
        """Temperature-squared quantum per emitted/absorbed photon, K^2."""
        return self.level_spacing / self.heat_capacity_coeff

    @property
    def gamma_eff(self) -> float:
        """Per-electron heat capacity coefficient gamma = C / N, J/K^2."""
        return self.heat_capacity_coeff / self.electron_count

    @property
    def lam(self) -> float:
        """Drive matrix element kappa*omega in the resonant rotating frame, 1/s."""
        return self.drive_strength * self.omega

    @property
    def g2(self) -> float:
        """Coupling squared g^2."""
        return self.coupling**2

    def with_(self, **kwargs) -> "PhysicalParams":
        """Copy with replaced fields (g2=... and level_spacing_K=... accepted)."""
        if "g2" in kwargs:
            kwargs["coupling"] = math.sqrt(kwargs.pop("g2"))
        if "level_spacing_K" in kwargs:
            kwargs["level_spacing"] = kwargs.pop("level_spacing_K") * KB
        return replace(self, **kwargs)


def nominal_params(g2: float = 0.1, kappa: float = 0.05, **kwargs) -> PhysicalParams:
    """Standard operating point used by the preset experiments.

    hbar*omega = 0.5 k_B K, resonant drive, C = 1500 k_B / K,
    Sigma*V = 2e-12 W/K^5 (Sigma = 2e9 W K^-5 m^-3 typical of a normal
    metal, V = 1e-21 m^3), T_p = 0.1 K.
    """
    return PhysicalParams(coupling=math.sqrt(g2), drive_strength=kappa).with_(**kwargs)


# -- plain-text config round-trip -------------------------------------------

_FIELD_NAMES = [f.name for f in fields(PhysicalParams)]

# keys accepted with a kelvin-unit suffix: value is E / k_B in kelvin
_KELVIN_KEYS = {
    "level_spacing_K": ("level_spacing", KB),
    # heat capacity in units of k_B per kelvin
    "heat_capacity_coeff_kB_K": ("heat_capacity_coeff", KB),
}


def params_to_text(p: PhysicalParams) -> str:
    """Serialize to a flat ``key = value`` block (round-trips bit-exactly)."""
    lines = [f"{name} = {getattr(p, name)!r}" for name in _FIELD_NAMES]
    return "\n".join(lines) + "\n"


def params_from_text(text: str, base: PhysicalParams | None = None) -> PhysicalParams:
    """Parse a flat ``key = value`` config block.

    Unknown keys raise ConfigError naming the key and line.  Keys listed in
    ``_KELVIN_KEYS`` are accepted as kelvin-unit alternatives.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        try:
            num = float(val)
        except ValueError:
            raise ConfigError(f"line {lineno}: value for {key!r} is not a number: {val!r}")
        if key in _KELVIN_KEYS:
            name, scale = _KELVIN_KEYS[key]
            values[name] = num * scale
        elif key in _FIELD_NAMES:
            values[key] = num
        else:
            raise ConfigError(f"line {lineno}: unknown parameter key {key!r}")
    if base is None:
        base = PhysicalParams()
    return replace(base, **values)
