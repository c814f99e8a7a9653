import math

import pytest

from qcalsim.constants import KB
from qcalsim.errors import ConfigError
from qcalsim.params import PhysicalParams, nominal_params, params_from_text, params_to_text


def test_defaults_match_standard_operating_point():
    p = nominal_params()
    assert p.level_spacing_K == pytest.approx(0.5)
    assert p.heat_capacity_coeff == pytest.approx(1500.0 * KB)
    assert p.drive_frequency == pytest.approx(p.omega)  # resonant
    assert p.g2 == pytest.approx(0.1)
    assert p.drive_strength == 0.05
    assert p.sigma_v == 2.0e-12
    assert p.phonon_temp == 0.1


def test_jump_quantum_positive_and_sized():
    p = nominal_params()
    # hbar*omega / C = (0.5 K) / (1500 /K) = 1/3000 K^2
    assert p.delta_xq == pytest.approx(1.0 / 3000.0)
    assert p.delta_xq > 0


def test_rejects_nonpositive_fields():
    with pytest.raises(ConfigError):
        PhysicalParams(level_spacing=0.0)
    with pytest.raises(ConfigError):
        PhysicalParams(phonon_temp=-0.1)
    with pytest.raises(ConfigError):
        PhysicalParams(heat_capacity_coeff=0.0)
    with pytest.raises(ConfigError):
        PhysicalParams(drive_strength=-0.01)
    with pytest.raises(ConfigError):
        PhysicalParams(coupling=-0.5)


def test_undriven_and_uncoupled_limits_allowed():
    PhysicalParams(drive_strength=0.0)
    PhysicalParams(coupling=0.0)


def test_with_accepts_g2_and_kelvin_gap():
    p = nominal_params().with_(g2=0.05, level_spacing_K=1.0)
    assert p.g2 == pytest.approx(0.05)
    assert p.level_spacing == pytest.approx(KB)


def test_config_round_trip_is_bit_exact():
    p = nominal_params(g2=0.073, kappa=0.031).with_(phonon_temp=0.085)
    text = params_to_text(p)
    q = params_from_text(text)
    for name in ("level_spacing", "drive_strength", "drive_frequency", "coupling",
                 "heat_capacity_coeff", "electron_count", "sigma_v", "phonon_temp",
                 "gamma_floor"):
        assert getattr(p, name) == getattr(q, name), name


def test_kelvin_suffix_keys():
    q = params_from_text("level_spacing_K = 0.5\nheat_capacity_coeff_kB_K = 1500\n")
    assert q.level_spacing == pytest.approx(0.5 * KB)
    assert q.heat_capacity_coeff == pytest.approx(1500.0 * KB)


def test_unknown_key_names_key_and_line():
    with pytest.raises(ConfigError, match="line 2.*not_a_key"):
        params_from_text("phonon_temp = 0.1\nnot_a_key = 3\n")


def test_bad_value_names_line():
    with pytest.raises(ConfigError, match="line 1"):
        params_from_text("phonon_temp = warm\n")


def test_electron_count_is_pure_bookkeeping():
    """gamma = C/N compensates N everywhere: delta_xq is N-independent."""
    a = nominal_params()
    b = a.with_(electron_count=1000.0)
    assert a.delta_xq == b.delta_xq
    assert b.gamma_eff == pytest.approx(a.gamma_eff / 1000.0)
    assert math.isclose(b.gamma_eff * b.electron_count, a.heat_capacity_coeff)
