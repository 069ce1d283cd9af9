"""Physical link budgets: transmit powers and geometry to average SNRs.

The optical budget supports two antenna-gain conventions: ``paper`` keeps
the reference tables' pi^2 D^2 / lambda expression verbatim (dimensionally
odd, reproduced as written), ``aperture`` uses the conventional
(pi D / lambda)^2 aperture gain.  All half-sum path-loss figures are treated as power dB and
converted with 10^(dB/10).
"""

import math
from dataclasses import dataclass

from .channel import HETERODYNE, IM_DD

BOLTZMANN = 1.38e-23  # J/K

GAIN_PAPER = "paper"
GAIN_APERTURE = "aperture"


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    if x <= 0.0:
        raise ValueError("nonpositive value has no dB representation")
    return 10.0 * math.log10(x)


def dbm_to_watt(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def noise_power(bandwidth_hz, temp_k):
    """Thermal noise power kappa * B * T in watts."""
    if bandwidth_hz <= 0.0 or temp_k <= 0.0:
        raise ValueError("bandwidth and temperature must be positive")
    return BOLTZMANN * bandwidth_hz * temp_k


@dataclass(frozen=True)
class FsoBudget:
    """Optical-hop budget; defaults are the reference satellite-downlink
    figures (1550 nm, 0.15/0.25 m lenses, 268 dB free-space loss, 30 GHz
    optical bandwidth, 300 K)."""
    p_s_dbm: float = 20.0
    d_s: float = 0.15            # transmit lens diameter, m
    d_r: float = 0.25            # receive lens diameter, m
    lambda_f: float = 1550e-9    # wavelength, m
    a_atm_db: float = 0.5        # atmospheric attenuation, dB
    a_fs_db: float = 268.0       # free-space attenuation, dB
    l_lenses_db: float = 3.0     # lens losses, dB
    m_s_db: float = 3.0          # system margin, dB
    b_o: float = 30e9            # optical bandwidth, Hz
    temp_k: float = 300.0
    eta: float = 1.0             # optical-to-electrical coefficient
    gain_model: str = GAIN_PAPER

    def __post_init__(self):
        for name in ("d_s", "d_r", "lambda_f", "b_o", "temp_k", "eta"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.gain_model not in (GAIN_PAPER, GAIN_APERTURE):
            raise ValueError(f"unknown gain model {self.gain_model!r}")

    def lens_gain_db(self, diameter):
        if self.gain_model == GAIN_PAPER:
            g = math.pi ** 2 * diameter ** 2 / self.lambda_f
        else:
            g = (math.pi * diameter / self.lambda_f) ** 2
        return linear_to_db(g)

    @property
    def path_gain_db(self):
        """Half-sum figure zeta_R in dB (amplitude notation as written,
        read as a power gain; see module docstring)."""
        return 0.5 * (self.lens_gain_db(self.d_s) + self.lens_gain_db(self.d_r)
                      - self.a_atm_db - self.a_fs_db - self.l_lenses_db
                      - self.m_s_db)


def fso_average_snr(budget, detector=HETERODYNE):
    """Average SNR gamma_bar_R of the optical hop (unit-mean fading)."""
    if detector not in (HETERODYNE, IM_DD):
        raise ValueError(f"unknown detector {detector!r}")
    p_w = dbm_to_watt(budget.p_s_dbm)
    if p_w <= 0.0 or not math.isfinite(p_w):
        raise ValueError("transmit power must be positive and finite")
    zeta = db_to_linear(budget.path_gain_db)
    sigma2 = noise_power(budget.b_o, budget.temp_k)
    i = 1 if detector == HETERODYNE else 2
    return (p_w * zeta * budget.eta) ** i / sigma2


@dataclass(frozen=True)
class RfBudget:
    """RF-hop budget; defaults are the reference downlink figures (2 GHz,
    17 km platform altitude, 500 m cell radius, 20 MHz, 300 K)."""
    p_r_dbm: float = 20.0
    f_rf: float = 2e9            # carrier, Hz
    alpha_t: float = 2.0         # path-loss exponent
    h_km: float = 17.0           # platform altitude, km
    r_n_m: float = 500.0         # cell radius, m
    b_r: float = 20e6            # RF bandwidth, Hz
    temp_k: float = 300.0
    user_distance_m: float = None  # slant range; default sqrt(H^2 + Rn^2)

    def __post_init__(self):
        if not (2.0 <= self.alpha_t <= 4.0):
            raise ValueError("path-loss exponent alpha_t must lie in [2, 4]")
        for name in ("f_rf", "h_km", "r_n_m", "b_r", "temp_k"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.user_distance_m is None:
            d = math.hypot(self.h_km * 1000.0, self.r_n_m)
            object.__setattr__(self, "user_distance_m", d)
        if self.user_distance_m <= 0.0:
            raise ValueError("user distance must be positive")

    @property
    def lambda_rf(self):
        return 299792458.0 / self.f_rf

    @property
    def path_gain_db(self):
        """Half-sum figure zeta_n^2 in dB (power reading)."""
        return 0.5 * (20.0 * math.log10(self.lambda_rf)
                      - 20.0 * self.alpha_t * math.log10(self.user_distance_m)
                      - 20.0 * math.log10(4.0 * math.pi))


def rf_average_snr(budget):
    """Average branch SNR gamma_bar_U of the RF hop."""
    p_w = dbm_to_watt(budget.p_r_dbm)
    if p_w <= 0.0 or not math.isfinite(p_w):
        raise ValueError("transmit power must be positive and finite")
    zeta2 = db_to_linear(budget.path_gain_db)
    sigma2 = noise_power(budget.b_r, budget.temp_k)
    return p_w * zeta2 / sigma2
