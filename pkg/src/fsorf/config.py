"""Flat key-value configuration: parsing, defaults, and resolution.

Format: one ``section.key = value`` per line, ``#`` comments.  Sections are
``fso``, ``rf``, ``thresholds``, ``sim``.  Every key has a default from the
reference link tables; a parse error or unknown key reports its line number.
Explicitly set transmit powers are pinned during power sweeps (the sweep
drives both hops jointly otherwise).
"""

import math
from dataclasses import dataclass, field

from .budget import FsoBudget, RfBudget, GAIN_PAPER, GAIN_APERTURE
from .channel import FsoChannelSpec, RfNetworkSpec, HETERODYNE, IM_DD

_STR_KEYS = {"fso.gain_model", "fso.detector", "sim.effective_mode"}
_INT_KEYS = {"rf.m", "rf.n_t", "rf.n_users", "sim.samples", "sim.seed",
             "sim.workers"}

DEFAULTS = {
    # optical hop
    "fso.p_s_dbm": None,         # None: driven by the sweep
    "fso.d_s": 0.15,
    "fso.d_r": 0.25,
    "fso.lambda_f": 1550e-9,
    "fso.a_atm_db": 0.5,
    "fso.a_fs_db": 268.0,
    "fso.l_lenses_db": 3.0,
    "fso.m_s_db": 3.0,
    "fso.b_o": 30e9,
    "fso.temp_k": 300.0,
    "fso.eta": 1.0,
    "fso.gain_model": GAIN_PAPER,
    "fso.detector": HETERODYNE,
    "fso.alpha": 2.902,
    "fso.beta": 2.51,
    "fso.xi": 6.7,
    # RF hop
    "rf.p_r_dbm": None,
    "rf.f_rf": 2e9,
    "rf.alpha_t": 2.0,
    "rf.h_km": 17.0,
    "rf.r_n_m": 500.0,
    "rf.b_r": 20e6,
    "rf.temp_k": 300.0,
    "rf.user_distance_m": None,  # None: slant range sqrt(H^2 + Rn^2)
    "rf.m": 1,
    "rf.n_t": 1,
    "rf.n_users": 2,
    "rf.rho": 0.8,
    # decode / outage thresholds (dB)
    "thresholds.delta_th_db": 5.0,
    "thresholds.gamma_th_db": 5.0,
    # simulation
    "sim.samples": 1_000_000,
    "sim.seed": 12345,
    "sim.workers": 1,
    "sim.effective_mode": "paper",
}


class ConfigError(ValueError):
    """Configuration problem, annotated with file location where known."""


@dataclass
class Config:
    """Parsed key-value map plus the set of keys given explicitly."""
    values: dict = field(default_factory=dict)
    explicit: set = field(default_factory=set)

    @classmethod
    def from_text(cls, text, origin="<config>"):
        cfg = cls(dict(DEFAULTS), set())
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(
                    f"{origin}:{lineno}: expected 'section.key = value'")
            key, _, value = (p.strip() for p in line.partition("="))
            cfg.set(key, value, f"{origin}:{lineno}")
        return cfg

    @classmethod
    def from_path(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read(), origin=str(path))

    def set(self, key, value, where="<set>"):
        if key not in DEFAULTS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        try:
            if key in _STR_KEYS:
                parsed = str(value).strip().lower()
            elif key in _INT_KEYS:
                parsed = int(str(value), 0)
            elif str(value).strip().lower() in ("none", ""):
                parsed = None
            else:
                parsed = float(value)
        except ValueError:
            raise ConfigError(
                f"{where}: cannot parse value {value!r} for {key}") from None
        self.values[key] = parsed
        self.explicit.add(key)

    def get(self, key):
        return self.values[key]

    def copy(self):
        return Config(dict(self.values), set(self.explicit))

    # -- resolution -----------------------------------------------------

    def fso_budget(self, p_s_dbm=None):
        v = self.values
        p = v["fso.p_s_dbm"] if v["fso.p_s_dbm"] is not None else p_s_dbm
        if p is None:
            raise ConfigError("optical transmit power is neither configured "
                              "nor supplied by a sweep")
        return FsoBudget(
            p_s_dbm=p, d_s=v["fso.d_s"], d_r=v["fso.d_r"],
            lambda_f=v["fso.lambda_f"], a_atm_db=v["fso.a_atm_db"],
            a_fs_db=v["fso.a_fs_db"], l_lenses_db=v["fso.l_lenses_db"],
            m_s_db=v["fso.m_s_db"], b_o=v["fso.b_o"],
            temp_k=v["fso.temp_k"], eta=v["fso.eta"],
            gain_model=v["fso.gain_model"])

    def rf_budget(self, p_r_dbm=None):
        v = self.values
        p = v["rf.p_r_dbm"] if v["rf.p_r_dbm"] is not None else p_r_dbm
        if p is None:
            raise ConfigError("RF transmit power is neither configured nor "
                              "supplied by a sweep")
        return RfBudget(
            p_r_dbm=p, f_rf=v["rf.f_rf"], alpha_t=v["rf.alpha_t"],
            h_km=v["rf.h_km"], r_n_m=v["rf.r_n_m"], b_r=v["rf.b_r"],
            temp_k=v["rf.temp_k"], user_distance_m=v["rf.user_distance_m"])

    def system(self, ptx_dbm=None):
        """SystemSpec at a sweep power (applied to both hops unless a hop's
        power is pinned in the configuration)."""
        from .budget import fso_average_snr, rf_average_snr
        v = self.values
        fb = self.fso_budget(ptx_dbm)
        rb = self.rf_budget(ptx_dbm)
        fso = FsoChannelSpec(
            alpha=v["fso.alpha"], beta=v["fso.beta"], xi=v["fso.xi"],
            detector=v["fso.detector"],
            gamma_bar_r=fso_average_snr(fb, v["fso.detector"]))
        rf = RfNetworkSpec(
            m=v["rf.m"], n_t=v["rf.n_t"], n_users=v["rf.n_users"],
            rho=v["rf.rho"], gamma_bar_u=rf_average_snr(rb))
        from .metrics import SystemSpec
        return SystemSpec(
            fso=fso, rf=rf,
            delta_th=10.0 ** (v["thresholds.delta_th_db"] / 10.0),
            gamma_th=10.0 ** (v["thresholds.gamma_th_db"] / 10.0))

    def diagnostics(self):
        """Range findings on the resolved values, named by key."""
        v = self.values
        notes = []
        if not (2.0 <= v["rf.alpha_t"] <= 4.0):
            notes.append(("error", "rf.alpha_t",
                          f"path-loss exponent {v['rf.alpha_t']!r} outside "
                          f"[2, 4]"))
        if v["fso.gain_model"] not in (GAIN_PAPER, GAIN_APERTURE):
            notes.append(("error", "fso.gain_model",
                          f"unknown gain model {v['fso.gain_model']!r}"))
        if v["fso.detector"] not in (HETERODYNE, IM_DD):
            notes.append(("error", "fso.detector",
                          f"unknown detector {v['fso.detector']!r}"))
        if not (0.0 <= v["rf.rho"] <= 1.0):
            notes.append(("error", "rf.rho",
                          f"correlation {v['rf.rho']!r} outside [0, 1]"))
        for key in ("fso.alpha", "fso.beta", "fso.xi"):
            if v[key] is None or v[key] <= 0:
                notes.append(("error", key, "must be positive"))
        if v["rf.m"] < 1:
            notes.append(("error", "rf.m", "fading severity must be >= 1"))
        if v["sim.samples"] < 10_000:
            notes.append(("warning", "sim.samples",
                          "standard errors unreliable below 1e4 samples"))
        return notes
