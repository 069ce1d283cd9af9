"""Closed-form link metrics: outage, diversity, capacities, and symbol-error
rates for hexagonal, rectangular/square, and cross QAM constellations.

The average-SER engine integrates the negated conditional-SEP derivative
against the two-threshold outage curve.  Every derivative decomposes into
exponential pieces c * g^(nu-1) exp(-s g) (nu = 1/2 from the Gaussian-tail
terms, nu = z1+1 from the confluent-series terms), so one weighted-outage
moment J(nu, s) drives all constellation families.  J is assembled from the
optical-CDF transform (Meijer-G), the lower-incomplete-gamma transform
(Gauss 2F1), and their cross products, in a normalized form (divided by
Gamma(nu) s^-nu) that keeps every intermediate O(1) however deep the series.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .channel import (FsoChannelSpec, RfNetworkSpec, IM_DD, fso_snr_cdf,
                      best_user_outdated_pdf, outdated_sum_terms, phi_coeffs,
                      _cdf_g_spec)
from .specfun import (MeijerGSpec, meijer_g_scaled, gauss_2f1_log, kummer_1f1,
                      integrate_semi_infinite, _perturb_coalescing)

__all__ = [
    "SystemSpec", "ConstellationSpec", "SeriesPolicy",
    "outage", "asymptotic_outage", "diversity_order",
    "ergodic_capacity", "effective_capacity", "effective_capacity_closed_form",
    "conditional_sep", "conditional_sep_derivative", "aser", "hqam_params",
    "MetricSanityError", "HQAM_TABLE",
]

_SQRT2 = math.sqrt(2.0)
_LN2 = math.log(2.0)

DEFAULT_THRESHOLD = 10.0 ** 0.5   # 5 dB


class MetricSanityError(RuntimeError):
    """A hard sanity gate failed (probability out of range etc.)."""


@dataclass(frozen=True)
class SystemSpec:
    """End-to-end system: optical hop, RF hop, decode gate threshold
    delta_th and outage threshold gamma_th (linear)."""
    fso: FsoChannelSpec
    rf: RfNetworkSpec
    delta_th: float = DEFAULT_THRESHOLD
    gamma_th: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.delta_th <= 0.0 or self.gamma_th <= 0.0:
            raise ValueError("thresholds must be positive")


# Irregular hexagonal-constellation SEP constants (theta, K, K_c) by order.
HQAM_TABLE = {
    4: (1.0, 5.0 / 2.0, 3.0 / 2.0),
    8: (32.0 / 69.0, 7.0 / 2.0, 21.0 / 8.0),
    16: (8.0 / 35.0, 33.0 / 8.0, 27.0 / 8.0),
    32: (512.0 / 4503.0, 75.0 / 16.0, 33.0 / 8.0),
    64: (8.0 / 141.0, 163.0 / 32.0, 75.0 / 16.0),
    128: (2.0 / 70.56, 343.0 / 64.0, 81.0 / 16.0),
    256: (2.0 / 141.0, 711.0 / 128.0, 171.0 / 32.0),
    512: (200.0 / 28217.0, 2911.0 / 512.0, 5667.0 / 1024.0),
    1024: (100.0 / 28227.0, 2955.0 / 512.0, 1449.0 / 256.0),
}


def hqam_params(m_total):
    """(theta, K, K_c) for the irregular hexagonal constellation of size M."""
    try:
        return HQAM_TABLE[int(m_total)]
    except (KeyError, TypeError):
        raise ValueError(f"unsupported hexagonal constellation order "
                         f"{m_total!r}") from None


@dataclass(frozen=True)
class ConstellationSpec:
    """Modulation family with derived SEP constants.

    rqam takes in-phase/quadrature sizes (m_i, n_q) and the decision-distance
    ratio beta_r; sqam is square rqam; xqam requires m_i = 2 n_q with an even
    corner parameter."""
    family: str
    m_total: int
    m_i: int = None
    n_q: int = None
    beta_r: float = 1.0

    def __post_init__(self):
        fam = self.family
        if fam == "sqam":
            side = int(round(math.sqrt(self.m_total)))
            if side * side != self.m_total:
                raise ValueError("square constellation needs a square order")
            object.__setattr__(self, "m_i", side)
            object.__setattr__(self, "n_q", side)
            object.__setattr__(self, "beta_r", 1.0)
        elif fam == "hqam":
            hqam_params(self.m_total)
        elif fam == "rqam":
            if self.m_i is None or self.n_q is None:
                raise ValueError("rqam needs in-phase and quadrature sizes")
            if self.m_i * self.n_q != self.m_total:
                raise ValueError("m_i * n_q must equal the order")
            if self.beta_r <= 0.0:
                raise ValueError("decision-distance ratio must be positive")
        elif fam == "xqam":
            nq = int(round(math.sqrt(self.m_total / 2.0)))
            if 2 * nq * nq != self.m_total:
                raise ValueError("cross constellation needs order 2 * n^2")
            object.__setattr__(self, "m_i", 2 * nq)
            object.__setattr__(self, "n_q", nq)
            a2 = (self.m_i - self.n_q) / 2.0
            if a2 != int(a2) or int(a2) % 2:
                raise ValueError("cross constellation corner parameter must "
                                 "be an even integer")
        else:
            raise ValueError(f"unknown constellation family {fam!r}")

    @property
    def hqam_constants(self):
        return hqam_params(self.m_total)

    @property
    def rqam_constants(self):
        p0 = 1.0 - 1.0 / self.m_i
        q0 = 1.0 - 1.0 / self.n_q
        a0 = math.sqrt(6.0 / ((self.m_i ** 2 - 1.0)
                              + (self.n_q ** 2 - 1.0) * self.beta_r ** 2))
        return p0, q0, a0, self.beta_r * a0

    @property
    def xqam_constants(self):
        mi, nq = self.m_i, self.n_q
        mn = mi * nq
        n_n = 4.0 - 2.0 * (mi + nq) / mn
        a1 = (2.0 / 3.0) * (31.0 * mn / 32.0 - 1.0)
        a2 = (mi - nq) / 2.0
        a3 = 4.0 - 4.0 * (mi + nq) / mn + 8.0 / mn
        a4 = (mi - nq) / mn
        return n_n, a1, a2, a3, a4

    @classmethod
    def from_string(cls, text):
        """Parse 'family:M[:MixNq[:betaR]]', e.g. 'hqam:16', 'rqam:8:4x2'."""
        parts = text.strip().lower().split(":")
        if len(parts) < 2:
            raise ValueError("constellation format is family:M[:MixNq[:betaR]]")
        fam, m_total = parts[0], int(parts[1])
        mi = nq = None
        beta = 1.0
        if len(parts) >= 3 and parts[2]:
            mi, nq = (int(v) for v in parts[2].split("x"))
        if len(parts) >= 4 and parts[3]:
            beta = float(parts[3])
        if fam == "rqam" and mi is None:
            nq = int(round(math.sqrt(m_total / 2.0)))
            mi = 2 * nq
        return cls(fam, m_total, mi, nq, beta)


@dataclass(frozen=True)
class SeriesPolicy:
    """Truncation length of the infinite confluent series in the ASER sums."""
    z1_terms: int = 80

    def __post_init__(self):
        if self.z1_terms < 1:
            raise ValueError("series truncation must be at least 1")


# ----------------------------------------------------------------------
# conditional symbol-error probabilities and their derivatives
# ----------------------------------------------------------------------

def _q(x):
    return 0.5 * special.erfc(x / _SQRT2)


def conditional_sep(c, gamma):
    """AWGN conditional symbol-error probability at SNR gamma (vectorized)."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0.0):
        raise ValueError("SNR must be nonnegative")
    if c.family == "hqam":
        theta, k, kc = c.hqam_constants
        qa = _q(np.sqrt(theta * g))
        out = (k * qa
               + (2.0 / 3.0) * kc * _q(np.sqrt(2.0 * theta * g / 3.0)) ** 2
               - 2.0 * kc * qa * _q(np.sqrt(theta * g / 3.0)))
    elif c.family in ("rqam", "sqam"):
        p0, q0, a0, b0 = c.rqam_constants
        qa = _q(a0 * np.sqrt(g))
        qb = _q(b0 * np.sqrt(g))
        out = 2.0 * (p0 * qa * (1.0 - 2.0 * q0 * qb) + q0 * qb)
    else:
        n_n, a1, a2, a3, a4 = c.xqam_constants
        mn = c.m_i * c.n_q
        root = np.sqrt(2.0 * g / a1)
        q1 = _q(root)
        bracket = _q(a2 * root) - q1 * _q(a2 * root)
        for l1 in range(1, int(a2) // 2):
            ql = _q(2.0 * l1 * root)
            bracket = bracket + ql - 2.0 * q1 * ql
        out = n_n * q1 + (8.0 / mn) * bracket - a3 * q1 ** 2
    return out if out.ndim else float(out)


def _sep_pieces(c):
    """Negated conditional-SEP derivative as
    half-order pieces [(coef, rate)]: coef * g^(-1/2) exp(-rate g), plus
    confluent blocks [(rate, [(weight, base), ...])]:
    sum_z1 r(z1) [sum_j w_j base_j^z1] g^z1 exp(-rate g),
    r(z1) = Gamma(1.5)/Gamma(z1 + 1.5).
    """
    if c.family == "hqam":
        theta, k, kc = c.hqam_constants
        half = [
            (0.5 * math.sqrt(theta / (2.0 * math.pi)) * (k - kc), theta / 2.0),
            ((kc / 3.0) * math.sqrt(theta / (3.0 * math.pi)), theta / 3.0),
            (-(kc / 2.0) * math.sqrt(theta / (6.0 * math.pi)), theta / 6.0),
        ]
        croot = kc * theta / (2.0 * math.sqrt(3.0) * math.pi)
        blocks = [
            (2.0 * theta / 3.0, [
                (-2.0 * kc * theta / (9.0 * math.pi), theta / 3.0),
                (croot, theta / 2.0),
                (croot, theta / 6.0),
            ]),
        ]
    elif c.family in ("rqam", "sqam"):
        p0, q0, a0, b0 = c.rqam_constants
        half = [
            (a0 * p0 * (1.0 - q0) / math.sqrt(2.0 * math.pi), a0 ** 2 / 2.0),
            (b0 * q0 * (1.0 - p0) / math.sqrt(2.0 * math.pi), b0 ** 2 / 2.0),
        ]
        w = a0 * b0 * p0 * q0 / math.pi
        blocks = [
            ((a0 ** 2 + b0 ** 2) / 2.0,
             [(w, a0 ** 2 / 2.0), (w, b0 ** 2 / 2.0)]),
        ]
    else:
        n_n, a1, a2, a3, a4 = c.xqam_constants
        mn = c.m_i * c.n_q
        # the Q'(g/a1)-collection constant is 4 a2 - 4 over the order
        # (reduces to the familiar 12 only for the a2 = 4 constellation)
        a6 = 0.5 / math.sqrt(math.pi * a1) * (-n_n + (4.0 * a2 - 4.0) / mn + a3)
        half = [
            (-a6, 1.0 / a1),
            (a4 / math.sqrt(math.pi * a1), a2 ** 2 / a1),
        ]
        blocks = []
        for l1 in range(1, int(a2) // 2):
            w = 16.0 * l1 / (mn * math.pi * a1)
            blocks.append(((4.0 * l1 ** 2 + 1.0) / a1,
                           [(w, 1.0 / a1), (w, 4.0 * l1 ** 2 / a1)]))
        w = 2.0 * a4 / (math.pi * a1)
        blocks.append(((1.0 + a2 ** 2) / a1,
                       [(w, 1.0 / a1), (w, a2 ** 2 / a1)]))
        blocks.append((2.0 / a1, [(a3 / (math.pi * a1), 1.0 / a1)]))
    return half, blocks


def conditional_sep_derivative(c, gamma):
    """d/dgamma of the conditional SEP (confluent blocks resummed with 1F1)."""
    if gamma <= 0.0:
        raise ValueError("derivative defined for positive SNR")
    half, blocks = _sep_pieces(c)
    out = 0.0
    for coef, rate in half:
        out += coef * gamma ** -0.5 * math.exp(-rate * gamma)
    for rate, weights in blocks:
        for w, base in weights:
            z = base * gamma
            if z > 30.0:
                # exact resummation 1F1(1; 3/2; z) = sqrt(pi) erf(sqrt z) e^z
                # / (2 sqrt z); keeps the damped product finite at large SNR
                out += (w * 0.5 * math.sqrt(math.pi / z)
                        * math.erf(math.sqrt(z))
                        * math.exp(-(rate - base) * gamma))
            else:
                out += w * math.exp(-rate * gamma) * kummer_1f1(1.0, 1.5, z)
    return -out


# ----------------------------------------------------------------------
# outage and diversity
# ----------------------------------------------------------------------

def _rf_cdf(spec, x):
    acc = 0.0
    for c0, c1, c2 in outdated_sum_terms(spec):
        acc += (c0 * c2 ** (-c1) * special.gammainc(c1, c2 * x)
                * special.gamma(c1))
    return spec.n_users * acc


def outage(spec):
    """Probability the delivered end-to-end SNR falls below gamma_th."""
    f_fso = fso_snr_cdf(spec.fso, spec.delta_th)
    f_rf = _rf_cdf(spec.rf, spec.gamma_th)
    p = f_fso + (1.0 - f_fso) * f_rf
    if not -1e-12 <= p <= 1.0 + 1e-9:
        raise MetricSanityError(f"outage {p!r} escaped [0, 1]")
    return min(max(p, 0.0), 1.0)


def _lgamma_signed(v):
    """(log|Gamma|, sign); raises at poles."""
    lg = math.lgamma(v)
    sign = 1.0
    if v < 0 and math.floor(v) % 2 != 0:
        sign = -1.0
    return lg, sign


def _fso_cdf_leading(spec, x):
    """Leading small-argument terms of the optical CDF: the first residue of
    each ladder (coalescing ladders epsilon-separated as in the evaluator)."""
    g = _cdf_g_spec(spec)
    z = spec.big_b * x / spec.mu
    ladders, _ = _perturb_coalescing(g.b_list[:g.m], 1e-6)
    b = tuple(ladders) + g.b_list[g.m:]
    a = g.a_list
    total = 0.0
    for h in range(g.m):
        bh = b[h]
        lg = math.log(spec.big_a)
        sign = 1.0
        skip = False
        for j in range(g.m):
            if j == h:
                continue
            l, s = _lgamma_signed(b[j] - bh)
            lg += l
            sign *= s
        for j in range(g.n):
            l, s = _lgamma_signed(1.0 + bh - a[j])
            lg += l
            sign *= s
        for j in range(g.m, g.q):
            v = 1.0 + bh - b[j]
            if v <= 0 and v == round(v):
                skip = True
                break
            l, s = _lgamma_signed(v)
            lg -= l
            sign *= s
        if not skip:
            for j in range(g.n, g.p):
                v = a[j] - bh
                if v <= 0 and v == round(v):
                    skip = True
                    break
                l, s = _lgamma_signed(v)
                lg -= l
                sign *= s
        if skip:
            continue
        total += sign * math.exp(lg + bh * math.log(z))
    return total


def asymptotic_outage(spec):
    """High-SNR outage approximation: leading optical residues plus the RF
    high-SNR branch (exact-CSI form when rho = 1)."""
    rf = spec.rf
    fso_part = _fso_cdf_leading(spec.fso, spec.delta_th)
    mnt = rf.shape
    u = rf.m * spec.gamma_th / rf.gamma_bar_u
    if rf.rho == 1.0:
        rf_part = ((1.0 / special.gamma(mnt + 1.0)) ** rf.n_users
                   * u ** (rf.n_users * mnt))
    else:
        acc = 0.0
        for k in range(rf.n_users):
            ph = phi_coeffs(k, mnt)
            for l in range(k * (mnt - 1) + 1):
                acc += (math.comb(rf.n_users - 1, k) * (-1.0) ** k
                        / special.gamma(mnt) ** 2 * ph[l]
                        * special.gamma(mnt + l) / mnt
                        * (1.0 + k * (1.0 - rf.rho)) ** (-(mnt + l))
                        * (1.0 - rf.rho) ** l)
        rf_part = rf.n_users * acc * u ** mnt
    return fso_part + rf_part


def diversity_order(spec):
    """High-SNR outage slope: min of the optical exponents and the RF
    selection order (multiuser gain survives only with exact CSI)."""
    fso = spec.fso
    i = fso.i
    rf_order = float(spec.rf.shape)
    if spec.rf.rho == 1.0:
        rf_order *= spec.rf.n_users
    return min(fso.xi ** 2 / i, fso.alpha / i, fso.beta / i, rf_order)


# ----------------------------------------------------------------------
# capacities
# ----------------------------------------------------------------------

def _rho_const(spec):
    return 1.0 if spec.fso.i == 1 else math.e / (2.0 * math.pi)


def _gate_open_probability(spec):
    return 1.0 - fso_snr_cdf(spec.fso, spec.delta_th)


def _capacity_g_spec(c1):
    return MeijerGSpec(m=3, n=1, a_list=(0.0, 1.0),
                       b_list=(float(c1), 0.0, 0.0))


def ergodic_capacity(spec):
    """Mean spectral efficiency (bits/s/Hz) of the gated two-hop link."""
    rho_c = _rho_const(spec)
    acc = 0.0
    for c0, c1, c2 in outdated_sum_terms(spec.rf):
        g = meijer_g_scaled(_capacity_g_spec(c1), c2 / rho_c, 0.0,
                            abs_floor=1e-12)
        acc += c0 * c2 ** (-c1) * g
    value = (spec.rf.n_users / (2.0 * _LN2) * acc
             * _gate_open_probability(spec))
    if value < -1e-9:
        raise MetricSanityError(f"negative capacity {value!r}")
    return max(value, 0.0)


def _power_kernel_expectation(spec, theta_hat, rho_c):
    """E[(1 + rho_c g)^(-theta_hat)] over the delivered-SNR density, by
    adaptive quadrature (primary route)."""
    rf = spec.rf
    knee = min(3.0 * rf.gamma_bar_u * rf.n_t,
               max(1e-2, 20.0 / (1.0 + rho_c * theta_hat)))
    f = lambda g: (best_user_outdated_pdf(rf, g)
                   * math.exp(-theta_hat * math.log1p(rho_c * g)))
    return integrate_semi_infinite(f, 1e-11, knee=knee)


def _scaled_upper_gamma_seq(b_values, x):
    """s_b = Gamma(b, x) e^x x^(-b) for a descending unit-spaced ladder of b
    values, via the scaled recurrence s_{b-1} = (x s_b - 1)/(b - 1).

    Steps are taken in log space while s would overflow; there x s >> 1 and
    the -1 is negligible."""
    b_top = b_values[0]
    n_start = int(math.ceil(max(2.0 - b_top, x - b_top, 0.0))) + 3
    b = b_top + n_start
    tail = float(special.gammaincc(b, x))
    log_s = (math.log(max(tail, 1e-300)) + special.gammaln(b) + x
             - b * math.log(x))
    s = math.exp(log_s) if log_s < 600.0 else None
    remaining = {int(round(b_top - bv)): bv for bv in b_values}
    out = {}
    while remaining:
        off = int(round(b_top - b))
        if off in remaining:
            if s is None:
                s = math.exp(log_s)   # unreachable for sane inputs; safe
            out[remaining.pop(off)] = s
            if not remaining:
                break
        if abs(b - 1.0) < 1e-12:
            raise OverflowError("upper-gamma ladder hit the b = 1 pole")
        if s is None:
            log_s += math.log(x) - math.log(abs(b - 1.0))
            if log_s < 600.0:
                s = math.exp(log_s)
        else:
            s = (x * s - 1.0) / (b - 1.0)
        b -= 1.0
    return out


def effective_capacity_closed_form(spec, theta):
    """Finite-sum form of the power-kernel expectation (cross-check route).

    The printed variant keeps a detector-constant power outside the inner sum
    and omits the detector scaling in the upper-gamma argument; both are
    restored here (they only differ for the intensity detector)."""
    theta_hat = theta / (2.0 * _LN2)
    rho_c = _rho_const(spec)
    total = 0.0
    for c0, c1, c2 in outdated_sum_terms(spec.rf):
        x = c2 / rho_c
        c1i = int(round(c1))
        b_values = [z1 - theta_hat + 1.0 for z1 in range(c1i - 1, -1, -1)]
        s_map = _scaled_upper_gamma_seq(b_values, x)
        inner = 0.0
        for z1 in range(c1i):
            inner += (math.comb(c1i - 1, z1) * (-1.0) ** (c1i - 1 - z1)
                      * s_map[z1 - theta_hat + 1.0])
        total += c0 * rho_c ** (-c1) * inner
    return spec.rf.n_users * total


def effective_capacity(spec, theta):
    """Delay-constrained throughput -(1/theta) P[gate open] ln E[...], with
    the expectation by quadrature; the finite-sum form is computed alongside
    and a disagreement beyond 1e-3 relative is warned about."""
    if theta <= 0.0:
        raise ValueError("delay exponent must be positive")
    theta_hat = theta / (2.0 * _LN2)
    rho_c = _rho_const(spec)
    expectation = _power_kernel_expectation(spec, theta_hat, rho_c)
    if expectation <= 0.0:
        raise MetricSanityError("power-kernel expectation must be positive")
    try:
        closed = effective_capacity_closed_form(spec, theta)
        if abs(closed - expectation) > 1e-3 * abs(expectation):
            warnings.warn(
                f"finite-sum effective-capacity form disagrees with "
                f"quadrature: {closed!r} vs {expectation!r}", UserWarning)
    except (OverflowError, ValueError):
        pass
    value = -_gate_open_probability(spec) * math.log(expectation) / theta
    return max(value, 0.0)


# ----------------------------------------------------------------------
# average symbol-error rate
# ----------------------------------------------------------------------

def _f_spec(spec, psi1):
    i = spec.i
    return MeijerGSpec(m=3 * i, n=2,
                       a_list=(psi1 + 1.0, 1.0) + spec.tau1,
                       b_list=spec.tau2 + (0.0,))


def _fso_transform_scaled(spec, nu, psi2, log_extra, abs_floor=3e-8):
    """exp(log_extra) * integral g^(nu-1) exp(-psi2 g) F_optical(g) dg.

    The assembled moments are bounded by 1, so the caller sets the absolute
    floor from the weight its term carries in the final sum."""
    arg = spec.big_b / (psi2 * spec.mu)
    log_pref = math.log(spec.big_a) - nu * math.log(psi2) + log_extra
    return meijer_g_scaled(_f_spec(spec, -nu), arg, log_pref,
                           abs_floor=abs_floor)


def _j_hat(system, nu, s, rf_terms, abs_floor=3e-8):
    """Normalized weighted-outage moment E[P_o(g)] under Gamma(nu, 1/s), with
    P_o(g) = F_fso(g) + F_rf(g) - F_fso(g) F_rf(g); lies in [0, 1]."""
    fso = system.fso
    lg_nu = special.gammaln(nu)
    log_norm = nu * math.log(s) - lg_nu
    n_users = system.rf.n_users

    total = _fso_transform_scaled(fso, nu, s, log_norm, abs_floor)
    for c0, c1, c2 in rf_terms:
        if c0 == 0.0:
            continue
        sgn = math.copysign(1.0, c0)
        log_c0 = math.log(abs(c0) * n_users)
        l2f1, _ = gauss_2f1_log(1.0, c1 + nu, c1 + 1.0, c2 / (c2 + s))
        total += sgn * math.exp(log_c0 + special.gammaln(c1 + nu)
                                - math.log(c1)
                                - (c1 + nu) * math.log(c2 + s)
                                + l2f1 + nu * math.log(s) - lg_nu)
        log_k = log_c0 + special.gammaln(c1) - c1 * math.log(c2)
        total -= sgn * _fso_transform_scaled(fso, nu, s, log_norm + log_k,
                                             abs_floor)
        for z in range(int(round(c1))):
            log_z = log_k + z * math.log(c2) - special.gammaln(z + 1.0)
            total += sgn * _fso_transform_scaled(fso, nu + z, s + c2,
                                                 log_norm + log_z, abs_floor)
    return total


def _j_hat_quadrature(system, nu, s):
    """Gamma(nu, 1/s)-weighted moment of the two-threshold outage curve by
    direct quadrature of the closed-form CDFs; fallback for arguments where
    the transform assembly loses its accuracy guarantee."""
    from .channel import best_user_outdated_cdf

    def po(g):
        fr = fso_snr_cdf(system.fso, g)
        fu = best_user_outdated_cdf(system.rf, g)
        return fr + fu - fr * fu

    lg_nu = special.gammaln(nu)

    def w(g):
        if g <= 0.0:
            return 0.0
        return math.exp((nu - 1.0) * math.log(g) - s * g
                        + nu * math.log(s) - lg_nu) * po(g)

    centre = nu / s
    spread = 9.0 * math.sqrt(nu) / s
    from scipy import integrate as _int
    lo = max(0.0, centre - spread)
    hi = centre + spread + 20.0 / s
    head = _int.quad(w, lo, hi, epsabs=1e-10, epsrel=1e-9, limit=300)[0]
    left = _int.quad(w, 0.0, lo, epsabs=1e-10, epsrel=1e-9, limit=300)[0] if lo > 0 else 0.0
    right = _int.quad(w, hi, math.inf, epsabs=1e-10, epsrel=1e-9, limit=300)[0]
    return head + left + right


def aser(c, system, policy=SeriesPolicy(), allow_im_dd=False):
    """Average symbol-error rate of the constellation over the two-hop link.

    The coherent detector is the documented-accuracy path; the intensity
    detector is admitted only behind ``allow_im_dd``."""
    if system.fso.detector == IM_DD and not allow_im_dd:
        raise ValueError("symbol-error analysis is calibrated for the "
                         "coherent detector; pass allow_im_dd=True to "
                         "override")
    half, blocks = _sep_pieces(c)
    rf_terms = outdated_sum_terms(system.rf)
    lg15 = special.gammaln(1.5)
    total = 0.0
    for coef, rate in half:
        w = abs(coef) * math.exp(special.gammaln(0.5) - 0.5 * math.log(rate))
        floor = min(1e-2, max(2e-6, 1e-7 / max(w, 1e-300)))
        try:
            j = _j_hat(system, 0.5, rate, rf_terms, floor)
        except Exception:
            j = _j_hat_quadrature(system, 0.5, rate)
        total += coef * math.exp(special.gammaln(0.5)
                                 - 0.5 * math.log(rate)) * j
    worst_tail = 0.0
    for rate, weights in blocks:
        last = 0.0
        j_prev = None
        for z1 in range(policy.z1_terms):
            coef = 0.0
            bound = 0.0
            for w, base in weights:
                t = w * math.exp(lg15 - special.gammaln(z1 + 1.5)
                                 + special.gammaln(z1 + 1.0)
                                 + z1 * math.log(base)
                                 - (z1 + 1.0) * math.log(rate))
                coef += t
                bound += abs(t)
            if bound <= 1e-18 * max(abs(total), 1e-30):
                # the moment is at most 1, so the term is below roundoff
                last = coef
                continue
            floor = min(1e-2, max(2e-6, 1e-7 / bound))
            try:
                j = _j_hat(system, z1 + 1.0, rate, rf_terms, floor)
            except Exception:
                # the moment rises monotonically toward 1 with z1; once it
                # has saturated, carrying it forward bounds the error by
                # (1 - j_prev) per remaining term; otherwise integrate the
                # closed-form CDFs directly
                if j_prev is not None and j_prev >= 1.0 - 1e-4:
                    j = j_prev
                else:
                    j = _j_hat_quadrature(system, z1 + 1.0, rate)
            j_prev = j
            last = coef * j
            total += last
        if total != 0.0:
            worst_tail = max(worst_tail, abs(last) / abs(total))
    # the 80-term default leaves an intrinsic ~2e-8 relative tail when the
    # moments saturate; the gate guards truncation-doubling stability (1e-6)
    if worst_tail > 2e-7:
        raise MetricSanityError(
            f"confluent-series truncation insufficient: tail ratio "
            f"{worst_tail:.2e}")
    if not -1e-12 <= total <= 1.0 + 1e-9:
        raise MetricSanityError(f"ASER {total!r} escaped [0, 1]")
    return min(max(total, 0.0), 1.0)
