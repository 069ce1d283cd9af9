"""Channel distributions and samplers for the optical and RF hops.

Optical hop: Gamma-Gamma turbulence with pointing-error misalignment, two
detector types (coherent i=1, intensity-modulation i=2).  RF hop: Nakagami-m
branches with transmit beamforming, best-user selection, and the induced
order statistics when the selection CSI is outdated (correlation rho).

Analytic densities and samplers are mutually consistent: the sampler scale
is calibrated once per parameter set against the analytic mean, so empirical
distributions match the closed-form CDF for the given average SNR.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .specfun import MeijerGSpec, meijer_g_scaled, integrate_semi_infinite

HETERODYNE = "heterodyne"
IM_DD = "im_dd"

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FsoChannelSpec:
    """Optical-hop fading parameters.  ``gamma_bar_r`` is the average SNR
    with unit-mean fading; the electrical average ``mu`` follows from the
    detector type."""
    alpha: float
    beta: float
    xi: float
    detector: str = HETERODYNE
    gamma_bar_r: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0 or self.xi <= 0:
            raise ValueError("shape parameters must be positive")
        if self.detector not in (HETERODYNE, IM_DD):
            raise ValueError(f"unknown detector {self.detector!r}")
        if self.gamma_bar_r <= 0:
            raise ValueError("average SNR must be positive")

    @property
    def i(self):
        return 1 if self.detector == HETERODYNE else 2

    @property
    def mu(self):
        """Average electrical SNR mu_i of the detected signal."""
        if self.i == 1:
            return self.gamma_bar_r
        x2 = self.xi * self.xi
        ratio = (x2 * self.alpha * self.beta * (x2 + 2.0)
                 / ((self.alpha + 1.0) * (self.beta + 1.0) * (x2 + 1.0) ** 2))
        return ratio * self.gamma_bar_r

    @property
    def big_a(self):
        i = self.i
        return (i ** (self.alpha + self.beta - 2.0) * self.xi ** 2
                / (_TWO_PI ** (i - 1) * special.gamma(self.alpha)
                   * special.gamma(self.beta)))

    @property
    def big_b(self):
        i = self.i
        return (self.alpha * self.beta) ** i / i ** (2 * i)

    @property
    def tau1(self):
        i, x2 = self.i, self.xi ** 2
        return tuple((x2 + j) / i for j in range(1, i + 1))

    @property
    def tau2(self):
        i, x2 = self.i, self.xi ** 2
        return (tuple((x2 + j) / i for j in range(i))
                + tuple((self.alpha + j) / i for j in range(i))
                + tuple((self.beta + j) / i for j in range(i)))


@dataclass(frozen=True)
class RfNetworkSpec:
    """RF-hop parameters: Nakagami severity m (integer), n_t transmit
    antennas, n_users selectable users, CSI correlation rho, per-branch
    average SNR gamma_bar_u."""
    m: int
    n_t: int
    n_users: int
    rho: float
    gamma_bar_u: float

    def __post_init__(self):
        if self.m != int(self.m) or self.m < 1:
            raise ValueError("Nakagami m must be a positive integer "
                             "(finite-sum expansion requires it)")
        object.__setattr__(self, "m", int(self.m))
        if self.n_t < 1 or self.n_t != int(self.n_t):
            raise ValueError("antenna count must be a positive integer")
        object.__setattr__(self, "n_t", int(self.n_t))
        if self.n_users < 1 or self.n_users != int(self.n_users):
            raise ValueError("user count must be a positive integer")
        object.__setattr__(self, "n_users", int(self.n_users))
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("correlation must lie in [0, 1]")
        if self.gamma_bar_u <= 0:
            raise ValueError("average SNR must be positive")

    @property
    def shape(self):
        return self.m * self.n_t


@dataclass(frozen=True)
class RngStream:
    """Counter-based stream: identical (seed, stream_index) reproduces the
    same sequence on every platform supported by numpy's Philox."""
    seed: int
    stream_index: int = 0

    def generator(self):
        return np.random.Generator(
            np.random.Philox(key=self.seed).jumped(self.stream_index))


# ----------------------------------------------------------------------
# Optical hop
# ----------------------------------------------------------------------

def _pdf_g_spec(spec):
    x2 = spec.xi ** 2
    return MeijerGSpec(m=3, n=0, a_list=(x2 + 1.0,),
                       b_list=(x2, spec.alpha, spec.beta))


def _cdf_g_spec(spec):
    i = spec.i
    return MeijerGSpec(m=3 * i, n=1,
                       a_list=(1.0,) + spec.tau1,
                       b_list=spec.tau2 + (0.0,))


def _pdf_bessel_mixture(spec, w, log_pref):
    """Misalignment mixture of the turbulence Bessel kernel: by the Mellin
    factorization 1/(xi^2 + s) = B(xi^2 + s, 1), the density kernel equals
    int_0^1 u^(xi^2 - 1) 2 (w/u)^((a+b)/2) K_(a-b)(2 sqrt(w/u)) du.

    Exponentially scaled Bessel evaluations keep this stable arbitrarily deep
    in the tail; used where the residue ladders run out of precision."""
    from scipy import integrate as _integrate
    x2 = spec.xi ** 2
    half = 0.5 * (spec.alpha + spec.beta)
    nu = spec.alpha - spec.beta

    def integrand(u):
        if u <= 0.0:
            return 0.0
        y = w / u
        root = 2.0 * math.sqrt(y)
        kv_scaled = float(special.kve(nu, root))
        if kv_scaled <= 0.0:
            return 0.0
        return math.exp((x2 - 1.0) * math.log(u) + half * math.log(y)
                        + math.log(2.0 * kv_scaled) - root + log_pref)

    knee = max(0.0, 1.0 - 30.0 / math.sqrt(w))
    head, _ = _integrate.quad(integrand, knee, 1.0, limit=200,
                              epsabs=1e-305, epsrel=1e-10)
    tail = 0.0
    if knee > 0.0:
        tail, _ = _integrate.quad(integrand, 0.0, knee, limit=200,
                                  epsabs=0.01 * head + 1e-305, epsrel=1e-8)
    return head + tail


def fso_snr_pdf(spec, x):
    """Density of the optical-hop SNR at x > 0."""
    if x <= 0.0:
        raise ValueError("density argument must be positive")
    i = spec.i
    w = spec.alpha * spec.beta * (x / spec.mu) ** (1.0 / i)
    log_pref = (math.log(spec.xi ** 2 / i) - special.gammaln(spec.alpha)
                - special.gammaln(spec.beta))
    if w > 120.0:
        return _pdf_bessel_mixture(spec, w, log_pref) / x
    v = meijer_g_scaled(_pdf_g_spec(spec), w, log_pref, abs_floor=1e-12)
    return max(v, 0.0) / x


def fso_snr_cdf(spec, x):
    """Distribution of the optical-hop SNR; 0 at x = 0, monotone to 1."""
    if x < 0.0:
        raise ValueError("argument must be nonnegative")
    if x == 0.0:
        return 0.0
    z = spec.big_b * x / spec.mu
    v = meijer_g_scaled(_cdf_g_spec(spec), z, math.log(spec.big_a),
                        abs_floor=1e-11)
    return min(max(v, 0.0), 1.0)


@lru_cache(maxsize=128)
def _fso_mean_at_unit_mu(alpha, beta, xi, detector):
    """Mean of the analytic SNR law at mu = 1, by quadrature (cached)."""
    spec = FsoChannelSpec(alpha, beta, xi, detector, gamma_bar_r=1.0)
    unit = FsoChannelSpec(alpha, beta, xi, detector,
                          gamma_bar_r=1.0 / (spec.mu / spec.gamma_bar_r))
    # unit.mu == 1 now
    f = lambda t: t * fso_snr_pdf(unit, t)
    return integrate_semi_infinite(f, 1e-10, knee=4.0)


def _fso_fading_moment(spec):
    """E[(Ia Ip)^i] with unit-mean turbulence and A0 = 1."""
    i = spec.i
    x2 = spec.xi ** 2
    ia = 1.0
    for _ in range(i - 1):
        ia *= (1.0 + 1.0 / spec.alpha) * (1.0 + 1.0 / spec.beta)
    return ia * x2 / (x2 + i)


def fso_sampler_scale(spec):
    """Scale c so that gamma = c * (Ia*Ip)^i matches the analytic law at the
    channel's average electrical SNR."""
    mean = spec.mu * _fso_mean_at_unit_mu(spec.alpha, spec.beta, spec.xi,
                                          spec.detector)
    return mean / _fso_fading_moment(spec)


def sample_fso_snr(spec, rng, size=None):
    """Draw optical-hop SNR: Gamma-Gamma turbulence times the misalignment
    factor U^(1/xi^2), raised to the detector exponent."""
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    x = gen.gamma(spec.alpha, 1.0 / spec.alpha, size=size)
    y = gen.gamma(spec.beta, 1.0 / spec.beta, size=size)
    u = gen.random(size)
    fading = x * y * u ** (1.0 / spec.xi ** 2)
    return fso_sampler_scale(spec) * fading ** spec.i


# ----------------------------------------------------------------------
# RF hop
# ----------------------------------------------------------------------

def phi_coeffs(k, big_l):
    """Coefficients of x^l in (sum_{l<big_l} x^l/l!)^k, by the power-series
    recursion; length k*(big_l-1)+1."""
    if k < 0 or k != int(k):
        raise ValueError("power must be a nonnegative integer")
    if big_l < 1 or big_l != int(big_l):
        raise ValueError("series length must be a positive integer")
    k, big_l = int(k), int(big_l)
    if k == 0 or big_l == 1:
        return [1.0]
    delta = [1.0 / math.factorial(l) for l in range(big_l)]
    top = k * (big_l - 1)
    phi = [0.0] * (top + 1)
    phi[0] = 1.0
    if top >= 1:
        phi[1] = k * delta[1]
    for l in range(2, top + 1):
        qmax = min(l, big_l - 1)
        acc = 0.0
        for q2 in range(1, qmax + 1):
            acc += (q2 * k - l + q2) * delta[q2] * phi[l - q2]
        phi[l] = acc / l
    phi[top] = delta[big_l - 1] ** k
    return phi


def outdated_sum_terms(spec):
    """Terms (C0, C1, C2) of the selected-user outdated-SNR expansion:
    pdf(x) = N * sum C0 x^(C1-1) exp(-C2 x)."""
    m, nt, n, rho, gbar = (spec.m, spec.n_t, spec.n_users, spec.rho,
                           spec.gamma_bar_u)
    mnt = m * nt
    lg_mnt = special.gammaln(mnt)
    out = []
    for k in range(n):
        ph = phi_coeffs(k, mnt)
        denom_k = 1.0 + k * (1.0 - rho)
        for l in range(k * (mnt - 1) + 1):
            for j in range(l + 1):
                c0 = (math.comb(n - 1, k) * math.comb(l, j) * (-1.0) ** k
                      * ph[l] * (m / gbar) ** (mnt + j)
                      * rho ** j * (1.0 - rho) ** (l - j)
                      * math.exp(special.gammaln(mnt + l)
                                 - special.gammaln(mnt + j) - lg_mnt)
                      / denom_k ** (mnt + l + j))
                c1 = mnt + j
                c2 = m * (k + 1) / (gbar * denom_k)
                out.append((c0, c1, c2))
    return out


def best_user_outdated_pdf(spec, x):
    """Density of the delivered SNR after best-user selection on outdated
    estimates."""
    if x <= 0.0:
        raise ValueError("density argument must be positive")
    acc = 0.0
    for c0, c1, c2 in outdated_sum_terms(spec):
        acc += c0 * x ** (c1 - 1) * math.exp(-c2 * x)
    return spec.n_users * acc


def best_user_outdated_cdf(spec, x):
    """Distribution of the delivered SNR; lower-incomplete-gamma form."""
    if x < 0.0:
        raise ValueError("argument must be nonnegative")
    if x == 0.0:
        return 0.0
    acc = 0.0
    for c0, c1, c2 in outdated_sum_terms(spec):
        acc += (c0 * c2 ** (-c1) * special.gammainc(c1, c2 * x)
                * special.gamma(c1))
    return spec.n_users * acc


def perfect_csi_best_user_cdf(spec, x):
    """CDF of the strongest of n_users i.i.d. beamformed branches (rho = 1)."""
    if x < 0.0:
        raise ValueError("argument must be nonnegative")
    return special.gammainc(spec.shape,
                            spec.m * x / spec.gamma_bar_u) ** spec.n_users


def sample_best_user_outdated(spec, rng, size=None):
    """Draw the delivered SNR: select the strongest branch, then draw the
    outdated value from the correlated-Gamma conditional via its
    Poisson-mixture representation."""
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    m, nt, n, rho, gbar = (spec.m, spec.n_t, spec.n_users, spec.rho,
                           spec.gamma_bar_u)
    shape = m * nt
    scale = gbar / m
    sz = (size, n) if size is not None else (1, n)
    branches = gen.gamma(shape, scale, size=sz)
    y = branches.max(axis=1)
    if rho == 1.0:
        out = y
    elif rho == 0.0:
        out = gen.gamma(shape, scale, size=y.shape)
    else:
        lam = rho * m * y / (gbar * (1.0 - rho))
        mix = gen.poisson(lam)
        out = gen.gamma(shape + mix, gbar * (1.0 - rho) / m)
    return out if size is not None else float(out[0])
