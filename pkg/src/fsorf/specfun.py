"""Real-valued special functions backing every analytic expression.

The Meijer-G evaluator is restricted to the argument-decay class q > p that
the link formulas produce.  Small and moderate arguments go through the
residue (Slater) expansion in double-double arithmetic; large arguments go
through the algebraic expansion at infinity, obtained by flipping the
parameter set to the reciprocal argument and truncating each ladder at its
smallest term.  Coalescing pole ladders are resolved by a deterministic
epsilon perturbation with a two-epsilon consistency check.

``integrate_semi_infinite`` is QUADPACK-backed and serves as the independent
oracle the test suite holds the Meijer-G route against.
"""

import math
import warnings
from dataclasses import dataclass, field

from scipy import integrate as _integrate

from .kernels import meijer_slater, hyp2f1_series, hyp1f1_series, OK, PREFACTOR_POLE

__all__ = [
    "MeijerGSpec", "meijer_g", "meijer_g_scaled",
    "reg_gamma_lower", "pochhammer", "gauss_2f1", "gauss_2f1_log",
    "kummer_1f1", "gaussian_q", "integrate_semi_infinite",
    "UnsupportedMeijerGClassError", "ConvergenceError", "IntegrationError",
    "CoalescencePerturbationWarning",
    "SERIES_RTOL", "ORACLE_ATOL", "SERIES_MAX_TERMS",
]

# Compile-time numeric policy (acceptance tolerances depend on these).
SERIES_RTOL = 1e-10          # residue-series convergence target
ORACLE_ATOL = 1e-8           # analytic-vs-quadrature agreement
SERIES_MAX_TERMS = 100_000
HYP_RTOL = 1e-12
HYP_MAX_TERMS = 1_000_000

_POLE_TOL = 1e-9             # "within 1e-9 of an integer" coalescence rule
_EPS_PERTURB = 1e-6
_EPS_PERTURB_CHECK = 5e-7
_DUAL_EPS_RTOL = 1e-5
_ACCEPT_RTOL = 1e-11         # arithmetic-noise acceptance for a G evaluation

_LN_2PI = math.log(2.0 * math.pi)


class UnsupportedMeijerGClassError(ValueError):
    """Parameter class outside the supported q > p argument-decay family."""


class ConvergenceError(RuntimeError):
    """A series failed to reach its target tolerance within the term budget."""


class IntegrationError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class CoalescencePerturbationWarning(UserWarning):
    """Dual-epsilon consistency check failed for a coalescing-pole input."""


@dataclass(frozen=True)
class MeijerGSpec:
    """Parameter set of G^{m,n}_{p,q}: the m leading b's and n leading a's
    generate numerator gamma factors."""
    m: int
    n: int
    a_list: tuple = field(default_factory=tuple)
    b_list: tuple = field(default_factory=tuple)

    def __post_init__(self):
        a = tuple(float(v) for v in self.a_list)
        b = tuple(float(v) for v in self.b_list)
        object.__setattr__(self, "a_list", a)
        object.__setattr__(self, "b_list", b)
        if not (0 <= self.m <= len(b)):
            raise ValueError("require 0 <= m <= q")
        if not (0 <= self.n <= len(a)):
            raise ValueError("require 0 <= n <= p")
        for v in a + b:
            if not math.isfinite(v):
                raise ValueError("Meijer-G parameters must be finite")

    @property
    def p(self):
        return len(self.a_list)

    @property
    def q(self):
        return len(self.b_list)


def _perturb_coalescing(ladders, eps):
    """Shift later entries until no pairwise difference is within tolerance
    of an integer.  Returns (list, was_perturbed)."""
    vals = list(ladders)
    changed = False
    for _ in range(12 * max(1, len(vals))):
        hit = False
        for h in range(len(vals)):
            for j in range(h + 1, len(vals)):
                d = vals[j] - vals[h]
                if abs(d - round(d)) < _POLE_TOL:
                    vals[j] += eps
                    changed = True
                    hit = True
        if not hit:
            return vals, changed
    raise ConvergenceError("coalescing-pole perturbation did not settle")


def _flip(a, b, m, n):
    """Parameters of the reciprocal-argument identity
    G^{m,n}_{p,q}(x | a; b) = G^{n,m}_{q,p}(1/x | 1-b; 1-a)."""
    fa = tuple(1.0 - v for v in b)
    fb = tuple(1.0 - v for v in a)
    return fa, fb, n, m


def _exp_leading_log(a, b, x, log_pref):
    """Log of the leading exponentially-small term of G at large x
    (original q > p parameters): (2 pi)^((nu-1)/2) nu^(-1/2) x^theta
    exp(-nu x^(1/nu)).  Exact for the e^-x and Bessel reductions."""
    p, q = len(a), len(b)
    nu = q - p
    theta = (sum(b) - sum(a) + (p - q) / 2.0 + 0.5) / nu
    return (log_pref + 0.5 * (nu - 1) * _LN_2PI - 0.5 * math.log(nu)
            + theta * math.log(x) - nu * x ** (1.0 / nu))


def _exp_small_log_bound(a, b, x, log_pref):
    """Conservative log-bound on the exponentially small part dropped by the
    algebraic expansion at large x."""
    return _exp_leading_log(a, b, x, log_pref) + 3.0


def _eval_once(a, b, m, n, x, log_pref, asymptotic):
    """One kernel evaluation with epsilon handling for coalescing ladders.

    Returns (value, abs_error_estimate).  In asymptotic mode the flip to the
    reciprocal argument happens here so the perturbation applies to the
    flipped ladder set and the exponentially-small remainder is charged.
    """
    accept_rtol = _ACCEPT_RTOL
    if asymptotic:
        ea, eb, em, en = _flip(a, b, m, n)
        arg = 1.0 / x
    else:
        ea, eb, em, en = a, b, m, n
        arg = x

    ladders, perturbed = _perturb_coalescing(eb[:em], _EPS_PERTURB)
    eb1 = tuple(ladders) + eb[em:]
    v, err, status = meijer_slater(ea, eb1, em, en, arg, log_pref, asymptotic,
                                   SERIES_RTOL, SERIES_MAX_TERMS)
    if status == PREFACTOR_POLE and not perturbed:
        # a-to-b integer relation the pairwise ladder scan cannot see
        ladders = [w + _EPS_PERTURB * (i + 1) for i, w in enumerate(eb[:em])]
        perturbed = True
        eb1 = tuple(ladders) + eb[em:]
        v, err, status = meijer_slater(ea, eb1, em, en, arg, log_pref,
                                       asymptotic, SERIES_RTOL,
                                       SERIES_MAX_TERMS)
    if status != OK:
        return v, math.inf, accept_rtol
    if perturbed:
        # dual-epsilon consistency check; the two values also give a
        # Richardson extrapolation that removes the O(eps) method error
        ladders2, _ = _perturb_coalescing(eb[:em], _EPS_PERTURB_CHECK)
        eb2 = tuple(ladders2) + eb[em:]
        v2, err2, status2 = meijer_slater(ea, eb2, em, en, arg, log_pref,
                                          asymptotic, SERIES_RTOL,
                                          SERIES_MAX_TERMS)
        if status2 == OK:
            spread = abs(v - v2)
            arith = err + err2
            scale = max(abs(v), abs(v2), arith, 1e-300)
            if spread > _DUAL_EPS_RTOL * scale and arith < 0.1 * spread:
                # genuine method inconsistency, not arithmetic noise
                warnings.warn(
                    f"coalescing-pole perturbation unstable: {v!r} vs {v2!r}",
                    CoalescencePerturbationWarning)
            v = 2.0 * v2 - v
            err = arith + spread
        # perturbation method error is bounded by the dual-eps contract
        accept_rtol = 5.0 * _DUAL_EPS_RTOL
    if asymptotic:
        bound = _exp_small_log_bound(a, b, x, log_pref)
        err += math.exp(min(bound, 700.0))
        accept_rtol = max(accept_rtol, 5.0 * _DUAL_EPS_RTOL)
    return v, err, accept_rtol


def meijer_g_scaled(spec, x, log_prefactor=0.0, abs_floor=0.0):
    """exp(log_prefactor) * G(x) for the q > p class, with accuracy control.

    ``abs_floor`` is the absolute error the caller tolerates; an evaluation
    whose uncertainty exceeds both the floor and the relative target raises
    ConvergenceError.
    """
    a, b = spec.a_list, spec.b_list
    m, n = spec.m, spec.n
    p, q = spec.p, spec.q
    if q <= p:
        raise UnsupportedMeijerGClassError(
            f"only q > p supported (got p={p}, q={q}); flip the parameter "
            "set for the reciprocal-argument class")
    if not (x > 0.0) or not math.isfinite(x):
        raise ValueError("argument must be positive and finite")
    nu = q - p

    direct_cap = (48.0 / nu) ** nu
    attempts = []
    if x <= direct_cap:
        v, err, art = _eval_once(a, b, m, n, x, log_prefactor, False)
        if err <= max(art * abs(v), abs_floor):
            return v
        attempts.append(("direct", v, err))
    if n > 0:
        v, err, art = _eval_once(a, b, m, n, x, log_prefactor, True)
        if err <= max(art * abs(v), abs_floor):
            return v
        attempts.append(("asymptotic", v, err))
    elif m == q and x ** (1.0 / nu) > 9.0:
        # pure-decay class deep tail: one-term exponential asymptotic; the
        # first omitted correction carries the squared parameter spread
        bbar = sum(b) / len(b)
        spread = (sum((v - bbar) ** 2 for v in b)
                  + sum((v - bbar) ** 2 for v in a))
        v = math.exp(max(_exp_leading_log(a, b, x, log_prefactor), -745.0))
        err = v * (2.5 + spread / (2.0 * nu)) * x ** (-1.0 / nu)
        if err <= max(0.2 * v, abs_floor):
            return v
        attempts.append(("exp-leading", v, err))
    best = min(attempts, key=lambda t: t[2], default=None)
    if best is not None and best[2] <= max(2e-5 * abs(best[1]), abs_floor):
        return best[1]
    raise ConvergenceError(
        f"Meijer-G evaluation unreliable at x={x!r}: " +
        ", ".join(f"{k}: value={v!r} err={e!r}" for k, v, e in attempts))


def meijer_g(spec, x):
    """G^{m,n}_{p,q}(x | a; b) for the argument-decay class q > p."""
    return meijer_g_scaled(spec, x)


def reg_gamma_lower(a, x):
    """Regularized lower incomplete gamma P(a, x)."""
    from scipy import special
    if a <= 0.0:
        raise ValueError("shape parameter must be positive")
    if x < 0.0:
        raise ValueError("argument must be nonnegative")
    return float(special.gammainc(a, x))


def pochhammer(a, n):
    """Rising factorial a (a+1) ... (a+n-1); 1 for n = 0."""
    if n < 0 or n != int(n):
        raise ValueError("order must be a nonnegative integer")
    out = 1.0
    for k in range(int(n)):
        out *= a + k
    return out


def _near_nonpositive_int(v, tol=_POLE_TOL):
    return v < 0.5 and abs(v - round(v)) < tol


def _lgamma_sign(x):
    """(log|Gamma(x)|, sign) for noninteger or positive x."""
    if x > 0.0:
        return math.lgamma(x), 1.0
    if x == round(x):
        raise ValueError("gamma pole")
    sign = -1.0 if math.floor(x) % 2 != 0 else 1.0
    return math.lgamma(x), sign


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric 2F1(a, b; c; z) for 0 <= z < 1."""
    lv, sg = gauss_2f1_log(a, b, c, z)
    if lv > 700.0:
        raise OverflowError("2F1 value exceeds double range; use gauss_2f1_log")
    return sg * math.exp(lv)


def gauss_2f1_log(a, b, c, z):
    """(log|2F1|, sign) — log form so near-unit-argument growth stays finite."""
    if _near_nonpositive_int(c):
        raise ValueError("c must not be a nonpositive integer")
    if not (0.0 <= z < 1.0):
        raise ValueError("argument restricted to 0 <= z < 1")
    if z == 0.0:
        return 0.0, 1.0
    if z <= 0.5:
        return _log_abs_sign(_series_2f1(a, b, c, z))
    cb = c - b
    if cb <= 1e-12 and abs(cb - round(cb)) < 1e-12:
        return _gauss_2f1_terminating(a, int(round(-cb)), c, z)
    ca = c - a
    if ca <= 1e-12 and abs(ca - round(ca)) < 1e-12:
        return _gauss_2f1_terminating(b, int(round(-ca)), c, z)
    cab = c - a - b
    if abs(cab - round(cab)) > 1e-9:
        return _gauss_2f1_near_unit(a, b, c, z, cab)
    # rare: integer c-a-b with z near 1; the direct series still converges
    return _log_abs_sign(_series_2f1(a, b, c, z))


def _series_2f1(a, b, c, z):
    v, status = hyp2f1_series(a, b, c, z, HYP_RTOL, HYP_MAX_TERMS)
    if status != OK:
        raise ConvergenceError("2F1 series did not converge")
    return v


def _log_abs_sign(v):
    if v == 0.0:
        return -math.inf, 1.0
    return math.log(abs(v)), math.copysign(1.0, v)


def _gauss_2f1_terminating(a, nterm, c, z):
    """z -> z/(z-1) linear transformation when the second parameter is the
    nonpositive integer -nterm, which terminates the transformed series.

    2F1(a, -nterm + c-part...) specifically:
    2F1(a, b; c; z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)); all transformed
    terms are positive for a, c > 0, so the sum is taken in log space.
    """
    if a <= 0.0 or c <= 0.0:
        raise ConvergenceError("terminating 2F1 transform needs a, c > 0")
    w = z / (z - 1.0)   # negative
    log_term = 0.0
    logs = [0.0]
    for k in range(nterm):
        factor = (a + k) * (-nterm + k) / ((c + k) * (k + 1.0)) * w
        log_term += math.log(factor)
        logs.append(log_term)
    mx = max(logs)
    total = sum(math.exp(v - mx) for v in logs)
    return mx + math.log(total) - a * math.log1p(-z), 1.0


def _gauss_2f1_near_unit(a, b, c, z, cab):
    """Gauss relation in powers of 1-z for non-integer c-a-b."""
    u = 1.0 - z
    v1 = _series_2f1(a, b, a + b - c + 1.0, u)
    v2 = _series_2f1(c - a, c - b, c - a - b + 1.0, u)
    lc, sc = _lgamma_sign(c)
    l1, s1 = _lgamma_sign(cab)
    l2, s2 = _lgamma_sign(c - a)
    l3, s3 = _lgamma_sign(c - b)
    l4, s4 = _lgamma_sign(-cab)
    l5, s5 = _lgamma_sign(a)
    l6, s6 = _lgamma_sign(b)
    t1 = 0.0
    if v1 != 0.0:
        t1 = (sc * s1 / (s2 * s3)) * math.copysign(1.0, v1) * math.exp(
            lc + l1 - l2 - l3 + math.log(abs(v1)))
    t2 = 0.0
    if v2 != 0.0:
        t2 = (sc * s4 / (s5 * s6)) * math.copysign(1.0, v2) * math.exp(
            lc + l4 - l5 - l6 + cab * math.log(u) + math.log(abs(v2)))
    return _log_abs_sign(t1 + t2)


def kummer_1f1(a, b, z):
    """Confluent hypergeometric 1F1(a; b; z)."""
    if _near_nonpositive_int(b):
        raise ValueError("b must not be a nonpositive integer")
    if z < 0.0:
        # Kummer transformation keeps the series terms positive
        v, status = hyp1f1_series(b - a, b, -z, HYP_RTOL, HYP_MAX_TERMS)
        if status != OK:
            raise ConvergenceError("1F1 series did not converge")
        return math.exp(z) * v
    v, status = hyp1f1_series(a, b, z, HYP_RTOL, HYP_MAX_TERMS)
    if status != OK:
        raise ConvergenceError("1F1 series did not converge")
    return v


def gaussian_q(x):
    """Gaussian tail Q(x) = erfc(x / sqrt 2) / 2."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def integrate_semi_infinite(f, tol, knee=1.0):
    """Integral of f over (0, inf): adaptive QUADPACK on (0, knee] plus the
    tail, absolute-or-relative error <= tol."""
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    knee = max(knee, 1e-12)
    head, e1 = _integrate.quad(f, 0.0, knee, epsabs=0.25 * tol,
                               epsrel=0.25 * tol, limit=400)
    tail, e2 = _integrate.quad(f, knee, math.inf, epsabs=0.25 * tol,
                               epsrel=0.25 * tol, limit=400)
    total = head + tail
    if e1 + e2 > tol * max(1.0, abs(total)) * 4.0:
        raise IntegrationError(
            f"quadrature error estimate {e1 + e2!r} exceeds tolerance")
    return total
