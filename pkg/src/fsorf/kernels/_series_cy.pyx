# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_series_py``: double-double residue-series kernels.

Algorithms and constants are kept line-for-line equivalent with the pure
module; build with fp-contraction disabled so the Dekker/Knuth error-free
transforms stay exact.
"""

from libc.math cimport floor, log, exp, isinf, isnan, fabs, sqrt, ldexp, round as c_round, INFINITY, NAN

DD_EPS = 4.93038065763132e-32
cdef double _DD_EPS = 4.93038065763132e-32
cdef double _SPLIT = 134217729.0
cdef double _LN2_HI = 6.931471805599453e-01
cdef double _LN2_LO = 2.3190468138462996e-17
cdef double _PI_HI = 3.141592653589793
cdef double _PI_LO = 1.2246467991473532e-16

OK = 0
NO_CONVERGENCE = 1
PREFACTOR_POLE = 2

cdef struct dd:
    double hi
    double lo


cdef inline dd _two_sum(double a, double b) noexcept:
    cdef dd r
    cdef double bb
    r.hi = a + b
    bb = r.hi - a
    r.lo = (a - (r.hi - bb)) + (b - bb)
    return r


cdef inline dd _quick_two_sum(double a, double b) noexcept:
    cdef dd r
    r.hi = a + b
    r.lo = b - (r.hi - a)
    return r


cdef inline dd _two_prod(double a, double b) noexcept:
    cdef dd r
    cdef double aa, ahi, alo, bb, bhi, blo
    r.hi = a * b
    aa = _SPLIT * a
    ahi = aa - (aa - a)
    alo = a - ahi
    bb = _SPLIT * b
    bhi = bb - (bb - b)
    blo = b - bhi
    r.lo = ((ahi * bhi - r.hi) + ahi * blo + alo * bhi) + alo * blo
    return r


cdef inline dd dd_add(dd x, dd y) noexcept:
    cdef dd s = _two_sum(x.hi, y.hi)
    cdef dd e = _two_sum(x.lo, y.lo)
    s.lo += e.hi
    s = _quick_two_sum(s.hi, s.lo)
    s.lo += e.lo
    return _quick_two_sum(s.hi, s.lo)


cdef inline dd dd_add_d(dd x, double y) noexcept:
    cdef dd s = _two_sum(x.hi, y)
    s.lo += x.lo
    return _quick_two_sum(s.hi, s.lo)


cdef inline dd dd_neg(dd x) noexcept:
    cdef dd r
    r.hi = -x.hi
    r.lo = -x.lo
    return r


cdef inline dd dd_mul(dd x, dd y) noexcept:
    cdef dd p = _two_prod(x.hi, y.hi)
    p.lo += x.hi * y.lo + x.lo * y.hi
    return _quick_two_sum(p.hi, p.lo)


cdef inline dd dd_mul_d(dd x, double y) noexcept:
    cdef dd p = _two_prod(x.hi, y)
    p.lo += x.lo * y
    return _quick_two_sum(p.hi, p.lo)


cdef inline dd dd_div(dd x, dd y) noexcept:
    cdef double q1, q2, q3
    cdef dd p, r, q
    q1 = x.hi / y.hi
    p = dd_mul_d(y, q1)
    r = dd_add(x, dd_neg(p))
    q2 = r.hi / y.hi
    p = dd_mul_d(y, q2)
    r = dd_add(r, dd_neg(p))
    q3 = r.hi / y.hi
    q = _quick_two_sum(q1, q2)
    return dd_add_d(q, q3)


cdef inline dd dd_from(double h, double l) noexcept:
    cdef dd r
    r.hi = h
    r.lo = l
    return r


cdef dd dd_exp(dd x) noexcept:
    cdef dd r, s, t, p
    cdef double m
    cdef int k, im
    if x.hi > 709.0:
        return dd_from(INFINITY, 0.0)
    if x.hi < -745.0:
        return dd_from(0.0, 0.0)
    m = c_round(x.hi / _LN2_HI)
    p = _two_prod(m, _LN2_HI)
    r = dd_add(x, dd_neg(p))
    p = _two_prod(m, _LN2_LO)
    r = dd_add(r, dd_neg(p))
    s = dd_from(1.0, 0.0)
    t = dd_from(1.0, 0.0)
    for k in range(1, 28):
        t = dd_mul(t, r)
        t = dd_div(t, dd_from(<double> k, 0.0))
        s = dd_add(s, t)
        if fabs(t.hi) < fabs(s.hi) * 1e-35:
            break
    im = <int> m
    return dd_from(ldexp(s.hi, im), ldexp(s.lo, im))


cdef dd dd_log(dd x) noexcept:
    cdef double y
    cdef dd e, p, e1, sq, r
    y = log(x.hi)
    e = dd_exp(dd_from(-y, 0.0))
    p = dd_mul(x, e)
    e1 = dd_add_d(p, -1.0)
    sq = dd_mul(e1, e1)
    r = dd_add(e1, dd_from(-0.5 * sq.hi, -0.5 * sq.lo))
    return dd_add_d(r, y)


cdef dd _dd_sin_pi(dd x) noexcept:
    cdef double n, sign
    cdef dd r, t, sq, s, p
    cdef int k
    n = floor(x.hi / 2.0) * 2.0
    r = dd_add_d(x, -n)
    sign = 1.0
    if r.hi >= 1.0:
        r = dd_add_d(r, -1.0)
        sign = -1.0
    if r.hi > 0.5:
        r = dd_add_d(dd_neg(r), 1.0)
    t = dd_mul(r, dd_from(_PI_HI, _PI_LO))
    sq = dd_mul(t, t)
    s = t
    p = t
    for k in range(1, 22):
        p = dd_mul(p, sq)
        p = dd_div(p, dd_from(<double> (-(2 * k) * (2 * k + 1)), 0.0))
        s = dd_add(s, p)
        if fabs(p.hi) < fabs(s.hi) * 1e-35:
            break
    s.hi *= sign
    s.lo *= sign
    return s


# Stirling correction coefficients B_{2j}/(2j(2j-1)) and ln(sqrt(2 pi)),
# filled at import time with the dd machinery itself.
cdef dd _STIRLING[13]
cdef dd _LN_SQRT_2PI
cdef double _LGAMMA_SHIFT = 32.0


def _init_constants():
    nums = [1.0, -1.0, 1.0, -1.0, 1.0, -691.0, 1.0, -3617.0, 43867.0,
            -174611.0, 77683.0, -236364091.0, 657931.0]
    dens = [12.0, 360.0, 1260.0, 1680.0, 1188.0, 360360.0, 156.0, 122400.0,
            244188.0, 125400.0, 5796.0, 1506960.0, 300.0]
    cdef int j
    cdef dd t
    for j in range(13):
        t = dd_div(dd_from(nums[j], 0.0), dd_from(dens[j], 0.0))
        _STIRLING[j] = t
    global _LN_SQRT_2PI
    t = dd_log(dd_mul_d(dd_from(_PI_HI, _PI_LO), 2.0))
    _LN_SQRT_2PI = dd_from(0.5 * t.hi, 0.5 * t.lo)


_init_constants()


cdef int dd_lgamma_sign(dd x, dd *out, double *sign) noexcept:
    """log|Gamma(x)| into out, sign into sign; returns 0, or 1 at a pole."""
    cdef dd s, ls, lp, g, r, acc, z, lz, hh, t1, inv, inv2, p, t, one
    cdef double sg, sg_inner
    cdef int j
    if isnan(x.hi):
        out[0] = dd_from(NAN, 0.0)
        sign[0] = 1.0
        return 0
    if x.hi <= 0.0 and x.hi == floor(x.hi) and x.lo == 0.0:
        out[0] = dd_from(INFINITY, 0.0)
        sign[0] = 0.0
        return 1
    if x.hi < 0.5:
        s = _dd_sin_pi(x)
        if s.hi == 0.0:
            out[0] = dd_from(INFINITY, 0.0)
            sign[0] = 0.0
            return 1
        sg = 1.0 if s.hi > 0.0 else -1.0
        if s.hi < 0.0:
            s = dd_neg(s)
        ls = dd_log(s)
        lp = dd_log(dd_from(_PI_HI, _PI_LO))
        one = dd_add(dd_from(1.0, 0.0), dd_neg(x))
        dd_lgamma_sign(one, &g, &sg_inner)
        r = dd_add(lp, dd_neg(ls))
        r = dd_add(r, dd_neg(g))
        out[0] = r
        sign[0] = sg
        return 0
    acc = dd_from(0.0, 0.0)
    z = x
    while z.hi < _LGAMMA_SHIFT:
        acc = dd_add(acc, dd_log(z))
        z = dd_add_d(z, 1.0)
    lz = dd_log(z)
    hh = dd_add_d(z, -0.5)
    t1 = dd_mul(hh, lz)
    r = dd_add(t1, dd_neg(z))
    r = dd_add(r, _LN_SQRT_2PI)
    inv = dd_div(dd_from(1.0, 0.0), z)
    inv2 = dd_mul(inv, inv)
    p = inv
    for j in range(13):
        t = dd_mul(p, _STIRLING[j])
        r = dd_add(r, t)
        p = dd_mul(p, inv2)
    r = dd_add(r, dd_neg(acc))
    out[0] = r
    sign[0] = 1.0
    return 0


def lgamma_dd(double x):
    """log|Gamma(x)| as an (hi, lo) pair; interface parity with the pure twin."""
    cdef dd out
    cdef double sign
    dd_lgamma_sign(dd_from(x, 0.0), &out, &sign)
    return out.hi, out.lo


def dd_lgamma_sign_py(double x, double xl=0.0):
    cdef dd out
    cdef double sign
    dd_lgamma_sign(dd_from(x, xl), &out, &sign)
    return out.hi, out.lo, sign


DEF MAXPAR = 32


def meijer_slater(a, b, int m, int n, double x, double log_pref,
                  bint asymptotic, double rtol, int max_terms):
    """Sum the residue ladders of G^{m,n}_{p,q}(x | a; b) scaled by
    exp(log_pref); see the pure twin for semantics."""
    cdef int p = len(a)
    cdef int q = len(b)
    if p > MAXPAR or q > MAXPAR:
        raise ValueError("too many Meijer-G parameters")
    cdef double av[MAXPAR]
    cdef double bv[MAXPAR]
    cdef int j
    for j in range(p):
        av[j] = <double> a[j]
    for j in range(q):
        bv[j] = <double> b[j]

    cdef dd lnx = dd_log(dd_from(x, 0.0))
    cdef dd total = dd_from(0.0, 0.0)
    cdef double peak = 0.0
    cdef double trunc_err = 0.0
    cdef long ktot = 0

    cdef dd num_bases[MAXPAR]
    cdef dd den_bases[MAXPAR]
    cdef int n_den

    cdef int h_idx
    cdef double bh, sign, sg, arg_sign, mag, prev_mag, asum, ladder_peak, lp_d
    cdef dd one_bh, lp, d, g, th, scale, sh, tt, num, den, fh, rat, contrib
    cdef int k
    cdef bint skip

    for h_idx in range(m):
        bh = bv[h_idx]
        one_bh = _two_sum(1.0, bh)
        lp = dd_from(log_pref, 0.0)
        sign = 1.0
        skip = False
        for j in range(m):
            if j == h_idx:
                continue
            d = _two_sum(bv[j], -bh)
            if dd_lgamma_sign(d, &g, &sg):
                return 0.0, INFINITY, PREFACTOR_POLE
            sign *= sg
            lp = dd_add(lp, g)
        for j in range(n):
            d = dd_add_d(one_bh, -av[j])
            if dd_lgamma_sign(d, &g, &sg):
                return 0.0, INFINITY, PREFACTOR_POLE
            sign *= sg
            lp = dd_add(lp, g)
        for j in range(m, q):
            d = dd_add_d(one_bh, -bv[j])
            if dd_lgamma_sign(d, &g, &sg):
                skip = True
                break
            sign *= sg
            lp = dd_add(lp, dd_neg(g))
        if not skip:
            for j in range(n, p):
                d = _two_sum(av[j], -bh)
                if dd_lgamma_sign(d, &g, &sg):
                    skip = True
                    break
                sign *= sg
                lp = dd_add(lp, dd_neg(g))
        if skip:
            continue
        th = dd_mul_d(lnx, bh)
        lp = dd_add(lp, th)
        scale = dd_exp(lp)
        if scale.hi == 0.0:
            continue
        if isinf(scale.hi):
            return 0.0, INFINITY, NO_CONVERGENCE

        for j in range(p):
            num_bases[j] = dd_add_d(one_bh, -av[j])
        n_den = 0
        for j in range(q):
            if j == h_idx:
                continue
            den_bases[n_den] = dd_add_d(one_bh, -bv[j])
            n_den += 1

        arg_sign = -1.0 if (p - m - n) % 2 else 1.0
        sh = dd_from(1.0, 0.0)
        tt = dd_from(1.0, 0.0)
        ladder_peak = 1.0
        prev_mag = 1.0
        k = 0
        while True:
            if k >= max_terms:
                if asymptotic:
                    trunc_err += fabs(tt.hi) * scale.hi
                    break
                return 0.0, INFINITY, NO_CONVERGENCE
            num = dd_from(1.0, 0.0)
            for j in range(p):
                fh = dd_add_d(num_bases[j], <double> k)
                num = dd_mul(num, fh)
            den = dd_from(<double> (k + 1), 0.0)
            for j in range(n_den):
                fh = dd_add_d(den_bases[j], <double> k)
                if fh.hi == 0.0:
                    return 0.0, INFINITY, PREFACTOR_POLE
                den = dd_mul(den, fh)
            rat = dd_div(num, den)
            rat = dd_mul_d(rat, arg_sign * x)
            tt = dd_mul(tt, rat)
            k += 1
            mag = fabs(tt.hi)
            if asymptotic and k > 1 and mag >= prev_mag:
                trunc_err += mag * scale.hi
                break
            prev_mag = mag
            sh = dd_add(sh, tt)
            asum = fabs(sh.hi)
            if asum > ladder_peak:
                ladder_peak = asum
            if mag > ladder_peak:
                ladder_peak = mag
            if mag <= asum * 1e-33 + 1e-320:
                break
            if asymptotic and mag <= asum * rtol * 1e-4:
                break
        ktot += k
        contrib = dd_mul(sh, scale)
        if sign < 0:
            contrib = dd_neg(contrib)
        total = dd_add(total, contrib)
        lp_d = ladder_peak * scale.hi
        if lp_d > peak:
            peak = lp_d

    cdef double noise = peak * _DD_EPS * 8.0 * (64.0 + 4.0 * (p + q) * sqrt(ktot + 1.0))
    return total.hi, noise + trunc_err, OK


def hyp2f1_series(double a, double b, double c, double z, double rtol,
                  long max_terms):
    cdef double term = 1.0
    cdef double total = 1.0
    cdef long k = 0
    while k < max_terms:
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        k += 1
        if fabs(term) <= fabs(total) * rtol:
            return total, OK
    return total, NO_CONVERGENCE


def hyp1f1_series(double a, double b, double z, double rtol, long max_terms):
    cdef double term = 1.0
    cdef double total = 1.0
    cdef long k = 0
    while k < max_terms:
        term *= (a + k) / ((b + k) * (k + 1.0)) * z
        total += term
        k += 1
        if fabs(term) <= fabs(total) * rtol:
            return total, OK
    return total, NO_CONVERGENCE
