"""Pure-Python series kernels (double-double arithmetic).

Reference implementation of the hot numeric loops: residue-series evaluation
of Meijer-G functions and Gauss/Kummer hypergeometric series.  A compiled
twin with the same call surface lives in ``_series_cy.pyx``; this module is
the fallback selected at import time when the extension is unavailable.

All ladders are summed in double-double (~31 significant digits) because the
residue ladders of the argument-decay Meijer-G class cancel against each
other by factors up to ~1e22 at large argument.
"""

import math

# Double-double epsilon: 2^-104.
DD_EPS = 4.93038065763132e-32

_SPLIT = 134217729.0  # 2^27 + 1, Dekker splitter

# ln(2) and pi to double-double precision.
_LN2_HI = 6.931471805599453e-01
_LN2_LO = 2.3190468138462996e-17
_PI_HI = 3.141592653589793
_PI_LO = 1.2246467991473532e-16

# Status codes shared with the compiled twin.
OK = 0
NO_CONVERGENCE = 1
PREFACTOR_POLE = 2


# ----------------------------------------------------------------------
# double-double primitives
# ----------------------------------------------------------------------

def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _quick_two_sum(a, b):
    s = a + b
    err = b - (s - a)
    return s, err


def _two_prod(a, b):
    p = a * b
    aa = _SPLIT * a
    ahi = aa - (aa - a)
    alo = a - ahi
    bb = _SPLIT * b
    bhi = bb - (bb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def dd_add(xh, xl, yh, yl):
    sh, sl = _two_sum(xh, yh)
    eh, el = _two_sum(xl, yl)
    sl += eh
    sh, sl = _quick_two_sum(sh, sl)
    sl += el
    return _quick_two_sum(sh, sl)


def dd_add_d(xh, xl, y):
    sh, sl = _two_sum(xh, y)
    sl += xl
    return _quick_two_sum(sh, sl)


def dd_mul(xh, xl, yh, yl):
    ph, pl = _two_prod(xh, yh)
    pl += xh * yl + xl * yh
    return _quick_two_sum(ph, pl)


def dd_mul_d(xh, xl, y):
    ph, pl = _two_prod(xh, y)
    pl += xl * y
    return _quick_two_sum(ph, pl)


def dd_div(xh, xl, yh, yl):
    q1 = xh / yh
    ph, pl = dd_mul(yh, yl, q1, 0.0)
    rh, rl = dd_add(xh, xl, -ph, -pl)
    q2 = rh / yh
    ph, pl = dd_mul(yh, yl, q2, 0.0)
    rh, rl = dd_add(rh, rl, -ph, -pl)
    q3 = rh / yh
    qh, ql = _quick_two_sum(q1, q2)
    return dd_add_d(qh, ql, q3)


def dd_exp(xh, xl):
    """exp(x) in double-double."""
    if xh > 709.0:
        return math.inf, 0.0
    if xh < -745.0:
        return 0.0, 0.0
    m = float(round(xh / _LN2_HI))
    ph, pe = _two_prod(m, _LN2_HI)
    rh, rl = dd_add(xh, xl, -ph, -pe)
    ph, pe = _two_prod(m, _LN2_LO)
    rh, rl = dd_add(rh, rl, -ph, -pe)
    # |r| <= 0.35: Taylor series with exact division by k.
    sh, sl = 1.0, 0.0
    th, tl = 1.0, 0.0
    for k in range(1, 28):
        th, tl = dd_mul(th, tl, rh, rl)
        th, tl = dd_div(th, tl, float(k), 0.0)
        sh, sl = dd_add(sh, sl, th, tl)
        if abs(th) < abs(sh) * 1e-35:
            break
    im = int(m)
    return math.ldexp(sh, im), math.ldexp(sl, im)


def dd_log(xh, xl):
    """log(x) in double-double via one Newton correction."""
    if xh <= 0.0:
        raise ValueError("dd_log: nonpositive argument")
    y = math.log(xh)
    eh, el = dd_exp(-y, 0.0)
    ph, pl = dd_mul(xh, xl, eh, el)
    # e1 = x*exp(-y) - 1 is O(1e-16)
    e1h, e1l = dd_add_d(ph, pl, -1.0)
    # log(x) = y + e1 - e1^2/2 + O(e1^3)
    sqh, sql = dd_mul(e1h, e1l, e1h, e1l)
    rh, rl = dd_add(e1h, e1l, -0.5 * sqh, -0.5 * sql)
    return dd_add_d(rh, rl, y)


def _dd_sin_pi(xh, xl):
    """sin(pi*x) in double-double."""
    n = math.floor(xh / 2.0) * 2.0
    rh, rl = dd_add_d(xh, xl, -n)
    sign = 1.0
    if rh >= 1.0:
        rh, rl = dd_add_d(rh, rl, -1.0)
        sign = -1.0
    if rh > 0.5:
        rh, rl = dd_add_d(-rh, -rl, 1.0)
    th, tl = dd_mul(rh, rl, _PI_HI, _PI_LO)
    sqh, sql = dd_mul(th, tl, th, tl)
    sh, sl = th, tl
    ph, pl = th, tl
    for k in range(1, 22):
        ph, pl = dd_mul(ph, pl, sqh, sql)
        ph, pl = dd_div(ph, pl, float(-(2 * k) * (2 * k + 1)), 0.0)
        sh, sl = dd_add(sh, sl, ph, pl)
        if abs(ph) < abs(sh) * 1e-35:
            break
    return sign * sh, sign * sl


# Stirling correction coefficients B_{2j}/(2j(2j-1)) as exact rationals.
_STIRLING_RATIONALS = [
    (1, 12), (-1, 360), (1, 1260), (-1, 1680), (1, 1188),
    (-691, 360360), (1, 156), (-3617, 122400), (43867, 244188),
    (-174611, 125400), (77683, 5796), (-236364091, 1506960),
    (657931, 300),
]
_STIRLING_DD = [dd_div(float(p), 0.0, float(q), 0.0) for p, q in _STIRLING_RATIONALS]


def _init_ln_sqrt_2pi():
    twopih, twopil = dd_mul_d(_PI_HI, _PI_LO, 2.0)
    lh, ll = dd_log(twopih, twopil)
    return 0.5 * lh, 0.5 * ll


_LN_SQRT_2PI_H, _LN_SQRT_2PI_L = _init_ln_sqrt_2pi()

_LGAMMA_SHIFT = 32.0


def dd_lgamma_sign(x, xl=0.0):
    """(log|Gamma(x)| hi, lo, sign); sign 0 at poles (x nonpositive integer)."""
    if x != x:
        return math.nan, 0.0, 1.0
    if x <= 0.0 and x == math.floor(x) and xl == 0.0:
        return math.inf, 0.0, 0.0
    if x < 0.5:
        # reflection: Gamma(x) = pi / (sin(pi x) Gamma(1-x))
        sh, sl = _dd_sin_pi(x, xl)
        if sh == 0.0:
            return math.inf, 0.0, 0.0
        sign = 1.0 if sh > 0 else -1.0
        if sh < 0:
            sh, sl = -sh, -sl
        lsh, lsl = dd_log(sh, sl)
        lph, lpl = dd_log(_PI_HI, _PI_LO)
        oh, ol = dd_add(1.0, 0.0, -x, -xl)
        gh, gl, _ = dd_lgamma_sign(oh, ol)
        rh, rl = dd_add(lph, lpl, -lsh, -lsl)
        rh, rl = dd_add(rh, rl, -gh, -gl)
        return rh, rl, sign
    # shift up to x >= 32, accumulating log factors
    acch, accl = 0.0, 0.0
    z, zl = x, xl
    while z < _LGAMMA_SHIFT:
        lh, ll = dd_log(z, zl)
        acch, accl = dd_add(acch, accl, lh, ll)
        z, zl = dd_add_d(z, zl, 1.0)
    # Stirling: (z - 1/2) log z - z + ln sqrt(2pi) + sum_j c_j z^{-(2j-1)}
    lzh, lzl = dd_log(z, zl)
    hh, hl = dd_add_d(z, zl, -0.5)
    t1h, t1l = dd_mul(hh, hl, lzh, lzl)
    rh, rl = dd_add(t1h, t1l, -z, -zl)
    rh, rl = dd_add(rh, rl, _LN_SQRT_2PI_H, _LN_SQRT_2PI_L)
    invh, invl = dd_div(1.0, 0.0, z, zl)
    inv2h, inv2l = dd_mul(invh, invl, invh, invl)
    ph, pl = invh, invl
    for ch, cl in _STIRLING_DD:
        th, tl = dd_mul(ph, pl, ch, cl)
        rh, rl = dd_add(rh, rl, th, tl)
        ph, pl = dd_mul(ph, pl, inv2h, inv2l)
    rh, rl = dd_add(rh, rl, -acch, -accl)
    return rh, rl, 1.0


def lgamma_dd(x):
    """log|Gamma(x)| as an (hi, lo) pair."""
    h, l, _ = dd_lgamma_sign(x)
    return h, l


# ----------------------------------------------------------------------
# Meijer-G residue-series evaluation
# ----------------------------------------------------------------------

def meijer_slater(a, b, m, n, x, log_pref, asymptotic, rtol, max_terms):
    """Sum the residue ladders of G^{m,n}_{p,q}(x | a; b), scaled by exp(log_pref).

    Direct mode (``asymptotic=False``) requires q > p and runs each ladder to
    convergence.  Asymptotic mode truncates each (generally divergent) ladder
    at its smallest term and charges the first omitted term to the error.
    Returns ``(value, err, status)`` with ``err`` an absolute uncertainty
    estimate (arithmetic noise plus truncation).
    """
    p = len(a)
    q = len(b)
    lnx_h, lnx_l = dd_log(x, 0.0)

    total_h, total_l = 0.0, 0.0
    peak = 0.0
    trunc_err = 0.0
    ktot = 0

    for h_idx in range(m):
        bh = b[h_idx]
        one_bh_h, one_bh_l = _two_sum(1.0, bh)
        lp_h, lp_l = log_pref, 0.0
        sign = 1.0
        skip = False
        for j in range(m):
            if j == h_idx:
                continue
            dh, dl = _two_sum(b[j], -bh)
            gh, gl, sg = dd_lgamma_sign(dh, dl)
            if sg == 0.0:
                return 0.0, math.inf, PREFACTOR_POLE
            sign *= sg
            lp_h, lp_l = dd_add(lp_h, lp_l, gh, gl)
        for j in range(n):
            dh, dl = dd_add_d(one_bh_h, one_bh_l, -a[j])
            gh, gl, sg = dd_lgamma_sign(dh, dl)
            if sg == 0.0:
                return 0.0, math.inf, PREFACTOR_POLE
            sign *= sg
            lp_h, lp_l = dd_add(lp_h, lp_l, gh, gl)
        for j in range(m, q):
            dh, dl = dd_add_d(one_bh_h, one_bh_l, -b[j])
            gh, gl, sg = dd_lgamma_sign(dh, dl)
            if sg == 0.0:
                skip = True  # 1/Gamma(pole) = 0: ladder vanishes
                break
            sign *= sg
            lp_h, lp_l = dd_add(lp_h, lp_l, -gh, -gl)
        if not skip:
            for j in range(n, p):
                dh, dl = _two_sum(a[j], -bh)
                gh, gl, sg = dd_lgamma_sign(dh, dl)
                if sg == 0.0:
                    skip = True
                    break
                sign *= sg
                lp_h, lp_l = dd_add(lp_h, lp_l, -gh, -gl)
        if skip:
            continue
        th, tl = dd_mul_d(lnx_h, lnx_l, bh)
        lp_h, lp_l = dd_add(lp_h, lp_l, th, tl)
        scale_h, scale_l = dd_exp(lp_h, lp_l)
        if scale_h == 0.0:
            continue
        if math.isinf(scale_h):
            return 0.0, math.inf, NO_CONVERGENCE

        # series bases in double-double, exact in the input parameters
        num_bases = [dd_add_d(one_bh_h, one_bh_l, -a[j]) for j in range(p)]
        den_bases = [dd_add_d(one_bh_h, one_bh_l, -b[j])
                     for j in range(q) if j != h_idx]

        arg_sign = -1.0 if (p - m - n) % 2 else 1.0
        sh, sl = 1.0, 0.0       # ladder sum (k=0 term is 1)
        th, tl = 1.0, 0.0       # current term
        ladder_peak = 1.0
        prev_mag = 1.0
        k = 0
        while True:
            if k >= max_terms:
                if asymptotic:
                    trunc_err += abs(th) * scale_h
                    break
                return 0.0, math.inf, NO_CONVERGENCE
            num_h, num_l = 1.0, 0.0
            for bh_, bl_ in num_bases:
                fh, fl = dd_add_d(bh_, bl_, float(k))
                num_h, num_l = dd_mul(num_h, num_l, fh, fl)
            den_h, den_l = float(k + 1), 0.0
            for bh_, bl_ in den_bases:
                fh, fl = dd_add_d(bh_, bl_, float(k))
                if fh == 0.0:
                    return 0.0, math.inf, PREFACTOR_POLE
                den_h, den_l = dd_mul(den_h, den_l, fh, fl)
            rat_h, rat_l = dd_div(num_h, num_l, den_h, den_l)
            rat_h, rat_l = dd_mul_d(rat_h, rat_l, arg_sign * x)
            th, tl = dd_mul(th, tl, rat_h, rat_l)
            k += 1
            mag = abs(th)
            if asymptotic and k > 1 and mag >= prev_mag:
                trunc_err += mag * scale_h
                break
            prev_mag = mag
            sh, sl = dd_add(sh, sl, th, tl)
            asum = abs(sh)
            if asum > ladder_peak:
                ladder_peak = asum
            if mag > ladder_peak:
                ladder_peak = mag
            if mag <= asum * 1e-33 + 1e-320:
                break
            if asymptotic and mag <= asum * rtol * 1e-4:
                break
        ktot += k
        contrib_h, contrib_l = dd_mul(sh, sl, scale_h, scale_l)
        if sign < 0:
            contrib_h, contrib_l = -contrib_h, -contrib_l
        total_h, total_l = dd_add(total_h, total_l, contrib_h, contrib_l)
        lp = ladder_peak * scale_h
        if lp > peak:
            peak = lp

    noise = peak * DD_EPS * 8.0 * (64.0 + 4.0 * (p + q) * math.sqrt(ktot + 1.0))
    return total_h, noise + trunc_err, OK


# ----------------------------------------------------------------------
# hypergeometric series (plain double precision)
# ----------------------------------------------------------------------

def hyp2f1_series(a, b, c, z, rtol, max_terms):
    """2F1(a,b;c;z) by direct power series; caller guarantees convergence."""
    term = 1.0
    total = 1.0
    k = 0
    while k < max_terms:
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        k += 1
        if abs(term) <= abs(total) * rtol:
            return total, OK
    return total, NO_CONVERGENCE


def hyp1f1_series(a, b, z, rtol, max_terms):
    """1F1(a;b;z) by direct power series."""
    term = 1.0
    total = 1.0
    k = 0
    while k < max_terms:
        term *= (a + k) / ((b + k) * (k + 1.0)) * z
        total += term
        k += 1
        if abs(term) <= abs(total) * rtol:
            return total, OK
    return total, NO_CONVERGENCE
