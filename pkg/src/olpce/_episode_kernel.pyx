# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled episode engine for single-resource request families.

Must stay arithmetically identical to ``_episode_py.py``: same branch
structure and same floating-point operation order, so the two paths produce
bit-identical traces from the same request draws.

Kind codes: 0 = MultisecretaryBeta, 1 = GapMultisecretary,
2 = TwoPointConsumption, 3 = UnitSquareShifted.
"""

from libc.math cimport pow

IS_COMPILED = True


cdef inline double _beta_price(double d, double beta) nogil:
    cdef double u, p
    if d >= 1.0:
        return 0.0
    if d <= 0.0:
        return 1.0
    u = 1.0 - d
    p = 1.0 / (1.0 + beta)
    if u < 0.5:
        return 0.5 * (1.0 - pow(1.0 - 2.0 * u, p))
    return 0.5 * (1.0 + pow(2.0 * u - 1.0, p))


cdef inline double _gap_price(double d) nogil:
    if d >= 1.0:
        return 0.0
    if d >= 0.5:
        return 2.0 * (1.0 - d)
    if d > 0.0:
        return 3.0 - 2.0 * d
    return 3.0


cdef inline double _two_point_price(double d) nogil:
    if d >= 2.5:
        return 0.0
    if d >= 0.5:
        return (4.5 - d) / 8.0
    if d > 0.0:
        return 2.0 - 2.0 * d
    return 2.0


cdef inline double _unit_square_consumption(double z) nogil:
    cdef double c1, c2, total
    if z <= 0.0:
        return 1.5
    c1 = 1.0 / z
    if c1 < 1.0:
        c1 = 1.0
    elif c1 > 2.0:
        c1 = 2.0
    c2 = 2.0 / z
    if c2 < 1.0:
        c2 = 1.0
    elif c2 > 2.0:
        c2 = 2.0
    total = (c1 * c1 - 1.0) / 2.0
    if c2 > c1:
        total += (c2 * c2 - c1 * c1) - z * (c2 * c2 * c2 - c1 * c1 * c1) / 3.0
    return total


cdef inline double _unit_square_price(double d) nogil:
    cdef double lo, hi, mid
    cdef int i
    if d >= 1.5:
        return 0.0
    if d <= 0.0:
        return 2.0
    lo = 0.0
    hi = 2.0
    for i in range(100):
        mid = 0.5 * (lo + hi)
        if _unit_square_consumption(mid) <= d:
            hi = mid
        else:
            lo = mid
    return hi


cdef inline double _price(int kind, double d, double beta) nogil:
    if kind == 0:
        return _beta_price(d, beta)
    if kind == 1:
        return _gap_price(d)
    if kind == 2:
        return _two_point_price(d)
    return _unit_square_price(d)


def price(int kind, double d, double beta):
    return _price(kind, d, beta)


def run_ce_m1(int kind, double beta, double b0, long T,
              double[::1] a, double[::1] r,
              double[::1] thresholds, unsigned char[::1] accepted,
              double[::1] b_after):
    cdef double b = b0
    cdef double total = 0.0
    cdef double lam, at, rt, thr
    cdef long t
    with nogil:
        for t in range(1, T + 1):
            if t < T:
                lam = _price(kind, b / (T - t), beta)
            else:
                lam = 0.0
            at = a[t - 1]
            rt = r[t - 1]
            thr = at * lam
            thresholds[t - 1] = thr
            if rt >= thr and at <= b:
                accepted[t - 1] = 1
                b -= at
                total += rt
            else:
                accepted[t - 1] = 0
            b_after[t - 1] = b
    return total


def run_threshold_m1(double lam, double b0, long T,
                     double[::1] a, double[::1] r,
                     double[::1] thresholds, unsigned char[::1] accepted,
                     double[::1] b_after):
    cdef double b = b0
    cdef double total = 0.0
    cdef double at, rt, thr
    cdef long t
    with nogil:
        for t in range(T):
            at = a[t]
            rt = r[t]
            thr = at * lam
            thresholds[t] = thr
            if rt >= thr and at <= b:
                accepted[t] = 1
                b -= at
                total += rt
            else:
                accepted[t] = 0
            b_after[t] = b
    return total
