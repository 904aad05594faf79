# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled best-response sweep for typed (linear / logarithmic) utilities.

Mirrors the pure-Python kernel in `iterative._sweep_python`: damped
Gauss-Seidel over benign agents in order then the malicious agent, bracketed
bisection per best response, zero-freezing after a run of zero responses, and
a stationarity check gating convergence.
"""

from libc.math cimport fabs
from libc.stdlib cimport free, malloc

DEF BRACKET_REL_TOL = 1e-15
DEF GROW_LIMIT = 400
DEF ST_CONVERGED = 0
DEF ST_MAX_SWEEPS = 1
DEF ST_COLLAPSED = 2

STATUS_CONVERGED = ST_CONVERGED
STATUS_MAX_SWEEPS = ST_MAX_SWEEPS
STATUS_COLLAPSED = ST_COLLAPSED


cdef inline double _deriv(int fam, double a, double b, double d) noexcept nogil:
    if fam == 0:
        return a
    return a * b / (1.0 + b * d)


cdef inline double _benign_foc(int fam, double a, double b, double x,
                               double z_minus, double c) noexcept nogil:
    cdef double z = x + z_minus
    return _deriv(fam, a, b, x / z) * z_minus / (z * z) - c


cdef double _benign_br(int fam, double a, double b, double z_minus, double c,
                       double growth) noexcept nogil:
    cdef double hi, lo, mid
    cdef int k
    if _deriv(fam, a, b, 0.0) / z_minus - c <= 0.0:
        return 0.0
    hi = z_minus
    for k in range(GROW_LIMIT):
        if _benign_foc(fam, a, b, hi, z_minus, c) < 0.0:
            break
        hi *= growth
    lo = 0.0
    while hi - lo > BRACKET_REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if _benign_foc(fam, a, b, mid, z_minus, c) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


cdef double _malicious_foc(int n, int* fams, double* p1, double* p2,
                           unsigned char* targ, double* x, double x0,
                           double s, double theta, double c) noexcept nogil:
    cdef double z = x0 + s
    cdef double z2 = z * z
    cdef double total = 0.0
    cdef int i
    for i in range(n):
        if targ[i] and x[i + 1] > 0.0:
            total += _deriv(fams[i], p1[i], p2[i], x[i + 1] / z) * x[i + 1]
    return theta * total / z2 - c


cdef double _malicious_br(int n, int* fams, double* p1, double* p2,
                          unsigned char* targ, double* x, double s,
                          double theta, double c, double growth) noexcept nogil:
    cdef double hi, lo, mid
    cdef int k
    if _malicious_foc(n, fams, p1, p2, targ, x, 0.0, s, theta, c) <= 0.0:
        return 0.0
    hi = s
    for k in range(GROW_LIMIT):
        if _malicious_foc(n, fams, p1, p2, targ, x, hi, s, theta, c) < 0.0:
            break
        hi *= growth
    lo = 0.0
    while hi - lo > BRACKET_REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if _malicious_foc(n, fams, p1, p2, targ, x, mid, s, theta, c) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sweep_solve(fams_in, p1_in, p2_in, targeted_in, double theta, double c,
                x_in, double rate_tol, double foc_tol, long max_sweeps,
                double damping, double growth, int freeze_after):
    """Run the damped sweep; returns (rates, sweeps, status)."""
    cdef int n = len(fams_in)
    cdef int m = n + 1
    cdef int has_mal = 1 if theta > 0.0 else 0
    cdef int* fams = <int*> malloc(n * sizeof(int))
    cdef double* p1 = <double*> malloc(n * sizeof(double))
    cdef double* p2 = <double*> malloc(n * sizeof(double))
    cdef unsigned char* targ = <unsigned char*> malloc(n * sizeof(unsigned char))
    cdef double* x = <double*> malloc(m * sizeof(double))
    cdef int* zero_streak = <int*> malloc(m * sizeof(int))
    cdef unsigned char* frozen = <unsigned char*> malloc(m * sizeof(unsigned char))
    if not (fams and p1 and p2 and targ and x and zero_streak and frozen):
        free(fams); free(p1); free(p2); free(targ); free(x); free(zero_streak); free(frozen)
        raise MemoryError()

    cdef int i
    for i in range(n):
        fams[i] = fams_in[i]
        p1[i] = p1_in[i]
        p2[i] = p2_in[i]
        targ[i] = 1 if targeted_in[i] else 0
    for i in range(m):
        x[i] = x_in[i]
        zero_streak[i] = 0
        frozen[i] = 0

    cdef long sweep = 0
    cdef int status = ST_MAX_SWEEPS
    cdef double total, delta, z_minus, br, new, r, du, z, z2, mal_gain
    cdef int j, ok, idx
    cdef bint kkt_ok

    with nogil:
        for sweep in range(1, max_sweeps + 1):
            delta = 0.0
            total = 0.0
            for i in range(m):
                total += x[i]
            # benign agents in order, then the malicious agent
            for j in range(1, m + 1):
                idx = j if j < m else 0
                if idx == 0 and not has_mal:
                    continue
                if frozen[idx]:
                    continue
                z_minus = total - x[idx]
                if z_minus <= 0.0:
                    br = 0.0 if x[idx] == 0.0 else x[idx] * 0.5
                elif idx == 0:
                    br = _malicious_br(n, fams, p1, p2, targ, x, z_minus, theta, c, growth)
                else:
                    br = _benign_br(fams[idx - 1], p1[idx - 1], p2[idx - 1], z_minus, c, growth)
                new = (1.0 - damping) * x[idx] + damping * br
                if br == 0.0:
                    zero_streak[idx] += 1
                    if zero_streak[idx] >= freeze_after:
                        frozen[idx] = 1
                        new = 0.0
                else:
                    zero_streak[idx] = 0
                if fabs(new - x[idx]) > delta:
                    delta = fabs(new - x[idx])
                total += new - x[idx]
                x[idx] = new

            total = 0.0
            for i in range(m):
                total += x[i]
            if total < 1e-12:
                status = ST_COLLAPSED
                break
            if delta < rate_tol:
                # stationarity residuals gate convergence
                z = total
                z2 = z * z
                kkt_ok = True
                mal_gain = 0.0
                for i in range(n):
                    du = _deriv(fams[i], p1[i], p2[i], x[i + 1] / z)
                    r = du * (z - x[i + 1]) / z2 - c
                    if targ[i]:
                        mal_gain += du * x[i + 1] / z2
                    if x[i + 1] > rate_tol:
                        if fabs(r) >= foc_tol:
                            kkt_ok = False
                    elif r > foc_tol:
                        kkt_ok = False
                        if frozen[i + 1]:
                            frozen[i + 1] = 0
                            zero_streak[i + 1] = 0
                if has_mal:
                    r = theta * mal_gain - c
                    if x[0] > rate_tol:
                        if fabs(r) >= foc_tol:
                            kkt_ok = False
                    elif r > foc_tol:
                        kkt_ok = False
                        if frozen[0]:
                            frozen[0] = 0
                            zero_streak[0] = 0
                if kkt_ok:
                    status = ST_CONVERGED
                    break

    rates = [x[i] for i in range(m)]
    out_sweeps = sweep
    free(fams); free(p1); free(p2); free(targ); free(x); free(zero_streak); free(frozen)
    return rates, out_sweeps, status
