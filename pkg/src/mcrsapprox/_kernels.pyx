# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels.

Both scans are float prefilters: every candidate whose float discrepancy is
within the supplied margins of the running bound is reported, and the
caller re-evaluates the survivors exactly.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, floor, fabs, sqrt, INFINITY
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()


cdef struct Buffer:
    long long *ints
    double *vals
    Py_ssize_t n
    Py_ssize_t cap
    int width


cdef int buf_init(Buffer *b, int width) nogil:
    b.width = width
    b.n = 0
    b.cap = 256
    b.ints = <long long *> malloc(b.cap * width * sizeof(long long))
    b.vals = <double *> malloc(b.cap * sizeof(double))
    return 0 if (b.ints != NULL and b.vals != NULL) else -1


cdef int buf_push(Buffer *b, long long *row, double v) nogil:
    cdef Py_ssize_t k
    cdef long long *ni
    cdef double *nv
    if b.n == b.cap:
        b.cap *= 2
        ni = <long long *> realloc(b.ints, b.cap * b.width * sizeof(long long))
        nv = <double *> realloc(b.vals, b.cap * sizeof(double))
        if ni == NULL or nv == NULL:
            return -1
        b.ints = ni
        b.vals = nv
    for k in range(b.width):
        b.ints[b.n * b.width + k] = row[k]
    b.vals[b.n] = v
    b.n += 1
    return 0


cdef object buf_export(Buffer *b):
    ints = np.empty((b.n, b.width), dtype=np.int64)
    vals = np.empty(b.n, dtype=np.float64)
    cdef long long[:, ::1] iv = ints
    cdef double[::1] vv = vals
    cdef Py_ssize_t i, k
    for i in range(b.n):
        vv[i] = b.vals[i]
        for k in range(b.width):
            iv[i, k] = b.ints[i * b.width + k]
    free(b.ints)
    free(b.vals)
    return ints, vals


cdef inline long long igcd(long long a, long long b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# complex-pair candidates

cdef inline double complex_rho(double s, double r, double u, double al, double be) nogil:
    cdef double s2 = (al * al + be * be) / (2.0 * be)
    cdef double r2 = al / be
    cdef double u2 = 1.0 / (2.0 * be)
    cdef double diff = fabs(s - s2)
    cdef double t = fabs(r - r2)
    if t > diff:
        diff = t
    t = fabs(u - u2)
    if t > diff:
        diff = t
    cdef double plus = s + s2
    t = fabs(r + r2)
    if t > plus:
        plus = t
    t = u + u2
    if t > plus:
        plus = t
    return diff if diff <= plus else plus


cdef int scan_rect(long long g1, long long g2, long long G, long long N2,
                   double alo, double ahi, double blo, double bhi,
                   double s, double r, double u, double *R,
                   double rel, double absm, Buffer *out) nogil:
    cdef double Gd = <double> G
    cdef double w1lo = alo * g1 - bhi * g2
    cdef double w1hi = ahi * g1 - blo * g2
    cdef long long w1, w2, lo2, hi2, tmp
    cdef double x, y, al, be, rho
    cdef long long row[4]
    cdef double w1max = sqrt(<double> N2)
    if w1lo < -w1max:
        w1lo = -w1max
    if w1hi > w1max:
        w1hi = w1max
    for w1 in range(<long long> ceil(w1lo - 1e-9), <long long> floor(w1hi + 1e-9) + 1):
        # g1*w2 in [blo*G + w1*g2, bhi*G + w1*g2]
        x = (blo * Gd + w1 * g2) / g1
        y = (bhi * Gd + w1 * g2) / g1
        lo2 = <long long> ceil(x - 1e-9)
        hi2 = <long long> floor(y + 1e-9)
        if g2 > 0:
            x = (alo * Gd - w1 * g1) / g2
            y = (ahi * Gd - w1 * g1) / g2
            tmp = <long long> ceil(x - 1e-9)
            if tmp > lo2:
                lo2 = tmp
            tmp = <long long> floor(y + 1e-9)
            if tmp < hi2:
                hi2 = tmp
        for w2 in range(lo2, hi2 + 1):
            if w1 * w1 + w2 * w2 > N2:
                continue
            be = <double> (w2 * g1 - w1 * g2) / Gd
            if be <= 0:
                continue
            al = <double> (w1 * g1 + w2 * g2) / Gd
            rho = complex_rho(s, r, u, al, be)
            if rho <= R[0] * (1.0 + rel) + absm:
                row[0] = g1
                row[1] = g2
                row[2] = w1
                row[3] = w2
                if buf_push(out, row, rho) != 0:
                    return -1
                if rho < R[0]:
                    R[0] = rho
    return 0


cdef int gauss_shell(long long k, long long N, double s, double r, double u,
                     double *R, double rel, double absm, Buffer *out) nogil:
    cdef long long N2 = N * N
    cdef long long g1, g2, G, i
    cdef double Rw, blo, bhi, alo, ahi, a1, a2
    for i in range(2 * k):
        # g1 = k with g2 = 0..k, then g2 = k with g1 = k-1..1
        if i <= k:
            g1 = k
            g2 = i
        else:
            g1 = 2 * k - i
            g2 = k
        G = g1 * g1 + g2 * g2
        if G > N2:
            continue
        Rw = R[0] * (1.0 + rel) + absm
        # difference branch
        blo = 1.0 / (2.0 * (u + Rw))
        bhi = 2.0 * (s + Rw)
        if Rw < u and 1.0 / (2.0 * (u - Rw)) < bhi:
            bhi = 1.0 / (2.0 * (u - Rw))
        if blo <= bhi:
            a1 = blo * (r - Rw)
            a2 = bhi * (r - Rw)
            alo = a1 if a1 < a2 else a2
            a1 = blo * (r + Rw)
            a2 = bhi * (r + Rw)
            ahi = a1 if a1 > a2 else a2
            if scan_rect(g1, g2, G, N2, alo, ahi, blo, bhi, s, r, u, R, rel, absm, out) != 0:
                return -1
        # sum branch
        Rw = R[0] * (1.0 + rel) + absm
        if Rw > u and Rw > s:
            blo = 1.0 / (2.0 * (Rw - u))
            bhi = 2.0 * (Rw - s)
            if blo <= bhi:
                a1 = blo * (-r - Rw)
                a2 = bhi * (-r - Rw)
                alo = a1 if a1 < a2 else a2
                a1 = blo * (-r + Rw)
                a2 = bhi * (-r + Rw)
                ahi = a1 if a1 > a2 else a2
                if scan_rect(g1, g2, G, N2, alo, ahi, blo, bhi, s, r, u, R, rel, absm, out) != 0:
                    return -1
    return 0


def gauss_scan(long long N, shells, double s, double r, double u, double R0,
               double rel, double absm):
    """Scan conjugate-pair candidates (g, w) over the given shells
    max(g1, g2) = k.  Returns (rows[g1, g2, w1, w2], rho, final bound)."""
    cdef long long[::1] ks = np.ascontiguousarray(shells, dtype=np.int64)
    cdef Buffer out
    cdef double R = R0
    cdef Py_ssize_t i
    cdef int status = 0
    if buf_init(&out, 4) != 0:
        raise MemoryError()
    with nogil:
        for i in range(ks.shape[0]):
            if gauss_shell(ks[i], N, s, r, u, &R, rel, absm, &out) != 0:
                status = -1
                break
    if status != 0:
        free(out.ints)
        free(out.vals)
        raise MemoryError()
    rows, vals = buf_export(&out)
    return rows, vals, R


# ---------------------------------------------------------------------------
# simultaneous approximation in the A[a,b,c] chart

cdef inline double simul_rho(double beta, double gamma, double a, double b, double c) nogil:
    cdef double bb = b / a
    cdef double cc = c / a
    cdef double diff = fabs(beta - bb)
    cdef double t = fabs(gamma - cc)
    if t > diff:
        diff = t
    t = fabs((beta - bb) * (beta + bb) + (gamma - cc) * (gamma + cc)) * 0.5
    if t > diff:
        diff = t
    cdef double plus = 1.0
    t = fabs(beta + bb)
    if t > plus:
        plus = t
    t = fabs(gamma + cc)
    if t > plus:
        plus = t
    t = (beta * beta + gamma * gamma + bb * bb + cc * cc) * 0.5
    if t > plus:
        plus = t
    return diff if diff <= plus else plus


cdef inline void slope_range(double x, double B, double a, long long s,
                             long long *lo, long long *hi) nogil:
    """Integers y with |y| <= s and y/a within B of x or of -x (the latter
    only matters once B >= 1)."""
    cdef double l1 = a * (x - B)
    cdef double h1 = a * (x + B)
    cdef double l2, h2
    if B >= 1.0:
        l2 = a * (-x - B)
        h2 = a * (-x + B)
        if l2 < l1:
            l1 = l2
        if h2 > h1:
            h1 = h2
    if l1 < -s:
        l1 = -s
    if h1 > s:
        h1 = s
    lo[0] = <long long> ceil(l1 - 1e-9)
    hi[0] = <long long> floor(h1 + 1e-9)


cdef inline double threshold_at(long long s, long long[::1] tsz, double[::1] tval) nogil:
    cdef Py_ssize_t j
    cdef double t = tval[0]
    for j in range(tsz.shape[0]):
        if tsz[j] <= s:
            t = tval[j]
        else:
            break
    return t


cdef int simul_try(double beta, double gamma, long long a, long long b, long long c,
                   double bound, double rel, double absm, Buffer *out, double *best) nogil:
    cdef double rho
    cdef long long row[3]
    rho = simul_rho(beta, gamma, <double> a, <double> b, <double> c)
    if rho <= bound * (1.0 + rel) + absm:
        if igcd(igcd(a, b), c) != 1:
            return 0
        row[0] = a
        row[1] = b
        row[2] = c
        if buf_push(out, row, rho) != 0:
            return -1
        if rho < best[0]:
            best[0] = rho
    return 0


cdef int simul_shell(long long s, double beta, double gamma, double B,
                     double rel, double absm, Buffer *out, double *best) nogil:
    """All primitive (a, b, c) with a >= 1 and max(|a|,|b|,|c|) = s whose
    float discrepancy is within the margins of B."""
    cdef long long a, b, c, blo, bhi, clo, chi, alo, ahi
    cdef double Bw = B * (1.0 + rel) + absm
    cdef double ab, bm
    cdef int sgn
    # face a = s
    slope_range(beta, Bw, <double> s, s, &blo, &bhi)
    slope_range(gamma, Bw, <double> s, s, &clo, &chi)
    for b in range(blo, bhi + 1):
        for c in range(clo, chi + 1):
            if simul_try(beta, gamma, s, b, c, B, rel, absm, out, best) != 0:
                return -1
    # faces |b| = s (a < s), then |c| = s (a < s, |b| < s)
    for sgn in range(2):
        b = s if sgn == 0 else -s
        # |b/a| lies within Bw of |beta|
        ab = fabs(beta) + Bw
        # an empty face (s / ab past s - 1, possibly infinite) starts at s
        alo = <long long> ceil(s / ab - 1e-9) if ab > 0 and s / ab - 1e-9 < s else s
        if alo < 1:
            alo = 1
        bm = fabs(beta) - Bw
        ahi = s - 1
        if bm > 0 and s / bm + 1e-9 < <double> ahi:
            ahi = <long long> floor(s / bm + 1e-9)
        for a in range(alo, ahi + 1):
            slope_range(gamma, Bw, <double> a, s, &clo, &chi)
            for c in range(clo, chi + 1):
                if simul_try(beta, gamma, a, b, c, B, rel, absm, out, best) != 0:
                    return -1
    for sgn in range(2):
        c = s if sgn == 0 else -s
        ab = fabs(gamma) + Bw
        # an empty face (s / ab past s - 1, possibly infinite) starts at s
        alo = <long long> ceil(s / ab - 1e-9) if ab > 0 and s / ab - 1e-9 < s else s
        if alo < 1:
            alo = 1
        bm = fabs(gamma) - Bw
        ahi = s - 1
        if bm > 0 and s / bm + 1e-9 < <double> ahi:
            ahi = <long long> floor(s / bm + 1e-9)
        for a in range(alo, ahi + 1):
            slope_range(beta, Bw, <double> a, s - 1, &blo, &bhi)
            for b in range(blo, bhi + 1):
                if simul_try(beta, gamma, a, b, c, B, rel, absm, out, best) != 0:
                    return -1
    return 0


def simul_scan(double beta, double gamma, shells, int mode, double B0,
               thr_sizes, thr_vals, double rel, double absm):
    """Scan the shells in the given (increasing) order.

    mode 0: single bound, updated immediately.
    mode 1: records; shell s is pruned with the best value of shells < s.
    mode 2: fixed threshold step function (thr_sizes ascending).
    """
    cdef long long[::1] ks = np.ascontiguousarray(shells, dtype=np.int64)
    cdef long long[::1] tsz = np.ascontiguousarray(thr_sizes, dtype=np.int64)
    cdef double[::1] tval = np.ascontiguousarray(thr_vals, dtype=np.float64)
    cdef Buffer out
    cdef double best = B0
    cdef double shell_best, bound
    cdef Py_ssize_t i
    cdef int status = 0
    if mode == 2 and tsz.shape[0] == 0:
        raise ValueError("threshold mode needs at least one step")
    if buf_init(&out, 3) != 0:
        raise MemoryError()
    with nogil:
        for i in range(ks.shape[0]):
            if mode == 0:
                status = simul_shell(ks[i], beta, gamma, best, rel, absm, &out, &best)
            elif mode == 1:
                shell_best = best
                status = simul_shell(ks[i], beta, gamma, best, rel, absm, &out, &shell_best)
                best = shell_best
            else:
                bound = threshold_at(ks[i], tsz, tval)
                shell_best = INFINITY
                status = simul_shell(ks[i], beta, gamma, bound, rel, absm, &out, &shell_best)
            if status != 0:
                break
    if status != 0:
        free(out.ints)
        free(out.vals)
        raise MemoryError()
    rows, vals = buf_export(&out)
    return rows, vals, best
