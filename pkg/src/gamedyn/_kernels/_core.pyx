# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: table sampling, best-response walks, gradient ascent.

Bit-compatibility contract with `pyfallback`: sampling must agree exactly
(same splitmix stream, same rational inverse CDF, libm log/sqrt, no fused
multiply-adds); the best-response walks must visit identical profiles; the
gradient loop only agrees to rounding because summation order differs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, isfinite, log, sqrt
from libc.stdlib cimport free, malloc

cnp.import_array()

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t gd_mix64(uint64_t z) {
        z ^= z >> 30; z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27; z *= 0x94D049BB133111EBULL;
        z ^= z >> 31; return z;
    }
    """
    unsigned long long gd_mix64(unsigned long long z) nogil

cdef unsigned long long GOLDEN = 0x9E3779B97F4A7C15ULL

BACKEND_NAME = "cython"

STATUS_FIXED_POINT = 0
STATUS_CYCLE = 1
STATUS_TRUNCATED = 2
STATUS_EXHAUSTED = 3

SPGD_OK = 0
SPGD_DIVERGED = 1


cdef inline double stream_uniform(unsigned long long seed,
                                  unsigned long long counter) nogil:
    cdef unsigned long long z = gd_mix64(seed + (counter + 1ULL) * GOLDEN)
    return (<double>(z >> 11) + 0.5) * (1.0 / 9007199254740992.0)


cdef inline double ppnd16(double p) nogil:
    # Wichura's PPND16 rational approximations (|err| < 1e-15 over (0,1))
    cdef double q = p - 0.5
    cdef double r, num, den
    if -0.425 <= q <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3*r + 3.3430575583588128105e4)*r
              + 6.7265770927008700853e4)*r + 4.5921953931549871457e4)*r
              + 1.3731693765509461125e4)*r + 1.9715909503065514427e3)*r
              + 1.3314166789178437745e2)*r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3*r + 2.8729085735721942674e4)*r
              + 3.9307895800092710610e4)*r + 2.1213794301586595867e4)*r
              + 5.3941960214247511077e3)*r + 6.8718700749205790830e2)*r
              + 4.2313330701600911252e1)*r + 1.0)
        return q * num / den
    if q < 0.0:
        r = p
    else:
        r = 1.0 - p
    r = sqrt(-log(r))
    if r <= 5.0:
        r = r - 1.6
        num = (((((((7.74545014278341407640e-4*r + 2.27238449892691845833e-2)*r
              + 2.41780725177450611770e-1)*r + 1.27045825245236838258e0)*r
              + 3.64784832476320460504e0)*r + 5.76949722146069140550e0)*r
              + 4.63033784615654529590e0)*r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9*r + 5.47593808499534494600e-4)*r
              + 1.51986665636164571966e-2)*r + 1.48103976427480074590e-1)*r
              + 6.89767334985100004550e-1)*r + 1.67638483018380384940e0)*r
              + 2.05319162663775882187e0)*r + 1.0)
    else:
        r = r - 5.0
        num = (((((((2.01033439929228813265e-7*r + 2.71155556874348757815e-5)*r
              + 1.24266094738807843860e-3)*r + 2.65321895265761230930e-2)*r
              + 2.96560571828504891230e-1)*r + 1.78482653991729133580e0)*r
              + 5.46378491116411436990e0)*r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15*r + 1.42151175831644588870e-7)*r
              + 1.84631831751005468180e-5)*r + 7.86869131145613259100e-4)*r
              + 1.48753612908506148525e-2)*r + 1.36929880922735805310e-1)*r
              + 5.99832206555887937690e-1)*r + 1.0)
    if q < 0.0:
        return -(num / den)
    return num / den


def inverse_normal_cdf(cnp.ndarray p_in):
    """Standard normal quantile, elementwise, for p strictly inside (0, 1)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = \
        np.ascontiguousarray(p_in, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(p.shape[0])
    cdef Py_ssize_t i
    with nogil:
        for i in range(p.shape[0]):
            out[i] = ppnd16(p[i])
    return out.reshape(np.shape(p_in))


def normals_block(unsigned long long seed, unsigned long long offset,
                  Py_ssize_t count):
    """Standard normal draws offset..offset+count-1 of counter stream `seed`."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(count)
    cdef Py_ssize_t i
    with nogil:
        for i in range(count):
            out[i] = ppnd16(stream_uniform(seed, offset + <unsigned long long>i))
    return out


def sample_tables(unsigned long long seed, int n, Py_ssize_t m, double lam):
    """Payoff tables u_i = sqrt(lam)*Z + sqrt(1-lam)*W_i, flat, C order.

    Counter layout: Z occupies [0, P), W_i occupies [(i+1)*P, (i+2)*P).
    At lam == 1 the returned list holds the same array n times.
    """
    cdef Py_ssize_t num_profiles = m ** n
    cdef cnp.ndarray[cnp.float64_t, ndim=1] shared, tab
    cdef double[::1] zv
    cdef double c_common, c_own
    cdef Py_ssize_t i, j
    cdef unsigned long long base
    if lam == 1.0:
        shared = normals_block(seed, 0, num_profiles)
        return [shared] * n
    if lam == 0.0:
        return [normals_block(seed, (i + 1) * num_profiles, num_profiles)
                for i in range(n)]
    c_common = sqrt(lam)
    c_own = sqrt(1.0 - lam)
    shared = normals_block(seed, 0, num_profiles)
    zv = shared
    tables = []
    for i in range(n):
        tab = np.empty(num_profiles)
        base = <unsigned long long>((i + 1) * num_profiles)
        with nogil:
            for j in range(num_profiles):
                tab[j] = c_common * zv[j] + c_own * ppnd16(
                    stream_uniform(seed, base + <unsigned long long>j))
        tables.append(tab)
    return tables


def sbrd_path(list tables, Py_ssize_t m, long long start_index,
              long long max_steps):
    """Simultaneous best-response walk from a profile index.

    Same contract as the fallback: returns (status, first_visit, trajectory).
    """
    cdef Py_ssize_t n = len(tables)
    cdef const double **tabs = <const double **>malloc(n * sizeof(double *))
    cdef long long *strides = <long long *>malloc(n * sizeof(long long))
    if tabs == NULL or strides == NULL:
        free(tabs); free(strides)
        raise MemoryError
    cdef const double[::1] mv
    cdef Py_ssize_t i
    try:
        for i in range(n):
            mv = tables[i]
            tabs[i] = &mv[0]
        strides[n - 1] = 1
        for i in range(n - 2, -1, -1):
            strides[i] = strides[i + 1] * m
        return _sbrd_inner(tabs, strides, n, m, start_index, max_steps)
    finally:
        free(tabs)
        free(strides)


cdef _sbrd_inner(const double **tabs, long long *strides, Py_ssize_t n,
                 Py_ssize_t m, long long start_index, long long max_steps):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] traj = np.empty(max_steps + 1,
                                                          dtype=np.int64)
    cdef dict seen = {start_index: 0}
    cdef long long idx = start_index, nxt, base, pos
    cdef long long step, s_prev
    cdef Py_ssize_t i, k, best_k
    cdef double best, v
    traj[0] = start_index
    for step in range(1, max_steps + 1):
        nxt = 0
        for i in range(n):
            base = idx - ((idx // strides[i]) % m) * strides[i]
            best = tabs[i][base]
            best_k = 0
            pos = base
            for k in range(1, m):
                pos += strides[i]
                v = tabs[i][pos]
                if v > best:
                    best = v
                    best_k = k
            nxt += best_k * strides[i]
        traj[step] = nxt
        if nxt in seen:
            s_prev = <long long>seen[nxt]
            if step - s_prev == 1:
                return STATUS_FIXED_POINT, s_prev, traj[:step + 1].copy()
            return STATUS_CYCLE, s_prev, traj[:step + 1].copy()
        seen[nxt] = step
        idx = nxt
    return STATUS_TRUNCATED, -1, traj.copy()


def indd_path(const double[::1] table0, const double[::1] table1,
              Py_ssize_t m, long long a_start, long long b_start,
              long long max_steps):
    """Two-player independent dynamic; same contract as the fallback."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] traj = np.empty(max_steps + 1,
                                                          dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] played0 = np.zeros(m, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] played1 = np.zeros(m, dtype=np.uint8)
    cdef dict seen
    cdef long long prev_a = a_start, prev_b = b_start
    cdef long long prev2_a = -1, prev2_b = -1
    cdef long long step, idx, s_prev, cur_a, cur_b
    cdef Py_ssize_t k
    cdef double best, v
    cdef long long best_k
    played0[a_start] = 1
    played1[b_start] = 1
    traj[0] = a_start * m + b_start
    seen = {traj[0]: 0}
    for step in range(1, max_steps + 1):
        # player 0 scans column prev_b, player 1 scans row prev_a
        best_k = -1
        best = 0.0
        for k in range(m):
            if played0[k] and k != prev2_a:
                continue
            v = table0[k * m + prev_b]
            if best_k < 0 or v > best:
                best = v
                best_k = k
        if best_k < 0:
            return STATUS_EXHAUSTED, -1, traj[:step].copy()
        cur_a = best_k
        best_k = -1
        best = 0.0
        for k in range(m):
            if played1[k] and k != prev2_b:
                continue
            v = table1[prev_a * m + k]
            if best_k < 0 or v > best:
                best = v
                best_k = k
        if best_k < 0:
            return STATUS_EXHAUSTED, -1, traj[:step].copy()
        cur_b = best_k
        played0[cur_a] = 1
        played1[cur_b] = 1
        idx = cur_a * m + cur_b
        traj[step] = idx
        if idx in seen:
            s_prev = <long long>seen[idx]
            if step - s_prev == 1:
                return STATUS_FIXED_POINT, s_prev, traj[:step + 1].copy()
            return STATUS_CYCLE, s_prev, traj[:step + 1].copy()
        seen[idx] = step
        prev2_a = prev_a
        prev2_b = prev_b
        prev_a = cur_a
        prev_b = cur_b
    return STATUS_TRUNCATED, -1, traj.copy()


cdef void _contract_last(const double *src, Py_ssize_t size, Py_ssize_t m,
                         const double *vec, double *dst) noexcept nogil:
    cdef Py_ssize_t j, k
    cdef double acc
    for j in range(size // m):
        acc = 0.0
        for k in range(m):
            acc += src[j * m + k] * vec[k]
        dst[j] = acc


cdef void _contract_first(const double *src, Py_ssize_t size, Py_ssize_t m,
                          const double *vec, double *dst) noexcept nogil:
    cdef Py_ssize_t rest = size // m
    cdef Py_ssize_t k, r
    cdef double w
    for r in range(rest):
        dst[r] = 0.0
    for k in range(m):
        w = vec[k]
        for r in range(rest):
            dst[r] += w * src[k * rest + r]


def spgd_loop(list tables, cnp.ndarray[cnp.float64_t, ndim=2] z_in,
              double eta, double gap_tol, long long max_iters,
              long long record_every):
    """Softmax policy gradient ascent; same contract as the fallback."""
    cdef Py_ssize_t n = z_in.shape[0]
    cdef Py_ssize_t m = z_in.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] z = np.ascontiguousarray(z_in).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = np.empty((n, m))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] q = np.empty((n, m))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u = np.empty(n)
    cdef Py_ssize_t scratch = m ** (n - 1) if n > 1 else 1
    cdef double *buf_a = <double *>malloc(scratch * sizeof(double))
    cdef double *buf_b = <double *>malloc(scratch * sizeof(double))
    cdef const double **tabs = <const double **>malloc(n * sizeof(double *))
    if buf_a == NULL or buf_b == NULL or tabs == NULL:
        free(buf_a); free(buf_b); free(tabs)
        raise MemoryError
    cdef const double[::1] mv
    cdef Py_ssize_t i
    try:
        for i in range(n):
            mv = tables[i]
            tabs[i] = &mv[0]
        return _spgd_inner(tabs, z, x, q, u, n, m, buf_a, buf_b, eta,
                           gap_tol, max_iters, record_every)
    finally:
        free(buf_a)
        free(buf_b)
        free(tabs)


cdef _spgd_inner(const double **tabs,
                 cnp.ndarray[cnp.float64_t, ndim=2] z,
                 cnp.ndarray[cnp.float64_t, ndim=2] x,
                 cnp.ndarray[cnp.float64_t, ndim=2] q,
                 cnp.ndarray[cnp.float64_t, ndim=1] u,
                 Py_ssize_t n, Py_ssize_t m, double *buf_a, double *buf_b,
                 double eta, double gap_tol, long long max_iters,
                 long long record_every):
    cdef long long it = 0
    cdef double payoff_sum = 0.0
    cdef long long payoff_count = 0
    cdef bint converged = False, bad = False
    cdef Py_ssize_t i, a, j
    cdef double zmax, acc, gap, d, mean_u
    cdef const double *src
    cdef double *dst
    cdef Py_ssize_t size
    with nogil:
        while True:
            for i in range(n):
                zmax = z[i, 0]
                for a in range(1, m):
                    if z[i, a] > zmax:
                        zmax = z[i, a]
                acc = 0.0
                for a in range(m):
                    x[i, a] = exp(z[i, a] - zmax)
                    acc += x[i, a]
                for a in range(m):
                    x[i, a] /= acc
            for i in range(n):
                src = tabs[i]
                size = 1
                for j in range(n):
                    size *= m
                dst = buf_a
                for j in range(n - 1, i, -1):
                    _contract_last(src, size, m, &x[j, 0], dst)
                    size //= m
                    src = dst
                    dst = buf_b if dst == buf_a else buf_a
                for j in range(i):
                    _contract_first(src, size, m, &x[j, 0], dst)
                    size //= m
                    src = dst
                    dst = buf_b if dst == buf_a else buf_a
                for a in range(m):
                    q[i, a] = src[a]
            gap = 0.0
            for i in range(n):
                acc = 0.0
                for a in range(m):
                    acc += q[i, a] * x[i, a]
                u[i] = acc
                for a in range(m):
                    d = q[i, a] - acc
                    if d > gap:
                        gap = d
            if it % record_every == 0:
                mean_u = 0.0
                for i in range(n):
                    mean_u += u[i]
                payoff_sum += mean_u / n
                payoff_count += 1
            if gap < gap_tol:
                converged = True
                break
            if it >= max_iters:
                break
            for i in range(n):
                for a in range(m):
                    z[i, a] += eta * x[i, a] * (q[i, a] - u[i])
                    if not isfinite(z[i, a]):
                        bad = True
            if bad:
                break
            it += 1
    if bad:
        return SPGD_DIVERGED, it, False, gap, x, u, payoff_sum, payoff_count
    return SPGD_OK, it, converged, gap, x, u, payoff_sum, payoff_count
