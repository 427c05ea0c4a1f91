# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trial kernel; same random recipe as ``pilotsense._rng``."""
from libc.math cimport cos, log, sin, sqrt
from libc.stdint cimport uint64_t
from libc.stdlib cimport free, malloc

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef double TWO_PI = 6.283185307179586


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double uniform(uint64_t key, uint64_t j) noexcept nogil:
    return <double>(mix64(key + (j + 1) * GOLDEN) >> 11) * INV_2_53


cdef void normals(uint64_t key, Py_ssize_t n_pairs, double* out) noexcept nogil:
    cdef Py_ssize_t p
    cdef double r, angle
    for p in range(n_pairs):
        r = sqrt(-2.0 * log(1.0 - uniform(key, 2 * p)))
        angle = TWO_PI * uniform(key, 2 * p + 1)
        out[2 * p] = r * cos(angle)
        out[2 * p + 1] = r * sin(angle)


def fill_components(const double[::1] pilot, double sqrt_theta, double data_std,
                    double noise_std, bint h1, uint64_t key0, Py_ssize_t start,
                    Py_ssize_t stop, double[::1] energy_out, double[::1] corr_out):
    """Per-trial ``mean(y**2)`` and ``mean(x*y)``; see ``_rng.fill_components``."""
    cdef Py_ssize_t n = pilot.shape[0]
    cdef Py_ssize_t n_pairs = n if h1 else (n + 1) // 2
    cdef Py_ssize_t t, i
    cdef uint64_t key
    cdef double y, e, c
    if stop - start > energy_out.shape[0] or stop - start > corr_out.shape[0]:
        raise ValueError("output buffers too short")
    cdef double* z = <double*>malloc(2 * n_pairs * sizeof(double))
    if z == NULL:
        raise MemoryError()
    try:
        with nogil:
            for t in range(start, stop):
                key = mix64(key0 + <uint64_t>(t + 1) * GOLDEN)
                normals(key, n_pairs, z)
                e = 0.0
                c = 0.0
                for i in range(n):
                    if h1:
                        y = sqrt_theta * pilot[i] + data_std * z[n + i] + noise_std * z[i]
                    else:
                        y = noise_std * z[i]
                    e += y * y
                    c += y * pilot[i]
                energy_out[t - start] = e / n
                corr_out[t - start] = c / n
    finally:
        free(z)
