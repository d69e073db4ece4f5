# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. See _kernels_py for the reference numpy versions."""

from libc.stdint cimport int64_t, uint8_t


def apply_matrix(double complex[::1] psi, int n, int target,
                 double complex m00, double complex m01,
                 double complex m10, double complex m11,
                 int64_t cmask, int64_t cval):
    cdef int64_t dim = psi.shape[0]
    cdef int64_t tbit = (<int64_t>1) << (n - 1 - target)
    cdef int64_t i, j
    cdef double complex a, b
    with nogil:
        for i in range(dim):
            if i & tbit:
                continue
            if (i & cmask) != cval:
                continue
            j = i | tbit
            a = psi[i]
            b = psi[j]
            psi[i] = m00 * a + m01 * b
            psi[j] = m10 * a + m11 * b


def apply_swap(double complex[::1] psi, int n, int qa, int qb,
               int64_t cmask, int64_t cval):
    cdef int64_t dim = psi.shape[0]
    cdef int64_t abit = (<int64_t>1) << (n - 1 - qa)
    cdef int64_t bbit = (<int64_t>1) << (n - 1 - qb)
    cdef int64_t i, j
    cdef double complex tmp
    with nogil:
        for i in range(dim):
            # visit each pair once, from the side with a=1, b=0
            if not (i & abit) or (i & bbit):
                continue
            if (i & cmask) != cval:
                continue
            j = (i ^ abit) | bbit
            tmp = psi[i]
            psi[i] = psi[j]
            psi[j] = tmp


def mcx_rows(uint8_t[:, ::1] bits, int target, int64_t[::1] ctrl_cols,
             uint8_t[::1] ctrl_vals):
    cdef Py_ssize_t rows = bits.shape[0]
    cdef Py_ssize_t nc = ctrl_cols.shape[0]
    cdef Py_ssize_t r, c
    cdef bint fire
    with nogil:
        for r in range(rows):
            fire = True
            for c in range(nc):
                if bits[r, ctrl_cols[c]] != ctrl_vals[c]:
                    fire = False
                    break
            if fire:
                bits[r, target] ^= 1


def count_band_sequences(int n_tilde, int length, int kmin, int kmax):
    """Number of words of the given length over n_tilde symbols whose
    symbol counts all lie in [kmin, kmax]."""
    cdef int64_t total = 0
    cdef int digits[64]
    cdef int counts[64]
    cdef int p, s, bad
    if length > 64 or n_tilde > 64:
        raise ValueError("kernel limited to 64 symbols and length 64")
    if length == 0:
        return 1 if kmin <= 0 <= kmax else 0
    for p in range(length):
        digits[p] = 0
    for s in range(n_tilde):
        counts[s] = 0
    counts[0] = length
    # bad = number of symbols whose count is outside the band
    bad = 0
    for s in range(n_tilde):
        if counts[s] < kmin or counts[s] > kmax:
            bad += 1
    with nogil:
        while True:
            if bad == 0:
                total += 1
            # odometer increment with incremental count update
            p = 0
            while p < length:
                s = digits[p]
                bad -= (counts[s] < kmin or counts[s] > kmax)
                counts[s] -= 1
                bad += (counts[s] < kmin or counts[s] > kmax)
                if s + 1 < n_tilde:
                    digits[p] = s + 1
                    s = s + 1
                    bad -= (counts[s] < kmin or counts[s] > kmax)
                    counts[s] += 1
                    bad += (counts[s] < kmin or counts[s] > kmax)
                    break
                digits[p] = 0
                bad -= (counts[0] < kmin or counts[0] > kmax)
                counts[0] += 1
                bad += (counts[0] < kmin or counts[0] > kmax)
                p += 1
            if p == length:
                break
    return total
