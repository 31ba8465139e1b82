# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fraction-free Gauss-Jordan elimination on int64 rows.

Same contract as ``dualis._kernels_py.echelon``.  Arithmetic is done in
64-bit integers with overflow detection; on overflow ``OverflowError`` is
raised and the caller reruns the pure-Python kernel on arbitrary-precision
integers.
"""

from libc.stdlib cimport malloc, free
from libc.string cimport memset

ctypedef long long i64


cdef extern from *:
    """
    static inline int mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int mul_ovf(i64 a, i64 b, i64 *r) nogil
    int sub_ovf(i64 a, i64 b, i64 *r) nogil


cdef inline i64 _gcd(i64 a, i64 b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef int _normalize(i64 *row, Py_ssize_t n) nogil:
    cdef i64 g = 0
    cdef Py_ssize_t j
    for j in range(n):
        if row[j]:
            g = _gcd(g, row[j])
            if g == 1:
                return 0
    if g > 1:
        for j in range(n):
            row[j] = row[j] // g
    return 0


cdef int _eliminate(i64 *r, i64 *p, Py_ssize_t col, Py_ssize_t n) nogil:
    """r <- (a/g) r - (b/g) p, zeroing column col. Returns 1 on overflow."""
    cdef i64 a = p[col]
    cdef i64 b = r[col]
    cdef i64 g = _gcd(a, b)
    cdef i64 a1 = a // g
    cdef i64 b1 = b // g
    cdef i64 x, y
    cdef Py_ssize_t j
    for j in range(n):
        if a1 != 1:
            if mul_ovf(r[j], a1, &x):
                return 1
        else:
            x = r[j]
        if p[j]:
            if mul_ovf(p[j], b1, &y):
                return 1
            if sub_ovf(x, y, &x):
                return 1
        r[j] = x
    _normalize(r, n)
    return 0


def echelon(rows, Py_ssize_t ncols):
    """Reduce integer rows to Gauss-Jordan form (int64 fast path)."""
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t n = ncols
    cdef Py_ssize_t i, j, col, k, best, rank = 0
    cdef i64 v, bestv, bestlen, ln
    cdef i64 *buf
    cdef char *used
    cdef Py_ssize_t *piv_row
    cdef int ovf = 0

    if m == 0 or n == 0:
        return [], []
    buf = <i64 *> malloc(m * n * sizeof(i64))
    used = <char *> malloc(m)
    piv_row = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    if buf == NULL or used == NULL or piv_row == NULL:
        free(buf); free(used); free(piv_row)
        raise MemoryError()
    try:
        for i in range(m):
            r = rows[i]
            for j in range(n):
                buf[i * n + j] = r[j]
        memset(used, 0, m)
        for i in range(m):
            _normalize(&buf[i * n], n)

        pivots = []
        with nogil:
            for col in range(n):
                best = -1
                bestv = 0
                bestlen = 0
                for i in range(m):
                    if used[i]:
                        continue
                    v = buf[i * n + col]
                    if v:
                        if v < 0:
                            v = -v
                        ln = 0
                        for k in range(n):
                            if buf[i * n + k]:
                                ln += 1
                        if best < 0 or v < bestv or (v == bestv and ln < bestlen):
                            best = i
                            bestv = v
                            bestlen = ln
                if best < 0:
                    continue
                used[best] = 1
                if buf[best * n + col] < 0:
                    for k in range(n):
                        buf[best * n + k] = -buf[best * n + k]
                for i in range(m):
                    if i == best or buf[i * n + col] == 0:
                        continue
                    if _eliminate(&buf[i * n], &buf[best * n], col, n):
                        ovf = 1
                        break
                if ovf:
                    break
                piv_row[rank] = best
                rank += 1
                with gil:
                    pivots.append(col)
        if ovf:
            raise OverflowError("int64 overflow in echelon kernel")
        reduced = []
        for k in range(rank):
            i = piv_row[k]
            reduced.append([buf[i * n + j] for j in range(n)])
        return reduced, pivots
    finally:
        free(buf)
        free(used)
        free(piv_row)
