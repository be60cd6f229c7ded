# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled phrase-pair kernel. Same contract as ``_kernels_py``."""

from libc.stdlib cimport malloc, free


cdef int _scan(int m, int n, int* ylo, int* yhi, int* rlo, int* rhi,
               int* out_j, int* out_a, int* out_b) noexcept nogil:
    # per start i, record the largest j forming a candidate (or -1)
    cdef int i, j, r, lo, hi, new_lo, new_hi, back_lo, back_hi, gap
    for i in range(m):
        out_j[i] = -1
        if ylo[i] < 0:
            continue
        lo = -1
        hi = -1
        back_lo = m
        back_hi = -1
        for j in range(i, m):
            if ylo[j] < 0:
                break
            new_lo = ylo[j] if (lo < 0 or ylo[j] < lo) else lo
            new_hi = yhi[j] if yhi[j] > hi else hi
            gap = 0
            if lo < 0:
                for r in range(new_lo, new_hi + 1):
                    if rlo[r] < 0:
                        gap = 1
                        break
                    if rlo[r] < back_lo:
                        back_lo = rlo[r]
                    if rhi[r] > back_hi:
                        back_hi = rhi[r]
            else:
                for r in range(new_lo, lo):
                    if rlo[r] < 0:
                        gap = 1
                        break
                    if rlo[r] < back_lo:
                        back_lo = rlo[r]
                    if rhi[r] > back_hi:
                        back_hi = rhi[r]
                if not gap:
                    for r in range(hi + 1, new_hi + 1):
                        if rlo[r] < 0:
                            gap = 1
                            break
                        if rlo[r] < back_lo:
                            back_lo = rlo[r]
                        if rhi[r] > back_hi:
                            back_hi = rhi[r]
            if gap or back_lo < i:
                break
            lo = new_lo
            hi = new_hi
            if back_hi <= j:
                out_j[i] = j
                out_a[i] = lo
                out_b[i] = hi
    return 0


def maximal_pairs(int mt_len, int ref_len, links):
    """Containment-maximal consistent, fully covered pairs as inclusive ``(i, j, a, b)``."""
    cdef int m = mt_len, n = ref_len, a, b, i, reach
    if m <= 0 or n <= 0:
        return []
    cdef int* buf = <int*> malloc(sizeof(int) * (4 * n + 7 * m))
    if buf == NULL:
        raise MemoryError()
    cdef int* ylo = buf
    cdef int* yhi = buf + m
    cdef int* rlo = buf + 2 * m
    cdef int* rhi = buf + 2 * m + n
    cdef int* out_j = buf + 2 * m + 2 * n
    cdef int* out_a = buf + 3 * m + 2 * n
    cdef int* out_b = buf + 4 * m + 2 * n
    result = []
    try:
        for i in range(m):
            ylo[i] = -1
            yhi[i] = -1
        for i in range(n):
            rlo[i] = -1
            rhi[i] = -1
        for a, b in links:
            if a < 0 or a >= m or b < 0 or b >= n:
                raise IndexError(f"alignment link {a}-{b} out of bounds for lengths {m}/{n}")
            if ylo[a] < 0 or b < ylo[a]:
                ylo[a] = b
            if b > yhi[a]:
                yhi[a] = b
            if rlo[b] < 0 or a < rlo[b]:
                rlo[b] = a
            if a > rhi[b]:
                rhi[b] = a
        with nogil:
            _scan(m, n, ylo, yhi, rlo, rhi, out_j, out_a, out_b)
        reach = -1
        for i in range(m):
            if out_j[i] > reach:
                result.append((i, out_j[i], out_a[i], out_b[i]))
                reach = out_j[i]
    finally:
        free(buf)
    return result
