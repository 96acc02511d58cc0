# Compiled kernels. _pure.py is the reference: enumeration order,
# summation order, and tie handling must match it bit-for-bit.

from libc.stdlib cimport free, malloc

import numpy as np

cdef double NEG_INF = float("-inf")


cdef bint _next_perm(long* a, Py_ssize_t n) noexcept:
    # Lexicographic successor in place; False once a is the last order.
    cdef Py_ssize_t i = n - 2
    cdef Py_ssize_t j, lo, hi
    cdef long tmp
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    tmp = a[i]; a[i] = a[j]; a[j] = tmp
    lo = i + 1
    hi = n - 1
    while lo < hi:
        tmp = a[lo]; a[lo] = a[hi]; a[hi] = tmp
        lo += 1
        hi -= 1
    return True


def best_path_exhaustive(scores):
    cdef double[:, ::1] s = np.ascontiguousarray(scores, dtype=np.float64)
    cdef Py_ssize_t n = s.shape[0]
    if n == 1:
        return [0], 0.0, False
    cdef long* perm = <long*> malloc(n * sizeof(long))
    cdef long* best = <long*> malloc(n * sizeof(long))
    if perm == NULL or best == NULL:
        free(perm); free(best)
        raise MemoryError()
    cdef Py_ssize_t i, k
    cdef double total
    cdef double best_total = NEG_INF
    cdef bint tie = False
    cdef bint first = True
    try:
        for i in range(n):
            perm[i] = i
        while True:
            total = 0.0
            for k in range(n - 1):
                total += s[perm[k], perm[k + 1]]
            if first or total > best_total:
                for i in range(n):
                    best[i] = perm[i]
                best_total = total
                tie = False
                first = False
            elif total == best_total:
                tie = True
            if not _next_perm(perm, n):
                break
        return [best[i] for i in range(n)], best_total, tie
    finally:
        free(perm)
        free(best)


def best_path_greedy(scores):
    cdef double[:, ::1] s = np.ascontiguousarray(scores, dtype=np.float64)
    cdef Py_ssize_t n = s.shape[0]
    if n == 1:
        return [0], 0.0, False
    cdef long* order = <long*> malloc(n * sizeof(long))
    cdef long* best = <long*> malloc(n * sizeof(long))
    cdef unsigned char* visited = <unsigned char*> malloc(n * sizeof(unsigned char))
    if order == NULL or best == NULL or visited == NULL:
        free(order); free(best); free(visited)
        raise MemoryError()
    cdef Py_ssize_t start, step, j, i, last
    cdef Py_ssize_t best_j
    cdef double v, best_s, total
    cdef double best_total = NEG_INF
    cdef bint tie = False
    cdef bint dup
    cdef bint have_best = False
    try:
        for start in range(n):
            for i in range(n):
                visited[i] = 0
            order[0] = start
            visited[start] = 1
            total = 0.0
            last = start
            for step in range(n - 1):
                best_j = -1
                best_s = NEG_INF
                dup = False
                for j in range(n):
                    if visited[j]:
                        continue
                    v = s[last, j]
                    if best_j < 0 or v > best_s:
                        best_j = j
                        best_s = v
                        dup = False
                    elif v == best_s:
                        dup = True
                if dup:
                    tie = True
                visited[best_j] = 1
                order[step + 1] = best_j
                total += best_s
                last = best_j
            if not have_best or total > best_total:
                for i in range(n):
                    best[i] = order[i]
                best_total = total
                have_best = True
            elif total == best_total:
                tie = True
        return [best[i] for i in range(n)], best_total, tie
    finally:
        free(order)
        free(best)
        free(visited)


def path_total(scores, order):
    cdef double[:, ::1] s = np.ascontiguousarray(scores, dtype=np.float64)
    cdef long[::1] o = np.ascontiguousarray(order, dtype=np.int64)
    cdef double total = 0.0
    cdef Py_ssize_t k
    for k in range(1, o.shape[0]):
        total += s[o[k - 1], o[k]]
    return total


cdef long _merge_count(long* a, long* buf, Py_ssize_t lo, Py_ssize_t hi) noexcept:
    # Inversions in a[lo:hi), sorting it in place via buf.
    if hi - lo <= 1:
        return 0
    cdef Py_ssize_t mid = lo + (hi - lo) // 2
    cdef long inv = _merge_count(a, buf, lo, mid) + _merge_count(a, buf, mid, hi)
    cdef Py_ssize_t i = lo, j = mid, k = lo
    while i < mid and j < hi:
        if a[i] <= a[j]:
            buf[k] = a[i]
            i += 1
        else:
            buf[k] = a[j]
            j += 1
            inv += mid - i
        k += 1
    while i < mid:
        buf[k] = a[i]; i += 1; k += 1
    while j < hi:
        buf[k] = a[j]; j += 1; k += 1
    for k in range(lo, hi):
        a[k] = buf[k]
    return inv


def count_inversions(seq):
    cdef long[::1] src = np.ascontiguousarray(seq, dtype=np.int64)
    cdef Py_ssize_t n = src.shape[0]
    if n <= 1:
        return 0
    cdef long* a = <long*> malloc(n * sizeof(long))
    cdef long* buf = <long*> malloc(n * sizeof(long))
    if a == NULL or buf == NULL:
        free(a); free(buf)
        raise MemoryError()
    cdef Py_ssize_t i
    try:
        for i in range(n):
            a[i] = src[i]
        return _merge_count(a, buf, 0, n)
    finally:
        free(a)
        free(buf)
