# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; ``_pykernels`` holds the reference numpy versions."""
import numpy as np

from libc.stdint cimport int32_t, int64_t, uint8_t


def apply_tables(const uint8_t[:, ::1] entries, const int64_t[:, ::1] idx, int base,
                 const int64_t[::1] codes, const int64_t[::1] labels):
    """Apply every table row pointwise at every argument position.

    ``idx[s, p]`` is the row-major table index for tuple ``s`` at coordinate
    ``p``.  The pointwise result is encoded, located in the sorted universe
    ``codes`` and replaced by its carrier label; -1 marks a result outside
    the universe.  Small code spaces use a dense lookup instead of search.
    """
    cdef Py_ssize_t T = entries.shape[0], N = idx.shape[0], m = idx.shape[1]
    cdef Py_ssize_t U = codes.shape[0]
    cdef Py_ssize_t t, s, p, lo, hi, mid
    cdef int64_t code, total = 1
    for p in range(m):
        total *= base
        if total > (1 << 40):
            break
    out = np.empty((T, N), dtype=np.int64)
    cdef int64_t[:, ::1] o = out
    cdef int64_t[::1] lut
    if total <= max(1 << 16, T * N):
        lut_a = np.full(total, -1, dtype=np.int64)
        lut = lut_a
        for lo in range(U):
            lut[codes[lo]] = labels[lo]
        with nogil:
            for t in range(T):
                for s in range(N):
                    code = 0
                    for p in range(m):
                        code = code * base + entries[t, idx[s, p]]
                    o[t, s] = lut[code]
        return out
    with nogil:
        for t in range(T):
            for s in range(N):
                code = 0
                for p in range(m):
                    code = code * base + entries[t, idx[s, p]]
                lo = 0
                hi = U
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if codes[mid] < code:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < U and codes[lo] == code:
                    o[t, s] = labels[lo]
                else:
                    o[t, s] = -1
    return out


cdef inline int32_t _find(int32_t[::1] parent, int32_t x) nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef void _close(const int32_t[:, ::1] cols, int32_t[::1] parent,
                 int32_t[::1] qa, int32_t[::1] qb, Py_ssize_t qlen) nogil:
    # worklist closure: every merged pair is pushed once through every translation;
    # cols[x, k] is the image of x under translation k
    cdef Py_ssize_t P = cols.shape[1], head = 0, k
    cdef int32_t u, v, a, b, ra, rb
    while head < qlen:
        u = qa[head]
        v = qb[head]
        head += 1
        for k in range(P):
            a = cols[u, k]
            b = cols[v, k]
            if a == b:
                continue
            ra = _find(parent, a)
            rb = _find(parent, b)
            if ra != rb:
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
                qa[qlen] = a
                qb[qlen] = b
                qlen += 1


cdef void _canonical(int32_t[::1] parent, int32_t[::1] out, int32_t[::1] seen) nogil:
    cdef Py_ssize_t n = parent.shape[0], x
    cdef int32_t r, nxt = 0
    for x in range(n):
        seen[x] = -1
    for x in range(n):
        r = _find(parent, x)
        if seen[r] < 0:
            seen[r] = nxt
            nxt += 1
        out[x] = seen[r]


def congruence_closure(trans, labels):
    """Smallest equivalence containing ``labels`` and closed under ``trans``.

    ``trans`` holds one translation per row; ``labels`` are in ``range(n)``.
    """
    cdef const int32_t[:, ::1] cols = np.ascontiguousarray(np.asarray(trans, dtype=np.int32).T)
    cdef Py_ssize_t n = cols.shape[0], x
    lab = np.ascontiguousarray(labels, dtype=np.int32)
    cdef int32_t[::1] L = lab
    parent_a = np.arange(n, dtype=np.int32)
    cdef int32_t[::1] parent = parent_a
    qa_a = np.empty(n + 1, dtype=np.int32)
    qb_a = np.empty(n + 1, dtype=np.int32)
    cdef int32_t[::1] qa = qa_a, qb = qb_a
    first_a = np.full(n, -1, dtype=np.int32)
    cdef int32_t[::1] first = first_a
    cdef Py_ssize_t qlen = 0
    for x in range(n):
        if first[L[x]] < 0:
            first[L[x]] = x
        elif _find(parent, x) != _find(parent, first[L[x]]):
            parent[_find(parent, x)] = _find(parent, first[L[x]])
            qa[qlen] = first[L[x]]
            qb[qlen] = x
            qlen += 1
    out_a = np.empty(n, dtype=np.int32)
    seen_a = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] out = out_a, seen = seen_a
    with nogil:
        _close(cols, parent, qa, qb, qlen)
        _canonical(parent, out, seen)
    return out_a


def principal_congruences(trans):
    """Cg(x, y) for every ``x < y``, row by row in lexicographic pair order."""
    cdef const int32_t[:, ::1] cols = np.ascontiguousarray(np.asarray(trans, dtype=np.int32).T)
    cdef Py_ssize_t n = cols.shape[0], x, y, i, row = 0
    out_a = np.empty((n * (n - 1) // 2, n), dtype=np.int32)
    cdef int32_t[:, ::1] out = out_a
    parent_a = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] parent = parent_a
    qa_a = np.empty(n + 1, dtype=np.int32)
    qb_a = np.empty(n + 1, dtype=np.int32)
    cdef int32_t[::1] qa = qa_a, qb = qb_a
    seen_a = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] seen = seen_a
    with nogil:
        for x in range(n):
            for y in range(x + 1, n):
                for i in range(n):
                    parent[i] = i
                parent[y] = x
                qa[0] = x
                qb[0] = y
                _close(cols, parent, qa, qb, 1)
                _canonical(parent, out[row], seen)
                row += 1
    return out_a
