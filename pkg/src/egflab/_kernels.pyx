# cython: language_level=3
"""Compiled implementations of the hot kernels.

Contracts and outputs are identical to egflab._kernels_py; that module is the
readable reference.  The wins here are the pair tally (C counters, byte-string
memo keys) and the batched matrix test (checked int64 arithmetic with a
per-trial big-integer fallback on overflow)."""

from cpython.bytes cimport PyBytes_FromStringAndSize
from libc.stdint cimport int64_t

cdef extern from *:
    """
    #include <stdint.h>
    static int mul_ovf(int64_t a, int64_t b, int64_t *out) {
        return __builtin_mul_overflow(a, b, out);
    }
    static int add_ovf(int64_t a, int64_t b, int64_t *out) {
        return __builtin_add_overflow(a, b, out);
    }
    static int sub_ovf(int64_t a, int64_t b, int64_t *out) {
        return __builtin_sub_overflow(a, b, out);
    }
    """
    int mul_ovf(int64_t a, int64_t b, int64_t *out)
    int add_ovf(int64_t a, int64_t b, int64_t *out)
    int sub_ovf(int64_t a, int64_t b, int64_t *out)

BACKEND = "cython"

# binomial table up to n = 16, plenty for the int64 fast path
cdef int64_t COMB[17][17]


def _fill_comb():
    from math import comb
    for i in range(17):
        for j in range(17):
            COMB[i][j] = comb(i, j) if j <= i else 0


_fill_comb()


def _pycomb(int a, int b):
    from math import comb
    return comb(a, b)


cdef _comb(int a, int b):
    if a <= 16:
        return COMB[a][b]
    return _pycomb(a, b)


# -- canonical form of a packed matrix under row/column permutations --------


cdef _cf_refine(tuple grouping, tuple row):
    out = []
    for g in grouping:
        if len(g) == 1:
            out.append(g)
            continue
        buckets = {}
        for c in g:
            buckets.setdefault(row[c], []).append(c)
        for v in sorted(buckets):
            out.append(tuple(buckets[v]))
    return tuple(out)


cdef _cf_dfs(tuple rows, int p, int q, list prefix, tuple grouping, list used, list best):
    cdef int i
    if len(prefix) == p * q:
        cand = tuple(prefix)
        if best[0] is None or cand < best[0]:
            best[0] = cand
        return
    readings = [None] * p
    m = None
    for i in range(p):
        if used[i]:
            continue
        r = rows[i]
        reading = tuple([v for g in grouping for v in sorted([r[c] for c in g])])
        readings[i] = reading
        if m is None or reading < m:
            m = reading
    ext = prefix + list(m)
    if best[0] is not None and tuple(ext) > best[0][: len(ext)]:
        return
    seen = set()
    for i in range(p):
        if used[i] or readings[i] != m or rows[i] in seen:
            continue
        seen.add(rows[i])
        used[i] = True
        _cf_dfs(rows, p, q, ext, _cf_refine(grouping, rows[i]), used, best)
        used[i] = False


def canonical_form(rows):
    """Lexicographically least matrix (row-major) over all row and column
    permutations of `rows`.  Same search as the pure version: level by level
    over row positions, columns kept as an ordered partition, only rows with
    the minimal sorted-within-groups reading branched on."""
    rows_t = tuple([tuple(r) for r in rows])
    cdef int p = len(rows_t)
    cdef int q = len(rows_t[0])
    best = [None]
    _cf_dfs(rows_t, p, q, [], (tuple(range(q)),), [False] * p, best)
    flat = best[0]
    return tuple([tuple(flat[i * q : (i + 1) * q]) for i in range(p)])


# -- restricted growth strings and the diagram tally ------------------------


def all_rgs(int n):
    """All restricted growth strings of length n, in lexicographic order."""
    cdef list a = [0] * n
    cdef list m = [0] * n
    cdef int i, j
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] > m[i]:
            i -= 1
        if i == 0:
            return
        a[i] = a[i] + 1
        for j in range(i + 1, n):
            m[j] = m[j - 1] if m[j - 1] >= a[j - 1] else a[j - 1]
            a[j] = 0


def intersection_flat(r1, r2, int n):
    """Flattened intersection matrix of two RGS-encoded partitions."""
    cdef int p = max(r1) + 1
    cdef int q = max(r2) + 1
    flat = [0] * (p * q)
    cdef int x
    for x in range(n):
        flat[r1[x] * q + r2[x]] += 1
    return p, q, flat


def diagram_tally(int n):
    """Map canonical packed matrix -> number of partition pairs producing it.

    The pair loop runs over byte-packed growth strings with a C scratch
    matrix; distinct raw matrices are canonicalized once via a memo."""
    if n > 11:
        # entries would overflow the scratch bytes; unreachable through the
        # guarded public API
        raise ValueError("tally kernel limited to n <= 11")
    cdef list rgs_list = list(all_rgs(n))
    cdef list rbytes = [bytes(r) for r in rgs_list]
    qs_b = bytes([max(r) + 1 for r in rgs_list])
    cdef const unsigned char *qs = qs_b
    cdef int nr = len(rgs_list)
    cdef unsigned char flat[144]
    cdef const unsigned char *r1
    cdef const unsigned char *r2
    cdef int i1, i2, x, i, j, p, q
    cdef dict memo = {}
    cdef dict tally = {}
    for i1 in range(nr):
        r1b = rbytes[i1]
        r1 = r1b
        p = qs[i1]
        for i2 in range(nr):
            r2b = rbytes[i2]
            r2 = r2b
            q = qs[i2]
            for x in range(p * q):
                flat[x] = 0
            for x in range(n):
                flat[r1[x] * q + r2[x]] += 1
            key = (p, q, PyBytes_FromStringAndSize(<char *> flat, p * q))
            canon = memo.get(key)
            if canon is None:
                rows = tuple([
                    tuple([flat[i * q + j] for j in range(q)]) for i in range(p)
                ])
                canon = canonical_form(rows)
                memo[key] = canon
            cnt = tally.get(canon)
            tally[canon] = 1 if cnt is None else cnt + 1
    return tally


# -- exact substitution-with-prefunction test on integer matrices -----------


def swp_exact_int(entries, int n):
    """entries: strictly-lower entries row-major ((1,0),(2,0),(2,1),...).

    True iff the unitriangular integer matrix they define is the matrix of a
    substitution with prefunction.  Big-integer arithmetic, exact."""
    return _swp_obj(entries, n)


cdef bint _swp_obj(entries, int n):
    cdef int i, j, k, m
    if n <= 3:
        return True
    g = [1] + [entries[i * (i - 1) // 2] for i in range(1, n)]
    phi = [0, 1] + [0] * (n - 3)
    for m in range(2, n - 1):
        s = entries[m * (m - 1) // 2 + 1]
        for j in range(1, m):
            s -= _comb(m, j) * phi[j] * g[m - j]
        phi[m] = s
    B = phi + [0]
    for k in range(2, n - 1):
        nb = [0] * n
        for i in range(k, n):
            s = 0
            for j in range(k - 1, i):
                s += _comb(i, j) * B[j] * phi[i - j]
            assert s % k == 0
            nb[i] = s // k
        B = nb
        for i in range(k + 1, n):
            pred = 0
            for j in range(k, i + 1):
                pred += _comb(i, j) * B[j] * g[i - j]
            if pred != entries[i * (i - 1) // 2 + k]:
                return False
    return True


cdef int _batch_obj(flat_entries, int n, int count):
    # entries beyond int64: run every trial through the big-integer path
    cdef Py_ssize_t m = n * (n - 1) // 2
    cdef int hits = 0
    cdef Py_ssize_t t
    for t in range(count):
        seg = [int(x) for x in flat_entries[t * m : (t + 1) * m]]
        if _swp_obj(seg, n):
            hits += 1
    return hits


cdef int _swp_c(const int64_t *ent, int n):
    """Checked int64 version: 1 pass, 0 fail, -1 overflow (retry exactly)."""
    cdef int64_t g[16]
    cdef int64_t phi[16]
    cdef int64_t B[16]
    cdef int64_t nb[16]
    cdef int i, j, k, m
    cdef int64_t s, t, pred
    if n <= 3:
        return 1
    if n > 16:
        return -1
    g[0] = 1
    for i in range(1, n):
        g[i] = ent[i * (i - 1) // 2]
    for i in range(n):
        phi[i] = 0
    phi[1] = 1
    for m in range(2, n - 1):
        s = ent[m * (m - 1) // 2 + 1]
        for j in range(1, m):
            if mul_ovf(COMB[m][j], phi[j], &t):
                return -1
            if mul_ovf(t, g[m - j], &t):
                return -1
            if sub_ovf(s, t, &s):
                return -1
        phi[m] = s
    for i in range(n):
        B[i] = phi[i]
    for k in range(2, n - 1):
        for i in range(n):
            nb[i] = 0
        for i in range(k, n):
            s = 0
            for j in range(k - 1, i):
                if mul_ovf(COMB[i][j], B[j], &t):
                    return -1
                if mul_ovf(t, phi[i - j], &t):
                    return -1
                if add_ovf(s, t, &s):
                    return -1
            if s % k != 0:
                return -1
            nb[i] = s // k
        for i in range(n):
            B[i] = nb[i]
        for i in range(k + 1, n):
            pred = 0
            for j in range(k, i + 1):
                if mul_ovf(COMB[i][j], B[j], &t):
                    return -1
                if mul_ovf(t, g[i - j], &t):
                    return -1
                if add_ovf(pred, t, &pred):
                    return -1
            if pred != ent[i * (i - 1) // 2 + k]:
                return 0
    return 1


def batch_exact_test(flat_entries, int n, int count):
    """Number of trials passing swp_exact_int; flat_entries packs `count`
    strictly-lower entry vectors end to end (int64 buffer or int sequence).

    Trials whose checked int64 evaluation would overflow rerun through the
    big-integer path, so the result is exact for any entry range."""
    cdef const int64_t[::1] buf
    try:
        buf = flat_entries
    except (TypeError, ValueError):
        import array
        try:
            backing = array.array("q", [int(x) for x in flat_entries])
        except OverflowError:
            return _batch_obj(flat_entries, n, count)
        buf = backing
    cdef Py_ssize_t m = n * (n - 1) // 2
    cdef Py_ssize_t t
    cdef int hits = 0
    cdef int res
    if m == 0:
        return count
    for t in range(count):
        res = _swp_c(&buf[t * m], n)
        if res < 0:
            seg = [buf[t * m + i] for i in range(m)]
            res = 1 if _swp_obj(seg, n) else 0
        hits += res
    return hits
