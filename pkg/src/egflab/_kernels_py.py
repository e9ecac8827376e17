"""Pure-Python implementations of the hot kernels.

Same contracts as the compiled extension egflab._kernels; selected at import
time by egflab._backend when the extension is unavailable (or forced via
EGFLAB_PURE_PYTHON=1).  Everything here is exact integer arithmetic.
"""

from math import comb

BACKEND = "python"


# -- canonical form of a packed matrix under row/column permutations --------


def canonical_form(rows):
    """Lexicographically least matrix (row-major) over all row and column
    permutations of `rows`.

    Greedy branch-and-bound over row positions.  For a fixed row order the
    optimal column order sorts column vectors ascending, so the flattening is
    built level by level: columns are kept as an ordered partition (grouped by
    the values of the rows placed so far), the next row's contribution is its
    values sorted ascending within each group, and only rows achieving the
    minimal contribution are branched on.
    """
    rows = [tuple(r) for r in rows]
    p = len(rows)
    q = len(rows[0])
    best = [None]

    def refine(grouping, row):
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

    def dfs(prefix, grouping, used):
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
            reading = tuple(v for g in grouping for v in sorted(r[c] for c in g))
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
            dfs(ext, refine(grouping, rows[i]), used)
            used[i] = False

    dfs([], (tuple(range(q)),), [False] * p)
    flat = best[0]
    return tuple(tuple(flat[i * q : (i + 1) * q]) for i in range(p))


# -- restricted growth strings and the diagram tally ------------------------


def all_rgs(n):
    """All restricted growth strings of length n, in lexicographic order.

    a[0] = 0 and a[i] <= max(a[0..i-1]) + 1; one string per set partition."""
    a = [0] * n
    m = [0] * n  # m[i] = max(a[0..i-1]); m[0] unused
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] > m[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            m[j] = m[j - 1] if m[j - 1] >= a[j - 1] else a[j - 1]
            a[j] = 0


def intersection_flat(r1, r2, n):
    """Intersection matrix of the partitions encoded by two RGS, flattened
    row-major.  Block numbering by first occurrence, which is exactly the
    sorted-by-least-element block order."""
    p = max(r1) + 1
    q = max(r2) + 1
    flat = [0] * (p * q)
    for x in range(n):
        flat[r1[x] * q + r2[x]] += 1
    return p, q, flat


def diagram_tally(n):
    """Map canonical packed matrix -> number of partition pairs producing it.

    Iterates all B_n^2 ordered pairs; a raw-matrix memo skips repeated
    canonicalizations."""
    rgs_list = list(all_rgs(n))
    memo = {}
    tally = {}
    for r1 in rgs_list:
        for r2 in rgs_list:
            p, q, flat = intersection_flat(r1, r2, n)
            key = (p, q, tuple(flat))
            canon = memo.get(key)
            if canon is None:
                rows = [tuple(flat[i * q : (i + 1) * q]) for i in range(p)]
                canon = canonical_form(rows)
                memo[key] = canon
            tally[canon] = tally.get(canon, 0) + 1
    return tally


# -- exact substitution-with-prefunction test on integer matrices -----------


def swp_exact_int(entries, n):
    """entries: strictly-lower entries row-major ((1,0),(2,0),(2,1),...).

    True iff the unitriangular integer matrix they define is the matrix of a
    substitution with prefunction, i.e. every entry in columns >= 2 agrees
    with the value forced by columns 0 and 1.  Exact integer arithmetic:
    with integer parameters every forced entry is an integer."""
    if n <= 3:
        return True

    def ent(i, j):
        return entries[i * (i - 1) // 2 + j]

    g = [1] + [ent(i, 0) for i in range(1, n)]
    phi = [0, 1] + [0] * (n - 3)  # indices 0..n-2; higher ones never forced
    for m in range(2, n - 1):
        s = ent(m, 1)
        for j in range(1, m):
            s -= comb(m, j) * phi[j] * g[m - j]
        phi[m] = s

    # B holds phi^k/k! in EGF coefficients; exact integers at every k.
    B = phi + [0]  # k = 1, padded to index n-1 (the pad is never read)
    for k in range(2, n - 1):
        nb = [0] * n
        for i in range(k, n):
            s = 0
            for j in range(k - 1, i):
                s += comb(i, j) * B[j] * phi[i - j]
            assert s % k == 0
            nb[i] = s // k
        B = nb
        for i in range(k + 1, n):
            pred = 0
            for j in range(k, i + 1):
                pred += comb(i, j) * B[j] * g[i - j]
            if pred != ent(i, k):
                return False
    return True


def batch_exact_test(flat_entries, n, count):
    """Number of trials passing swp_exact_int; flat_entries packs `count`
    strictly-lower entry vectors end to end (any int sequence type)."""
    m = n * (n - 1) // 2
    hits = 0
    for t in range(count):
        seg = [int(x) for x in flat_entries[t * m : (t + 1) * m]]
        if swp_exact_int(seg, n):
            hits += 1
    return hits
