"""Compiled inner loops: smallest enclosing balls, grid neighbour search,
Čech expansion and ℤ/2 column reduction.

Everything here works on plain numpy arrays so the public modules can stay
in ordinary Python.
"""

import numpy as np
from numba import njit

_EPS = 1e-12
_TINY = 1e-300


# ---------------------------------------------------------------------------
# smallest enclosing ball (Welzl, move-to-front)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _circumball(S, ns, c, out):
    """Ball with the ``ns`` rows of ``S`` on its boundary, centred in their affine hull."""
    d = S.shape[1]
    if ns == 0:
        for a in range(d):
            c[a] = 0.0
        out[0] = -1.0
        return
    p0 = S[0]
    if ns == 1:
        for a in range(d):
            c[a] = p0[a]
        out[0] = 0.0
        return
    k = ns - 1
    V = np.empty((k, d))
    for i in range(k):
        for a in range(d):
            V[i, a] = S[i + 1, a] - p0[a]
    G = np.empty((k, k + 1))
    for i in range(k):
        for j in range(k):
            s = 0.0
            for a in range(d):
                s += V[i, a] * V[j, a]
            G[i, j] = 2.0 * s
        s = 0.0
        for a in range(d):
            s += V[i, a] * V[i, a]
        G[i, k] = s
    # gaussian elimination with partial pivoting; near-zero pivots drop that direction
    scale = 0.0
    for i in range(k):
        if G[i, i] > scale:
            scale = G[i, i]
    lam = np.zeros(k)
    piv_ok = np.ones(k, dtype=np.bool_)
    for col in range(k):
        best = col
        for i in range(col + 1, k):
            if abs(G[i, col]) > abs(G[best, col]):
                best = i
        if best != col:
            for j in range(k + 1):
                tmp = G[col, j]
                G[col, j] = G[best, j]
                G[best, j] = tmp
        if abs(G[col, col]) <= 1e-14 * scale:
            piv_ok[col] = False
            continue
        for i in range(col + 1, k):
            f = G[i, col] / G[col, col]
            if f != 0.0:
                for j in range(col, k + 1):
                    G[i, j] -= f * G[col, j]
    for col in range(k - 1, -1, -1):
        if not piv_ok[col]:
            lam[col] = 0.0
            continue
        s = G[col, k]
        for j in range(col + 1, k):
            s -= G[col, j] * lam[j]
        lam[col] = s / G[col, col]
    for a in range(d):
        s = p0[a]
        for i in range(k):
            s += lam[i] * V[i, a]
        c[a] = s
    r2 = 0.0
    for i in range(ns):
        t = 0.0
        for a in range(d):
            diff = S[i, a] - c[a]
            t += diff * diff
        if t > r2:
            r2 = t
    out[0] = r2


@njit(cache=True)
def _outside(p, c, r2):
    if r2 < 0.0:
        return True
    t = 0.0
    for a in range(p.shape[0]):
        diff = p[a] - c[a]
        t += diff * diff
    return t > r2 * (1.0 + _EPS) + _TINY


@njit(cache=True)
def _mtf(P, ids, S, sid, c, out, cur_sid, cur_ns):
    """Move-to-front Welzl with an explicit stack (depth <= d+1)."""
    k, d = P.shape
    ends = np.empty(d + 2, dtype=np.int64)
    pos = np.empty(d + 2, dtype=np.int64)
    row = np.empty(d)
    level = 0
    ends[0] = k
    pos[0] = 0
    _circumball(S, 0, c, out)
    cur_ns[0] = 0
    while True:
        if level == d + 1 or pos[level] >= ends[level]:
            # return to the caller, then move its current point to the front
            level -= 1
            if level < 0:
                break
            i = pos[level]
            for a in range(d):
                row[a] = P[i, a]
            rid = ids[i]
            for q in range(i, 0, -1):
                for a in range(d):
                    P[q, a] = P[q - 1, a]
                ids[q] = ids[q - 1]
            for a in range(d):
                P[0, a] = row[a]
            ids[0] = rid
            pos[level] = i + 1
            continue
        i = pos[level]
        if _outside(P[i], c, out[0]):
            for a in range(d):
                S[level, a] = P[i, a]
            sid[level] = ids[i]
            level += 1
            ends[level] = i
            pos[level] = 0
            _circumball(S, level, c, out)
            for a in range(level):
                cur_sid[a] = sid[a]
            cur_ns[0] = level
        else:
            pos[level] = i + 1


@njit(cache=True)
def miniball_sq(X):
    """Squared radius of the smallest ball enclosing the rows of ``X``.

    The final radius is recomputed from the support set in input order so the
    same support always yields bit-identical values.
    """
    k, d = X.shape
    if k == 1:
        return 0.0
    if k == 2:
        t = 0.0
        for a in range(d):
            diff = 0.5 * (X[1, a] - X[0, a])
            t += diff * diff
        return t
    P = X.copy()
    ids = np.arange(k)
    S = np.empty((d + 1, d))
    sid = np.empty(d + 1, dtype=np.int64)
    cur_sid = np.empty(d + 1, dtype=np.int64)
    cur_ns = np.zeros(1, dtype=np.int64)
    c = np.empty(d)
    out = np.empty(1)
    _mtf(P, ids, S, sid, c, out, cur_sid, cur_ns)
    ns = cur_ns[0]
    if ns == 2:
        a0 = min(cur_sid[0], cur_sid[1])
        a1 = max(cur_sid[0], cur_sid[1])
        t = 0.0
        for a in range(d):
            diff = 0.5 * (X[a1, a] - X[a0, a])
            t += diff * diff
        return t
    order = np.sort(cur_sid[:ns])
    for i in range(ns):
        for a in range(d):
            S[i, a] = X[order[i], a]
    _circumball(S, ns, c, out)
    return out[0]


# ---------------------------------------------------------------------------
# neighbour search on a uniform grid
# ---------------------------------------------------------------------------


@njit(cache=True)
def _cell_key(cell, strides):
    key = 0
    for a in range(cell.shape[0]):
        key += cell[a] * strides[a]
    return key


@njit(cache=True, nogil=True)
def grid_pairs(X, cell_size, cutoff2):
    """All pairs ``i < j`` with squared distance ``<= cutoff2``.

    Points are binned in cells of side ``cell_size`` (at least the cutoff
    distance), so only the 3^d surrounding cells need scanning.
    """
    n, d = X.shape
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    lo = np.empty(d)
    for a in range(d):
        lo[a] = X[0, a]
        for i in range(n):
            if X[i, a] < lo[a]:
                lo[a] = X[i, a]
    cells = np.empty((n, d), dtype=np.int64)
    ext = np.zeros(d, dtype=np.int64)
    for i in range(n):
        for a in range(d):
            q = np.int64(np.floor((X[i, a] - lo[a]) / cell_size))
            cells[i, a] = q
            if q > ext[a]:
                ext[a] = q
    strides = np.empty(d, dtype=np.int64)
    s = 1
    for a in range(d):
        strides[a] = s
        s *= ext[a] + 3
    keys = np.empty(n, dtype=np.int64)
    for i in range(n):
        keys[i] = _cell_key(cells[i] + 1, strides)
    order = np.argsort(keys, kind="mergesort")
    skeys = keys[order]
    # neighbour offsets in key space
    n_off = 3**d
    offs = np.empty(n_off, dtype=np.int64)
    for t in range(n_off):
        rem = t
        key = 0
        for a in range(d):
            key += ((rem % 3) - 1) * strides[a]
            rem //= 3
        offs[t] = key
    cap = max(16, 8 * n)
    out = np.empty((cap, 2), dtype=np.int64)
    m = 0
    for i in range(n):
        ki = keys[i]
        for t in range(n_off):
            kk = ki + offs[t]
            left = np.searchsorted(skeys, kk)
            q = left
            while q < n and skeys[q] == kk:
                j = order[q]
                if j > i:
                    dist = 0.0
                    for a in range(d):
                        diff = X[i, a] - X[j, a]
                        dist += diff * diff
                    if dist <= cutoff2:
                        if m == cap:
                            cap *= 2
                            grown = np.empty((cap, 2), dtype=np.int64)
                            grown[:m] = out[:m]
                            out = grown
                        out[m, 0] = i
                        out[m, 1] = j
                        m += 1
                q += 1
    res = out[:m].copy()
    # lexicographic order on (i, j)
    o = np.argsort(res[:, 0] * n + res[:, 1], kind="mergesort")
    return res[o]


# ---------------------------------------------------------------------------
# Čech expansion
# ---------------------------------------------------------------------------


@njit(cache=True)
def _has_edge(adj_ptr, adj, u, v):
    lo = adj_ptr[u]
    hi = adj_ptr[u + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        if adj[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo < adj_ptr[u + 1] and adj[lo] == v


@njit(cache=True, nogil=True)
def expand_level(X, simp, vals, adj_ptr, adj, r2, budget):
    """Cofaces obtained by appending one higher-index vertex to each row of ``simp``.

    ``adj`` is the symmetric sorted neighbour list of the 1-skeleton. A coface
    is kept when its squared miniball radius is ``<= r2``; its stored value is
    the max of that radius and the parent's value so the filtration stays
    monotone. Returns ``(simplices, values, overflow)``.
    """
    m, k = simp.shape
    d = X.shape[1]
    cap = max(16, 2 * m)
    out = np.empty((cap, k + 1), dtype=np.int64)
    ov = np.empty(cap)
    cnt = 0
    pts = np.empty((k + 1, d))
    for s in range(m):
        last = simp[s, k - 1]
        for q in range(adj_ptr[last], adj_ptr[last + 1]):
            w = adj[q]
            if w <= last:
                continue
            ok = True
            for t in range(k - 1):
                if not _has_edge(adj_ptr, adj, simp[s, t], w):
                    ok = False
                    break
            if not ok:
                continue
            for t in range(k):
                for a in range(d):
                    pts[t, a] = X[simp[s, t], a]
            for a in range(d):
                pts[k, a] = X[w, a]
            v2 = miniball_sq(pts)
            if v2 > r2:
                continue
            val = np.sqrt(v2)
            if vals[s] > val:
                val = vals[s]
            if cnt == cap:
                cap *= 2
                grown = np.empty((cap, k + 1), dtype=np.int64)
                grown[:cnt] = out[:cnt]
                out = grown
                gv = np.empty(cap)
                gv[:cnt] = ov[:cnt]
                ov = gv
            for t in range(k):
                out[cnt, t] = simp[s, t]
            out[cnt, k] = w
            ov[cnt] = val
            cnt += 1
            if cnt > budget:
                return out[:cnt].copy(), ov[:cnt].copy(), True
    return out[:cnt].copy(), ov[:cnt].copy(), False


@njit(cache=True, nogil=True)
def edge_values(X, pairs, r2):
    """Miniball radii of candidate pairs; returns (kept pairs, values)."""
    m = pairs.shape[0]
    keep = np.zeros(m, dtype=np.bool_)
    vals = np.empty(m)
    d = X.shape[1]
    pts = np.empty((2, d))
    for e in range(m):
        for a in range(d):
            pts[0, a] = X[pairs[e, 0], a]
            pts[1, a] = X[pairs[e, 1], a]
        v2 = miniball_sq(pts)
        vals[e] = np.sqrt(v2)
        keep[e] = v2 <= r2
    return pairs[keep], vals[keep]


# ---------------------------------------------------------------------------
# boundary matrices and ℤ/2 reduction
# ---------------------------------------------------------------------------


@njit(cache=True)
def _lex_less(A, i, row):
    for t in range(A.shape[1]):
        if A[i, t] < row[t]:
            return True
        if A[i, t] > row[t]:
            return False
    return False


@njit(cache=True, nogil=True)
def face_indices(faces, cofaces):
    """Row index in the lexicographically sorted ``faces`` of every facet of every coface.

    Output has shape ``(len(cofaces), k+1)``; -1 marks a missing facet.
    """
    m, kp1 = cofaces.shape
    nf = faces.shape[0]
    out = np.empty((m, kp1), dtype=np.int64)
    facet = np.empty(kp1 - 1, dtype=np.int64)
    for s in range(m):
        for drop in range(kp1):
            p = 0
            for t in range(kp1):
                if t != drop:
                    facet[p] = cofaces[s, t]
                    p += 1
            lo = 0
            hi = nf
            while lo < hi:
                mid = (lo + hi) >> 1
                if _lex_less(faces, mid, facet):
                    lo = mid + 1
                else:
                    hi = mid
            found = lo < nf
            if found:
                for t in range(kp1 - 1):
                    if faces[lo, t] != facet[t]:
                        found = False
                        break
            out[s, drop] = lo if found else -1
    return out


@njit(cache=True, nogil=True)
def reduce_columns(col_ptr, col_idx, col_dim, max_dim, clearing):
    """Standard ℤ/2 column reduction of a filtered boundary matrix.

    Columns are already in filtration order and their row indices sorted
    ascending. Dimensions are processed from the top down; with ``clearing``
    a column whose index is the pivot of a reduced higher column is skipped
    (it must reduce to zero). Returns ``pivot_col`` where ``pivot_col[i]`` is
    the column killing row ``i`` (or -1).
    """
    m = col_ptr.shape[0] - 1
    pivot_col = np.full(m, -1, dtype=np.int64)
    cleared = np.zeros(m, dtype=np.bool_)
    store_ptr = np.full(m, -1, dtype=np.int64)
    store_len = np.zeros(m, dtype=np.int64)
    cap = max(1024, 4 * col_idx.shape[0])
    buf = np.empty(cap, dtype=np.int64)
    used = 0
    work = np.empty(64, dtype=np.int64)
    tmp = np.empty(64, dtype=np.int64)
    for dim in range(max_dim, 0, -1):
        for j in range(m):
            if col_dim[j] != dim:
                continue
            if clearing and cleared[j]:
                continue
            wl = col_ptr[j + 1] - col_ptr[j]
            if wl == 0:
                continue
            if work.shape[0] < wl:
                work = np.empty(2 * wl, dtype=np.int64)
            for t in range(wl):
                work[t] = col_idx[col_ptr[j] + t]
            while wl > 0:
                p = work[wl - 1]
                k = pivot_col[p]
                if k == -1:
                    break
                # work ^= stored column k (both sorted ascending)
                s0 = store_ptr[k]
                sl = store_len[k]
                need = wl + sl
                if tmp.shape[0] < need:
                    tmp = np.empty(2 * need, dtype=np.int64)
                a = 0
                b = 0
                o = 0
                while a < wl and b < sl:
                    x = work[a]
                    y = buf[s0 + b]
                    if x < y:
                        tmp[o] = x
                        a += 1
                        o += 1
                    elif y < x:
                        tmp[o] = y
                        b += 1
                        o += 1
                    else:
                        a += 1
                        b += 1
                while a < wl:
                    tmp[o] = work[a]
                    a += 1
                    o += 1
                while b < sl:
                    tmp[o] = buf[s0 + b]
                    b += 1
                    o += 1
                swap = work
                work = tmp
                tmp = swap
                wl = o
            if wl > 0:
                p = work[wl - 1]
                pivot_col[p] = j
                if clearing:
                    cleared[p] = True
                if used + wl > cap:
                    cap = 2 * (used + wl)
                    grown = np.empty(cap, dtype=np.int64)
                    grown[:used] = buf[:used]
                    buf = grown
                store_ptr[j] = used
                store_len[j] = wl
                for t in range(wl):
                    buf[used + t] = work[t]
                used += wl
    return pivot_col


@njit(cache=True)
def union_find_components(n, edges):
    parent = np.arange(n)
    comps = n
    for e in range(edges.shape[0]):
        a = edges[e, 0]
        b = edges[e, 1]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
            comps -= 1
    return comps
