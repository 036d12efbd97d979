"""Compiled inner loops. All randomness is drawn by the callers and passed in."""

import numba as nb
import numpy as np

SLEEPING, ACTIVE, DEAD = 0, 1, 2

_jit = nb.njit(cache=True, nogil=True)


@_jit
def pair_uniform_kernel(n_half, jumps):
    """Partial Fisher-Yates: position i+1 receives a uniform element of perm[i+1:]."""
    perm = np.arange(n_half)
    partner = np.empty(n_half, dtype=np.int64)
    for r in range(n_half // 2):
        i = 2 * r
        j = jumps[r]
        tmp = perm[i + 1]
        perm[i + 1] = perm[j]
        perm[j] = tmp
        a = perm[i]
        b = perm[i + 1]
        partner[a] = b
        partner[b] = a
    return partner


@_jit
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@_jit
def unionfind_labels(n, owner, partner):
    """Component label per vertex (numbered by first vertex) and per edge (x < partner[x])."""
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for x in range(owner.size):
        y = partner[x]
        if x < y:
            a = _find(parent, owner[x])
            b = _find(parent, owner[y])
            if a != b:
                if size[a] < size[b]:
                    a, b = b, a
                parent[b] = a
                size[a] += size[b]
    label = np.full(n, -1, dtype=np.int64)
    root_label = np.full(n, -1, dtype=np.int64)
    ncomp = 0
    for v in range(n):
        r = _find(parent, v)
        if root_label[r] < 0:
            root_label[r] = ncomp
            ncomp += 1
        label[v] = root_label[r]
    edges = np.zeros(ncomp, dtype=np.int64)
    for x in range(owner.size):
        if x < partner[x]:
            edges[label[owner[x]]] += 1
    return label, edges, ncomp


@_jit
def degree_histograms(label, deg, ncomp, dmax):
    """CSR degree histograms per component: offsets, degrees, counts (ascending degree)."""
    n = label.size
    start = np.zeros(ncomp + 1, dtype=np.int64)
    for v in range(n):
        start[label[v] + 1] += 1
    for c in range(ncomp):
        start[c + 1] += start[c]
    fill = start[:-1].copy()
    byc = np.empty(n, dtype=np.int64)
    for v in range(n):
        c = label[v]
        byc[fill[c]] = v
        fill[c] += 1

    scratch = np.zeros(dmax + 1, dtype=np.int64)
    seen = np.empty(dmax + 1, dtype=np.int64)
    off = np.zeros(ncomp + 1, dtype=np.int64)
    hdeg = np.empty(n, dtype=np.int64)
    hcnt = np.empty(n, dtype=np.int64)
    h = 0
    for c in range(ncomp):
        nseen = 0
        for i in range(start[c], start[c + 1]):
            d = deg[byc[i]]
            if scratch[d] == 0:
                seen[nseen] = d
                nseen += 1
            scratch[d] += 1
        ds = np.sort(seen[:nseen])
        for i in range(nseen):
            d = ds[i]
            hdeg[h] = d
            hcnt[h] = scratch[d]
            scratch[d] = 0
            h += 1
        off[c + 1] = h
    return off, hdeg[:h], hcnt[:h]


@_jit
def _remove_living(x, live, pos, st):
    # live[0:S] sleeping, live[S:L] active; st = [S, L]
    p = pos[x]
    S = st[0]
    if p < S:
        q = S - 1
        y = live[q]
        live[p] = y
        pos[y] = p
        live[q] = x
        pos[x] = q
        st[0] = S - 1
        p = q
    q = st[1] - 1
    y = live[q]
    live[p] = y
    pos[y] = p
    live[q] = x
    pos[x] = q
    st[1] = q


@_jit
def _activate(x, live, pos, st):
    p = pos[x]
    q = st[0] - 1
    y = live[q]
    live[p] = y
    pos[y] = p
    live[q] = x
    pos[x] = q
    st[0] = q


@_jit
def explore_kernel(
    deg, first, owner, timed, pair_draws, order, lifetimes, c1_draws, ck_steps, ck_times, dmax
):
    """Steps C1/C2/C3 on lazily revealed half-edges.

    Combinatorial mode takes the C3 partner as ``live[pair_draws[j]]`` at pairing j
    (uniform over the 2m - 1 - 2j living half-edges). Timed mode takes the next
    living half-edge in increasing lifetime order. C1 picks ``live[floor(u * S)]``,
    a uniform sleeping half-edge.
    """
    n = deg.size
    n_half = owner.size
    live = np.arange(n_half)
    pos = np.arange(n_half)
    status = np.zeros(n_half, dtype=np.int8)
    st = np.array([n_half, n_half], dtype=np.int64)
    vsleep = np.zeros(dmax + 1, dtype=np.int64)
    for v in range(n):
        vsleep[deg[v]] += 1

    partner = np.full(n_half, -1, dtype=np.int64)
    label = np.full(n, -1, dtype=np.int64)
    edges = np.zeros(n, dtype=np.int64)
    c1_at = np.empty(c1_draws.size, dtype=np.float64)
    nck = ck_times.size if timed else ck_steps.size
    tr_L = np.zeros(nck, dtype=np.int64)
    tr_S = np.zeros(nck, dtype=np.int64)
    tr_V = np.zeros((nck, dmax + 1), dtype=np.int64)

    comp = -1
    n_c1 = 0
    steps = 0
    t = 0.0
    ck = 0
    p = 0
    while True:
        S = st[0]
        L = st[1]
        if L == S:
            if S == 0:
                break
            x = live[int(c1_draws[n_c1] * S)]
            comp += 1
            c1_at[n_c1] = t if timed else steps
            n_c1 += 1
            v = owner[x]
            label[v] = comp
            vsleep[deg[v]] -= 1
            for y in range(first[v], first[v + 1]):
                status[y] = ACTIVE
                _activate(y, live, pos, st)
        # C2: most recently activated half-edge
        y = live[st[0]]
        _remove_living(y, live, pos, st)
        status[y] = DEAD
        # C3
        if timed:
            while status[order[p]] == DEAD:
                p += 1
            z = order[p]
            tz = lifetimes[z]
            while ck < nck and ck_times[ck] < tz:
                tr_L[ck] = st[1]
                tr_S[ck] = st[0]
                tr_V[ck, :] = vsleep
                ck += 1
            t = tz
        else:
            while ck < nck and ck_steps[ck] <= steps:
                tr_L[ck] = st[1]
                tr_S[ck] = st[0]
                tr_V[ck, :] = vsleep
                ck += 1
            z = live[pair_draws[steps]]
        steps += 1
        partner[y] = z
        partner[z] = y
        edges[comp] += 1
        was = status[z]
        _remove_living(z, live, pos, st)
        status[z] = DEAD
        if was == SLEEPING:
            v = owner[z]
            label[v] = comp
            vsleep[deg[v]] -= 1
            for w in range(first[v], first[v + 1]):
                if w != z:
                    status[w] = ACTIVE
                    _activate(w, live, pos, st)

    while ck < nck:
        tr_L[ck] = st[1]
        tr_S[ck] = st[0]
        tr_V[ck, :] = vsleep
        ck += 1

    # isolated vertices are never reached by C1
    ncomp = comp + 1
    for v in range(n):
        if label[v] < 0:
            label[v] = ncomp
            ncomp += 1
    return partner, label, edges[:ncomp], ncomp, c1_at[:n_c1], tr_L, tr_S, tr_V


@_jit
def explore_batch_kernel(deg, first, owner, timed, pair_draws, order, lifetimes, c1_draws, dmax):
    """Row r of every draw array feeds run r; returns sorted (vertices, edges) per run."""
    runs = c1_draws.shape[0]
    n = deg.size
    out_v = np.zeros((runs, n), dtype=np.int64)
    out_e = np.zeros((runs, n), dtype=np.int64)
    no_steps = np.empty(0, dtype=np.int64)
    no_times = np.empty(0, dtype=np.float64)
    for r in range(runs):
        res = explore_kernel(
            deg, first, owner, timed, pair_draws[r], order[r], lifetimes[r], c1_draws[r],
            no_steps, no_times, dmax,
        )
        label, edges, ncomp = res[1], res[2], res[3]
        verts = np.zeros(ncomp, dtype=np.int64)
        for v in range(n):
            verts[label[v]] += 1
        key = edges * (n + 1) + verts
        idx = np.argsort(-key)
        for i in range(ncomp):
            out_v[r, i] = verts[idx[i]]
            out_e[r, i] = edges[idx[i]]
    return out_v, out_e
