"""Pure-Python/numpy fallback implementations of the hot kernels.

Same signatures as the compiled extension; selected by ``kernels`` when the
extension is unavailable.  BFS routines work on a bipartite Tanner graph
given as two CSR adjacency arrays (variable node -> check node and back).
"""

from __future__ import annotations

from collections import deque

import numpy as np

UNREACHED = -1


def bfs_vn_to_cns(vn_ptr, vn_cns, cn_ptr, cn_vns, src_vn: int) -> np.ndarray:
    """Distances (in edges) from one VN to every CN; -1 where unreachable."""
    n_vn = len(vn_ptr) - 1
    n_cn = len(cn_ptr) - 1
    dv = np.full(n_vn, UNREACHED, dtype=np.int32)
    dc = np.full(n_cn, UNREACHED, dtype=np.int32)
    dv[src_vn] = 0
    q = deque([src_vn])
    while q:
        u = q.popleft()
        du = dv[u]
        for x in vn_cns[vn_ptr[u] : vn_ptr[u + 1]]:
            if dc[x] == UNREACHED:
                dc[x] = du + 1
                for w in cn_vns[cn_ptr[x] : cn_ptr[x + 1]]:
                    if dv[w] == UNREACHED:
                        dv[w] = du + 2
                        q.append(w)
    return dc


def bfs_ces_cycle(vn_ptr, vn_cns, cn_ptr, cn_vns, Z: int, src_vn: int, cand_cn: int) -> int:
    """Shortest cycle through (c_cand, v_src) once the whole CES is added.

    BFS from v_src to c_cand in the graph plus the candidate cyclic edge set,
    excluding the direct new edge; returns path length + 1, or -1 if no cycle.
    The CES joins v in block n at offset z to the CN at offset (i0 + z) mod Z
    of block m, where (m, i0) locate the candidate and n the source VN block.
    """
    n_vn = len(vn_ptr) - 1
    n_cn = len(cn_ptr) - 1
    n_blk = src_vn // Z
    j0 = src_vn % Z
    m_blk = cand_cn // Z
    i0 = cand_cn % Z
    dv = np.full(n_vn, UNREACHED, dtype=np.int32)
    dc = np.full(n_cn, UNREACHED, dtype=np.int32)
    dv[src_vn] = 0
    qv = deque([src_vn])
    qc: deque[int] = deque()
    while qv or qc:
        # expand in BFS order; both queues are monotone so pop the smaller front
        if qv and (not qc or dv[qv[0]] <= dc[qc[0]]):
            u = qv.popleft()
            du = dv[u]
            nbrs = list(vn_cns[vn_ptr[u] : vn_ptr[u + 1]])
            if u // Z == n_blk:
                z = (u % Z - j0) % Z
                extra = m_blk * Z + (i0 + z) % Z
                if not (u == src_vn and extra == cand_cn):
                    nbrs.append(extra)
            for x in nbrs:
                if dc[x] == UNREACHED:
                    dc[x] = du + 1
                    if x == cand_cn:
                        return du + 1
                    qc.append(x)
        else:
            x = qc.popleft()
            dx = dc[x]
            nbrs = list(cn_vns[cn_ptr[x] : cn_ptr[x + 1]])
            if x // Z == m_blk:
                z = (x % Z - i0) % Z
                nbrs.append(n_blk * Z + (j0 + z) % Z)
            for w in nbrs:
                if dv[w] == UNREACHED:
                    dv[w] = dx + 1
                    qv.append(w)
    return UNREACHED


def spa_decode(
    layer_rows,  # list over layers of int32 row index arrays
    row_ptr,
    cols,
    llr_in,
    max_iters: int,
    clamp: float = 30.0,
):
    """Layered sum-product decoding of one frame.

    Returns (hard_bits uint8, iterations, converged).  Check-to-variable
    messages are recomputed per layer from the pre-layer posteriors; the
    posterior update subtracts the stored previous message for each edge.
    """
    lam = llr_in.astype(np.float64).copy()
    n_edges = len(cols)
    delta = np.zeros(n_edges, dtype=np.float64)
    nrows = len(row_ptr) - 1
    hard = (lam < 0).astype(np.uint8)
    for it in range(1, max_iters + 1):
        for rows in layer_rows:
            lam_snap = lam  # messages in one layer all read the pre-layer posterior
            new_lam = lam.copy()
            for i in rows:
                a, b = row_ptr[i], row_ptr[i + 1]
                cl = cols[a:b]
                mu = np.clip(lam_snap[cl] - delta[a:b], -clamp, clamp)
                t = np.tanh(mu / 2.0)
                signs = np.where(t < 0.0, -1.0, 1.0)
                sign = np.prod(signs)
                logs = np.log(np.maximum(np.abs(t), 1e-300))
                tot = logs.sum()
                prod_excl = signs * sign * np.exp(tot - logs)
                d_new = 2.0 * np.arctanh(np.clip(prod_excl, -0.999999999999, 0.999999999999))
                new_lam[cl] += d_new - delta[a:b]
                delta[a:b] = d_new
            lam = new_lam
        hard = (lam < 0).astype(np.uint8)
        ok = True
        for i in range(nrows):
            if hard[cols[row_ptr[i] : row_ptr[i + 1]]].sum() % 2:
                ok = False
                break
        if ok:
            return hard, it, True
    return hard, max_iters, False
