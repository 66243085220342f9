# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Tanner-graph BFS and layered SPA decoding.

Mirrors the signatures in ``_kernels_py``; selected by ``kernels`` at import.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport tanh, atanh, log, exp, fabs

cnp.import_array()

UNREACHED = -1


def bfs_vn_to_cns(cnp.int64_t[::1] vn_ptr, cnp.int32_t[::1] vn_cns,
                  cnp.int64_t[::1] cn_ptr, cnp.int32_t[::1] cn_vns,
                  Py_ssize_t src_vn):
    """Distances (in edges) from one VN to every CN; -1 where unreachable."""
    cdef Py_ssize_t n_vn = vn_ptr.shape[0] - 1
    cdef Py_ssize_t n_cn = cn_ptr.shape[0] - 1
    dv_arr = np.full(n_vn, -1, dtype=np.int32)
    dc_arr = np.full(n_cn, -1, dtype=np.int32)
    q_arr = np.empty(n_vn, dtype=np.int64)
    cdef cnp.int32_t[::1] dv = dv_arr
    cdef cnp.int32_t[::1] dc = dc_arr
    cdef cnp.int64_t[::1] q = q_arr
    cdef Py_ssize_t head = 0, tail = 0, u, w
    cdef cnp.int64_t e, f
    cdef cnp.int32_t x, du
    dv[src_vn] = 0
    q[tail] = src_vn
    tail += 1
    while head < tail:
        u = q[head]
        head += 1
        du = dv[u]
        for e in range(vn_ptr[u], vn_ptr[u + 1]):
            x = vn_cns[e]
            if dc[x] == -1:
                dc[x] = du + 1
                for f in range(cn_ptr[x], cn_ptr[x + 1]):
                    w = cn_vns[f]
                    if dv[w] == -1:
                        dv[w] = du + 2
                        q[tail] = w
                        tail += 1
    return dc_arr


def bfs_ces_cycle(cnp.int64_t[::1] vn_ptr, cnp.int32_t[::1] vn_cns,
                  cnp.int64_t[::1] cn_ptr, cnp.int32_t[::1] cn_vns,
                  Py_ssize_t Z, Py_ssize_t src_vn, Py_ssize_t cand_cn):
    """Shortest v_src -> c_cand path once the candidate CES is added, skipping
    the direct edge; -1 when no such path (no cycle) exists."""
    cdef Py_ssize_t n_vn = vn_ptr.shape[0] - 1
    cdef Py_ssize_t n_cn = cn_ptr.shape[0] - 1
    cdef Py_ssize_t n_blk = src_vn // Z, j0 = src_vn % Z
    cdef Py_ssize_t m_blk = cand_cn // Z, i0 = cand_cn % Z
    dv_arr = np.full(n_vn, -1, dtype=np.int32)
    dc_arr = np.full(n_cn, -1, dtype=np.int32)
    # single queue; CN node ids offset by n_vn
    q_arr = np.empty(n_vn + n_cn, dtype=np.int64)
    cdef cnp.int32_t[::1] dv = dv_arr
    cdef cnp.int32_t[::1] dc = dc_arr
    cdef cnp.int64_t[::1] q = q_arr
    cdef Py_ssize_t head = 0, tail = 0, node, u, x, z, extra, w
    cdef cnp.int64_t e
    cdef cnp.int32_t d
    dv[src_vn] = 0
    q[tail] = src_vn
    tail += 1
    while head < tail:
        node = q[head]
        head += 1
        if node < n_vn:
            u = node
            d = dv[u]
            for e in range(vn_ptr[u], vn_ptr[u + 1]):
                x = vn_cns[e]
                if dc[x] == -1:
                    if x == cand_cn:
                        return d + 1
                    dc[x] = d + 1
                    q[tail] = n_vn + x
                    tail += 1
            if u // Z == n_blk:
                z = u % Z - j0
                if z < 0:
                    z += Z
                extra = m_blk * Z + (i0 + z) % Z
                if not (u == src_vn and extra == cand_cn) and dc[extra] == -1:
                    if extra == cand_cn:
                        return d + 1
                    dc[extra] = d + 1
                    q[tail] = n_vn + extra
                    tail += 1
        else:
            x = node - n_vn
            d = dc[x]
            for e in range(cn_ptr[x], cn_ptr[x + 1]):
                w = cn_vns[e]
                if dv[w] == -1:
                    dv[w] = d + 1
                    q[tail] = w
                    tail += 1
            if x // Z == m_blk:
                z = x % Z - i0
                if z < 0:
                    z += Z
                w = n_blk * Z + (j0 + z) % Z
                if dv[w] == -1:
                    dv[w] = d + 1
                    q[tail] = w
                    tail += 1
    return -1


def spa_decode(list layer_rows, cnp.int64_t[::1] row_ptr, cnp.int64_t[::1] cols,
               cnp.float64_t[::1] llr_in, int max_iters, double clamp=30.0):
    """Layered sum-product decoding of one frame; see the fallback docstring."""
    cdef Py_ssize_t n_edges = cols.shape[0]
    cdef Py_ssize_t n_vars = llr_in.shape[0]
    cdef Py_ssize_t nrows = row_ptr.shape[0] - 1
    lam_arr = np.array(llr_in, dtype=np.float64, copy=True)
    snap_arr = np.empty(n_vars, dtype=np.float64)
    delta_arr = np.zeros(n_edges, dtype=np.float64)
    hard_arr = np.zeros(n_vars, dtype=np.uint8)
    t_arr = np.empty(256, dtype=np.float64)
    cdef cnp.float64_t[::1] lam = lam_arr
    cdef cnp.float64_t[::1] snap = snap_arr
    cdef cnp.float64_t[::1] delta = delta_arr
    cdef cnp.uint8_t[::1] hard = hard_arr
    cdef cnp.float64_t[::1] t = t_arr
    cdef cnp.int64_t[::1] rows
    cdef Py_ssize_t it, li, ri, i, e, a, b, w, j
    cdef double mu, prefix, suffix, d_new, v
    cdef int parity, ok
    # widest row determines the scratch size
    cdef Py_ssize_t wmax = 0
    for i in range(nrows):
        if row_ptr[i + 1] - row_ptr[i] > wmax:
            wmax = row_ptr[i + 1] - row_ptr[i]
    if wmax > 256:
        t_arr = np.empty(wmax, dtype=np.float64)
        t = t_arr
    pre_arr = np.empty(wmax + 1, dtype=np.float64)
    cdef cnp.float64_t[::1] pre = pre_arr
    cdef list layers64 = [np.asarray(r, dtype=np.int64) for r in layer_rows]

    for it in range(1, max_iters + 1):
        for li in range(len(layers64)):
            rows = layers64[li]
            for j in range(n_vars):
                snap[j] = lam[j]
            for ri in range(rows.shape[0]):
                i = rows[ri]
                a = row_ptr[i]
                b = row_ptr[i + 1]
                w = b - a
                # prefix/suffix tanh products give each edge's extrinsic product
                pre[0] = 1.0
                for e in range(w):
                    mu = snap[cols[a + e]] - delta[a + e]
                    if mu > clamp:
                        mu = clamp
                    elif mu < -clamp:
                        mu = -clamp
                    t[e] = tanh(mu / 2.0)
                    pre[e + 1] = pre[e] * t[e]
                suffix = 1.0
                for e in range(w - 1, -1, -1):
                    v = pre[e] * suffix
                    suffix *= t[e]
                    if v > 0.999999999999:
                        v = 0.999999999999
                    elif v < -0.999999999999:
                        v = -0.999999999999
                    d_new = 2.0 * atanh(v)
                    lam[cols[a + e]] += d_new - delta[a + e]
                    delta[a + e] = d_new
        for j in range(n_vars):
            hard[j] = 1 if lam[j] < 0.0 else 0
        ok = 1
        for i in range(nrows):
            parity = 0
            for e in range(row_ptr[i], row_ptr[i + 1]):
                parity ^= hard[cols[e]]
            if parity:
                ok = 0
                break
        if ok:
            return hard_arr, it, True
    return hard_arr, max_iters, False
