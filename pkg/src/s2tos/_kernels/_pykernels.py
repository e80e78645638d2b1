"""Pure-Python oracle kernels, line for line the algorithms of _ckernels.pyx.

math.sin and friends call the platform libm, as the compiled kernels do, so
both backends agree bit for bit on the same inputs.
"""

from __future__ import annotations

import heapq
import math

BACKEND = "python"


def _update(j, T, TU, exit_t, st_idx, st_w, scale, dt):
    for c in range(3):
        e = exit_t[j][c]
        if e >= 0.0:
            TU[j][c] = e
        else:
            ix, w = st_idx[j][c], st_w[j][c]
            TU[j][c] = (dt + (((w[0] * T[ix[0]] + w[1] * T[ix[1]]) + w[2] * T[ix[2]]) + w[3] * T[ix[3]])) * scale[j][c]
    best, arg = TU[j][0], 0
    for c in range(1, 3):
        if TU[j][c] < best:
            best, arg = TU[j][c], c
    return best, arg


def sl_propagate(T, TU, tag, exit_t, st_idx, st_w, scale, dep_ptr, dep_idx, unknown, dt):
    """Label-correcting semi-Lagrangian sweep ordered by a min-heap."""
    Tl = T.tolist()
    TUl = TU.tolist()
    tagl = tag.tolist()
    ex, si, sw, sc = exit_t.tolist(), st_idx.tolist(), st_w.tolist(), scale.tolist()
    ptr, dep = dep_ptr.tolist(), dep_idx.tolist()
    heap = []
    pops = 0
    for j in unknown.tolist():
        best, arg = _update(j, Tl, TUl, ex, si, sw, sc, dt)
        if best < Tl[j]:
            Tl[j] = best
            tagl[j] = arg - 1
            heapq.heappush(heap, (best, j))
    while heap:
        t, i = heapq.heappop(heap)
        pops += 1
        if t > Tl[i]:
            continue
        for d in range(ptr[i], ptr[i + 1]):
            j = dep[d]
            best, arg = _update(j, Tl, TUl, ex, si, sw, sc, dt)
            if best < Tl[j]:
                Tl[j] = best
                tagl[j] = arg - 1
                heapq.heappush(heap, (best, j))
    T[:] = Tl
    TU[:] = TUl
    tag[:] = tagl
    return pops


def _rot(sa, ca, st, ct, p1, p2, p3):
    wp = sa * p1 + ca * p3
    oc = 1.0 - ct
    return (
        (p1 * ct + (-ca * p2) * st) + sa * wp * oc,
        p2 * ct + (ca * p1 - sa * p3) * st,
        (p3 * ct + (sa * p2) * st) + ca * wp * oc,
    )


def enum_bin(alpha, eps_first, s_i, n_max, n_sf, lo1, lo2, hc, best, arg_pt, work):
    """Enumerate bang extremals from N and keep per-cell, per-last-sign minima."""
    nc1, nc2 = best.shape[0], best.shape[1]
    sa0, ca = math.sin(alpha), math.cos(alpha)
    kk = 1.0 / (math.sin(alpha) / math.cos(alpha)) ** 2
    inv_alpha = 1.0 / alpha
    pi = 3.141592653589793
    count = 0

    def put(t, fam, q):
        if q[2] >= 0.0:
            return
        z1 = q[0] * inv_alpha
        z2 = q[1] * inv_alpha
        ix = int(math.floor((z1 - lo1) / hc))
        iy = int(math.floor((z2 - lo2) / hc))
        if ix < 0 or iy < 0 or ix >= nc1 or iy >= nc2:
            return
        if t < best[ix, iy, fam]:
            best[ix, iy, fam] = t
            arg_pt[ix, iy, fam, 0] = z1
            arg_pt[ix, iy, fam, 1] = z2

    for s in s_i.tolist():
        v = pi + 2.0 * math.atan(math.sin(s) / (math.cos(s) + kk))
        trig = []
        for j in range(n_sf):
            t = v * (j + 1) / n_sf
            trig.append((math.sin(t), math.cos(t)))
        sgn = 1.0 if eps_first > 0 else -1.0
        sa = sgn * sa0
        p = _rot(sa, ca, math.sin(s), math.cos(s), 0.0, 0.0, 1.0)
        put(s, 1 if sgn > 0 else 0, p)
        count += 1
        base_t = s
        for _n in range(2, n_max + 1):
            sgn = -sgn
            sa = sgn * sa0
            fam = 1 if sgn > 0 else 0
            for j in range(n_sf):
                st, ct = trig[j]
                q = _rot(sa, ca, st, ct, p[0], p[1], p[2])
                put(base_t + v * (j + 1) / n_sf, fam, q)
            count += n_sf
            p = _rot(sa, ca, math.sin(v), math.cos(v), p[0], p[1], p[2])
            base_t = base_t + v
    return count
