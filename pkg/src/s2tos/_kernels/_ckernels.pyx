# distutils: language = c++
"""Compiled oracle kernels. Must stay in step with _pykernels.py: same loop
order, same floating-point expression order, same tie breaking."""

from libc.math cimport sin, cos, atan, floor
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair

ctypedef pair[double, long] entry

BACKEND = "cython"


cdef inline double _cand(long j, int c, const double[::1] T, const double[:, ::1] exit_t,
                         const long[:, :, ::1] st_idx, const double[:, :, ::1] st_w,
                         const double[:, ::1] scale, double dt) noexcept nogil:
    cdef double e = exit_t[j, c]
    if e >= 0.0:
        return e
    return (dt + (((st_w[j, c, 0] * T[st_idx[j, c, 0]] + st_w[j, c, 1] * T[st_idx[j, c, 1]])
                   + st_w[j, c, 2] * T[st_idx[j, c, 2]]) + st_w[j, c, 3] * T[st_idx[j, c, 3]])) * scale[j, c]


cdef inline int _update(long j, double[::1] T, double[:, ::1] TU, const double[:, ::1] exit_t,
                        const long[:, :, ::1] st_idx, const double[:, :, ::1] st_w,
                        const double[:, ::1] scale, double dt, double* best) noexcept nogil:
    cdef int c, arg = 0
    cdef double v
    for c in range(3):
        TU[j, c] = _cand(j, c, T, exit_t, st_idx, st_w, scale, dt)
    best[0] = TU[j, 0]
    for c in range(1, 3):
        v = TU[j, c]
        if v < best[0]:
            best[0] = v
            arg = c
    return arg


def sl_propagate(double[::1] T, double[:, ::1] TU, signed char[::1] tag,
                 const double[:, ::1] exit_t, const long[:, :, ::1] st_idx,
                 const double[:, :, ::1] st_w, const double[:, ::1] scale, const long[::1] dep_ptr,
                 const long[::1] dep_idx, const long[::1] unknown, double dt):
    """Label-correcting semi-Lagrangian sweep ordered by a min-heap.

    The weight of a node in its own stencil is removed beforehand and folded
    into ``scale`` = 1 / (1 - w_self). Returns the number of heap pops.
    """
    cdef priority_queue[entry] heap
    cdef entry top
    cdef long n_unknown = unknown.shape[0]
    cdef long a, j, i, d, pops = 0
    cdef int arg
    cdef double best, t
    with nogil:
        for a in range(n_unknown):
            j = unknown[a]
            arg = _update(j, T, TU, exit_t, st_idx, st_w, scale, dt, &best)
            if best < T[j]:
                T[j] = best
                tag[j] = arg - 1
                heap.push(entry(-best, -j))
        while not heap.empty():
            top = heap.top()
            heap.pop()
            pops += 1
            t = -top.first
            i = -top.second
            if t > T[i]:
                continue
            for d in range(dep_ptr[i], dep_ptr[i + 1]):
                j = dep_idx[d]
                arg = _update(j, T, TU, exit_t, st_idx, st_w, scale, dt, &best)
                if best < T[j]:
                    T[j] = best
                    tag[j] = arg - 1
                    heap.push(entry(-best, -j))
    return pops


cdef inline void _rot(double sa, double ca, double st, double ct,
                      double p1, double p2, double p3, double* q) noexcept nogil:
    # e^{tX}p with unit axis w = (sa, 0, ca): p cos t + (w x p) sin t + w (w.p)(1 - cos t)
    cdef double wp = sa * p1 + ca * p3
    cdef double oc = 1.0 - ct
    q[0] = (p1 * ct + (-ca * p2) * st) + sa * wp * oc
    q[1] = p2 * ct + (ca * p1 - sa * p3) * st
    q[2] = (p3 * ct + (sa * p2) * st) + ca * wp * oc


cdef inline void _bin(double t, int fam, const double* q, double inv_alpha, double lo1, double lo2,
                      double hc, long nc1, long nc2, double[:, :, ::1] best,
                      double[:, :, :, ::1] arg_pt) noexcept nogil:
    cdef double z1, z2
    cdef long ix, iy
    if q[2] >= 0.0:
        return
    z1 = q[0] * inv_alpha
    z2 = q[1] * inv_alpha
    ix = <long>floor((z1 - lo1) / hc)
    iy = <long>floor((z2 - lo2) / hc)
    if ix < 0 or iy < 0 or ix >= nc1 or iy >= nc2:
        return
    if t < best[ix, iy, fam]:
        best[ix, iy, fam] = t
        arg_pt[ix, iy, fam, 0] = z1
        arg_pt[ix, iy, fam, 1] = z2


def enum_bin(double alpha, int eps_first, const double[::1] s_i, int n_max, int n_sf,
             double lo1, double lo2, double hc, double[:, :, ::1] best,
             double[:, :, :, ::1] arg_pt, double[::1] work):
    """Enumerate bang extremals from N and keep per-cell, per-last-sign minima.

    ``work`` is scratch of length 2 n_sf. Returns the number of endpoints.
    """
    cdef long nc1 = best.shape[0], nc2 = best.shape[1]
    cdef double sa0 = sin(alpha), ca = cos(alpha)
    cdef double kk = 1.0 / (sin(alpha) / cos(alpha)) ** 2
    cdef double inv_alpha = 1.0 / alpha
    cdef double pi = 3.141592653589793
    cdef double s, v, sgn, sa, base_t, t
    cdef double p[3]
    cdef double q[3]
    cdef long a, count = 0
    cdef int n, j, fam
    with nogil:
        for a in range(s_i.shape[0]):
            s = s_i[a]
            v = pi + 2.0 * atan(sin(s) / (cos(s) + kk))
            for j in range(n_sf):
                t = v * (j + 1) / n_sf
                work[2 * j] = sin(t)
                work[2 * j + 1] = cos(t)
            sgn = 1.0 if eps_first > 0 else -1.0
            sa = sgn * sa0
            _rot(sa, ca, sin(s), cos(s), 0.0, 0.0, 1.0, q)
            p[0] = q[0]
            p[1] = q[1]
            p[2] = q[2]
            fam = 1 if sgn > 0 else 0
            _bin(s, fam, q, inv_alpha, lo1, lo2, hc, nc1, nc2, best, arg_pt)
            count += 1
            base_t = s
            for n in range(2, n_max + 1):
                sgn = -sgn
                sa = sgn * sa0
                fam = 1 if sgn > 0 else 0
                for j in range(n_sf):
                    _rot(sa, ca, work[2 * j], work[2 * j + 1], p[0], p[1], p[2], q)
                    t = base_t + v * (j + 1) / n_sf
                    _bin(t, fam, q, inv_alpha, lo1, lo2, hc, nc1, nc2, best, arg_pt)
                count += n_sf
                # advance the base point by a full interior arc
                _rot(sa, ca, sin(v), cos(v), p[0], p[1], p[2], q)
                p[0] = q[0]
                p[1] = q[1]
                p[2] = q[2]
                base_t = base_t + v
    return count
