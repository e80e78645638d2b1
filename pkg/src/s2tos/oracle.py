"""Brute-force minimum-time maps used as ground truth.

pendulum_grid_oracle solves the planar problem on a grid with a
semi-Lagrangian update T(y) = min_u [dt + T(foot_u(y))], where the foot
foot_u(y) = e^{-i dt}(y + u) - u comes from the exact flow. The fixed point
is reached by label correction ordered by a priority queue, seeded from
the circle C(0, rho). The controls u = -1, 0, +1 are all kept, so
bang-bang optimality is an outcome rather than an assumption.

sphere_family_oracle enumerates the bang extremals from the north pole
over a grid of (first sign, s_i, number of arcs, s_f) and keeps, for every
cell of the dilated plane around the south pole, the earliest arrival per
sign of the last arc.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .params import AlphaParam
from .pendulum_synthesis import min_time

BIG = 1e9
BISECT_ITERS = 60
DEFAULT_H = 5e-3
DEFAULT_SI = 2000
DEFAULT_SF = 500


def _backend(name: str | None):
    return _kernels.kernels if name is None else _kernels.get(name)


def thread_count(threads: int | None = None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("S2TOS_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


@dataclass
class GridValueMap:
    """Minimum arrival times on a regular grid.

    For the pendulum the grid points are nodes x = origin + i h; for the
    sphere they are cells [origin + i h, origin + (i + 1) h). ``tags`` holds
    the argmin control (pendulum) or the last-arc sign (sphere).
    """

    kind: str
    origin: tuple
    h: float
    values: np.ndarray
    tags: np.ndarray
    per_control: np.ndarray
    mask: np.ndarray
    dt: float = float("nan")
    stats: dict = field(default_factory=dict)
    arg_points: np.ndarray | None = None

    @property
    def shape(self):
        return self.values.shape

    def centers(self):
        off = 0.0 if self.kind == "pendulum" else 0.5
        xs = self.origin[0] + (np.arange(self.shape[0]) + off) * self.h
        ys = self.origin[1] + (np.arange(self.shape[1]) + off) * self.h
        return xs, ys

    def index_of(self, z: complex):
        z = complex(z)
        if self.kind == "pendulum":
            return int(round((z.real - self.origin[0]) / self.h)), int(round((z.imag - self.origin[1]) / self.h))
        return int(math.floor((z.real - self.origin[0]) / self.h)), int(math.floor((z.imag - self.origin[1]) / self.h))

    def center_of(self, i: int, j: int) -> complex:
        xs, ys = self.centers()
        return complex(xs[i], ys[j])

    def interpolate(self, z: complex) -> float:
        """Bilinear value at z (pendulum node grids)."""
        fi = (complex(z).real - self.origin[0]) / self.h
        fj = (complex(z).imag - self.origin[1]) / self.h
        i, j = int(math.floor(fi)), int(math.floor(fj))
        a, b = fi - i, fj - j
        v = self.values
        return float(
            (1 - a) * (1 - b) * v[i, j] + a * (1 - b) * v[i + 1, j] + (1 - a) * b * v[i, j + 1] + a * b * v[i + 1, j + 1]
        )

    def rows(self):
        xs, ys = self.centers()
        out = []
        for i in range(self.shape[0]):
            for j in range(self.shape[1]):
                if self.mask[i, j] and np.isfinite(self.values[i, j]):
                    out.append((float(xs[i]), float(ys[j]), float(self.values[i, j]), int(self.tags[i, j])))
        return out


# -- pendulum ------------------------------------------------------------------------


def _exit_times(z, u: int, rho: float, dt: float):
    """Smallest tau in (0, dt] with |e^{-i tau}(z + u) - u| >= rho, by bisection."""
    a = np.zeros(z.shape)
    b = np.full(z.shape, dt)
    for _ in range(BISECT_ITERS):
        m = 0.5 * (a + b)
        hit = np.abs(np.exp(-1j * m) * (z + u) - u) >= rho
        b = np.where(hit, m, b)
        a = np.where(hit, a, m)
    return b


def pendulum_grid_oracle(rho: float, grid_h: float = DEFAULT_H, dt: float | None = None, backend: str | None = None):
    """Time map from the circle C(0, rho) for dz/dt = i(z + u), u in {-1, 0, 1}.

    Nodes outside the open disk hold 0. A foot that leaves the disk within
    dt is replaced by the exact exit time of the backward arc.
    """
    if dt is None:
        dt = grid_h
    if not (0.0 < dt <= grid_h):
        raise ValueError("dt must lie in (0, grid_h]")
    n = int(math.ceil(rho / grid_h)) + 2
    xs = np.arange(-n, n + 1) * grid_h
    N = len(xs)
    Z = xs[:, None] + 1j * xs[None, :]
    inside = np.abs(Z) < rho
    unknown = np.flatnonzero(inside.ravel()).astype(np.int64)
    zin = Z.ravel()[unknown]
    m = len(unknown)
    exit_t = np.full((N * N, 3), -1.0)
    st_idx = np.zeros((N * N, 3, 4), dtype=np.int64)
    st_w = np.zeros((N * N, 3, 4))
    scale = np.ones((N * N, 3))
    src, dst = [], []
    for c, u in enumerate((-1, 0, 1)):
        foot = np.exp(-1j * dt) * (zin + u) - u
        out = np.abs(foot) >= rho
        ex = np.where(out, _exit_times(zin, u, rho, dt), -1.0)
        exit_t[unknown, c] = ex
        fi = (foot.real - xs[0]) / grid_h
        fj = (foot.imag - xs[0]) / grid_h
        i0 = np.clip(np.floor(fi).astype(np.int64), 0, N - 2)
        j0 = np.clip(np.floor(fj).astype(np.int64), 0, N - 2)
        wi, wj = fi - i0, fj - j0
        idx = np.stack([i0 * N + j0, (i0 + 1) * N + j0, i0 * N + j0 + 1, (i0 + 1) * N + j0 + 1], axis=1)
        w = np.stack([(1 - wi) * (1 - wj), wi * (1 - wj), (1 - wi) * wj, wi * wj], axis=1)
        # a node inside its own stencil: solve T = dt + w T + rest for T
        own = idx == unknown[:, None]
        w_self = np.where(own, w, 0.0).sum(axis=1)
        w = np.where(own, 0.0, w)
        with np.errstate(divide="ignore"):
            scale[unknown, c] = np.where(w_self < 1.0, 1.0 / (1.0 - w_self), np.inf)
        st_idx[unknown, c] = idx
        st_w[unknown, c] = w
        keep = (~out)[:, None]
        src.append(idx[keep & ~own].ravel())
        dst.append(np.repeat(unknown, 4).reshape(-1, 4)[keep & ~own].ravel())
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    pairs = np.unique(src * (N * N) + dst)
    src, dst = pairs // (N * N), pairs % (N * N)
    dep_ptr = np.zeros(N * N + 1, dtype=np.int64)
    np.add.at(dep_ptr, src + 1, 1)
    dep_ptr = np.cumsum(dep_ptr).astype(np.int64)
    dep_idx = dst.astype(np.int64)

    T = np.where(inside.ravel(), BIG, 0.0)
    TU = np.full((N * N, 3), BIG)
    tag = np.zeros(N * N, dtype=np.int8)
    kern = _backend(backend)
    pops = kern.sl_propagate(T, TU, tag, exit_t, st_idx, st_w, scale, dep_ptr, dep_idx, unknown, float(dt))
    TU[~inside.ravel()] = 0.0
    return GridValueMap(
        "pendulum",
        (float(xs[0]), float(xs[0])),
        float(grid_h),
        T.reshape(N, N),
        tag.reshape(N, N),
        TU.reshape(N, N, 3),
        inside,
        float(dt),
        {"pops": int(pops), "unknowns": int(m), "backend": kern.BACKEND, "rho": float(rho)},
    )


def interior_mask(gm: GridValueMap) -> np.ndarray:
    """Nodes at least 2 (h + dt) inside the circle. Closer to it the
    stencils read the zero boundary values and the local argmin is an
    artifact of the boundary layer."""
    xs, ys = gm.centers()
    r = np.abs(xs[:, None] + 1j * ys[None, :])
    return gm.mask & (r <= gm.stats["rho"] - 2.0 * (gm.h + gm.dt))


def two_family_cells(gm: GridValueMap, interior: bool = True) -> np.ndarray:
    """Nodes where T(u=-1) - T(u=+1) changes sign against a 4-neighbour and
    is within one step (h + dt) of zero."""
    D = gm.per_control[..., 0] - gm.per_control[..., 2]
    ins = interior_mask(gm) if interior else gm.mask
    flag = np.zeros_like(ins)
    band = np.abs(D) <= gm.h + gm.dt
    for ax in (0, 1):
        a = [slice(None), slice(None)]
        b = [slice(None), slice(None)]
        a[ax], b[ax] = slice(0, -1), slice(1, None)
        a, b = tuple(a), tuple(b)
        change = (np.sign(D[a]) != np.sign(D[b])) & ins[a] & ins[b]
        flag[a] |= change & band[a]
        flag[b] |= change & band[b]
    return flag & ins


def strict_zero_control(gm: GridValueMap, margin: float = 0.0, interior: bool = True) -> np.ndarray:
    """Nodes where u = 0 beats both bang controls by more than ``margin``."""
    tu = gm.per_control
    ins = interior_mask(gm) if interior else gm.mask
    return ins & (tu[..., 1] < np.minimum(tu[..., 0], tu[..., 2]) - margin)


def probe_points(rho: float, n: int = 100, seed: int = 0, margin: float = 0.05):
    """Uniform random points of the disk of radius rho - margin."""
    rng = np.random.default_rng(seed)
    r = (rho - margin) * np.sqrt(rng.uniform(0.0, 1.0, n))
    th = rng.uniform(0.0, 2.0 * np.pi, n)
    return r * np.exp(1j * th)


def pendulum_errors(gm: GridValueMap, probes):
    """Oracle minus analytic time at each probe (bilinear oracle value)."""
    rho = gm.stats["rho"]
    return np.array([gm.interpolate(z) - min_time(z, rho) for z in probes])


# -- sphere ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CellBox:
    lo1: float
    lo2: float
    h: float
    n1: int
    n2: int

    @classmethod
    def square(cls, half_width: float, h: float) -> "CellBox":
        """Odd number of cells, one of them centred on the origin."""
        n = 2 * int(math.ceil(half_width / h - 0.5)) + 1
        return cls(-0.5 * n * h, -0.5 * n * h, float(h), n, n)


def sphere_family_oracle(
    alpha: float,
    box: CellBox,
    n_si: int = DEFAULT_SI,
    n_sf: int = DEFAULT_SF,
    n_max: int | None = None,
    threads: int | None = None,
    backend: str | None = None,
) -> GridValueMap:
    """Per-cell earliest arrival over the enumerated bang extremals.

    The s_i grid is pi j / n_si (j = 1..n_si), the last arc s_f runs over
    v j / n_sf (j = 1..n_sf), and the number of arcs over 1..n_max with
    n_max = k_max + 1 by default. Work is split into contiguous s_i shards
    per first sign; each shard fills its own map and the maps are reduced
    in shard order, so the result does not depend on the thread count.
    """
    ap = AlphaParam.from_alpha(alpha)
    if n_max is None:
        n_max = ap.k_max + 1
    if not (1 <= n_max <= ap.k_max + 1):
        raise ValueError(f"n_max must lie in [1, {ap.k_max + 1}]")
    kern = _backend(backend)
    s_grid = np.pi * np.arange(1, n_si + 1) / n_si
    nthreads = thread_count(threads)
    chunks = [c for c in np.array_split(s_grid, nthreads) if len(c)]
    tasks = [(eps, np.ascontiguousarray(c)) for eps in (1, -1) for c in chunks]

    def run(task):
        eps, s_part = task
        best = np.full((box.n1, box.n2, 2), np.inf)
        arg = np.full((box.n1, box.n2, 2, 2), np.nan)
        work = np.empty(2 * n_sf)
        cnt = kern.enum_bin(float(alpha), int(eps), s_part, int(n_max), int(n_sf), box.lo1, box.lo2, box.h, best, arg, work)
        return best, arg, cnt

    if nthreads > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]
    best, arg, total = results[0][0].copy(), results[0][1].copy(), results[0][2]
    for b, a, cnt in results[1:]:
        better = b < best
        best = np.where(better, b, best)
        arg = np.where(better[..., None], a, arg)
        total += cnt
    values = np.minimum(best[..., 0], best[..., 1])
    tags = np.where(best[..., 0] <= best[..., 1], -1, 1).astype(np.int8)
    tags[~np.isfinite(values)] = 0
    return GridValueMap(
        "sphere",
        (box.lo1, box.lo2),
        box.h,
        values,
        tags,
        best,
        np.isfinite(values),
        float(np.pi / n_si),
        {
            "endpoints": int(total),
            "backend": kern.BACKEND,
            "threads": nthreads,
            "alpha": float(alpha),
            "k_max": ap.k_max,
            "n_si": n_si,
            "n_sf": n_sf,
            "n_max": n_max,
        },
        arg,
    )


def cells_on_polyline(gm: GridValueMap, poly, step: float | None = None):
    """Cells crossed by a polyline (complex points), densely resampled."""
    poly = np.asarray(poly, dtype=complex)
    if step is None:
        step = 0.1 * gm.h
    cells = []
    seen = set()
    for a, b in zip(poly[:-1], poly[1:]):
        m = max(1, int(math.ceil(abs(b - a) / step)))
        for t in np.linspace(0.0, 1.0, m, endpoint=False):
            ij = gm.index_of(a + t * (b - a))
            if ij not in seen and 0 <= ij[0] < gm.shape[0] and 0 <= ij[1] < gm.shape[1]:
                seen.add(ij)
                cells.append(ij)
    return cells


def family_switch_cells(gm: GridValueMap, cells):
    """For each cell: both families reach it and the earlier family flips in
    its 3 x 3 neighbourhood, so both are minimizing next to the cell."""
    with np.errstate(invalid="ignore"):
        D = gm.per_control[..., 0] - gm.per_control[..., 1]
    out = []
    for i, j in cells:
        nb = D[max(i - 1, 0) : i + 2, max(j - 1, 0) : j + 2]
        nb = nb[np.isfinite(nb)]
        both = bool(np.isfinite(gm.per_control[i, j]).all())
        out.append(both and nb.size > 0 and nb.min() < 0.0 < nb.max())
    return out


def sphere_probe_errors(gm: GridValueMap, probes, alpha: float):
    """(oracle - synthesis at cell centre) / h and (oracle - synthesis at the
    oracle's own argmin endpoint) for probes inside sigma_alpha. Probes in
    cells the enumeration never reached give nan."""
    from .cut_locus_solver import interior_time

    c_center, at_arg = [], []
    for z in probes:
        i, j = gm.index_of(z)
        if not np.isfinite(gm.values[i, j]) or gm.tags[i, j] == 0:
            # no enumerated endpoint landed in this cell
            c_center.append(np.nan)
            at_arg.append(np.nan)
            continue
        t_c, _, _ = interior_time(gm.center_of(i, j), alpha)
        c_center.append((gm.values[i, j] - t_c) / gm.h)
        fam = 0 if gm.tags[i, j] < 0 else 1
        p = complex(*gm.arg_points[i, j, fam])
        t_a, _, _ = interior_time(p, alpha)
        at_arg.append(gm.values[i, j] - t_a)
    return np.array(c_center), np.array(at_arg)


def sphere_probe_points(alpha: float, n: int = 50, seed: int = 0, shrink: float = 0.9):
    """Random points with |z| < shrink R(arg z) inside sigma_alpha."""
    from .cut_locus_solver import sigma_radius

    rng = np.random.default_rng(seed)
    rmax = float(np.max(sigma_radius(np.linspace(0, 2 * np.pi, 721), alpha)))
    out = []
    while len(out) < n:
        z = complex(*rng.uniform(-rmax, rmax, 2))
        if abs(z) < shrink * float(sigma_radius(np.angle(z), alpha)):
            out.append(z)
    return out
