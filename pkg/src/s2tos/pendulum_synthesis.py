"""Minimum time synthesis from the circle C(0, rho) for the linearized pendulum.

The planar state z = z1 + i z2 follows dz/dt = i(z + u) with u in [-1, 1],
so bang arcs are rotations about -u. Starting on C(0, rho) with the
feedback u = -sgn(z2(0)), every point of the disk is reached by a single
bang arc. The two families meet along the overlap curve gamma_o, which is
the cut locus.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .extremal_flow import local_optimality_planar
from .so3_kinematics import DomainError

TIME_TOL = 1e-12
TIE_TOL = 1e-9


def _rho_check(rho: float) -> None:
    if not (0.0 < rho <= 2.0):
        raise DomainError("rho must lie in (0, 2]")


def pen_flow(z0: complex, u: float, t):
    """z(t) = (z0 + u) e^{it} - u."""
    return (z0 + u) * np.exp(1j * np.asarray(t, dtype=float)) - u


def source_point(theta, rho: float):
    """Point of C(0, rho) with source angle theta: z(0) = -rho e^{-i theta}."""
    return -rho * np.exp(-1j * np.asarray(theta, dtype=float))


def source_feedback(theta: float, rho: float = 1.0):
    """u = -sgn(z2(0)); returns 0 (flagged ambiguous) where z2(0) = 0."""
    z2 = float(source_point(theta, rho).imag)
    if abs(z2) <= 1e-15 * rho:
        return 0
    return -1 if z2 > 0 else 1


@dataclass(frozen=True)
class ArrivalRecord:
    time: float
    family: int
    theta: float
    admissible: bool


def _arrival_gap(target: complex, u: int, rho: float):
    return lambda t: abs(target + u * (1.0 - np.exp(1j * t))) - rho


def first_arrival(target: complex, u: int, rho: float):
    """First t >= 0 and source angle for the u-family to reach ``target``.

    The start point z0 = (target + u) e^{-it} - u lies on the circle exactly
    when |w - u e^{it}| = rho with w = target + u, i.e. when
    cos(t + phi) = (|w|^2 + 1 - rho^2) / (2|w|) with u conj(w) = |w| e^{i phi}.
    The backward arc is inside the disk while cos(t + phi) exceeds that
    level, so the first exit is the end of the arc containing t = 0. The
    closed form replaces a scan, which misses the short chords near the
    circle.
    """
    f = _arrival_gap(target, u, rho)
    if abs(f(0.0)) <= TIME_TOL:
        return 0.0, _theta_of(target, rho)
    w = complex(target) + u
    aw = abs(w)
    if aw == 0.0:
        return np.inf, np.nan
    c = (aw * aw + 1.0 - rho * rho) / (2.0 * aw)
    if c <= -1.0:
        return np.inf, np.nan
    phi = float(np.angle(u * np.conj(w)))
    a = float(np.arccos(min(c, 1.0)))
    t = float((a - phi) % (2.0 * np.pi))
    # polish on the sign change when a clean bracket exists
    lo, hi = max(t - 1e-9, 0.0), t + 1e-9
    if f(lo) < 0.0 <= f(hi):
        t = brentq(f, lo, hi, xtol=TIME_TOL, rtol=4 * np.finfo(float).eps)
    z0 = pen_flow(target, u, -t)
    return float(t), _theta_of(z0, rho)


def _theta_of(z0: complex, rho: float) -> float:
    # z0 = -rho e^{-i theta}
    return float((-np.angle(-z0 / rho)) % (2.0 * np.pi))


def min_time_from_circle(target: complex, rho: float):
    """Records of the minimizing families; two records on the cut locus."""
    _rho_check(rho)
    target = complex(target)
    if abs(target) > rho * (1.0 + 1e-12):
        raise DomainError("target outside the disk B(0, rho)")
    recs = []
    for u in (-1, 1):
        t, th = first_arrival(target, u, rho)
        adm = np.isfinite(t) and (t == 0.0 or source_feedback(th, rho) in (u, 0))
        recs.append(ArrivalRecord(t, u, th, bool(adm)))
    best = min(r.time for r in recs)
    return [r for r in recs if r.time - best <= TIE_TOL]


def min_time(target: complex, rho: float) -> float:
    return min_time_from_circle(target, rho)[0].time


# -- overlap curve -------------------------------------------------------------


def overlap_locus_residual(z: complex, rho: float) -> float:
    z1, z2 = float(np.real(z)), float(np.imag(z))
    return z1**4 + z2**4 + 2 * z1 * z1 * z2 * z2 - rho * rho * z1 * z1 + (4 - rho * rho) * z2 * z2


def overlap_param(s_prime, rho: float):
    """Meeting time t(s') of the u=+1 arc from the source angle s'."""
    s_prime = np.asarray(s_prime, dtype=float)
    return -2.0 * np.arctan(rho * np.sin(s_prime) / (2.0 - rho * np.cos(s_prime)))


def overlap_point_from_sprime(s_prime, rho: float):
    """(s, t, z) where the arcs from angles s (u=-1) and s' (u=+1) meet."""
    s_prime = np.asarray(s_prime, dtype=float)
    if rho == 2.0:
        # The overlap curve degenerates onto the switching semicircles, which
        # are also the bang arcs into the origin: t = s' - pi, z = 1 + e^{it}.
        t = s_prime - np.pi
        return s_prime - np.pi, t, 1.0 + np.exp(1j * t)
    t = overlap_param(s_prime, rho)
    z = -rho * np.exp(1j * (t - s_prime)) - 1.0 + np.exp(1j * t)
    e = (1.0 - np.exp(1j * t) - z) * np.exp(-1j * t) / rho
    s = np.mod(-np.angle(e), 2.0 * np.pi)
    return s, t, z


def overlap_point(s, rho: float):
    """gamma_o(s): the meeting point as a function of the u=-1 source angle s.

    The reflection z -> -z swaps the families and maps angle s' to s' - pi,
    so gamma_o(s) = -z(s' = s + pi) with the same meeting time.
    """
    s = np.asarray(s, dtype=float)
    _, t, z = overlap_point_from_sprime(s + np.pi, rho)
    return -z, t


def overlap_s_prime(s, rho: float):
    """Source angle s'(s) of the u=+1 arc meeting gamma_o(s)."""
    z, t = overlap_point(s, rho)
    e = (z + 1.0) * np.exp(-1j * t) - 1.0  # = z0 of the u=+1 arc
    return np.mod(-np.angle(-e / rho), 2.0 * np.pi)


def overlap_height(z1, rho: float):
    """z2 on the overlap curve over z1, with z1 z2 >= 0.

    The locus is quadratic in w = z2^2:
    w^2 + (2 z1^2 + 4 - rho^2) w + z1^4 - rho^2 z1^2 = 0.
    """
    z1 = np.asarray(z1, dtype=float)
    b = 2.0 * z1 * z1 + 4.0 - rho * rho
    disc = 16.0 * z1 * z1 + (4.0 - rho * rho) ** 2
    w = np.maximum(0.5 * (-b + np.sqrt(disc)), 0.0)
    return np.sign(z1) * np.sqrt(w)


def side_of_overlap(z: complex, rho: float) -> int:
    """+1 above the overlap curve, -1 below, 0 on it (within 1e-12)."""
    z = complex(z)
    h = float(overlap_height(z.real, rho))
    d = z.imag - h
    if abs(d) <= 1e-12:
        return 0
    return 1 if d > 0 else -1


def feedback(z: complex, rho: float) -> int:
    """Optimal control: -1 above gamma_o, +1 below, 0 on it."""
    return -side_of_overlap(z, rho)


# -- switching semicircles ------------------------------------------------------


@dataclass(frozen=True)
class Semicircle:
    """Arc center + orient e^{i theta}, theta in [0, pi), where extremals
    running with control ``family`` switch."""

    center: float
    orient: float
    family: int
    optimal: bool
    radius: float = 1.0
    theta_range: tuple = (0.0, np.pi)

    def point(self, theta):
        return self.center + self.orient * np.exp(1j * np.asarray(theta, dtype=float))

    def tangent(self, theta):
        return self.orient * 1j * np.exp(1j * np.asarray(theta, dtype=float))


def switching_semicircles(rho: float):
    """Switching loci z = 1 - rho - e^{i theta} (after u = -1) and its image
    under z -> -z (after u = +1). Neither is optimal for rho < 2."""
    _rho_check(rho)
    opt = rho >= 2.0
    return (
        Semicircle(1.0 - rho, -1.0, -1, opt),
        Semicircle(rho - 1.0, 1.0, 1, opt),
    )


def semicircle_verdicts(rho: float, n: int = 64):
    thetas = np.linspace(0.0, np.pi, n + 2)[1:-1]
    out = []
    for sc in switching_semicircles(rho):
        for th in thetas:
            out.append(local_optimality_planar(complex(sc.point(th)), complex(sc.tangent(th))))
    return out


def adjoint_switch_residual(theta: float, rho: float) -> float:
    """Check that the covector lambda(t) = e^{i(t - theta)} switches on the semicircle.

    From source angle theta the control is u = sgn(lambda2) = -sgn(z2(0)),
    lambda2(t) = sin(t - theta) first vanishes at t_sw = theta mod pi, and
    the state reached there must lie on the switching semicircle of that
    family at parameter t_sw. Returns the larger of |lambda2(t_sw)| and the
    distance to that point.
    """
    u = source_feedback(theta, rho)
    if u == 0:
        return 0.0
    t_sw = theta if theta < np.pi else theta - np.pi
    lam2 = np.sin(t_sw - theta)
    z = pen_flow(complex(source_point(theta, rho)), u, t_sw)
    sc = switching_semicircles(rho)[0 if u < 0 else 1]
    return float(max(abs(lam2), abs(z - sc.point(t_sw))))


@dataclass
class PenSynthesis:
    rho: float
    s: np.ndarray
    s_prime: np.ndarray
    t: np.ndarray
    z: np.ndarray
    semicircles: tuple = field(default_factory=tuple)

    def rows(self):
        return [
            (float(a), float(b), float(c), float(d.real), float(d.imag))
            for a, b, c, d in zip(self.s, self.s_prime, self.t, self.z)
        ]


def pendulum_synthesis(rho: float, n: int = 401) -> PenSynthesis:
    _rho_check(rho)
    s = np.linspace(0.0, np.pi, n)
    z, t = overlap_point(s, rho)
    return PenSynthesis(rho, s, overlap_s_prime(s, rho), t, z, switching_semicircles(rho))


def synthesis_grid(rho: float, z1, z2):
    """Rows (z1, z2, u_opt, min_time, on_cut_locus) for points of the disk."""
    rows = []
    for a in np.asarray(z1, dtype=float):
        for b in np.asarray(z2, dtype=float):
            z = complex(a, b)
            if abs(z) > rho:
                continue
            recs = min_time_from_circle(z, rho)
            on_cut = len(recs) == 2
            u = 0 if on_cut else recs[0].family
            rows.append((a, b, u, recs[0].time, int(on_cut)))
    return rows
