"""Exact 3x3 rotation algebra for the bang fields on the sphere.

Everything here is closed form: the Rodrigues exponential, the two bang
generators X+ and X-, the conjugate pair (Theta, Z+, Z-) that collapses two
consecutive bang arcs of equal length into a single rotation, and the
reflection through the x3 axis that swaps the two controls.

Points are plain ``numpy`` arrays of shape ``(3,)`` (or ``(..., 3)`` for
batches); generators and rotations are ``(3, 3)`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORTH = np.array([0.0, 0.0, 1.0])
SOUTH = np.array([0.0, 0.0, -1.0])
MIRROR = np.diag([-1.0, -1.0, 1.0])

AXIS_TOL = 1e-10


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


def _check_alpha(alpha: float, upper: float = np.pi / 2) -> None:
    if not (0.0 < alpha < upper):
        raise DomainError(f"alpha={alpha!r} outside (0, {upper:.6g})")


def axis_length(m: np.ndarray) -> float:
    """Length of the rotation axis of a skew matrix, sqrt(-tr(M^2)/2)."""
    m = np.asarray(m, dtype=float)
    return float(np.sqrt(max(-np.trace(m @ m) / 2.0, 0.0)))


def is_skew(m: np.ndarray) -> bool:
    m = np.asarray(m, dtype=float)
    return m.shape == (3, 3) and bool(np.all(m == -m.T))


def skew(w) -> np.ndarray:
    """Skew matrix of the vector w, so that skew(w) @ x = w x x."""
    w1, w2, w3 = (float(c) for c in w)
    return np.array([[0.0, -w3, w2], [w3, 0.0, -w1], [-w2, w1, 0.0]])


def generators(alpha: float):
    """Return (F, G, X+, X-) for the parameter alpha in (0, pi/2)."""
    _check_alpha(alpha)
    ca, sa = np.cos(alpha), np.sin(alpha)
    f = np.array([[0.0, -ca, 0.0], [ca, 0.0, 0.0], [0.0, 0.0, 0.0]])
    g = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -sa], [0.0, sa, 0.0]])
    return f, g, f + g, f - g


def bang_field(alpha: float, eps: int) -> np.ndarray:
    """X_eps = F + eps G."""
    _, _, xp, xm = generators(alpha)
    return xp if eps > 0 else xm


def rot_exp(y: np.ndarray, t):
    """Rodrigues exponential e^{tY} for a unit-axis skew matrix.

    ``t`` may be a scalar or an array; for arrays the result has shape
    ``t.shape + (3, 3)``.
    """
    y = np.asarray(y, dtype=float)
    if abs(axis_length(y) - 1.0) > AXIS_TOL:
        raise DomainError("generator axis is not of unit length")
    y2 = y @ y
    t = np.asarray(t, dtype=float)
    st = np.sin(t)[..., None, None]
    ct = np.cos(t)[..., None, None]
    out = np.eye(3) + st * y + (1.0 - ct) * y2
    if t.ndim == 0:
        out = out.reshape(3, 3)
    return out


def rot_apply(y: np.ndarray, t, x: np.ndarray) -> np.ndarray:
    """Apply e^{tY} to x without forming the matrix; broadcasts over t and x."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    yx = x @ y.T
    yyx = yx @ y.T
    st = np.sin(t)[..., None]
    ct = np.cos(t)[..., None]
    return x + st * yx + (1.0 - ct) * yyx


@dataclass(frozen=True)
class ConjugatePair:
    """Single-rotation form of the two-arc products e^{tX+}e^{tX-}."""

    t: float
    alpha: float
    theta: float
    b: float
    c: float
    z_plus: np.ndarray
    z_minus: np.ndarray


def conjugate_params(t, alpha: float):
    """Theta(t), B(t), C(t); vectorized over t."""
    t = np.asarray(t, dtype=float)
    sa = np.sin(alpha)
    sh, ch = np.sin(t / 2.0), np.cos(t / 2.0)
    d = np.sqrt(sh * sh * sa * sa + ch * ch)
    b = sa * sh / d
    c = -ch / d
    # arccos(w) loses precision as w -> -1 (t -> 0); use 1 - w^2 = (2 sh cos(alpha) d)^2
    w = sh * sh * np.cos(2.0 * alpha) - ch * ch
    theta = 2.0 * np.arctan2(2.0 * sh * np.cos(alpha) * d, w)
    return theta, b, c


def z_matrices(b: float, c: float):
    """Unit generators Z+ and Z- from the axis components B, C."""
    zp = np.array([[0.0, -c, -b], [c, 0.0, 0.0], [b, 0.0, 0.0]])
    zm = np.array([[0.0, -c, b], [c, 0.0, 0.0], [-b, 0.0, 0.0]])
    return zp, zm


def conjugate_pair(t: float, alpha: float) -> ConjugatePair:
    """Theta(t) and Z+-(t) with e^{Theta Z-} = e^{tX+}e^{tX-}, e^{Theta Z+} = e^{tX-}e^{tX+}."""
    _check_alpha(alpha)
    if not (0.0 <= t < 2.0 * np.pi):
        raise DomainError(f"t={t!r} outside [0, 2pi)")
    theta, b, c = conjugate_params(t, alpha)
    zp, zm = z_matrices(float(b), float(c))
    return ConjugatePair(float(t), float(alpha), float(theta), float(b), float(c), zp, zm)


def z_apply(eps: int, b, c, t, x: np.ndarray) -> np.ndarray:
    """Apply e^{t Z_eps} to x where (B, C) may vary along a batch.

    ``b``, ``c``, ``t`` broadcast against the leading dimensions of ``x``.
    """
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)[..., None]
    c = np.asarray(c, dtype=float)[..., None]
    sgn = -1.0 if eps > 0 else 1.0

    def zmul(v):
        v1, v2, v3 = v[..., 0:1], v[..., 1:2], v[..., 2:3]
        return np.concatenate([-c * v2 + sgn * b * v3, c * v1, -sgn * b * v1], axis=-1)

    zx = zmul(x)
    zzx = zmul(zx)
    t = np.asarray(t, dtype=float)[..., None]
    return x + np.sin(t) * zx + (1.0 - np.cos(t)) * zzx


def mirror_x3(p: np.ndarray, kind: str = "auto") -> np.ndarray:
    """Reflection through the x3 axis.

    Points get (x1, x2) negated; rotations are conjugated by diag(-1, -1, 1).
    With ``kind="auto"`` a (3, 3) input is read as a rotation; pass
    ``kind="point"`` for a batch of three points.
    """
    p = np.asarray(p, dtype=float)
    if kind == "rotation" or (kind == "auto" and p.shape == (3, 3)):
        return MIRROR @ p @ MIRROR
    return p * np.array([-1.0, -1.0, 1.0])


def is_rotation(r: np.ndarray, tol: float = 1e-12) -> bool:
    r = np.asarray(r, dtype=float)
    return bool(
        np.abs(r.T @ r - np.eye(3)).max() <= tol and abs(np.linalg.det(r) - 1.0) <= tol
    )
