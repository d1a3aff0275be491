"""Right-angled hexagons and hexagon chains in the hyperboloid model.

Points live on the upper sheet ``q(x, x) = -1`` and geodesic lines are
represented by unit space-like normals, with the form
``q(u, w) = u0*w0 + u1*w1 - u2*w2``.

Two developing routes are provided.  ``realize_hexagon`` and
``crossing_isometry`` place whole hexagons with one corner at the origin,
which is convenient for moderate geometry.  ``HexagonFeet`` and the
``walk`` helpers move a frame between feet of common perpendiculars, so
that only short hops are composed; the spectrum engine uses those.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .hexagon_trig import _log_cosh, _log_sinh, hexagon_sides

__all__ = [
    "Q",
    "INTERSECTING",
    "ASYMPTOTIC",
    "minkowski",
    "translation",
    "rotation",
    "inverse",
    "is_isometry",
    "reorthonormalize",
    "HexagonRealization",
    "realize_hexagon",
    "line_distance",
    "crossing_isometry",
    "HexagonFeet",
    "walk",
    "FLIP",
    "distance_to_x_axis",
]

log = logging.getLogger(__name__)

Q = np.diag([1.0, 1.0, -1.0])
INTERSECTING = "intersecting"
ASYMPTOTIC = "asymptotic"
ASYMPTOTIC_TOL = 1e-9
ORIGIN = np.array([0.0, 0.0, 1.0])
X_AXIS_NORMAL = np.array([0.0, 1.0, 0.0])


def minkowski(u, w):
    return u[0] * w[0] + u[1] * w[1] - u[2] * w[2]


def translation(d):
    """Translate by ``d`` along the local x-axis."""
    c, s = math.cosh(d), math.sinh(d)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


QUARTER = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
FLIP = np.array([[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]])


def inverse(M):
    return Q @ M.T @ Q


def is_isometry(M, tol=1e-9):
    M = np.asarray(M)
    scale = max(1.0, float(np.max(np.abs(M))) ** 2)
    return bool(np.allclose(M.T @ Q @ M, Q, atol=tol * scale)) and M[2, 2] > 0


def reorthonormalize(M):
    """Nearest-looking orientation-preserving isometry to a drifted product ``M``.

    Small matrices use Gram-Schmidt in Minkowski signature.  Large ones are
    rebuilt as ``R(t1) T(d) R(t2)`` from their last row and column, which
    only reads the large, relatively accurate entries.
    """
    M = np.asarray(M, dtype=float)
    # Gram-Schmidt needs a timelike last column
    if np.max(np.abs(M)) > 3.0 or minkowski(M[:, 2], M[:, 2]) > -0.5:
        t1 = math.atan2(M[1, 2], M[0, 2])
        t2 = math.atan2(-M[2, 1], M[2, 0])
        d = math.asinh(math.hypot(M[0, 2], M[1, 2]))
        return rotation(t1) @ translation(d) @ rotation(t2)
    c0, c1, c2 = (np.array(M[:, k], dtype=float) for k in range(3))
    c2 /= math.sqrt(-minkowski(c2, c2))
    if c2[2] < 0:
        c2 = -c2
    c0 = c0 + minkowski(c0, c2) * c2
    c0 /= math.sqrt(minkowski(c0, c0))
    c1 = c1 + minkowski(c1, c2) * c2 - minkowski(c1, c0) * c0
    c1 /= math.sqrt(minkowski(c1, c1))
    out = np.column_stack([c0, c1, c2])
    if np.linalg.det(out) < 0:
        out[:, 1] = -out[:, 1]
    return out


@dataclass(frozen=True)
class HexagonRealization:
    sides: tuple          # six lengths in slot order
    frames: tuple         # frame k sits at vertex k looking along side k, interior on the left
    normals: np.ndarray   # (6, 3) inward unit normals of the side lines
    vertices: np.ndarray  # (6, 3); vertex k is the start of side k


def realize_hexagon(a, b, c):
    """Place the hexagon with arc-sides ``a, b, c`` on slots 0, 2, 4, vertex 0 at the origin."""
    sides = hexagon_sides(a, b, c)
    frames = [None] * 6
    # frames 0..3 walk forward and 4, 5 backward from vertex 0, so no frame
    # picks up the rounding of a trip around the whole hexagon
    g = np.eye(3)
    for k in range(4):
        frames[k] = g
        g = g @ translation(sides[k]) @ QUARTER
    g = np.eye(3)
    for k in (5, 4):
        g = g @ inverse(translation(sides[k]) @ QUARTER)
        frames[k] = g
    normals = np.array([f @ X_AXIS_NORMAL for f in frames])
    vertices = np.array([f @ ORIGIN for f in frames])
    return HexagonRealization(sides, tuple(frames), normals, vertices)


def line_distance(u, w, tol=ASYMPTOTIC_TOL):
    """Distance between two geodesic lines, or ``INTERSECTING`` / ``ASYMPTOTIC``.

    Lines closer than ``tol * 1e-3`` without crossing are reported as
    asymptotic; the sinh form keeps genuinely short distances resolvable.
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    for v in (u, w):
        if abs(minkowski(v, v) - 1.0) > 1e-9 * max(1.0, float(np.dot(v, v))):
            raise DomainError("line normals must be unit space-like vectors")
    c = abs(minkowski(u, w))
    if c < 1.0 - tol:
        return INTERSECTING
    if c < 2.0:
        # sinh^2 d = q(x, x) for the Lorentz cross product x, better conditioned than c^2 - 1
        x = Q @ np.cross(u, w)
        s2 = minkowski(x, x)
        if c < 1.0 or s2 <= (tol * 1e-3) ** 2:
            return ASYMPTOTIC if abs(c - 1.0) <= tol else INTERSECTING
        return math.asinh(math.sqrt(s2))
    return math.acosh(c)


def crossing_isometry(X, h, s, realizations=None):
    """Isometry placing the neighbour across arc-side ``(h, s)`` next to hexagon ``h``.

    Both hexagons are in their own vertex-0 placement; the returned matrix
    maps the neighbour's placement into the frame of ``h``.
    """
    d = X.decomposition
    if s % 2 or (h, s) not in d.partner:
        raise DomainError(f"slot ({h}, {s}) is not a glued arc-side")
    h2, s2 = d.partner[(h, s)]
    real = realizations or {}
    r1 = real.get(h) or realize_hexagon(*X.hexagon_arc_lengths(h))
    r2 = real.get(h2) or realize_hexagon(*X.hexagon_arc_lengths(h2))
    g = r1.frames[s] @ translation(r1.sides[s]) @ FLIP
    return g @ inverse(r2.frames[s2])


def _asinh_exp(lg):
    """``asinh(exp(lg))`` without overflow."""
    if lg > 20.0:
        return lg + math.log(2.0) + math.log1p(math.exp(-2.0 * lg) / 4.0)
    return math.asinh(math.exp(lg))


@dataclass(frozen=True)
class HexagonFeet:
    """Common perpendiculars of one hexagon.

    ``altitude[i]`` is the distance between side ``i`` and side ``i + 3``;
    ``foot[i]`` is where that perpendicular meets side ``i``, measured from
    the start vertex of side ``i``.
    """

    sides: tuple
    altitude: tuple
    foot: tuple

    @classmethod
    def from_sides(cls, sides):
        alt = []
        foot = []
        for i in range(6):
            a, b, c = sides[i], sides[(i + 2) % 6], sides[(i + 4) % 6]
            la, lb, lc = _log_cosh(a), _log_cosh(b), _log_cosh(c)
            terms = [2.0 * lb, 2.0 * lc, math.log(2.0) + la + lb + lc]
            top = max(terms)
            log_num = top + math.log(sum(math.exp(t - top) for t in terms))
            log_sinh_h = 0.5 * log_num - _log_sinh(a)
            h = _asinh_exp(log_sinh_h)
            alt.append(h)
            foot.append(_asinh_exp(lc - log_sinh_h))
        return cls(tuple(sides), tuple(alt), tuple(foot))

    def hop(self, entry, pos, exit_):
        """Shift ``t`` along ``entry``, perpendicular length ``d`` and arrival position on ``exit_``."""
        k = (exit_ - entry) % 6
        if k == 3:
            return self.foot[entry] - pos, self.altitude[entry], self.foot[exit_]
        if k == 2:
            return self.sides[entry] - pos, self.sides[(entry + 1) % 6], 0.0
        if k == 4:
            return -pos, self.sides[(entry + 5) % 6], self.sides[exit_]
        raise DomainError(f"sides {entry} and {exit_} are adjacent or equal")


def walk(t, d):
    """Frame change: slide ``t`` along the current side, cross a perpendicular of length ``d``.

    The result is the frame on the far side, x-axis along that side in its
    counterclockwise direction and y-axis pointing into the same hexagon.
    """
    ct, st, cd, sd = math.cosh(t), math.sinh(t), math.cosh(d), math.sinh(d)
    # expanded translation(t) @ QUARTER @ translation(d) @ QUARTER
    return np.array([[-ct, -st * sd, st * cd], [0.0, -cd, sd], [-st, -ct * sd, ct * cd]])


def distance_to_x_axis(M):
    """Distance from the x-axis to the image of the x-axis under ``M``.

    Returns ``INTERSECTING`` or ``ASYMPTOTIC`` for degenerate pairs.
    """
    v0, v1, v2 = M[0, 1], M[1, 1], M[2, 1]
    c = abs(v1)
    if c < 1.0 - ASYMPTOTIC_TOL:
        return INTERSECTING
    if c < 2.0:
        s2 = (v2 - v0) * (v2 + v0)
        if s2 <= 0.0:
            return ASYMPTOTIC
        return math.asinh(math.sqrt(s2))
    return math.acosh(c)
