"""Hyperbolic surfaces in arc-length coordinates of a hexagon decomposition.

Any positive length per arc determines a unique hyperbolic surface with
geodesic boundary; the boundary is assembled from the hexagon sides that
are not arcs.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .combinatorics import ARC_SLOTS, BOUNDARY_SLOTS, HexagonDecomposition, decomposition_from_json, \
    decomposition_to_json, validate
from .errors import DomainError
from .hexagon_trig import hexagon_sides

__all__ = [
    "MetricSurface",
    "total_boundary_length",
    "boundary_component_lengths",
    "grad_total_boundary",
    "boundary_lengths_jacobian",
    "Profile",
    "single_variable_profile",
    "surface_to_json",
    "surface_from_json",
]


@dataclass(frozen=True)
class MetricSurface:
    decomposition: HexagonDecomposition
    arc_lengths: tuple

    def __post_init__(self):
        self.decomposition.signature  # validates once per decomposition
        x = tuple(float(v) for v in self.arc_lengths)
        if len(x) != self.decomposition.num_arcs:
            raise DomainError(f"expected {self.decomposition.num_arcs} arc lengths, got {len(x)}")
        if not all(v > 0 and math.isfinite(v) for v in x):
            raise DomainError("arc lengths must be positive and finite")
        object.__setattr__(self, "arc_lengths", x)

    @property
    def signature(self):
        return self.decomposition.signature

    @property
    def x(self):
        return np.array(self.arc_lengths)

    def with_lengths(self, lengths):
        return MetricSurface(self.decomposition, tuple(lengths))

    def hexagon_arc_lengths(self, h):
        return tuple(self.arc_lengths[a] for a in self.decomposition.hexagon_arcs(h))

    def side_lengths(self, h):
        """Six side lengths of hexagon ``h`` in slot order."""
        return hexagon_sides(*self.hexagon_arc_lengths(h))


def total_boundary_length(X):
    """Total boundary length: sum over hexagons of the three non-arc sides."""
    # from lengths rather than cosh-values, which round to 1 for arcs below 1e-8
    total = 0.0
    for h in range(X.decomposition.num_hexagons):
        sides = X.side_lengths(h)
        total += sides[1] + sides[3] + sides[5]
    return total


def _side_sum_slope(x, y, z):
    """d(side sum)/dx for the hexagon with arc-sides x, y, z."""
    # sinh x / (cosh x - 1) = coth(x / 2) and cosh x - 1 = 2 sinh(x / 2)^2 keep short arcs exact
    A, B, C = math.cosh(x), math.cosh(y), math.cosh(z)
    m = max(A, B, C)
    a, b, c = A / m, B / m, C / m
    root = m * math.sqrt(a * a + b * b + c * c + 2.0 * a * b * C - 1.0 / (m * m))
    return (2.0 * math.sinh(0.5 * x) ** 2 - B - C) / (math.tanh(0.5 * x) * root)


def boundary_component_lengths(X):
    """Length of each boundary component, in ``boundary_cycles`` order."""
    sides = {h: X.side_lengths(h) for h in range(X.decomposition.num_hexagons)}
    return np.array([sum(sides[h][t] for h, t in cyc) for cyc in X.decomposition.cycles])


def grad_total_boundary(X):
    d = X.decomposition
    x = X.arc_lengths
    grad = np.zeros(d.num_arcs)
    for h in range(d.num_hexagons):
        arcs = d.hexagon_arcs(h)
        for k, a in enumerate(arcs):
            grad[a] += _side_sum_slope(x[a], x[arcs[(k + 1) % 3]], x[arcs[(k + 2) % 3]])
    return grad


def _opposite_partials(a, b, c, alpha):
    """Derivatives of the side opposite ``a`` with respect to ``(a, b, c)``."""
    sa, sb, sc = math.sinh(a), math.sinh(b), math.sinh(c)
    ca, cb, cc = math.cosh(a), math.cosh(b), math.cosh(c)
    s_alpha = math.sinh(alpha)
    da = sa / (sb * sc * s_alpha)
    db = -(cc + ca * cb) / (sb * sb * sc * s_alpha)
    dc = -(cb + ca * cc) / (sc * sc * sb * s_alpha)
    return da, db, dc


def boundary_lengths_jacobian(X):
    """Jacobian of :func:`boundary_component_lengths`, shape ``(n, num_arcs)``."""
    d = X.decomposition
    x = X.arc_lengths
    J = np.zeros((len(d.cycles), d.num_arcs))
    for h in range(d.num_hexagons):
        arcs = d.hexagon_arcs(h)
        sides = X.side_lengths(h)
        for t in BOUNDARY_SLOTS:
            # odd slot t faces arc slot t+3; its neighbours are slots t+1 and t-1
            opp, n1, n2 = (t + 3) % 6 // 2, (t + 1) % 6 // 2, (t - 1) % 6 // 2
            parts = _opposite_partials(x[arcs[opp]], x[arcs[n1]], x[arcs[n2]], sides[t])
            row = d.cycle_of_slot[(h, t)]
            for k, dv in zip((opp, n1, n2), parts):
                J[row, arcs[k]] += dv
    return J


@dataclass(frozen=True)
class Profile:
    """Total boundary length as a function of one arc, the others held fixed."""

    surface: MetricSurface
    arc: int
    critical_points: tuple  # ((y, "minimum" | "inflection"), ...)

    def __call__(self, y):
        x = list(self.surface.arc_lengths)
        x[self.arc] = y
        return total_boundary_length(self.surface.with_lengths(x))

    def derivative(self, y):
        x = list(self.surface.arc_lengths)
        x[self.arc] = y
        return grad_total_boundary(self.surface.with_lengths(x))[self.arc]


def _other_cosh_pairs(X, arc):
    d = X.decomposition
    pairs = []
    for slot in (d.gluings[arc][0], d.gluings[arc][1]):
        h, s = slot
        others = [math.cosh(X.arc_lengths[d.arc_of_slot[(h, u)]]) for u in ARC_SLOTS if u != s]
        pairs.append(tuple(others))
    return pairs


def _cubic_candidates(cj, ck, cl, cm):
    """Roots ``z > 1`` of the squared critical-point equation after removing ``z = 1``."""
    if math.isclose(cj + ck, cl + cm, rel_tol=1e-13) and math.isclose(cj * ck, cl * cm, rel_tol=1e-13):
        # identical neighbour pairs: both terms share a sign, so only the numerator can vanish
        return [1.0 + cj + ck]
    lhs = P.polymul(P.polypow([-1.0 - cj - ck, 1.0], 2), [cl * cl + cm * cm - 1.0, 2.0 * cl * cm, 1.0])
    rhs = P.polymul(P.polypow([-1.0 - cl - cm, 1.0], 2), [cj * cj + ck * ck - 1.0, 2.0 * cj * ck, 1.0])
    cubic = P.polysub(lhs, rhs)[:4]
    quad, _ = P.polydiv(cubic, [-1.0, 1.0])
    quad = np.pad(quad, (0, 3 - len(quad)))
    c0, c1, c2 = quad
    scale = max(abs(c0), abs(c1), abs(c2))
    if scale == 0.0:
        return []
    if abs(c2) <= 1e-14 * scale:
        return [-c0 / c1] if abs(c1) > 1e-14 * scale else []
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0:
        return []
    r = math.sqrt(disc)
    # numerically stable quadratic roots
    qq = -0.5 * (c1 + math.copysign(r, c1))
    roots = [qq / c2]
    if qq != 0.0:
        roots.append(c0 / qq)
    return sorted(z for z in roots if z > 1.0 + 1e-12)


def _scan_candidates(profile, lo=1e-4, hi=40.0, samples=4000):
    ys = np.geomspace(lo, hi, samples)
    ds = [profile.derivative(float(y)) for y in ys]
    out = []
    for k in range(samples - 1):
        if ds[k] == 0.0 or ds[k] * ds[k + 1] < 0:
            a, b = float(ys[k]), float(ys[k + 1])
            for _ in range(100):
                mid = 0.5 * (a + b)
                if profile.derivative(a) * profile.derivative(mid) <= 0:
                    b = mid
                else:
                    a = mid
            out.append(math.cosh(0.5 * (a + b)))
    return out


def single_variable_profile(X, arc):
    """Restrict total boundary length to arc ``arc`` and locate its critical points.

    For an arc bordering two distinct hexagons the critical points solve a
    cubic in ``cosh y`` with the spurious root ``1`` removed; an arc with both
    sides on one hexagon falls back to a sign scan of the derivative.
    """
    d = X.decomposition
    if not (0 <= arc < d.num_arcs):
        raise DomainError(f"unknown arc id {arc}")
    bare = Profile(X, arc, ())
    (h1, _), (h2, _) = d.gluings[arc]
    if h1 != h2:
        (cj, ck), (cl, cm) = _other_cosh_pairs(X, arc)
        zs = _cubic_candidates(cj, ck, cl, cm)
    else:
        zs = _scan_candidates(bare)
    crit = []
    for z in zs:
        y = math.acosh(z)
        step = 1e-6 * max(1.0, y)
        g = bare.derivative(y)
        dg = (bare.derivative(y + step) - bare.derivative(y - step)) / (2 * step)
        if dg != 0.0:
            y_new = y - g / dg
            if y_new > 0:
                y = y_new
        # squaring admits roots where the two terms agree instead of cancelling
        moved = X.with_lengths([y if i == arc else v for i, v in enumerate(X.arc_lengths)])
        g_scale = float(np.max(np.abs(grad_total_boundary(moved))))
        if abs(bare.derivative(y)) > 1e-7 * max(1.0, g_scale):
            continue
        hh = 1e-3 * max(1.0, y)
        second = bare(y - hh) + bare(y + hh) - 2.0 * bare(y)
        kind = "minimum" if second > 0 else "inflection"
        if not any(abs(y - c[0]) < 1e-9 * max(1.0, y) for c in crit):
            crit.append((float(y), kind))
    if sum(1 for _, k in crit if k == "minimum") > 1:
        best = min(crit, key=lambda c: bare(c[0]))
        crit = [(y, "minimum" if (y, k) == best else "inflection") for y, k in crit]
    return Profile(X, arc, tuple(sorted(crit)))


def surface_to_json(X):
    return decomposition_to_json(X.decomposition, X.arc_lengths)


def surface_from_json(obj):
    """Parse the surface format; ``lengths`` is required here."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    d, lengths = decomposition_from_json(obj)
    if lengths is None:
        raise DomainError("surface JSON needs a 'lengths' field")
    return MetricSurface(d, tuple(lengths))
