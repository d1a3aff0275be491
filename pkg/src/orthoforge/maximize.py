"""Max-min optimization of the orthosystole in arc-length coordinates.

The objective is the minimum over a candidate set of orthogeodesic classes:
every decomposition arc (length = coordinate) plus the non-arc classes the
spectrum reports near the current minimum, each re-measured along its fixed
crossing sequence.  The arcs alone do not suffice: on a level set of the
total boundary length the shortest arc is unbounded once the arcs are very
unequal, while other classes become short.

When a class crossing a single arc becomes shorter than that arc, the arc
is flipped: the decomposition changes, the surface does not.  The optimum
is then reported in the decomposition its orthosystoles cut out.

The non-smooth ``min`` is replaced by a softmin whose temperature is
annealed; feasibility is kept by Newton (one constraint) or Gauss-Newton
(one per boundary component) restoration.  A final active-set step sets the
near-shortest arcs exactly equal.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .combinatorics import fills, flip_arc, validate
from .errors import ConvergenceError, DomainError, OrthoforgeError
from .hexagon_trig import bavard_bound, equal_boundary_bound, validate_signature
from .metric import MetricSurface, boundary_component_lengths, boundary_lengths_jacobian, grad_total_boundary, \
    total_boundary_length
from .spectrum import _feet, class_length, default_threads, enumerate_orthogeodesics, orthosystole_arcs, \
    orthosystole_report

__all__ = [
    "OptimizationInfo",
    "softmin",
    "maximize_total_constraint",
    "maximize_fixed_boundaries",
    "multistart_total_constraint",
    "random_start",
    "certify_local_max",
    "theorem_b_lower_bound",
]

log = logging.getLogger(__name__)

TEMPERATURES = tuple(10.0 ** -k for k in range(1, 7))
MAX_ARC = 300.0  # beyond this the closed forms overflow; no optimum lives there


@dataclass
class OptimizationInfo:
    iterations: int = 0
    restorations: int = 0
    objective: list = field(default_factory=list)  # softmin value after each accepted step
    segments: list = field(default_factory=list)   # indices into objective where a stage or a flip starts
    candidates: int = 0                            # non-arc classes tracked at the end
    flips: int = 0                                 # arcs replaced by a shorter crossing diagonal
    spread: float = math.nan
    residual: float = math.nan
    active: tuple = ()


def softmin(x, tau):
    """Smooth lower approximation ``-tau log sum exp(-x / tau)`` of ``min x`` and its gradient."""
    x = np.asarray(x, dtype=float)
    m = x.min()
    w = np.exp(-(x - m) / tau)
    s = w.sum()
    return m - tau * math.log(s), w / s


def _surface(d, x):
    return MetricSurface(d, tuple(x))


def _F(d, x):
    """Total boundary length, ``inf`` where the formulas overflow (huge trial steps)."""
    try:
        return total_boundary_length(_surface(d, x))
    except (OverflowError, ValueError):
        return math.inf


def _solve_along(d, x, L, direction, tol):
    """Move ``x`` along ``direction`` until the total boundary length is ``L``; ``None`` on failure."""
    direction = np.asarray(direction, dtype=float)
    s = 0.0
    for _ in range(60):
        y = x + s * direction
        if np.any(y <= 0) or np.any(y > MAX_ARC):
            return None
        r = _F(d, y) - L
        if abs(r) <= tol:
            return y
        if not math.isfinite(r):
            return None
        slope = float(grad_total_boundary(_surface(d, y)) @ direction)
        if slope == 0.0 or not math.isfinite(slope):
            return None
        step = -r / slope
        # backtrack to stay in the positive orthant and to reduce the residual
        for _ in range(60):
            z = x + (s + step) * direction
            if np.all(z > 0) and np.all(z < MAX_ARC) and abs(_F(d, z) - L) < abs(r):
                break
            step *= 0.5
        else:
            return None
        s += step
    return None


def _restore_total(d, x, L, tol, info):
    """Enforce ``F = L``: first along the longest arc, then along the full gradient."""
    info.restorations += 1
    if np.any(x <= 0) or np.any(x > MAX_ARC):
        return None
    g = grad_total_boundary(_surface(d, x))
    if not np.all(np.isfinite(g)):
        return None
    N = int(np.argmax(x))
    e = np.zeros_like(x)
    e[N] = 1.0
    if abs(g[N]) > 1e-3 * np.linalg.norm(g):
        y = _solve_along(d, x, L, e, tol)
        if y is not None:
            return y
    return _solve_along(d, x, L, g / np.linalg.norm(g), tol)


def _project_shift(d, x, L, tol):
    """Shift every arc by the same amount onto ``F = L``.

    Uniform scaling is not monotone when arcs are very unequal; a common
    shift sends ``F`` from infinity (shortest arc near 0) down to 0.
    """
    def resid(s):
        return _F(d, x + s) - L

    lo = -x.min() * (1.0 - 1e-9)
    hi = 1.0
    while resid(hi) > 0:
        hi *= 2.0
        if x.max() + hi > MAX_ARC:
            raise DomainError("cannot project the start onto the total-length constraint")
    if not resid(lo) > 0:
        raise DomainError("cannot project the start onto the total-length constraint")
    s = brentq(resid, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    y = x + s
    return _solve_along(d, y, L, np.ones_like(y), tol) if abs(_F(d, y) - L) > tol else y


def random_start(d, rng, low=0.1, high=3.0):
    """Log-uniform arc lengths in ``[low, high]``."""
    return np.exp(rng.uniform(math.log(low), math.log(high), d.num_arcs))


def _equalize_total(d, x, L, tol, eps):
    """Set the arcs within ``eps`` of the minimum to a common value, fixing ``F = L``."""
    m = x.min()
    active = x <= m + eps

    def resid(t):
        y = np.where(active, t, x)
        return _F(d, y) - L

    others = x[~active]
    hi_cap = others.min() if others.size else x.max() * 4.0 + 1.0
    lo = m * 0.5
    try:
        if resid(lo) * resid(hi_cap) >= 0:
            return None, active
        t = brentq(resid, lo, hi_cap, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    except ValueError:
        return None, active
    y = np.where(active, t, x)
    if abs(_F(d, y) - L) > tol:
        return None, active
    return y, active


class _Candidates:
    """Arcs plus tracked non-arc classes; values, softmin and its gradient."""

    def __init__(self, d, ordered_boundaries=False):
        self.d = d
        self.paths = []
        self._cache = None
        # fixed-boundary runs need the boundary components to keep their numbering
        self.ordered_boundaries = ordered_boundaries

    def refresh(self, x, factor=1.5):
        X = _surface(self.d, x)
        cutoff = factor * float(self.values(x).min())
        try:
            rep = enumerate_orthogeodesics(X, cutoff)
        except OrthoforgeError as exc:
            log.debug("candidate refresh skipped: %s", exc)
            return False
        known = set(self.paths)
        new = [c.crossings for c in rep.classes if c.crossings and c.crossings not in known]
        self.paths.extend(new)
        return bool(new)

    def flip(self, x, info, rel=1e-9):
        """Flip arcs longer than their crossing diagonal until none is; returns the new coordinates.

        Every flip shortens one arc, so the loop terminates.
        """
        while True:
            X = _surface(self.d, x)
            feet = self._feet_at(X)
            best = None
            for i, (a, b) in enumerate(self.d.gluings):
                if a[0] == b[0]:
                    continue
                diag = class_length(X, (a,), feet)
                if diag < x[i] * (1.0 - rel) and (best is None or x[i] - diag > best[2]):
                    best = (i, diag, x[i] - diag)
            if best is None:
                return x
            i, diag, _ = best
            d2 = flip_arc(self.d, i)
            y = x.copy()
            y[i] = diag
            if self.ordered_boundaries:
                before = boundary_component_lengths(X)
                after = boundary_component_lengths(_surface(d2, y))
                if np.max(np.abs(before - after)) > 1e-9 * max(1.0, before.max()):
                    return x
            x = y
            self.d = d2
            self.paths = []
            self.refresh(x)
            info.flips += 1

    def _feet_at(self, X):
        key = (X.decomposition, X.arc_lengths)
        if self._cache is None or self._cache[0] != key:
            self._cache = (key, _feet(X))
        return self._cache[1]

    def values(self, x):
        if not self.paths:
            return np.asarray(x, dtype=float)
        X = _surface(self.d, x)
        feet = self._feet_at(X)
        return np.concatenate([x, [class_length(X, p, feet) for p in self.paths]])

    def value(self, x, tau):
        return softmin(self.values(x), tau)[0]

    def value_grad(self, x, tau):
        vals = self.values(x)
        val, w = softmin(vals, tau)
        N = len(x)
        grad = w[:N].copy()
        for k, path in enumerate(self.paths):
            wk = w[N + k]
            if wk < 1e-14:
                continue
            for i in range(N):
                h = 1e-6 * max(1.0, x[i])
                up, dn = x.copy(), x.copy()
                up[i] += h
                dn[i] -= h
                gi = (class_length(_surface(self.d, up), path) - class_length(_surface(self.d, dn), path)) / (2 * h)
                grad[i] += wk * gi
        return val, grad


def _ascend(obj, x, tau, step_fn, project, info, max_iter, eta_min=1e-15):
    """Softmin ascent at one temperature along the projected gradient.

    ``step_fn(d, y)`` restores feasibility and ``project(d, y, p)`` projects a
    direction on the tangent space; both take the current decomposition.
    """
    obj.refresh(x)
    x = obj.flip(x, info, rel=0.05)
    val, grad = obj.value_grad(x, tau)
    info.segments.append(len(info.objective))
    info.objective.append(val)
    eta = 0.1 * float(np.mean(x))
    for _ in range(max_iter):
        info.iterations += 1
        v = project(obj.d, x, grad)
        nv = np.linalg.norm(v)
        if nv < 1e-13 or eta < eta_min:
            break
        trial = step_fn(obj.d, x + eta * v / nv)
        if trial is not None:
            # classes that were long at x can be the shortest at the trial point
            obj.refresh(trial)
            tval = obj.value(trial, tau)
            if tval > val:
                info.objective.append(tval)
                # a margin keeps near-ties from flipping back and forth
                flips = info.flips
                x = obj.flip(trial, info, rel=0.05)
                val, grad = obj.value_grad(x, tau)
                if info.flips != flips:
                    # a flip changes the candidate set, so the objective is re-measured
                    info.segments.append(len(info.objective))
                    info.objective.append(val)
                eta *= 1.5
                continue
        eta *= 0.5
    return x


def maximize_total_constraint(d, L, start=None, max_iter=400, tol=1e-11, info=None, seed=0):
    """Maximize the orthosystole over surfaces of total boundary length ``L`` with decomposition ``d``.

    Returns the optimal ``MetricSurface``, possibly on a flipped copy of
    ``d``; pass an ``OptimizationInfo`` as ``info`` to get iteration counts
    and the objective history.
    Raises ``ConvergenceError`` if the arcs cannot be equalized to ``1e-8``.
    """
    g, n = validate(d)
    if not (L > 0 and math.isfinite(L)):
        raise DomainError(f"total length must be positive, got {L!r}")
    info = info if info is not None else OptimizationInfo()
    if start is None:
        start = random_start(d, np.random.default_rng(seed))
    x = np.asarray(start, dtype=float)
    if x.shape != (d.num_arcs,) or np.any(~(x > 0)):
        raise DomainError("start must be a positive vector with one entry per arc")
    x = _project_shift(d, x, L, tol)
    if x is None:
        raise DomainError("start could not be projected onto the constraint")

    def project(dd, y, p):
        gF = grad_total_boundary(_surface(dd, y))
        return p - (p @ gF) / (gF @ gF) * gF

    def step(dd, y):
        return _restore_total(dd, y, L, tol, info)

    obj = _Candidates(d)
    for k, tau in enumerate(TEMPERATURES):
        scale = float(np.mean(x))
        # only the coldest stage needs a fine step; earlier ones just track the moving optimum
        floor = (1e-13 if k == len(TEMPERATURES) - 1 else 1e-8) * scale
        x = _ascend(obj, x, tau * scale, step, project, info, max_iter, floor)
    x = obj.flip(x, info)
    d = obj.d

    for eps in (1e-4, 1e-3, 1e-2):
        y, active = _equalize_total(d, x, L, tol, eps * float(np.mean(x)))
        if y is not None and obj.values(y).min() >= obj.values(x).min() - 1e-12:
            x = y
            if active.all():
                break
    info.candidates = len(obj.paths)
    active = np.flatnonzero(x <= x.min() + 1e-8 * max(1.0, x.min()))
    info.active = tuple(int(i) for i in active)
    info.spread = float(x.max() - x.min())
    info.residual = float(abs(_F(d, x) - L))
    if info.spread >= 1e-8 or info.residual >= 1e-10:
        raise ConvergenceError(
            f"no equal-length optimum: spread {info.spread:.3g}, residual {info.residual:.3g}",
            {"x": x.tolist(), "spread": info.spread, "residual": info.residual, "iterations": info.iterations,
             "gluings": [list(map(list, pair)) for pair in d.gluings]})
    return _surface(d, x)


def multistart_total_constraint(d, L, starts=20, seed=0, threads=None, max_iter=400):
    """Run :func:`maximize_total_constraint` from ``starts`` seeded random points.

    Returns ``(best surface, [(surface or ConvergenceError, info), ...])``;
    the best has the largest shortest arc, ties broken by coordinates.
    """
    rng = np.random.default_rng(seed)
    points = [random_start(d, rng) for _ in range(starts)]
    threads = threads or default_threads()

    def run(p):
        info = OptimizationInfo()
        try:
            return maximize_total_constraint(d, L, p, max_iter=max_iter, info=info), info
        except ConvergenceError as exc:
            return exc, info

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, points))
    else:
        results = [run(p) for p in points]
    good = [r for r, _ in results if isinstance(r, MetricSurface)]
    if not good:
        raise ConvergenceError("no start converged", {"starts": starts})
    best = max(good, key=lambda X: (min(X.arc_lengths), tuple(-v for v in X.arc_lengths)))
    return best, results


def _restore_boundaries(d, x, ell, tol, info, iters=60):
    """Gauss-Newton projection onto ``boundary lengths = ell`` (minimum-norm steps)."""
    info.restorations += 1
    for _ in range(iters):
        X = _surface(d, x)
        r = boundary_component_lengths(X) - ell
        if np.max(np.abs(r)) <= tol:
            return x
        J = boundary_lengths_jacobian(X)
        step = J.T @ np.linalg.solve(J @ J.T, r)
        t = 1.0
        while t > 1e-12:
            y = x - t * step
            if np.all(y > 0) and np.max(np.abs(boundary_component_lengths(_surface(d, y)) - ell)) < np.max(np.abs(r)):
                break
            t *= 0.5
        else:
            return None
        x = y
    return None


def maximize_fixed_boundaries(d, ell, start=None, max_iter=400, tol=1e-11, info=None, seed=0):
    """Local maximizer of the orthosystole with every boundary length prescribed.

    A local method: the result is feasible and locally optimal for the
    smoothed objective, not certified globally.
    """
    g, n = validate(d)
    ell = np.asarray(ell, dtype=float)
    if ell.shape != (n,) or np.any(~(ell > 0)):
        raise DomainError(f"need {n} positive boundary lengths")
    info = info if info is not None else OptimizationInfo()
    if start is None:
        start = random_start(d, np.random.default_rng(seed))
    x = np.asarray(start, dtype=float)
    if x.shape != (d.num_arcs,) or np.any(~(x > 0)):
        raise DomainError("start must be a positive vector with one entry per arc")
    x = _project_shift(d, x, float(ell.sum()), tol)
    x = _restore_boundaries(d, x, ell, tol, info)
    if x is None:
        raise DomainError("start could not be projected onto the boundary constraints")

    def project(dd, y, p):
        J = boundary_lengths_jacobian(_surface(dd, y))
        return p - J.T @ np.linalg.solve(J @ J.T, J @ p)

    def step(dd, y):
        return _restore_boundaries(dd, y, ell, tol, info)

    obj = _Candidates(d, ordered_boundaries=True)
    for k, tau in enumerate(TEMPERATURES):
        scale = float(np.mean(x))
        # only the coldest stage needs a fine step; earlier ones just track the moving optimum
        floor = (1e-13 if k == len(TEMPERATURES) - 1 else 1e-8) * scale
        x = _ascend(obj, x, tau * scale, step, project, info, max_iter, floor)
    x = obj.flip(x, info)
    d = obj.d

    # active-set step: make the near-shortest arcs exactly equal when that stays feasible
    for eps in (1e-6, 1e-4, 1e-3):
        active = x <= x.min() + eps * float(np.mean(x))
        if active.sum() < 2:
            continue
        y = x.copy()
        y[active] = x[active].mean()
        y = _restore_boundaries(d, y, ell, tol, info)
        if y is not None and obj.values(y).min() >= obj.values(x).min() - 1e-10:
            y2 = _equal_active_fixed(d, y, ell, active, tol)
            ok = y2 is not None and obj.values(y2).min() >= obj.values(y).min() - 1e-12
            x = y2 if ok else y
    info.candidates = len(obj.paths)
    info.spread = float(x.max() - x.min())
    info.residual = float(np.max(np.abs(boundary_component_lengths(_surface(d, x)) - ell)))
    info.active = tuple(int(i) for i in np.flatnonzero(x <= x.min() + 1e-8 * max(1.0, x.min())))
    if info.residual >= 1e-10:
        raise ConvergenceError(f"boundary constraints violated by {info.residual:.3g}", {"x": x.tolist()})
    return _surface(d, x)


def _equal_active_fixed(d, x, ell, active, tol, iters=60):
    """Gauss-Newton on ``x_i = x_j`` (active) together with the boundary equations."""
    idx = np.flatnonzero(active)
    for _ in range(iters):
        X = _surface(d, x)
        r_b = boundary_component_lengths(X) - ell
        r_e = x[idx[1:]] - x[idx[0]]
        r = np.concatenate([r_b, r_e])
        if np.max(np.abs(r)) <= tol:
            return x
        J_e = np.zeros((len(idx) - 1, len(x)))
        J_e[np.arange(len(idx) - 1), idx[1:]] = 1.0
        J_e[:, idx[0]] = -1.0
        J = np.vstack([boundary_lengths_jacobian(X), J_e])
        step, *_ = np.linalg.lstsq(J, r, rcond=None)
        y = x - step
        if np.any(y <= 0):
            return None
        x = y
    return None


def certify_local_max(X, threads=None):
    """Certificate of the equal-lengths, orthokissing and bound conditions at ``X``."""
    g, n = X.signature
    rep = orthosystole_report(X, threads=threads)
    x = np.asarray(X.arc_lengths)
    L = total_boundary_length(X)
    bound = bavard_bound(g, n, L)
    arcs = orthosystole_arcs(X, rep)
    filling = None
    if arcs is not None:
        filling = fills(X.decomposition, arcs).fills
    return {
        "is_equal_lengths": bool(x.max() - x.min() <= 1e-8 * max(1.0, x.max())),
        "okiss": rep.okiss,
        "okiss_maximal": rep.okiss == 6 * g - 6 + 3 * n,
        "osys_gap_to_bound": bound - rep.osys,
        "osys": rep.osys,
        "bound": bound,
        "orthosystoles_fill": filling,
    }


def theorem_b_lower_bound(g, n, ell):
    """Lower bound on the largest orthosystole at ``n`` boundaries of length ``ell`` and genus ``g >= n``."""
    g, n = validate_signature(g, n)
    if n < 2 or g < n:
        raise DomainError(f"need g >= n >= 2, got ({g}, {n})")
    return equal_boundary_bound(g // n, ell)
