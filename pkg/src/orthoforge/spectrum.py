"""Orthogeodesic spectrum by enumeration of dual paths.

Every orthogeodesic homotopy class is encoded by the sequence of arcs it
crosses.  A class with no crossings is a decomposition arc.  Otherwise the
path is put in a normal form: it leaves its start hexagon through the
arc-side opposite its start side, never crosses an arc straight back, and
ends on the boundary side opposite the arc-side it last entered through.
Endpoints sliding along the boundary past a corner would otherwise produce
longer crossing sequences for the same class.

Lengths are measured with the foot-to-foot chains of
:mod:`orthoforge.developing`; a search branch is cut once either the start
boundary line is farther than the cutoff from the arc line being crossed, or
the number of crossings forces the length past the cutoff.
"""

import csv
import io
import logging
import math
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import fills
from .developing import ASYMPTOTIC, FLIP, INTERSECTING, HexagonFeet, crossing_isometry, distance_to_x_axis, \
    line_distance, realize_hexagon, reorthonormalize, walk
from .errors import DomainError, IncompleteSpectrumError
from .hexagon_trig import altitude, bavard_bound
from .metric import total_boundary_length

__all__ = [
    "OrthoClass",
    "SpectrumReport",
    "pruning_constant",
    "enumerate_orthogeodesics",
    "orthosystole",
    "orthosystole_report",
    "filling_orthosystoles",
    "boundary_injectivity_radius",
    "verify_hexdec_orthosystoles",
    "spectral_gap",
    "orthosystole_arcs",
    "develop_class",
    "class_length",
    "spectrum_to_csv",
    "spectrum_from_csv",
    "default_threads",
]

log = logging.getLogger(__name__)

TIE_TOL = 1e-7
DEFAULT_MAX_QUEUE = 200_000
REORTHO_DRIFT = 6.0  # rounding grows like exp(distance walked); correct after this much


@dataclass(frozen=True)
class OrthoClass:
    start: tuple      # (hexagon, odd slot)
    crossings: tuple  # ((hexagon, even slot), ...) exits, in order
    end: tuple        # (hexagon, odd slot)
    length: float
    arc: int = None   # decomposition arc id for crossing-free classes


@dataclass(frozen=True)
class SpectrumReport:
    classes: tuple
    osys: float
    okiss: int
    cutoff_used: float
    pruning_constant: float
    tie_tol: float = TIE_TOL
    nodes: int = 0
    cutoff_history: tuple = field(default=())

    def shortest(self):
        return self.classes[:self.okiss]


def default_threads():
    raw = os.environ.get("ORTHOFORGE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise DomainError(f"ORTHOFORGE_THREADS must be an integer, got {raw!r}") from None
    return 1


def _feet(X):
    return [HexagonFeet.from_sides(X.side_lengths(h)) for h in range(X.decomposition.num_hexagons)]


def pruning_constant(X):
    """Smallest distance a dual path can spend inside one hexagon.

    Minimum over hexagons of the distances between two arc-side lines (the
    boundary sides) and between a side and its opposite side (altitudes).
    """
    best = math.inf
    for f in _feet(X):
        best = min(best, min(f.sides[1::2]), min(f.altitude))
    return best


def _arc_classes(X):
    d = X.decomposition
    out = []
    for i, ((h, s), _) in enumerate(d.gluings):
        out.append(OrthoClass((h, (s + 5) % 6), (), (h, (s + 1) % 6), X.arc_lengths[i], i))
    return out


def _class_key(crossings, partner):
    rev = tuple(partner[c] for c in reversed(crossings))
    return min(crossings, rev)


def _segment_gap(M, lo, hi):
    """Distance from the x-axis to the segment ``[lo, hi]`` of the image of the x-axis under ``M``.

    Points of the image segment are ``M (sinh s, 0, cosh s)``; their signed
    distance to the x-axis satisfies ``sinh = m10 sinh s + m12 cosh s``.
    Returns ``0.0`` when the segment meets the axis and ``nan`` when the
    evaluation overflows (the caller keeps such branches).
    """
    m10, m12 = M[1, 0], M[1, 2]
    try:
        vals = [m10 * math.sinh(lo) + m12 * math.cosh(lo), m10 * math.sinh(hi) + m12 * math.cosh(hi)]
    except OverflowError:
        return math.nan
    if vals[0] * vals[1] <= 0.0:
        return 0.0
    a, b = 0.5 * (m10 + m12), 0.5 * (m12 - m10)
    if a * b > 0.0:
        mid = 0.5 * math.log(b / a)
        if lo < mid < hi:
            vals.append(math.copysign(2.0 * math.sqrt(a * b), a))
    return math.asinh(min(abs(v) for v in vals))


def _point_segment_gap(M, lo, hi):
    """Distance from the origin to the segment ``[lo, hi]`` of the image of the x-axis under ``M``."""
    p0, p2 = -M[2, 0], M[2, 2]
    mid = min(max(math.atanh(max(-1.0, min(1.0, p0 / p2))), lo), hi) if abs(p0) < p2 else (hi if p0 > 0 else lo)
    try:
        c = p2 * math.cosh(mid) - p0 * math.sinh(mid)
    except OverflowError:
        return math.nan
    return math.acosh(max(1.0, c))


def _search_from(X, feet, start, cutoff, delta, max_queue):
    """Breadth-first search over normal-form paths starting on boundary slot ``start``."""
    d = X.decomposition
    partner = d.partner
    h0, t0 = start
    found = []
    nodes = 0
    f0 = feet[h0]
    e0 = (t0 + 3) % 6
    M = walk(0.0, f0.altitude[t0])
    slack = cutoff * (1.0 + 1e-9) + 1e-300
    # the class starts on the start side, within ``reach`` of its altitude foot
    reach = max(f0.foot[t0], f0.sides[t0] - f0.foot[t0])
    if f0.altitude[t0] > slack:
        return found, nodes
    queue = deque([(M, ((h0, e0),), f0.foot[e0], 1, f0.altitude[t0])])
    while queue:
        if len(queue) > max_queue:
            raise IncompleteSpectrumError(
                f"search frontier from slot {start} exceeded max_queue={max_queue}", required=len(queue))
        M, path, pos, depth, drift = queue.popleft()
        nodes += 1
        h, e = path[-1]
        h2, e2 = partner[(h, e)]
        f = feet[h2]
        p = f.sides[e2] - pos
        M = M @ FLIP
        if drift > REORTHO_DRIFT:
            M = reorthonormalize(M)
            drift = 0.0
        # end on the side opposite the entry
        t, dd, _ = f.hop(e2, p, (e2 + 3) % 6)
        length = distance_to_x_axis(M @ walk(t, dd))
        if length == ASYMPTOTIC:
            log.warning("discarding path %s: endpoint lines are asymptotic", path)
        elif length != INTERSECTING and length <= cutoff:
            found.append((path, (h2, (e2 + 3) % 6), length))
        if depth * delta > cutoff:
            continue
        for k in (2, 4):
            ex = (e2 + k) % 6
            t, dd, arrive = f.hop(e2, p, ex)
            M2 = M @ walk(t, dd)
            if not np.all(np.isfinite(M2)):
                log.warning("pruning path %s: developed chain overflowed", path)
                continue
            # the class has to cross this arc-side segment
            gap = _segment_gap(M2, -arrive, f.sides[ex] - arrive)
            near = _point_segment_gap(M2, -arrive, f.sides[ex] - arrive) - reach
            if near > gap:
                gap = near
            if not gap > slack:
                queue.append((M2, path + ((h2, ex),), arrive, depth + 1, drift + abs(t) + dd))
    return found, nodes


def enumerate_orthogeodesics(X, cutoff, threads=None, max_queue=DEFAULT_MAX_QUEUE, tie_tol=TIE_TOL):
    """All orthogeodesic classes of length at most ``cutoff``, shortest first."""
    if cutoff == "auto":
        return orthosystole_report(X, threads=threads, max_queue=max_queue, tie_tol=tie_tol)
    cutoff = float(cutoff)
    if not cutoff > 0:
        raise DomainError(f"cutoff must be positive, got {cutoff}")
    d = X.decomposition
    feet = _feet(X)
    delta = pruning_constant(X)
    starts = [(h, t) for h in range(d.num_hexagons) for t in (1, 3, 5)]
    threads = threads or default_threads()

    def run(start):
        return _search_from(X, feet, start, cutoff, delta, max_queue)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]

    classes = [c for c in _arc_classes(X) if c.length <= cutoff]
    seen = {}
    nodes = 0
    for (found, n) in results:
        nodes += n
        for path, end, length in found:
            key = _class_key(path, d.partner)
            if key in seen:
                continue
            h0, e0 = key[0]
            hl, el = d.partner[key[-1]]
            seen[key] = OrthoClass((h0, (e0 + 3) % 6), key, (hl, (el + 3) % 6), length)
    classes.extend(seen.values())
    classes.sort(key=lambda c: (c.length, len(c.crossings), c.start, c.crossings))
    if classes:
        osys = classes[0].length
        okiss = sum(1 for c in classes if c.length <= osys * (1.0 + tie_tol))
    else:
        osys, okiss = math.inf, 0
    return SpectrumReport(tuple(classes), osys, okiss, cutoff, delta, tie_tol, nodes, (cutoff,))


def orthosystole_report(X, threads=None, max_queue=DEFAULT_MAX_QUEUE, tie_tol=TIE_TOL):
    """Spectrum up to an automatic cutoff just above the orthosystole.

    The first cutoff is the smaller of the sharp upper bound and the shortest
    arc, padded by ``1e-6`` relative; it doubles until a class shows up.
    """
    g, n = X.signature
    bound = bavard_bound(g, n, total_boundary_length(X))
    cutoff = min(bound * (1.0 + 1e-6), min(X.arc_lengths)) * (1.0 + 1e-6)
    history = []
    while True:
        history.append(cutoff)
        rep = enumerate_orthogeodesics(X, cutoff, threads=threads, max_queue=max_queue, tie_tol=tie_tol)
        if rep.classes:
            return SpectrumReport(rep.classes, rep.osys, rep.okiss, cutoff, rep.pruning_constant,
                                  tie_tol, rep.nodes, tuple(history))
        cutoff *= 2.0


def orthosystole(X, threads=None, max_queue=DEFAULT_MAX_QUEUE, tie_tol=TIE_TOL):
    """``(osys, okiss)``."""
    rep = orthosystole_report(X, threads=threads, max_queue=max_queue, tie_tol=tie_tol)
    return rep.osys, rep.okiss


def orthosystole_arcs(X, report=None):
    """Arc ids of the decomposition arcs realizing the orthosystole, or ``None`` if some shortest class is not an arc."""
    rep = report or orthosystole_report(X)
    arcs = [c.arc for c in rep.shortest()]
    if any(a is None for a in arcs):
        return None
    return sorted(arcs)


def boundary_injectivity_radius(X, threads=None):
    return orthosystole(X, threads=threads)[0] / 2.0


def spectral_gap(X, threads=None, max_queue=DEFAULT_MAX_QUEUE, tie_tol=TIE_TOL):
    """``(osys, next length, gap)``: the first length past the orthosystole tie window."""
    base = orthosystole_report(X, threads=threads, max_queue=max_queue, tie_tol=tie_tol)
    cutoff = base.osys * 1.5
    while True:
        rep = enumerate_orthogeodesics(X, cutoff, threads=threads, max_queue=max_queue, tie_tol=tie_tol)
        longer = [c.length for c in rep.classes if c.length > rep.osys * (1.0 + tie_tol)]
        if longer:
            return rep.osys, longer[0], longer[0] - rep.osys
        cutoff *= 2.0


def verify_hexdec_orthosystoles(X, threads=None):
    """Whether the shortest orthogeodesics are exactly the decomposition arcs."""
    x = X.arc_lengths
    if max(x) - min(x) <= 1e-12 * max(x):
        a = x[0]
        return 2.0 * altitude(a, a, a) > a
    rep = orthosystole_report(X, threads=threads)
    arcs = orthosystole_arcs(X, rep)
    return arcs == list(range(X.decomposition.num_arcs))


def class_length(X, crossings, feet=None):
    """Length of the class with the given normal-form ``crossings`` on surface ``X``.

    The crossing sequence is purely combinatorial, so it names the same class
    for every choice of arc lengths; ``inf`` is returned for degenerate lifts.
    """
    if not crossings:
        raise DomainError("crossing-free classes are arcs; read their length directly")
    d = X.decomposition
    feet = feet or _feet(X)
    h0, e0 = crossings[0]
    f = feet[h0]
    M = walk(0.0, f.altitude[(e0 + 3) % 6])
    drift = f.altitude[(e0 + 3) % 6]
    pos = f.foot[e0]
    for k, (h, e) in enumerate(crossings):
        h2, e2 = d.partner[(h, e)]
        f = feet[h2]
        p = f.sides[e2] - pos
        M = M @ FLIP
        nxt = crossings[k + 1] if k + 1 < len(crossings) else None
        if nxt is None:
            t, dd, _ = f.hop(e2, p, (e2 + 3) % 6)
            length = distance_to_x_axis(M @ walk(t, dd))
            return length if isinstance(length, float) else math.inf
        if nxt[0] != h2:
            raise DomainError(f"crossing {nxt} does not leave hexagon {h2}")
        t, dd, pos = f.hop(e2, p, nxt[1])
        M = M @ walk(t, dd)
        drift += abs(t) + dd
        if drift > REORTHO_DRIFT:
            M = reorthonormalize(M)
            drift = 0.0


def develop_class(X, cls, realizations=None):
    """Length of ``cls`` re-measured by placing whole hexagons with crossing isometries."""
    d = X.decomposition
    real = realizations or {h: realize_hexagon(*X.hexagon_arc_lengths(h)) for h in range(d.num_hexagons)}
    h0, t0 = cls.start
    G = np.eye(3)
    for h, s in cls.crossings:
        G = G @ crossing_isometry(X, h, s, real)
    he, te = cls.end
    return line_distance(real[h0].normals[t0], G @ real[he].normals[te])


def spectrum_to_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["length", "start_hex", "start_slot", "end_hex", "end_slot", "crossings"])
    for c in report.classes:
        w.writerow([f"{c.length:.12g}", c.start[0], c.start[1], c.end[0], c.end[1],
                    ";".join(f"{h}:{s}" for h, s in c.crossings)])
    return buf.getvalue()


def spectrum_from_csv(text):
    """Parse :func:`spectrum_to_csv` output back into ``OrthoClass`` records."""
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for r in rows:
        cr = tuple(tuple(int(v) for v in tok.split(":")) for tok in r["crossings"].split(";") if tok)
        out.append(OrthoClass((int(r["start_hex"]), int(r["start_slot"])), cr,
                              (int(r["end_hex"]), int(r["end_slot"])), float(r["length"])))
    return out


def filling_orthosystoles(X, report=None):
    """Whether the orthosystole classes are decomposition arcs that fill the surface."""
    arcs = orthosystole_arcs(X, report)
    if arcs is None:
        return False
    return fills(X.decomposition, arcs).fills
