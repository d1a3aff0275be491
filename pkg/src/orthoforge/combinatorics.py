"""Hexagon decompositions as combinatorial gluing data.

Each hexagon has six side slots numbered counterclockwise.  Even slots
``0, 2, 4`` are arc-sides and are glued in pairs; odd slots ``1, 3, 5`` are
pieces of the surface boundary.  Side ``s`` runs from corner ``s`` to corner
``s + 1``; a gluing identifies two arc-sides with reversed direction, so
every representable surface is orientable.

Arc ``i`` is the ``i``-th pair of ``HexagonDecomposition.gluings``.
"""

import json
from dataclasses import dataclass
from functools import cached_property

from .errors import DecompositionError, DomainError
from .hexagon_trig import validate_signature

__all__ = [
    "HexagonDecomposition",
    "FillingCensus",
    "validate",
    "boundary_cycles",
    "euler_characteristic_cw",
    "fills",
    "min_filling_size",
    "flip_arc",
    "decomposition_from_json",
    "decomposition_to_json",
]

ARC_SLOTS = (0, 2, 4)
BOUNDARY_SLOTS = (1, 3, 5)


@dataclass(frozen=True)
class HexagonDecomposition:
    num_hexagons: int
    gluings: tuple

    def __post_init__(self):
        gl = tuple(tuple((int(h), int(s)) for h, s in pair) for pair in self.gluings)
        object.__setattr__(self, "num_hexagons", int(self.num_hexagons))
        object.__setattr__(self, "gluings", gl)

    @property
    def num_arcs(self):
        return len(self.gluings)

    @cached_property
    def partner(self):
        """Map ``(h, s) -> (h', s')`` over glued arc-slots (no validation)."""
        out = {}
        for x, y in self.gluings:
            out[x] = y
            out[y] = x
        return out

    @cached_property
    def arc_of_slot(self):
        out = {}
        for i, (x, y) in enumerate(self.gluings):
            out[x] = i
            out[y] = i
        return out

    @cached_property
    def signature(self):
        return validate(self)

    @cached_property
    def cycles(self):
        return boundary_cycles(self)

    @cached_property
    def cycle_of_slot(self):
        out = {}
        for k, cyc in enumerate(self.cycles):
            for slot in cyc:
                out[slot] = k
        return out

    def hexagon_arcs(self, h):
        """Arc ids on slots 0, 2, 4 of hexagon ``h``."""
        return tuple(self.arc_of_slot[(h, s)] for s in ARC_SLOTS)

    def next_boundary_slot(self, h, t):
        """Boundary slot that follows ``(h, t)`` along its boundary component."""
        h2, s2 = self.partner[(h, (t + 1) % 6)]
        return h2, (s2 + 1) % 6

    def relabel(self, hex_perm, rotations=None, arc_perm=None):
        """Isomorphic copy: hexagon ``h`` becomes ``hex_perm[h]`` with slots shifted by ``2*rotations[h]``.

        ``arc_perm`` optionally reorders the gluing list (new index of old arc).
        """
        rot = [0] * self.num_hexagons if rotations is None else [int(r) for r in rotations]

        def move(slot):
            h, s = slot
            return hex_perm[h], (s + 2 * rot[h]) % 6

        pairs = [(move(x), move(y)) for x, y in self.gluings]
        if arc_perm is not None:
            ordered = [None] * len(pairs)
            for old, new in enumerate(arc_perm):
                ordered[new] = pairs[old]
            pairs = ordered
        return HexagonDecomposition(self.num_hexagons, tuple(pairs))


def flip_arc(d, arc):
    """Replace arc ``arc`` by the other diagonal of the quadrilateral formed by its two hexagons.

    The new arc joins the boundary sides opposite the old one and keeps its
    index; every other arc keeps its index and length data.  Raises
    ``DomainError`` when both sides of the arc lie on one hexagon.
    """
    (h1, s1), (h2, s2) = d.gluings[arc]
    if h1 == h2:
        raise DomainError(f"arc {arc} is glued to its own hexagon")
    # triangle picture: corners P, Q, R on h1 and Q, P, S on h2; new triangles (R, P, S) and (S, Q, R)
    moved = {
        (h1, (s1 + 4) % 6): (h1, 0),
        (h2, (s2 + 2) % 6): (h1, 2),
        (h2, (s2 + 4) % 6): (h2, 0),
        (h1, (s1 + 2) % 6): (h2, 2),
    }
    gl = []
    for i, (x, y) in enumerate(d.gluings):
        if i == arc:
            gl.append(((h1, 4), (h2, 4)))
        else:
            gl.append((moved.get(x, x), moved.get(y, y)))
    return HexagonDecomposition(d.num_hexagons, tuple(gl))


def _check_structure(d):
    H = d.num_hexagons
    if H < 1:
        raise DecompositionError("need at least one hexagon")
    seen = set()
    for pair in d.gluings:
        if len(pair) != 2:
            raise DecompositionError(f"gluing {pair!r} is not a pair")
        for h, s in pair:
            if not (0 <= h < H):
                raise DecompositionError(f"hexagon index {h} out of range")
            if s not in ARC_SLOTS:
                raise DecompositionError(f"slot {s} of hexagon {h} is not an arc-side slot")
            if (h, s) in seen:
                raise DecompositionError(f"slot ({h}, {s}) is glued more than once")
            seen.add((h, s))
    missing = [(h, s) for h in range(H) for s in ARC_SLOTS if (h, s) not in seen]
    if missing:
        raise DecompositionError(f"unmatched arc slots: {missing}")
    parent = list(range(H))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (h1, _), (h2, _) in d.gluings:
        parent[find(h1)] = find(h2)
    if len({find(h) for h in range(H)}) != 1:
        raise DecompositionError("glued complex is disconnected")


def _walk_cycles(d, is_cut):
    """Boundary cycles of the surface cut along the arcs where ``is_cut(arc)`` holds.

    Sides are odd slots plus both sides of every cut arc; the walk crosses
    uncut arcs at corners.
    """
    sides = [(h, s) for h in range(d.num_hexagons) for s in range(6)
             if s % 2 == 1 or is_cut(d.arc_of_slot[(h, s)])]
    seen = set()
    cycles = []
    for start in sides:
        if start in seen:
            continue
        cyc = []
        cur = start
        while cur not in seen:
            seen.add(cur)
            cyc.append(cur)
            h, u = cur[0], (cur[1] + 1) % 6
            while u % 2 == 0 and not is_cut(d.arc_of_slot[(h, u)]):
                h, u = d.partner[(h, u)]
                u = (u + 1) % 6
            cur = (h, u)
        cycles.append(tuple(cyc))
    return cycles


def boundary_cycles(d):
    """Boundary components as cycles of odd slots, each starting at its smallest slot."""
    _check_structure(d)
    cycles = []
    for cyc in _walk_cycles(d, lambda arc: False):
        k = cyc.index(min(cyc))
        cycles.append(cyc[k:] + cyc[:k])
    cycles.sort()
    return cycles


def euler_characteristic_cw(d):
    """``V - E + F`` of the glued CW complex, counting corners up to identification."""
    _check_structure(d)
    H = d.num_hexagons
    parent = {(h, c): (h, c) for h in range(H) for c in range(6)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (h1, s1), (h2, s2) in d.gluings:
        # reversed identification: corner s1 <-> corner s2+1, corner s1+1 <-> corner s2
        parent[find((h1, s1))] = find((h2, (s2 + 1) % 6))
        parent[find((h1, (s1 + 1) % 6))] = find((h2, s2))
    V = len({find(x) for x in parent})
    E = len(d.gluings) + 3 * H
    return V - E + H


def validate(d):
    """Check ``d`` and return its signature ``(g, n)``."""
    _check_structure(d)
    H = d.num_hexagons
    n = len(_walk_cycles(d, lambda arc: False))
    if 2 * len(d.gluings) != 3 * H:
        raise DecompositionError("arc count inconsistent with hexagon count")
    chi = -H // 2
    twice_g = 2 - n - chi
    if H % 2 or twice_g % 2 or twice_g < 0:
        raise DecompositionError(f"counts give no surface: H={H}, n={n}")
    g = twice_g // 2
    try:
        validate_signature(g, n)
    except DomainError as exc:
        raise DecompositionError(str(exc)) from exc
    if 6 * g - 6 + 3 * n != len(d.gluings) or 4 * g - 4 + 2 * n != H:
        raise DecompositionError("arc and hexagon counts disagree with the signature")
    return g, n


@dataclass(frozen=True)
class FillingCensus:
    disks: int
    annuli: int
    peripheral_annuli: int
    other: int

    @property
    def fills(self):
        return self.other == 0 and self.annuli == self.peripheral_annuli


def fills(d, arc_subset):
    """Classify the components of the surface cut along ``arc_subset``."""
    validate(d)
    cut = set(arc_subset)
    bad = [a for a in cut if not (isinstance(a, int) and 0 <= a < d.num_arcs)]
    if bad:
        raise DomainError(f"unknown arc ids: {bad}")
    H = d.num_hexagons
    comp = list(range(H))

    def find(i):
        while comp[i] != i:
            comp[i] = comp[comp[i]]
            i = comp[i]
        return i

    for i, ((h1, _), (h2, _)) in enumerate(d.gluings):
        if i not in cut:
            comp[find(h1)] = find(h2)
    members = {}
    for h in range(H):
        members.setdefault(find(h), []).append(h)
    cycles_by_comp = {}
    for cyc in _walk_cycles(d, lambda arc: arc in cut):
        cycles_by_comp.setdefault(find(cyc[0][0]), []).append(cyc)

    disks = annuli = peripheral = other = 0
    for root, hexes in members.items():
        F = len(hexes)
        hs = set(hexes)
        internal = sum(1 for i, ((h1, _), _) in enumerate(d.gluings) if i not in cut and h1 in hs)
        # CW structure of the piece: corners are identified only across internal arcs,
        # so each internal arc merges two corner pairs.
        V = 6 * F - 2 * internal
        E = internal + 6 * F - 2 * internal
        chi = V - E + F
        cycs = cycles_by_comp[root]
        if chi == 1 and len(cycs) == 1:
            disks += 1
        elif chi == 0 and len(cycs) == 2:
            annuli += 1
            if any(all(s % 2 == 1 for _, s in cyc) for cyc in cycs):
                peripheral += 1
        else:
            other += 1
    return FillingCensus(disks, annuli, peripheral, other)


def min_filling_size(g, n):
    """Fewest disjoint arcs that can fill a surface of signature ``(g, n)``."""
    g, n = validate_signature(g, n)
    return 2 * g if n == 1 else 2 * g - 2 + n


def decomposition_to_json(d, lengths=None):
    """Surface-format dict; ``lengths`` is an optional per-arc sequence."""
    out = {"hexagons": d.num_hexagons,
           "gluings": [[list(x), list(y)] for x, y in d.gluings]}
    if lengths is not None:
        out["lengths"] = {str(i): float(v) for i, v in enumerate(lengths)}
    return out


def decomposition_from_json(obj):
    """Parse the surface format; returns ``(decomposition, lengths or None)``."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        d = HexagonDecomposition(obj["hexagons"], tuple(tuple(map(tuple, p)) for p in obj["gluings"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DecompositionError(f"malformed surface JSON: {exc}") from exc
    lengths = None
    if "lengths" in obj and obj["lengths"] is not None:
        raw = obj["lengths"]
        try:
            lengths = [float(raw[str(i)]) for i in range(len(d.gluings))]
        except KeyError as exc:
            raise DecompositionError(f"missing length for arc {exc}") from exc
    return d, lengths
