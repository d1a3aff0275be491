"""Explicit hexagon decompositions and the surfaces built on them.

The builders think of a decomposition as a triangulation of a closed
surface whose vertices are the boundary components: hexagon ``h`` is a
triangle, its edge ``k`` is arc slot ``2k`` and its corner ``v_k`` is the
boundary slot ``2k - 1``, so edge ``k`` runs from ``v_k`` to ``v_{k+1}``.

Two surgeries grow the basic pieces.  A tube replaces two triangles by a
six-triangle annulus, adding a handle; a stellar subdivision puts a new
vertex (a new boundary component) inside one triangle.
"""

import logging
import math

from .combinatorics import HexagonDecomposition, validate
from .errors import DomainError
from .hexagon_trig import equal_dual_length, opposite_side, validate_signature
from .metric import MetricSurface

__all__ = [
    "one_holed_torus",
    "pants_decomposition",
    "lattice_torus",
    "add_tube",
    "subdivide",
    "standard_decomposition",
    "equal_length_surface",
    "equal_arc_length",
    "bicolored_decomposition",
    "corner_colors",
    "symmetric_family",
    "symmetric_rotation",
    "is_invariant",
    "pants_from_cuffs",
]

log = logging.getLogger(__name__)


def one_holed_torus():
    return HexagonDecomposition(2, (((0, 0), (1, 0)), ((0, 2), (1, 2)), ((0, 4), (1, 4))))


def pants_decomposition():
    return HexagonDecomposition(2, (((0, 0), (1, 0)), ((0, 2), (1, 4)), ((0, 4), (1, 2))))


def lattice_torus(n):
    """Torus with ``n`` boundary components: a row of ``n`` squares, each cut by a diagonal.

    Hexagon ``2x`` is the lower triangle of square ``x`` (bottom, diagonal,
    left on slots 0, 2, 4) and ``2x + 1`` the upper one (right, top,
    diagonal).
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    gl = []
    for x in range(n):
        up, down = 2 * x, 2 * x + 1
        gl.append(((up, 0), (down, 2)))
        gl.append(((up, 2), (down, 4)))
        gl.append(((up, 4), (2 * ((x - 1) % n) + 1, 0)))
    return HexagonDecomposition(2 * n, tuple(gl))


def _corner(h, k):
    return h, (2 * k - 1) % 6


def add_tube(d, t1, t2, r=0, c=0):
    """Handle surgery between hexagons ``t1`` and ``t2``; returns ``(decomposition, new hexagon ids)``.

    With ``p_i`` the corner ``v_{i+r}`` of ``t1`` and ``q_i`` the corner
    ``v_{c-i}`` of ``t2``, the annulus consists of ``D_i = (p_i, p_{i+1}, q_i)``
    and ``N_i = (q_i, p_{i+1}, q_{i+1})``.  ``D_0`` keeps index ``t1``, ``N_0``
    keeps ``t2``; the ids are returned as ``(D_0, D_1, D_2, N_0, N_1, N_2)``.
    """
    if t1 == t2:
        raise DomainError("a tube needs two distinct hexagons")
    H = d.num_hexagons
    D = [t1, H, H + 1]
    N = [t2, H + 2, H + 3]
    moved = {}
    for i in range(3):
        moved[(t1, 2 * ((i + r) % 3))] = (D[i], 0)
        moved[(t2, 2 * ((c - i - 1) % 3))] = (N[i], 4)
    gl = []
    for x, y in d.gluings:
        gl.append((moved.get(x, x), moved.get(y, y)))
    for i in range(3):
        gl.append(((D[i], 2), (N[i], 0)))
        gl.append(((D[i], 4), (N[(i - 1) % 3], 2)))
    return HexagonDecomposition(H + 4, tuple(gl)), tuple(D + N)


def subdivide(d, t):
    """Stellar subdivision of hexagon ``t``: adds one boundary component and two hexagons."""
    H = d.num_hexagons
    A, B, C = t, H, H + 1
    # A = (v0, v1, w), B = (v1, v2, w), C = (v2, v0, w); old edge k lands on slot 0 of the k-th piece
    moved = {(t, 0): (A, 0), (t, 2): (B, 0), (t, 4): (C, 0)}
    gl = [(moved.get(x, x), moved.get(y, y)) for x, y in d.gluings]
    gl += [((A, 2), (B, 4)), ((B, 2), (C, 4)), ((C, 2), (A, 4))]
    return HexagonDecomposition(H + 2, tuple(gl))


def standard_decomposition(g, n):
    """A fixed decomposition of signature ``(g, n)``."""
    g, n = validate_signature(g, n)
    if g == 0:
        d = pants_decomposition()
        extra = n - 3
    else:
        d = one_holed_torus()
        for _ in range(g - 1):
            d, _ = add_tube(d, 0, 1)
        extra = n - 1
    for _ in range(extra):
        d = subdivide(d, 0)
    if validate(d) != (g, n):
        raise AssertionError("standard decomposition has the wrong signature")
    return d


def equal_arc_length(g, n, L):
    """Common arc length ``a`` of the equal-length surface with total boundary ``L``."""
    g, n = validate_signature(g, n)
    if not (L > 0 and math.isfinite(L)):
        raise DomainError(f"total length must be positive, got {L!r}")
    H = 4 * g - 4 + 2 * n
    return equal_dual_length(L / (3 * H))


def equal_length_surface(d, L):
    """Every arc gets the same length, chosen so the total boundary length is ``L``."""
    g, n = validate(d)
    a = equal_arc_length(g, n, L)
    return MetricSurface(d, (a,) * d.num_arcs)


def corner_colors(d):
    """Boundary component of each corner: ``{(h, k): component}`` for ``k = 0, 1, 2``."""
    comp = d.cycle_of_slot
    return {(h, k): comp[_corner(h, k)] for h in range(d.num_hexagons) for k in range(3)}


def _triangle_colors(d, h, colors=None):
    colors = colors or corner_colors(d)
    return tuple(colors[(h, k)] for k in range(3))


def bicolored_decomposition(g):
    """Signature ``(g, 2)`` where half the hexagons touch component 0 twice and half touch component 1 twice.

    Starts from the two-vertex torus and adds handles, each between the
    lowest-index hexagon of either kind.
    """
    if int(g) != g or g < 1:
        raise DomainError(f"genus must be an integer >= 1, got {g!r}")
    d = lattice_torus(2)
    for _ in range(int(g) - 1):
        col = corner_colors(d)
        kinds = {h: _triangle_colors(d, h, col) for h in range(d.num_hexagons)}
        red = min(h for h, k in kinds.items() if k.count(0) == 2)
        blue = min(h for h, k in kinds.items() if k.count(1) == 2)
        # rotate so the odd corner of the red hexagon is p_2, and start q at a blue corner
        r = (kinds[red].index(1) + 1) % 3
        c = next(j for j in range(3) if kinds[blue][j] == 1)
        d, _ = add_tube(d, red, blue, r, c)
    if validate(d) != (int(g), 2):
        raise AssertionError("bicolored construction has the wrong signature")
    col = corner_colors(d)
    kinds = [_triangle_colors(d, h, col).count(0) for h in range(d.num_hexagons)]
    if kinds.count(2) != kinds.count(1) or len(d.cycles[0]) != len(d.cycles[1]):
        raise AssertionError("bicolored construction is unbalanced")
    return d


def _balanced(colors):
    return len(colors) == 6 and all(colors.count(v) == 3 for v in set(colors)) and len(set(colors)) == 2


def symmetric_family(n, m):
    """Signature ``(n m + 1, n)`` with a combinatorial rotation of order ``n``.

    The ``n``-vertex lattice torus is cut into blocks, one square each; every
    block receives ``m`` handles between its own two hexagons, with the same
    recipe in each block.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if int(m) != m or m < 0:
        raise DomainError(f"m must be a non-negative integer, got {m!r}")
    n, m = int(n), int(m)
    d = lattice_torus(n)
    local = [[2 * x, 2 * x + 1] for x in range(n)]
    recipe = []
    for step in range(m):
        for x in range(n):
            t1, t2 = local[x]
            if x == 0:
                choice = None
                for r in range(3):
                    for c in range(3):
                        trial, ids = add_tube(d, t1, t2, r, c)
                        if n == 1:
                            choice = (r, c)
                            break
                        col = corner_colors(trial)
                        pair = _triangle_colors(trial, ids[0], col) + _triangle_colors(trial, ids[3], col)
                        if _balanced(pair):
                            choice = (r, c)
                            break
                    if choice:
                        break
                if choice is None:
                    raise AssertionError("no balanced handle placement")
                recipe.append(choice)
            r, c = recipe[step]
            d, ids = add_tube(d, t1, t2, r, c)
            local[x] = [ids[0], ids[3]]
    if validate(d) != (n * m + 1, n):
        raise AssertionError("symmetric family has the wrong signature")
    return d


def symmetric_rotation(n, m):
    """Hexagon permutation realizing the order-``n`` rotation of :func:`symmetric_family`."""
    H = 2 * n + 4 * n * m
    perm = [0] * H
    for x in range(n):
        y = (x + 1) % n
        perm[2 * x] = 2 * y
        perm[2 * x + 1] = 2 * y + 1
        for step in range(m):
            for j in range(4):
                perm[2 * n + 4 * (step * n + x) + j] = 2 * n + 4 * (step * n + y) + j
    return perm


def is_invariant(d, hex_perm):
    """Whether relabeling hexagons by ``hex_perm`` (no slot rotation) preserves the gluings."""
    moved = d.relabel(hex_perm)
    return {frozenset(p) for p in moved.gluings} == {frozenset(p) for p in d.gluings}


def _seam(li, lj, lk):
    """Distance between cuffs ``i`` and ``j`` of the pants with cuffs ``li, lj, lk``."""
    # the seam is the side opposite the half cuff ``k`` in either hexagon
    return opposite_side(lk / 2.0, li / 2.0, lj / 2.0)


def pants_from_cuffs(l1, l2, l3):
    """Pair of pants with boundary lengths ``(l1, l2, l3)`` in ``boundary_cycles`` order.

    Arc 0 joins cuffs 1 and 3, arc 1 cuffs 1 and 2, arc 2 cuffs 2 and 3.
    """
    for v in (l1, l2, l3):
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"cuff lengths must be positive and finite, got {v!r}")
    x = (_seam(l1, l3, l2), _seam(l1, l2, l3), _seam(l2, l3, l1))
    if min(x) < 1e-12:
        log.warning("degenerate pants: shortest seam %.3g", min(x))
    return MetricSurface(pants_decomposition(), x)
