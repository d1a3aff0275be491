"""Hexagon decompositions up to isomorphism, and the counting-formula comparison.

A connected decomposition with a chosen root (a hexagon and one of its
three rotations) has a unique breadth-first labeling: the root is hexagon
0 with its slots unchanged, slots are visited in label order, and a newly
reached hexagon gets the next label, rotated so the slot it was reached
through becomes slot 0.  The generator below emits exactly these rooted
codes, so every rooted decomposition appears once; the canonical form is
the smallest code over all roots and the automorphisms are the roots that
attain it.

Isomorphisms are hexagon relabelings with even slot rotations, optionally
combined with the global reflection ``s -> -s``.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .combinatorics import HexagonDecomposition, validate
from .errors import DecompositionError, DomainError, ResourceCapError
from .hexagon_trig import validate_signature

__all__ = [
    "DEFAULT_CAP",
    "IsoClass",
    "ClassReport",
    "enumerate_gluings",
    "rooted_codes",
    "canonical_form",
    "reflect",
    "iso_classes",
    "automorphism_count",
    "labeled_count",
    "brute_force_labeled",
    "counting_formula",
    "compare_with_formula",
]

DEFAULT_CAP = 8


def _num_hexagons(g, n):
    return 4 * g - 4 + 2 * n


def _check_cap(H, cap):
    if H > cap:
        raise ResourceCapError(f"{H} hexagons exceed the cap of {cap}", required=H)


def _decode(code):
    """Decomposition from a rooted code: position ``3 L + k`` is slot ``2 k`` of hexagon ``L``."""
    gl = []
    for p, q in enumerate(code):
        if p < q:
            gl.append(((p // 3, 2 * (p % 3)), (q // 3, 2 * (q % 3))))
    return HexagonDecomposition(len(code) // 3, tuple(gl))


def _rooted_code(d, root, rot):
    """Breadth-first code of ``d`` from hexagon ``root`` rotated by ``rot`` (slot ``2 k`` reads old ``2 k + 2 rot``)."""
    H = d.num_hexagons
    label = {root: 0}
    rotation = {root: rot}
    order = [root]
    code = [0] * (3 * H)
    partner = d.partner
    i = 0
    while i < len(order):
        h = order[i]
        for k in range(3):
            h2, s2 = partner[(h, (2 * k + 2 * rotation[h]) % 6)]
            if h2 not in label:
                label[h2] = len(order)
                rotation[h2] = s2 // 2
                order.append(h2)
            k2 = (s2 // 2 - rotation[h2]) % 3
            code[3 * i + k] = 3 * label[h2] + k2
        i += 1
    if len(order) != H:
        raise DecompositionError("decomposition is not connected")
    return tuple(code)


def reflect(d):
    """Mirror image: every slot ``s`` becomes ``-s``."""
    gl = tuple(((h1, -s1 % 6), (h2, -s2 % 6)) for (h1, s1), (h2, s2) in d.gluings)
    return HexagonDecomposition(d.num_hexagons, gl)


def _all_codes(d, reflection):
    variants = [d, reflect(d)] if reflection else [d]
    return [_rooted_code(v, h, r) for v in variants for h in range(d.num_hexagons) for r in range(3)]


def canonical_form(d, reflection=False):
    """Canonical representative; isomorphic inputs give equal outputs."""
    return _decode(min(_all_codes(d, reflection)))


def automorphism_count(d, reflection=False):
    """Number of isomorphisms from ``d`` to itself (with the reflection allowed if asked)."""
    codes = _all_codes(d, reflection)
    best = min(codes)
    return sum(1 for c in codes if c == best)


def rooted_codes(H):
    """Every rooted breadth-first code of a connected decomposition with ``H`` hexagons."""
    if int(H) != H or H < 1:
        raise DomainError(f"need a positive number of hexagons, got {H!r}")
    H = int(H)
    out = []
    code = [-1] * (3 * H)

    def extend(used):
        try:
            p = code.index(-1)
        except ValueError:
            if used == H:
                out.append(tuple(code))
            return
        if p >= 3 * used:
            return  # the discovered part is closed off before reaching every hexagon
        for q in range(p + 1, 3 * used):
            if code[q] == -1:
                code[p], code[q] = q, p
                extend(used)
                code[p] = code[q] = -1
        if used < H:
            q = 3 * used
            code[p], code[q] = q, p
            extend(used + 1)
            code[p] = code[q] = -1

    extend(1)
    return out


def _signature_from_code(code):
    d = _decode(code)
    try:
        return d, validate(d)
    except (DecompositionError, DomainError):
        return d, None


def enumerate_gluings(g, n, cap=DEFAULT_CAP, threads=1):
    """Canonical representatives of every decomposition of signature ``(g, n)``, sorted.

    One per orientation-preserving isomorphism class.  Raises
    ``ResourceCapError`` when ``4g - 4 + 2n`` exceeds ``cap``.
    """
    g, n = validate_signature(g, n)
    H = _num_hexagons(g, n)
    _check_cap(H, cap)

    def canon(code):
        d, sig = _signature_from_code(code)
        if sig != (g, n):
            return None
        return min(_all_codes(d, False))

    codes = rooted_codes(H)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            found = set(pool.map(canon, codes))
    else:
        found = {canon(c) for c in codes}
    found.discard(None)
    return [_decode(c) for c in sorted(found)]


@dataclass(frozen=True)
class IsoClass:
    representative: HexagonDecomposition
    automorphisms: int  # size of the automorphism group in the matching sense
    members: int        # inputs falling into this class


@dataclass(frozen=True)
class ClassReport:
    oriented: tuple     # classes up to orientation-preserving isomorphism
    unoriented: tuple   # classes when the reflection is allowed

    def labeled_total(self):
        """Distinct labeled gluings in the oriented classes (orbit-stabilizer)."""
        return sum(labeled_count(c.representative) for c in self.oriented)


def labeled_count(d):
    """Size of the relabeling orbit of ``d``: ``H! 3^H / |Aut|``."""
    H = d.num_hexagons
    return math.factorial(H) * 3 ** H // automorphism_count(d)


def iso_classes(decompositions):
    """Group decompositions by isomorphism, with and without the reflection."""
    out = []
    for reflection in (False, True):
        groups = {}
        for d in decompositions:
            key = min(_all_codes(d, reflection))
            groups[key] = groups.get(key, 0) + 1
        classes = []
        for key in sorted(groups):
            rep = _decode(key)
            classes.append(IsoClass(rep, automorphism_count(rep, reflection), groups[key]))
        out.append(tuple(classes))
    return ClassReport(*out)


def _matchings(items):
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for m in _matchings(rest):
            yield [(first, items[i])] + m


def brute_force_labeled(g, n, max_hexagons=4):
    """Count labeled gluings of signature ``(g, n)`` by trying every perfect matching of arc slots.

    Independent of the rooted generator; only feasible for a handful of
    hexagons.
    """
    g, n = validate_signature(g, n)
    H = _num_hexagons(g, n)
    _check_cap(H, max_hexagons)
    slots = [(h, s) for h in range(H) for s in (0, 2, 4)]
    total = 0
    for m in _matchings(slots):
        d = HexagonDecomposition(H, tuple(m))
        try:
            if validate(d) == (g, n):
                total += 1
        except (DecompositionError, DomainError):
            continue
    return total


def counting_formula(g):
    """``2 (6g - 5)! / (12^g g! (3g - 3)!)`` as an exact fraction."""
    if int(g) != g or g < 1:
        raise DomainError(f"genus must be an integer >= 1, got {g!r}")
    g = int(g)
    return Fraction(2 * math.factorial(6 * g - 5), 12 ** g * math.factorial(g) * math.factorial(3 * g - 3))


def compare_with_formula(g, cap=DEFAULT_CAP, threads=1):
    """Enumerated one-boundary classes of genus ``g`` next to the counting formula.

    Disagreement is reported, not raised.  ``weighted`` is the sum of
    ``1 / |Aut|`` over oriented classes.
    """
    reps = enumerate_gluings(g, 1, cap=cap, threads=threads)
    report = iso_classes(reps)
    weighted = sum((Fraction(1, c.automorphisms) for c in report.oriented), Fraction(0))
    weighted_unoriented = sum((Fraction(1, c.automorphisms) for c in report.unoriented), Fraction(0))
    formula = counting_formula(g)
    return {
        "genus": int(g),
        "boundary_components": 1,
        "hexagons": _num_hexagons(int(g), 1),
        "enumerated": len(report.oriented),
        "enumerated_with_reflection": len(report.unoriented),
        "automorphisms": [c.automorphisms for c in report.oriented],
        "weighted": _fraction_str(weighted),
        "weighted_with_reflection": _fraction_str(weighted_unoriented),
        "formula_value": _fraction_str(formula),
        "formula_is_integer": formula.denominator == 1,
        "agree": formula == len(report.oriented),
        "agree_weighted": formula == weighted,
    }


def _fraction_str(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def report_to_json(report):
    return json.dumps(report, sort_keys=True)
