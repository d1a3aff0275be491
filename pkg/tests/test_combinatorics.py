import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orthoforge.combinatorics import (HexagonDecomposition, boundary_cycles, decomposition_from_json,
                                      decomposition_to_json, euler_characteristic_cw, fills, flip_arc,
                                      min_filling_size, validate)
from orthoforge.constructions import one_holed_torus, pants_decomposition, standard_decomposition
from orthoforge.enumeration import enumerate_gluings
from orthoforge.errors import DecompositionError, DomainError

from helpers import SIGNATURES


def test_fixed_decompositions():
    assert validate(one_holed_torus()) == (1, 1)
    assert validate(pants_decomposition()) == (0, 3)


@pytest.mark.parametrize("sig", SIGNATURES)
def test_standard_signature_and_euler(sig):
    d = standard_decomposition(*sig)
    g, n = validate(d)
    assert (g, n) == sig
    assert euler_characteristic_cw(d) == 2 - 2 * g - n
    assert len(boundary_cycles(d)) == n


@pytest.mark.parametrize("bad", [
    HexagonDecomposition(2, (((0, 0), (1, 0)), ((0, 2), (1, 2)))),                       # unglued arc-sides
    HexagonDecomposition(2, (((0, 0), (1, 0)), ((0, 2), (1, 2)), ((0, 4), (1, 3)))),     # odd slot glued
    HexagonDecomposition(2, (((0, 0), (1, 0)), ((0, 0), (1, 2)), ((0, 4), (1, 4)))),     # slot used twice
    HexagonDecomposition(2, (((0, 0), (0, 2)), ((0, 4), (0, 4)), ((1, 0), (1, 2)))),     # self-glued slot
    HexagonDecomposition(2, (((0, 0), (0, 2)), ((0, 4), (1, 4)), ((1, 0), (7, 2)))),     # unknown hexagon
])
def test_invalid_decompositions_raise(bad):
    with pytest.raises(DecompositionError):
        validate(bad)


def test_disconnected_raises():
    two = HexagonDecomposition(4, (((0, 0), (1, 0)), ((0, 2), (1, 2)), ((0, 4), (1, 4)),
                                   ((2, 0), (3, 0)), ((2, 2), (3, 2)), ((2, 4), (3, 4))))
    with pytest.raises(DecompositionError):
        validate(two)


@st.composite
def matchings(draw):
    H = draw(st.sampled_from([2, 4, 6]))
    slots = [(h, s) for h in range(H) for s in (0, 2, 4)]
    order = draw(st.permutations(slots))
    pairs = tuple((order[i], order[i + 1]) for i in range(0, len(order), 2))
    return HexagonDecomposition(H, pairs)


@given(matchings())
@settings(max_examples=300)
def test_validate_is_total_and_euler_agrees(d):
    try:
        g, n = validate(d)
    except DecompositionError:
        return
    assert euler_characteristic_cw(d) == 2 - 2 * g - n
    assert decomposition_from_json(json.dumps(decomposition_to_json(d)))[0] == d


def test_json_round_trip_with_lengths():
    d = standard_decomposition(2, 1)
    x = [0.5 + 0.1 * i for i in range(d.num_arcs)]
    d2, x2 = decomposition_from_json(json.dumps(decomposition_to_json(d, x)))
    assert d2 == d and x2 == x


def test_malformed_json():
    with pytest.raises(DecompositionError):
        decomposition_from_json('{"hexagons": 2}')


def test_full_arc_set_fills():
    for sig in SIGNATURES:
        d = standard_decomposition(*sig)
        census = fills(d, list(range(d.num_arcs)))
        assert census.fills and census.disks == d.num_hexagons


def test_empty_set_does_not_fill():
    assert not fills(standard_decomposition(1, 2), []).fills


@pytest.mark.parametrize("sig", [(0, 3), (1, 1), (1, 2), (0, 4), (2, 1)])
def test_filling_subsets_respect_minimum(sig):
    need = min_filling_size(*sig)
    for d in enumerate_gluings(*sig):
        for k in range(d.num_arcs + 1):
            for sub in itertools.combinations(range(d.num_arcs), k):
                if fills(d, list(sub)).fills:
                    assert k >= need


def test_one_two_minimum_filling_is_two():
    sizes = set()
    for d in enumerate_gluings(1, 2):
        for k in (1, 2):
            if any(fills(d, list(s)).fills for s in itertools.combinations(range(d.num_arcs), k)):
                sizes.add(k)
    assert min_filling_size(1, 2) == 2
    assert sizes == {2}


def test_fills_rejects_unknown_arc():
    with pytest.raises(DomainError):
        fills(one_holed_torus(), [5])


def test_relabel_preserves_signature():
    d = standard_decomposition(2, 1)
    rng = np.random.default_rng(0)
    for _ in range(20):
        perm = list(rng.permutation(d.num_hexagons))
        rot = list(rng.integers(0, 3, d.num_hexagons))
        assert validate(d.relabel(perm, rot)) == (2, 1)


@pytest.mark.parametrize("sig", SIGNATURES)
def test_flip_keeps_signature(sig):
    d = standard_decomposition(*sig)
    for i, (a, b) in enumerate(d.gluings):
        if a[0] != b[0]:
            assert validate(flip_arc(d, i)) == sig
