import math

import numpy as np
import pytest

from helpers import SIGNATURES, random_surface, random_surfaces
from oracle import all_lengths
from orthoforge.constructions import (equal_length_surface, one_holed_torus, pants_decomposition, pants_from_cuffs,
                                      standard_decomposition)
from orthoforge.errors import DomainError, IncompleteSpectrumError
from orthoforge.hexagon_trig import altitude, bavard_bound, opposite_side
from orthoforge.metric import MetricSurface, total_boundary_length
from orthoforge.spectrum import (boundary_injectivity_radius, class_length, develop_class, enumerate_orthogeodesics,
                                 orthosystole, orthosystole_arcs, orthosystole_report, pruning_constant,
                                 spectral_gap, spectrum_from_csv, spectrum_to_csv, verify_hexdec_orthosystoles)

A2 = math.acosh(2.0)


def torus(a=A2):
    return MetricSurface(one_holed_torus(), (a, a, a))


def max_okiss(g, n):
    return 6 * g - 6 + 3 * n


def test_equal_torus():
    rep = orthosystole_report(torus())
    assert rep.osys == pytest.approx(A2, abs=1e-12)
    assert rep.okiss == 3
    assert boundary_injectivity_radius(torus()) == pytest.approx(0.6584789, abs=1e-7)


def test_pruning_constant_on_equal_hexagons():
    assert pruning_constant(torus()) == pytest.approx(A2, abs=1e-12)
    for a in (0.3, 1.0, 3.0):
        expect = min(opposite_side(a, a, a), altitude(a, a, a))
        assert pruning_constant(torus(a)) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("sig", SIGNATURES)
def test_equal_surfaces_reach_the_bound(sig):
    g, n = sig
    for L in (3.0, 15.0):
        X = equal_length_surface(standard_decomposition(g, n), L)
        osys, okiss = orthosystole(X)
        assert osys == pytest.approx(bavard_bound(g, n, L), abs=1e-9)
        assert okiss == max_okiss(g, n)


@pytest.mark.parametrize("sig", [(1, 1), (2, 1), (1, 2)])
def test_perturbed_equal_surface_is_strictly_worse(sig):
    g, n = sig
    X = equal_length_surface(standard_decomposition(g, n), 8.0)
    x = list(X.arc_lengths)
    x[0] += 0.05
    Y = X.with_lengths(x)
    osys, okiss = orthosystole(Y)
    assert osys < bavard_bound(g, n, total_boundary_length(Y))
    assert okiss < max_okiss(g, n)


@pytest.mark.parametrize("sig", [(1, 1), (0, 4), (1, 2), (2, 1)])
def test_classes_are_sound(sig):
    for X in random_surfaces(sig, 4, seed=21, low=0.3, high=2.0):
        rep = enumerate_orthogeodesics(X, 1.5 * max(X.arc_lengths))
        partner = X.decomposition.partner
        for c in rep.classes:
            assert c.length > 0
            if not c.crossings:
                assert c.length == X.arc_lengths[c.arc]
                continue
            # whole-hexagon placements, independent of the hop-by-hop search
            assert develop_class(X, c) == pytest.approx(c.length, rel=1e-9, abs=1e-9)
            back = tuple(partner[s] for s in reversed(c.crossings))
            assert class_length(X, back) == pytest.approx(c.length, rel=1e-9, abs=1e-12)
            assert class_length(X, c.crossings) == pytest.approx(c.length, rel=1e-12, abs=1e-14)


def test_no_backtracking():
    X = random_surfaces((2, 1), 1, seed=3, low=0.3, high=2.0)[0]
    partner = X.decomposition.partner
    for c in enumerate_orthogeodesics(X, 2.0 * max(X.arc_lengths)).classes:
        for (h, s), nxt in zip(c.crossings, c.crossings[1:]):
            assert nxt != partner[(h, s)]
            assert nxt[0] == partner[(h, s)][0]


def test_oracle_finds_nothing_shorter_on_equal_torus():
    X = torus()
    rep = orthosystole_report(X)
    lengths = all_lengths(X.decomposition, X.arc_lengths, 8)
    assert min(lengths) >= rep.osys - 1e-12
    second = 2.0 * math.asinh(math.cosh(A2) / math.sinh(A2 / 2))
    assert min(v for v in lengths if v > rep.osys + 1e-9) == pytest.approx(second, abs=1e-9)
    assert spectral_gap(X)[1] == pytest.approx(second, abs=1e-9)


@pytest.mark.parametrize("d", [one_holed_torus(), pants_decomposition()], ids=["torus", "pants"])
def test_matches_oracle_on_random_surfaces(d):
    rng = np.random.default_rng(1)
    for _ in range(4):
        x = rng.uniform(0.3, 2.5, 3)
        X = MetricSurface(d, tuple(x))
        cut = 2.5 * max(x)
        mine = sorted({round(c.length, 9) for c in enumerate_orthogeodesics(X, cut).classes if c.length <= 0.8 * cut})
        theirs = sorted({round(v, 9) for v in all_lengths(d, x, 6, dps=30) if v <= 0.8 * cut})
        assert mine == theirs


@pytest.mark.parametrize("sig", SIGNATURES)
def test_okiss_never_exceeds_arc_count(sig):
    g, n = sig
    for X in random_surfaces(sig, 100, seed=31):
        assert orthosystole(X)[1] <= max_okiss(g, n)


@pytest.mark.parametrize("sig", SIGNATURES)
def test_osys_below_bound(sig):
    g, n = sig
    worst = -math.inf
    for X in random_surfaces(sig, 10_000, seed=41):
        osys = orthosystole(X)[0]
        worst = max(worst, osys - bavard_bound(g, n, total_boundary_length(X)))
    assert worst <= 1e-9


@pytest.mark.parametrize("sig", [(1, 1), (0, 3), (2, 1), (1, 2)])
def test_spectral_gap_at_equal_point(sig):
    X = equal_length_surface(standard_decomposition(*sig), 6.0)
    rep = orthosystole_report(X)
    assert orthosystole_arcs(X, rep) == list(range(X.decomposition.num_arcs))
    osys, nxt, gap = spectral_gap(X)
    assert gap > 1e-3
    assert nxt == pytest.approx(osys + gap)


def test_verify_hexdec():
    for a in (0.05, 1.0, 4.0):
        assert verify_hexdec_orthosystoles(torus(a))
    X = equal_length_surface(standard_decomposition(2, 1), 9.0)
    x = list(X.arc_lengths)
    x[2] += 0.2
    assert not verify_hexdec_orthosystoles(X.with_lengths(x))
    assert not verify_hexdec_orthosystoles(pants_from_cuffs(6.0, 0.5, 0.5))


def _self_class(X, cuff):
    """Shortest class starting and ending on the same boundary component."""
    rep = enumerate_orthogeodesics(X, 2.0 * max(X.arc_lengths))
    cyc = X.decomposition.cycle_of_slot
    return min(c.length for c in rep.classes
               if c.crossings and cyc[c.start] == cyc[c.end] == cuff)


def test_long_cuff_self_class_beats_seams():
    X = pants_from_cuffs(6.0, 0.5, 0.5)
    cuff = max(range(3), key=lambda k: sum(X.side_lengths(h)[t] for h, t in X.decomposition.cycles[k]))
    short = _self_class(X, cuff)
    assert short < min(X.arc_lengths)
    assert _self_class(pants_from_cuffs(8.0, 0.5, 0.5), cuff) < short


def test_injectivity_radius_bound():
    for sig in [(1, 1), (2, 1), (0, 4)]:
        g, n = sig
        for X in random_surfaces(sig, 30, seed=51):
            L = total_boundary_length(X)
            r = boundary_injectivity_radius(X)
            assert r <= math.asinh(1 / (2 * math.sinh(L / (24 * g - 24 + 12 * n)))) + 1e-9


def test_csv_round_trip():
    X = random_surfaces((1, 2), 1, seed=6)[0]
    rep = enumerate_orthogeodesics(X, 2.0 * max(X.arc_lengths))
    text = spectrum_to_csv(rep)
    assert text.splitlines()[0] == "length,start_hex,start_slot,end_hex,end_slot,crossings"
    back = spectrum_from_csv(text)
    assert len(back) == len(rep.classes)
    for a, b in zip(back, rep.classes):
        assert (a.start, a.crossings, a.end) == (b.start, b.crossings, b.end)
        assert a.length == pytest.approx(b.length, rel=1e-11)


def test_frontier_cap():
    X = random_surfaces((2, 2), 1, seed=7)[0]
    with pytest.raises(IncompleteSpectrumError) as info:
        enumerate_orthogeodesics(X, 40.0, max_queue=50)
    assert info.value.required > 50


def test_threads_do_not_change_the_report():
    X = random_surfaces((2, 1), 1, seed=8)[0]
    one = enumerate_orthogeodesics(X, 1.5 * max(X.arc_lengths), threads=1)
    four = enumerate_orthogeodesics(X, 1.5 * max(X.arc_lengths), threads=4)
    assert spectrum_to_csv(one) == spectrum_to_csv(four)


def test_bad_inputs():
    with pytest.raises(DomainError):
        enumerate_orthogeodesics(torus(), -1.0)
    with pytest.raises(DomainError):
        class_length(torus(), ())
