"""Witness calculus tests (nowhere density, dense complements, unions).

Soundness is checked on a corpus of canonical names: every refinement must
be inside its input (exact subset test) and disjoint from the witnessed set
per that set's decidable membership oracle.
"""

import itertools
from fractions import Fraction as Q

import pytest

from bmgame import effective as eff
from bmgame import names as nm
from bmgame.topology import EUCLIDEAN, BasicOpen, Space, subset

LINE = Space(EUCLIDEAN, 1)


def eball(center, radius):
    return BasicOpen(EUCLIDEAN, (Q(center),), Q(radius))


def corpus(space, size):
    return list(itertools.islice(nm.iter_balls(space), size))


# --- CeOpenSet / member_semidecide ------------------------------------------


def test_member_semidecide_basic():
    u = eff.CeOpenSet.from_balls(LINE, [eball(0, 1)], "unit ball")
    assert eff.member_semidecide((Q(0),), u, 10) is not None
    assert eff.member_semidecide((Q(5),), u, 10) is None


def test_ce_open_restartable():
    u = eff.CeOpenSet.from_balls(LINE, [eball(0, 1), eball(3, 1)], "two balls")
    assert u.balls(10) == u.balls(10)


def test_skip_tokens_count_as_fuel():
    def factory():
        yield None
        yield None
        yield eball(0, 1)

    u = eff.CeOpenSet(LINE, factory, "lazy")
    assert eff.member_semidecide((Q(0),), u, 2) is None
    assert eff.member_semidecide((Q(0),), u, 3) is not None


# --- witness soundness over a name corpus -------------------------------------


def check_witness_soundness(witness, balls, probes_per_ball=40):
    for ball in balls:
        refined = witness.refine_ball(ball)
        assert subset(refined, ball), (witness.set_tag, ball)
        if witness.contains is None:
            continue
        lo = refined.center[0] - refined.radius
        hi = refined.center[0] + refined.radius
        for k in range(probes_per_ball + 1):
            x = lo + (hi - lo) * Q(k, probes_per_ball)
            if refined.contains_point((x,)):
                assert not witness.contains((x,)), (witness.set_tag, x)


def test_integer_lattice_witness_sound():
    witness = eff.integer_lattice_witness(LINE)
    check_witness_soundness(witness, corpus(LINE, 60))
    # exact: a refined interval never brackets an integer
    for ball in corpus(LINE, 60):
        refined = witness.refine_ball(ball)
        lo = refined.center[0] - refined.radius
        hi = refined.center[0] + refined.radius
        assert lo.numerator // lo.denominator >= hi.numerator // hi.denominator or hi <= (lo.numerator // lo.denominator) + 1


def test_singleton_witness_sound():
    witness = eff.singleton_witness(LINE, (Q(1, 2),))
    check_witness_soundness(witness, corpus(LINE, 60))
    refined = witness.refine_ball(eball(Q(1, 2), Q(1, 4)))
    assert not refined.contains_point((Q(1, 2),))


def test_progression_witness_sound():
    witness = eff.progression_witness(LINE, Q(1), Q(1, 2))
    check_witness_soundness(witness, corpus(LINE, 60))


def test_reciprocal_witness_avoids_closure_point():
    witness = eff.reciprocal_witness(LINE)
    check_witness_soundness(witness, corpus(LINE, 60))
    closure = eff.end_closure(
        witness,
        closure_contains=lambda p: p[0] == 0 or (p[0] > 0 and p[0].numerator == 1),
    )
    for ball in [eball(0, Q(1, 4)), eball(Q(1, 100), Q(1, 100)), eball(0, 1)]:
        refined = closure.refine_ball(ball)
        assert subset(refined, ball)
        assert not refined.contains_point((Q(0),))
        # no reciprocal inside either
        lo = refined.center[0] - refined.radius
        hi = refined.center[0] + refined.radius
        if hi > 0:
            k = max(1, (hi.denominator + hi.numerator - 1) // max(hi.numerator, 1))
            for kk in range(max(1, k - 2), k + 200):
                assert not refined.contains_point((Q(1, kk),))


def test_end_intersection_avoids_both():
    integers = eff.integer_lattice_witness(LINE)
    halves = eff.progression_witness(LINE, Q(1), Q(1, 2))
    both = eff.end_intersection([integers, halves])
    for ball in corpus(LINE, 60):
        refined = both.refine_ball(ball)
        assert subset(refined, ball)
        lo = refined.center[0] - refined.radius
        hi = refined.center[0] + refined.radius
        for k in range(48 + 1):
            x = lo + (hi - lo) * Q(k, 48)
            if refined.contains_point((x,)):
                assert not integers.contains((x,))
                assert not halves.contains((x,))


def test_end_intersection_composition_order():
    w = eff.integer_lattice_witness(LINE)
    twice = eff.end_intersection([w, w])
    for ball in corpus(LINE, 20):
        assert twice.refine_ball(ball) == w.refine_ball(w.refine_ball(ball))


def test_end_closure_reuses_refinement():
    w = eff.integer_lattice_witness(LINE)
    c = eff.end_closure(w)
    for ball in corpus(LINE, 20):
        assert c.refine_ball(ball) == w.refine_ball(ball)
    assert c.set_tag.startswith("closure of")


# --- dense c.e. open sets <-> witnesses -----------------------------------------


def test_end_from_dense_whole_space_ball():
    big = eball(0, 100)
    dense = eff.CeOpenSet.from_balls(LINE, [big], "one big ball")
    dense = eff.CeOpenSet(
        LINE, dense.factory, dense.tag, density_evidence=lambda u: big,
        finite_balls=dense.finite_balls,
    )
    witness = eff.end_from_dense_ce_open(dense)
    for ball in corpus(LINE, 30):
        if subset(ball, big):
            assert witness.refine_ball(ball) == ball


def test_end_from_dense_requires_evidence():
    bare = eff.CeOpenSet.from_balls(LINE, [eball(0, 1)], "no evidence")
    with pytest.raises(ValueError):
        eff.end_from_dense_ce_open(bare)


def test_dense_open_from_end_is_effectively_dense():
    witness = eff.integer_lattice_witness(LINE)
    dense = eff.dense_open_from_end(witness)
    emissions = dense.balls(50)
    for u, emitted in zip(nm.iter_balls(LINE), emissions):
        assert subset(emitted, u)
        # avoids all integers: exact bracketing check
        lo = emitted.center[0] - emitted.radius
        hi = emitted.center[0] + emitted.radius
        next_int = lo.numerator // lo.denominator + 1
        assert not (lo < next_int < hi)


def test_witness_dense_open_round_trip():
    # witness -> dense open avoiding the set -> complement witness: the
    # new refinements land inside the dense set, so they still avoid the
    # original set on probe corpora.
    original = eff.integer_lattice_witness(LINE)
    dense = eff.dense_open_from_end(original)
    round_tripped = eff.end_from_dense_ce_open(dense)
    for ball in corpus(LINE, 40):
        refined = round_tripped.refine_ball(ball)
        assert subset(refined, ball)
        lo = refined.center[0] - refined.radius
        hi = refined.center[0] + refined.radius
        assert not lo.numerator // lo.denominator + 1 < hi  # no integer inside


def test_dense_open_from_identity_witness_enumerates_basis():
    witness = eff.empty_set_witness(LINE)
    dense = eff.dense_open_from_end(witness)
    assert dense.balls(5) == corpus(LINE, 5)


# --- presentations ---------------------------------------------------------------


def test_presentation_padding():
    w = eff.integer_lattice_witness(LINE)
    pres = eff.MeagerPresentation.from_witnesses(LINE, [w], "integers")
    assert pres.layer(1).set_tag == w.set_tag
    assert pres.layer(5).set_tag == "empty set"
    with pytest.raises(ValueError):
        pres.layer(0)


def test_meager_union_single_presentation_reindexes():
    pres = eff.rational_singletons_presentation(LINE, Q(0), Q(1))
    union = eff.meager_union([pres])
    for n in range(1, 6):
        assert union.layer(n).set_tag == pres.layer(n).set_tag


def test_meager_union_diagonal_covers_everything():
    a = eff.MeagerPresentation.from_witnesses(
        LINE, [eff.singleton_witness(LINE, (Q(0),))], "zero"
    )
    b = eff.MeagerPresentation.from_witnesses(
        LINE, [eff.singleton_witness(LINE, (Q(1, 2),))], "half"
    )
    union = eff.meager_union([a, b])
    tags = {union.layer(n).set_tag for n in range(1, 6)}
    assert "point 0/1" in tags
    assert "point 1/2" in tags


def test_rational_singletons_canonical_order():
    pres = eff.rational_singletons_presentation(LINE, Q(0), Q(1))
    assert pres.layer(1).set_tag == "point 1/2"
    assert pres.layer(2).set_tag == "point 1/3"
    assert pres.layer(3).set_tag == "point 2/3"
    assert eff.nth_rational_in(Q(0), Q(1), 4) == Q(1, 4)


def test_presentation_file_round_trip():
    text = "\n".join(
        [
            eff.PRESENTATION_HEADER,
            "# a comment",
            "integers",
            "singleton 1/2",
            "progression 1 1/2",
        ]
    )
    pres = eff.parse_presentation_file(LINE, text)
    tags = [pres.layer(n).set_tag for n in range(1, 7)]
    assert any("integer" in t for t in tags)
    assert any(t == "point 1/2" for t in tags)
    with pytest.raises(ValueError):
        eff.parse_presentation_file(LINE, "integers\n")
    with pytest.raises(ValueError):
        eff.parse_presentation_file(LINE, eff.PRESENTATION_HEADER + "\nfrobnicate 1")
