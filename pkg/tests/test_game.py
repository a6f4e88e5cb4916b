"""Game engine tests: validation, strategies, chains, H_n, transcripts."""

import itertools
from fractions import Fraction as Q

import pytest

from bmgame import effective as eff
from bmgame import game as gm
from bmgame.liouville import liouville_p2_strategy
from bmgame.topology import (
    EUCLIDEAN,
    BasicOpen,
    Space,
    closure_strictly_inside,
    diameter,
    disjoint,
    subset,
    unit_interval_space,
)


def eball(center, radius):
    return BasicOpen(EUCLIDEAN, (Q(center),), Q(radius))


UNIT = unit_interval_space()
REGION = UNIT.region_primary()  # (0,1)


# --- sessions and validation ----------------------------------------------------


def test_validate_move_examples():
    session = gm.GameSession(UNIT, 5)
    session.submit("P1", REGION)  # first move = region itself, ok
    session.submit("P2", eball(Q(1, 2), Q(1, 4)))  # (1/4, 3/4)
    with pytest.raises(gm.NotNested):
        session.submit("P1", eball(1, Q(1, 2)))  # (1/2, 3/2) escapes
    session.submit("P1", eball(Q(1, 2), Q(1, 8)))


def test_first_move_outside_region():
    session = gm.GameSession(UNIT, 5)
    with pytest.raises(gm.OutsideRegion):
        session.submit("P1", eball(Q(1, 2), Q(3, 4)))


def test_turn_and_finish_errors():
    session = gm.GameSession(UNIT, 1)
    with pytest.raises(gm.WrongTurn):
        session.submit("P2", REGION)
    session.submit("P1", REGION)
    session.submit("P2", REGION)
    assert session.status == "finished"
    with pytest.raises(gm.SessionFinished):
        session.submit("P1", REGION)


# --- P2 meager strategy ------------------------------------------------------------


def test_p2_meager_empty_presentation():
    pres = eff.MeagerPresentation.from_witnesses(
        UNIT, [eff.empty_set_witness(UNIT)], "nothing"
    )
    strat = gm.p2_meager_strategy(pres)
    ball, note = strat.respond([REGION])
    assert ball == REGION
    assert note["layer"] == "1"


def test_p2_meager_excludes_enumerated_rationals():
    pres = eff.rational_singletons_presentation(UNIT, 0, 1)
    session = gm.GameSession(UNIT, 10)
    gm.run(session, gm.halving_refinement("P1", REGION), gm.p2_meager_strategy(pres))
    responses = [m.ball for m in session.moves if m.player == "P2"]
    # response_k excludes the first k enumerated rationals, exactly
    for k, ball in enumerate(responses, start=1):
        for j in range(1, k + 1):
            q_j = eff.nth_rational_in(Q(0), Q(1), j)
            assert not ball.contains_point((q_j,)), (k, q_j)
    # nesting at every step
    history = session.history()
    for prev, cur in zip(history, history[1:]):
        assert subset(cur, prev)


def test_p2_meager_response_is_deterministic():
    pres = eff.rational_singletons_presentation(UNIT, 0, 1)
    a = gm.p2_meager_strategy(pres).respond([REGION])
    b = gm.p2_meager_strategy(pres).respond([REGION])
    assert a == b


# --- P1 point-meager strategy ---------------------------------------------------


def test_p1_point_meager_shrinkage():
    space = Space(EUCLIDEAN, 1, (eball(0, 1),))
    local = eff.rational_singletons_presentation(space, -1, 1)
    p1 = gm.p1_point_meager_strategy(eball(0, 1), local)
    session = gm.GameSession(space, 12)
    gm.run(session, p1, gm.copycat("P2"))
    p1_moves = [m.ball for m in session.moves if m.player == "P1"]
    history = session.history()
    for k, ball in enumerate(p1_moves, start=1):
        assert diameter(ball) < Q(1, k) or k == 1
    for k in range(2, len(p1_moves) + 1):
        prev = history[2 * k - 3]  # G_{2k-2}
        assert closure_strictly_inside(p1_moves[k - 1], prev)
    point = gm.limit_point(session, Q(1, 2**10))
    for j in range(1, 13):
        assert point[0] != eff.nth_rational_in(Q(-1), Q(1), j)


# --- limit_point -------------------------------------------------------------------


def test_limit_point_examples():
    session = gm.GameSession(Space(EUCLIDEAN, 1, (eball(Q(1, 3), Q(1, 4)),)), 5)
    session.submit("P1", eball(Q(1, 3), Q(1, 4)))
    session.submit("P2", eball(Q(1, 3) + Q(1, 64), Q(1, 16)))
    session.submit("P1", eball(Q(1, 3), Q(1, 128)))
    approx = gm.limit_point(session, Q(1, 16))
    assert abs(approx[0] - Q(1, 3)) < Q(1, 16)
    # eps larger than the first move's diameter: first center
    assert gm.limit_point(session, Q(10)) == (Q(1, 3),)
    with pytest.raises(gm.PrecisionUnreached):
        gm.limit_point(session, Q(1, 2**40))


# --- chains and H_n ------------------------------------------------------------------


def test_enumerate_chains_breadth_one():
    chains = list(gm.enumerate_chains(UNIT, liouville_p2_strategy(), 1, breadth=1))
    assert len(chains) == 1
    g1, g2 = chains[0].sets
    assert g1 == REGION
    assert subset(g2, g1)


def test_enumerate_chains_breadth_three_validated():
    chains = list(gm.enumerate_chains(UNIT, liouville_p2_strategy(), 1, breadth=3))
    assert 1 <= len(chains) <= 3
    for chain in chains:
        g1, g2 = chain.sets
        assert subset(g2, g1)


def test_chain_continuation_prefixes():
    strat = liouville_p2_strategy()
    for n in (1, 2):
        shorter = {c.sets[: 2 * n] for c in gm.enumerate_chains(UNIT, strat, n, breadth=2)}
        for chain in gm.enumerate_chains(UNIT, strat, n + 1, breadth=2):
            assert chain.sets[: 2 * n] in shorter


def test_build_hn_greedy():
    strat = liouville_p2_strategy()
    first_chain = next(gm.enumerate_chains(UNIT, strat, 1, breadth=3))
    h1 = gm.build_Hn(UNIT, strat, 1, fuel=1, breadth=3)
    assert h1 == [first_chain.top]
    for n in (1, 2):
        members = gm.build_Hn(UNIT, strat, n, fuel=50, breadth=3)
        for a, b in itertools.combinations(members, 2):
            assert disjoint(a, b)
        doubled = gm.build_Hn(UNIT, strat, n, fuel=100, breadth=3)
        assert doubled[: len(members)] == members


def test_density_probe_always_certifies():
    strat = liouville_p2_strategy()
    probes = [eball(Q(1, 10), Q(1, 20)), eball(Q(9, 10), Q(1, 16)), eball(Q(1, 2), Q(1, 3))]
    for probe in probes:
        result = gm.density_probe(UNIT, strat, 1, probe, fuel=100)
        assert result is not None
        if result.via == "member":
            assert not disjoint(result.ball, probe)
        else:
            assert subset(result.ball, probe)
    with pytest.raises(gm.OutsideRegion):
        gm.density_probe(UNIT, strat, 1, eball(5, 1), fuel=10)


def test_extract_meager_presentation_liouville_layer1():
    strat = liouville_p2_strategy()
    pres = gm.extract_meager_presentation(UNIT, strat, fuel_schedule=lambda n: 5000)
    witness = pres.layer(1)
    refined = witness.refine_ball(REGION)
    assert subset(refined, REGION)
    # the refinement lies inside the union of H_1: some emitted member contains it
    union = gm.hn_union_ce(UNIT, strat, 1)
    members = union.balls(50)
    assert any(subset(refined, m) for m in members)


def test_extract_from_strict_subball_strategy_sound_on_corpus():
    # A P2 that always plays a strict sub-ball of the previous move; the
    # extracted layer-1 witness must refine soundly across a 50-name corpus.
    from bmgame.topology import half_closure_ball

    def respond(history):
        return half_closure_ball(history[-1]), {}

    strat = gm.Strategy("P2", "strict-subball", respond)
    extracted = gm.extract_meager_presentation(UNIT, strat, fuel_schedule=lambda n: 6000)
    witness = extracted.layer(1)
    from bmgame import names as nm

    for ball in nm.first_nested(UNIT, REGION, 50):
        refined = witness.refine_ball(ball)
        assert subset(refined, ball)


def test_extract_meager_presentation_avoids_integers():
    big = eball(Q(3, 2), Q(3, 2))  # (0, 3)
    space = Space(EUCLIDEAN, 1, (big,))
    pres_in = eff.MeagerPresentation.from_witnesses(
        space, [eff.integer_lattice_witness(space)], "integers"
    )
    strat = gm.p2_meager_strategy(pres_in)
    extracted = gm.extract_meager_presentation(space, strat, fuel_schedule=lambda n: 4000)
    witness = extracted.layer(1)
    for u in [big, eball(Q(3, 4), Q(1, 2)), eball(2, Q(1, 2))]:
        refined = witness.refine_ball(u)
        assert subset(refined, u)
        for m in (0, 1, 2, 3):
            assert not refined.contains_point((Q(m),))


def test_two_dimensional_meager_game():
    box = BasicOpen(EUCLIDEAN, (Q(1, 2), Q(1, 2)), Q(1, 2))
    space = Space(EUCLIDEAN, 2, (box,))
    target = (Q(1, 2), Q(1, 2))
    pres = eff.MeagerPresentation.from_witnesses(
        space, [eff.singleton_witness(space, target)], "center point"
    )
    session = gm.GameSession(space, 5)
    transcript = gm.run(
        session, gm.halving_refinement("P1", box), gm.p2_meager_strategy(pres)
    )
    history = session.history()
    for prev, cur in zip(history, history[1:]):
        assert subset(cur, prev)
    for move in transcript.moves:
        if move.player == "P2":
            assert not move.ball.contains_point(target)
    # round trip the 2-d transcript
    assert gm.parse_transcript(transcript.serialize()).serialize() == transcript.serialize()


# --- referee loop and transcripts ------------------------------------------------------


def test_run_machine_vs_machine():
    session = gm.GameSession(UNIT, 5)
    transcript = gm.run(
        session, gm.halving_refinement("P1", REGION), liouville_p2_strategy()
    )
    assert len(transcript.moves) == 10
    assert transcript.stopped is None


def test_run_external_invalid_move_stops():
    def external(history):
        if not history:
            return REGION
        return eball(2, 1)  # not nested

    session = gm.GameSession(UNIT, 5)
    transcript = gm.run(session, external, liouville_p2_strategy())
    assert transcript.stopped is not None
    rnd, player, code = transcript.stopped
    assert (rnd, player, code) == (2, "P1", "NotNested")
    assert len(transcript.moves) == 2
    # the stop marker survives a serialization round trip
    parsed = gm.parse_transcript(transcript.serialize())
    assert parsed.stopped == transcript.stopped
    assert parsed.serialize() == transcript.serialize()


def test_cauchy_centers_bound():
    # |c_j - c_k| is bounded by the diameter of the earlier move, exactly.
    session = gm.GameSession(UNIT, 12)
    gm.run(session, gm.halving_refinement("P1", REGION), liouville_p2_strategy())
    history = session.history()
    for j, a in enumerate(history):
        for b in history[j:]:
            assert abs(a.center[0] - b.center[0]) <= diameter(a)


def test_transcript_round_trip_and_replay():
    session = gm.GameSession(UNIT, 4)
    transcript = gm.run(
        session, gm.halving_refinement("P1", REGION), liouville_p2_strategy()
    )
    text = transcript.serialize()
    parsed = gm.parse_transcript(text)
    assert parsed.serialize() == text
    replayed = gm.replay_transcript(parsed)
    assert replayed.history() == session.history()


def test_transcript_determinism():
    def play():
        session = gm.GameSession(UNIT, 6)
        return gm.run(
            session, gm.halving_refinement("P1", REGION), liouville_p2_strategy()
        ).serialize()

    assert play() == play()


def test_replay_rejects_tampered_transcript():
    session = gm.GameSession(UNIT, 3)
    transcript = gm.run(
        session, gm.halving_refinement("P1", REGION), liouville_p2_strategy()
    )
    moves = list(transcript.moves)
    bad = moves[2]
    moves[2] = gm.Move(bad.round, bad.player, eball(Q(1, 2), Q(5, 8)), bad.note)
    tampered = gm.Transcript(
        transcript.space, transcript.rounds, transcript.p1, transcript.p2, tuple(moves)
    )
    with pytest.raises(gm.GameError):
        gm.replay_transcript(tampered)
