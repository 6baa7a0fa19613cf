import pytest

import fixture_lib
import helpers
import persistence_oracle
from morseflow import model, moves, persistence
from morseflow.errors import (
    DuplicateValue,
    DuplicateValues,
    NotEligible,
    UnknownId,
    ValueOrderViolation,
)
from morseflow.moves import MoveKind, MoveRequest


def test_default_barcode_hand_checked():
    bc = persistence.compute_barcode(model.new_default())
    assert len(bc.bars) == 2
    ess = bc.essential()
    assert (ess.birth, ess.death) == (0.0, 3.0)
    assert (ess.birth_sing, ess.death_sing) == ("n0", "n2")
    (bar,) = bc.regular()
    assert bar.dim == 1
    # the saddle pairs with the lower source
    assert (bar.birth_sing, bar.death_sing) == ("n3", "n1")
    assert (bar.birth, bar.death) == (1.0, 2.0)


def test_minimal_single_essential_bar():
    bc = persistence.compute_barcode(model.new_minimal())
    assert len(bc.bars) == 1
    assert bc.bars[0].dim == "essential"


def test_bars_sorted_by_persistence():
    skel = fixture_lib.build_scenario("msc_design").skeleton
    bc = persistence.compute_barcode(skel)
    pers = [b.persistence for b in bc.bars]
    assert pers == sorted(pers, reverse=True)
    assert all(p >= 0 for p in pers)


def test_bar_count_rule_and_partition():
    for name, skel in fixture_lib.all_valid_fixtures().items():
        bc = persistence.compute_barcode(skel)
        assert len(bc.bars) == skel.counts()["saddle"] + 1, name
        seen = [b.birth_sing for b in bc.bars] + [b.death_sing for b in bc.bars]
        assert len(seen) == len(set(seen)), name  # every singularity in one bar
        assert sum(1 for b in bc.bars if b.dim == "essential") == 1


def test_oracle_equivalence_on_fixtures():
    for name, skel in fixture_lib.all_valid_fixtures().items():
        assert len(skel.singularities) <= 12
        got = persistence_oracle.barcode_as_set(persistence.compute_barcode(skel))
        want = persistence_oracle.oracle_barcode(skel)
        assert got == want, name


def test_oracle_equivalence_on_random_fixtures():
    for seed in range(30):
        skel, _ = helpers.random_valid_sequence(seed, 5)
        got = persistence_oracle.barcode_as_set(persistence.compute_barcode(skel))
        want = persistence_oracle.oracle_barcode(skel)
        assert got == want, seed


def test_duplicate_values_rejected():
    s = model.new_default()
    s.sing("n1").value = 3.0  # collides with n2
    with pytest.raises(DuplicateValues):
        persistence.compute_barcode(s)


def test_eligible_pairs_default():
    s = model.new_default()
    bc = persistence.compute_barcode(s)
    assert persistence.eligible_pairs(s, bc) == [("n1", "n3")]


def test_eligible_pairs_minimal_empty():
    s = model.new_minimal()
    bc = persistence.compute_barcode(s)
    assert persistence.eligible_pairs(s, bc) == []


def test_nonadjacent_pair_excluded_until_adjacent():
    s = fixture_lib.build_scenario("nonadjacent_pair").skeleton
    bc = persistence.compute_barcode(s)
    pairs = {(b.dim, b.birth_sing, b.death_sing) for b in bc.regular()}
    assert (1, "n3", "n2") in pairs  # paired but not adjacent yet
    el = persistence.eligible_pairs(s, bc)
    assert el == [("n4", "n5")]
    s2, bc2 = persistence.simplify(s, el[0])
    assert persistence.eligible_pairs(s2, bc2) == [("n2", "n3")]


def test_simplify_minimum_pair_deletes_exactly_one_bar():
    skel = fixture_lib.build_scenario("msc_design").skeleton
    while True:
        bc = persistence.compute_barcode(skel)
        el = persistence.eligible_pairs(skel, bc)
        if not el:
            break
        before = {(b.dim, b.birth_sing, b.death_sing, b.birth, b.death) for b in bc.bars}
        skel, bc_after = persistence.simplify(skel, el[0])
        after = {(b.dim, b.birth_sing, b.death_sing, b.birth, b.death) for b in bc_after.bars}
        assert after < before
        assert len(before) - len(after) == 1
    assert skel.is_minimal()


def test_simplify_not_eligible():
    s = model.new_default()
    with pytest.raises(NotEligible):
        persistence.simplify(s, ("n2", "n3"))


def test_simplify_round_trip_restores_barcode():
    s = model.new_default()
    out = moves.apply_move(s, MoveRequest(MoveKind.FACE_MIN, {"cell": "c1"}))
    bc_before = persistence.compute_barcode(out.skeleton)
    values = {x.id: x.value for x in out.skeleton.singularities.values()}
    m_id, sad_id = out.new_singularities
    skel2, _ = persistence.simplify(out.skeleton, (m_id, sad_id))
    # re-apply the same move with recorded values
    out2 = moves.apply_move(skel2, MoveRequest(
        MoveKind.FACE_MIN, {"cell": "c1"},
        values={"extremum": values[m_id], "saddle": values[sad_id]}))
    bc_after = persistence.compute_barcode(out2.skeleton)
    assert {(b.dim, b.birth, b.death) for b in bc_before.bars} == \
        {(b.dim, b.birth, b.death) for b in bc_after.bars}


def test_set_value_raising_source_moves_essential_death():
    s = model.new_default()
    s2 = persistence.set_value(s, "n2", 7.5)
    bc = persistence.compute_barcode(s2)
    assert bc.essential().death == 7.5


def test_set_value_constraints():
    s = model.new_default()
    with pytest.raises(ValueOrderViolation):
        persistence.set_value(s, "n3", 0.0 - 1.0)  # saddle below its sink
    with pytest.raises(ValueOrderViolation):
        persistence.set_value(s, "n3", 2.5)  # saddle above a source
    with pytest.raises(DuplicateValue):
        persistence.set_value(s, "n1", 3.0)
    with pytest.raises(UnknownId):
        persistence.set_value(s, "zz", 1.0)
    # original untouched (pure)
    assert s.sing("n3").value == 1.0


def test_monotone_edit_preserves_pairing():
    s = fixture_lib.build_scenario("msc_design").skeleton
    bc = persistence.compute_barcode(s)
    bar = max(bc.regular(), key=lambda b: b.persistence)
    death = s.sing(bar.death_sing)
    values = sorted(x.value for x in s.singularities.values())
    i = values.index(death.value)
    # move the death value inside its order-preserving interval
    hi = values[i + 1] if i + 1 < len(values) else death.value + 1.0
    new_v = death.value + 0.5 * (hi - death.value)
    s2 = persistence.set_value(s, death.id, new_v)
    bc2 = persistence.compute_barcode(s2)
    assert {(b.dim, b.birth_sing, b.death_sing) for b in bc.bars} == \
        {(b.dim, b.birth_sing, b.death_sing) for b in bc2.bars}


def test_nested_bar_fixtures():
    for name, count in (("nested_1", 1), ("nested_2", 2), ("nested_3", 3)):
        skel = fixture_lib.build_scenario(name).skeleton
        bc = persistence.compute_barcode(skel)
        assert len(bc.bars) == count, name
        spans = sorted(((b.birth, b.death) for b in bc.bars),
                       key=lambda t: t[0] - t[1])
        for inner, outer in zip(spans[1:], spans):
            assert outer[0] < inner[0] and inner[1] < outer[1], name


def test_same_barcode_not_graph_equivalent():
    from morseflow import isomorphism

    a = fixture_lib.build_scenario("same_barcode_a").skeleton
    b = fixture_lib.build_scenario("same_barcode_b").skeleton
    bars_a = sorted((str(x.dim), x.birth, x.death)
                    for x in persistence.compute_barcode(a).bars)
    bars_b = sorted((str(x.dim), x.birth, x.death)
                    for x in persistence.compute_barcode(b).bars)
    assert bars_a == bars_b
    assert not isomorphism.graphs_isomorphic(a, b)
    assert not isomorphism.skeletons_isomorphic(a, b)
