"""NS4 frames, the lifted negation, the translation, and En/Rn."""

import itertools
import random

import pytest

from subminimal.frames import (
    NFrame,
    NModel,
    Poset,
    enumerate_ntables,
    enumerate_posets,
    ntable_from_upset_map,
    random_nframe,
)
from subminimal.modal import (
    AXIOM_BBOX_CONTRA,
    COS4_AXIOMS,
    ModalNFrame,
    NS4Frame,
    NS4Model,
    NS4_AXIOMS,
    _box_conj_norm,
    cos4_check_frame,
    en_check,
    enumerate_ns4_frames,
    enumerate_preorders,
    lift_nstar,
    modal_nframe_from_dict,
    modal_nframe_to_dict,
    ns4_check_frame,
    ns4_eval,
    ns4_frame_validates,
    ns4_from_dict,
    ns4_refuting_valuation,
    ns4_to_dict,
    random_modal_ntable,
    random_ns4_frame,
    rn_validity,
    translation_gap_search,
    translation_preservation,
)
from subminimal.syntax import AXIOM_N, godel_translate, parse, random_formula

CHAIN = Poset.from_pairs(2, [(0, 1)])
SEPARATING = NFrame(CHAIN, ntable_from_upset_map(CHAIN, {0: 2, 2: 3, 3: 2}))
HAND = NS4Frame(2, (1, 2), (2, 2, 2, 2))


def M(s):
    return parse(s, "modal")


def test_ns4_frame_requires_a_preorder():
    with pytest.raises(ValueError):
        NS4Frame(2, (3, 1), (0, 0, 0, 0))


def test_lift_of_the_separating_frame_is_lawful():
    lifted = lift_nstar(SEPARATING)
    assert ns4_check_frame(lifted) is None
    for u in (0, 2, 3):
        assert lifted.ntable[u] == SEPARATING.ntable[u]


def test_ns4_check_frame_flags_a_mutation():
    lifted = lift_nstar(SEPARATING)
    bad = NS4Frame(
        2,
        lifted.rel,
        tuple(1 if x == 1 else v for x, v in enumerate(lifted.ntable)),
    )
    assert ns4_check_frame(bad) == ("value", 1)


def test_ns4_eval_hand_values():
    assert ns4_eval(NS4Model(lift_nstar(SEPARATING), {"p": 1}), M("[]T")) == 3
    assert ns4_check_frame(HAND) is None
    assert ns4_eval(NS4Model(HAND, {"p": 1}), M("[n]p")) == 2
    assert ns4_eval(NS4Model(HAND, {"p": 1}), M("[]p")) == 1
    assert ns4_eval(NS4Model(HAND, {"p": 1}), M("~p")) == 2


def test_all_two_world_frames_validate_the_axioms():
    frames = enumerate_ns4_frames(2)
    assert len(frames) == 82
    for fr in frames:
        for ax in NS4_AXIOMS.values():
            assert ns4_frame_validates(fr, ax)


def test_exhaustive_enumeration_is_guarded():
    with pytest.raises(ValueError, match="infeasible past 2 worlds"):
        enumerate_ns4_frames(3)


def test_preorder_count_on_two_worlds():
    assert len(enumerate_preorders(2)) == 4


def test_random_frames_are_lawful_and_sound():
    rng = random.Random(50)
    for _ in range(100):
        fr = random_ns4_frame(rng, 3)
        assert ns4_check_frame(fr) is None
        for ax in NS4_AXIOMS.values():
            assert ns4_frame_validates(fr, ax)


def test_bbox_reflexivity_is_not_a_theorem():
    assert any(
        not ns4_frame_validates(fr, M("[n]p -> p"))
        for fr in enumerate_ns4_frames(2)
    )
    assert ns4_refuting_valuation(HAND, M("[n]p -> p")) == ({"p": 0}, 1)


def test_lift_extends_the_table_on_random_frames():
    rng = random.Random(51)
    for _ in range(200):
        g = random_nframe(rng, rng.randrange(1, 4))
        lifted = lift_nstar(g)
        assert ns4_check_frame(lifted) is None
        for u in g.poset.upsets():
            assert lifted.ntable[u] == g.ntable[u]


def test_translated_base_axiom_matches_the_proof_goal():
    goal = M("[](([]([]p <-> []q)) -> []([n][]p <-> [n][]q))")
    assert _box_conj_norm(godel_translate(AXIOM_N)) == _box_conj_norm(goal)


def test_translation_preservation_fuzz():
    rng = random.Random(52)
    for _ in range(300):
        g = random_nframe(rng, rng.randrange(1, 5))
        names = ["p", "q"][: rng.randrange(1, 3)]
        upsets = g.poset.upsets()
        val = {nm: rng.choice(upsets) for nm in names}
        f = random_formula(rng, names, 3)
        assert translation_preservation(NModel(g, val), f) is None


def test_translation_gap_search_clean_on_small_frames():
    for n in (1, 2):
        for p in enumerate_posets(n):
            for t in enumerate_ntables(p):
                assert translation_gap_search(NFrame(p, t), 3) is None
    rng = random.Random(53)
    for _ in range(50):
        assert translation_gap_search(random_nframe(rng, 3), 3) is None


def test_en_matches_rn_on_all_two_world_tables():
    for values in itertools.product(range(4), repeat=4):
        fr = ModalNFrame(2, values)
        for k in range(3):
            assert en_check(fr, k) == rn_validity(fr, k)


def test_en_rn_reject_negative_arity():
    fr = ModalNFrame(1, (0, 0))
    with pytest.raises(ValueError):
        en_check(fr, -1)
    with pytest.raises(ValueError):
        rn_validity(fr, -1)


def test_cos4_hand_frames():
    assert cos4_check_frame(NS4Frame(2, (3, 2), (3, 3, 3, 3)))
    assert not cos4_check_frame(NS4Frame(2, (3, 2), (0, 0, 2, 3)))


def test_cos4_classification_on_two_worlds():
    frames = enumerate_ns4_frames(2)
    good = [fr for fr in frames if cos4_check_frame(fr)]
    assert len(good) == 29
    for fr in good:
        assert ns4_frame_validates(fr, AXIOM_BBOX_CONTRA)
        for ax in COS4_AXIOMS.values():
            assert ns4_frame_validates(fr, ax)
    # the check is exactly antitone table + antisymmetric order
    for fr in frames:
        anti = all(
            not (fr.ntable[y] & ~fr.ntable[x])
            for y in range(4)
            for x in range(4)
            if x & ~y == 0
        )
        po = all(
            not ((fr.rel[v] >> w) & 1) or v == w
            for w in range(2)
            for v in range(2)
            if (fr.rel[w] >> v) & 1
        )
        assert cos4_check_frame(fr) == (anti and po)


def test_ns4_json_round_trip():
    assert ns4_from_dict(ns4_to_dict(HAND)) == HAND
    rng = random.Random(54)
    for _ in range(30):
        fr = random_ns4_frame(rng, rng.randint(1, 3))
        assert ns4_from_dict(ns4_to_dict(fr)) == fr


def test_ns4_from_dict_validation():
    with pytest.raises(ValueError, match="out of range"):
        ns4_from_dict({"worlds": 2, "rel": [[0, 5]], "N": {"0": 0}})
    with pytest.raises(ValueError, match="cover every subset"):
        ns4_from_dict({"worlds": 2, "rel": [], "N": {"0": 0}})


def test_ns4_from_dict_closes_the_relation():
    fr = ns4_from_dict(
        {
            "worlds": 3,
            "rel": [[0, 1], [1, 2]],
            "N": {str(x): 0 for x in range(8)},
        }
    )
    assert (fr.rel[0] >> 2) & 1


def test_modal_nframe_json_round_trip():
    rng = random.Random(55)
    for _ in range(30):
        fr = random_modal_ntable(rng, rng.randint(1, 3))
        assert modal_nframe_from_dict(modal_nframe_to_dict(fr)) == fr
