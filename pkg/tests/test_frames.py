"""Posets, N-frames, validity, enumeration, and the frame classes."""

import random

import pytest

from subminimal.frames import (
    LOGICS,
    NFrame,
    NModel,
    Poset,
    SearchTimeout,
    canonical_poset_key,
    check_nframe,
    countermodel_search,
    enumerate_nframes,
    enumerate_ntables,
    enumerate_posets,
    enumerate_posets_unlabeled,
    enumerate_upsets,
    eval_formula,
    frame_class,
    frame_from_dict,
    frame_to_dict,
    frame_validates,
    from_neighbourhood,
    model_from_dict,
    model_to_dict,
    nframe_isomorphic,
    ntable_from_upset_map,
    poset_from_dict,
    poset_isomorphic,
    poset_to_dict,
    random_nframe,
    random_ntable,
    random_poset,
    refuting_valuation,
    to_neighbourhood,
)
from subminimal.syntax import (
    AXIOM_COPC,
    AXIOM_MPC,
    AXIOM_N,
    AXIOM_NEF,
    parse,
    random_formula,
)

CHAIN2 = Poset(2, (3, 2))
LAWFUL2 = ntable_from_upset_map(CHAIN2, {0: 2, 2: 3, 3: 2})
SEPARATING = NFrame(CHAIN2, ntable_from_upset_map(CHAIN2, {0: 2, 2: 3, 3: 2}))


def test_poset_validation():
    with pytest.raises(ValueError):
        Poset(2, (3,))
    with pytest.raises(ValueError):
        Poset(2, (2, 1))  # not reflexive
    with pytest.raises(ValueError):
        Poset(2, (3, 3))  # 0 <= 1 <= 0 without 0 = 1
    p = Poset.from_pairs(3, [(0, 1), (1, 2)])
    assert p.le(0, 2)
    assert not p.le(2, 0)


def test_upsets_of_chain_and_antichain():
    assert enumerate_upsets(CHAIN2) == [0, 2, 3]
    assert len(enumerate_upsets(Poset(3, (1, 2, 4)))) == 8
    assert len(enumerate_upsets(Poset.from_pairs(4, [(0, 1), (0, 2), (1, 3), (2, 3)]))) == 6


def test_labeled_enumeration_counts():
    assert [len(list(enumerate_posets(n))) for n in (1, 2, 3)] == [1, 3, 19]
    assert [
        sum(len(enumerate_ntables(p)) for p in enumerate_posets(n))
        for n in (1, 2, 3)
    ] == [4, 46, 1282]


def test_unlabeled_enumeration_counts():
    assert [len(enumerate_posets_unlabeled(n)) for n in range(1, 7)] == [
        1,
        2,
        5,
        16,
        63,
        318,
    ]


def test_check_nframe_accepts_lawful_table():
    assert check_nframe(CHAIN2, LAWFUL2) is None


def test_check_nframe_reports_first_violation():
    bad = ntable_from_upset_map(CHAIN2, {0: 0, 2: 0, 3: 3})
    assert check_nframe(CHAIN2, bad) == (3, 2)


def test_check_nframe_rejects_non_upset_values():
    with pytest.raises(ValueError):
        check_nframe(CHAIN2, (1, -1, 3, 2))


def test_ntable_from_upset_map_requires_full_domain():
    with pytest.raises(ValueError):
        ntable_from_upset_map(CHAIN2, {0: 2, 2: 3})


def test_eval_formula_hand_values():
    m = NModel(SEPARATING, {"p": 2, "q": 0})
    assert eval_formula(m, parse("p")) == 2
    assert eval_formula(m, parse("~p")) == 3
    assert eval_formula(m, parse("~q")) == 2
    assert eval_formula(m, parse("p -> q")) == 0
    assert eval_formula(m, parse("T")) == 3


def test_separating_frame_classes():
    want = {"n": True, "nef": True, "copc": False, "mpc": False}
    got = {name: frame_class(SEPARATING, logic) for name, logic in LOGICS.items()}
    assert got == want


def test_frame_class_cross_check_on_all_two_world_frames():
    for n in (1, 2):
        for p in enumerate_posets(n):
            for fr in enumerate_nframes(p):
                for logic in LOGICS.values():
                    assert frame_class(fr, logic) == frame_class(
                        fr, logic, cross_check=True
                    )


def test_lawful_frames_validate_the_base_axiom():
    rng = random.Random(30)
    for _ in range(100):
        fr = random_nframe(rng, rng.randint(1, 4))
        assert frame_validates(fr, AXIOM_N)


def test_refuting_valuation_refutes():
    hit = refuting_valuation(SEPARATING, AXIOM_COPC)
    assert hit is not None
    val, world = hit
    full = 3
    assert eval_formula(NModel(SEPARATING, val), AXIOM_COPC) != full
    assert not (eval_formula(NModel(SEPARATING, val), AXIOM_COPC) >> world) & 1


def test_countermodel_search_separates_nef_from_copc():
    hit = countermodel_search(LOGICS["nef"], AXIOM_COPC, 4)
    assert hit is not None
    model, world = hit
    assert nframe_isomorphic(model.frame, SEPARATING)
    assert model.valuation == {"p": 0, "q": 2}
    assert world == 0


def test_countermodel_search_separates_n_from_nef():
    hit = countermodel_search(LOGICS["n"], AXIOM_NEF, 4)
    assert hit is not None
    model, world = hit
    assert model.frame.poset.n == 1
    full = (1 << model.frame.poset.n) - 1
    assert eval_formula(model, AXIOM_NEF) != full


def test_countermodel_search_refutes_mpc_axiom_in_copc():
    hit = countermodel_search(LOGICS["copc"], AXIOM_MPC, 4)
    assert hit is not None
    model, world = hit
    assert model.frame.poset.n == 1
    assert not (eval_formula(model, AXIOM_MPC) >> world) & 1


def test_countermodel_search_none_for_valid_formula():
    assert countermodel_search(LOGICS["n"], AXIOM_N, 3) is None


def test_countermodel_search_timeout():
    import time

    with pytest.raises(SearchTimeout, match="no verdict within the budget"):
        countermodel_search(LOGICS["n"], AXIOM_NEF, 4, deadline=time.time() - 1)


def test_neighbourhood_round_trip():
    rng = random.Random(31)
    for _ in range(50):
        fr = random_nframe(rng, rng.randint(1, 4))
        nbhd = to_neighbourhood(fr)
        assert from_neighbourhood(fr.poset, nbhd) == fr


def test_poset_isomorphism():
    a = Poset.from_pairs(3, [(0, 1), (0, 2)])
    b = Poset.from_pairs(3, [(2, 0), (2, 1)])
    c = Poset.from_pairs(3, [(0, 1), (1, 2)])
    assert poset_isomorphic(a, b)
    assert not poset_isomorphic(a, c)


def test_nframe_isomorphism_respects_tables():
    other = NFrame(CHAIN2, ntable_from_upset_map(CHAIN2, {0: 3, 2: 3, 3: 3}))
    assert nframe_isomorphic(SEPARATING, SEPARATING)
    assert not nframe_isomorphic(SEPARATING, other)


def test_canonical_key_constant_on_relabelings():
    rng = random.Random(32)
    for _ in range(40):
        p = random_poset(rng, rng.randint(1, 5))
        order = list(range(p.n))
        rng.shuffle(order)
        up = [0] * p.n
        for w in range(p.n):
            m = p.up[w]
            acc = 0
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                acc |= 1 << order[v]
            up[order[w]] = acc
        q = Poset(p.n, up)
        assert canonical_poset_key(p) == canonical_poset_key(q)
        assert poset_isomorphic(p, q)


def test_random_generators_are_lawful():
    rng = random.Random(33)
    for _ in range(60):
        p = random_poset(rng, rng.randint(1, 5))
        table = random_ntable(rng, p)
        assert check_nframe(p, table) is None
        fr = random_nframe(rng, rng.randint(1, 5))
        assert check_nframe(fr.poset, fr.ntable) is None


def test_json_round_trips():
    rng = random.Random(34)
    for _ in range(40):
        fr = random_nframe(rng, rng.randint(1, 4))
        assert frame_from_dict(frame_to_dict(fr)) == fr
        p = fr.poset
        assert poset_from_dict(poset_to_dict(p)) == p
        ups = enumerate_upsets(p)
        m = NModel(fr, {"p": rng.choice(ups), "q": rng.choice(ups)})
        back = model_from_dict(model_to_dict(m))
        assert back.frame == m.frame
        assert dict(back.valuation) == dict(m.valuation)


def test_frame_from_dict_rejects_cyclic_order():
    d = frame_to_dict(SEPARATING)
    d["leq"] = [[0, 1], [1, 0]]
    with pytest.raises(ValueError):
        frame_from_dict(d)


def test_validity_is_monotone_down_the_chain():
    # a frame in a stronger class validates every weaker axiom
    rng = random.Random(35)
    order = ["n", "nef", "copc", "mpc"]
    for _ in range(60):
        fr = random_nframe(rng, rng.randint(1, 3))
        flags = [frame_class(fr, LOGICS[name]) for name in order]
        for weak, strong in zip(flags, flags[1:]):
            if strong:
                assert weak
