"""Filtration construction, its defining conditions, and decide()."""

import random

import pytest

from subminimal.filtration import (
    FiltrationResult,
    ResourceLimitError,
    SearchTimeout,
    Verdict,
    check_conditions,
    close_sigma,
    decide,
    enumerate_filtrations,
    filtration_theorem_check,
    greatest_among,
    greatest_filtration,
)
from subminimal.frames import (
    LOGICS,
    NFrame,
    NModel,
    Poset,
    model_from_dict,
    nframe_isomorphic,
    ntable_from_upset_map,
    random_nframe,
)
from subminimal.syntax import (
    AXIOM_COPC,
    AXIOM_N,
    And,
    parse,
    random_formula,
    substitute,
    variables,
)


def fork_model():
    # three worlds, 0 below both 1 and 2; p holds exactly at 1, and the
    # negation sends every proper upset to the whole frame
    return model_from_dict(
        {
            "worlds": 3,
            "leq": [[0, 1], [0, 2]],
            "N": {"0": 7, "2": 7, "4": 7, "6": 7, "7": 0},
            "valuation": {"p": 2},
        }
    )


def random_model(rng, max_worlds=5, names=("p", "q")):
    fr = random_nframe(rng, rng.randint(1, max_worlds))
    ups = fr.poset.upsets()
    return NModel(fr, {x: rng.choice(ups) for x in names})


def test_close_sigma_is_a_closure():
    sigma = close_sigma([parse("~p")])
    assert sigma == frozenset({parse("~p"), parse("p")})
    bigger = close_sigma([parse("p & q -> ~p")])
    assert close_sigma(bigger) == bigger
    assert parse("p & q") in bigger


def test_greatest_filtration_of_the_fork():
    m = fork_model()
    r = greatest_filtration(m, close_sigma([parse("~p")]))
    assert r.pi == (0, 1, 0)
    q = r.quotient
    assert q.frame.poset.n == 2
    assert q.frame.poset.up == (3, 2)
    assert q.frame.ntable == ntable_from_upset_map(
        Poset(2, (3, 2)), {0: 3, 2: 3, 3: 0}
    )
    assert q.valuation == {"p": 2}


def test_greatest_filtration_requires_closed_sigma():
    with pytest.raises(ValueError, match="not subformula-closed"):
        greatest_filtration(fork_model(), [parse("~p")])


def test_conditions_hold_on_greatest_filtration():
    rng = random.Random(40)
    for _ in range(200):
        m = random_model(rng)
        sigma = close_sigma([random_formula(rng, ("p", "q"), 3)])
        r = greatest_filtration(m, sigma)
        assert check_conditions(m, r) is None


def test_truth_agreement_and_size_bound():
    rng = random.Random(41)
    for _ in range(200):
        m = random_model(rng)
        sigma = close_sigma([random_formula(rng, ("p", "q"), 3)])
        r = greatest_filtration(m, sigma)
        assert filtration_theorem_check(m, r) is None
        assert r.quotient.frame.poset.n <= 2 ** len(sigma)


def test_check_conditions_flags_a_corrupted_quotient():
    m = fork_model()
    sigma = close_sigma([parse("~p")])
    r = greatest_filtration(m, sigma)
    qposet = r.quotient.frame.poset
    # the whole frame maps to 0 in the greatest table, so sending it to
    # the whole frame instead escapes the class-wise bound
    bad_frame = NFrame(
        qposet, ntable_from_upset_map(qposet, {0: 3, 2: 3, 3: 3})
    )
    bad = FiltrationResult(
        NModel(bad_frame, r.quotient.valuation), r.pi, r.sigma
    )
    hit = check_conditions(m, bad)
    assert hit is not None
    assert hit[0] == "c"


def test_enumerate_filtrations_contains_dominated_variants():
    m = fork_model()
    sigma = close_sigma([parse("~p")])
    every = enumerate_filtrations(m, sigma)
    assert every
    g = greatest_filtration(m, sigma)
    assert any(r.quotient.frame == g.quotient.frame for r in every)
    for r in every:
        assert check_conditions(m, r) is None
        assert greatest_among(m, sigma, r)


def test_enumerate_filtrations_matches_brute_force():
    rng = random.Random(42)
    for _ in range(20):
        m = random_model(rng, max_worlds=3, names=("p",))
        sigma = close_sigma([parse("~p")])
        every = enumerate_filtrations(m, sigma)
        seen = {
            (r.quotient.frame.poset.up, r.quotient.frame.ntable) for r in every
        }
        assert len(seen) == len(every)
        g = greatest_filtration(m, sigma)
        k = g.quotient.frame.poset.n
        # brute force over every order on the classes and every upset
        # table: a pair is a filtration exactly when the checker says so
        from subminimal.frames import enumerate_ntables, enumerate_posets

        for qposet in enumerate_posets(k):
            for table in enumerate_ntables(qposet):
                try:
                    cand = FiltrationResult(
                        NModel(NFrame(qposet, table), g.quotient.valuation),
                        g.pi,
                        sigma,
                    )
                except ValueError:
                    # the projected valuation is not an upset of this
                    # order, so no filtration lives on it
                    assert (qposet.up, table) not in seen
                    continue
                ok = check_conditions(m, cand) is None
                assert ok == ((qposet.up, table) in seen)


def test_greatest_among_rejects_non_filtrations():
    m = fork_model()
    sigma = close_sigma([parse("~p")])
    r = greatest_filtration(m, sigma)
    qposet = r.quotient.frame.poset
    bad = FiltrationResult(
        NModel(
            NFrame(qposet, ntable_from_upset_map(qposet, {0: 3, 2: 3, 3: 3})),
            r.quotient.valuation,
        ),
        r.pi,
        r.sigma,
    )
    with pytest.raises(ValueError, match="not a filtration"):
        greatest_among(m, sigma, bad)


# ---------------------------------------------------------------------------
# decide


def test_decide_theorem_by_instance():
    v = decide(LOGICS["copc"], substitute(AXIOM_COPC, {"p": parse("p & p")}))
    assert v.status == "theorem"
    assert v.bound is None


def test_decide_weaker_axiom_is_instance_for_stronger_logic():
    v = decide(LOGICS["mpc"], AXIOM_N)
    assert v.status == "theorem"


def test_decide_refuted_with_witness():
    v = decide(LOGICS["nef"], AXIOM_COPC)
    assert v.status == "refuted"
    assert v.model is not None and v.world is not None
    two = NFrame(Poset(2, (3, 2)), ntable_from_upset_map(Poset(2, (3, 2)), {0: 2, 2: 3, 3: 2}))
    assert nframe_isomorphic(v.model.frame, two)


def test_decide_no_countermodel_up_to_bound():
    flipped = substitute(AXIOM_COPC, {"p": parse("q"), "q": parse("p")})
    v = decide(LOGICS["copc"], And(AXIOM_COPC, flipped), max_worlds=3)
    assert v.status == "no-countermodel-up-to-bound"
    assert v.bound == 3


def test_decide_certifies_small_fmp_theorems():
    # closure of p -> p has two members, so the finite-model bound is 4
    # and exhausting the search up to 4 worlds certifies the theorem
    v = decide(LOGICS["n"], parse("p -> p"), max_worlds=4)
    assert v.status == "theorem"
    assert v.bound == 4


def test_decide_resource_limit_is_honest():
    f = And(AXIOM_N, AXIOM_N)
    target = 1 << len(close_sigma([f]))
    with pytest.raises(
        ResourceLimitError,
        match=rf"needs frames up to {target} worlds, above the limit of 3",
    ):
        decide(LOGICS["n"], f, max_worlds=3)


def test_decide_timeout():
    flipped = substitute(AXIOM_COPC, {"p": parse("q"), "q": parse("p")})
    with pytest.raises(SearchTimeout):
        decide(LOGICS["nef"], And(AXIOM_COPC, flipped), timeout_ms=0)
