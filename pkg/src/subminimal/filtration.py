"""Filtrations of N-models through subformula-closed sets.

A filtration of a model through Sigma is a quotient by Sigma-agreement
together with an order and a negation table on the classes subject to
four conditions: the order extends the projected order (a), respects
Sigma-truth (b), its negation never exceeds the projected negation (c),
and reaches every projected negation of a Sigma-set (d). The greatest
filtration always exists and is computed directly, not searched.

Quotient tables can carry values that are not upsets of the quotient
order; this happens in small corners and is harmless because every
Sigma-definable set is a quotient upset and evaluation of Sigma
formulas never leaves those.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Mapping

from subminimal.frames import (
    NFrame,
    NModel,
    Poset,
    SearchTimeout,
    countermodel_search,
    eval_formula,
    frame_class,
    ntable_from_upset_map,
)
from subminimal.syntax import (
    Formula,
    Logic,
    Neg,
    Top,
    chain_axioms,
    is_instance_of,
    show,
    subformula_closure,
    variables,
)


class ResourceLimitError(RuntimeError):
    """A completeness claim would need a search beyond the allowed bound."""


def close_sigma(formulas: Iterable[Formula]) -> frozenset[Formula]:
    """Subformula closure of a set of formulas."""
    out: set[Formula] = set()
    for f in formulas:
        out |= subformula_closure(f)
    return frozenset(out)


def _require_closed(sigma: frozenset[Formula]) -> None:
    for f in sigma:
        for sub in subformula_closure(f):
            if sub not in sigma:
                raise ValueError(
                    f"sigma is not subformula-closed: {show(f)} needs {show(sub)}"
                )


@dataclass(frozen=True)
class FiltrationResult:
    """A quotient model with its projection and the set it was built from."""

    quotient: NModel
    pi: tuple[int, ...]
    sigma: frozenset[Formula]

    def classes(self) -> int:
        return self.quotient.frame.n


def _partition(m: NModel, sigma: frozenset[Formula]) -> tuple[tuple[int, ...], list[int], dict[Formula, int]]:
    """Project worlds to class indices by Sigma-agreement.

    Returns (pi, class masks, source truth sets). Classes are numbered
    by their least member so the construction is reproducible.
    """
    truth = {f: eval_formula(m, f) for f in sigma}
    n = m.frame.n
    sigs: dict[tuple[int, ...], int] = {}
    order = sorted(sigma, key=show)
    members: list[int] = []
    pi = [0] * n
    for w in range(n):
        sig = tuple((truth[f] >> w) & 1 for f in order)
        if sig not in sigs:
            sigs[sig] = len(members)
            members.append(0)
        pi[w] = sigs[sig]
        members[pi[w]] |= 1 << w
    ranked = sorted(range(len(members)), key=lambda c: members[c] & -members[c])
    rank = {c: i for i, c in enumerate(ranked)}
    pi = [rank[c] for c in pi]
    members = [members[c] for c in ranked]
    return tuple(pi), members, truth


def _project(mask: int, pi: tuple[int, ...]) -> int:
    out = 0
    m = mask
    while m:
        w = (m & -m).bit_length() - 1
        m &= m - 1
        out |= 1 << pi[w]
    return out


def _preimage(mask: int, members: list[int]) -> int:
    out = 0
    for c, cm in enumerate(members):
        if (mask >> c) & 1:
            out |= cm
    return out


def greatest_filtration(m: NModel, sigma: Iterable[Formula]) -> FiltrationResult:
    """The greatest filtration of the model through Sigma.

    Classes are ordered by one-directional Sigma-truth inclusion and
    the negation of a quotient upset is the projection of the source
    negation of its preimage. The valuation keeps exactly the
    variables occurring in Sigma.
    """
    sigma = frozenset(sigma)
    _require_closed(sigma)
    pi, members, truth = _partition(m, sigma)
    k = len(members)
    reps = [(cm & -cm).bit_length() - 1 for cm in members]
    up = [1 << c for c in range(k)]
    for c in range(k):
        for d in range(k):
            if c == d:
                continue
            w, v = reps[c], reps[d]
            if all((truth[f] >> w) & 1 <= (truth[f] >> v) & 1 for f in sigma):
                up[c] |= 1 << d
    qposet = Poset(k, up)
    table: dict[int, int] = {}
    for x in qposet.upsets():
        pre = _preimage(x, members)
        table[x] = _project(m.frame.neg(pre), pi)
    qframe = NFrame(qposet, ntable_from_upset_map(qposet, table))
    names = {v for f in sigma for v in variables(f)}
    qval = {name: _project(m.valuation[name], pi) for name in sorted(names)}
    return FiltrationResult(NModel(qframe, qval), pi, sigma)


def check_conditions(m: NModel, r: FiltrationResult) -> tuple[str, tuple] | None:
    """Verify the four filtration conditions exhaustively.

    Returns None when all hold, otherwise the first violated condition
    with a witness: ("a", (w, v)), ("b", (w, v, f)), ("c", (X, class)),
    or ("d", (w, f)). The negation condition (c) is read class-wise:
    the quotient table at X stays inside the projection of the source
    negation of the preimage of X.
    """
    sigma = r.sigma
    pi = r.pi
    n = m.frame.n
    members = [0] * r.classes()
    for w in range(n):
        members[pi[w]] |= 1 << w
    truth = {f: eval_formula(m, f) for f in sigma}
    qposet = r.quotient.frame.poset
    for w in range(n):
        rest = m.frame.poset.up[w]
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            if not qposet.le(pi[w], pi[v]):
                return ("a", (w, v))
    for w in range(n):
        for v in range(n):
            if not qposet.le(pi[w], pi[v]):
                continue
            for f in sigma:
                if (truth[f] >> w) & 1 and not (truth[f] >> v) & 1:
                    return ("b", (w, v, f))
    for x in qposet.upsets():
        bound = _project(m.frame.neg(_preimage(x, members)), pi)
        extra = r.quotient.frame.ntable[x] & ~bound
        if extra:
            return ("c", (x, (extra & -extra).bit_length() - 1))
    for f in sorted(sigma, key=show):
        if not isinstance(f, Neg):
            continue
        value = truth[f.sub]
        target = r.quotient.frame.ntable[_project(value, pi)]
        source = m.frame.neg(value)
        rest = source
        while rest:
            w = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            if not (target >> pi[w]) & 1:
                return ("d", (w, f))
    return None


def filtration_theorem_check(m: NModel, r: FiltrationResult) -> tuple[Formula, int] | None:
    """Pointwise truth agreement between model and quotient over Sigma.

    Expects r to satisfy check_conditions; returns None on agreement,
    else the first (formula, world) where membership differs.
    """
    for f in sorted(r.sigma, key=show):
        source = eval_formula(m, f)
        target = eval_formula(r.quotient, f)
        for w in range(m.frame.n):
            if (source >> w) & 1 != (target >> r.pi[w]) & 1:
                return (f, w)
    return None


def greatest_among(m: NModel, sigma: Iterable[Formula], other: FiltrationResult) -> bool:
    """Whether the greatest filtration dominates the given one.

    Domination means the other order is contained in the greatest
    order and, on every upset of the greatest order, the other negation
    is contained in the greatest negation. A candidate that is not a
    filtration at all is a contract violation and raises ValueError.
    """
    bad = check_conditions(m, other)
    if bad is not None:
        raise ValueError(f"not a filtration: condition ({bad[0]}) fails at {bad[1]}")
    g = greatest_filtration(m, sigma)
    if g.pi != other.pi:
        raise ValueError("projection mismatch: same model and sigma expected")
    gposet = g.quotient.frame.poset
    oposet = other.quotient.frame.poset
    for c in range(gposet.n):
        if oposet.up[c] & ~gposet.up[c]:
            return False
    for x in gposet.upsets():
        if other.quotient.frame.ntable[x] & ~g.quotient.frame.ntable[x]:
            return False
    return True


def enumerate_filtrations(m: NModel, sigma: Iterable[Formula]) -> list[FiltrationResult]:
    """Every filtration of the model through Sigma, small scale.

    The order ranges over partial orders squeezed between the projected
    source order and the greatest order; the negation table is forced
    at Sigma-definable upsets and ranges over subsets of its class-wise
    bound elsewhere. Exponential by nature: meant for models of a
    handful of worlds.
    """
    sigma = frozenset(sigma)
    _require_closed(sigma)
    g = greatest_filtration(m, sigma)
    pi = g.pi
    k = g.classes()
    members = [0] * k
    for w in range(m.frame.n):
        members[pi[w]] |= 1 << w
    floor = [1 << c for c in range(k)]
    for w in range(m.frame.n):
        rest = m.frame.poset.up[w]
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            floor[pi[w]] |= 1 << pi[v]
    ceil = g.quotient.frame.poset.up
    gap = [(c, d) for c in range(k) for d in range(k) if not (floor[c] >> d) & 1 and (ceil[c] >> d) & 1]
    forced = {
        _project(eval_formula(m, f.sub), pi) for f in sigma if isinstance(f, Neg)
    }
    out: list[FiltrationResult] = []
    for pick in range(1 << len(gap)):
        up = list(floor)
        for i, (c, d) in enumerate(gap):
            if (pick >> i) & 1:
                up[c] |= 1 << d
        ok = True
        for c in range(k):
            rest = up[c]
            while rest and ok:
                d = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                if up[d] & ~up[c]:
                    ok = False
            if not ok:
                break
        if not ok:
            continue
        qposet = Poset(k, up)
        upsets = qposet.upsets()
        bounds = {x: _project(m.frame.neg(_preimage(x, members)), pi) for x in upsets}
        # at the projection of a negated Sigma formula's argument the
        # value is pinned from both sides; everywhere else any subset
        # of the class-wise bound is admissible
        free = [x for x in upsets if x not in forced]
        tables: list[dict[int, int]] = [{x: bounds[x] for x in upsets if x in forced}]
        for x in free:
            bound = bounds[x]
            subs = []
            sub = bound
            while True:
                subs.append(sub)
                if sub == 0:
                    break
                sub = (sub - 1) & bound
            grown = []
            for t in tables:
                for s in subs:
                    t2 = dict(t)
                    t2[x] = s
                    grown.append(t2)
            tables = grown
        for table in tables:
            qframe = NFrame(qposet, ntable_from_upset_map(qposet, table))
            quotient = NModel(qframe, g.quotient.valuation)
            out.append(FiltrationResult(quotient, pi, sigma))
    return out


# --------------------------------------------------------------------------
# decision wrapper


@dataclass(frozen=True)
class Verdict:
    """Outcome of decide: status plus the witness when refuted."""

    status: str
    logic: str
    formula: Formula
    bound: int | None = None
    model: NModel | None = None
    world: int | None = None


DEFAULT_MAX_WORLDS = 4


def decide(
    logic: Logic,
    f: Formula,
    max_worlds: int = DEFAULT_MAX_WORLDS,
    timeout_ms: int | None = None,
) -> Verdict:
    """Decide a formula against a logic, honestly bounded.

    Substitution instances of the logic's axioms (or of a weaker
    logic's in the chain) are theorems without search. Otherwise a
    countermodel search runs over frames of the class. Exhaustion
    certifies theoremhood only where a finite-model bound exists (the
    base logic and MPC, bound 2^|closure|); when that bound exceeds
    max_worlds and no countermodel surfaced, ResourceLimitError is
    raised rather than guessing. For NeF and CoPC no bound is claimed
    and the non-refuted status says only how far the search went.
    """
    for axiom in chain_axioms(logic):
        if is_instance_of(f, axiom):
            return Verdict("theorem", logic.name, f)
    deadline = time.time() + timeout_ms / 1000 if timeout_ms is not None else None
    fmp = logic.name in ("n", "mpc")
    target = 1 << len(subformula_closure(f)) if fmp else max_worlds
    reach = min(target, max_worlds)
    hit = countermodel_search(logic, f, reach, deadline=deadline)
    if hit is not None:
        model, world = hit
        return Verdict("refuted", logic.name, f, bound=reach, model=model, world=world)
    if fmp:
        if target <= max_worlds:
            return Verdict("theorem", logic.name, f, bound=target)
        raise ResourceLimitError(
            f"certifying theoremhood for {logic.name} needs frames up to "
            f"{target} worlds, above the limit of {max_worlds}"
        )
    return Verdict("no-countermodel-up-to-bound", logic.name, f, bound=reach)
