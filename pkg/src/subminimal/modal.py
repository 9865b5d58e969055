"""Bi-modal semantics over preorders and a Hilbert proof checker.

The box quantifies over the cone of a reflexive transitive relation;
the second modality reads its truth set straight off a negation table
indexed by arbitrary subsets. Frames restrict that table two ways:
values must be cone-closed, and membership may only depend on the
input's trace over the world's own cone. The checker knows the two
axiom systems that differ in one scheme: congruence distribution for
the plain system, contraposition for the antitone one.

Tables are dense tuples of length 2^n, so everything here is for
desk-scale frames.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from subminimal import kernels
from subminimal.frames import (
    NFrame,
    NModel,
    _valuation_from_index,
    eval_formula,
)
from subminimal.syntax import (
    And,
    BBox,
    Box,
    Formula,
    Imp,
    Or,
    Top,
    Var,
    compile_modal,
    godel_translate,
    is_instance_of,
    parse,
    show,
    variables,
)


def _closed_rel(n: int, rel: Sequence[int]) -> None:
    if len(rel) != n:
        raise ValueError("relation needs one cone per world")
    full = (1 << n) - 1
    for w in range(n):
        cone = rel[w]
        if cone & ~full or not (cone >> w) & 1:
            raise ValueError(f"cone of {w} must be a reflexive subset of the worlds")
        m = cone
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            if rel[v] & ~cone:
                raise ValueError(f"relation not transitive at {w} -> {v}")


@dataclass(frozen=True)
class NS4Frame:
    """Preorder plus a total negation table with cone-closed values."""

    n: int
    rel: tuple[int, ...]
    ntable: tuple[int, ...]

    def __post_init__(self) -> None:
        _closed_rel(self.n, self.rel)
        full = (1 << self.n) - 1
        if len(self.ntable) != 1 << self.n:
            raise ValueError("negation table must have one entry per subset")
        if any(v < 0 or v & ~full for v in self.ntable):
            raise ValueError("negation table value out of range")


def ns4_check_frame(fr: NS4Frame) -> tuple[str, int] | None:
    """None when every value is cone-closed and membership in N(X)
    only looks at X through the member's own cone; otherwise the kind
    of breach and the offending input set."""
    code = kernels.ns4_table_violation(fr.n, fr.rel, fr.ntable)
    if code < 0:
        return None
    x, kind = divmod(code, 2)
    return ("value" if kind == 0 else "locality", x)


@dataclass(frozen=True, eq=False)
class NS4Model:
    frame: NS4Frame
    valuation: Mapping[str, int]

    def __post_init__(self) -> None:
        full = (1 << self.frame.n) - 1
        for name, mask in self.valuation.items():
            if mask < 0 or mask & ~full:
                raise ValueError(f"truth set of {name} out of range")

    def val(self, name: str) -> int:
        if name not in self.valuation:
            raise ValueError(f"model has no valuation for {name}")
        return self.valuation[name]


def ns4_eval(m: NS4Model, f: Formula) -> int:
    names = variables(f)
    code = compile_modal(f, names)
    return kernels.eval_modal(
        code, m.frame.n, m.frame.rel, m.frame.ntable, [m.val(v) for v in names]
    )


def ns4_refuting_valuation(fr: NS4Frame, f: Formula) -> tuple[dict[str, int], int] | None:
    """Least valuation into arbitrary subsets refuting f, with the
    least world where it fails."""
    names = variables(f)
    code = compile_modal(f, names)
    idx = kernels.find_refuting_valuation_modal(code, len(names), fr.n, fr.rel, fr.ntable)
    if idx < 0:
        return None
    subsets = list(range(1 << fr.n))
    valuation = _valuation_from_index(idx, names, subsets)
    mask = kernels.eval_modal(
        code, fr.n, fr.rel, fr.ntable, [valuation[v] for v in names]
    )
    full = (1 << fr.n) - 1
    missing = full & ~mask
    return valuation, (missing & -missing).bit_length() - 1


def ns4_frame_validates(fr: NS4Frame, f: Formula) -> bool:
    return ns4_refuting_valuation(fr, f) is None


AXIOM_K = parse("[](p -> q) -> ([]p -> []q)", "modal")
AXIOM_T = parse("[]p -> p", "modal")
AXIOM_4 = parse("[]p -> [][]p", "modal")
AXIOM_BBOX_CONG = parse("[](p <-> q) -> ([n]p <-> [n]q)", "modal")
AXIOM_BBOX_PERSIST = parse("[n]p -> [][n]p", "modal")
AXIOM_BBOX_CONTRA = parse("[](p -> q) -> ([n]q -> [n]p)", "modal")

NS4_AXIOMS = {
    "K": AXIOM_K,
    "T": AXIOM_T,
    "4": AXIOM_4,
    "bbox-cong": AXIOM_BBOX_CONG,
    "bbox-persist": AXIOM_BBOX_PERSIST,
}
COS4_AXIOMS = {
    "K": AXIOM_K,
    "T": AXIOM_T,
    "4": AXIOM_4,
    "bbox-contra": AXIOM_BBOX_CONTRA,
    "bbox-persist": AXIOM_BBOX_PERSIST,
}


# --------------------------------------------------------------------------
# frame generation


def enumerate_preorders(n: int) -> list[tuple[int, ...]]:
    """All reflexive transitive cone families on n worlds."""
    out = []
    offdiag = [(w, v) for w in range(n) for v in range(n) if w != v]
    for bits in range(1 << len(offdiag)):
        rel = [1 << w for w in range(n)]
        for k, (w, v) in enumerate(offdiag):
            if (bits >> k) & 1:
                rel[w] |= 1 << v
        ok = True
        for w in range(n):
            m = rel[w]
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if rel[v] & ~rel[w]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(tuple(rel))
    return out


def enumerate_ns4_frames(n: int) -> list[NS4Frame]:
    """Every lawful frame on n worlds; table count is (2^n)^(2^n) per
    preorder, so this is only sane for n <= 2."""
    if n > 2:
        raise ValueError("exhaustive table enumeration is infeasible past 2 worlds")
    out = []
    for rel in enumerate_preorders(n):
        for values in itertools.product(range(1 << n), repeat=1 << n):
            if kernels.ns4_table_violation(n, rel, values) < 0:
                out.append(NS4Frame(n, rel, tuple(values)))
    return out


def random_preorder(rng, n: int) -> tuple[int, ...]:
    rel = [1 << w for w in range(n)]
    for w in range(n):
        for v in range(n):
            if v != w and rng.random() < 0.35:
                rel[w] |= 1 << v
    changed = True
    while changed:
        changed = False
        for w in range(n):
            acc = rel[w]
            m = rel[w]
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                acc |= rel[v]
            if acc != rel[w]:
                rel[w] = acc
                changed = True
    return tuple(rel)


def random_ns4_frame(rng, n: int) -> NS4Frame:
    """Random lawful frame built from per-cluster traces.

    Worlds sharing a cone mutually must admit the same trace, and a
    trace member cut down to a higher world's cone must be in that
    world's trace; choosing traces from small cones outward keeps both
    constraints satisfiable at every step.
    """
    rel = random_preorder(rng, n)
    cluster_of = {}
    reps: list[int] = []
    for w in range(n):
        for r in reps:
            if (rel[r] >> w) & 1 and (rel[w] >> r) & 1:
                cluster_of[w] = r
                break
        else:
            reps.append(w)
            cluster_of[w] = w
    cluster_mask = {r: 0 for r in reps}
    for w in range(n):
        cluster_mask[cluster_of[w]] |= 1 << w
    traces: dict[int, set[int]] = {}
    for r in sorted(reps, key=lambda r: rel[r].bit_count()):
        cone = rel[r]
        trace: set[int] = set()
        sub = cone
        while True:
            z = sub
            ok = True
            m = cone & ~cluster_mask[r]
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if (z & rel[v]) not in traces[cluster_of[v]]:
                    ok = False
                    break
            if ok and rng.random() < 0.5:
                trace.add(z)
            if sub == 0:
                break
            sub = (sub - 1) & cone
        traces[r] = trace
    table = []
    for x in range(1 << n):
        mask = 0
        for w in range(n):
            if (x & rel[w]) in traces[cluster_of[w]]:
                mask |= 1 << w
        table.append(mask)
    return NS4Frame(n, rel, tuple(table))


# --------------------------------------------------------------------------
# the lift and the translation


def lift_nstar(fr: NFrame) -> NS4Frame:
    """Extend a frame's negation from upsets to all subsets.

    A world lands in the lifted value when some upset agrees with the
    input on its cone and the world is in that upset's negation. On
    upsets the lift changes nothing.
    """
    p = fr.poset
    lifted = kernels.lift_table(p.n, p.up, list(p.upsets()), fr.ntable)
    return NS4Frame(p.n, p.up, tuple(lifted))


def lift_model(m: NModel) -> NS4Model:
    return NS4Model(lift_nstar(m.frame), dict(m.valuation))


def translation_preservation(m: NModel, f: Formula) -> int | None:
    """First world where f and its boxed translation disagree, if any.

    The formula is evaluated in the model and its translation in the
    lifted model under the very same valuation.
    """
    prop = eval_formula(m, f)
    modal = ns4_eval(lift_model(m), godel_translate(f))
    diff = prop ^ modal
    if diff == 0:
        return None
    return (diff & -diff).bit_length() - 1


def translation_gap_search(fr: NFrame, depth: int) -> tuple[int, int] | None:
    """Search all value pairs reachable by formulas up to the given
    connective depth for a disagreement between the frame's semantics
    and the lifted one; None certifies agreement at that depth for all
    formulas over all valuations at once."""
    p = fr.poset
    upsets = list(p.upsets())
    nstar = kernels.lift_table(p.n, p.up, upsets, fr.ntable)
    code = kernels.translation_gap(p.n, p.up, fr.ntable, nstar, upsets, depth)
    if code < 0:
        return None
    return code >> p.n, code & ((1 << p.n) - 1)


# --------------------------------------------------------------------------
# orderless tables, the intersection law and the rule


@dataclass(frozen=True)
class ModalNFrame:
    """Just worlds and a total table; no order, no intrinsic laws."""

    n: int
    ntable: tuple[int, ...]

    def __post_init__(self) -> None:
        full = (1 << self.n) - 1
        if len(self.ntable) != 1 << self.n:
            raise ValueError("table must have one entry per subset")
        if any(v < 0 or v & ~full for v in self.ntable):
            raise ValueError("table value out of range")


def en_check(fr: ModalNFrame, k: int) -> bool:
    """The k-ary intersection law: cutting the input down by k table
    values and intersecting the output with them is invisible. k = 0
    reads the empty intersection as all worlds."""
    if k < 0:
        raise ValueError("arity must be nonnegative")
    return bool(kernels.en_holds(fr.n, fr.ntable, k))


def rn_validity(fr: ModalNFrame, k: int) -> bool:
    """Frame-level validity of the k-premise replacement rule: under
    any valuation, if q and r agree wherever all k guard values hold,
    the table must send them to outputs agreeing there too."""
    if k < 0:
        raise ValueError("arity must be nonnegative")
    return bool(kernels.rn_holds(fr.n, fr.ntable, k))


def random_modal_ntable(rng, n: int) -> ModalNFrame:
    return ModalNFrame(
        n, tuple(rng.randrange(1 << n) for _ in range(1 << n))
    )


def cos4_check_frame(fr: NS4Frame) -> bool:
    """Lawful frame over a partial order whose table is antitone on
    all subsets."""
    if ns4_check_frame(fr) is not None:
        return False
    for w in range(fr.n):
        m = fr.rel[w] & ~(1 << w)
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            if (fr.rel[v] >> w) & 1:
                return False
    for y in range(1 << fr.n):
        ny = fr.ntable[y]
        x = y
        while True:
            if ny & ~fr.ntable[x]:
                return False
            if x == 0:
                break
            x = (x - 1) & y
    return True


# --------------------------------------------------------------------------
# Hilbert proofs


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    rule: str
    refs: tuple[int, ...] = ()


@dataclass(frozen=True)
class HilbertProof:
    system: str
    lines: tuple[ProofLine, ...]


_AXIOM_RULES = {
    "K": AXIOM_K,
    "T": AXIOM_T,
    "4": AXIOM_4,
    "bbox-cong": AXIOM_BBOX_CONG,
    "bbox-persist": AXIOM_BBOX_PERSIST,
    "bbox-contra": AXIOM_BBOX_CONTRA,
}
_FORBIDDEN = {"ns4": "bbox-contra", "cos4": "bbox-cong"}
_RULES = set(_AXIOM_RULES) | {"taut", "MP", "Nec", "box-conj", "premise"}


def _box_conj_norm(f: Formula) -> Formula:
    if isinstance(f, (And, Or, Imp)):
        return type(f)(_box_conj_norm(f.left), _box_conj_norm(f.right))
    if isinstance(f, (Box, BBox)):
        sub = _box_conj_norm(f.sub)
        if isinstance(f, Box) and isinstance(sub, And):
            return And(_box_conj_norm(Box(sub.left)), _box_conj_norm(Box(sub.right)))
        return type(f)(sub)
    return f


def _is_taut_instance(f: Formula) -> bool:
    """Truth-table the formula with maximal modal subformulas and
    variables abstracted as atoms."""
    atoms: dict[Formula, int] = {}

    def atom(g: Formula) -> int:
        if g not in atoms:
            atoms[g] = len(atoms)
        return atoms[g]

    def scan(g: Formula) -> None:
        if isinstance(g, (And, Or, Imp)):
            scan(g.left)
            scan(g.right)
        elif isinstance(g, (Box, BBox, Var)):
            atom(g)

    scan(f)
    if len(atoms) > 16:
        raise ValueError("too many distinct atoms to truth-table")

    def ev(g: Formula, bits: int) -> bool:
        if isinstance(g, And):
            return ev(g.left, bits) and ev(g.right, bits)
        if isinstance(g, Or):
            return ev(g.left, bits) or ev(g.right, bits)
        if isinstance(g, Imp):
            return not ev(g.left, bits) or ev(g.right, bits)
        if isinstance(g, Top):
            return True
        if isinstance(g, (Box, BBox, Var)):
            return bool((bits >> atoms[g]) & 1)
        return False  # Bot

    return all(ev(f, bits) for bits in range(1 << len(atoms)))


def check_proof(proof: HilbertProof) -> tuple[int, str] | None:
    """First unjustified line with the reason, or None when all check.

    premise lines declare the hypotheses of a rule derivation and
    always pass; necessitation only produces the box. Modus ponens
    refs list the implication first.
    """
    if proof.system not in _FORBIDDEN:
        return (0, f"unknown system {proof.system!r}")
    forbidden = _FORBIDDEN[proof.system]
    for i, line in enumerate(proof.lines):
        rule = line.rule
        if rule not in _RULES:
            return (i, f"unknown rule {rule!r}")
        if rule == forbidden:
            return (i, f"rule {rule!r} is not available in {proof.system}")
        if any(r < 0 or r >= i for r in line.refs):
            return (i, "references must point at earlier lines")
        if rule in _AXIOM_RULES:
            if line.refs:
                return (i, "axiom lines take no references")
            if not is_instance_of(line.formula, _AXIOM_RULES[rule]):
                return (i, f"not an instance of the {rule} scheme")
        elif rule == "taut":
            if line.refs:
                return (i, "tautology lines take no references")
            if not _is_taut_instance(line.formula):
                return (i, "not a tautology under modal abstraction")
        elif rule == "MP":
            if len(line.refs) != 2:
                return (i, "modus ponens takes two references")
            a, b = line.refs
            want = Imp(proof.lines[b].formula, line.formula)
            if proof.lines[a].formula != want:
                return (i, "first reference is not the matching implication")
        elif rule == "Nec":
            if len(line.refs) != 1:
                return (i, "necessitation takes one reference")
            if line.formula != Box(proof.lines[line.refs[0]].formula):
                return (i, "necessitation only boxes the referenced line")
        elif rule == "box-conj":
            if len(line.refs) != 1:
                return (i, "rewriting takes one reference")
            if _box_conj_norm(line.formula) != _box_conj_norm(
                proof.lines[line.refs[0]].formula
            ):
                return (i, "not equal modulo distributing the box over conjunction")
        elif rule == "premise":
            if line.refs:
                return (i, "premise lines take no references")
    return None


# --------------------------------------------------------------------------
# JSON


def ns4_to_dict(fr: NS4Frame) -> dict:
    rel = [
        [w, v] for w in range(fr.n) for v in range(fr.n) if (fr.rel[w] >> v) & 1
    ]
    return {
        "worlds": fr.n,
        "rel": rel,
        "N": {str(x): fr.ntable[x] for x in range(1 << fr.n)},
    }


def ns4_from_dict(d: Mapping) -> NS4Frame:
    n = int(d["worlds"])
    rel = [1 << w for w in range(n)]
    for i, j in d["rel"]:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"relation pair ({i}, {j}) out of range")
        rel[i] |= 1 << j
    changed = True
    while changed:
        changed = False
        for w in range(n):
            acc = rel[w]
            m = rel[w]
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                acc |= rel[v]
            if acc != rel[w]:
                rel[w] = acc
                changed = True
    table = [-1] * (1 << n)
    for key, value in d["N"].items():
        x = int(key)
        if not 0 <= x < 1 << n:
            raise ValueError(f"table key {key} out of range")
        table[x] = int(value)
    if any(v < 0 for v in table):
        raise ValueError("table must cover every subset")
    return NS4Frame(n, tuple(rel), tuple(table))


def modal_nframe_to_dict(fr: ModalNFrame) -> dict:
    return {"worlds": fr.n, "N": {str(x): fr.ntable[x] for x in range(1 << fr.n)}}


def modal_nframe_from_dict(d: Mapping) -> ModalNFrame:
    n = int(d["worlds"])
    table = [-1] * (1 << n)
    for key, value in d["N"].items():
        x = int(key)
        if not 0 <= x < 1 << n:
            raise ValueError(f"table key {key} out of range")
        table[x] = int(value)
    if any(v < 0 for v in table):
        raise ValueError("table must cover every subset")
    return ModalNFrame(n, tuple(table))


def proof_lines_to_list(proof: HilbertProof) -> list[dict]:
    return [
        {"formula": show(line.formula), "rule": line.rule, "refs": list(line.refs)}
        for line in proof.lines
    ]


def proof_from_list(items: Sequence[Mapping], system: str) -> HilbertProof:
    lines = []
    for item in items:
        lines.append(
            ProofLine(
                parse(item["formula"], "modal"),
                str(item["rule"]),
                tuple(int(r) for r in item.get("refs", ())),
            )
        )
    return HilbertProof(system, tuple(lines))
