"""Finite posets, N-frames, models, and countermodel search.

An N-frame is a finite poset together with a function N from upsets to
subsets satisfying the locality law N(X) & Y == N(X & Y) & Y; negation
is evaluated as membership in N of the truth set. Frames, models, and
searches all speak bitmasks: bit w stands for world w.

Enumeration orders are fixed once and for all so that search results
are reproducible: posets by world count then by the bitmask of their
strict pairs, N-tables by their value tuple over ascending upsets,
valuations lexicographically with the alphabetically first variable
most significant.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from subminimal import kernels
from subminimal.syntax import (
    AXIOM_MPC,
    Formula,
    Logic,
    LOGICS,
    compile_prop,
    show,
    variables,
)


class SearchTimeout(RuntimeError):
    """A bounded search ran out of its wall-clock budget."""


def _pair_bit(i: int, j: int, n: int) -> int:
    """Bit position of the strict pair (i, j) in a poset's pair mask."""
    return i * (n - 1) + (j if j < i else j - 1)


class Poset:
    """A finite partial order on worlds 0..n-1.

    ``up[w]`` and ``down[w]`` are the principal upset and downset of w
    as masks, reflexive by convention. Equality and hashing go through
    (n, up), so posets can key caches and sets.
    """

    __slots__ = ("n", "up", "down", "_upsets")

    def __init__(self, n: int, up: Sequence[int]):
        if n < 0:
            raise ValueError("world count must be nonnegative")
        if len(up) != n:
            raise ValueError("one up-mask per world required")
        full = (1 << n) - 1
        down = [0] * n
        for w in range(n):
            mask = up[w]
            if mask & ~full or not (mask >> w) & 1:
                raise ValueError(f"up-mask of world {w} is not reflexive in range")
            for v in range(n):
                if (mask >> v) & 1:
                    down[v] |= 1 << w
        self.n = n
        self.up = tuple(up)
        self.down = tuple(down)
        self._upsets: tuple[int, ...] | None = None
        self._validate()

    def _validate(self) -> None:
        for w in range(self.n):
            m = self.up[w]
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if self.up[v] & ~self.up[w]:
                    raise ValueError("transitivity fails")
                if v != w and (self.up[v] >> w) & 1:
                    raise ValueError("antisymmetry fails")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Poset":
        """Build a poset from generating pairs i <= j.

        The reflexive-transitive closure is taken automatically; a
        cycle through distinct worlds raises ValueError.
        """
        up = [1 << w for w in range(n)]
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"pair ({i}, {j}) out of range")
            up[i] |= 1 << j
        changed = True
        while changed:
            changed = False
            for w in range(n):
                m = up[w]
                acc = m
                while m:
                    v = (m & -m).bit_length() - 1
                    m &= m - 1
                    acc |= up[v]
                if acc != up[w]:
                    up[w] = acc
                    changed = True
        return cls(n, up)

    def le(self, i: int, j: int) -> bool:
        return bool((self.up[i] >> j) & 1)

    def upsets(self) -> tuple[int, ...]:
        """All upward-closed subsets as masks, ascending."""
        if self._upsets is None:
            self._upsets = tuple(enumerate_upsets(self))
        return self._upsets

    def pair_mask(self) -> int:
        """Strict pairs packed into the canonical ordering mask."""
        mask = 0
        for i in range(self.n):
            m = self.up[i] & ~(1 << i)
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                mask |= 1 << _pair_bit(i, j, self.n)
        return mask

    def top(self) -> int | None:
        """The greatest world, if the poset has one."""
        full = (1 << self.n) - 1
        for w in range(self.n):
            if self.down[w] == full:
                return w
        return None

    def strict_pairs(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.n):
            for j in range(self.n):
                if i != j and self.le(i, j):
                    out.append((i, j))
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poset) and self.n == other.n and self.up == other.up

    def __hash__(self) -> int:
        return hash((self.n, self.up))

    def __repr__(self) -> str:
        return f"Poset({self.n}, {list(self.up)})"


def enumerate_upsets(p: Poset) -> list[int]:
    """Every upward-closed subset of the poset, each once, ascending.

    The empty set and the full set are always included. Meant for desk
    scale; the loop is linear in 2**n.
    """
    out = []
    for mask in range(1 << p.n):
        m = mask
        ok = True
        while m:
            w = (m & -m).bit_length() - 1
            if p.up[w] & ~mask:
                ok = False
                break
            m &= m - 1
        if ok:
            out.append(mask)
    return out


@dataclass(frozen=True)
class NFrame:
    """A poset with a negation table over its upsets.

    ``ntable`` is a flat tuple of length 2**n holding -1 at non-upset
    indices. Values are usually upsets, but construction does not force
    that: quotients of filtrations may carry non-upset values, and
    check_nframe is the validator that rejects them.
    """

    poset: Poset
    ntable: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.poset.n
        if len(self.ntable) != 1 << n:
            raise ValueError("negation table must have one entry per subset")
        full = (1 << n) - 1
        upsets = set(self.poset.upsets())
        for mask, value in enumerate(self.ntable):
            if mask in upsets:
                if value < 0 or value & ~full:
                    raise ValueError(f"table at upset {mask} must hold a subset")
            elif value != -1:
                raise ValueError(f"table entry at non-upset {mask}")

    @property
    def n(self) -> int:
        return self.poset.n

    def neg(self, mask: int) -> int:
        value = self.ntable[mask]
        if value < 0:
            raise ValueError(f"negation undefined at {mask}")
        return value

    def value_tuple(self) -> tuple[int, ...]:
        return tuple(self.ntable[u] for u in self.poset.upsets())

    def sort_key(self) -> tuple[int, int, tuple[int, ...]]:
        return (self.poset.n, self.poset.pair_mask(), self.value_tuple())


def ntable_from_upset_map(p: Poset, mapping: Mapping[int, int]) -> tuple[int, ...]:
    """Spread an upset-keyed dict into the flat table layout."""
    table = [-1] * (1 << p.n)
    upsets = p.upsets()
    missing = [u for u in upsets if u not in mapping]
    if missing:
        raise ValueError(f"negation table misses upset {missing[0]}")
    extra = [k for k in mapping if k not in set(upsets)]
    if extra:
        raise ValueError(f"negation table keyed at non-upset {extra[0]}")
    for u in upsets:
        table[u] = mapping[u]
    return tuple(table)


def check_nframe(p: Poset, ntable: Sequence[int]) -> tuple[int, int] | None:
    """Validate the locality law over all upset pairs.

    Returns None when the table is a lawful negation, else the first
    witnessing pair (X, Y) with N(X) & Y != N(X & Y) & Y. A table value
    that is not an upset raises ValueError; locality is only meaningful
    for persistent values.
    """
    upsets = p.upsets()
    upset_set = set(upsets)
    for u in upsets:
        value = ntable[u]
        if value < 0:
            raise ValueError(f"negation table misses upset {u}")
        if value not in upset_set:
            raise ValueError(f"negation value at {u} is not an upset")
    packed = kernels.locality_violation(p.n, list(upsets), list(ntable))
    if packed < 0:
        return None
    return upsets[packed // len(upsets)], upsets[packed % len(upsets)]


@dataclass(frozen=True, eq=False)
class NModel:
    """An N-frame with a valuation of variables by upsets."""

    frame: NFrame
    valuation: Mapping[str, int]

    def __post_init__(self) -> None:
        upsets = set(self.frame.poset.upsets())
        for name, mask in self.valuation.items():
            if mask not in upsets:
                raise ValueError(f"valuation of {name} is not an upset")

    def val(self, name: str) -> int:
        return self.valuation[name]


def eval_formula(m: NModel, f: Formula) -> int:
    """Truth set of a propositional formula in the model, as a mask."""
    names = variables(f)
    missing = [x for x in names if x not in m.valuation]
    if missing:
        raise ValueError(f"model does not value variable {missing[0]}")
    code = compile_prop(f, names)
    val = [m.valuation[x] for x in names]
    out = kernels.eval_prop(code, m.frame.n, list(m.frame.poset.up), list(m.frame.ntable), val)
    if out == -1:
        raise ValueError("evaluation hit an undefined negation entry")
    if out == -2:
        raise ValueError(f"not a propositional formula: {show(f)}")
    return out


def _valuation_from_index(idx: int, names: Sequence[str], upsets: Sequence[int]) -> dict[str, int]:
    # digits run most-significant-first over the sorted variable names,
    # mirroring the kernel's enumeration
    out: dict[str, int] = {}
    base = len(upsets)
    for name in reversed(names):
        out[name] = upsets[idx % base]
        idx //= base
    return out


def refuting_valuation(fr: NFrame, f: Formula) -> tuple[dict[str, int], int] | None:
    """Least valuation refuting f on the frame, with the least failing
    world, or None when the frame validates f."""
    names = variables(f)
    upsets = fr.poset.upsets()
    code = compile_prop(f, names)
    idx = kernels.find_refuting_valuation_prop(
        code, len(names), fr.n, list(fr.poset.up), list(fr.ntable), list(upsets)
    )
    if idx < 0:
        return None
    valuation = _valuation_from_index(idx, names, upsets)
    model = NModel(fr, valuation)
    truth = eval_formula(model, f)
    full = (1 << fr.n) - 1
    fail = full & ~truth
    world = (fail & -fail).bit_length() - 1
    return valuation, world


def frame_validates(fr: NFrame, f: Formula) -> bool:
    """Whether every upset valuation makes f true at every world."""
    return refuting_valuation(fr, f) is None


def frame_class(fr: NFrame, logic: Logic, cross_check: bool = False) -> bool:
    """Membership of the frame in a logic's frame class.

    The base class is everything, NeF and CoPC are decided by their
    order-theoretic conditions, MPC is decided by validity of its
    scheme (no condition on N is available for it). With cross_check
    the first-order answer for NeF/CoPC is compared against scheme
    validity and a disagreement raises RuntimeError.
    """
    upsets = fr.poset.upsets()
    if logic.name == "n":
        return True
    if logic.name == "nef":
        ok = True
        for x in upsets:
            core = x & fr.ntable[x]
            if core == 0:
                continue
            for y in upsets:
                if core & ~fr.ntable[y]:
                    ok = False
                    break
            if not ok:
                break
    elif logic.name == "copc":
        ok = True
        for x in upsets:
            for y in upsets:
                if x & ~y == 0 and fr.ntable[y] & ~fr.ntable[x]:
                    ok = False
                    break
            if not ok:
                break
    elif logic.name == "mpc":
        return frame_validates(fr, AXIOM_MPC)
    else:
        raise ValueError(f"unknown logic: {logic.name}")
    if cross_check:
        scheme = frame_validates(fr, logic.axiom)
        if scheme != ok:
            raise RuntimeError(
                f"condition and scheme disagree for {logic.name} on {fr!r}"
            )
    return ok


def to_neighbourhood(fr: NFrame) -> tuple[frozenset[int], ...]:
    """Per-world families n(w) = {X upset : w in N(X)}."""
    out = []
    for w in range(fr.n):
        out.append(
            frozenset(u for u in fr.poset.upsets() if (fr.ntable[u] >> w) & 1)
        )
    return tuple(out)


def from_neighbourhood(p: Poset, nbhd: Sequence[frozenset[int]]) -> NFrame:
    """Rebuild an N-frame from per-world upset families.

    The families must grow along the order and must not distinguish
    upsets that agree on the world's cone; either failure raises
    ValueError with the offending world.
    """
    if len(nbhd) != p.n:
        raise ValueError("one neighbourhood family per world required")
    upset_set = set(p.upsets())
    for w in range(p.n):
        for x in nbhd[w]:
            if x not in upset_set:
                raise ValueError(f"neighbourhood of world {w} holds a non-upset")
        m = p.up[w] & ~(1 << w)
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            if nbhd[w] - nbhd[v]:
                raise ValueError(f"neighbourhoods shrink from world {w} upward")
        for x in upset_set:
            if ((x & p.up[w]) in nbhd[w]) != (x in nbhd[w]):
                raise ValueError(f"neighbourhood of world {w} ignores its cone unevenly")
    table = {}
    for u in p.upsets():
        table[u] = sum(1 << w for w in range(p.n) if u in nbhd[w])
    return NFrame(p, ntable_from_upset_map(p, table))


# --------------------------------------------------------------------------
# enumeration


def enumerate_posets(n: int) -> Iterator[Poset]:
    """All labeled posets on n worlds, ascending by pair mask.

    The loop tries every antisymmetric pair mask and keeps the
    transitive ones; fine through n = 5, absurd beyond.
    """
    if n == 0:
        yield Poset(0, [])
        return
    bits = n * (n - 1)
    for mask in range(1 << bits):
        up = [1 << w for w in range(n)]
        ok = True
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                if (mask >> _pair_bit(i, j, n)) & 1:
                    if i > j and (mask >> _pair_bit(j, i, n)) & 1:
                        ok = False
                        break
                    up[i] |= 1 << j
            if not ok:
                break
        if not ok:
            continue
        for w in range(n):
            m = up[w]
            while m and ok:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if up[v] & ~up[w]:
                    ok = False
            if not ok:
                break
        if ok:
            yield Poset(n, up)


def _trace_order(p: Poset) -> list[int]:
    # maximal worlds first, so that each world's constraints are known
    # when its trace family is chosen
    return sorted(range(p.n), key=lambda w: p.up[w].bit_count())


def enumerate_ntables(p: Poset) -> list[tuple[int, ...]]:
    """All lawful negation tables on the poset, ascending by value tuple.

    Tables are generated through per-world trace families: world w may
    hold any family of upsets inside its cone that projects, along the
    order, into the families already fixed above it.
    """
    upsets = p.upsets()
    order = _trace_order(p)
    traces: dict[int, frozenset[int]] = {}
    results: list[tuple[int, ...]] = []

    def rec(k: int) -> None:
        if k == len(order):
            flat = [-1] * (1 << p.n)
            for u in upsets:
                flat[u] = sum(
                    1 << w for w in range(p.n) if (u & p.up[w]) in traces[w]
                )
            results.append(tuple(flat))
            return
        w = order[k]
        allowed = []
        for z in upsets:
            if z & ~p.up[w]:
                continue
            m = p.up[w] & ~(1 << w)
            good = True
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if (z & p.up[v]) not in traces[v]:
                    good = False
                    break
            if good:
                allowed.append(z)
        for pick in range(1 << len(allowed)):
            traces[w] = frozenset(
                allowed[i] for i in range(len(allowed)) if (pick >> i) & 1
            )
            rec(k + 1)
        del traces[w]

    rec(0)
    results.sort()
    return results


def enumerate_nframes(p: Poset) -> list[NFrame]:
    """Every N-frame on the poset, in canonical table order."""
    return [NFrame(p, t) for t in enumerate_ntables(p)]


def random_poset(rng, n: int) -> Poset:
    """A labeled poset drawn by thinning a random linear order."""
    perm = list(range(n))
    rng.shuffle(perm)
    pairs = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.4:
                pairs.append((perm[a], perm[b]))
    return Poset.from_pairs(n, pairs)


def random_ntable(rng, p: Poset) -> tuple[int, ...]:
    """A lawful negation table drawn uniformly over trace families."""
    upsets = p.upsets()
    traces: dict[int, set[int]] = {}
    for w in _trace_order(p):
        family = set()
        for z in upsets:
            if z & ~p.up[w]:
                continue
            m = p.up[w] & ~(1 << w)
            good = True
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if (z & p.up[v]) not in traces[v]:
                    good = False
                    break
            if good and rng.random() < 0.5:
                family.add(z)
        traces[w] = family
    flat = [-1] * (1 << p.n)
    for u in upsets:
        flat[u] = sum(1 << w for w in range(p.n) if (u & p.up[w]) in traces[w])
    return tuple(flat)


def random_nframe(rng, n: int) -> NFrame:
    p = random_poset(rng, n)
    return NFrame(p, random_ntable(rng, p))


# --------------------------------------------------------------------------
# isomorphism


def poset_isomorphisms(p: Poset, q: Poset) -> Iterator[tuple[int, ...]]:
    """All order isomorphisms p -> q as world tuples."""
    if p.n != q.n:
        return
    p_sig = [(p.up[w].bit_count(), p.down[w].bit_count()) for w in range(p.n)]
    q_sig = [(q.up[w].bit_count(), q.down[w].bit_count()) for w in range(q.n)]
    if sorted(p_sig) != sorted(q_sig):
        return
    f = [-1] * p.n
    used = [False] * q.n

    def rec(w: int) -> Iterator[tuple[int, ...]]:
        if w == p.n:
            yield tuple(f)
            return
        for c in range(q.n):
            if used[c] or p_sig[w] != q_sig[c]:
                continue
            ok = True
            for u in range(w):
                if p.le(u, w) != q.le(f[u], c) or p.le(w, u) != q.le(c, f[u]):
                    ok = False
                    break
            if ok:
                f[w] = c
                used[c] = True
                yield from rec(w + 1)
                used[c] = False
        f[w] = -1

    yield from rec(0)


def poset_isomorphic(p: Poset, q: Poset) -> bool:
    return next(poset_isomorphisms(p, q), None) is not None


def _push_mask(mask: int, f: Sequence[int]) -> int:
    out = 0
    m = mask
    while m:
        w = (m & -m).bit_length() - 1
        m &= m - 1
        out |= 1 << f[w]
    return out


def nframe_isomorphic(a: NFrame, b: NFrame) -> bool:
    """Poset isomorphism that also transports the negation table."""
    for f in poset_isomorphisms(a.poset, b.poset):
        if all(
            b.ntable[_push_mask(u, f)] == _push_mask(a.ntable[u], f)
            for u in a.poset.upsets()
        ):
            return True
    return False


def canonical_poset_key(p: Poset) -> int:
    """Least pair mask over all relabelings; equal keys mean isomorphic."""
    best = None
    for perm in itertools.permutations(range(p.n)):
        mask = 0
        for i in range(p.n):
            for j in range(p.n):
                if i != j and p.le(i, j):
                    mask |= 1 << _pair_bit(perm[i], perm[j], p.n)
        if best is None or mask < best:
            best = mask
    return best if best is not None else 0


def enumerate_posets_unlabeled(n: int) -> list[Poset]:
    """One representative per isomorphism class of posets on n worlds.

    Grown by repeatedly attaching a fresh maximal world above a
    downset, which reaches every class; duplicates are removed through
    the canonical key. Tractable through n = 6.
    """
    if n == 0:
        return [Poset(0, [])]
    level = [Poset(1, [1])]
    for k in range(2, n + 1):
        seen: dict[int, Poset] = {}
        for base in level:
            downsets = [
                mask
                for mask in range(1 << base.n)
                if all(
                    base.down[w] & ~mask == 0
                    for w in range(base.n)
                    if (mask >> w) & 1
                )
            ]
            for dmask in downsets:
                up = [base.up[w] for w in range(base.n)]
                new = 1 << (k - 1)
                for w in range(base.n):
                    if (dmask >> w) & 1:
                        up[w] |= new
                up.append(new)
                q = Poset(k, up)
                key = canonical_poset_key(q)
                if key not in seen:
                    seen[key] = q
        level = [seen[key] for key in sorted(seen)]
    return level


# --------------------------------------------------------------------------
# search


def _frame_stream(n: int) -> Iterator[NFrame]:
    for size in range(1, n + 1):
        for p in enumerate_posets(size):
            yield from enumerate_nframes(p)


def countermodel_search(
    logic: Logic,
    f: Formula,
    max_worlds: int,
    deadline: float | None = None,
) -> tuple[NModel, int] | None:
    """Least countermodel to f on a frame of the logic, if one exists
    within the world bound.

    Frames stream in canonical order, so the witness is deterministic:
    the first frame of the class refuting f, with the least refuting
    valuation and world. ``deadline`` is an absolute time.time() value;
    passing it raises SearchTimeout.
    """
    if max_worlds < 1:
        raise ValueError("need at least one world")
    for fr in _frame_stream(max_worlds):
        if deadline is not None and time.time() > deadline:
            raise SearchTimeout(f"no verdict within the budget at {fr.n} worlds")
        if not frame_class(fr, logic):
            continue
        hit = refuting_valuation(fr, f)
        if hit is not None:
            valuation, world = hit
            return NModel(fr, valuation), world
    return None


# --------------------------------------------------------------------------
# JSON


def poset_to_dict(p: Poset) -> dict:
    return {
        "worlds": p.n,
        "leq": sorted((i, j) for i in range(p.n) for j in range(p.n) if p.le(i, j)),
    }


def frame_to_dict(fr: NFrame) -> dict:
    d = poset_to_dict(fr.poset)
    d["N"] = {str(u): fr.ntable[u] for u in fr.poset.upsets()}
    return d


def model_to_dict(m: NModel) -> dict:
    d = frame_to_dict(m.frame)
    d["valuation"] = {name: m.valuation[name] for name in sorted(m.valuation)}
    return d


def poset_from_dict(d: Mapping) -> Poset:
    n = d["worlds"]
    if not isinstance(n, int) or n < 0:
        raise ValueError("worlds must be a nonnegative integer")
    return Poset.from_pairs(n, [(int(i), int(j)) for i, j in d.get("leq", [])])


def frame_from_dict(d: Mapping) -> NFrame:
    p = poset_from_dict(d)
    raw = d.get("N")
    if not isinstance(raw, Mapping):
        raise ValueError("frame JSON needs an N table")
    mapping = {int(k): int(v) for k, v in raw.items()}
    return NFrame(p, ntable_from_upset_map(p, mapping))


def model_from_dict(d: Mapping) -> NModel:
    fr = frame_from_dict(d)
    raw = d.get("valuation", {})
    return NModel(fr, {str(k): int(v) for k, v in raw.items()})
