"""Finite N-algebras, prime-filter duality, and algebraic filtrations.

An N-algebra is a bounded-above lattice with a relative
pseudo-complement and a unary negation tied to the lattice by the
compatibility identity x & -y == x & -(x & y). Upset algebras of
N-frames are the motivating examples and the duality works through
prime filters, where properness is not required: the whole carrier is
a prime filter here and becomes the top world of the dual frame.

Elements are integers 0..size-1 and all operation tables are dense
tuples; nothing in this module is meant to scale past a dozen or so
elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from subminimal.frames import (
    NFrame,
    NModel,
    Poset,
    enumerate_ntables,
    enumerate_posets,
    ntable_from_upset_map,
    poset_from_dict,
    poset_isomorphisms,
    poset_to_dict,
)
from subminimal.syntax import (
    And,
    Formula,
    Imp,
    Neg,
    Or,
    Top,
    Var,
    show,
    variables,
)


@dataclass(frozen=True)
class NAlgebra:
    size: int
    meet: tuple[tuple[int, ...], ...]
    join: tuple[tuple[int, ...], ...]
    imp: tuple[tuple[int, ...], ...]
    neg: tuple[int, ...]
    one: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("an algebra needs at least one element")
        for name in ("meet", "join", "imp"):
            table = getattr(self, name)
            if len(table) != self.size or any(len(row) != self.size for row in table):
                raise ValueError(f"{name} table must be square of order {self.size}")
        if len(self.neg) != self.size:
            raise ValueError("negation table length mismatch")
        values = [v for row in self.meet for v in row]
        values += [v for row in self.join for v in row]
        values += [v for row in self.imp for v in row]
        values += list(self.neg) + [self.one]
        if any(not 0 <= v < self.size for v in values):
            raise ValueError("table value out of range")

    def le(self, a: int, b: int) -> bool:
        return self.meet[a][b] == a


def check_nalgebra(a: NAlgebra) -> tuple[str, tuple] | None:
    """Exhaustively verify the N-algebra laws.

    None means the tables form an N-algebra; otherwise the first broken
    law is returned with a witness tuple: lattice identities first,
    then the top, then residuation of imp, then compatibility of neg.
    """
    rng = range(a.size)
    for x in rng:
        if a.meet[x][x] != x:
            return ("meet-idempotent", (x,))
        if a.join[x][x] != x:
            return ("join-idempotent", (x,))
        if a.meet[x][a.one] != x:
            return ("top", (x,))
        for y in rng:
            if a.meet[x][y] != a.meet[y][x]:
                return ("meet-commutative", (x, y))
            if a.join[x][y] != a.join[y][x]:
                return ("join-commutative", (x, y))
            if a.meet[x][a.join[x][y]] != x:
                return ("absorption", (x, y))
            if a.join[x][a.meet[x][y]] != x:
                return ("absorption", (x, y))
            for z in rng:
                if a.meet[a.meet[x][y]][z] != a.meet[x][a.meet[y][z]]:
                    return ("meet-associative", (x, y, z))
                if a.join[a.join[x][y]][z] != a.join[x][a.join[y][z]]:
                    return ("join-associative", (x, y, z))
    for x in rng:
        for y in rng:
            for z in rng:
                if a.le(a.meet[x][y], z) != a.le(x, a.imp[y][z]):
                    return ("residuation", (x, y, z))
    for x in rng:
        for y in rng:
            if a.meet[x][a.neg[y]] != a.meet[x][a.neg[a.meet[x][y]]]:
                return ("compatibility", (x, y))
    return None


def _imp_mask(p: Poset, u: int, v: int) -> int:
    out = 0
    for w in range(p.n):
        if p.up[w] & u & ~v == 0:
            out |= 1 << w
    return out


def upset_algebra(fr: NFrame) -> NAlgebra:
    """The algebra of all upsets of a frame, negation read off N.

    Element i is the i-th upset in ascending mask order; the arrow is
    the largest upset whose meet with the antecedent stays inside the
    consequent.
    """
    p = fr.poset
    upsets = p.upsets()
    index = {u: i for i, u in enumerate(upsets)}
    for u in upsets:
        if fr.ntable[u] not in index:
            raise ValueError(f"negation value at {u} is not an upset")
    k = len(upsets)
    meet = tuple(
        tuple(index[upsets[i] & upsets[j]] for j in range(k)) for i in range(k)
    )
    join = tuple(
        tuple(index[upsets[i] | upsets[j]] for j in range(k)) for i in range(k)
    )
    imp = tuple(
        tuple(index[_imp_mask(p, upsets[i], upsets[j])] for j in range(k))
        for i in range(k)
    )
    neg = tuple(index[fr.ntable[u]] for u in upsets)
    return NAlgebra(k, meet, join, imp, neg, index[(1 << p.n) - 1])


# --------------------------------------------------------------------------
# top frames


@dataclass(frozen=True)
class TopFrame:
    """A frame with a greatest world whose admissible sets are the
    nonempty upsets; the negation table is defined exactly there."""

    poset: Poset
    ntable: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.poset.top() is None:
            raise ValueError("a top frame needs a greatest world")
        if len(self.ntable) != 1 << self.poset.n:
            raise ValueError("negation table must have one entry per subset")
        admissible = set(self.admissible())
        for mask, value in enumerate(self.ntable):
            if mask in admissible:
                if value < 0:
                    raise ValueError(f"table misses admissible upset {mask}")
            elif value != -1:
                raise ValueError(f"table entry at non-admissible {mask}")

    @property
    def n(self) -> int:
        return self.poset.n

    @property
    def top(self) -> int:
        t = self.poset.top()
        assert t is not None
        return t

    def admissible(self) -> list[int]:
        return [u for u in self.poset.upsets() if u]

    def to_nframe(self) -> NFrame:
        """Forget the admissibility restriction.

        The empty set gets negation value empty, the only extension
        that keeps the locality law intact on all upset pairs.
        """
        table = {u: self.ntable[u] for u in self.admissible()}
        table[0] = 0
        return NFrame(self.poset, ntable_from_upset_map(self.poset, table))

    def value_tuple(self) -> tuple[int, ...]:
        return tuple(self.ntable[u] for u in self.admissible())


def check_topframe(tf: TopFrame) -> tuple[int, int] | None:
    """Locality over admissible pairs; None when lawful.

    Values outside the admissible family (empty or non-upset) raise
    ValueError; the intersection of two admissible upsets is again
    admissible because both contain the top world.
    """
    admissible = tf.admissible()
    adm = set(admissible)
    for u in admissible:
        if tf.ntable[u] not in adm:
            raise ValueError(f"negation value at {u} is not admissible")
    for x in admissible:
        nx = tf.ntable[x]
        for y in admissible:
            if nx & y != tf.ntable[x & y] & y:
                return (x, y)
    return None


def enumerate_topframes(p: Poset) -> list[TopFrame]:
    """All lawful top frames on a topped poset, canonical order."""
    if p.top() is None:
        raise ValueError("poset has no greatest world")
    admissible = [u for u in p.upsets() if u]
    t = p.top()
    order = sorted(range(p.n), key=lambda w: p.up[w].bit_count())
    traces: dict[int, frozenset[int]] = {}
    results: list[tuple[int, ...]] = []

    def rec(k: int) -> None:
        if k == len(order):
            flat = [-1] * (1 << p.n)
            for u in admissible:
                flat[u] = sum(
                    1 << w for w in range(p.n) if (u & p.up[w]) in traces[w]
                )
            results.append(tuple(flat))
            return
        w = order[k]
        if w == t:
            traces[w] = frozenset({1 << t})
            rec(k + 1)
            del traces[w]
            return
        allowed = []
        for z in admissible:
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
    return [TopFrame(p, table) for table in results]


def admissible_algebra(tf: TopFrame) -> NAlgebra:
    """The algebra of nonempty upsets of a top frame."""
    p = tf.poset
    elements = tf.admissible()
    index = {u: i for i, u in enumerate(elements)}
    k = len(elements)
    meet = tuple(
        tuple(index[elements[i] & elements[j]] for j in range(k)) for i in range(k)
    )
    join = tuple(
        tuple(index[elements[i] | elements[j]] for j in range(k)) for i in range(k)
    )
    imp = tuple(
        tuple(index[_imp_mask(p, elements[i], elements[j])] for j in range(k))
        for i in range(k)
    )
    neg = tuple(index[tf.ntable[u]] for u in elements)
    return NAlgebra(k, meet, join, imp, neg, index[(1 << p.n) - 1])


# --------------------------------------------------------------------------
# duality


def prime_filters(a: NAlgebra) -> list[int]:
    """All prime filters as element masks, ascending.

    A filter here contains the top, is closed upward and under meet,
    and can only contain a join by containing a joinand. The improper
    filter (everything) always qualifies.
    """
    out = []
    for mask in range(1 << a.size):
        if not (mask >> a.one) & 1:
            continue
        ok = True
        for x in range(a.size):
            if not (mask >> x) & 1:
                continue
            for y in range(a.size):
                if (mask >> y) & 1 and not (mask >> a.meet[x][y]) & 1:
                    ok = False
                    break
                if a.le(x, y) and not (mask >> y) & 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            for x in range(a.size):
                for y in range(a.size):
                    if (mask >> a.join[x][y]) & 1 and not (
                        (mask >> x) & 1 or (mask >> y) & 1
                    ):
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            out.append(mask)
    return out


def element_hat(a: NAlgebra, filters: Sequence[int], x: int) -> int:
    """World mask of the filters containing the element."""
    out = 0
    for i, f in enumerate(filters):
        if (f >> x) & 1:
            out |= 1 << i
    return out


def dual_frame(a: NAlgebra) -> TopFrame:
    """Prime filters ordered by inclusion, negation by cone agreement.

    A filter lands in the negation of an admissible set when it holds
    some negated element whose hat agrees with the set on the filter's
    cone. The hat of a negation is recomputed and compared against the
    table as a construction-time sanity check.
    """
    filters = prime_filters(a)
    k = len(filters)
    up = []
    for i in range(k):
        mask = 0
        for j in range(k):
            if filters[i] & ~filters[j] == 0:
                mask |= 1 << j
        up.append(mask)
    p = Poset(k, up)
    hats = {x: element_hat(a, filters, x) for x in range(a.size)}
    negs = sorted({a.neg[x] for x in range(a.size)})
    flat = [-1] * (1 << k)
    for u in p.upsets():
        if not u:
            continue
        value = 0
        for i in range(k):
            cone = up[i]
            for x in range(a.size):
                if (filters[i] >> a.neg[x]) & 1 and cone & hats[x] == cone & u:
                    value |= 1 << i
                    break
        flat[u] = value
    tf = TopFrame(p, tuple(flat))
    for x in range(a.size):
        if tf.ntable[hats[x]] != hats[a.neg[x]]:
            raise RuntimeError(
                f"dual negation disagrees with the algebra at element {x}"
            )
    return tf


def nalgebra_isomorphisms(a: NAlgebra, b: NAlgebra) -> Iterator[tuple[int, ...]]:
    """All isomorphisms between two algebras, as assignment tuples."""
    if a.size != b.size:
        return

    def sig(alg: NAlgebra, x: int) -> tuple[int, int]:
        below = sum(1 for y in range(alg.size) if alg.le(y, x))
        return (below, sum(1 for y in range(alg.size) if alg.neg[y] == x))

    a_sig = [sig(a, x) for x in range(a.size)]
    b_sig = [sig(b, x) for x in range(b.size)]
    if sorted(a_sig) != sorted(b_sig):
        return
    f = [-1] * a.size
    used = [False] * b.size

    def consistent(x: int) -> bool:
        for u in range(a.size):
            if f[u] < 0:
                continue
            for v in range(a.size):
                if f[v] < 0:
                    continue
                for table_a, table_b in (
                    (a.meet, b.meet),
                    (a.join, b.join),
                    (a.imp, b.imp),
                ):
                    w = table_a[u][v]
                    if f[w] >= 0 and table_b[f[u]][f[v]] != f[w]:
                        return False
            w = a.neg[u]
            if f[w] >= 0 and b.neg[f[u]] != f[w]:
                return False
        return True

    def rec(x: int) -> Iterator[tuple[int, ...]]:
        if x == a.size:
            yield tuple(f)
            return
        for c in range(b.size):
            if used[c] or a_sig[x] != b_sig[c]:
                continue
            if x == a.one and c != b.one:
                continue
            f[x] = c
            used[c] = True
            if consistent(x):
                yield from rec(x + 1)
            used[c] = False
        f[x] = -1

    yield from rec(0)


def nalgebra_isomorphic(a: NAlgebra, b: NAlgebra) -> bool:
    return next(nalgebra_isomorphisms(a, b), None) is not None


def topframe_isomorphic(s: TopFrame, t: TopFrame) -> bool:
    """Poset isomorphism transporting the admissible negation table."""
    for f in poset_isomorphisms(s.poset, t.poset):
        ok = True
        for u in s.admissible():
            image = 0
            m = u
            while m:
                w = (m & -m).bit_length() - 1
                m &= m - 1
                image |= 1 << f[w]
            value = 0
            m = s.ntable[u]
            while m:
                w = (m & -m).bit_length() - 1
                m &= m - 1
                value |= 1 << f[w]
            if t.ntable[image] != value:
                ok = False
                break
        if ok:
            return True
    return False


def duality_check(x: TopFrame | NAlgebra) -> bool:
    """Round-trip a top frame or an algebra through the duality.

    For a frame: the dual of its admissible algebra must be isomorphic
    to it. For an algebra: the hat map must be an isomorphism onto the
    admissible algebra of its dual frame (injectivity and every
    operation checked pointwise).
    """
    if isinstance(x, TopFrame):
        return topframe_isomorphic(x, dual_frame(admissible_algebra(x)))
    tf = dual_frame(x)
    filters = prime_filters(x)
    b = admissible_algebra(tf)
    elements = tf.admissible()
    index = {u: i for i, u in enumerate(elements)}
    alpha = []
    for e in range(x.size):
        hat = element_hat(x, filters, e)
        if hat not in index:
            return False
        alpha.append(index[hat])
    if len(set(alpha)) != x.size or b.size != x.size:
        return False
    if alpha[x.one] != b.one:
        return False
    for u in range(x.size):
        if alpha[x.neg[u]] != b.neg[alpha[u]]:
            return False
        for v in range(x.size):
            if alpha[x.meet[u][v]] != b.meet[alpha[u]][alpha[v]]:
                return False
            if alpha[x.join[u][v]] != b.join[alpha[u]][alpha[v]]:
                return False
            if alpha[x.imp[u][v]] != b.imp[alpha[u]][alpha[v]]:
                return False
    return True


def subdirectly_irreducible(a: NAlgebra) -> bool:
    """Presence of a second greatest element below the top."""
    for s in range(a.size):
        if s == a.one:
            continue
        if all(a.le(x, s) for x in range(a.size) if x != a.one):
            return True
    return False


# --------------------------------------------------------------------------
# algebraic filtration


def algebra_eval(a: NAlgebra, mu: Mapping[str, int], f: Formula) -> int:
    """Value of a propositional formula under an element assignment."""
    if isinstance(f, Var):
        if f.name not in mu:
            raise ValueError(f"assignment misses variable {f.name}")
        return mu[f.name]
    if isinstance(f, Top):
        return a.one
    if isinstance(f, And):
        return a.meet[algebra_eval(a, mu, f.left)][algebra_eval(a, mu, f.right)]
    if isinstance(f, Or):
        return a.join[algebra_eval(a, mu, f.left)][algebra_eval(a, mu, f.right)]
    if isinstance(f, Imp):
        return a.imp[algebra_eval(a, mu, f.left)][algebra_eval(a, mu, f.right)]
    if isinstance(f, Neg):
        return a.neg[algebra_eval(a, mu, f.sub)]
    raise ValueError(f"not a propositional formula: {show(f)}")


@dataclass(frozen=True)
class AlgebraicFiltration:
    """A filtration pair: the small algebra, the assignment into it,
    and the carrier embedding back into the ambient algebra."""

    algebra: NAlgebra
    mu: Mapping[str, int]
    carrier: tuple[int, ...]


def _lattice_closure(a: NAlgebra, seed: Iterable[int]) -> list[int]:
    out = set(seed)
    out.add(a.one)
    changed = True
    while changed:
        changed = False
        for x in list(out):
            for y in list(out):
                for z in (a.meet[x][y], a.join[x][y]):
                    if z not in out:
                        out.add(z)
                        changed = True
    return sorted(out)


def general_algebraic_filtration(
    a: NAlgebra,
    mu: Mapping[str, int],
    sigma: Iterable[Formula],
    carrier: Iterable[int],
) -> AlgebraicFiltration:
    """Filtration through an explicit lattice universe.

    The universe must contain the top and every Sigma value and be
    closed under meet and join. The arrow collects every universe
    element whose meet with the antecedent falls inside the consequent;
    the negation collects every universe element below the ambient
    negation and falls back to the least universe element when nothing
    qualifies.
    """
    sigma = frozenset(sigma)
    elements = sorted(set(carrier))
    if not elements:
        raise ValueError("empty universe")
    inside = set(elements)
    if a.one not in inside:
        raise ValueError("universe misses the top")
    for x in elements:
        if not 0 <= x < a.size:
            raise ValueError(f"universe element {x} out of range")
        for y in elements:
            if a.meet[x][y] not in inside or a.join[x][y] not in inside:
                raise ValueError("universe is not a sublattice")
    values = {f: algebra_eval(a, mu, f) for f in sigma}
    for f, v in values.items():
        if v not in inside:
            raise ValueError(f"universe misses the value of {show(f)}")
    index = {x: i for i, x in enumerate(elements)}
    k = len(elements)
    least = elements[0]
    for x in elements:
        least = a.meet[least][x]
    meet = tuple(tuple(index[a.meet[x][y]] for y in elements) for x in elements)
    join = tuple(tuple(index[a.join[x][y]] for y in elements) for x in elements)
    imp_rows = []
    for x in elements:
        row = []
        for y in elements:
            acc = None
            for s in elements:
                if a.le(a.meet[x][s], y):
                    acc = s if acc is None else a.join[acc][s]
            row.append(index[acc if acc is not None else least])
        imp_rows.append(tuple(row))
    neg_row = []
    for x in elements:
        acc = None
        for s in elements:
            if a.le(s, a.neg[x]):
                acc = s if acc is None else a.join[acc][s]
        neg_row.append(index[acc if acc is not None else least])
    small = NAlgebra(k, meet, join, tuple(imp_rows), tuple(neg_row), index[a.one])
    names = sorted({name for f in sigma for name in variables(f)})
    mu_small = {
        name: index[mu[name]] for name in names if name in mu and mu[name] in index
    }
    return AlgebraicFiltration(small, mu_small, tuple(elements))


def sublattice_filtration(
    a: NAlgebra, mu: Mapping[str, int], sigma: Iterable[Formula]
) -> AlgebraicFiltration:
    """Filtration through the lattice generated by the Sigma values.

    This is the least universe any filtration can use, so the result
    embeds into every general_algebraic_filtration over the same data.
    """
    sigma = frozenset(sigma)
    values = {algebra_eval(a, mu, f) for f in sigma}
    return general_algebraic_filtration(a, mu, sigma, _lattice_closure(a, values))


def least_filtration_correspondence(
    a: NAlgebra, mu: Mapping[str, int], sigma: Iterable[Formula]
) -> bool:
    """Agreement between the algebraic and model-theoretic quotients.

    The algebra's dual frame carries the model valuing each variable by
    the hat of its assigned element; the greatest filtration of that
    model through Sigma must order classes exactly as inclusion of
    filter traces on the generated sublattice universe.
    """
    from subminimal.filtration import greatest_filtration

    sigma = frozenset(sigma)
    filt = sublattice_filtration(a, mu, sigma)
    tf = dual_frame(a)
    filters = prime_filters(a)
    names = sorted({v for f in sigma for v in variables(f)})
    valuation = {name: element_hat(a, filters, mu[name]) for name in names}
    model = NModel(tf.to_nframe(), valuation)
    g = greatest_filtration(model, sigma)
    qposet = g.quotient.frame.poset
    k = len(filters)
    for i in range(k):
        trace_i = filters[i] & sum(1 << x for x in filt.carrier)
        for j in range(k):
            trace_j = filters[j] & sum(1 << x for x in filt.carrier)
            if qposet.le(g.pi[i], g.pi[j]) != (trace_i & ~trace_j == 0):
                return False
    return True


# --------------------------------------------------------------------------
# corpus and JSON


def algebra_corpus(max_worlds: int = 3) -> list[NAlgebra]:
    """Upset algebras of every frame on up to max_worlds worlds, one
    representative per isomorphism class."""
    buckets: dict[tuple, list[NAlgebra]] = {}
    out: list[NAlgebra] = []
    for n in range(1, max_worlds + 1):
        for p in enumerate_posets(n):
            for table in enumerate_ntables(p):
                alg = upset_algebra(NFrame(p, table))
                below = [
                    sum(1 for y in range(alg.size) if alg.le(y, x))
                    for x in range(alg.size)
                ]
                key = (
                    alg.size,
                    tuple(sorted((below[x], below[alg.neg[x]]) for x in range(alg.size))),
                )
                group = buckets.setdefault(key, [])
                if not any(nalgebra_isomorphic(alg, seen) for seen in group):
                    group.append(alg)
                    out.append(alg)
    return out


def algebra_to_dict(a: NAlgebra) -> dict:
    return {
        "size": a.size,
        "meet": [list(row) for row in a.meet],
        "join": [list(row) for row in a.join],
        "imp": [list(row) for row in a.imp],
        "neg": list(a.neg),
        "one": a.one,
    }


def algebra_from_dict(d: Mapping) -> NAlgebra:
    return NAlgebra(
        int(d["size"]),
        tuple(tuple(int(v) for v in row) for row in d["meet"]),
        tuple(tuple(int(v) for v in row) for row in d["join"]),
        tuple(tuple(int(v) for v in row) for row in d["imp"]),
        tuple(int(v) for v in d["neg"]),
        int(d["one"]),
    )


def topframe_to_dict(tf: TopFrame) -> dict:
    d = poset_to_dict(tf.poset)
    d["N"] = {str(u): tf.ntable[u] for u in tf.admissible()}
    d["top"] = tf.top
    return d


def topframe_from_dict(d: Mapping) -> TopFrame:
    p = poset_from_dict(d)
    raw = d.get("N")
    if not isinstance(raw, Mapping):
        raise ValueError("top frame JSON needs an N table")
    flat = [-1] * (1 << p.n)
    for k, v in raw.items():
        flat[int(k)] = int(v)
    return TopFrame(p, tuple(flat))
