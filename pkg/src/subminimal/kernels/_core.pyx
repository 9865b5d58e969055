# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of subminimal.kernels.pure.

Every function mirrors the pure module's signature and results. Two
sanctioned divergences: translation_gap only promises -1 agreement
(witnesses may differ between backends), and the exhaustive searches
raise ValueError on valuation spaces past 2**62, which the reference
module would only reach after an impractical runtime anyway.
"""

from libc.stdlib cimport free, malloc

from subminimal.kernels.ops import (
    OP_AND,
    OP_BBOX,
    OP_BOT,
    OP_BOX,
    OP_IMP,
    OP_NEG,
    OP_OR,
    OP_TOP,
    OP_VAR,
)

cdef int _OP_VAR = OP_VAR
cdef int _OP_TOP = OP_TOP
cdef int _OP_AND = OP_AND
cdef int _OP_OR = OP_OR
cdef int _OP_IMP = OP_IMP
cdef int _OP_NEG = OP_NEG
cdef int _OP_BOT = OP_BOT
cdef int _OP_BOX = OP_BOX
cdef int _OP_BBOX = OP_BBOX

_SPACE_LIMIT = 1 << 62


cdef inline int _popcount(long long x) nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


cdef inline int _lowbit(long long x) nogil:
    cdef int i = 0
    while not (x & 1):
        x >>= 1
        i += 1
    return i


cdef long long* _arr(seq) except NULL:
    cdef Py_ssize_t k = len(seq)
    cdef long long* out = <long long*> malloc((k if k else 1) * sizeof(long long))
    if out == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(k):
        out[i] = seq[i]
    return out


cdef long long _eval_prop_c(long long* code, Py_ssize_t ncode, int n,
                            long long* up, long long* ntable,
                            long long* val, long long* stack) nogil:
    cdef long long full = (<long long> 1 << n) - 1
    cdef int sp = 0
    cdef Py_ssize_t i = 0
    cdef long long op, arg, a, b, m, v
    cdef int w
    while i < ncode:
        op = code[i]
        arg = code[i + 1]
        i += 2
        if op == _OP_VAR:
            stack[sp] = val[arg]
            sp += 1
        elif op == _OP_TOP:
            stack[sp] = full
            sp += 1
        elif op == _OP_AND:
            sp -= 1
            stack[sp - 1] &= stack[sp]
        elif op == _OP_OR:
            sp -= 1
            stack[sp - 1] |= stack[sp]
        elif op == _OP_IMP:
            sp -= 1
            b = stack[sp]
            a = stack[sp - 1]
            m = 0
            for w in range(n):
                if up[w] & a & ~b == 0:
                    m |= <long long> 1 << w
            stack[sp - 1] = m
        elif op == _OP_NEG:
            v = ntable[stack[sp - 1]]
            if v < 0:
                return -1
            stack[sp - 1] = v
        else:
            return -2
    return stack[sp - 1]


cdef long long _eval_modal_c(long long* code, Py_ssize_t ncode, int n,
                             long long* up, long long* ntable,
                             long long* val, long long* stack) nogil:
    cdef long long full = (<long long> 1 << n) - 1
    cdef int sp = 0
    cdef Py_ssize_t i = 0
    cdef long long op, arg, a, b, m
    cdef int w
    while i < ncode:
        op = code[i]
        arg = code[i + 1]
        i += 2
        if op == _OP_VAR:
            stack[sp] = val[arg]
            sp += 1
        elif op == _OP_TOP:
            stack[sp] = full
            sp += 1
        elif op == _OP_BOT:
            stack[sp] = 0
            sp += 1
        elif op == _OP_AND:
            sp -= 1
            stack[sp - 1] &= stack[sp]
        elif op == _OP_OR:
            sp -= 1
            stack[sp - 1] |= stack[sp]
        elif op == _OP_IMP:
            sp -= 1
            b = stack[sp]
            stack[sp - 1] = (~stack[sp - 1] | b) & full
        elif op == _OP_BOX:
            a = stack[sp - 1]
            m = 0
            for w in range(n):
                if up[w] & ~a == 0:
                    m |= <long long> 1 << w
            stack[sp - 1] = m
        elif op == _OP_BBOX:
            stack[sp - 1] = ntable[stack[sp - 1]]
        else:
            return -2
    return stack[sp - 1]


def eval_prop(code, n, up, ntable, val):
    """See kernels.pure.eval_prop."""
    cdef Py_ssize_t ncode = len(code)
    cdef long long* ccode = _arr(code)
    cdef long long* cup = _arr(up)
    cdef long long* cnt = _arr(ntable)
    cdef long long* cval = _arr(val)
    cdef long long* stack = <long long*> malloc(
        (ncode // 2 + 1) * sizeof(long long))
    if stack == NULL:
        free(ccode); free(cup); free(cnt); free(cval)
        raise MemoryError()
    try:
        return _eval_prop_c(ccode, ncode, n, cup, cnt, cval, stack)
    finally:
        free(ccode)
        free(cup)
        free(cnt)
        free(cval)
        free(stack)


def eval_modal(code, n, up, ntable, val):
    """See kernels.pure.eval_modal."""
    cdef Py_ssize_t ncode = len(code)
    cdef long long* ccode = _arr(code)
    cdef long long* cup = _arr(up)
    cdef long long* cnt = _arr(ntable)
    cdef long long* cval = _arr(val)
    cdef long long* stack = <long long*> malloc(
        (ncode // 2 + 1) * sizeof(long long))
    if stack == NULL:
        free(ccode); free(cup); free(cnt); free(cval)
        raise MemoryError()
    try:
        return _eval_modal_c(ccode, ncode, n, cup, cnt, cval, stack)
    finally:
        free(ccode)
        free(cup)
        free(cnt)
        free(cval)
        free(stack)


def find_refuting_valuation_prop(code, nvars, n, up, ntable, upsets):
    """See kernels.pure.find_refuting_valuation_prop."""
    if len(upsets) ** nvars >= _SPACE_LIMIT:
        raise ValueError("valuation space exceeds the compiled range")
    cdef Py_ssize_t ncode = len(code)
    cdef long long* ccode = _arr(code)
    cdef long long* cup = _arr(up)
    cdef long long* cnt = _arr(ntable)
    cdef long long* cupsets = _arr(upsets)
    cdef int nv = nvars if nvars > 0 else 1
    cdef long long* val = <long long*> malloc(nv * sizeof(long long))
    cdef long long* stack = <long long*> malloc(
        (ncode // 2 + 1) * sizeof(long long))
    cdef long long full = (<long long> 1 << n) - 1
    cdef long long nu = len(upsets)
    cdef long long total = len(upsets) ** nvars
    cdef long long idx, t, r
    cdef int k
    if val == NULL or stack == NULL:
        if val != NULL: free(val)
        if stack != NULL: free(stack)
        free(ccode); free(cup); free(cnt); free(cupsets)
        raise MemoryError()
    try:
        val[0] = 0
        for idx in range(total):
            t = idx
            for k in range(nvars - 1, -1, -1):
                val[k] = cupsets[t % nu]
                t //= nu
            r = _eval_prop_c(ccode, ncode, n, cup, cnt, val, stack)
            if r < 0:
                raise ValueError("evaluation left the negation table domain")
            if r != full:
                return idx
        return -1
    finally:
        free(ccode)
        free(cup)
        free(cnt)
        free(cupsets)
        free(val)
        free(stack)


def find_refuting_valuation_modal(code, nvars, n, up, ntable):
    """See kernels.pure.find_refuting_valuation_modal."""
    if (1 << n) ** nvars >= _SPACE_LIMIT:
        raise ValueError("valuation space exceeds the compiled range")
    cdef Py_ssize_t ncode = len(code)
    cdef long long* ccode = _arr(code)
    cdef long long* cup = _arr(up)
    cdef long long* cnt = _arr(ntable)
    cdef int nv = nvars if nvars > 0 else 1
    cdef long long* val = <long long*> malloc(nv * sizeof(long long))
    cdef long long* stack = <long long*> malloc(
        (ncode // 2 + 1) * sizeof(long long))
    cdef long long full = (<long long> 1 << n) - 1
    cdef long long space = <long long> 1 << n
    cdef long long total = (1 << n) ** nvars
    cdef long long idx, t, r
    cdef int k
    if val == NULL or stack == NULL:
        if val != NULL: free(val)
        if stack != NULL: free(stack)
        free(ccode); free(cup); free(cnt)
        raise MemoryError()
    try:
        val[0] = 0
        for idx in range(total):
            t = idx
            for k in range(nvars - 1, -1, -1):
                val[k] = t % space
                t //= space
            r = _eval_modal_c(ccode, ncode, n, cup, cnt, val, stack)
            if r < 0:
                raise ValueError("modal opcode mismatch")
            if r != full:
                return idx
        return -1
    finally:
        free(ccode)
        free(cup)
        free(cnt)
        free(val)
        free(stack)


def locality_violation(n, upsets, ntable):
    """See kernels.pure.locality_violation."""
    cdef long long* cupsets = _arr(upsets)
    cdef long long* cnt = _arr(ntable)
    cdef Py_ssize_t nu = len(upsets)
    cdef Py_ssize_t i, j
    cdef long long x, y, nx
    try:
        for i in range(nu):
            x = cupsets[i]
            nx = cnt[x]
            for j in range(nu):
                y = cupsets[j]
                if nx & y != cnt[x & y] & y:
                    return i * nu + j
        return -1
    finally:
        free(cupsets)
        free(cnt)


def ns4_table_violation(n, up, ntable):
    """See kernels.pure.ns4_table_violation."""
    cdef long long* cup = _arr(up)
    cdef long long* cnt = _arr(ntable)
    cdef long long size = <long long> 1 << n
    cdef long long x, v, m
    cdef int w
    try:
        for x in range(size):
            v = cnt[x]
            m = v
            while m:
                w = _lowbit(m & -m)
                if cup[w] & ~v:
                    return 2 * x
                m &= m - 1
            for w in range(n):
                if ((v >> w) & 1) != ((cnt[x & cup[w]] >> w) & 1):
                    return 2 * x + 1
        return -1
    finally:
        free(cup)
        free(cnt)


def lift_table(n, up, upsets, ntable):
    """See kernels.pure.lift_table."""
    cdef long long* cup = _arr(up)
    cdef long long* cupsets = _arr(upsets)
    cdef long long* cnt = _arr(ntable)
    cdef long long size = <long long> 1 << n
    cdef Py_ssize_t nu = len(upsets)
    cdef long long x, m, xr, y
    cdef Py_ssize_t k
    cdef int w
    out = []
    try:
        for x in range(size):
            m = 0
            for w in range(n):
                xr = x & cup[w]
                for k in range(nu):
                    y = cupsets[k]
                    if y & cup[w] == xr and (cnt[y] >> w) & 1:
                        m |= <long long> 1 << w
                        break
            out.append(m)
        return out
    finally:
        free(cup)
        free(cupsets)
        free(cnt)


def translation_gap(n, up, ntable, nstar, upsets, depth):
    """See kernels.pure.translation_gap; witnesses may differ between
    backends, -1 agreement is exact."""
    cdef long long* cup = _arr(up)
    cdef long long* cnt = _arr(ntable)
    cdef long long* cns = _arr(nstar)
    cdef long long full = (<long long> 1 << n) - 1
    cdef long long la, ra, lb, rb, nl, cand, m, a, b
    cdef int w, r
    cdef Py_ssize_t ia, ib, ncur
    pairs = set()
    try:
        for u in upsets:
            pairs.add((u << n) | u)
        for r in range(depth):
            cur = sorted(pairs)
            ncur = len(cur)
            added = False
            for ia in range(ncur):
                la = cur[ia] >> n
                nl = cnt[la]
                if nl < 0:
                    raise ValueError("negation escaped the upset domain")
                cand = (nl << n) | cns[cur[ia] & full]
                if cand not in pairs:
                    if (cand >> n) != (cand & full):
                        return cand
                    pairs.add(cand)
                    added = True
            for ia in range(ncur):
                la = cur[ia] >> n
                ra = cur[ia] & full
                for ib in range(ncur):
                    lb = cur[ib] >> n
                    rb = cur[ib] & full
                    cand = ((la & lb) << n) | (ra & rb)
                    if cand not in pairs:
                        if (cand >> n) != (cand & full):
                            return cand
                        pairs.add(cand)
                        added = True
                    cand = ((la | lb) << n) | (ra | rb)
                    if cand not in pairs:
                        if (cand >> n) != (cand & full):
                            return cand
                        pairs.add(cand)
                        added = True
                    a = 0
                    for w in range(n):
                        if cup[w] & la & ~lb == 0:
                            a |= <long long> 1 << w
                    b = (~ra | rb) & full
                    m = 0
                    for w in range(n):
                        if cup[w] & ~b == 0:
                            m |= <long long> 1 << w
                    cand = (a << n) | m
                    if cand not in pairs:
                        if (cand >> n) != (cand & full):
                            return cand
                        pairs.add(cand)
                        added = True
            if not added:
                break
        return -1
    finally:
        free(cup)
        free(cnt)
        free(cns)


def en_holds(n, ntable, k):
    """See kernels.pure.en_holds."""
    if (1 << n) ** k >= _SPACE_LIMIT:
        raise ValueError("guard space exceeds the compiled range")
    cdef long long* cnt = _arr(ntable)
    cdef long long size = <long long> 1 << n
    cdef long long full = size - 1
    cdef long long total = (1 << n) ** k
    cdef long long zi, t, inter, x
    cdef int i
    try:
        for zi in range(total):
            t = zi
            inter = full
            for i in range(k):
                inter &= cnt[t % size]
                t //= size
            for x in range(size):
                if cnt[x] & inter != cnt[x & inter] & inter:
                    return 0
        return 1
    finally:
        free(cnt)


def rn_holds(n, ntable, k):
    """See kernels.pure.rn_holds."""
    if (1 << n) ** k >= _SPACE_LIMIT:
        raise ValueError("guard space exceeds the compiled range")
    cdef long long* cnt = _arr(ntable)
    cdef long long size = <long long> 1 << n
    cdef long long full = size - 1
    cdef long long total = (1 << n) ** k
    cdef long long pi, t, inter, q, r, nq
    cdef int i
    try:
        for pi in range(total):
            t = pi
            inter = full
            for i in range(k):
                inter &= cnt[t % size]
                t //= size
            for q in range(size):
                nq = cnt[q]
                for r in range(size):
                    if inter & (q ^ r):
                        continue
                    if inter & (nq ^ cnt[r]):
                        return 0
        return 1
    finally:
        free(cnt)


cdef bint _rec_onto(int v, long long covered, int ns, int nt, long long full_t,
                    long long* t_up, long long* t_down,
                    long long* s_up, long long* s_down, int* f) nogil:
    cdef long long cand, m, newcov
    cdef int u, c
    if v == ns:
        return covered == full_t
    cand = full_t
    for u in range(v):
        if (s_up[u] >> v) & 1:
            cand &= t_up[f[u]]
        if (s_down[u] >> v) & 1:
            cand &= t_down[f[u]]
    m = cand
    while m:
        c = _lowbit(m & -m)
        m &= m - 1
        newcov = covered | (<long long> 1 << c)
        if _popcount(full_t & ~newcov) <= ns - v - 1:
            f[v] = c
            if _rec_onto(v + 1, newcov, ns, nt, full_t,
                         t_up, t_down, s_up, s_down, f):
                return True
    f[v] = -1
    return False


def search_order_onto(nt, t_up, t_down, ns, s_up, s_down):
    """See kernels.pure.search_order_onto."""
    if ns < nt:
        return None
    cdef long long* ctu = _arr(t_up)
    cdef long long* ctd = _arr(t_down)
    cdef long long* csu = _arr(s_up)
    cdef long long* csd = _arr(s_down)
    cdef int* f = <int*> malloc((ns if ns else 1) * sizeof(int))
    cdef long long full_t = (<long long> 1 << nt) - 1
    cdef int i
    if f == NULL:
        free(ctu); free(ctd); free(csu); free(csd)
        raise MemoryError()
    for i in range(ns):
        f[i] = -1
    try:
        if _rec_onto(0, 0, ns, nt, full_t, ctu, ctd, csu, csd, f):
            return [f[i] for i in range(ns)]
        return None
    finally:
        free(ctu)
        free(ctd)
        free(csu)
        free(csd)
        free(f)


cdef bint _assign_pos(int i, long long covered, int nworlds, int* worlds,
                      long long dom, long long full_t, int nt,
                      long long* t_up, long long* t_down,
                      long long* s_up, int* upsize, int* f) nogil:
    cdef long long cand, m, newcov, have, mm
    cdef int j, u, v, c, w
    if i == nworlds:
        if covered != full_t:
            return False
        for j in range(nworlds):
            w = worlds[j]
            have = 0
            mm = dom & s_up[w]
            while mm:
                u = _lowbit(mm & -mm)
                have |= <long long> 1 << f[u]
                mm &= mm - 1
            if t_up[f[w]] & ~have:
                return False
        return True
    v = worlds[i]
    cand = full_t
    for j in range(i):
        u = worlds[j]
        if (s_up[u] >> v) & 1:
            cand &= t_up[f[u]]
        if (s_up[v] >> u) & 1:
            cand &= t_down[f[u]]
    m = cand
    while m:
        c = _lowbit(m & -m)
        m &= m - 1
        if upsize[c] > _popcount(dom & s_up[v]):
            continue
        newcov = covered | (<long long> 1 << c)
        if _popcount(full_t & ~newcov) <= nworlds - i - 1:
            f[v] = c
            if _assign_pos(i + 1, newcov, nworlds, worlds, dom, full_t, nt,
                           t_up, t_down, s_up, upsize, f):
                return True
    f[v] = -1
    return False


def search_positive_morphism(nt, t_up, t_down, ns, s_up, s_down):
    """See kernels.pure.search_positive_morphism."""
    cdef long long* ctu = _arr(t_up)
    cdef long long* ctd = _arr(t_down)
    cdef long long* csu = _arr(s_up)
    cdef long long* csd = _arr(s_down)
    cdef int* f = <int*> malloc((ns if ns else 1) * sizeof(int))
    cdef int* worlds = <int*> malloc((ns if ns else 1) * sizeof(int))
    cdef int* upsize = <int*> malloc((nt if nt else 1) * sizeof(int))
    cdef long long full_t = (<long long> 1 << nt) - 1
    cdef long long dom, m
    cdef int w, c, nworlds
    cdef bint closed
    if f == NULL or worlds == NULL or upsize == NULL:
        if f != NULL: free(f)
        if worlds != NULL: free(worlds)
        if upsize != NULL: free(upsize)
        free(ctu); free(ctd); free(csu); free(csd)
        raise MemoryError()
    for c in range(nt):
        upsize[c] = _popcount(ctu[c])
    try:
        for dom in range(<long long> 1 << ns):
            m = dom
            closed = True
            while m:
                w = _lowbit(m & -m)
                if csd[w] & ~dom:
                    closed = False
                    break
                m &= m - 1
            if not closed or _popcount(dom) < nt:
                continue
            nworlds = 0
            for w in range(ns):
                if (dom >> w) & 1:
                    worlds[nworlds] = w
                    nworlds += 1
                f[w] = -1
            if _assign_pos(0, 0, nworlds, worlds, dom, full_t, nt,
                           ctu, ctd, csu, upsize, f):
                return dom, [f[w] for w in range(ns)]
        return None
    finally:
        free(ctu)
        free(ctd)
        free(csu)
        free(csd)
        free(f)
        free(worlds)
        free(upsize)
