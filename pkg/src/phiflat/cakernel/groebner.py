"""Buchberger's algorithm on sparse module vectors.

A vector is a dict ``{(comp, e_1..e_n): mpq}``.  Orders are position over
term (see ``MonomialOrder``).  S-pairs are only formed between vectors whose
leading monomials share a component; the Gebauer-Moeller update prunes
pairs, and the product criterion is applied only in the rank-1 case where it
is valid.
"""
import heapq
import threading

from gmpy2 import mpq

_MEMO = {}
_MEMO_LOCK = threading.Lock()


def divides(a, b):
    if a[0] != b[0]:
        return False
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def mono_quot(b, a):
    # b / a, as a pure monomial (component 0)
    return (0,) + tuple(y - x for x, y in zip(a[1:], b[1:]))


def mono_lcm(a, b):
    return (a[0],) + tuple(max(x, y) for x, y in zip(a[1:], b[1:]))


def coprime(a, b):
    return all(x == 0 or y == 0 for x, y in zip(a[1:], b[1:]))


def shift(vec, m, c=1):
    """c * m * vec for a pure monomial m."""
    if not any(m[1:]):
        if c == 1:
            return dict(vec)
        return {k: c * v for k, v in vec.items()}
    return {(k[0],) + tuple(x + y for x, y in zip(k[1:], m[1:])): c * v for k, v in vec.items()}


def leading(vec, key):
    return max(vec, key=key)


def monic(vec, key):
    lm = leading(vec, key)
    c = vec[lm]
    if c == 1:
        return vec
    inv = 1 / c
    return {k: v * inv for k, v in vec.items()}


def _sub_multiple(p, g, m, c):
    # p -= c * m * g, in place
    if any(m[1:]):
        for k, v in g.items():
            kk = (k[0],) + tuple(x + y for x, y in zip(k[1:], m[1:]))
            nv = p.get(kk, 0) - c * v
            if nv:
                p[kk] = nv
            else:
                p.pop(kk, None)
    else:
        for k, v in g.items():
            nv = p.get(k, 0) - c * v
            if nv:
                p[k] = nv
            else:
                p.pop(k, None)


def reduce(vec, basis, key, full=True):
    """Normal form of ``vec`` modulo ``basis`` (list of (lm, monic vec)).

    With ``full=False`` only the leading term is reduced (top reduction).
    """
    p = dict(vec)
    r = {}
    by_comp = {}
    for lm, g in basis:
        by_comp.setdefault(lm[0], []).append((lm, g))
    while p:
        m = max(p, key=key)
        c = p[m]
        for lm, g in by_comp.get(m[0], ()):
            if divides(lm, m):
                _sub_multiple(p, g, mono_quot(m, lm), c)
                break
        else:
            if not full:
                p.update(r)
                return p
            r[m] = c
            del p[m]
    return r


def _freeze(vec):
    return tuple(sorted(vec.items()))


def groebner(vectors, order):
    """Reduced Groebner basis (list of monic vecs, descending by leading monomial)."""
    vectors = [v for v in vectors if v]
    memo_key = (order.spec, frozenset(_freeze(v) for v in vectors))
    with _MEMO_LOCK:
        hit = _MEMO.get(memo_key)
    if hit is not None:
        return [dict(v) for v in hit]
    result = _buchberger(vectors, order.key)
    with _MEMO_LOCK:
        _MEMO[memo_key] = tuple(_freeze(v) for v in result)
    return result


def clear_cache():
    with _MEMO_LOCK:
        _MEMO.clear()


def _buchberger(vectors, key):
    polys = []  # index -> monic vec
    lms = []
    G = []  # indices currently in the basis
    B = {}  # (i, j) -> lcm
    rank_one = all(k[0] == 0 for v in vectors for k in v)
    heap = []
    counter = 0

    def current_basis():
        return [(lms[i], polys[i]) for i in G]

    def update(h):
        nonlocal G, B, counter
        lh = lms[h]
        C = [g for g in G if lms[g][0] == lh[0]]
        D = []
        while C:
            g1 = C.pop()
            l1 = mono_lcm(lh, lms[g1])
            if rank_one and coprime(lh, lms[g1]):
                D.append(g1)
                continue
            dominated = False
            for g2 in C + D:
                if divides(mono_lcm(lh, lms[g2]), l1):
                    dominated = True
                    break
            if not dominated:
                D.append(g1)
        E = [g for g in D if not (rank_one and coprime(lh, lms[g]))]
        newB = {}
        for (a, b), l in B.items():
            if (
                not divides(lh, l)
                or mono_lcm(lms[a], lh) == l
                or mono_lcm(lms[b], lh) == l
            ):
                newB[(a, b)] = l
        for g in E:
            l = mono_lcm(lms[g], lh)
            newB[(g, h)] = l
            counter += 1
            heapq.heappush(heap, (key(l), counter, (g, h)))
        B = newB
        G = [g for g in G if not divides(lh, lms[g])] + [h]

    def add(vec):
        vec = monic(vec, key)
        polys.append(vec)
        lms.append(leading(vec, key))
        update(len(polys) - 1)

    # feed inputs smallest first so early elements tend to survive
    for v in sorted(vectors, key=lambda v: key(leading(v, key))):
        r = reduce(v, current_basis(), key, full=False)
        if r:
            add(r)

    while B:
        _, _, pair = heapq.heappop(heap)
        if pair not in B:
            continue
        l = B.pop(pair)
        i, j = pair
        s = shift(polys[i], mono_quot(l, lms[i]))
        _sub_multiple(s, polys[j], mono_quot(l, lms[j]), mpq(1))
        if not s:
            continue
        r = reduce(s, current_basis(), key, full=False)
        if r:
            add(r)

    # interreduce to the reduced basis
    basis = current_basis()
    out = []
    for idx, (lm, g) in enumerate(basis):
        others = basis[:idx] + basis[idx + 1 :]
        out.append(monic(reduce(g, others, key), key))
    out.sort(key=lambda v: key(leading(v, key)), reverse=True)
    return out
