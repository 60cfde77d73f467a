"""Independent brute-force oracles written in plain Python.

Nothing here calls into the package's closure, congruence or commutator
code; the only input is the raw Cayley table.
"""

import itertools


def table(X):
    return [list(map(int, r)) for r in X.mul]


def inverses(mul):
    n = len(mul)
    return [next(y for y in range(n) if mul[x][y] == 0) for x in range(n)]


def closure(mul, seeds):
    """Smallest multiplicatively closed set containing ``seeds`` and 0."""
    got = {0, *seeds}
    frontier = set(got)
    while frontier:
        new = set()
        for a in frontier:
            for b in list(got):
                for c in (mul[a][b], mul[b][a]):
                    if c not in got:
                        new.add(c)
        got |= new
        frontier = new
    return got


def commutator_subgroup(mul, K, L):
    """Subgroup generated by ``k l k^-1 l^-1``."""
    inv = inverses(mul)
    gens = {mul[mul[mul[k][l]][inv[k]]][inv[l]] for k in K for l in L}
    return closure(mul, gens)


def normal_closure_group(mul, S):
    inv = inverses(mul)
    n = len(mul)
    got = closure(mul, S)
    while True:
        conj = {mul[mul[g][s]][inv[g]] for g in range(n) for s in got}
        new = closure(mul, got | conj)
        if new == got:
            return got
        got = new


def normal_subgroups(mul):
    n = len(mul)
    found = {frozenset(normal_closure_group(mul, {x})) for x in range(n)}
    while True:
        more = {frozenset(normal_closure_group(mul, a | b)) for a in found for b in found}
        if more <= found:
            return sorted(found, key=lambda s: (len(s), sorted(s)))
        found |= more


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def congruences(X):
    """Every congruence of ``X`` as a class-label list (label = least member)."""
    tabs = [table(X)] + [[list(map(int, r)) for r in getattr(X, op)] for op in X.kind.binary_ops if op != "mul"]
    unary = [list(map(int, getattr(X, op))) for op in X.kind.unary_ops]
    n = X.order
    out = []
    for part in set_partitions(range(n)):
        lab = [0] * n
        for block in part:
            m = min(block)
            for x in block:
                lab[x] = m
        ok = True
        for T in tabs:
            for a, b in itertools.product(range(n), repeat=2):
                if lab[a] != lab[b]:
                    continue
                for z in range(n):
                    if lab[T[a][z]] != lab[T[b][z]] or lab[T[z][a]] != lab[T[z][b]]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            for u in unary:
                if any(lab[u[a]] != lab[u[b]] for a in range(n) for b in range(n) if lab[a] == lab[b]):
                    ok = False
        if ok:
            out.append(lab)
    return out


def _maltsev(X, x, y, z):
    m = table(X)
    if X.kind.value == "group":
        inv = inverses(m)
        return m[m[x][inv[y]]][z]
    ld = [list(map(int, r)) for r in X.ldiv]
    return m[x][ld[y][z]]


def connector_in_quotient(X, gamma, alpha, beta):
    """Does the Mal'tsev term restrict to a connector between the images of ``alpha`` and ``beta`` in ``X/gamma``?

    Works on class labels directly: ``X/gamma`` is represented by labels
    and the images of ``alpha`` and ``beta`` by the joins with ``gamma``.
    """
    n = X.order

    def join(a, b):
        lab = list(range(n))

        def find(x):
            while lab[x] != x:
                x = lab[x]
            return x

        for lbl in (a, b):
            for x in range(n):
                rx, ry = find(x), find(lbl[x])
                if rx != ry:
                    lab[max(rx, ry)] = min(rx, ry)
        return [find(x) for x in range(n)]

    A, B = join(alpha, gamma), join(beta, gamma)
    reps = sorted(set(gamma))
    dom = [(x, y, z) for x in reps for y in reps for z in reps if A[x] == A[y] and B[y] == B[z]]
    ops = [table(X)] + [[list(map(int, r)) for r in getattr(X, op)] for op in X.kind.binary_ops if op != "mul"]
    th = {t: gamma[_maltsev(X, *t)] for t in dom}
    for (a, b, c), (d, e, f) in itertools.product(dom, repeat=2):
        for T in ops:
            lhs = th[(gamma[T[a][d]], gamma[T[b][e]], gamma[T[c][f]])]
            if lhs != gamma[T[th[(a, b, c)]][th[(d, e, f)]]]:
                return False
    return True


def smith_by_minimality(X, alpha, beta):
    """Least congruence ``gamma`` for which a connector exists in ``X/gamma``.

    In a Mal'tsev variety a connector, when it exists, equals the Mal'tsev
    term, so existence is decided by testing that term.
    """
    cands = [g for g in congruences(X) if connector_in_quotient(X, g, alpha, beta)]
    below = lambda g, h: all(h[x] == h[g[x]] for x in range(X.order))
    least = [g for g in cands if all(below(g, h) for h in cands)]
    assert len(least) == 1
    return least[0]


def associator(X, x, y, z):
    m = table(X)
    rd = [list(map(int, r)) for r in X.rdiv]
    return rd[m[m[x][y]][z]][m[x][m[y][z]]]


def isomorphic(A, B):
    """Brute-force isomorphism search for small tables."""
    if A.order != B.order:
        return False
    a, b = table(A), table(B)
    n = A.order
    for perm in itertools.permutations(range(1, n)):
        f = (0, *perm)
        if all(f[a[x][y]] == b[f[x]][f[y]] for x in range(n) for y in range(n)):
            return True
    return False
