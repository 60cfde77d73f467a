"""Higgins, Huq and Smith commutators and the ternary obstruction.

Subobjects are passed as :class:`~cosmash.algebra.Subobject` and
congruences as :class:`~cosmash.algebra.Congruence`; all results are new
immutable objects of the same types.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import algebra as alg
from .algebra import (
    Congruence,
    FiniteAlgebra,
    Kind,
    Normality,
    Subobject,
    congruence_generate,
    denormalize,
    normal_closure,
    normalize,
    quotient,
    relation_algebra,
    subalgebra,
    trivial_subobject,
)
from .errors import InternalInconsistency, NotNormal, PreconditionFailed, WrongKind
from .words import (
    DEFAULT_SORTS,
    enumerate_cosmash_terms,
    eval_term,
    format_term,
    letters_of,
)

__all__ = [
    "CommutatorKind",
    "Exactness",
    "CommutatorReport",
    "ConnectorWitness",
    "SHViolation",
    "SHReport",
    "higgins_binary",
    "cooperator_check",
    "huq_commutator",
    "smith_commutator",
    "smith_normalization",
    "ternary_obstruction",
    "ternary_group_exact",
    "associator_subobject",
    "ternary_lower_bound",
    "lower_bound_exactness",
    "commutator_report",
    "sh_check",
]


class CommutatorKind(str, enum.Enum):
    HIGGINS_BINARY = "HigginsBinary"
    HUQ = "Huq"
    SMITH = "Smith"
    TERNARY_OBSTRUCTION = "TernaryObstruction"
    SMITH_NORMALIZATION = "SmithNormalization"
    TERNARY_GROUP_EXACT = "TernaryGroupExact"
    ASSOCIATOR = "Associator"
    TERNARY_LOWER_BOUND = "TernaryLowerBound"


class Exactness(str, enum.Enum):
    EXACT = "Exact"
    LOWER_BOUND = "LowerBound"


def _require_normal(*subs):
    for S in subs:
        if not S.is_normal:
            raise NotNormal(f"{S!r} is not normal in its parent")


# --------------------------------------------------------------------------
# binary commutators


def higgins_binary(X, K, L):
    """Image of the co-smash product ``K (x) L`` under the fold map.

    The subalgebra ``D`` of ``X x X x X`` generated by ``(k, k, 1)`` and
    ``(l, 1, l)`` is the image of ``K + L`` under (fold, projection); its
    fibre over ``(1, 1)`` is the commutator.
    """
    seeds = [(k, k, 0) for k in K.elements] + [(l, 0, l) for l in L.elements]
    codes = alg._closure_codes([X, X, X], np.array(seeds))
    n = X.order
    x, rest = np.divmod(codes, n * n)
    return Subobject(X, x[rest == 0])


def _cooperator_defects(X, K, L):
    """For each operation, arrays ``(lhs, rhs, args)`` comparing ``phi(op(...))`` and ``op(phi(...))``."""
    k, l = K.array, L.array
    out = []
    k1 = k[:, None, None, None]
    l1 = l[None, :, None, None]
    k2 = k[None, None, :, None]
    l2 = l[None, None, None, :]
    phi1 = X.mul[k1, l1]
    phi2 = X.mul[k2, l2]
    for op in X.kind.binary_ops:
        T = getattr(X, op)
        lhs = X.mul[T[k1, k2], T[l1, l2]]
        rhs = T[phi1, phi2]
        out.append((op, lhs, rhs))
    for op in X.kind.unary_ops:
        u = getattr(X, op)
        lhs = X.mul[u[k[:, None]], u[l[None, :]]]
        rhs = u[X.mul[k[:, None], l[None, :]]]
        out.append((op, lhs, rhs))
    return out


def cooperator_check(X, K, L):
    """Is ``(k, l) -> k*l`` a homomorphism ``K x L -> X``?

    Returns ``(True, phi)`` with ``phi`` the ``|K| x |L|`` table of the map,
    or ``(False, (op, witness))`` with witness element tuples from K and L.
    """
    k, l = K.array, L.array
    for op, lhs, rhs in _cooperator_defects(X, K, L):
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            idx = bad[0]
            if lhs.ndim == 4:
                w = (int(k[idx[0]]), int(l[idx[1]]), int(k[idx[2]]), int(l[idx[3]]))
            else:
                w = (int(k[idx[0]]), int(l[idx[1]]))
            return False, (op, w)
    return True, X.mul[k[:, None], l[None, :]]


def huq_commutator(X, K, L):
    """Smallest normal ``N`` such that ``K`` and ``L`` cooperate in ``X/N``."""
    N = trivial_subobject(X)
    while True:
        defects = set()
        for _, lhs, rhs in _cooperator_defects(X, K, L):
            d = np.unique(X.rdiv[lhs, rhs])
            defects.update(int(v) for v in d if not N.mask[v])
        if not defects:
            return N
        N = normal_closure(X, set(N.elements) | defects)


# --------------------------------------------------------------------------
# Smith commutator


@dataclass(frozen=True, eq=False)
class ConnectorWitness:
    """A connector ``theta`` between two congruences, stored pointwise.

    ``domain`` is the ``(m, 3)`` array of triples ``(x, y, z)`` with
    ``x alpha y`` and ``y beta z``; ``values[i]`` is ``theta(domain[i])``.
    """

    algebra: FiniteAlgebra
    alpha: Congruence
    beta: Congruence
    domain: np.ndarray
    values: np.ndarray

    def __call__(self, x, y, z):
        hit = np.nonzero((self.domain == (x, y, z)).all(axis=1))[0]
        if not hit.size:
            raise KeyError((x, y, z))
        return int(self.values[hit[0]])

    def validate(self):
        """Re-check both Mal'tsev identities and compatibility with every operation."""
        return _connector_ok(self.algebra, self.alpha, self.beta, self.domain, self.values, exhaustive=True)


def _domain(alpha, beta):
    """All ``(x, y, z)`` with ``x alpha y`` and ``y beta z``."""
    a, b = alpha.class_of, beta.class_of
    n = len(a)
    x, y = np.nonzero(a[:, None] == a[None, :])
    rows = []
    for yy in range(n):
        zs = np.flatnonzero(b == b[yy])
        xs = x[y == yy]
        g = np.stack(np.meshgrid(xs, [yy], zs, indexing="ij"), axis=-1).reshape(-1, 3)
        rows.append(g)
    return np.concatenate(rows)


def _maltsev(X, d):
    x, y, z = d[..., 0], d[..., 1], d[..., 2]
    if X.kind is Kind.GROUP:
        return X.mul[X.mul[x, X.inv[y]], z]
    return X.mul[x, X.ldiv[y, z]]


def _connector_ok(X, alpha, beta, dom, vals, exhaustive=False):
    """Is the pointwise map ``dom -> vals`` a connector?"""
    n = X.order
    x, y, z = dom[:, 0], dom[:, 1], dom[:, 2]
    lookup = np.full(n ** 3, -1, dtype=np.int64)
    lookup[(x * n + y) * n + z] = vals
    # theta(x, x, z) = z and theta(x, z, z) = x wherever defined
    xxz = lookup[(y * n + y) * n + z]
    if np.any(xxz != z):
        return False
    xzz = lookup[(x * n + y) * n + y]
    if np.any(xzz != x):
        return False
    if X.kind is Kind.GROUP and not exhaustive:
        # a finite group's domain is generated by the diagonal and the two
        # unit classes placed in the outer coordinates
        Na = np.flatnonzero(alpha.class_of == 0)
        Nb = np.flatnonzero(beta.class_of == 0)
        diag = np.arange(n)
        gens = np.concatenate(
            [
                np.stack([diag, diag, diag], 1),
                np.stack([Na, np.zeros_like(Na), np.zeros_like(Na)], 1),
                np.stack([np.zeros_like(Nb), np.zeros_like(Nb), Nb], 1),
            ]
        )
        tables = [X.mul]
        left, right = dom, gens
    else:
        tables = list(X.binary_tables)
        left, right = dom, dom
    lv = lookup[(left[:, 0] * n + left[:, 1]) * n + left[:, 2]]
    rv = lookup[(right[:, 0] * n + right[:, 1]) * n + right[:, 2]]
    chunk = max(1, 2_000_000 // max(1, len(right)))
    for T in tables:
        for s in range(0, len(left), chunk):
            L = left[s : s + chunk, None, :]
            prod_ = T[L, right[None, :, :]]
            pv = lookup[(prod_[..., 0] * n + prod_[..., 1]) * n + prod_[..., 2]]
            if np.any(pv < 0):
                return False
            if np.any(pv != T[lv[s : s + chunk, None], rv[None, :]]):
                return False
    if X.kind is Kind.GROUP:
        iv = lookup[(X.inv[x] * n + X.inv[y]) * n + X.inv[z]]
        if np.any(iv != X.inv[vals]):
            return False
    return True


def _image_congruence(theta, proj, Q):
    pairs = np.stack([proj.map, proj.map[theta.class_of]], axis=1)
    return congruence_generate(Q, pairs)


def smith_commutator(X, alpha, beta):
    """Term-condition commutator of two congruences, with connector verification.

    Returns ``(delta, witness)``.  ``witness`` is a verified
    :class:`ConnectorWitness` between ``alpha`` and ``beta`` exactly when
    ``delta`` is discrete, i.e. when they already commute in ``X``.
    """
    A, px, py, code = relation_algebra(X, beta)
    n = X.order
    a = alpha.class_of
    ax, ay = np.nonzero(a[:, None] == a[None, :])
    seeds = np.stack([code[ax * n + ax], code[ay * n + ay]], axis=1)
    Delta = congruence_generate(A, seeds)
    diag_of = code[py * n + py]
    in_delta = Delta.class_of == Delta.class_of[diag_of]
    rel = np.stack([px[in_delta], py[in_delta]], axis=1)
    delta = congruence_generate(X, rel)
    # delta must already be the relation we read off, not just contain it
    if int(np.sum(delta.class_of[:, None] == delta.class_of[None, :])) != len(rel):
        raise InternalInconsistency("term-condition relation is not a congruence")

    Q, proj = quotient(X, delta)
    qa = _image_congruence(alpha, proj, Q)
    qb = _image_congruence(beta, proj, Q)
    dom = _domain(qa, qb)
    vals = _maltsev(Q, dom)
    if not _connector_ok(Q, qa, qb, dom, vals):
        raise InternalInconsistency("no connector after dividing out the term-condition commutator")

    witness = None
    if delta.is_discrete:
        witness = ConnectorWitness(X, alpha, beta, dom, vals)
    return delta, witness


def smith_normalization(X, K, L):
    """Unit class of the Smith commutator of the denormalisations of ``K`` and ``L``."""
    _require_normal(K, L)
    delta, _ = smith_commutator(X, denormalize(X, K), denormalize(X, L))
    return normalize(X, delta)


def ternary_obstruction(X, K, L):
    """``[K, L, X]`` for normal ``K``, ``L`` whose binary commutator vanishes."""
    _require_normal(K, L)
    h = higgins_binary(X, K, L)
    if not h.is_trivial:
        raise PreconditionFailed(
            "binary commutator is nontrivial", [e for e in h.elements if e != 0]
        )
    return smith_normalization(X, K, L)


# --------------------------------------------------------------------------
# ternary commutators


def ternary_group_exact(X, K, L, M):
    """``[K,[L,M]] v [L,[M,K]] v [M,[K,L]]`` in a group."""
    if X.kind is not Kind.GROUP:
        raise WrongKind("the nested formula holds for groups only")
    parts = [
        higgins_binary(X, K, higgins_binary(X, L, M)),
        higgins_binary(X, L, higgins_binary(X, M, K)),
        higgins_binary(X, M, higgins_binary(X, K, L)),
    ]
    return alg.join(*parts)


def _closure_in(X, J, values):
    """Normal closure of ``values`` inside the subobject ``J``, as a subobject of ``X``."""
    values = {int(v) for v in values}
    if values <= {0}:
        return trivial_subobject(X)
    Jalg, inc = subalgebra(J)
    pos = {int(e): i for i, e in enumerate(J.elements)}
    N = normal_closure(Jalg, [pos[v] for v in values])
    out = Subobject(X, inc.map[N.array])
    if J.is_whole:
        out._normality = Normality.NORMAL
    return out


def associator_subobject(X, K, L, M):
    """Normal closure in ``K v L v M`` of the associators with entries from ``K, L, M`` in any order."""
    if X.kind is not Kind.LOOP:
        raise WrongKind("associators are computed for loops")
    values = set()
    subs = (K, L, M)
    for p in set(itertools.permutations(range(3))):
        a, b, c = (subs[i].array for i in p)
        x, y, z = a[:, None, None], b[None, :, None], c[None, None, :]
        v = X.rdiv[X.mul[X.mul[x, y], z], X.mul[x, X.mul[y, z]]]
        values.update(np.unique(v).tolist())
    return _closure_in(X, alg.join(K, L, M), values)


def _lower_bound_values(X, K, L, M, depth):
    """Evaluate every ternary co-smash term; return ``{value: (term, assignment)}``."""
    found = {}
    grids = np.meshgrid(K.array, L.array, M.array, indexing="ij")
    env = {(s, 1): g for s, g in enumerate(grids)}
    for t in enumerate_cosmash_terms(X.kind, 3, 1, depth):
        if not letters_of(t):
            continue
        v = np.broadcast_to(eval_term(t, X, env), grids[0].shape)
        uniq, first = np.unique(v.ravel(), return_index=True)
        for u, f in zip(uniq.tolist(), first.tolist()):
            if u != 0 and u not in found:
                i, j, k = np.unravel_index(f, grids[0].shape)
                found[u] = (t, (int(K.array[i]), int(L.array[j]), int(M.array[k])))
    return found


def ternary_lower_bound(X, K, L, M, depth=6, _values=None):
    """Lower bound for ``[K, L, M]`` from co-smash terms of depth at most ``depth``.

    Values of the terms on ``K x L x M`` are closed up to a normal subobject of
    ``K v L v M``; the true commutator is such a normal subobject, so the
    result stays below it.
    """
    found = _values if _values is not None else _lower_bound_values(X, K, L, M, depth)
    return _closure_in(X, alg.join(K, L, M), found)


def lower_bound_exactness(X, K, L, M, depth=6, result=None):
    """Exact for groups once two consecutive depths agree and reach the nested formula."""
    if X.kind is not Kind.GROUP:
        return Exactness.LOWER_BOUND
    if result is None:
        result = ternary_lower_bound(X, K, L, M, depth)
    nxt = ternary_lower_bound(X, K, L, M, depth + 1)
    if nxt == result and ternary_group_exact(X, K, L, M) <= result:
        return Exactness.EXACT
    return Exactness.LOWER_BOUND


# --------------------------------------------------------------------------
# reports


@dataclass
class CommutatorReport:
    kind: CommutatorKind
    inputs: dict
    result: object
    exactness: Exactness = Exactness.EXACT
    witnesses: list = field(default_factory=list)
    connector: ConnectorWitness | None = None

    def verify(self):
        """Every witness element lies in the result."""
        if isinstance(self.result, Subobject):
            return all(w["element"] in self.result for w in self.witnesses)
        return all(self.result.related(w["element"], w.get("related_to", 0)) for w in self.witnesses)


def commutator_report(kind, X, K, L, M=None, depth=6):
    """Compute one commutator and wrap it with exactness and witnesses."""
    kind = CommutatorKind(kind)
    inputs = {"K": K, "L": L}
    if M is not None:
        inputs["M"] = M
    if kind is CommutatorKind.HIGGINS_BINARY:
        res = higgins_binary(X, K, L)
    elif kind is CommutatorKind.HUQ:
        res = huq_commutator(X, K, L)
    elif kind is CommutatorKind.SMITH_NORMALIZATION:
        res = smith_normalization(X, K, L)
    elif kind is CommutatorKind.TERNARY_OBSTRUCTION:
        res = ternary_obstruction(X, K, L)
    elif kind is CommutatorKind.SMITH:
        _require_normal(K, L)
        delta, conn = smith_commutator(X, denormalize(X, K), denormalize(X, L))
        wit = [{"element": int(x), "related_to": int(delta.class_of[x])} for x in range(X.order) if delta.class_of[x] != x]
        return CommutatorReport(kind, inputs, delta, Exactness.EXACT, wit, conn)
    elif kind is CommutatorKind.TERNARY_GROUP_EXACT:
        res = ternary_group_exact(X, K, L, M)
    elif kind is CommutatorKind.ASSOCIATOR:
        res = associator_subobject(X, K, L, M)
        return CommutatorReport(kind, inputs, res, Exactness.LOWER_BOUND, _assoc_witnesses(X, K, L, M, res))
    elif kind is CommutatorKind.TERNARY_LOWER_BOUND:
        found = _lower_bound_values(X, K, L, M, depth)
        res = ternary_lower_bound(X, K, L, M, depth, _values=found)
        ex = lower_bound_exactness(X, K, L, M, depth, res)
        sorts = DEFAULT_SORTS
        wit = [
            {"element": v, "term": format_term(t, sorts), "assignment": list(a)}
            for v, (t, a) in sorted(found.items())
        ]
        return CommutatorReport(kind, inputs, res, ex, wit)
    else:
        raise ValueError(kind)
    wit = [{"element": e} for e in res.elements if e != 0]
    return CommutatorReport(kind, inputs, res, Exactness.EXACT, wit)


def _assoc_witnesses(X, K, L, M, res):
    out = []
    seen = set()
    subs = (K, L, M)
    for p in sorted(set(itertools.permutations(range(3)))):
        for x, y, z in itertools.product(*(subs[i].elements for i in p)):
            v = int(X.rdiv[X.mul[X.mul[x, y], z], X.mul[x, X.mul[y, z]]])
            if v != 0 and v not in seen:
                seen.add(v)
                out.append({"element": v, "associator": [x, y, z]})
    return out


@dataclass
class SHViolation:
    K: Subobject
    L: Subobject
    obstruction: Subobject

    @property
    def witnesses(self):
        return [e for e in self.obstruction.elements if e != 0]


@dataclass
class SHReport:
    algebra: FiniteAlgebra
    normal_subobjects: list
    pairs_checked: int
    huq_pairs: int
    violations: list

    @property
    def holds(self):
        return not self.violations


def _sh_pair(X, K, L):
    if not higgins_binary(X, K, L).is_trivial:
        return False, None
    obs = ternary_obstruction(X, K, L)
    return True, (None if obs.is_trivial else SHViolation(K, L, obs))


def sh_check(X, workers=None):
    """Scan every pair of normal subobjects for Huq-commuting pairs that fail to Smith-commute."""
    normals = alg.normal_subobjects(X)
    pairs = list(itertools.combinations_with_replacement(normals, 2))
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(lambda p: _sh_pair(X, *p), pairs))
    else:
        results = [_sh_pair(X, K, L) for K, L in pairs]
    huq = sum(1 for ok, _ in results if ok)
    violations = [v for _, v in results if v is not None]
    return SHReport(X, normals, len(pairs), huq, violations)
