"""Finite pointed algebras (groups and loops) given by Cayley tables.

The unit is always element 0.  Loop division tables and group inverse
tables are derived from ``mul`` and never need to be supplied; if they
are supplied they are checked against ``mul``.

Subobjects, congruences and homomorphisms all keep a reference to their
parent algebra and are immutable once built.
"""

from __future__ import annotations

import enum
import itertools
from functools import cached_property
from math import prod

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import AxiomViolation, NonQuasigroup, NotHomomorphism, ShapeError, WrongKind

__all__ = [
    "Kind",
    "Normality",
    "FiniteAlgebra",
    "Subobject",
    "Congruence",
    "Homomorphism",
    "validate_algebra",
    "hom_check",
    "subobject_generate",
    "join",
    "meet",
    "congruence_generate",
    "quotient",
    "normalize",
    "denormalize",
    "normal_closure",
    "direct_product",
    "relation_algebra",
    "discrete",
    "total",
    "hom_image_kernel",
    "kernel_congruence",
    "subalgebra",
    "normal_subobjects",
    "trivial_subobject",
    "whole",
    "identity_hom",
]


class Kind(str, enum.Enum):
    """Signature of the variety: which operations an algebra carries."""

    GROUP = "group"
    LOOP = "loop"

    @property
    def operations(self):
        if self is Kind.GROUP:
            return (("mul", 2), ("inv", 1), ("unit", 0))
        return (("mul", 2), ("ldiv", 2), ("rdiv", 2), ("unit", 0))

    @property
    def binary_ops(self):
        return tuple(name for name, arity in self.operations if arity == 2)

    @property
    def unary_ops(self):
        return tuple(name for name, arity in self.operations if arity == 1)


# Alias: the operation signature is determined by the kind.
Signature = Kind


class Normality(enum.Enum):
    UNKNOWN = "unknown"
    NORMAL = "normal"
    NOT_NORMAL = "not-normal"


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


def _derive_divisions(mul):
    n = mul.shape[0]
    ar = np.arange(n)
    ldiv = np.empty_like(mul)
    ldiv[ar[:, None], mul] = ar[None, :]
    rdiv = np.empty_like(mul)
    rdiv[mul, ar[None, :]] = ar[:, None]
    return ldiv, rdiv


class FiniteAlgebra:
    """A finite group or loop on the carrier ``range(order)`` with unit 0.

    Instances are built by :func:`validate_algebra` (checked) or by the
    package internals (valid by construction).  Treat them as immutable.
    """

    def __init__(self, kind, names, mul, inv=None):
        self.kind = Kind(kind)
        self.names = tuple(str(s) for s in names)
        self.mul = _frozen(mul)
        ldiv, rdiv = _derive_divisions(self.mul)
        self.ldiv = _frozen(ldiv)
        self.rdiv = _frozen(rdiv)
        if self.kind is Kind.GROUP:
            self.inv = _frozen(inv if inv is not None else self.ldiv[:, 0])
        else:
            self.inv = None

    @property
    def order(self):
        return len(self.names)

    @property
    def unit(self):
        return 0

    @property
    def elements(self):
        return range(self.order)

    def table(self, op):
        if op == "inv" and self.inv is None:
            raise WrongKind("loops carry no inverse operation")
        return getattr(self, op)

    @property
    def binary_tables(self):
        return tuple(getattr(self, op) for op in self.kind.binary_ops)

    @property
    def unary_tables(self):
        return tuple(getattr(self, op) for op in self.kind.unary_ops)

    @cached_property
    def _index(self):
        return {name: i for i, name in enumerate(self.names)}

    def index(self, name):
        """Element index for a display label (ints pass through)."""
        if isinstance(name, (int, np.integer)):
            if not 0 <= name < self.order:
                raise KeyError(name)
            return int(name)
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no element named {name!r}") from None

    def name(self, i):
        return self.names[i]

    def op(self, x, y):
        return int(self.mul[x, y])

    @cached_property
    def is_associative(self):
        m = self.mul
        return bool(np.array_equal(m[m, :], m[:, m]))

    @cached_property
    def is_commutative(self):
        return bool(np.array_equal(self.mul, self.mul.T))

    @property
    def is_abelian_group(self):
        return self.is_associative and self.is_commutative

    def __eq__(self, other):
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        if self is other:
            return True
        return (
            self.kind == other.kind
            and self.names == other.names
            and np.array_equal(self.mul, other.mul)
        )

    @cached_property
    def _hash(self):
        return hash((self.kind, self.names, self.mul.tobytes()))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"<FiniteAlgebra {self.kind.value} of order {self.order}>"


def validate_algebra(kind, mul, names=None, inv=None, ldiv=None, rdiv=None):
    """Build a :class:`FiniteAlgebra`, checking every axiom exhaustively."""
    kind = Kind(kind)
    try:
        mul = np.asarray(mul, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"mul is not a rectangular integer table: {exc}") from None
    if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
        raise ShapeError(f"mul must be a non-empty square table, got shape {mul.shape}")
    n = mul.shape[0]
    if names is None:
        names = [str(i) for i in range(n)]
    if len(names) != n:
        raise ShapeError(f"{len(names)} names for an algebra of order {n}")
    if len(set(names)) != n:
        raise ShapeError("element names must be distinct")
    if mul.min() < 0 or mul.max() >= n:
        raise ShapeError("mul contains out-of-range indices")

    for line, tab in (("row", mul), ("col", mul.T)):
        for i, r in enumerate(tab):
            seen = np.zeros(n, dtype=bool)
            for v in r:
                if seen[v]:
                    raise NonQuasigroup(line, i, int(v))
                seen[v] = True

    ar = np.arange(n)
    bad = np.nonzero((mul[0, :] != ar) | (mul[:, 0] != ar))[0]
    if bad.size:
        raise AxiomViolation("unit", (int(bad[0]),), "element 0 is not a two-sided unit")

    alg = FiniteAlgebra(kind, names, mul)

    if kind is Kind.GROUP:
        if ldiv is not None or rdiv is not None:
            raise ShapeError("group tables take inv, not ldiv/rdiv")
        lhs = mul[mul[:, :, None], ar[None, None, :]]
        rhs = mul[ar[:, None, None], mul[None, :, :]]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            raise AxiomViolation("mul", tuple(int(v) for v in bad[0]), "associativity")
        if inv is not None:
            inv = _check_table(inv, (n,), "inv")
            bad = np.nonzero((mul[ar, inv] != 0) | (mul[inv, ar] != 0))[0]
            if bad.size:
                raise AxiomViolation("inv", (int(bad[0]),), "not a two-sided inverse")
    else:
        if inv is not None:
            raise ShapeError("loop tables take ldiv/rdiv, not inv")
        x, y = np.meshgrid(ar, ar, indexing="ij")
        if ldiv is not None:
            ldiv = _check_table(ldiv, (n, n), "ldiv")
            for lhs, what in ((mul[x, ldiv[x, y]], "y = x*(x\\y)"), (ldiv[x, mul[x, y]], "y = x\\(x*y)")):
                bad = np.argwhere(lhs != y)
                if bad.size:
                    raise AxiomViolation("ldiv", tuple(int(v) for v in bad[0]), what)
        if rdiv is not None:
            rdiv = _check_table(rdiv, (n, n), "rdiv")
            for lhs, what in ((mul[rdiv[x, y], y], "x = (x/y)*y"), (rdiv[mul[x, y], y], "x = (x*y)/y")):
                bad = np.argwhere(lhs != x)
                if bad.size:
                    raise AxiomViolation("rdiv", tuple(int(v) for v in bad[0]), what)
    return alg


def _check_table(t, shape, name):
    t = np.asarray(t, dtype=np.int64)
    if t.shape != shape:
        raise ShapeError(f"{name} must have shape {shape}, got {t.shape}")
    if t.size and (t.min() < 0 or t.max() >= shape[0]):
        raise ShapeError(f"{name} contains out-of-range indices")
    return t


# --------------------------------------------------------------------------
# homomorphisms


class Homomorphism:
    def __init__(self, source, target, mapping):
        self.source = source
        self.target = target
        self.map = _frozen(mapping)

    def __call__(self, x):
        return int(self.map[x])

    def compose(self, other):
        """``self ∘ other``."""
        return Homomorphism(other.source, self.target, self.map[other.map])

    @property
    def is_surjective(self):
        return len(np.unique(self.map)) == self.target.order

    @property
    def is_injective(self):
        return len(np.unique(self.map)) == self.source.order

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and np.array_equal(self.map, other.map)
        )

    def __hash__(self):
        return hash((self.source, self.target, self.map.tobytes()))

    def __repr__(self):
        return f"<Homomorphism {self.source.order}->{self.target.order} {self.map.tolist()}>"


def hom_check(source, target, mapping):
    """Validate ``mapping`` as a homomorphism ``source -> target``."""
    if source.kind != target.kind:
        raise WrongKind("homomorphisms connect algebras of the same kind")
    f = np.asarray(mapping, dtype=np.int64)
    if f.shape != (source.order,):
        raise ShapeError(f"map must have length {source.order}")
    if f.min() < 0 or f.max() >= target.order:
        raise ShapeError("map contains out-of-range indices")
    if f[0] != 0:
        raise NotHomomorphism("unit", (0,))
    for op in source.kind.binary_ops:
        s, t = getattr(source, op), getattr(target, op)
        bad = np.argwhere(f[s] != t[f[:, None], f[None, :]])
        if bad.size:
            raise NotHomomorphism(op, tuple(int(v) for v in bad[0]))
    for op in source.kind.unary_ops:
        s, t = getattr(source, op), getattr(target, op)
        bad = np.nonzero(f[s] != t[f])[0]
        if bad.size:
            raise NotHomomorphism(op, (int(bad[0]),))
    return Homomorphism(source, target, f)


def identity_hom(X):
    return Homomorphism(X, X, np.arange(X.order))


# --------------------------------------------------------------------------
# subobjects


class Subobject:
    """A subalgebra of ``parent`` given by its sorted element indices."""

    def __init__(self, parent, elements, normality=Normality.UNKNOWN):
        self.parent = parent
        self.elements = tuple(sorted({int(e) for e in elements} | {0}))
        self._normality = normality

    @property
    def normality(self):
        return self._normality

    @property
    def is_normal(self):
        if self._normality is Normality.UNKNOWN:
            X = self.parent
            ok = normalize(X, denormalize(X, self)).elements == self.elements
            self._normality = Normality.NORMAL if ok else Normality.NOT_NORMAL
        return self._normality is Normality.NORMAL

    @property
    def order(self):
        return len(self.elements)

    @property
    def is_trivial(self):
        return self.elements == (0,)

    @property
    def is_whole(self):
        return len(self.elements) == self.parent.order

    @cached_property
    def mask(self):
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.elements)] = True
        m.setflags(write=False)
        return m

    @property
    def array(self):
        return np.array(self.elements, dtype=np.int64)

    @property
    def names(self):
        return [self.parent.names[e] for e in self.elements]

    def __contains__(self, x):
        return bool(self.mask[x])

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __le__(self, other):
        return set(self.elements) <= set(other.elements)

    def __lt__(self, other):
        return self <= other and self.elements != other.elements

    def __eq__(self, other):
        if not isinstance(other, Subobject):
            return NotImplemented
        return self.elements == other.elements and (
            self.parent is other.parent or self.parent == other.parent
        )

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return "{" + ", ".join(self.names) + "}"


def trivial_subobject(X):
    return Subobject(X, (0,), Normality.NORMAL)


def whole(X):
    return Subobject(X, range(X.order), Normality.NORMAL)


def _closure_codes(algs, seeds):
    """Codes of the subalgebra of ``prod(algs)`` generated by ``seeds``.

    ``seeds`` is an ``(k, len(algs))`` array of coordinate tuples.  Codes are
    row-major ravelled coordinates, so the unit has code 0.  For finite
    algebras closing under ``mul`` alone is enough: in a finite loop a
    multiplicatively closed subset is a subloop.
    """
    dims = tuple(a.order for a in algs)
    size = prod(dims)
    seeds = np.asarray(seeds, dtype=np.int64).reshape(-1, len(algs))
    gens = np.unique(np.ravel_multi_index(tuple(seeds.T), dims)) if len(seeds) else np.zeros(0, np.int64)
    gens = gens[gens != 0]

    def mul(c1, c2):
        u = np.unravel_index(c1, dims)
        v = np.unravel_index(c2, dims)
        return np.ravel_multi_index(tuple(a.mul[x, y] for a, x, y in zip(algs, u, v)), dims)

    seen = np.zeros(size, dtype=bool)
    seen[0] = True
    if gens.size == 0:
        return np.zeros(1, dtype=np.int64)
    if all(a.kind is Kind.GROUP for a in algs):
        # in a finite group every element is a positive word in the generators
        frontier = np.zeros(1, dtype=np.int64)
        while frontier.size:
            new = np.unique(mul(frontier[:, None], gens[None, :]))
            new = new[~seen[new]]
            seen[new] = True
            frontier = new
    else:
        seen[gens] = True
        frontier = gens
        while frontier.size:
            members = np.flatnonzero(seen)
            new = np.concatenate(
                [mul(frontier[:, None], members[None, :]).ravel(), mul(members[:, None], frontier[None, :]).ravel()]
            )
            new = np.unique(new)
            new = new[~seen[new]]
            seen[new] = True
            frontier = new
    return np.flatnonzero(seen)


def subobject_generate(X, seed):
    """Smallest subalgebra of ``X`` containing ``seed``."""
    seed = [X.index(s) for s in seed]
    codes = _closure_codes([X], np.array(seed, dtype=np.int64).reshape(-1, 1))
    return Subobject(X, codes)


def join(*subs):
    X = subs[0].parent
    els = set().union(*(s.elements for s in subs))
    J = subobject_generate(X, els)
    if all(s.normality is Normality.NORMAL for s in subs):
        # joins of normal subobjects are normal
        J._normality = Normality.NORMAL
    return J


def meet(*subs):
    X = subs[0].parent
    els = set(subs[0].elements).intersection(*(s.elements for s in subs[1:]))
    N = Subobject(X, els)
    if all(s.normality is Normality.NORMAL for s in subs):
        N._normality = Normality.NORMAL
    return N


# --------------------------------------------------------------------------
# congruences


def _canonical_labels(labels):
    labels = np.asarray(labels)
    n = len(labels)
    _, comp = np.unique(labels, return_inverse=True)
    mins = np.full(comp.max() + 1 if n else 0, n, dtype=np.int64)
    np.minimum.at(mins, comp, np.arange(n))
    return mins[comp]


def _components(n, a, b):
    g = coo_matrix((np.ones(len(a), dtype=np.int8), (a, b)), shape=(n, n))
    _, lab = connected_components(g, directed=False)
    return _canonical_labels(lab)


class Congruence:
    """An operation-compatible partition; ``class_of[x]`` is the least member of x's class."""

    def __init__(self, parent, class_of):
        self.parent = parent
        self.class_of = _frozen(_canonical_labels(class_of))

    def related(self, x, y):
        return self.class_of[x] == self.class_of[y]

    def classes(self):
        out = {}
        for x, c in enumerate(self.class_of):
            out.setdefault(int(c), []).append(x)
        return [tuple(v) for _, v in sorted(out.items())]

    @property
    def n_classes(self):
        return len(np.unique(self.class_of))

    @property
    def is_discrete(self):
        return self.n_classes == self.parent.order

    @property
    def is_total(self):
        return self.n_classes == 1

    def pairs(self):
        """All related pairs ``(x, y)`` as an ``(m, 2)`` array."""
        c = self.class_of
        x, y = np.nonzero(c[:, None] == c[None, :])
        return np.stack([x, y], axis=1)

    def __le__(self, other):
        # every class of self lies inside a class of other
        c = other.class_of
        return bool(np.all(c == c[self.class_of]))

    def __eq__(self, other):
        if not isinstance(other, Congruence):
            return NotImplemented
        return np.array_equal(self.class_of, other.class_of) and (
            self.parent is other.parent or self.parent == other.parent
        )

    def __hash__(self):
        return hash(self.class_of.tobytes())

    def __repr__(self):
        names = self.parent.names
        return "Congruence(" + " | ".join(",".join(names[x] for x in c) for c in self.classes()) + ")"

    def meet(self, other):
        n = self.parent.order
        keys = self.class_of * n + other.class_of
        return Congruence(self.parent, keys)

    def join(self, other):
        return congruence_generate(self.parent, np.concatenate([self.pairs(), other.pairs()]))


def discrete(X):
    return Congruence(X, np.arange(X.order))


def total(X):
    return Congruence(X, np.zeros(X.order, dtype=np.int64))


def congruence_generate(X, pairs):
    """Smallest congruence of ``X`` containing ``pairs``.

    Connected components of the pair graph, then repeated propagation of
    ``x ~ rep(x)`` through every basic translation until nothing merges.
    """
    n = X.order
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    ar = np.arange(n)
    labels = _components(n, np.concatenate([ar, pairs[:, 0]]), np.concatenate([ar, pairs[:, 1]]))
    bins = X.binary_tables
    uns = X.unary_tables
    while True:
        rep = labels
        ea, eb = [ar], [rep]
        for T in bins:
            ea += [T.ravel(), T.ravel()]
            eb += [T[rep, :].ravel(), T[:, rep].ravel()]
        for u in uns:
            ea.append(u)
            eb.append(u[rep])
        new = _components(n, np.concatenate(ea), np.concatenate(eb))
        if np.array_equal(new, labels):
            return Congruence(X, labels)
        labels = new


def quotient(X, theta):
    """Quotient algebra on class representatives and the projection onto it."""
    reps = np.unique(theta.class_of)
    idx = np.full(X.order, -1, dtype=np.int64)
    idx[reps] = np.arange(len(reps))
    proj = idx[theta.class_of]
    mul = proj[X.mul[np.ix_(reps, reps)]]
    Q = FiniteAlgebra(X.kind, [X.names[r] for r in reps], mul)
    return Q, Homomorphism(X, Q, proj)


def normalize(X, theta):
    """The unit class of ``theta``."""
    els = np.flatnonzero(theta.class_of == theta.class_of[0])
    return Subobject(theta.parent, els, Normality.NORMAL)


def denormalize(X, N):
    """The congruence generated by ``N x {unit}``."""
    pairs = np.stack([N.array, np.zeros(N.order, dtype=np.int64)], axis=1)
    return congruence_generate(X, pairs)


def normal_closure(X, S):
    """Smallest normal subobject of ``X`` containing the element set ``S``."""
    S = [X.index(s) for s in S]
    pairs = np.array([(s, 0) for s in S], dtype=np.int64).reshape(-1, 2)
    return normalize(X, congruence_generate(X, pairs))


def kernel_congruence(f):
    """The kernel pair of ``f`` as a congruence on its source."""
    return Congruence(f.source, f.map)


def direct_product(X, Y):
    """``X x Y`` with element ``(x, y)`` at index ``x * |Y| + y``."""
    if X.kind != Y.kind:
        raise WrongKind("direct products need algebras of the same kind")
    n, m = X.order, Y.order
    xs = np.repeat(np.arange(n), m)
    ys = np.tile(np.arange(m), n)
    mul = X.mul[xs[:, None], xs[None, :]] * m + Y.mul[ys[:, None], ys[None, :]]
    names = [f"({a},{b})" for a, b in itertools.product(X.names, Y.names)]
    inv = X.inv[xs] * m + Y.inv[ys] if X.kind is Kind.GROUP else None
    return FiniteAlgebra(X.kind, names, mul, inv)


def subalgebra(S):
    """``S`` as an algebra in its own right, with the inclusion into its parent."""
    X = S.parent
    els = S.array
    idx = np.full(X.order, -1, dtype=np.int64)
    idx[els] = np.arange(len(els))
    mul = idx[X.mul[np.ix_(els, els)]]
    if (mul < 0).any():
        raise AxiomViolation("mul", (), "subset is not closed")
    A = FiniteAlgebra(X.kind, [X.names[e] for e in els], mul)
    return A, Homomorphism(A, X, els)


def hom_image_kernel(f, S=None):
    """Direct image ``f(S)`` and the kernel of ``f``."""
    if S is None:
        S = whole(f.source)
    image = Subobject(f.target, np.unique(f.map[S.array]))
    kernel = Subobject(f.source, np.flatnonzero(f.map == 0), Normality.NORMAL)
    return image, kernel


def normal_subobjects(X):
    """All normal subobjects of ``X``, smallest first.

    Normal closures of single elements, then joins until nothing new appears.
    """
    found = {}
    for x in range(X.order):
        N = normal_closure(X, [x])
        found.setdefault(N.elements, N)
    frontier = list(found.values())
    while frontier:
        current = list(found.values())
        new = []
        for A in frontier:
            for B in current:
                if A <= B or B <= A:
                    continue
                J = normal_closure(X, set(A.elements) | set(B.elements))
                if J.elements not in found:
                    found[J.elements] = J
                    new.append(J)
        frontier = new
    return sorted(found.values(), key=lambda N: (N.order, N.elements))


def relation_algebra(X, beta):
    """``{(x, y) : x beta y}`` as a subalgebra of ``X x X``.

    Returns ``(A, px, py, code)``: element ``i`` of ``A`` is the pair
    ``(px[i], py[i])`` and ``code[x * n + y]`` is its index (or -1).
    Pairs are sorted, so ``(1, 1)`` is the unit at index 0.
    """
    n = X.order
    c = beta.class_of
    px, py = np.nonzero(c[:, None] == c[None, :])
    order = np.lexsort((py, px))
    px, py = px[order], py[order]
    code = np.full(n * n, -1, dtype=np.int64)
    code[px * n + py] = np.arange(len(px))
    mul = code[X.mul[px[:, None], px[None, :]] * n + X.mul[py[:, None], py[None, :]]]
    names = [f"({X.names[a]},{X.names[b]})" for a, b in zip(px, py)]
    A = FiniteAlgebra(X.kind, names, mul)
    return A, px, py, code
