"""Split extensions, reflexive graphs and the checks built on commutators.

Actions are always represented by split extensions ``A -> X <-> G``.  For
groups an element-level action table is available through
:func:`action_table`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    Kind,
    Normality,
    Subobject,
    denormalize,
    direct_product,
    hom_check,
    identity_hom,
    kernel_congruence,
    meet,
    relation_algebra,
    subalgebra,
    total,
    validate_algebra,
    whole,
)
from .commutators import (
    higgins_binary,
    smith_commutator,
    ternary_group_exact,
    ternary_obstruction,
)
from .errors import (
    InternalInconsistency,
    InvalidSquare,
    NotAnAction,
    NotHomomorphism,
    NotNormal,
    NotPrecrossed,
    PreconditionFailed,
    WrongKind,
)

__all__ = [
    "SplitExtension",
    "ReflexiveGraph",
    "DoubleExtensionSquare",
    "XModVerdict",
    "CheckReport",
    "split_extension",
    "extension_from_total",
    "conjugation_extension",
    "build_semidirect_group",
    "action_table",
    "couniversal_extend",
    "zero_hom",
    "graph_from_precrossed",
    "star_mult_check",
    "internal_category_check",
    "xmod_check",
    "beck_module_check",
    "double_central_check",
    "kernel_of",
]


def kernel_of(f):
    return Subobject(f.source, np.flatnonzero(f.map == 0), Normality.NORMAL)


def zero_hom(A, G):
    return Homomorphism(A, G, np.zeros(A.order, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class SplitExtension:
    """A point ``p: X -> G`` with section ``s`` and kernel inclusion ``k: A -> X``."""

    total: FiniteAlgebra
    base: FiniteAlgebra
    kernel_algebra: FiniteAlgebra
    p: Homomorphism
    s: Homomorphism
    k: Homomorphism

    def __post_init__(self):
        G = self.base
        if not np.array_equal(self.p.map[self.s.map], np.arange(G.order)):
            bad = int(np.flatnonzero(self.p.map[self.s.map] != np.arange(G.order))[0])
            raise PreconditionFailed("p o s is not the identity", (bad,))
        if not self.k.is_injective:
            raise PreconditionFailed("k is not injective")
        if set(self.k.map.tolist()) != set(np.flatnonzero(self.p.map == 0).tolist()):
            raise PreconditionFailed("image of k is not the kernel of p")
        if self.total.order != self.kernel_algebra.order * G.order:
            raise PreconditionFailed("|X| differs from |A|.|G|")

    @property
    def kernel(self):
        return Subobject(self.total, self.k.map, Normality.NORMAL)


def split_extension(total, base, kernel_algebra, p, s, k):
    """Validate the three maps and build a :class:`SplitExtension`."""
    return SplitExtension(
        total,
        base,
        kernel_algebra,
        hom_check(total, base, p),
        hom_check(base, total, s),
        hom_check(kernel_algebra, total, k),
    )


def extension_from_total(X, G, p, s):
    """Split extension with the kernel of ``p`` read off from ``X``."""
    p = hom_check(X, G, p)
    A, k = subalgebra(kernel_of(p))
    return SplitExtension(X, G, A, p, hom_check(G, X, s), k)


@dataclass(frozen=True, eq=False)
class ReflexiveGraph:
    edges: FiniteAlgebra
    vertices: FiniteAlgebra
    d: Homomorphism
    c: Homomorphism
    e: Homomorphism

    def __post_init__(self):
        ident = np.arange(self.vertices.order)
        if not np.array_equal(self.d.map[self.e.map], ident) or not np.array_equal(self.c.map[self.e.map], ident):
            raise PreconditionFailed("d o e and c o e must be the identity")


@dataclass(frozen=True, eq=False)
class DoubleExtensionSquare:
    """Commutative square ``f o d = g o c`` of surjections out of ``X``."""

    X: FiniteAlgebra
    D: FiniteAlgebra
    C: FiniteAlgebra
    Z: FiniteAlgebra
    d: Homomorphism
    c: Homomorphism
    f: Homomorphism
    g: Homomorphism

    def __post_init__(self):
        for name in "dcfg":
            if not getattr(self, name).is_surjective:
                raise InvalidSquare(f"{name} is not surjective")
        if not np.array_equal(self.f.map[self.d.map], self.g.map[self.c.map]):
            raise InvalidSquare("square does not commute")
        pullback = int(np.sum(self.f.map[:, None] == self.g.map[None, :]))
        reached = len(set(zip(self.d.map.tolist(), self.c.map.tolist())))
        if reached != pullback:
            raise InvalidSquare("comparison map into the pullback is not surjective")


@dataclass
class CheckReport:
    ok: bool
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.ok)


# --------------------------------------------------------------------------
# builders


def conjugation_extension(X, N):
    """``R_N = {(x, y) : x ~ y}`` over ``X`` by the second projection, kernel ``N x 1``."""
    if not N.is_normal:
        raise NotNormal(f"{N!r} is not normal")
    theta = denormalize(X, N)
    R, px, py, code = relation_algebra(X, theta)
    n = X.order
    p = Homomorphism(R, X, py)
    s = Homomorphism(X, R, code[np.arange(n) * n + np.arange(n)])
    A, inc = subalgebra(N)
    k = Homomorphism(A, R, code[inc.map * n])
    return SplitExtension(R, X, A, p, s, k)


def build_semidirect_group(A, G, act):
    """``A x| G`` with ``(a, g)(a', g') = (a . g(a'), g g')``; pair ``(a, g)`` has index ``a*|G| + g``.

    ``act`` is a ``|G| x |A|`` table (or a callable ``g -> table``) giving
    the automorphism of ``A`` for each ``g``.
    """
    if A.kind is not Kind.GROUP or G.kind is not Kind.GROUP:
        raise WrongKind("semidirect products are built for groups only")
    if callable(act):
        act = [act(g) for g in range(G.order)]
    act = np.asarray(act, dtype=np.int64)
    if act.shape != (G.order, A.order):
        raise NotAnAction(f"action table must have shape {(G.order, A.order)}")
    if act.min() < 0 or act.max() >= A.order:
        raise NotAnAction("action table has out-of-range entries")
    for g in range(G.order):
        if len(set(act[g].tolist())) != A.order:
            raise NotAnAction(f"action of {G.names[g]} is not bijective", (g,))
        try:
            hom_check(A, A, act[g])
        except NotHomomorphism as exc:
            raise NotAnAction(f"action of {G.names[g]} is not an automorphism", (g, *exc.witness)) from None
    if not np.array_equal(act[0], np.arange(A.order)):
        raise NotAnAction("the unit acts nontrivially", (0,))
    for g in range(G.order):
        for h in range(G.order):
            if not np.array_equal(act[G.mul[g, h]], act[g][act[h]]):
                raise NotAnAction("action does not respect the product", (g, h))
    m = G.order
    a = np.repeat(np.arange(A.order), m)
    g = np.tile(np.arange(m), A.order)
    mul = A.mul[a[:, None], act[g[:, None], a[None, :]]] * m + G.mul[g[:, None], g[None, :]]
    names = [f"({A.names[x]},{G.names[y]})" for x, y in zip(a, g)]
    X = validate_algebra(Kind.GROUP, mul, names)
    p = Homomorphism(X, G, g)
    s = Homomorphism(G, X, np.arange(m))
    k = Homomorphism(A, X, np.arange(A.order) * m)
    return SplitExtension(X, G, A, p, s, k)


def action_table(ext):
    """Conjugation of ``k(A)`` by ``s(G)`` read back in ``A`` (groups only)."""
    X = ext.total
    if X.kind is not Kind.GROUP:
        raise WrongKind("element-level actions are defined for groups")
    back = np.full(X.order, -1, dtype=np.int64)
    back[ext.k.map] = np.arange(ext.kernel_algebra.order)
    sg = ext.s.map[:, None]
    conj = X.mul[X.mul[sg, ext.k.map[None, :]], X.inv[sg]]
    table = back[conj]
    if (table < 0).any():
        raise InternalInconsistency("conjugation leaves the kernel")
    return table


def couniversal_extend(ext, f, g):
    """The unique ``h: X -> Z`` with ``h k = f`` and ``h s = g``, or ``None``."""
    X = ext.total
    Z = f.target
    val = np.full(X.order, -1, dtype=np.int64)
    for src, m in ((ext.k.map, f.map), (ext.s.map, g.map)):
        clash = (val[src] >= 0) & (val[src] != m)
        if clash.any():
            return None
        val[src] = m
    frontier = np.flatnonzero(val >= 0)
    while frontier.size:
        known = np.flatnonzero(val >= 0)
        prods = np.concatenate(
            [X.mul[frontier[:, None], known[None, :]].ravel(), X.mul[known[:, None], frontier[None, :]].ravel()]
        )
        vals = np.concatenate(
            [
                Z.mul[val[frontier][:, None], val[known][None, :]].ravel(),
                Z.mul[val[known][:, None], val[frontier][None, :]].ravel(),
            ]
        )
        old = val[prods] >= 0
        if np.any(val[prods][old] != vals[old]):
            return None
        fresh_p, first = np.unique(prods[~old], return_index=True)
        fresh_v = vals[~old][first]
        # the same new element may be reached with two different values
        order = np.argsort(prods[~old], kind="stable")
        sp, sv = prods[~old][order], vals[~old][order]
        if np.any((sp[1:] == sp[:-1]) & (sv[1:] != sv[:-1])):
            return None
        val[fresh_p] = fresh_v
        frontier = fresh_p
    if (val < 0).any():
        return None
    try:
        return hom_check(X, Z, val)
    except NotHomomorphism:
        return None


# --------------------------------------------------------------------------
# checks


class XModVerdict(str, enum.Enum):
    NOT_PRECROSSED = "NotPrecrossed"
    PRECROSSED_ONLY = "PrecrossedOnly"
    PEIFFER_ONLY = "PeifferOnly"
    CROSSED_MODULE = "CrossedModule"


def graph_from_precrossed(ext, boundary):
    """Reflexive graph ``(X, G, p, c, s)`` with ``c`` induced by ``boundary`` and the identity."""
    c = couniversal_extend(ext, boundary, identity_hom(ext.base))
    if c is None:
        raise NotPrecrossed("boundary is not equivariant for the action")
    return ReflexiveGraph(ext.total, ext.base, ext.p, c, ext.s)


def _peiffer_omega(rg):
    """Candidate ``omega(a, a') = (a / a') . e(c(a'))`` on ``Ker d x Ker d``, validated."""
    R = rg.edges
    A, inc = subalgebra(kernel_of(rg.d))
    n = A.order
    a = inc.map[np.repeat(np.arange(n), n)]
    b = inc.map[np.tile(np.arange(n), n)]
    omega = R.mul[R.rdiv[a, b], rg.e.map[rg.c.map[b]]]
    AA = direct_product(A, A)
    try:
        hom_check(AA, R, omega)
    except NotHomomorphism:
        return False
    ones = omega.reshape(n, n)
    return bool(np.array_equal(ones[:, 0], inc.map) and np.array_equal(np.diag(ones), rg.e.map[rg.c.map[inc.map]]))


def star_mult_check(rg, witness=True):
    """Peiffer condition: ``[Ker d, Ker c]`` vanishes."""
    R = rg.edges
    h = higgins_binary(R, kernel_of(rg.d), kernel_of(rg.c))
    ok = h.is_trivial
    details = {"commutator": list(h.elements)}
    if ok and witness:
        details["omega_valid"] = _peiffer_omega(rg)
    return CheckReport(ok, details)


def internal_category_check(rg):
    """Is the reflexive graph an internal category?

    Commutator route: ``[Ker d, Ker c]`` and ``[Ker d, Ker c, R]`` vanish.
    Smith route: the kernel pairs of ``d`` and ``c`` commute.  For groups
    the nested formula with ``Im e`` is a third route.  All must agree.
    """
    R = rg.edges
    Kd, Kc = kernel_of(rg.d), kernel_of(rg.c)
    binary = higgins_binary(R, Kd, Kc)
    details = {"binary": list(binary.elements)}
    if binary.is_trivial:
        obs = ternary_obstruction(R, Kd, Kc)
        details["ternary"] = list(obs.elements)
        route1 = obs.is_trivial
    else:
        route1 = False
    delta, conn = smith_commutator(R, kernel_congruence(rg.d), kernel_congruence(rg.c))
    route2 = conn is not None
    details["smith_discrete"] = route2
    if route1 != route2:
        raise InternalInconsistency(f"commutator route says {route1}, Smith route says {route2}")
    if R.kind is Kind.GROUP:
        image_e = Subobject(R, np.unique(rg.e.map))
        cond3 = binary.is_trivial and ternary_group_exact(R, Kd, Kc, image_e).is_trivial
        details["condition_iii"] = cond3
        if cond3 != route1:
            raise InternalInconsistency(f"nested formula says {cond3}, commutators say {route1}")
    return CheckReport(route1, details)


def xmod_check(ext, boundary=None):
    """Staged verdict: precrossed, then Peiffer, then internal category."""
    if boundary is None:
        boundary = zero_hom(ext.kernel_algebra, ext.base)
    details = {}
    try:
        rg = graph_from_precrossed(ext, boundary)
    except NotPrecrossed:
        return CheckReport(False, {"verdict": XModVerdict.NOT_PRECROSSED})
    star = star_mult_check(rg)
    details["peiffer"] = star.details
    if not star:
        details["verdict"] = XModVerdict.PRECROSSED_ONLY
        return CheckReport(False, details)
    cat = internal_category_check(rg)
    details["category"] = cat.details
    if not cat:
        details["verdict"] = XModVerdict.PEIFFER_ONLY
        return CheckReport(False, details)
    details["verdict"] = XModVerdict.CROSSED_MODULE
    return CheckReport(True, details)


def beck_module_check(ext):
    """Abelian kernel whose kernel pair ``Eq(p)`` Smith-commutes with itself.

    This is the same computation as the internal category check on
    ``(X, G, p, p, s)``; it is cross-checked against the crossed module
    verdict with zero boundary.
    """
    A = ext.kernel_algebra
    abelian = A.is_abelian_group
    eq_p = kernel_congruence(ext.p)
    _, conn = smith_commutator(ext.total, eq_p, eq_p)
    ok = abelian and conn is not None
    verdict = xmod_check(ext, zero_hom(A, ext.base)).details["verdict"]
    if ok != (verdict is XModVerdict.CROSSED_MODULE):
        raise InternalInconsistency(f"module check says {ok}, crossed module verdict is {verdict.value}")
    return CheckReport(ok, {"kernel_abelian": abelian, "smith_discrete": conn is not None, "xmod_verdict": verdict})


def double_central_check(sq):
    """Central double extension: ``[K,L] = [K^L, X] = [K,L,X] = 0`` for ``K = Ker c``, ``L = Ker d``."""
    X = sq.X
    K, L = kernel_of(sq.c), kernel_of(sq.d)
    details = {}
    b = higgins_binary(X, K, L)
    details["binary"] = list(b.elements)
    m = higgins_binary(X, meet(K, L), whole(X))
    details["meet_central"] = list(m.elements)
    ok = b.is_trivial and m.is_trivial
    if b.is_trivial:
        # the obstruction is only defined once the binary commutator vanishes
        t = ternary_obstruction(X, K, L)
        details["ternary"] = list(t.elements)
        ok = ok and t.is_trivial
    R, S = kernel_congruence(sq.d), kernel_congruence(sq.c)
    _, c1 = smith_commutator(X, R, S)
    _, c2 = smith_commutator(X, R.meet(S), total(X))
    smith_ok = c1 is not None and c2 is not None
    details["smith"] = smith_ok
    if smith_ok != ok:
        raise InternalInconsistency(f"commutator route says {ok}, Smith route says {smith_ok}")
    return CheckReport(ok, details)
