"""Terms over the group/loop signature, free-product words and co-smash membership.

A term is a tree of :class:`Op` nodes over :class:`Unit` and :class:`Letter`
leaves.  Letters carry a sort (an index into a list of sort prefixes such as
``("k", "l", "m")``) and an id, so ``l2`` is ``Letter(1, 2)``.

Text grammar::

    expr    := primary (("*" | "\\" | "/") primary)*     left associative
    primary := "1" | "inv" "(" expr ")" | "(" expr ")" | letter
    letter  := sort-prefix digits
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import Kind
from .errors import ParseError, UnboundLetter, UnsupportedOperation

__all__ = [
    "Term",
    "Unit",
    "Letter",
    "Op",
    "UNIT",
    "DEFAULT_SORTS",
    "parse_term",
    "format_term",
    "eval_term",
    "zero_substitute",
    "letters_of",
    "FreeWord",
    "freeword_reduce",
    "term_to_syllables",
    "cosmash_membership_group",
    "cosmash_membership_loop",
    "loop_normalize",
    "enumerate_cosmash_terms",
    "group_commutator",
    "loop_commutator",
    "associator",
]

DEFAULT_SORTS = ("k", "l", "m")

SYMBOLS = {"mul": "*", "ldiv": "\\", "rdiv": "/"}
_BY_SYMBOL = {v: k for k, v in SYMBOLS.items()}


class Term:
    __slots__ = ()

    @property
    def depth(self):
        return 0


@dataclass(frozen=True)
class Unit(Term):
    def __repr__(self):
        return "Unit"


UNIT = Unit()


@dataclass(frozen=True)
class Letter(Term):
    sort: int
    id: int

    def __repr__(self):
        return f"Letter({self.sort},{self.id})"


@dataclass(frozen=True)
class Op(Term):
    name: str
    args: tuple
    _depth: int = field(default=0, compare=False, repr=False)
    _hash: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        if self.name not in ("mul", "ldiv", "rdiv", "inv"):
            raise ValueError(f"unknown operation {self.name!r}")
        want = 1 if self.name == "inv" else 2
        if len(self.args) != want:
            raise ValueError(f"{self.name} takes {want} argument(s)")
        object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "_depth", 1 + max(a.depth for a in self.args))
        object.__setattr__(self, "_hash", hash((self.name, self.args)))

    @property
    def depth(self):
        return self._depth

    def __hash__(self):
        return self._hash


def mul(a, b):
    return Op("mul", (a, b))


def ldiv(a, b):
    return Op("ldiv", (a, b))


def rdiv(a, b):
    return Op("rdiv", (a, b))


def inv(a):
    return Op("inv", (a,))


def group_commutator(a, b):
    """``a b a^-1 b^-1``."""
    return mul(mul(mul(a, b), inv(a)), inv(b))


def loop_commutator(a, b):
    """``(a b) / (b a)``."""
    return rdiv(mul(a, b), mul(b, a))


def associator(a, b, c):
    """``(a b . c) / (a . b c)``."""
    return rdiv(mul(mul(a, b), c), mul(a, mul(b, c)))


# --------------------------------------------------------------------------
# parsing and printing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z_]*\d*)|(?P<sym>[()*/\\]))")


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = len(text) - len(text[pos:].lstrip())
            raise ParseError(start, "a letter, '1', 'inv', '(' or an operator", text)
        start = m.start(m.lastgroup)
        out.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse_term(text, sort_names=DEFAULT_SORTS):
    """Parse ``text`` into a term; letters must start with one of ``sort_names``."""
    toks = _tokenize(text)
    i = 0
    prefixes = sorted(enumerate(sort_names), key=lambda p: -len(p[1]))

    def peek():
        return toks[i]

    def take(kind=None, value=None, expected=""):
        nonlocal i
        t = toks[i]
        if (kind and t[0] != kind) or (value is not None and t[1] != value):
            raise ParseError(t[2], expected or repr(value), text)
        i += 1
        return t

    def primary():
        t = peek()
        if t[0] == "num":
            if t[1] != "1":
                raise ParseError(t[2], "'1' (the only numeral)", text)
            take()
            return UNIT
        if t[0] == "sym" and t[1] == "(":
            take()
            e = expr()
            take("sym", ")", "')'")
            return e
        if t[0] == "ident":
            if t[1] == "inv":
                take()
                take("sym", "(", "'(' after inv")
                e = expr()
                take("sym", ")", "')'")
                return inv(e)
            for sort, prefix in prefixes:
                rest = t[1][len(prefix):]
                if t[1].startswith(prefix) and rest.isdigit():
                    take()
                    return Letter(sort, int(rest))
            raise ParseError(t[2], "a letter with prefix in " + "/".join(sort_names), text)
        raise ParseError(t[2], "a letter, '1', 'inv' or '('", text)

    def expr():
        left = primary()
        while peek()[0] == "sym" and peek()[1] in _BY_SYMBOL:
            op = _BY_SYMBOL[take()[1]]
            left = Op(op, (left, primary()))
        return left

    result = expr()
    take("end", expected="end of input")
    return result


def format_term(t, sort_names=DEFAULT_SORTS, _top=True):
    if isinstance(t, Unit):
        return "1"
    if isinstance(t, Letter):
        return f"{sort_names[t.sort]}{t.id}"
    if t.name == "inv":
        return "inv(" + format_term(t.args[0], sort_names) + ")"
    s = format_term(t.args[0], sort_names, False) + SYMBOLS[t.name] + format_term(t.args[1], sort_names, False)
    return s if _top else "(" + s + ")"


# --------------------------------------------------------------------------
# evaluation and substitution


def eval_term(t, X, assignment):
    """Evaluate ``t`` in ``X``.

    ``assignment`` maps ``Letter`` (or a ``(sort, id)`` pair) to an element
    index or to an integer array; arrays broadcast, so one call can evaluate
    the term on a whole grid of assignments.
    """
    binary = set(X.kind.binary_ops)
    unary = set(X.kind.unary_ops)
    memo = {}

    def ev(node):
        if isinstance(node, Unit):
            return 0
        if isinstance(node, Letter):
            if node in assignment:
                return assignment[node]
            key = (node.sort, node.id)
            if key in assignment:
                return assignment[key]
            raise UnboundLetter(f"no value for letter {node!r}")
        hit = memo.get(node)
        if hit is not None:
            return hit
        if node.name == "inv":
            if "inv" not in unary:
                raise UnsupportedOperation(f"{X.kind.value}s have no inv")
            v = X.inv[ev(node.args[0])]
        else:
            if node.name not in binary:
                raise UnsupportedOperation(f"{X.kind.value}s have no {node.name}")
            v = getattr(X, node.name)[ev(node.args[0]), ev(node.args[1])]
        memo[node] = v
        return v

    out = ev(t)
    return int(out) if np.ndim(out) == 0 else out


def zero_substitute(t, sort):
    """Replace every letter of ``sort`` by the unit (no simplification)."""
    if isinstance(t, Letter):
        return UNIT if t.sort == sort else t
    if isinstance(t, Op):
        return Op(t.name, tuple(zero_substitute(a, sort) for a in t.args))
    return t


def letters_of(t):
    if isinstance(t, Letter):
        return {t}
    if isinstance(t, Op):
        return set().union(*(letters_of(a) for a in t.args))
    return set()


# --------------------------------------------------------------------------
# free products of groups


class FreeWord:
    """Reduced word in a free product: alternating ``(factor, element)`` syllables."""

    __slots__ = ("syllables",)

    def __init__(self, syllables):
        self.syllables = tuple(syllables)

    @property
    def is_empty(self):
        return not self.syllables

    def __len__(self):
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    def __eq__(self, other):
        return isinstance(other, FreeWord) and self.syllables == other.syllables

    def __hash__(self):
        return hash(self.syllables)

    def __repr__(self):
        return f"FreeWord({list(self.syllables)})"


def _factor_mul(factor, a, b):
    if factor is None:
        return a + b
    return int(factor.mul[a, b])


def _factor_inv(factor, a):
    if factor is None:
        return -a
    return int(factor.inv[a])


def freeword_reduce(syllables, factors=None):
    """Normal form in the free product of ``factors``.

    ``factors`` maps a factor index to a finite group, or to ``None`` for an
    infinite cyclic factor whose elements are integer exponents.  With
    ``factors`` omitted every factor is infinite cyclic.  The unit of every
    factor is 0.
    """
    stack = []
    for f, e in syllables:
        G = None if factors is None else factors[f]
        if e == 0:
            continue
        if stack and stack[-1][0] == f:
            merged = _factor_mul(G, stack[-1][1], e)
            if merged == 0:
                stack.pop()
            else:
                stack[-1] = (f, merged)
        else:
            stack.append((f, e))
    return FreeWord(stack)


def term_to_syllables(t, letter_factor, letter_value, factors=None):
    """Unreduced syllable list of a group term; ``letter_factor``/``letter_value`` map letters."""
    if isinstance(t, Unit):
        return []
    if isinstance(t, Letter):
        return [(letter_factor(t), letter_value(t))]
    if t.name == "mul":
        return term_to_syllables(t.args[0], letter_factor, letter_value, factors) + term_to_syllables(
            t.args[1], letter_factor, letter_value, factors
        )
    if t.name == "inv":
        inner = term_to_syllables(t.args[0], letter_factor, letter_value, factors)
        return [(f, _factor_inv(None if factors is None else factors[f], e)) for f, e in reversed(inner)]
    raise UnsupportedOperation(f"{t.name} is not a group operation")


def _generic_word(t):
    """Reduced word of ``t`` in the free group on its letters."""
    return freeword_reduce(term_to_syllables(t, lambda a: (a.sort, a.id), lambda a: 1))


def cosmash_membership_group(t, n_sorts, factor_groups=None, assignment=None):
    """Does ``t`` lie in the co-smash product of its ``n_sorts`` sorts?

    Every sort is zeroed in turn and the remaining word must reduce to the
    empty word in the free product of the other sorts.  Without
    ``factor_groups`` each letter is a free generator, which decides the
    question for all groups at once.  With ``factor_groups`` (one group per
    sort) and ``assignment`` (letter -> element of its sort's group) the
    question is decided for that concrete element of ``K1 + ... + Kn``.
    """
    if n_sorts not in (2, 3):
        raise ValueError("n_sorts must be 2 or 3")
    for a in letters_of(t):
        if a.sort >= n_sorts:
            raise ValueError(f"letter {a!r} outside {n_sorts} sorts")
    for sort in range(n_sorts):
        z = zero_substitute(t, sort)
        if factor_groups is None:
            w = _generic_word(z)
        else:
            def value(a):
                if a in assignment:
                    return assignment[a]
                if (a.sort, a.id) in assignment:
                    return assignment[(a.sort, a.id)]
                raise UnboundLetter(f"no value for letter {a!r}")

            w = freeword_reduce(
                term_to_syllables(z, lambda a: a.sort, value, factor_groups), factor_groups
            )
        if not w.is_empty:
            return False
    return True


# --------------------------------------------------------------------------
# loop rewriting


def _rewrite_root(t):
    if not isinstance(t, Op) or t.name == "inv":
        return None
    a, b = t.args
    if t.name == "mul":
        if isinstance(b, Unit):
            return a
        if isinstance(a, Unit):
            return b
        if isinstance(b, Op) and b.name == "ldiv" and b.args[0] == a:
            return b.args[1]
        if isinstance(a, Op) and a.name == "rdiv" and a.args[1] == b:
            return a.args[0]
    elif t.name == "ldiv":
        if isinstance(b, Op) and b.name == "mul" and b.args[0] == a:
            return b.args[1]
        if a == b:
            return UNIT
        if isinstance(a, Unit):
            return b
    elif t.name == "rdiv":
        if isinstance(a, Op) and a.name == "mul" and a.args[1] == b:
            return a.args[0]
        if a == b:
            return UNIT
        if isinstance(b, Unit):
            return a
    return None


def loop_normalize(t):
    """Rewrite with the loop axioms, innermost first and leftmost first, to a fixpoint.

    The rules are x*1 -> x, 1*x -> x, x\\(x*y) -> y, x*(x\\y) -> y,
    (x*y)/y -> x, (x/y)*y -> x, x\\x -> 1, x/x -> 1, 1\\x -> x, x/1 -> x.
    A result of ``1`` proves the term trivial in every loop.
    """
    if not isinstance(t, Op):
        return t
    t = Op(t.name, tuple(loop_normalize(a) for a in t.args))
    while True:
        r = _rewrite_root(t)
        if r is None:
            return t
        t = loop_normalize(r)


def cosmash_membership_loop(t, n_sorts):
    """Sound test: every single-sort zero substitution rewrites to ``1``."""
    return all(isinstance(loop_normalize(zero_substitute(t, s)), Unit) for s in range(n_sorts))


# --------------------------------------------------------------------------
# enumeration


def _all_terms(kind, atoms, depth):
    """Every signature term over ``atoms`` (and 1) of depth at most ``depth``."""
    levels = [[UNIT, *atoms]]
    upto = list(levels[0])
    ops = ["mul"] if kind is Kind.GROUP else ["mul", "ldiv", "rdiv"]
    for d in range(1, depth + 1):
        prev = levels[-1]
        new = []
        for name in ops:
            for a in upto:
                for b in upto:
                    if a in prev or b in prev:
                        new.append(Op(name, (a, b)))
        if kind is Kind.GROUP:
            new.extend(inv(a) for a in prev)
        levels.append(new)
        upto = upto + new
    return upto


def _dedup_key(kind, t):
    if kind is Kind.GROUP:
        return _generic_word(t)
    return loop_normalize(t)


@lru_cache(maxsize=None)
def _cosmash_stream(kind, n_sorts, letters_per_sort, depth, exhaustive_depth):
    atoms = [Letter(s, i) for s in range(n_sorts) for i in range(1, letters_per_sort + 1)]
    best = {}
    order = []

    def offer(t):
        if t.depth > depth:
            return False
        key = _dedup_key(kind, t)
        old = best.get(key)
        if old is None:
            best[key] = t
            order.append(key)
            return True
        if t.depth < old.depth:
            best[key] = t
        return False

    for t in _all_terms(kind, atoms, min(exhaustive_depth, depth)):
        offer(t)

    # bracket closure: commutators (and for loops associators) of pool terms with letters
    pool = [t for t in atoms]
    frontier = list(pool)
    while frontier:
        built = []
        for t in frontier:
            for a in atoms:
                if kind is Kind.GROUP:
                    cands = [group_commutator(t, a), group_commutator(a, t)]
                else:
                    cands = [loop_commutator(t, a), loop_commutator(a, t)]
                    for b in atoms:
                        cands += [associator(t, a, b), associator(a, t, b), associator(a, b, t)]
                for c in cands:
                    if offer(c):
                        built.append(c)
        frontier = [c for c in built if c.depth < depth]
        pool.extend(frontier)

    terms = [best[k] for k in order]
    member = (
        (lambda t: cosmash_membership_group(t, n_sorts))
        if kind is Kind.GROUP
        else (lambda t: cosmash_membership_loop(t, n_sorts))
    )
    keep = [t for t in terms if member(t)]
    keep.sort(key=lambda t: t.depth)
    return tuple(keep)


def enumerate_cosmash_terms(kind, n_sorts, letters_per_sort=1, depth=6, exhaustive_depth=None):
    """Co-smash terms of depth at most ``depth``, shallowest first.

    The stream contains every signature term up to ``exhaustive_depth``
    (default 2 for groups, 1 for loops) plus the closure of the letters under
    commutator brackets (and, for loops, associators) up to ``depth``.
    Duplicates are removed up to equality in the free group (groups) or up
    to loop normal form (loops).  Only co-smash members are yielded: exact
    membership for groups, the sound rewriting test for loops.
    """
    kind = Kind(kind)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if exhaustive_depth is None:
        exhaustive_depth = 2 if kind is Kind.GROUP else 1
    return iter(_cosmash_stream(kind, n_sorts, letters_per_sort, depth, exhaustive_depth))
