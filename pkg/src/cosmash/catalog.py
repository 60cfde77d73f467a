"""Built-in algebras, extensions and squares, plus JSON file IO.

Names accepted by :func:`resolve` include ``Z<n>``, ``D<n>`` (dihedral of
order ``2n``), ``S<n>``, ``A<n>``, ``Q8``, ``V4``, ``M8``, products such as
``Z2xS3``, and a ``loop:`` prefix that views a group as a loop.
"""

from __future__ import annotations

import itertools
import json
import re
import sys
from functools import lru_cache
from pathlib import Path

import numpy as np

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    Kind,
    direct_product,
    hom_check,
    identity_hom,
    quotient,
    denormalize,
    subalgebra,
    subobject_generate,
    validate_algebra,
)
from .errors import BadParams, FormatError, IoError, UnknownEntry
from .structures import (
    DoubleExtensionSquare,
    build_semidirect_group,
    extension_from_total,
    zero_hom,
)

__all__ = [
    "builtin",
    "resolve",
    "cyclic",
    "dihedral",
    "symmetric",
    "alternating",
    "quaternion8",
    "klein4",
    "trivial",
    "hyperbolic_quaternion_loop",
    "as_loop",
    "product",
    "M8_TABLE",
    "M8_NAMES",
    "load_algebra",
    "save_algebra",
    "dumps_algebra",
    "loads_algebra",
    "builtin_extension",
    "builtin_square",
    "EXTENSIONS",
    "SQUARES",
    "group_corpus",
    "loop_corpus",
    "square_from_normals",
    "load_extension",
    "load_square",
]


# --------------------------------------------------------------------------
# builders


def trivial(kind=Kind.GROUP):
    return FiniteAlgebra(kind, ["e"], [[0]])


def cyclic(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise BadParams(f"cyclic needs a positive order, got {n!r}")
    a = np.arange(n)
    return validate_algebra(Kind.GROUP, (a[:, None] + a[None, :]) % n, [str(i) for i in range(n)])


def dihedral(n):
    """Symmetries of the ``n``-gon (order ``2n``); ``r^a s^b`` sits at index ``a + n*b``."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise BadParams(f"dihedral needs n >= 2, got {n!r}")
    a = np.tile(np.arange(n), 2)
    b = np.repeat(np.arange(2), n)
    sign = np.where(b == 0, 1, -1)
    ra = (a[:, None] + sign[:, None] * a[None, :]) % n
    rb = (b[:, None] + b[None, :]) % 2
    mul = ra + n * rb

    def name(x, y):
        r = "" if x == 0 else ("r" if x == 1 else f"r{x}")
        s = "s" if y else ""
        return (r + s) or "e"

    return validate_algebra(Kind.GROUP, mul, [name(x, y) for x, y in zip(a, b)])


def _cycle_name(p):
    seen = set()
    parts = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        j = p[i]
        while j != i:
            cyc.append(j)
            j = p[j]
        seen.update(cyc)
        parts.append("(" + "".join(str(c + 1) for c in cyc) + ")")
    return "".join(parts) or "e"


def _permutation_group(perms):
    perms = [tuple(p) for p in perms]
    idx = {p: i for i, p in enumerate(perms)}
    n = len(perms[0])
    # (p q)(i) = p(q(i)): apply q first
    mul = [[idx[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
    return validate_algebra(Kind.GROUP, mul, [_cycle_name(p) for p in perms])


def symmetric(n):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= 4:
        raise BadParams(f"symmetric is available for 1 <= n <= 4, got {n!r}")
    return _permutation_group(itertools.permutations(range(n)))


def _parity(p):
    return sum(1 for i, j in itertools.combinations(range(len(p)), 2) if p[i] > p[j]) % 2


def alternating(n):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= 4:
        raise BadParams(f"alternating is available for 1 <= n <= 4, got {n!r}")
    return _permutation_group(p for p in itertools.permutations(range(n)) if _parity(p) == 0)


_Q_NAMES = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]


def _signed_units(square_sign):
    """Signed quaternion-style table; ``square_sign`` is the sign of ``i^2 = j^2 = k^2``."""
    base = {("1", u): (1, u) for u in "1ijk"}
    for u in "ijk":
        base[(u, "1")] = (1, u)
        base[(u, u)] = (square_sign, "1")
    base.update(
        {
            ("i", "j"): (1, "k"),
            ("j", "i"): (-1, "k"),
            ("j", "k"): (1, "i"),
            ("k", "j"): (-1, "i"),
            ("k", "i"): (1, "j"),
            ("i", "k"): (-1, "j"),
        }
    )
    els = [(1, "1"), (-1, "1"), (1, "i"), (-1, "i"), (1, "j"), (-1, "j"), (1, "k"), (-1, "k")]
    table = []
    for sa, a in els:
        row = []
        for sb, b in els:
            s, u = base[(a, b)]
            row.append(els.index((s * sa * sb, u)))
        table.append(row)
    return table


def quaternion8():
    return validate_algebra(Kind.GROUP, _signed_units(-1), _Q_NAMES)


def klein4():
    return validate_algebra(Kind.GROUP, [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]], ["e", "a", "b", "c"])


# Loop of the hyperbolic quaternions: ij = k = -ji, jk = i = -kj, ki = j = -ik,
# ii = jj = kk = 1, with -1 central of order two.
M8_NAMES = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")
M8_TABLE = (
    (0, 1, 2, 3, 4, 5, 6, 7),
    (1, 0, 3, 2, 5, 4, 7, 6),
    (2, 3, 0, 1, 6, 7, 5, 4),
    (3, 2, 1, 0, 7, 6, 4, 5),
    (4, 5, 7, 6, 0, 1, 2, 3),
    (5, 4, 6, 7, 1, 0, 3, 2),
    (6, 7, 4, 5, 3, 2, 0, 1),
    (7, 6, 5, 4, 2, 3, 1, 0),
)


def hyperbolic_quaternion_loop():
    return validate_algebra(Kind.LOOP, M8_TABLE, M8_NAMES)


def as_loop(X):
    """The same table viewed as a loop."""
    if X.kind is Kind.LOOP:
        return X
    return FiniteAlgebra(Kind.LOOP, X.names, X.mul)


def product(*factors):
    if not factors:
        raise BadParams("product needs at least one factor")
    kinds = {F.kind for F in factors}
    if len(kinds) > 1:
        factors = [as_loop(F) for F in factors]
    out = factors[0]
    for F in factors[1:]:
        out = direct_product(out, F)
    return out


_BUILDERS = {
    "cyclic": cyclic,
    "dihedral": dihedral,
    "symmetric": symmetric,
    "alternating": alternating,
    "quaternion8": quaternion8,
    "klein4": klein4,
    "trivial": trivial,
    "hyperbolic_quaternion_loop": hyperbolic_quaternion_loop,
}


def builtin(name, *params):
    """Build a catalog algebra by name, e.g. ``builtin("symmetric", 3)``."""
    if name in ("direct_product", "product"):
        return product(*(p if isinstance(p, FiniteAlgebra) else resolve(p) for p in params))
    try:
        fn = _BUILDERS[name]
    except KeyError:
        raise UnknownEntry(f"no catalog entry named {name!r}") from None
    try:
        return fn(*params)
    except TypeError as exc:
        raise BadParams(f"{name}: {exc}") from None


_ALIAS = re.compile(r"^(Z|D|S|A)(\d+)$")


@lru_cache(maxsize=None)
def _resolve_name(name):
    name = name.strip()
    if name.startswith("loop:"):
        return as_loop(_resolve_name(name[5:]))
    if name in _BUILDERS:
        return builtin(name)
    fixed = {"Q8": quaternion8, "V4": klein4, "M8": hyperbolic_quaternion_loop, "1": trivial}
    if name in fixed:
        return fixed[name]()
    m = re.fullmatch(r"(\w+)\((\d+)\)", name)
    if m:
        return builtin(m.group(1), int(m.group(2)))
    m = _ALIAS.match(name)
    if m:
        letter, n = m.group(1), int(m.group(2))
        return {"Z": cyclic, "D": dihedral, "S": symmetric, "A": alternating}[letter](n)
    if "x" in name:
        return product(*(_resolve_name(p) for p in name.split("x")))
    raise UnknownEntry(f"no catalog entry named {name!r}")


def resolve(ref):
    """A catalog name, an alias, or a path to an algebra file."""
    if isinstance(ref, FiniteAlgebra):
        return ref
    try:
        return _resolve_name(ref)
    except UnknownEntry:
        if Path(ref).is_file():
            return load_algebra(ref)
        raise


# --------------------------------------------------------------------------
# file format


def dumps_algebra(X):
    """Deterministic JSON text, one table row per line."""
    lines = ["{"]
    lines.append(f'  "kind": {json.dumps(X.kind.value)},')
    lines.append(f'  "order": {X.order},')
    lines.append(f'  "elements": {json.dumps(list(X.names))},')
    rows = ",\n".join("    " + json.dumps(r) for r in X.mul.tolist())
    if X.kind is Kind.GROUP:
        lines.append('  "mul": [\n' + rows + "\n  ],")
        lines.append(f'  "inv": {json.dumps(X.inv.tolist())}')
    else:
        lines.append('  "mul": [\n' + rows + "\n  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _line_of(text, key):
    for i, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return i
    return 1


def loads_algebra(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.lineno, exc.msg) from None
    if not isinstance(doc, dict):
        raise FormatError(1, "top level must be an object")
    for key in ("kind", "mul"):
        if key not in doc:
            raise FormatError(1, f"missing field {key!r}")
    kind = doc["kind"]
    if kind not in ("group", "loop"):
        raise FormatError(_line_of(text, "kind"), f"kind must be 'group' or 'loop', got {kind!r}")
    mul = doc["mul"]
    if not isinstance(mul, list) or not all(isinstance(r, list) for r in mul):
        raise FormatError(_line_of(text, "mul"), "mul must be an array of arrays")
    n = len(mul)
    if any(len(r) != n for r in mul) or not all(isinstance(v, int) for r in mul for v in r):
        raise FormatError(_line_of(text, "mul"), "mul must be a square array of integers")
    if "order" in doc and doc["order"] != n:
        raise FormatError(_line_of(text, "order"), f"order {doc['order']} does not match mul ({n} rows)")
    names = doc.get("elements")
    if names is not None and (not isinstance(names, list) or len(names) != n):
        raise FormatError(_line_of(text, "elements"), f"elements must list {n} names")
    extra = {}
    for key in ("inv", "ldiv", "rdiv"):
        if key in doc:
            extra[key] = doc[key]
    unknown = set(doc) - {"kind", "order", "elements", "mul", "inv", "ldiv", "rdiv"}
    if unknown:
        key = sorted(unknown)[0]
        raise FormatError(_line_of(text, key), f"unknown field {key!r}")
    return validate_algebra(kind, mul, names, **extra)


def load_algebra(path):
    """Read an algebra file; ``-`` reads standard input."""
    try:
        if str(path) == "-":
            text = sys.stdin.read()
        else:
            text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from None
    return loads_algebra(text)


def save_algebra(X, path):
    try:
        Path(path).write_text(dumps_algebra(X))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from None


# --------------------------------------------------------------------------
# extensions and squares


def _sub(X, names):
    return subobject_generate(X, [X.index(n) for n in names])


def _m8_extension():
    X = hyperbolic_quaternion_loop()
    G = as_loop(cyclic(2))
    V = _sub(X, ["j", "-1"])
    p = [0 if x in V else 1 for x in range(8)]
    ext = extension_from_total(X, G, p, [0, X.index("i")])
    return ext, {"zero": zero_hom(ext.kernel_algebra, G)}


def _conj_action(A, inc, G):
    """Table of ``g a g^-1`` for ``A`` embedded in ``G`` via ``inc``."""
    back = {int(v): i for i, v in enumerate(inc.map)}
    return [[back[int(G.mul[G.mul[g, inc.map[a]], G.inv[g]])] for a in range(A.order)] for g in range(G.order)]


def _a3_s3():
    S3 = symmetric(3)
    A, inc = subalgebra(_sub(S3, ["(123)"]))
    ext = build_semidirect_group(A, S3, _conj_action(A, inc, S3))
    return ext, {"zero": zero_hom(A, S3), "inclusion": Homomorphism(A, S3, inc.map)}


def _z4_z2():
    A, G = cyclic(4), cyclic(2)
    ext = build_semidirect_group(A, G, [np.arange(4), (-np.arange(4)) % 4])
    return ext, {"zero": zero_hom(A, G), "reduction": hom_check(A, G, np.arange(4) % 2)}


def _z3_z2():
    A, G = cyclic(3), cyclic(2)
    ext = build_semidirect_group(A, G, [np.arange(3), (-np.arange(3)) % 3])
    return ext, {"zero": zero_hom(A, G)}


def _z4_z4():
    A, G = cyclic(4), cyclic(4)
    act = [np.arange(4) if g % 2 == 0 else (-np.arange(4)) % 4 for g in range(4)]
    ext = build_semidirect_group(A, G, act)
    return ext, {"zero": zero_hom(A, G), "identity": identity_hom(A)}


def _trivial_action(a, g):
    def build():
        A, G = resolve(a), resolve(g)
        ext = build_semidirect_group(A, G, [np.arange(A.order)] * G.order)
        return ext, {"zero": zero_hom(A, G)}

    return build


EXTENSIONS = {
    "m8_as_V_rtimes_Z2": _m8_extension,
    "A3_rtimes_S3_conj": _a3_s3,
    "Z4_rtimes_Z2_inv": _z4_z2,
    "Z3_rtimes_Z2_inv": _z3_z2,
    "Z4_rtimes_Z4_via_Z2_inv": _z4_z4,
    "Z3_times_Z2": _trivial_action("Z3", "Z2"),
    "V4_times_Z2": _trivial_action("V4", "Z2"),
}


def builtin_extension(name):
    """``(SplitExtension, {boundary name: Homomorphism})`` for a named extension."""
    try:
        return EXTENSIONS[name]()
    except KeyError:
        raise UnknownEntry(f"no extension named {name!r}") from None


def square_from_normals(X, K, L):
    """The square of quotients by ``L`` (d), ``K`` (c) and their join."""
    qd, d = quotient(X, denormalize(X, L))
    qc, c = quotient(X, denormalize(X, K))
    J = subobject_generate(X, set(K.elements) | set(L.elements))
    qz, z = quotient(X, denormalize(X, J))
    f = _induced(d, z)
    g = _induced(c, z)
    return DoubleExtensionSquare(X, qd, qc, qz, d, c, f, g)


def _induced(q, z):
    """The map ``Q -> Z`` with ``z = m o q`` (``q`` surjective)."""
    m = np.zeros(q.target.order, dtype=np.int64)
    m[q.map] = z.map
    return Homomorphism(q.target, z.target, m)


def _simple_square(X, d, c, D, C, Z, f, g):
    return DoubleExtensionSquare(
        X, D, C, Z, hom_check(X, D, d), hom_check(X, C, c), hom_check(D, Z, f), hom_check(C, Z, g)
    )


def _square_products():
    X = product(cyclic(2), cyclic(2))
    Z2, one = cyclic(2), trivial()
    return _simple_square(X, [0, 0, 1, 1], [0, 1, 0, 1], Z2, Z2, one, [0, 0], [0, 0])


def _square_sign():
    X = symmetric(3)
    Z2 = cyclic(2)
    sign = [_parity_of_name(nm) for nm in X.names]
    return _simple_square(X, sign, sign, Z2, Z2, Z2, [0, 1], [0, 1])


def _parity_of_name(name):
    if name == "e":
        return 0
    return sum(len(c) - 1 for c in re.findall(r"\((\d+)\)", name)) % 2


def _square_m8():
    ext, _ = _m8_extension()
    X, G = ext.total, ext.base
    p = ext.p.map
    return _simple_square(X, p, p, G, G, G, [0, 1], [0, 1])


SQUARES = {
    "Z2xZ2_projections": _square_products,
    "S3_sign": _square_sign,
    "M8_p": _square_m8,
}


def builtin_square(name):
    try:
        return SQUARES[name]()
    except KeyError:
        raise UnknownEntry(f"no square named {name!r}") from None


def _read_json(path):
    try:
        text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.lineno, exc.msg) from None


def _algebra_field(doc, key):
    if key not in doc:
        raise FormatError(1, f"missing field {key!r}")
    ref = doc[key]
    if isinstance(ref, dict):
        return loads_algebra(json.dumps(ref))
    return resolve(ref)


def load_extension(ref):
    """A named extension or a JSON file ``{"total", "base", "p", "s", "boundaries"}``."""
    if ref in EXTENSIONS:
        return builtin_extension(ref)
    doc = _read_json(ref)
    X, G = _algebra_field(doc, "total"), _algebra_field(doc, "base")
    for key in ("p", "s"):
        if key not in doc:
            raise FormatError(1, f"missing field {key!r}")
    ext = extension_from_total(X, G, doc["p"], doc["s"])
    bounds = {"zero": zero_hom(ext.kernel_algebra, G)}
    for name, vec in doc.get("boundaries", {}).items():
        bounds[name] = hom_check(ext.kernel_algebra, G, vec)
    return ext, bounds


def load_square(ref):
    """A named square or a JSON file ``{"X", "D", "C", "Z", "d", "c", "f", "g"}``."""
    if ref in SQUARES:
        return builtin_square(ref)
    doc = _read_json(ref)
    alg = {k: _algebra_field(doc, k) for k in "XDCZ"}
    for key in "dcfg":
        if key not in doc:
            raise FormatError(1, f"missing field {key!r}")
    return _simple_square(
        alg["X"], doc["d"], doc["c"], alg["D"], alg["C"], alg["Z"], doc["f"], doc["g"]
    )


# --------------------------------------------------------------------------
# corpora

GROUP_CORPUS = (
    "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z12", "Z16",
    "V4", "S3", "D4", "D5", "D6", "D7", "D8", "Q8", "A4",
    "Z2xZ2xZ2", "Z2xZ4", "Z2xZ6", "Z2xZ8", "Z3xZ3", "Z4xZ4", "Z2xS3", "Z2xD4", "Z2xQ8",
)

LOOP_CORPUS = ("M8", "M8xZ2", "loop:S3", "loop:Q8", "loop:V4")


def group_corpus(max_order=16):
    return [(n, resolve(n)) for n in GROUP_CORPUS if resolve(n).order <= max_order]


def loop_corpus():
    out = [(n, resolve(n)) for n in LOOP_CORPUS]
    M8 = resolve("M8")
    Q, _ = quotient(M8, denormalize(M8, _sub(M8, ["-1"])))
    out.append(("M8/{1,-1}", Q))
    return out
