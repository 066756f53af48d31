"""Formula AST for propositional separation logic with reachability atoms.

Atoms: emp, true, false, x = y, x ~> y (points-to, non-exact), ls(x,y),
reach(x,y), reach+(x,y).  Connectives: not, /\\, * and -*.  Disjunction,
implication, iff and septraction are sugar normalized away at construction
time, so the core AST stays small for the checker.

All nodes are immutable and hashable; sharing subtrees is fine.
"""

from __future__ import annotations

from enum import Enum
from typing import FrozenSet, Sequence, Tuple


def _check_var(i: int) -> int:
    if not (isinstance(i, int) and i >= 1):
        raise ValueError(f"variable index must be a positive integer, got {i!r}")
    return i


class Formula:
    __slots__ = ("_hash", "_size", "_msize", "_vars", "_wandfree")

    def _init_caches(self):
        self._hash = None
        self._size = None
        self._msize = None
        self._vars = None
        self._wandfree = None

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._key()))
        return self._hash

    @property
    def size(self) -> int:
        """Tree size: number of nodes."""
        if self._size is None:
            self._size = 1 + sum(c.size for c in self.children())
        return self._size

    @property
    def vars(self) -> FrozenSet[int]:
        if self._vars is None:
            vs: frozenset = frozenset()
            for c in self.children():
                vs |= c.vars
            self._vars = vs
        return self._vars

    @property
    def wand_free(self) -> bool:
        if self._wandfree is None:
            self._wandfree = all(c.wand_free for c in self.children())
        return self._wandfree

    def __repr__(self):
        from .parser import to_text

        return f"<{to_text(self)}>"


class Emp(Formula):
    __slots__ = ()

    def __init__(self):
        self._init_caches()

    def _key(self):
        return ()


class Truth(Formula):
    __slots__ = ()

    def __init__(self):
        self._init_caches()

    def _key(self):
        return ()


class Falsum(Formula):
    __slots__ = ()

    def __init__(self):
        self._init_caches()

    def _key(self):
        return ()


class _BinAtom(Formula):
    __slots__ = ("x", "y")

    def __init__(self, x: int, y: int):
        self._init_caches()
        self.x = _check_var(x)
        self.y = _check_var(y)

    def _key(self):
        return (self.x, self.y)

    @property
    def vars(self):
        if self._vars is None:
            self._vars = frozenset((self.x, self.y))
        return self._vars


class Eq(_BinAtom):
    __slots__ = ()


class PointsTo(_BinAtom):
    __slots__ = ()


class Ls(_BinAtom):
    __slots__ = ()


class Reach(_BinAtom):
    __slots__ = ()


class ReachPlus(_BinAtom):
    __slots__ = ()


class Not(Formula):
    __slots__ = ("child",)

    def __init__(self, child: Formula):
        self._init_caches()
        self.child = child

    def children(self):
        return (self.child,)

    def _key(self):
        return (self.child,)


class _BinOp(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        self._init_caches()
        self.left = left
        self.right = right

    def children(self):
        return (self.left, self.right)

    def _key(self):
        return (self.left, self.right)


class And(_BinOp):
    __slots__ = ()


class Star(_BinOp):
    __slots__ = ()


class Wand(_BinOp):
    __slots__ = ()

    @property
    def wand_free(self):
        return False


EMP = Emp()
TRUE = Truth()
FALSE = Falsum()

ATOM_TYPES = (Emp, Truth, Falsum, Eq, PointsTo, Ls, Reach, ReachPlus)


def f_or(*parts: Formula) -> Formula:
    """Disjunction, normalized to not/and."""
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    acc = parts[0]
    for p in parts[1:]:
        acc = Not(And(Not(acc), Not(p)))
    return acc


def f_and(*parts: Formula) -> Formula:
    if not parts:
        return TRUE
    acc = parts[0]
    for p in parts[1:]:
        acc = And(acc, p)
    return acc


def f_implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def f_iff(a: Formula, b: Formula) -> Formula:
    return And(f_implies(a, b), f_implies(b, a))


def or_parts(f: Formula):
    """Recognize the normalized disjunction pattern not(not a /\\ not b)."""
    if (
        isinstance(f, Not)
        and isinstance(f.child, And)
        and isinstance(f.child.left, Not)
        and isinstance(f.child.right, Not)
    ):
        return f.child.left.child, f.child.right.child
    return None


def msize(f: Formula) -> int:
    """Memory-size measure: atoms count 1, /\\ takes max, * sums.

    not is transparent; -* (not covered by the measure in the source
    material) conservatively combines like /\\ so the measure stays total.
    """
    if f._msize is None:
        if isinstance(f, ATOM_TYPES):
            f._msize = 1
        elif isinstance(f, Not):
            f._msize = msize(f.child)
        elif isinstance(f, Star):
            f._msize = msize(f.left) + msize(f.right)
        elif isinstance(f, (And, Wand)):
            f._msize = max(msize(f.left), msize(f.right))
        else:  # pragma: no cover
            raise TypeError(f"unknown node {f!r}")
    return f._msize


def subformulas(f: Formula):
    yield f
    for c in f.children():
        yield from subformulas(c)


# ---------------------------------------------------------------------------
# Macro catalogue.  Every expansion is purely syntactic.
# ---------------------------------------------------------------------------

def _nat(n, what="argument"):
    if not (isinstance(n, int) and n >= 0):
        raise ValueError(f"{what} must be a natural number, got {n!r}")
    return n


def size_geq(beta: int) -> Formula:
    _nat(beta, "beta")
    f: Formula = TRUE
    for _ in range(beta):
        f = Star(f, Not(EMP))
    return f


def size_leq(beta: int) -> Formula:
    _nat(beta, "beta")
    return Not(size_geq(beta + 1))


def size_eq(beta: int) -> Formula:
    _nat(beta, "beta")
    return And(size_leq(beta), size_geq(beta))


def septraction(a: Formula, b: Formula) -> Formula:
    return Not(Wand(a, Not(b)))


def alloc(x: int) -> Formula:
    return Wand(PointsTo(x, x), FALSE)


def mapsto(x: int, y: int) -> Formula:
    """Exact points-to: x ~> y and nothing else in the heap."""
    return And(PointsTo(x, y), size_eq(1))


def holds_on_cells(f: Formula, gamma: int) -> Formula:
    """Some subheap with exactly gamma cells satisfies f."""
    _nat(gamma, "gamma")
    return Star(And(size_eq(gamma), f), TRUE)


def reach_eq(x: int, y: int, gamma: int) -> Formula:
    """The minimal path from x to y has length exactly gamma."""
    return holds_on_cells(Ls(x, y), gamma)


def reach_leq(x: int, y: int, gamma: int) -> Formula:
    _nat(gamma, "gamma")
    return f_or(*[reach_eq(x, y, g) for g in range(gamma + 1)])


_SPECIAL_NODES: dict = {}


def special_form(f: Formula):
    """(name, args...) when f is one of the registered auxiliary-predicate
    expansions (alloc_inv, loop2, next_eq, next_pointsto)."""
    return _SPECIAL_NODES.get(f)


def alloc_inv(x: int, y: int) -> Formula:
    """x has a predecessor in the heap, valid whenever s(x) != s(y)."""
    inner = septraction(
        f_and(alloc(y), Not(PointsTo(y, x)), size_eq(1)),
        reach_eq(y, x, 2),
    )
    out = f_or(PointsTo(x, x), PointsTo(y, x), holds_on_cells(inner, 1))
    _SPECIAL_NODES.setdefault(out, ("alloc_inv", x, y))
    return out


def loop2(x: int, y: int) -> Formula:
    """x reaches itself in exactly two steps, valid whenever s(x) != s(y).

    The helper conjunct is the implication x ~> y => y ~> x, not the
    biconditional: y may legitimately point at x from outside a two-step
    loop that runs through a third location, and the converse direction
    would wrongly reject such states."""
    body = f_and(
        alloc(x),
        alloc_inv(x, y),
        Wand(TRUE, Not(reach_eq(x, y, 2))),
    )
    out = f_and(
        Not(PointsTo(x, x)),
        f_implies(PointsTo(x, y), PointsTo(y, x)),
        holds_on_cells(body, 2),
    )
    _SPECIAL_NODES.setdefault(out, ("loop2", x, y))
    return out


def next_eq(x: int, y: int) -> Formula:
    """h(s(x)) = h(s(y)), both allocated."""
    no_direct = f_and(
        Not(PointsTo(x, x)),
        Not(PointsTo(x, y)),
        Not(PointsTo(y, x)),
        Not(PointsTo(y, y)),
    )
    third = And(
        no_direct,
        Wand(TRUE, Not(And(reach_eq(x, y, 2), reach_eq(y, x, 2)))),
    )
    body = f_and(
        alloc(x),
        alloc(y),
        f_or(
            And(PointsTo(x, y), PointsTo(y, y)),
            And(PointsTo(y, x), PointsTo(x, x)),
            third,
        ),
    )
    out = And(f_implies(Not(Eq(x, y)), holds_on_cells(body, 2)), alloc(x))
    _SPECIAL_NODES.setdefault(out, ("next_eq", x, y))
    return out


def next_pointsto(x: int, y: int, z: int) -> Formula:
    """h(h(s(x))) = h(s(y)) with x and y allocated, valid when s(x) != s(z)
    and s(y) != s(z)."""
    eq_case = f_or(
        And(PointsTo(x, x), PointsTo(y, x)),
        And(PointsTo(y, y), PointsTo(x, y)),
        And(PointsTo(x, z), PointsTo(z, z)),
        holds_on_cells(
            f_and(alloc(x), Not(alloc_inv(x, z)), Wand(TRUE, Not(reach_leq(x, z, 3)))),
            2,
        ),
    )
    no_direct = f_and(
        Not(PointsTo(x, x)),
        Not(PointsTo(x, y)),
        Not(PointsTo(y, x)),
        Not(PointsTo(y, y)),
    )
    neq_case = f_or(
        And(PointsTo(x, y), alloc(y)),
        And(PointsTo(y, y), reach_eq(x, y, 2)),
        And(PointsTo(y, x), loop2(x, y)),
        holds_on_cells(
            f_and(
                alloc(x),
                alloc(y),
                no_direct,
                Not(reach_leq(x, y, 3)),
                septraction(
                    And(size_eq(1), alloc_inv(y, x)),
                    And(reach_eq(x, y, 3), loop2(y, x)),
                ),
            ),
            3,
        ),
    )
    out = f_or(
        And(next_eq(x, y), eq_case),
        And(Not(next_eq(x, y)), neq_case),
    )
    _SPECIAL_NODES.setdefault(out, ("next_pointsto", x, y, z))
    return out


def safe(xs: Sequence[int]) -> Formula:
    """All listed variables distinct and without predecessors; the helper for
    each variable's predecessor test is its involution partner, so the list
    length must be even."""
    xs = list(xs)
    if len(xs) < 2 or len(xs) % 2 != 0:
        raise ValueError("safe expects an even number (>= 2) of variables")
    half = len(xs) // 2
    parts = []
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            parts.append(Not(Eq(xs[i], xs[j])))
    for i, x in enumerate(xs):
        partner = xs[(i + half) % len(xs)]
        parts.append(Not(alloc_inv(x, partner)))
    return f_and(*parts)


_MACROS = {
    "size_geq": (size_geq, ("nat",)),
    "size_leq": (size_leq, ("nat",)),
    "size_eq": (size_eq, ("nat",)),
    "septraction": (septraction, ("formula", "formula")),
    "alloc": (alloc, ("var",)),
    "mapsto": (mapsto, ("var", "var")),
    "bracket_gamma": (holds_on_cells, ("formula", "nat")),
    "reach_eq_gamma": (reach_eq, ("var", "var", "nat")),
    "reach_leq_gamma": (reach_leq, ("var", "var", "nat")),
    "alloc_inv": (alloc_inv, ("var", "var")),
    "loop2": (loop2, ("var", "var")),
    "next_eq": (next_eq, ("var", "var")),
    "next_pointsto": (next_pointsto, ("var", "var", "var")),
    "safe": (safe, ("varlist",)),
}


def expand_macro(name: str, args: Sequence) -> Formula:
    """Expand one catalogue macro to its defining formula."""
    if name not in _MACROS:
        raise ValueError(f"unknown macro {name!r}")
    fn, kinds = _MACROS[name]
    if kinds == ("varlist",):
        return fn(list(args))
    if len(args) != len(kinds):
        raise ValueError(f"macro {name} expects {len(kinds)} arguments, got {len(args)}")
    checked = []
    for a, kind in zip(args, kinds):
        if kind == "var":
            checked.append(_check_var(a))
        elif kind == "nat":
            checked.append(_nat(a))
        else:
            if not isinstance(a, Formula):
                raise ValueError(f"macro {name} expects a formula argument")
            checked.append(a)
    return fn(*checked)


# ---------------------------------------------------------------------------
# Reachability-predicate rewriting.
# ---------------------------------------------------------------------------

def rewrite_reach(f: Formula, target: str) -> Formula:
    """Rewrite ls/reach/reach+ atoms so only the target predicate remains.

    Targets "ls" and "reach" cannot absorb reach+ atoms (reach+(x,x), a loop
    through x, has no ls/reach counterpart; the interdefinability only goes
    toward reach+), so those raise ValueError on reach+ input.
    """
    if target not in ("ls", "reach", "reachplus"):
        raise ValueError(f"unknown target {target!r}")

    def go(g: Formula) -> Formula:
        if isinstance(g, Not):
            return Not(go(g.child))
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        if isinstance(g, Star):
            return Star(go(g.left), go(g.right))
        if isinstance(g, Wand):
            return Wand(go(g.left), go(g.right))
        if isinstance(g, Ls):
            x, y = g.x, g.y
            if target == "ls":
                return g
            if target == "reach":
                return And(Reach(x, y), Not(Star(Not(EMP), Reach(x, y))))
            # the x != y guard matters: on x = y the second disjunct would
            # wrongly accept a loop through the shared location
            return f_or(
                And(Eq(x, y), EMP),
                f_and(
                    Not(Eq(x, y)),
                    ReachPlus(x, y),
                    Not(Star(Not(EMP), ReachPlus(x, y))),
                ),
            )
        if isinstance(g, Reach):
            x, y = g.x, g.y
            if target == "reach":
                return g
            if target == "ls":
                return Star(TRUE, Ls(x, y))
            return f_or(Eq(x, y), ReachPlus(x, y))
        if isinstance(g, ReachPlus):
            if target == "reachplus":
                return g
            raise ValueError(
                "reach+ atoms cannot be rewritten into ls/reach only"
            )
        return g

    return go(f)


# ---------------------------------------------------------------------------
# Fragment classification.
# ---------------------------------------------------------------------------

class Fragment(Enum):
    SL_STAR = "SL_STAR"
    SL_STAR_WAND = "SL_STAR_WAND"
    SL_STAR_REACHPLUS = "SL_STAR_REACHPLUS"
    SL_STAR_WAND_LS = "SL_STAR_WAND_LS"
    BOOL_SHF = "BOOL_SHF"
    BOOLCOMB = "BOOLCOMB"
    NONE = "NONE"


def _atoms_within(f: Formula, allowed) -> bool:
    if isinstance(f, ATOM_TYPES):
        return isinstance(f, allowed)
    return all(_atoms_within(c, allowed) for c in f.children())


def in_sl_star(f: Formula) -> bool:
    return f.wand_free and _atoms_within(f, (Emp, Truth, Falsum, Eq, PointsTo))


def in_sl_star_wand(f: Formula) -> bool:
    return _atoms_within(f, (Emp, Truth, Falsum, Eq, PointsTo))


def in_sl_star_wand_ls(f: Formula) -> bool:
    return _atoms_within(f, (Emp, Truth, Falsum, Eq, PointsTo, Ls))


def in_sl_star_reachplus(f: Formula) -> bool:
    """Wand-free formulae; ls/reach atoms count since rewrite_reach turns
    them into reach+ form."""
    return f.wand_free


def strictly_in_sl_star_reachplus(f: Formula) -> bool:
    """Literal SL(*, reach+) syntax: no ls or reach atoms at all."""
    return f.wand_free and _atoms_within(
        f, (Emp, Truth, Falsum, Eq, PointsTo, Reach, Ls, ReachPlus)
    ) and not any(isinstance(g, (Ls, Reach)) for g in subformulas(f))


def _is_mapsto_pattern(f: Formula) -> bool:
    return (
        isinstance(f, And)
        and isinstance(f.left, PointsTo)
        and f.right == size_eq(1)
    )


def _is_pure(f: Formula) -> bool:
    if isinstance(f, (Truth, Falsum, Eq)):
        return True
    if isinstance(f, Not) and isinstance(f.child, Eq):
        return True
    if isinstance(f, And):
        return _is_pure(f.left) and _is_pure(f.right)
    return False


def _is_spatial(f: Formula) -> bool:
    if isinstance(f, (Emp, Truth, Ls)):
        return True
    if _is_mapsto_pattern(f):
        return True
    if isinstance(f, Star):
        return _is_spatial(f.left) and _is_spatial(f.right)
    return False


def _is_shf(f: Formula) -> bool:
    """A symbolic-heap formula: pure /\\ spatial, with either side optional."""
    if _is_pure(f) or _is_spatial(f):
        return True
    if isinstance(f, And) and not _is_mapsto_pattern(f):
        l, r = f.left, f.right
        return (
            (_is_pure(l) and _is_shf(r))
            or (_is_shf(l) and _is_pure(r))
            or (_is_pure(l) and _is_spatial(r))
            or (_is_spatial(l) and _is_pure(r))
        )
    return False


def in_bool_shf(f: Formula) -> bool:
    if _is_shf(f):
        return True
    if isinstance(f, Not):
        return in_bool_shf(f.child)
    if isinstance(f, And):
        return in_bool_shf(f.left) and in_bool_shf(f.right)
    return False


def _is_boolcomb_member(f: Formula) -> bool:
    return in_sl_star_wand(f) or strictly_in_sl_star_reachplus(f)


def _is_boolcomb(f: Formula) -> bool:
    if _is_boolcomb_member(f):
        return True
    if isinstance(f, Not):
        return _is_boolcomb(f.child)
    if isinstance(f, And):
        return _is_boolcomb(f.left) and _is_boolcomb(f.right)
    return False


def in_boolcomb(f: Formula) -> bool:
    """Proper Boolean combination of SL(*,-*) and SL(*,reach+) formulae:
    combinations wholly inside one of the two fragments are reported under
    that fragment instead."""
    return _is_boolcomb(f) and not _is_boolcomb_member(f)


def classify(f: Formula) -> FrozenSet[Fragment]:
    out = set()
    if in_sl_star(f):
        out.add(Fragment.SL_STAR)
    if in_sl_star_wand(f):
        out.add(Fragment.SL_STAR_WAND)
    if in_sl_star_reachplus(f):
        out.add(Fragment.SL_STAR_REACHPLUS)
    if in_sl_star_wand_ls(f):
        out.add(Fragment.SL_STAR_WAND_LS)
    if in_bool_shf(f):
        out.add(Fragment.BOOL_SHF)
    if in_boolcomb(f):
        out.add(Fragment.BOOLCOMB)
    if not out:
        out.add(Fragment.NONE)
    return frozenset(out)
