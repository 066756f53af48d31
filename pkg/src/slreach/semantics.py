"""The satisfaction relation.

check_exact is sound and complete for -*-free formulae.  check additionally
evaluates -* by enumerating heap extensions over the relevant locations plus
a policy-controlled supply of fresh ones, up to a policy-controlled cell
bound: refutations found this way are definitive, exhaustion is reported as
"true, not exact".

Three optimizations keep desk-scale exhaustive testing tractable, all
justified by the fact that isomorphic states satisfy the same formulae:

* wand results are memoized under a canonical relabelling of the state;
* extension witnesses are enumerated with the unused fresh locations
  compacted to a prefix, which drops permutation duplicates;
* separating conjunctions of wand-free formulae split the heap per
  constraint blocks (cells grouped by which variable cells and minimal
  variable-to-variable paths they lie on) instead of per subset, since the
  truth of a wand-free formula on a restriction only depends on how many
  cells of each block the restriction keeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, NamedTuple, Optional, Tuple

from . import syntax as S
from .heaps import Heap, MemoryState, fresh_locations


class WandForbiddenError(ValueError):
    pass


@dataclass(frozen=True)
class WandPolicy:
    mode: str = "bounded"  # "forbid" | "bounded"
    cell_bound: int = 4
    fresh_locations: int = 4
    # evaluate the registered auxiliary predicates (alloc_inv, loop2,
    # next_eq, next_pointsto) by their proven characterizations instead of
    # expanding their -* structure; requires a budget under which the two
    # agree, so it is opt-in
    macro_shortcuts: bool = False

    def __post_init__(self):
        if self.mode not in ("forbid", "bounded"):
            raise ValueError(f"unknown policy mode {self.mode!r}")
        if self.mode == "bounded" and (self.cell_bound < 0 or self.fresh_locations < 1):
            raise ValueError("bounded mode needs cell_bound >= 0 and fresh_locations >= 1")
        if self.macro_shortcuts and self.mode == "bounded" and (
            self.cell_bound < 3 or self.fresh_locations < 2
        ):
            raise ValueError("macro shortcuts need cell_bound >= 3 and fresh >= 2")


FORBID = WandPolicy("forbid", 0, 1)


class CheckResult(NamedTuple):
    truth: bool
    exact: bool


_INF = None  # open upper bound in size intervals


def _size_geq_value(f: S.Formula) -> Optional[int]:
    """k when f is structurally the expansion of size >= k, else None."""
    k = 0
    while (
        isinstance(f, S.Star)
        and isinstance(f.right, S.Not)
        and isinstance(f.right.child, S.Emp)
    ):
        k += 1
        f = f.left
    return k if isinstance(f, S.Truth) else None


def _interval(f: S.Formula, store) -> Tuple[int, Optional[int]]:
    """(lo, hi) such that every model of f has lo <= |dom| <= hi."""
    if isinstance(f, S.Emp):
        return (0, 0)
    if isinstance(f, S.Falsum):
        return (1, 0)  # empty interval: unsatisfiable
    if isinstance(f, (S.Truth, S.Eq)):
        return (0, _INF)
    if isinstance(f, (S.PointsTo, S.ReachPlus)):
        return (1, _INF)
    if isinstance(f, (S.Ls, S.Reach)):
        if store is not None and store[f.x] != store[f.y]:
            return (1, _INF)
        return (0, _INF)
    if isinstance(f, S.Not):
        v = _size_geq_value(f.child)
        if v is not None:
            return (0, v - 1) if v >= 1 else (1, 0)
        if isinstance(f.child, S.Emp):
            return (1, _INF)
        return (0, _INF)
    if isinstance(f, S.And):
        l1, h1 = _interval(f.left, store)
        l2, h2 = _interval(f.right, store)
        hi = h1 if h2 is _INF else (h2 if h1 is _INF else min(h1, h2))
        return (max(l1, l2), hi)
    if isinstance(f, S.Star):
        l1, h1 = _interval(f.left, store)
        l2, h2 = _interval(f.right, store)
        hi = _INF if (h1 is _INF or h2 is _INF) else h1 + h2
        return (l1 + l2, hi)
    return (0, _INF)  # wand


def _alloc_pattern(f: S.Formula) -> Optional[int]:
    """x when f is the allocation formula (x ~> x) -* false."""
    if (
        isinstance(f, S.Wand)
        and isinstance(f.left, S.PointsTo)
        and f.left.x == f.left.y
        and isinstance(f.right, S.Falsum)
    ):
        return f.left.x
    return None


def _must_alloc(f: S.Formula, store) -> frozenset:
    """Locations allocated in every model of f."""
    if isinstance(f, S.PointsTo):
        return frozenset((store[f.x],))
    if isinstance(f, S.ReachPlus):
        return frozenset((store[f.x],))
    if isinstance(f, (S.Ls, S.Reach)):
        if store[f.x] != store[f.y]:
            return frozenset((store[f.x],))
        return frozenset()
    spec = S.special_form(f)
    if spec is not None:
        if spec[0] in ("next_eq", "next_pointsto"):
            return frozenset((store[spec[1]], store[spec[2]]))
        if spec[0] == "loop2":
            return frozenset((store[spec[1]],))
        return frozenset()
    if isinstance(f, (S.And, S.Star)):
        return _must_alloc(f.left, store) | _must_alloc(f.right, store)
    v = _alloc_pattern(f)
    if v is not None:
        return frozenset((store[v],))
    return frozenset()


def _must_not_alloc(f: S.Formula, store) -> frozenset:
    """Locations unallocated in every model of f.  Conjunction-only descent:
    under * the negative information applies to one part of the split."""
    if isinstance(f, S.Emp):
        return frozenset()  # everything, but the size interval handles it
    if isinstance(f, S.Not):
        v = _alloc_pattern(f.child)
        if v is not None:
            return frozenset((store[v],))
        return frozenset()
    if isinstance(f, S.And):
        return _must_not_alloc(f.left, store) | _must_not_alloc(f.right, store)
    return frozenset()


def _must_not_target(f: S.Formula, store) -> frozenset:
    """Locations without a predecessor in every model of f (from negated
    predecessor formulae, valid when the helper variable differs)."""
    if isinstance(f, S.Not):
        spec = S.special_form(f.child)
        if (
            spec is not None
            and spec[0] == "alloc_inv"
            and store[spec[1]] != store[spec[2]]
        ):
            return frozenset((store[spec[1]],))
        return frozenset()
    if isinstance(f, S.And):
        return _must_not_target(f.left, store) | _must_not_target(f.right, store)
    return frozenset()


def _next_eq_conjuncts(f: S.Formula, out: list):
    """Collect the next_eq(a, b) conjuncts of an and-chain."""
    spec = S.special_form(f)
    if spec is not None and spec[0] == "next_eq":
        out.append((spec[1], spec[2]))
        return
    if isinstance(f, S.And):
        _next_eq_conjuncts(f.left, out)
        _next_eq_conjuncts(f.right, out)


def _size_eq_value(f: S.Formula) -> Optional[int]:
    """gamma when f is structurally the expansion of size = gamma."""
    if isinstance(f, S.And) and isinstance(f.left, S.Not):
        hi = _size_geq_value(f.left.child)
        lo = _size_geq_value(f.right)
        if hi is not None and lo is not None and hi == lo + 1:
            return lo
    return None


def _certificates(f: S.Formula, store, universe) -> Optional[list]:
    """Minimal-witness heaps for the monotone bracket patterns: f holds on g
    iff some certificate is a subheap of g.  None when f is outside the
    recognized class (plain equalities, points-to, exact-path brackets and
    their and/or combinations)."""
    if isinstance(f, S.Truth):
        return [{}]
    if isinstance(f, S.Eq):
        return [{}] if store[f.x] == store[f.y] else []
    if isinstance(f, S.PointsTo):
        return [{store[f.x]: store[f.y]}]
    parts = S.or_parts(f)
    if parts is not None:
        ca = _certificates(parts[0], store, universe)
        cb = _certificates(parts[1], store, universe)
        if ca is None or cb is None:
            return None
        return ca + cb
    if isinstance(f, S.And):
        ca = _certificates(f.left, store, universe)
        cb = _certificates(f.right, store, universe)
        if ca is None or cb is None:
            return None
        out = []
        for a in ca:
            for b in cb:
                if all(a[l] == b[l] for l in a.keys() & b.keys()):
                    merged = dict(a)
                    merged.update(b)
                    out.append(merged)
        return out
    if (
        isinstance(f, S.Star)
        and isinstance(f.right, S.Truth)
        and isinstance(f.left, S.And)
        and isinstance(f.left.right, S.Ls)
    ):
        gamma = _size_eq_value(f.left.left)
        if gamma is None:
            return None
        a, b = store[f.left.right.x], store[f.left.right.y]
        if gamma == 0:
            return [{}] if a == b else []
        if a == b:
            return []
        out = []

        def paths(prefix):
            if len(prefix) == gamma:
                if b not in prefix:
                    out.append(
                        {p: q for p, q in zip(prefix, prefix[1:] + [b])}
                    )
                return
            for l in universe:
                if l != b and l not in prefix:
                    paths(prefix + [l])

        paths([a])
        return out
    return None


def _witness_need(f: S.Formula) -> Optional[int]:
    """For extension-monotone f: a bound n such that whenever f holds on
    h + h1 it also holds on h + h1' for some h1' within h1 of at most n
    cells.  None when no such bound is derived."""
    if isinstance(f, (S.Truth, S.Falsum, S.Eq)):
        return 0
    if isinstance(f, S.PointsTo):
        return 1
    parts = S.or_parts(f)
    if parts is not None:
        na, nb = _witness_need(parts[0]), _witness_need(parts[1])
        if na is None or nb is None:
            return None
        return max(na, nb)
    if isinstance(f, S.Not):
        return 0 if isinstance(f.child, S.Eq) else None
    if isinstance(f, S.Star):
        if isinstance(f.right, S.Truth):
            hi = _interval(f.left, None)[1]
            return hi
        if isinstance(f.left, S.Truth):
            hi = _interval(f.right, None)[1]
            return hi
        return None
    if isinstance(f, S.And):
        na, nb = _witness_need(f.left), _witness_need(f.right)
        if na is None or nb is None:
            return None
        return na + nb
    return None


# ---------------------------------------------------------------------------
# Heap walks.
# ---------------------------------------------------------------------------

def _reach(heap: dict, a: int, b: int, strict: bool) -> bool:
    if not strict and a == b:
        return True
    cur = a
    for _ in range(len(heap)):
        nxt = heap.get(cur)
        if nxt is None:
            return False
        cur = nxt
        if cur == b:
            return True
    return False


def _ls(heap: dict, a: int, b: int) -> bool:
    n = len(heap)
    if n == 0:
        return a == b
    cur = a
    seen = set()
    for _ in range(n):
        if cur in seen or cur not in heap:
            return False
        seen.add(cur)
        cur = heap[cur]
    return cur == b and cur not in seen


def _path_cells(heap: dict, a: int, b: int) -> Optional[Tuple[int, ...]]:
    """Sources of the minimal >= 1 step path from a to b in heap, or None."""
    cells = []
    cur = a
    for _ in range(len(heap)):
        if cur not in heap:
            return None
        cells.append(cur)
        cur = heap[cur]
        if cur == b:
            return tuple(cells)
    return None


# ---------------------------------------------------------------------------
# Canonical relabelling of (store restricted to some variables, heap).
# ---------------------------------------------------------------------------

def canonical_key(values: Tuple[int, ...], heap: dict) -> tuple:
    lab: Dict[int, int] = {}
    order = []

    def mark(l: int) -> int:
        r = lab.get(l)
        if r is None:
            r = len(lab)
            lab[l] = r
            order.append(l)
        return r

    store_part = tuple(mark(v) for v in values)
    i = 0
    while i < len(order):
        t = heap.get(order[i])
        if t is not None:
            mark(t)
        i += 1
    rest = [l for l in heap if l not in lab]
    while rest:
        hooked = [l for l in rest if heap[l] in lab]
        if hooked:
            l = min(hooked, key=lambda l: (lab[heap[l]], l))
        else:
            l = min(rest)
        mark(l)
        cur = heap.get(l)
        while cur is not None and cur not in lab:
            mark(cur)
            cur = heap.get(cur)
        rest = [l for l in rest if l not in lab]
    cells = []
    for l in sorted(heap, key=lab.__getitem__):
        cells.append((lab[l], mark(heap[l])))
    return (store_part, tuple(cells))


_WAND_MEMO: Dict[tuple, Tuple[bool, bool]] = {}


def clear_wand_memo():
    _WAND_MEMO.clear()


# ---------------------------------------------------------------------------
# Evaluation.
# ---------------------------------------------------------------------------

class _Evaluator:
    __slots__ = ("policy",)

    def __init__(self, policy: WandPolicy):
        self.policy = policy

    # fast path: wand-free, plain booleans -----------------------------------
    def ev(self, store: dict, heap: dict, f: S.Formula) -> bool:
        if isinstance(f, S.Emp):
            return not heap
        if isinstance(f, S.Truth):
            return True
        if isinstance(f, S.Falsum):
            return False
        if isinstance(f, S.Eq):
            return store[f.x] == store[f.y]
        if isinstance(f, S.PointsTo):
            return heap.get(store[f.x]) == store[f.y]
        if isinstance(f, S.Ls):
            return _ls(heap, store[f.x], store[f.y])
        if isinstance(f, S.Reach):
            return _reach(heap, store[f.x], store[f.y], strict=False)
        if isinstance(f, S.ReachPlus):
            return _reach(heap, store[f.x], store[f.y], strict=True)
        if isinstance(f, S.Not):
            return not self.ev(store, heap, f.child)
        if isinstance(f, S.And):
            return self.ev(store, heap, f.left) and self.ev(store, heap, f.right)
        if isinstance(f, S.Star):
            return self._star_blocks(store, heap, f)
        raise WandForbiddenError("separating implication outside bounded mode")

    def _star_blocks(self, store: dict, heap: dict, f: S.Star) -> bool:
        n = len(heap)
        lo_l, hi_l = _interval(f.left, store)
        lo_r, hi_r = _interval(f.right, store)
        lower = max(lo_l, n - (n if hi_r is _INF else hi_r))
        upper = min(n if hi_l is _INF else hi_l, n - lo_r)
        if lower > upper:
            return False
        vals = sorted({store[v] for v in f.vars})
        tags: Dict[int, list] = {}
        for l in vals:
            if l in heap:
                tags.setdefault(l, []).append(("c", l))
        for a in vals:
            for b in vals:
                cells = _path_cells(heap, a, b)
                if cells:
                    for c in cells:
                        tags.setdefault(c, []).append(("p", a, b))
        groups: Dict[frozenset, list] = {}
        for c in heap:
            groups.setdefault(frozenset(tags.get(c, ())), []).append(c)
        blocks = [sorted(cells) for _, cells in sorted(groups.items(), key=lambda kv: min(kv[1]))]

        def rec(idx: int, chosen: list, total: int, slack: int) -> bool:
            if idx == len(blocks):
                if not (lower <= total <= upper):
                    return False
                sub = {}
                for blk, cnt in zip(blocks, chosen):
                    for c in blk[:cnt]:
                        sub[c] = heap[c]
                rest = {c: t for c, t in heap.items() if c not in sub}
                return self.ev(store, sub, f.left) and self.ev(store, rest, f.right)
            blk = blocks[idx]
            rest_slack = slack - len(blk)
            for cnt in range(len(blk) + 1):
                if total + cnt > upper:
                    break
                if total + cnt + rest_slack < lower:
                    continue
                chosen.append(cnt)
                if rec(idx + 1, chosen, total + cnt, rest_slack):
                    chosen.pop()
                    return True
                chosen.pop()
            return False

        slack = sum(len(b) for b in blocks)
        return rec(0, [], 0, slack)

    # general path: (truth, exact) -------------------------------------------
    def _shortcut(self, store: dict, heap: dict, f: S.Formula):
        spec = S.special_form(f)
        if spec is None:
            return None
        name = spec[0]
        if name == "alloc_inv":
            x, y = store[spec[1]], store[spec[2]]
            if x == y:
                return None
            return x in heap.values()
        if name == "loop2":
            x, y = store[spec[1]], store[spec[2]]
            if x == y:
                return None
            step = heap.get(x)
            return step is not None and step != x and heap.get(step) == x
        if name == "next_eq":
            a, b = store[spec[1]], store[spec[2]]
            return a in heap and b in heap and heap[a] == heap[b]
        # next_pointsto
        a, b, c = store[spec[1]], store[spec[2]], store[spec[3]]
        if a == c or b == c:
            return None
        if a not in heap or b not in heap:
            return False
        mid = heap[a]
        return mid in heap and heap[mid] == heap[b]

    def evx(self, store: dict, heap: dict, f: S.Formula) -> Tuple[bool, bool]:
        if self.policy.macro_shortcuts and not f.wand_free:
            v = self._shortcut(store, heap, f)
            if v is not None:
                return (v, True)
        if f.wand_free:
            return (self.ev(store, heap, f), True)
        if isinstance(f, S.Not):
            v, e = self.evx(store, heap, f.child)
            return (not v, e)
        if isinstance(f, S.And):
            va, ea = self.evx(store, heap, f.left)
            if not va and ea:
                return (False, True)
            vb, eb = self.evx(store, heap, f.right)
            if va and vb:
                return (True, ea and eb)
            return (False, (not va and ea) or (not vb and eb))
        if isinstance(f, S.Star):
            return self._star_general(store, heap, f)
        if isinstance(f, S.Wand):
            return self._wand(store, heap, f)
        raise TypeError(f"unknown node {f!r}")  # pragma: no cover

    def _star_general(self, store: dict, heap: dict, f: S.Star) -> Tuple[bool, bool]:
        cells = sorted(heap)
        n = len(cells)
        lo_l, hi_l = _interval(f.left, store)
        lo_r, hi_r = _interval(f.right, store)
        lower = max(lo_l, n - (n if hi_r is _INF else hi_r))
        upper = min(n if hi_l is _INF else hi_l, n - lo_r)
        inexact_true = False
        refutation_exact = True
        for k in range(max(lower, 0), upper + 1):
            for combo in combinations(cells, k):
                sub = {c: heap[c] for c in combo}
                rest = {c: t for c, t in heap.items() if c not in sub}
                va, ea = self.evx(store, sub, f.left)
                if va:
                    vb, eb = self.evx(store, rest, f.right)
                    if vb:
                        if ea and eb:
                            return (True, True)
                        inexact_true = True
                    elif not eb:
                        refutation_exact = False
                elif not ea:
                    vb, eb = self.evx(store, rest, f.right)
                    if vb or not eb:
                        refutation_exact = False
        if inexact_true:
            return (True, False)
        return (False, refutation_exact)

    def _wand(self, store: dict, heap: dict, f: S.Wand) -> Tuple[bool, bool]:
        if self.policy.mode == "forbid":
            raise WandForbiddenError("separating implication outside bounded mode")
        A, B = f.left, f.right
        lo_a, hi_a = _interval(A, store)
        if hi_a is not _INF and lo_a > hi_a:
            return (True, True)
        musts = _must_alloc(A, store)
        if any(l in heap for l in musts):
            return (True, True)

        fvars = sorted(f.vars)
        key = (
            f,
            self.policy.cell_bound,
            self.policy.fresh_locations,
            self.policy.macro_shortcuts,
            canonical_key(tuple(store[v] for v in fvars), heap),
        )
        hit = _WAND_MEMO.get(key)
        if hit is not None:
            return hit

        relevant = sorted(
            {store[v] for v in fvars} | set(heap) | set(heap.values())
        )
        fresh = fresh_locations(relevant, self.policy.fresh_locations)

        kmax = self.policy.cell_bound
        if hi_a is not _INF:
            kmax = min(kmax, hi_a)
        result = None
        neg_b = B.child if isinstance(B, S.Not) else S.Not(B)
        if isinstance(A, S.Truth):
            certs = _certificates(neg_b, store, relevant + fresh)
            if certs is not None:
                result = self._wand_by_certificates(store, heap, certs, kmax)
            else:
                need = _witness_need(neg_b)
                if need is not None:
                    kmax = min(kmax, need)
        if result is None:
            result = self._wand_scan(
                store, heap, A, neg_b, B, relevant, fresh, musts, kmax
            )
        _WAND_MEMO[key] = result
        return result

    def _wand_by_certificates(self, store, heap, certs, kmax):
        """true -* not(psi) where psi holds exactly on certificate supersets:
        refuted iff some certificate extends the heap within the bound."""
        for cert in certs:
            if any(heap.get(l, t) != t for l, t in cert.items()):
                continue
            extra = sum(1 for l in cert if l not in heap)
            if extra <= kmax:
                return (False, True)
        return (True, False)

    def _wand_scan(self, store, heap, A, neg_b, B, relevant, fresh, musts, kmax):
        lo_a, _ = _interval(A, store)
        banned_src = set(_must_not_alloc(A, store))
        banned_tgt = set(_must_not_target(A, store))

        # a counterexample extension must also make not-B hold on the union,
        # so constraints of not-B on the union prune the candidate space
        union_tgt_banned = _must_not_target(neg_b, store)
        if any(t in union_tgt_banned for t in heap.values()):
            return (True, True)
        banned_tgt |= union_tgt_banned
        forced_set = set(musts)
        for l in _must_alloc(neg_b, store):
            if l not in heap:
                forced_set.add(l)
        pinned: Dict[int, int] = {}
        pairs: list = []
        _next_eq_conjuncts(neg_b, pairs)
        for a_var, b_var in pairs:
            la, lb = store[a_var], store[b_var]
            in_a, in_b = la in heap, lb in heap
            if in_a and in_b:
                if heap[la] != heap[lb]:
                    return (True, True)
            elif in_a:
                pinned[lb] = heap[la]
            elif in_b:
                pinned[la] = heap[lb]
        for l, t in pinned.items():
            if l in banned_src or t in banned_tgt:
                return (True, True)
            forced_set.discard(l)
        if forced_set & banned_src:
            return (True, True)

        forced = sorted(forced_set)
        rank = {l: i for i, l in enumerate(fresh)}
        optional = [
            l
            for l in relevant
            if l not in heap
            and l not in banned_src
            and l not in forced_set
            and l not in pinned
        ] + fresh
        targets_rel = [l for l in relevant if l not in banned_tgt]
        inexact_counter = False
        empty_exact = None
        kmin = max(lo_a, len(forced) + len(pinned), 0)

        def assign_targets(pending, used, acc):
            if not pending:
                yield acc, used
                return
            s = pending[0]
            tcap = min(used + 1, len(fresh))
            for t in targets_rel + fresh[:tcap]:
                if t in banned_tgt:
                    continue
                rt = rank.get(t)
                u2 = used + 1 if (rt is not None and rt == used) else used
                acc[s] = t
                yield from assign_targets(pending[1:], u2, acc)
                del acc[s]

        def candidates(start, remaining, used, acc):
            if remaining == 0:
                yield acc
                return
            for i in range(start, len(optional)):
                s = optional[i]
                r = rank.get(s)
                if r is None or r < used:
                    u1 = used
                elif r == used:
                    u1 = used + 1
                else:
                    continue
                tcap = min(u1 + 1, len(fresh))
                for t in targets_rel + fresh[:tcap]:
                    rt = rank.get(t)
                    u2 = u1 + 1 if (rt is not None and rt == u1) else u1
                    acc[s] = t
                    yield from candidates(i + 1, remaining - 1, u2, acc)
                    del acc[s]

        def all_candidates(k):
            for base, used in assign_targets(forced, 0, dict(pinned)):
                extra = k - len(forced) - len(pinned)
                if extra == 0:
                    yield base
                else:
                    yield from candidates(0, extra, used, base)

        for k in range(kmin, kmax + 1):
            if k > len(optional) + len(forced) + len(pinned):
                break
            for h1 in ([{}] if k == 0 and not pinned and not forced else all_candidates(k)):
                va, ea = self.evx(store, dict(h1), A)
                if not va:
                    continue
                union = dict(heap)
                union.update(h1)
                vb, eb = self.evx(store, union, B)
                if k == 0:
                    empty_exact = eb
                if vb:
                    continue
                if ea and eb:
                    return (False, True)
                inexact_counter = True
        if inexact_counter:
            return (False, False)
        if kmin == 0 and kmax == 0:
            return (True, bool(empty_exact))
        return (True, False)


def check(m: MemoryState, f: S.Formula, policy: WandPolicy = WandPolicy()) -> CheckResult:
    """Evaluate f on m; exact on wand-free formulae, bounded-witness on -*."""
    if f.vars and max(f.vars) > m.q:
        raise ValueError(f"formula mentions x{max(f.vars)} but q = {m.q}")
    if policy.mode == "forbid" and not f.wand_free:
        raise WandForbiddenError("formula contains -* but policy forbids it")
    ev = _Evaluator(policy)
    truth, exact = ev.evx(m.store, dict(m.heap.cells), f)
    return CheckResult(truth, exact)


def check_exact(m: MemoryState, f: S.Formula) -> bool:
    """Exact semantics; the formula must be -*-free (after macro expansion)."""
    if not f.wand_free:
        raise WandForbiddenError("check_exact requires a -*-free formula")
    if f.vars and max(f.vars) > m.q:
        raise ValueError(f"formula mentions x{max(f.vars)} but q = {m.q}")
    ev = _Evaluator(FORBID)
    return ev.ev(m.store, dict(m.heap.cells), f)


def sl_star_wand_bound(f: S.Formula) -> int:
    """A cell bound making bounded -* checking complete on SL(*,-*)."""
    from .syntax import in_sl_star_wand

    if not in_sl_star_wand(f):
        raise ValueError("formula is outside SL(*,-*)")
    return 2 * f.size
