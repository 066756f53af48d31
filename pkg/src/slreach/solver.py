"""Satisfiability for the decidable fragments, plus a brute-force oracle.

The reach+ fragment is decided against the canonical small-state space: every
state is equivalent (at rank alpha = memory size of the query) to one whose
heap consists of paths of at most alpha intermediate cells between at most
q^2 + q labelled locations, a remainder block of at most alpha cells pointing
at one sink, and dangling labelled cells pointing at one dump location.
Enumerating exactly those states, deduplicated by literal profile, covers
every satisfiability class; any model found lies within the small-heap bound
(q^2+q)(n+1)+n.  Enumeration ascends by cell count, so returned models are
cell-minimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterator, List, Optional, Tuple

from . import syntax as S
from .heaps import Heap, MemoryState, extensions
from .semantics import WandPolicy, check, check_exact, sl_star_wand_bound
from .syntax import msize, rewrite_reach
from .testform import profile


class FragmentError(ValueError):
    pass


@dataclass(frozen=True)
class SatResult:
    status: str  # "sat" | "unsat" | "unknown"
    model: Optional[MemoryState] = None
    explored: int = 0

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


# ---------------------------------------------------------------------------
# Canonical small-state space.
# ---------------------------------------------------------------------------

def _store_patterns(q: int) -> Iterator[Tuple[int, ...]]:
    """Restricted-growth strings: which vertex each variable shares."""

    def rec(prefix: List[int], mx: int):
        if len(prefix) == q:
            yield tuple(prefix)
            return
        for v in range(mx + 2):
            yield from rec(prefix + [v], max(mx, v))

    yield from rec([], -1)


_NO_SUCC = ("none",)
_DUMP = ("dump",)


def _shape_descriptors(q: int, alpha: int) -> List[tuple]:
    """(pattern, succ, rem, cells) tuples describing every canonical shape."""
    out = []
    meets_max = q * q - q
    for pattern in _store_patterns(q):
        n_store = max(pattern) + 1
        for n_extra in range(meets_max + 1):
            nv = n_store + n_extra
            extras = range(n_store, nv)
            options = [_NO_SUCC, _DUMP]
            options += [("edge", t, k) for t in range(nv) for k in range(alpha + 1)]
            for succ in product(options, repeat=nv):
                indeg: Dict[int, int] = {}
                for sc in succ:
                    if sc[0] == "edge":
                        indeg[sc[1]] = indeg.get(sc[1], 0) + 1
                # real meet-points need two incoming compressed edges and a
                # path to some variable vertex; other extra configurations
                # only duplicate profiles already covered without extras
                ok = True
                for e in extras:
                    if indeg.get(e, 0) < 2:
                        ok = False
                        break
                    cur, seen = e, set()
                    while cur not in seen:
                        seen.add(cur)
                        if cur < n_store:
                            break
                        sc = succ[cur]
                        if sc[0] != "edge":
                            break
                        cur = sc[1]
                    else:
                        cur = -1
                    if cur >= n_store or cur == -1:
                        ok = False
                        break
                if not ok:
                    continue
                base = sum(
                    0 if sc[0] == "none" else (1 if sc[0] == "dump" else 1 + sc[2])
                    for sc in succ
                )
                for rem in range(alpha + 1):
                    out.append((pattern, succ, rem, base + rem))
    out.sort(key=lambda d: (d[3], d[:3]))
    return out


def _materialize(q: int, desc: tuple) -> MemoryState:
    pattern, succ, rem, _ = desc
    nv = len(succ)
    nxt = nv
    heap: Dict[int, int] = {}
    dump = None
    for v, sc in enumerate(succ):
        if sc[0] == "none":
            continue
        if sc[0] == "dump":
            if dump is None:
                dump = nxt
                nxt += 1
            heap[v] = dump
        else:
            _, tgt, k = sc
            cur = v
            for _ in range(k):
                heap[cur] = nxt
                cur = nxt
                nxt += 1
            heap[cur] = tgt
    if rem:
        sink = nxt + rem
        for _ in range(rem):
            heap[nxt] = sink
            nxt += 1
        nxt += 1
    store = {i + 1: pattern[i] for i in range(q)}
    return MemoryState(q, store, Heap(heap))


class _RepCache:
    """Profile representatives of the canonical space, ascending by cells."""

    def __init__(self, q: int, alpha: int):
        self.q = q
        self.alpha = alpha
        self.reps: List[MemoryState] = []
        self._seen = set()
        self._descs = None
        self._pos = 0

    def __iter__(self) -> Iterator[MemoryState]:
        i = 0
        while True:
            while i >= len(self.reps) and not self._exhausted():
                self._advance()
            if i >= len(self.reps):
                return
            yield self.reps[i]
            i += 1

    def _exhausted(self) -> bool:
        return self._descs is not None and self._pos >= len(self._descs)

    def _advance(self, chunk: int = 256):
        if self._descs is None:
            self._descs = _shape_descriptors(self.q, self.alpha)
        end = min(self._pos + chunk, len(self._descs))
        while self._pos < end:
            m = _materialize(self.q, self._descs[self._pos])
            self._pos += 1
            key = hash_profile(profile(m, self.alpha))
            if key not in self._seen:
                self._seen.add(key)
                self.reps.append(m)


def hash_profile(p) -> bytes:
    import hashlib

    text = "\n".join(sorted(str(a) for a in p.satisfied))
    return hashlib.md5(f"{p.q}|{p.alpha}|{text}".encode()).digest()


_REP_CACHES: Dict[Tuple[int, int], _RepCache] = {}


def canonical_states(q: int, alpha: int) -> _RepCache:
    key = (q, alpha)
    if key not in _REP_CACHES:
        _REP_CACHES[key] = _RepCache(q, alpha)
    return _REP_CACHES[key]


# ---------------------------------------------------------------------------
# Fragment solvers.
# ---------------------------------------------------------------------------

def _formula_q(f: S.Formula) -> int:
    return max(f.vars) if f.vars else 1


def sat_reachplus(f: S.Formula) -> SatResult:
    """Satisfiability for SL(*, reach+) via the canonical small-state space;
    sat models are re-checked and lie within the small-heap bound."""
    if not S.strictly_in_sl_star_reachplus(f):
        raise FragmentError(
            "sat_reachplus expects a wand-free formula without ls/reach atoms "
            "(apply rewrite_reach first)"
        )
    q = _formula_q(f)
    alpha = msize(f)
    explored = 0
    for m in canonical_states(q, alpha):
        explored += 1
        if check_exact(m, f):
            assert check_exact(m, f)
            return SatResult("sat", m, explored)
    return SatResult("unsat", None, explored)


def shf_rewrite(f: S.Formula) -> S.Formula:
    """The satisfaction-preserving rewrite into SL(*, reach+): exact
    points-to is already the conjunction with size = 1; list segments become
    the empty/loop-free reach+ disjunction."""

    def go(g: S.Formula) -> S.Formula:
        if isinstance(g, S.Ls):
            x, y = g.x, g.y
            return S.f_or(
                S.And(S.Eq(x, y), S.EMP),
                S.f_and(
                    S.Not(S.Eq(x, y)),
                    S.ReachPlus(x, y),
                    S.Not(S.Star(S.Not(S.EMP), S.ReachPlus(x, y))),
                ),
            )
        if isinstance(g, S.Not):
            return S.Not(go(g.child))
        if isinstance(g, S.And):
            return S.And(go(g.left), go(g.right))
        if isinstance(g, S.Star):
            return S.Star(go(g.left), go(g.right))
        if isinstance(g, S.Wand):
            return S.Wand(go(g.left), go(g.right))
        return g

    return go(f)


def sat_bool_shf(f: S.Formula) -> SatResult:
    """Satisfiability for Boolean combinations of symbolic-heap formulae."""
    if not S.in_bool_shf(f):
        raise FragmentError("formula is not a Boolean combination of symbolic heaps")
    return sat_reachplus(shf_rewrite(f))


def _boolcomb_parts(f: S.Formula, out: List[S.Formula]):
    if S.in_sl_star_wand(f) or S.strictly_in_sl_star_reachplus(f):
        out.append(f)
        return True
    if isinstance(f, S.Not):
        return _boolcomb_parts(f.child, out)
    if isinstance(f, S.And):
        return _boolcomb_parts(f.left, out) and _boolcomb_parts(f.right, out)
    return False


def sat_boolcomb(f: S.Formula) -> SatResult:
    """Satisfiability for Boolean combinations of SL(*,-*) and SL(*,reach+)
    formulae: sweep the canonical space at a rank covering every maximal
    part (2|part| for wand parts, msize for reach+ parts), evaluating wand
    parts with the complete bounded-wand budget."""
    parts: List[S.Formula] = []
    if not _boolcomb_parts(f, parts):
        raise FragmentError(
            "formula is not a Boolean combination of SL(*,-*) and SL(*,reach+)"
        )
    alpha = 1
    wand_bound = 0
    for p in parts:
        if p.wand_free:
            alpha = max(alpha, msize(p))
        else:
            b = sl_star_wand_bound(p)
            alpha = max(alpha, b)
            wand_bound = max(wand_bound, b)
    q = _formula_q(f)
    policy = WandPolicy("bounded", wand_bound or 1, max(wand_bound, 1))
    explored = 0
    for m in canonical_states(q, alpha):
        explored += 1
        if check(m, f, policy).truth:
            return SatResult("sat", m, explored)
    return SatResult("unsat", None, explored)


def sat(f: S.Formula, fragment: str = "auto") -> SatResult:
    """Dispatch on fragment; "auto" tries reach+ (after rewriting), then the
    Boolean-combination procedure."""
    if fragment == "reachplus":
        return sat_reachplus(f)
    if fragment == "boolshf":
        return sat_bool_shf(f)
    if fragment == "boolcomb":
        return sat_boolcomb(f)
    if fragment != "auto":
        raise ValueError(f"unknown fragment {fragment!r}")
    if f.wand_free:
        return sat_reachplus(rewrite_reach(f, "reachplus"))
    try:
        rewritten = rewrite_reach(f, "reachplus")
    except ValueError:
        rewritten = f
    return sat_boolcomb(rewritten)


def entails(f: S.Formula, g: S.Formula) -> bool:
    """f entails g iff f /\\ not g is unsatisfiable."""
    res = counterexample(f, g)
    return res is None


def counterexample(f: S.Formula, g: S.Formula) -> Optional[MemoryState]:
    """A state satisfying f but not g, or None when the entailment holds."""
    query = S.And(f, S.Not(g))
    res = sat(query)
    if res.status == "sat":
        return res.model
    if res.status == "unsat":
        return None
    raise FragmentError("entailment query fell outside the decided fragments")


def brute_sat(
    f: S.Formula,
    max_cells: int,
    max_locs: int,
    policy: WandPolicy = WandPolicy(),
) -> SatResult:
    """Reference oracle: exhaustively try every store and every heap over
    locations 0..max_locs-1 with at most max_cells cells."""
    q = _formula_q(f)
    used_vars = sorted(f.vars) or [1]
    locs = list(range(max_locs))
    explored = 0
    for store_vals in product(locs, repeat=len(used_vars)):
        store = {i: 0 for i in range(1, q + 1)}
        store.update(dict(zip(used_vars, store_vals)))
        for h in extensions(Heap(), locs, max_cells):
            explored += 1
            m = MemoryState(q, store, h)
            if f.wand_free:
                ok = check_exact(m, f)
            else:
                ok = check(m, f, policy).truth
            if ok:
                return SatResult("sat", m, explored)
    return SatResult("unknown", None, explored)
