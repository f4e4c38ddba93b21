"""Branched covers of the sphere with single-cycle branch data.

Branch data here is a multiset of orders (n_1 <= ... <= n_k); branch point
of order n means a single (n+1)-cycle in the monodromy, partition
[n+1, 1, ..., 1].  Realizability for this shape is decided by a parity and
a Riemann-Hurwitz inequality, and witnessed constructively by an induction
on k that bottoms out in a three-cycle solver (induction on the degree).

Permutations act on {0, ..., d-1}; products are function composition read
left to right in the usual operator order: (p * q)(x) = p(q(x)).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations as iter_permutations

from .core import BranchData, PermElement, perm_identity


class HurwitzError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small permutation helpers
# ---------------------------------------------------------------------------

def cycle_perm(d: int, seq) -> PermElement:
    """Cycle mapping seq[0] -> seq[1] -> ... -> seq[-1] -> seq[0]."""
    img = list(range(d))
    seq = list(seq)
    for a, b in zip(seq, seq[1:] + seq[:1]):
        img[a] = b
    return PermElement(img)


def _single_cycle_order(p: PermElement) -> int | None:
    """n if p is a single (n+1)-cycle (n >= 1), 0 for identity, else None."""
    cycles = p.cycles()
    if not cycles:
        return 0
    if len(cycles) == 1:
        return len(cycles[0]) - 1
    return None


def _support(p: PermElement):
    return {i for i, v in enumerate(p) if v != i}


def _transitive(perms, d: int) -> bool:
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for i, v in enumerate(p):
            ri, rv = find(i), find(v)
            if ri != rv:
                parent[ri] = rv
    return len({find(i) for i in range(d)}) == 1


def _extend(p: PermElement, d: int) -> PermElement:
    """View a permutation of a smaller degree inside S_d."""
    return PermElement(list(p) + list(range(len(p), d)))


def _conjugate(g: PermElement, p: PermElement) -> PermElement:
    """g p g^-1."""
    return g * p * g.inverse()


def _transposition(d: int, a: int, b: int) -> PermElement:
    img = list(range(d))
    img[a], img[b] = b, a
    return PermElement(img)


# ---------------------------------------------------------------------------
# decision
# ---------------------------------------------------------------------------

def _check_pre(d: int, bd: BranchData):
    if d < 2:
        raise HurwitzError("degree must be at least 2")
    if any(n >= d for n in bd):
        raise HurwitzError("cycle length n_i + 1 cannot exceed the degree")


def realizable(d: int, bd: BranchData | tuple) -> bool:
    """Parity + Riemann-Hurwitz characterization for single-cycle data."""
    bd = bd if isinstance(bd, BranchData) else BranchData(bd)
    _check_pre(d, bd)
    v = bd.total
    return v % 2 == 0 and v >= 2 * d - 2


# ---------------------------------------------------------------------------
# three-cycle solver (induction on the degree)
# ---------------------------------------------------------------------------

def _swap_adjacent(perms: list, i: int):
    """Swap slots i, i+1 preserving the left-to-right product and types:
    (p, q) -> (q, q^-1 p q)."""
    p, q = perms[i], perms[i + 1]
    perms[i] = q
    perms[i + 1] = q.inverse() * p * q


def _prodcycle_sorted(d: int, ns: tuple) -> list:
    """Solve for descending-sorted ns = (n1 >= n2 >= n3), zeros allowed.

    Returns [a1, a2, a3] with a1*a2*a3 = id, a_i a single (ns[i]+1)-cycle,
    jointly transitive on {0..d-1}.
    """
    n1, n2, n3 = ns
    assert n1 >= n2 >= n3 >= 0
    if n1 == 0:
        if d != 1:
            raise HurwitzError("identity data is transitive only in degree 1")
        e = perm_identity(1)
        return [e, e, e]
    if n1 == n2 == n3 == d - 1:
        if d % 2 == 0:
            raise HurwitzError("all-maximal data needs odd degree")
        c = cycle_perm(d, range(d))
        return [c, c, (c * c).inverse()]
    # shrink the two largest entries and recurse in degree d-1
    vals = (n1 - 1, n2 - 1, n3)
    sub = sorted(vals, reverse=True)
    arranged = list(_prodcycle_sorted(d - 1, tuple(sub)))
    # bring the sub-solution back to the order (n1-1, n2-1, n3)
    # by bubble swaps so cycle types line up with vals
    want = list(vals)
    have = list(sub)
    for pos in range(3):
        j = next(
            jj for jj in range(pos, 3) if have[jj] == want[pos]
        )
        while j > pos:
            _swap_adjacent(arranged, j - 1)
            have[j - 1], have[j] = have[j], have[j - 1]
            j -= 1
    a1s, a2s, a3s = (_extend(p, d) for p in arranged)
    # ensure point d-2 lies in the supports that take part in the splice
    s1, s2 = _support(a1s), _support(a2s)
    if s1 and s2:
        common = sorted(s1 & s2)
        if not common:
            raise AssertionError("cycle product forces a common support point")
        x = common[0]
    elif s1 or s2:
        x = sorted(s1 or s2)[0]
    else:
        x = None  # both shrunk cycles trivial; the bare transposition works
    if x is not None and x != d - 2:
        g = _transposition(d, x, d - 2)
        a1s, a2s, a3s = (_conjugate(g, p) for p in (a1s, a2s, a3s))
    t = _transposition(d, d - 2, d - 1)
    a1 = a1s * t
    a2 = t * a2s
    out = [a1, a2, a3s]
    # restore requested order (n1, n2, n3)
    prod = out[0] * out[1] * out[2]
    assert prod.is_identity()
    return out


def _prodcycle(d: int, ns: tuple) -> list:
    """Solve the three-cycle problem for ns in the given (arbitrary) order."""
    order = sorted(range(3), key=lambda j: (-ns[j], j))
    sorted_ns = tuple(ns[j] for j in order)
    sol = _prodcycle_sorted(d, sorted_ns)
    # sol is aligned with sorted_ns; permute slots back by adjacent swaps
    cur = list(order)  # cur[slot] = original index held in that slot
    for target_slot in range(3):
        j = cur.index(target_slot)
        while j > target_slot:
            _swap_adjacent(sol, j - 1)
            cur[j - 1], cur[j] = cur[j], cur[j - 1]
            j -= 1
    return sol


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PermTuple:
    degree: int
    perms: tuple
    declared_orders: BranchData

    def __iter__(self):
        return iter(self.perms)


def verify_cert(t: PermTuple) -> dict:
    """Check the three invariants and return the covering genus."""
    errors = []
    d = t.degree
    if len(t.perms) != t.declared_orders.k:
        raise HurwitzError("permutation count does not match branch data")
    orders = []
    for p, n in zip(t.perms, t.declared_orders):
        got = _single_cycle_order(p)
        orders.append(got)
        if got != n:
            errors.append(f"expected a single ({n + 1})-cycle, got {p.cycles()}")
    prod = perm_identity(d)
    for p in t.perms:
        prod = prod * p
    if not prod.is_identity():
        errors.append("product is not the identity")
    if not _transitive(t.perms, d):
        errors.append("not transitive")
    if errors:
        raise HurwitzError("; ".join(errors))
    v = t.declared_orders.total
    chi = 2 * d - v
    if chi % 2 != 0:
        raise HurwitzError("odd Euler characteristic")
    return {"genus": (2 - chi) // 2}


# ---------------------------------------------------------------------------
# constructive realization
# ---------------------------------------------------------------------------

def _realize_list(d: int, ns: list) -> list:
    """ns sorted ascending (zeros may appear in recursive calls); returns
    a permutation list aligned with ns."""
    k = len(ns)
    if k == 2:
        # two single cycles multiplying to the identity are inverse d-cycles
        assert ns[0] == ns[1] == d - 1
        c = cycle_perm(d, range(d))
        return [c, c.inverse()]
    if k == 3:
        return _prodcycle(d, tuple(ns))
    n1, n2 = ns[0], ns[1]
    if n1 + n2 <= d - 1:
        merged = n1 + n2
        r = merged
    else:
        # merge into a d-cycle if parity allows, else a (d-1)-cycle
        r = d - 1 if (n1 + n2 + d - 1) % 2 == 0 else d - 2
    # permutations a (n1+1)-cycle, b (n2+1)-cycle with a*b a single
    # (r+1)-cycle; obtained from the three-cycle solver
    a, b, c3 = _prodcycle(d if n1 + n2 > d - 1 else r + 1, (n1, n2, r))
    a, b = _extend(a, d), _extend(b, d)
    ab = a * b
    rest = sorted(ns[2:] + [r])
    slot = rest.index(r)
    sub = _realize_list(d, rest)
    # bubble the merged cycle to the front; each swap (p, q) -> (q, q^-1 p q)
    # preserves the product and the cycle types of the remaining slots
    while slot > 0:
        _swap_adjacent(sub, slot - 1)
        slot -= 1
    sigma = sub[0]
    # conjugate (a, b) so that a*b becomes sigma
    ab_cycle = max(ab.cycles(), key=len) if ab.cycles() else ()
    sigma_cycle = max(sigma.cycles(), key=len) if sigma.cycles() else ()
    img = list(range(d))
    for x, y in zip(ab_cycle, sigma_cycle):
        img[x] = y
    rest_src = sorted(set(range(d)) - set(ab_cycle))
    rest_dst = sorted(set(range(d)) - set(sigma_cycle))
    for x, y in zip(rest_src, rest_dst):
        img[x] = y
    gamma = PermElement(img)
    a1 = _conjugate(gamma, a)
    a2 = _conjugate(gamma, b)
    out = [a1, a2] + sub[1:]
    # out is aligned with [n1, n2] + (rest with the merged entry removed),
    # and the latter is exactly ns[2:]
    assert rest[:rest.index(r)] + rest[rest.index(r) + 1:] == ns[2:]
    return out


def realize(d: int, bd: BranchData | tuple) -> PermTuple:
    bd = bd if isinstance(bd, BranchData) else BranchData(bd)
    if d == 1 and bd.k == 0:
        # trivial unbranched cover of the sphere by itself
        t = PermTuple(1, (), bd)
        verify_cert(t)
        return t
    if not realizable(d, bd):
        raise HurwitzError(f"data {bd.orders} is not realizable in degree {d}")
    perms = _realize_list(d, list(bd.orders))
    t = PermTuple(d, tuple(perms), bd)
    verify_cert(t)
    return t


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def _all_cycles(d: int, length: int):
    """Every cycle of the given length in S_d, as permutations."""
    for supp in combinations(range(d), length):
        first = supp[0]
        for rest in iter_permutations(supp[1:]):
            yield cycle_perm(d, (first,) + rest)


def brute_force_realizable(d: int, bd: BranchData | tuple) -> bool:
    bd = bd if isinstance(bd, BranchData) else BranchData(bd)
    _check_pre(d, bd)
    if d > 7 or bd.k > 5:
        raise HurwitzError("oracle range is d <= 7, k <= 5")
    ns = bd.orders
    k = len(ns)
    if k == 0:
        return False  # degree >= 2 and no branching cannot be transitive
    if k == 1:
        return False  # a single nontrivial cycle is never the identity
    # fix the first cycle up to simultaneous conjugation
    first = cycle_perm(d, range(ns[0] + 1))
    middles = [list(_all_cycles(d, n + 1)) for n in ns[1:-1]]

    def rec(i: int, prefix_prod, chosen):
        if i == len(middles):
            last = prefix_prod.inverse()
            if _single_cycle_order(last) != ns[-1]:
                return False
            return _transitive(chosen + [last], d)
        for cyc in middles[i]:
            if rec(i + 1, prefix_prod * cyc, chosen + [cyc]):
                return True
        return False

    return rec(0, first, [first])


# ---------------------------------------------------------------------------
# covers of prescribed genus
# ---------------------------------------------------------------------------

def realizable_cover(g: int, bd: BranchData | tuple) -> int | None:
    """The unique candidate degree of a genus-g branched cover of the
    sphere with the given single-cycle branch data, or None."""
    bd = bd if isinstance(bd, BranchData) else BranchData(bd)
    if g < 0:
        raise HurwitzError("genus must be nonnegative")
    v = bd.total
    if v % 2 != 0:
        return None
    d = v // 2 - g + 1
    if d < 1:
        return None
    if bd.max > d - 1:
        return None
    return d
