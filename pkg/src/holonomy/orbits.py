"""Mapping-class action on representation tuples and orbit enumeration.

The action of the (orientation-preserving) mapping class group on tuples
(rho(a_1), rho(b_1), ..., rho(a_g), rho(b_g)) is generated by an explicit
finite move set acting by tuple formulas:

* ``TwistA(i)``   : b_i -> b_i a_i          (twist along a_i)
* ``TwistB(i)``   : a_i -> a_i b_i          (twist along b_i)
* ``InvertHandle(i)`` : (a_i, b_i) -> (b_i^-1, b_i a_i b_i^-1)
* ``SwapHandles(i, i+1)`` : handles exchanged up to a commutator conjugation
* ``CrossTwist(i)``  : twist along a curve crossing handles i and i+1

Each move fixes the surface relator as a word in the free group, so it acts
on representation tuples of arbitrary targets.  Orbits over a finite target
group are enumerated by meet-in-the-middle relator bucketing followed by a
BFS over conjugacy-canonical tuples; sufficiency of the move set is
certified by the expected orbit counts (any excess count raises).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    DihedralElement,
    SurfaceRep,
    compose,
    identity_for,
    invert,
)

# ---------------------------------------------------------------------------
# moves
# ---------------------------------------------------------------------------

_KINDS = ("TwistA", "TwistB", "CrossTwist", "SwapHandles", "InvertHandle")

# images of (a_i, b_i, a_{i+1}, b_{i+1}) under the cross twist, as words in
# the letters 1=a_i, 2=b_i, 3=a_{i+1}, 4=b_{i+1} (negative = inverse);
# the formula fixes [a_i,b_i][a_{i+1},b_{i+1}] exactly as a free word
_CROSS_FWD = {
    1: (-2, 3, -4, -3, 2, 1),
    2: (2,),
    3: (3, -4, -3, 2, 1, -2, -1, -2, 3),
    4: (4,),
}
_CROSS_INV = {
    1: (1, 2, -1, -2, 3, 4, -3, 2, 1, -2),
    2: (2,),
    3: (2, 1, 2, -1, -2, 3, 4),
    4: (4,),
}


@dataclass(frozen=True)
class MCGMove:
    kind: str
    i: int
    j: int | None = None
    power: int = 1

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown move kind {self.kind!r}")
        if self.kind == "SwapHandles" and self.j is None:
            object.__setattr__(self, "j", self.i + 1)

    def inverse(self) -> "MCGMove":
        if self.kind == "SwapHandles":
            return MCGMove(self.kind, self.i, self.j, -self.power)
        return MCGMove(self.kind, self.i, self.j, -self.power)


def standard_moves(g: int):
    """The generating move family used for orbit BFS at genus g."""
    out = []
    for i in range(1, g + 1):
        out.append(MCGMove("TwistA", i))
        out.append(MCGMove("TwistB", i))
        out.append(MCGMove("InvertHandle", i))
    for i in range(1, g):
        out.append(MCGMove("SwapHandles", i, i + 1))
        out.append(MCGMove("CrossTwist", i))
        out.append(MCGMove("CrossTwist", i, power=-1))
    return out


def _word_eval(word, letters, mul, inv, ident):
    acc = ident
    for x in word:
        e = letters[abs(x) - 1]
        acc = mul(acc, e if x > 0 else inv(e))
    return acc


def _pow(e, k, mul, inv, ident):
    if k < 0:
        e, k = inv(e), -k
    acc = ident
    for _ in range(k):
        acc = mul(acc, e)
    return acc


def _apply_images(images, g, move: MCGMove, mul, inv, ident):
    """Apply a move to a list of 2g images under abstract group operations."""
    images = list(images)
    i = move.i
    if not 1 <= i <= g:
        raise IndexError(f"handle index {i} out of range for genus {g}")
    ai, bi = 2 * (i - 1), 2 * (i - 1) + 1

    if move.kind == "TwistA":
        images[bi] = mul(images[bi], _pow(images[ai], move.power, mul, inv, ident))
        return images
    if move.kind == "TwistB":
        images[ai] = mul(images[ai], _pow(images[bi], move.power, mul, inv, ident))
        return images
    if move.kind == "InvertHandle":
        for _ in range(abs(move.power)):
            a, b = images[ai], images[bi]
            if move.power >= 0:
                images[ai] = inv(b)
                images[bi] = mul(mul(b, a), inv(b))
            else:
                images[ai] = mul(mul(a, b), inv(a))
                images[bi] = inv(a)
        return images
    if move.kind == "SwapHandles":
        j = move.j
        if j != i + 1:
            raise IndexError("SwapHandles acts on adjacent handles")
        if not 1 <= j <= g:
            raise IndexError(f"handle index {j} out of range for genus {g}")
        aj, bj = 2 * (j - 1), 2 * (j - 1) + 1
        for _ in range(abs(move.power)):
            A, B = images[ai], images[bi]
            C, D = images[aj], images[bj]
            if move.power >= 0:
                c = mul(mul(mul(C, D), inv(C)), inv(D))
                images[ai], images[bi] = C, D
                images[aj] = mul(mul(inv(c), A), c)
                images[bj] = mul(mul(inv(c), B), c)
            else:
                c = mul(mul(mul(A, B), inv(A)), inv(B))
                images[ai] = mul(mul(c, C), inv(c))
                images[bi] = mul(mul(c, D), inv(c))
                images[aj], images[bj] = A, B
        return images
    if move.kind == "CrossTwist":
        if i + 1 > g:
            raise IndexError(f"cross twist needs handle {i + 1}, genus is {g}")
        aj, bj = 2 * i, 2 * i + 1
        word_map = _CROSS_FWD if move.power >= 0 else _CROSS_INV
        for _ in range(abs(move.power)):
            letters = [images[ai], images[bi], images[aj], images[bj]]
            new = {
                s: _word_eval(word_map[s], letters, mul, inv, ident)
                for s in (1, 2, 3, 4)
            }
            images[ai], images[bi] = new[1], new[2]
            images[aj], images[bj] = new[3], new[4]
        return images
    raise ValueError(f"unknown move kind {move.kind!r}")  # pragma: no cover


def apply_move(rep: SurfaceRep, move: MCGMove) -> SurfaceRep:
    """Act on a representation by a mapping-class move."""
    ident = identity_for(rep.target_tag, rep.exact)
    images = _apply_images(
        rep.images, rep.genus, move, compose, invert, ident
    )
    return rep.with_images(images)


def apply_moves(rep: SurfaceRep, moves) -> SurfaceRep:
    for m in moves:
        rep = apply_move(rep, m)
    return rep


# ---------------------------------------------------------------------------
# finite target groups, realized as rotation groups
#
# Every target is a finite subgroup of SO(3); elements carry a unit
# quaternion lift (one of the two preimages in SU(2)), which makes the
# lifting obstruction sw computable as the sign of a commutator product.
# ---------------------------------------------------------------------------

_QTOL = 1e-7


def _qmul(p, q):
    a, b, c, d = p
    e, f, g, h = q
    return (
        a * e - b * f - c * g - d * h,
        a * f + b * e + c * h - d * g,
        a * g - b * h + c * e + d * f,
        a * h + b * g - c * f + d * e,
    )


def _qconj(q):
    return (q[0], -q[1], -q[2], -q[3])


def _qcanon(q):
    """Canonical representative of {q, -q}: first nonzero coordinate > 0."""
    for v in q:
        if abs(v) > _QTOL:
            return q if v > 0 else tuple(-x for x in q)
    raise ValueError("zero quaternion")


def _qkey(q):
    return tuple(round(v, 6) for v in _qcanon(q))


class FiniteGroup:
    """Finite rotation group with integer multiplication tables.

    Element 0 is the identity.  ``lift[k]`` is a unit quaternion covering
    element k in SU(2) -> SO(3).
    """

    def __init__(self, tag, mul, inv, lift):
        self.tag = tag
        self.order = len(inv)
        self.mul = mul
        self.inv = inv
        self.lift = lift
        self.is_abelian = all(
            mul[a][b] == mul[b][a]
            for a in range(self.order)
            for b in range(self.order)
        )
        # conj[c][g] = c g c^-1
        self.conj = np.array(
            [
                [mul[mul[c][g]][inv[c]] for g in range(self.order)]
                for c in range(self.order)
            ],
            dtype=np.int64,
        )
        self.mul_np = np.array(mul, dtype=np.int64)

    def comm(self, a, b):
        m, v = self.mul, self.inv
        return m[m[m[a][b]][v[a]]][v[b]]

    def closure(self, seed):
        """Subgroup generated by the given element indices."""
        seen = {0}
        frontier = [0]
        gens = [s for s in seed]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = self.mul[x][s]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)


def _group_from_quaternions(tag, gens):
    """Build the rotation group generated by unit quaternions (mod +-1)."""
    ident = (1.0, 0.0, 0.0, 0.0)
    elems = {_qkey(ident): _qcanon(ident)}
    frontier = [_qcanon(ident)]
    while frontier:
        nxt = []
        for q in frontier:
            for s in gens:
                r = _qcanon(_qmul(q, s))
                k = _qkey(r)
                if k not in elems:
                    elems[k] = r
                    nxt.append(r)
        frontier = nxt
    keys = sorted(elems)
    ident_key = _qkey(ident)
    keys.remove(ident_key)
    keys.insert(0, ident_key)
    index = {k: i for i, k in enumerate(keys)}
    lift = [elems[k] for k in keys]
    n = len(keys)
    mul = [[index[_qkey(_qmul(lift[a], lift[b]))] for b in range(n)] for a in range(n)]
    inv = [index[_qkey(_qconj(lift[a]))] for a in range(n)]
    return FiniteGroup(tag, mul, inv, lift)


def cyclic_group(n: int) -> FiniteGroup:
    mul = [[(a + b) % n for b in range(n)] for a in range(n)]
    inv = [(-a) % n for a in range(n)]
    lift = [
        (math.cos(math.pi * k / n), 0.0, 0.0, math.sin(math.pi * k / n))
        for k in range(n)
    ]
    return FiniteGroup(f"Z{n}", mul, inv, lift)


def dihedral_group(n: int) -> FiniteGroup:
    """Dihedral group of order 2n; index = flip * n + rot."""

    def el(idx):
        return DihedralElement(n, idx % n, idx // n)

    def ix(e):
        return e.flip * n + e.rot

    m = 2 * n
    mul = [[ix(el(a) * el(b)) for b in range(m)] for a in range(m)]
    inv = [ix(el(a).inverse()) for a in range(m)]
    flip_q = (0.0, 1.0, 0.0, 0.0)  # half-turn about the x-axis
    lift = []
    for idx in range(m):
        rot_q = (
            math.cos(math.pi * (idx % n) / n),
            0.0,
            0.0,
            math.sin(math.pi * (idx % n) / n),
        )
        # element (rot=k, flip=1) is r^k s under the composition law
        lift.append(_qmul(rot_q, flip_q) if idx >= n else rot_q)
    return FiniteGroup(f"D{n}", mul, inv, lift)


def tetrahedral_group() -> FiniteGroup:
    g = _group_from_quaternions(
        "A4", [(0.0, 1.0, 0.0, 0.0), (0.5, 0.5, 0.5, 0.5)]
    )
    assert g.order == 12
    return g


def octahedral_group() -> FiniteGroup:
    s = math.sqrt(0.5)
    g = _group_from_quaternions(
        "S4", [(0.0, 1.0, 0.0, 0.0), (0.5, 0.5, 0.5, 0.5), (s, 0.0, 0.0, s)]
    )
    assert g.order == 24
    return g


def icosahedral_group() -> FiniteGroup:
    phi = (1 + math.sqrt(5)) / 2
    g = _group_from_quaternions(
        "A5", [(0.5, 0.5, 0.5, 0.5), (phi / 2, 1 / (2 * phi), 0.5, 0.0)]
    )
    assert g.order == 60
    return g


def group_from_tag(tag: str) -> FiniteGroup:
    tag = tag.strip()
    if tag == "A4":
        return tetrahedral_group()
    if tag == "S4":
        return octahedral_group()
    if tag == "A5":
        return icosahedral_group()
    if tag and tag[0] in "ZD" and tag[1:].isdigit():
        n = int(tag[1:])
        if n < 1:
            raise ValueError("group order parameter must be positive")
        return cyclic_group(n) if tag[0] == "Z" else dihedral_group(n)
    raise ValueError(f"unknown group tag {tag!r}")


def sw_of_tuple(G: FiniteGroup, tup) -> int:
    """Stiefel-Whitney class of a relator-satisfying tuple: 0 if it lifts
    to SU(2), 1 otherwise."""
    acc = (1.0, 0.0, 0.0, 0.0)
    for i in range(0, len(tup), 2):
        qa, qb = G.lift[tup[i]], G.lift[tup[i + 1]]
        acc = _qmul(acc, _qmul(_qmul(qa, qb), _qmul(_qconj(qa), _qconj(qb))))
    if abs(acc[0] - 1) < 1e-6 and all(abs(v) < 1e-6 for v in acc[1:]):
        return 0
    if abs(acc[0] + 1) < 1e-6 and all(abs(v) < 1e-6 for v in acc[1:]):
        return 1
    raise ValueError("tuple does not satisfy the relator")


# ---------------------------------------------------------------------------
# homomorphism enumeration (meet in the middle on the relator)
# ---------------------------------------------------------------------------

def enumerate_homs(G: FiniteGroup, g: int) -> np.ndarray:
    """All relator-satisfying 2g-tuples, as an (N, 2g) integer array."""
    m = G.order
    if m ** (2 * g) > 10 ** 9:
        raise ValueError(
            f"enumeration infeasible: |G|^(2g) = {m ** (2 * g)} > 1e9"
        )
    buckets = {}
    for a in range(m):
        for b in range(m):
            buckets.setdefault(G.comm(a, b), []).append((a, b))
    rows = []

    def rec(handle, acc, prefix):
        if handle == g - 1:
            for a, b in buckets.get(G.inv[acc], ()):
                rows.append(prefix + (a, b))
            return
        for c, pairs in buckets.items():
            acc2 = G.mul[acc][c]
            for a, b in pairs:
                rec(handle + 1, acc2, prefix + (a, b))

    if g == 0:
        return np.zeros((1, 0), dtype=np.int64)
    rec(0, 0, ())
    return np.array(rows, dtype=np.int64)


def _encode(H: np.ndarray, m: int) -> np.ndarray:
    key = H[:, 0].astype(np.int64)
    for c in range(1, H.shape[1]):
        key = key * m + H[:, c]
    return key


def _decode(key: int, width: int, m: int):
    out = []
    for _ in range(width):
        out.append(int(key % m))
        key //= m
    return tuple(reversed(out))


def canonical_key_array(G: FiniteGroup, H: np.ndarray) -> np.ndarray:
    """Minimal encoded key over simultaneous conjugation, per row."""
    m = G.order
    best = None
    for c in range(m):
        key = _encode(G.conj[c][H], m)
        best = key if best is None else np.minimum(best, key)
    return best


def canonical_tuple(G: FiniteGroup, tup) -> tuple:
    m = G.order
    best = None
    for c in range(m):
        row = tuple(int(G.conj[c][x]) for x in tup)
        if best is None or row < best:
            best = row
    return best


# ---------------------------------------------------------------------------
# orbit BFS
# ---------------------------------------------------------------------------

@dataclass
class OrbitSummary:
    group: str
    genus: int
    surjective_count: int
    orbit_count: int
    orbits: list = field(default_factory=list)
    total_homs: int = 0

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "genus": self.genus,
            "surjective_count": self.surjective_count,
            "orbit_count": self.orbit_count,
            "total_homs": self.total_homs,
            "orbits": self.orbits,
        }

    @staticmethod
    def from_json(obj) -> "OrbitSummary":
        return OrbitSummary(
            group=obj["group"],
            genus=obj["genus"],
            surjective_count=obj["surjective_count"],
            orbit_count=obj["orbit_count"],
            orbits=list(obj["orbits"]),
            total_homs=obj.get("total_homs", 0),
        )


def _image_label(G: FiniteGroup, tup):
    """Image subgroup up to conjugacy, as a canonical sorted tuple."""
    img = G.closure(set(tup))
    best = None
    for c in range(G.order):
        lab = tuple(sorted(int(G.conj[c][x]) for x in img))
        if best is None or lab < best:
            best = lab
    return best


def _abelianized_label(G: FiniteGroup, tup):
    """Subgroup of G/[G,G] generated by the images, by coset labels."""
    derived = G.closure(
        {G.comm(a, b) for a in range(G.order) for b in range(G.order)}
    )
    coset = {}
    for x in range(G.order):
        coset[x] = min(G.mul[x][d] for d in derived)
    reps = sorted({coset[x] for x in range(G.order)})
    # multiplication on coset labels
    seen = {coset[0]}
    frontier = [coset[0]]
    gens = [coset[x] for x in tup]
    while frontier:
        nxt = []
        for u in frontier:
            for s in gens:
                v = coset[G.mul[u][s]]
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return tuple(sorted(seen))


def orbit_bfs(G: FiniteGroup, g: int, surjective_only: bool = True) -> OrbitSummary:
    """Enumerate Hom(pi_1(S_g), G) and decompose under the move set plus
    simultaneous conjugation."""
    H = enumerate_homs(G, g)
    total = H.shape[0]
    m = G.order
    keys = canonical_key_array(G, H)
    uniq, counts = np.unique(keys, return_counts=True)
    class_of = {int(k): idx for idx, k in enumerate(uniq)}
    reps = [_decode(int(k), 2 * g, m) for k in uniq]
    surj = [G.closure(set(t) | {0}) == frozenset(range(m)) if t else m == 1
            for t in reps]
    class_sizes = [int(c) for c in counts]

    moves = standard_moves(g)
    mul = lambda a, b: G.mul[a][b]
    inv = lambda a: G.inv[a]

    visited = [False] * len(reps)
    orbits = []
    surjective_count = sum(
        sz for sz, s in zip(class_sizes, surj) if s
    )
    order_idx = sorted(range(len(reps)), key=lambda idx: int(uniq[idx]))
    for start in order_idx:
        if visited[start]:
            continue
        if surjective_only and not surj[start]:
            continue
        frontier = [start]
        visited[start] = True
        members = [start]
        while frontier:
            nxt = []
            for idx in frontier:
                t = reps[idx]
                for mv in moves:
                    u = tuple(_apply_images(t, g, mv, mul, inv, 0))
                    key = _encode(
                        np.array([canonical_tuple(G, u)], dtype=np.int64), m
                    )[0]
                    j = class_of.get(int(key))
                    if j is None:
                        raise AssertionError(
                            "move produced a tuple outside the enumeration"
                        )
                    if not visited[j]:
                        visited[j] = True
                        nxt.append(j)
                        members.append(j)
            frontier = sorted(nxt)
        size = sum(class_sizes[idx] for idx in members)
        rep0 = reps[min(members)]
        orbits.append(
            {
                "size": size,
                "classes": len(members),
                "representative": list(rep0),
                "sw": sw_of_tuple(G, rep0) if g >= 1 else 0,
                "image": list(_image_label(G, rep0)),
                "abelianized": list(_abelianized_label(G, rep0)),
                "surjective": bool(surj[min(members)]),
            }
        )
        # invariance sanity: surjectivity is constant along the orbit
        assert all(surj[idx] == surj[members[0]] for idx in members)
    orbits.sort(key=lambda o: o["representative"])
    n_orbits = sum(1 for o in orbits if o["surjective"]) if surjective_only else len(orbits)
    summary = OrbitSummary(
        group=G.tag,
        genus=g,
        surjective_count=surjective_count,
        orbit_count=n_orbits,
        orbits=orbits,
        total_homs=total,
    )
    if surjective_only:
        assert sum(o["size"] for o in summary.orbits if o["surjective"]) == surjective_count
    return summary


# ---------------------------------------------------------------------------
# canonical forms for cyclic targets
# ---------------------------------------------------------------------------

class _CyclicState:
    """A Z_n exponent vector together with the recorded move word."""

    def __init__(self, vec, n, g):
        self.v = list(vec)
        self.n = n
        self.g = g
        self.moves = []

    def apply(self, mv: MCGMove):
        n = self.n
        self.v = _apply_images(
            self.v, self.g, mv, lambda a, b: (a + b) % n, lambda a: (-a) % n, 0
        )
        self.moves.append(mv)

    def x(self, i):
        return self.v[2 * (i - 1)]

    def y(self, i):
        return self.v[2 * (i - 1) + 1]


def _reduce_handle(st: _CyclicState, i: int):
    """Euclid within handle i: bring (x_i, y_i) to (x, 0)."""
    while st.y(i) != 0:
        x, y = st.x(i), st.y(i)
        if x == 0:
            st.apply(MCGMove("InvertHandle", i))  # (0, y) -> (-y, 0)
            break
        k = x // y
        if k:
            st.apply(MCGMove("TwistB", i, power=-k))  # x -> x mod y
        if st.x(i) == 0:
            continue
        k2 = st.y(i) // st.x(i)
        if k2:
            st.apply(MCGMove("TwistA", i, power=-k2))  # y -> y mod x


def _merge_handles(st: _CyclicState, i: int):
    """Drain handle i+1 (in (x, 0) form) into handle i."""
    while st.x(i + 1) != 0:
        p, q = st.x(i), st.x(i + 1)
        if p < q:
            st.apply(MCGMove("SwapHandles", i))
            continue
        st.apply(MCGMove("InvertHandle", i + 1))  # (q, 0) -> (0, q)
        st.apply(MCGMove("CrossTwist", i, power=p // q))
        # handle i now holds p mod q; re-normalize handle i+1
        _reduce_handle(st, i + 1)


def _sl2_fixup_word(g0: int, n: int):
    """Moves on handle 1 realizing an SL(2, Z) matrix M with
    M (g0, 0)^T = (gcd(g0, n), 0) mod n, as S/T elementary factors."""
    t = math.gcd(g0, n)
    gamma = n // t
    alpha = pow(g0 // t, -1, gamma)
    delta = pow(alpha, -1, gamma)
    beta = (alpha * delta - 1) // gamma
    a, b, c, d = alpha, beta, gamma, delta
    ops = []  # left reductions bringing M to the identity
    while c != 0:
        k = -(a // c)
        a += k * c
        b += k * d
        ops.append(("T", k))
        a, b, c, d = -c, -d, a, b
        ops.append(("S", 1))
    if a == -1:
        a, b, c, d = -a, -b, -c, -d
        ops.append(("S", 2))
    assert a == 1 and d == 1 and c == 0
    if b != 0:
        ops.append(("T", -b))
        b = 0
    # M equals the product of the inverses of the reductions, applied in
    # reverse order
    moves = []
    for op in reversed(ops):
        if op[0] == "T":
            moves.append(MCGMove("TwistB", 1, power=-op[1]))
        else:
            moves.append(MCGMove("InvertHandle", 1, power=-op[1]))
    return moves


def canonical_form_cyclic(rep: SurfaceRep):
    """Bring a representation into Z_n to the form (t, 0, ..., 0) with
    t = gcd of all exponents and n (t = 1 for surjective reps).

    Returns (canonical_rep, move_word); replaying the word on the input
    reproduces the canonical representative exactly.
    """
    from .core import tag_param

    if not rep.target_tag.startswith("cyclic"):
        raise TypeError("canonical_form_cyclic needs a cyclic target")
    n = tag_param(rep.target_tag)
    g = rep.genus
    vec = [e.rot for e in rep.images]
    st = _CyclicState(vec, n, g)
    if any(st.v):
        for i in range(1, g + 1):
            _reduce_handle(st, i)
        for i in range(g - 1, 0, -1):
            _merge_handles(st, i)
        g0 = st.x(1)
        if g0:
            t = math.gcd(g0, n)
            if g0 != t:
                for mv in _sl2_fixup_word(g0, n):
                    st.apply(mv)
            assert st.v[0] == math.gcd(g0, n)
        assert all(v == 0 for v in st.v[1:])
    images = [DihedralElement(n, v, 0) for v in st.v]
    return rep.with_images(images), list(st.moves)


def sp_action_abelian(rep: SurfaceRep, M) -> SurfaceRep:
    """Apply an integer symplectic matrix to the exponent vector of a
    representation into an abelian (cyclic) target."""
    from .core import tag_param

    if not rep.target_tag.startswith("cyclic"):
        raise TypeError("sp_action_abelian needs an abelian (cyclic) target")
    n = tag_param(rep.target_tag)
    g = rep.genus
    M = [[int(v) for v in row] for row in M]
    if len(M) != 2 * g or any(len(row) != 2 * g for row in M):
        raise ValueError("matrix size must be 2g x 2g")
    # check M^T J M = J for J = diag blocks [[0,1],[-1,0]]
    J = [[0] * (2 * g) for _ in range(2 * g)]
    for i in range(g):
        J[2 * i][2 * i + 1] = 1
        J[2 * i + 1][2 * i] = -1
    size = 2 * g
    JM = [
        [sum(J[r][k] * M[k][c] for k in range(size)) for c in range(size)]
        for r in range(size)
    ]
    MtJM = [
        [sum(M[k][r] * JM[k][c] for k in range(size)) for c in range(size)]
        for r in range(size)
    ]
    if MtJM != J:
        raise ValueError("matrix is not symplectic")
    x = [e.rot for e in rep.images]
    y = [sum(M[r][c] * x[c] for c in range(size)) % n for r in range(size)]
    return rep.with_images([DihedralElement(n, v, 0) for v in y])


# ---------------------------------------------------------------------------
# canonical forms for dihedral targets
# ---------------------------------------------------------------------------

def dihedral_models(n: int, g: int):
    """The two model representations onto D_n at genus g >= 2.

    The lifting model sends a_1 to the order-n rotation and b_g to a
    reflection; the non-lifting model (n even) additionally sends a_g to
    the half-turn rotation.
    """
    tag = f"dihedral({n})"
    r1 = DihedralElement(n, 1, 0)
    s = DihedralElement(n, 0, 1)
    e = DihedralElement(n, 0, 0)
    base = [e] * (2 * g)
    base[0] = r1
    base[2 * g - 1] = s
    lifting = SurfaceRep(g, base, tag)
    if n % 2:
        return {0: lifting}
    alt = list(base)
    alt[2 * g - 2] = DihedralElement(n, n // 2, 0)
    return {0: lifting, 1: SurfaceRep(g, alt, tag)}


def canonical_form_dihedral(rep: SurfaceRep):
    """Canonical representative of a surjective dihedral representation.

    Returns {"lifts": bool, "representative": rep, "moves": word}; the word
    carries the input to the representative up to conjugation.
    """
    from .core import tag_param

    if not rep.target_tag.startswith("dihedral"):
        raise TypeError("canonical_form_dihedral needs a dihedral target")
    n = tag_param(rep.target_tag)
    g = rep.genus
    if g < 2:
        raise ValueError("dihedral canonical form needs genus >= 2")
    G = dihedral_group(n)
    tup = tuple(e.flip * n + e.rot for e in rep.images)
    if G.closure(set(tup)) != frozenset(range(G.order)):
        raise ValueError("representation is not surjective onto the dihedral group")
    sw = sw_of_tuple(G, tup)
    models = dihedral_models(n, g)
    if sw not in models:
        raise ValueError("no model with the given lifting class")  # n odd, sw=1
    model = models[sw]
    target = canonical_tuple(
        G, tuple(e.flip * n + e.rot for e in model.images)
    )
    # BFS with recorded parents from the input to the model class
    mul = lambda a, b: G.mul[a][b]
    inv = lambda a: G.inv[a]
    moves = standard_moves(g)
    start = canonical_tuple(G, tup)
    parent = {start: None}
    frontier = [start]
    found = start == target
    while frontier and not found:
        nxt = []
        for t in frontier:
            for mv in moves:
                u = canonical_tuple(
                    G, tuple(_apply_images(t, g, mv, mul, inv, 0))
                )
                if u not in parent:
                    parent[u] = (t, mv)
                    if u == target:
                        found = True
                    nxt.append(u)
        frontier = sorted(nxt)
    if not found:
        raise AssertionError("model not reachable; move set insufficient")
    word = []
    cur = target
    while parent[cur] is not None:
        prev, mv = parent[cur]
        word.append(mv)
        cur = prev
    word.reverse()
    return {"lifts": sw == 0, "representative": model, "moves": word}
