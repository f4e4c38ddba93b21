"""Elementary classification of PSL(2, C) representations.

A representation is *elementary* when it has a finite orbit on H^3 or on
CP^1; the relevant subclasses are

* spherical -- an invariant positive-definite Hermitian form exists
  (conjugate into PSU(2)),
* affine    -- a common fixed point on CP^1,
* Euclidean -- affine with unit-modulus multipliers at the fixed point,
* dihedral  -- an invariant two-point set on CP^1.

The module also computes the lifting class sw and detects finite images.
All geometric tests run in float coordinates; exact inputs are converted.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    AffineElement,
    MobiusElement,
    SurfaceRep,
    element_is_identity,
    sl2_commutator_product,
)
from .scalars import tolerance


class AmbiguousClassification(ValueError):
    """Float-mode inputs too close to a decision boundary."""


# decision margins for CP^1 chordal tests: distances below _NEAR count as
# equal, above _FAR as distinct, in between the classification refuses
_NEAR = 1e-7
_FAR = 1e-5


# ---------------------------------------------------------------------------
# sw
# ---------------------------------------------------------------------------

def sw(rep: SurfaceRep) -> int:
    """0 if the representation lifts to SL(2, C), 1 otherwise."""
    prod = sl2_commutator_product(rep)
    sign = prod.is_plus_or_minus_identity()
    if sign is None:
        raise ValueError("commutator product is not +-Id: relator broken")
    return 0 if sign == +1 else 1


# ---------------------------------------------------------------------------
# CP^1 points and fixed points
# ---------------------------------------------------------------------------

def _as_float_mobius(e) -> MobiusElement:
    if isinstance(e, AffineElement):
        e = e.to_mobius()
    if not isinstance(e, MobiusElement):
        raise TypeError("classification requires Mobius or affine images")
    if e.exact:
        return MobiusElement(*(complex(v) for v in e.entries()))
    return e


def chordal(p, q) -> float:
    """Chordal distance on CP^1 (None = infinity)."""
    if p is None and q is None:
        return 0.0
    if p is None:
        return 2.0 / math.sqrt(1.0 + abs(q) ** 2)
    if q is None:
        return 2.0 / math.sqrt(1.0 + abs(p) ** 2)
    return 2.0 * abs(p - q) / math.sqrt((1.0 + abs(p) ** 2) * (1.0 + abs(q) ** 2))


def fixed_points(m: MobiusElement):
    """("identity",), ("one", p) or ("two", p, q) with points in C or None."""
    m = _as_float_mobius(m)
    if m.is_identity():
        return ("identity",)
    a, b, c, d = (complex(v) for v in m.entries())
    tol = tolerance()
    if abs(c) <= tol:
        if abs(a - d) <= tol:
            return ("one", None)  # parabolic translation fixes infinity
        return ("two", None, b / (d - a))
    disc = (d - a) ** 2 + 4 * b * c
    if abs(disc) <= tol**2 * 100:
        return ("one", (a - d) / (2 * c))
    r = cmath.sqrt(disc)
    return ("two", (a - d + r) / (2 * c), (a - d - r) / (2 * c))


def _apply_point(m: MobiusElement, p):
    return m.apply(p)


def _fixes(m, p) -> bool:
    d = chordal(_apply_point(m, p), p)
    if d < _NEAR:
        return True
    if d > _FAR:
        return False
    raise AmbiguousClassification(
        f"fixed-point test inconclusive (chordal distance {d:.2e})"
    )


def _pair_invariant(m, p, q) -> bool:
    ip, iq = _apply_point(m, p), _apply_point(m, q)
    keep = max(chordal(ip, p), chordal(iq, q))
    swap = max(chordal(ip, q), chordal(iq, p))
    d = min(keep, swap)
    if d < _NEAR:
        return True
    if d > _FAR:
        return False
    raise AmbiguousClassification(
        f"invariant-pair test inconclusive (chordal distance {d:.2e})"
    )


# ---------------------------------------------------------------------------
# Hermitian certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HermitianForm:
    h: tuple  # ((h00, h01), (h10, h11)) complex entries

    def __post_init__(self):
        (h00, h01), (h10, h11) = self.h
        if (
            abs(h00.imag) > 1e-7
            or abs(h11.imag) > 1e-7
            or abs(h01 - h10.conjugate()) > 1e-7
        ):
            raise ValueError("matrix is not Hermitian")

    @property
    def trace(self) -> float:
        return self.h[0][0].real + self.h[1][1].real

    @property
    def det(self) -> float:
        return (self.h[0][0] * self.h[1][1] - self.h[0][1] * self.h[1][0]).real

    @property
    def positive_definite(self) -> bool:
        return self.trace > 0 and self.det > 0

    def as_array(self) -> np.ndarray:
        return np.array(self.h, dtype=complex)


def _herm_from_coords(x) -> np.ndarray:
    """Real coordinates (x1, x2, x3, x4) -> Hermitian matrix
    [[x1, x3 + i x4], [x3 - i x4, x2]]."""
    x1, x2, x3, x4 = x
    return np.array([[x1, x3 + 1j * x4], [x3 - 1j * x4, x2]], dtype=complex)


def invariant_hermitian_space(mats) -> np.ndarray:
    """Basis (rows of real 4-coordinates) of {H : g^dagger H g = H for all g}.

    Matrices must have determinant 1 (the sign ambiguity of the lift drops
    out of the sandwich).
    """
    basis = [_herm_from_coords(e) for e in np.eye(4)]
    if not mats:
        return np.eye(4)
    A = []
    for g in mats:
        m = np.array(
            [[complex(g.a), complex(g.b)], [complex(g.c), complex(g.d)]]
        )
        cols = []
        for bi in basis:
            r = m.conj().T @ bi @ m - bi
            cols.append(
                [r[0, 0].real, r[1, 1].real, r[0, 1].real, r[0, 1].imag]
            )
        # cols[j] = defect coordinates of basis element j; transpose to rows
        A.extend(np.array(cols).T)
    A = np.array(A)
    _, s, vt = np.linalg.svd(A)
    s = np.concatenate([s, np.zeros(4 - len(s))]) if len(s) < 4 else s
    return vt[s <= 1e-8]


def _find_positive_definite(space: np.ndarray):
    """A positive-definite Hermitian form in the real span, or None."""
    dim = space.shape[0]
    if dim == 0:
        return None

    def pd_margin(x):
        h = _herm_from_coords(x)
        tr = (h[0, 0] + h[1, 1]).real
        det = (h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]).real
        if tr <= 0:
            return -1.0
        return det

    if dim == 4:
        return HermitianForm(((1 + 0j, 0j), (0j, 1 + 0j)))
    best, best_margin = None, 0.0
    if dim == 1:
        cands = [space[0], -space[0]]
    elif dim == 2:
        cands = [
            math.cos(t) * space[0] + math.sin(t) * space[1]
            for t in np.arange(0, 2 * math.pi, 0.01)
        ]
    else:  # dim == 3: Fibonacci sphere
        n = 20000
        cands = []
        ga = math.pi * (3 - math.sqrt(5))
        for i in range(n):
            z = 1 - 2 * (i + 0.5) / n
            r = math.sqrt(max(0.0, 1 - z * z))
            th = ga * i
            cands.append(
                math.cos(th) * r * space[0]
                + math.sin(th) * r * space[1]
                + z * space[2]
            )
    for x in cands:
        m = pd_margin(x)
        if m > best_margin:
            best, best_margin = x, m
    if best is None or best_margin <= 1e-9:
        return None
    h = _herm_from_coords(best / np.linalg.norm(best))
    return HermitianForm(((h[0, 0], h[0, 1]), (h[1, 0], h[1, 1])))


# ---------------------------------------------------------------------------
# finite image detection
# ---------------------------------------------------------------------------

def _canon_key(m: MobiusElement):
    if m.exact:
        for v in m.entries():
            if not v.is_zero():
                pivot = v
                break
        ents = tuple(e / pivot for e in m.entries())
        return tuple((e.x, e.y, e.basis) for e in ents)
    ents = m._float_sign_normalized()
    return tuple(round(v.real, 6) + 1j * round(v.imag, 6) for v in ents)


def finite_image_order(rep: SurfaceRep, cap: int = 10000):
    """Order of the generated subgroup if it stabilizes below cap, else None."""
    gens = []
    for e in rep.images:
        if isinstance(e, AffineElement):
            e = e.to_mobius()
        if not element_is_identity(e):
            gens.append(e)
    if not gens:
        return 1
    exact = all(g.exact for g in gens)
    if not exact:
        gens = [_as_float_mobius(g) for g in gens]
    ident = gens[0]
    seen = {}
    frontier = []

    def add(m):
        k = _canon_key(m)
        if k not in seen:
            seen[k] = m
            frontier.append(m)
            return True
        return False

    from .core import mobius_identity

    add(mobius_identity(exact))
    while frontier:
        cur = frontier.pop()
        for g in gens:
            if len(seen) > cap:
                return None
            try:
                nxt = cur * g
            except ValueError:
                # numerically degenerate product: entries diverged, the
                # group escapes every finite cap
                return None
            if not nxt.exact and max(abs(complex(v)) for v in nxt.entries()) > 1e8:
                return None
            add(nxt)
    return len(seen)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass
class ElementaryClass:
    spherical: bool
    affine: bool
    euclidean: bool
    dihedral: bool
    trivial: bool
    nonelementary: bool
    finite_order: int | None = None
    hermitian: HermitianForm | None = None
    fixed_point: complex | None | str = field(default="none")

    @property
    def elementary(self) -> bool:
        return not self.nonelementary

    def to_json(self) -> dict:
        return {
            "spherical": self.spherical,
            "affine": self.affine,
            "euclidean": self.euclidean,
            "dihedral": self.dihedral,
            "trivial": self.trivial,
            "nonelementary": self.nonelementary,
            "finite_order": self.finite_order,
        }


def _multiplier(m: MobiusElement, p) -> complex:
    """Derivative of a determinant-1 Mobius map at a fixed point."""
    a, b, c, d = (complex(v) for v in m.entries())
    if p is None:
        if abs(c) > tolerance():
            raise ValueError("infinity is not fixed")
        return a / d
    return 1.0 / (c * p + d) ** 2


def classify(rep: SurfaceRep, cap: int = 10000) -> ElementaryClass:
    """Elementary classification of a Mobius (or affine) representation."""
    if rep.genus < 1:
        raise ValueError("classification needs genus >= 1")
    mats = [_as_float_mobius(e) for e in rep.images]
    nontriv = [m for m in mats if not m.is_identity()]
    if not nontriv:
        return ElementaryClass(
            spherical=True,
            affine=True,
            euclidean=True,
            dihedral=True,
            trivial=True,
            nonelementary=False,
            finite_order=1,
            hermitian=HermitianForm(((1 + 0j, 0j), (0j, 1 + 0j))),
        )

    # affine: common fixed point among candidates of the first nontrivial
    # generator
    first = fixed_points(nontriv[0])
    candidates = list(first[1:])
    common = [
        p for p in candidates if all(_fixes(m, p) for m in nontriv)
    ]
    affine = bool(common)

    euclidean = False
    fixed_pt: complex | None | str = "none"
    if affine:
        fixed_pt = common[0]
        mults = [_multiplier(m, common[0]) for m in nontriv]
        deviation = max(abs(abs(mu) - 1.0) for mu in mults)
        if deviation < _NEAR:
            euclidean = True
        elif deviation <= _FAR:
            raise AmbiguousClassification(
                f"unit-multiplier test inconclusive (deviation {deviation:.2e})"
            )

    # dihedral: invariant two-point set among fixed pairs of generators and
    # of products of up to two generators
    pair_candidates = []

    def add_pairs(m):
        fp = fixed_points(m)
        if fp[0] == "two":
            pair_candidates.append((fp[1], fp[2]))

    for m in nontriv:
        add_pairs(m)
    for i, m1 in enumerate(nontriv):
        for m2 in nontriv[i + 1:]:
            prod = m1 * m2
            if not prod.is_identity():
                add_pairs(prod)
    if affine and len(common) == 2:
        pair_candidates.append((common[0], common[1]))
    dihedral = False
    for p, q in pair_candidates:
        if chordal(p, q) < _FAR:
            continue
        if all(_pair_invariant(m, p, q) for m in nontriv):
            dihedral = True
            break

    # spherical: invariant positive-definite Hermitian form
    space = invariant_hermitian_space(mats)
    herm = _find_positive_definite(space)
    spherical = herm is not None

    order = finite_image_order(rep, cap)
    if order is not None and not spherical:
        # a finite group always preserves the averaged form sum g^dagger g
        acc = np.zeros((2, 2), dtype=complex)
        closure = _closure_matrices(mats, cap)
        for m in closure:
            arr = np.array(
                [[complex(m.a), complex(m.b)], [complex(m.c), complex(m.d)]]
            )
            acc += arr.conj().T @ arr
        acc /= len(closure)
        herm = HermitianForm(((acc[0, 0], acc[0, 1]), (acc[1, 0], acc[1, 1])))
        spherical = True

    nonelementary = not (spherical or affine or dihedral)
    return ElementaryClass(
        spherical=spherical,
        affine=affine,
        euclidean=euclidean,
        dihedral=dihedral,
        trivial=False,
        nonelementary=nonelementary,
        finite_order=order,
        hermitian=herm,
        fixed_point=fixed_pt,
    )


def _closure_matrices(mats, cap):
    gens = [m for m in mats if not m.is_identity()]
    from .core import mobius_identity

    seen = {}
    out = []
    frontier = []

    def add(m):
        k = _canon_key(m)
        if k not in seen:
            seen[k] = m
            out.append(m)
            frontier.append(m)

    add(mobius_identity(False))
    while frontier:
        cur = frontier.pop()
        for g in gens:
            if len(out) > cap:  # pragma: no cover - guarded by caller
                raise ValueError("closure exceeded cap")
            add(cur * g)
    return out
