"""Group element types, representation containers and JSON (de)serialization.

Target tags: ``psl2c``, ``affine``, ``euclidean``, ``circle-linear``,
``permutation(d)``, ``cyclic(n)``, ``dihedral(n)``.

Generator order convention for a genus-g surface group is
``(a_1, b_1, ..., a_g, b_g)`` with relator ``prod [a_i, b_i] = id``.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .scalars import (
    ExactScalar,
    Scalar,
    as_complex,
    cross,
    is_exact,
    scalar_add,
    scalar_conj,
    scalar_div,
    scalar_eq,
    scalar_is_zero,
    scalar_mul,
    scalar_sub,
    tolerance,
)


class TargetMismatch(TypeError):
    """Raised when elements of different target groups are combined."""


# ---------------------------------------------------------------------------
# Mobius elements
# ---------------------------------------------------------------------------

class MobiusElement:
    """2x2 complex matrix up to global scalar (sign in float mode).

    Float entries are normalized to determinant 1 at construction; equality
    is then tested up to sign.  Exact entries are kept projective (nonzero
    determinant) because det-1 normalization may need square roots outside
    Q, Q(i), Q(omega); equality is tested up to a scalar of the field.
    Commutators are insensitive to the scale, so lifting questions are
    unaffected.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: Scalar, b: Scalar, c: Scalar, d: Scalar, normalize: bool = True):
        exact = all(is_exact(v) or isinstance(v, (int, Fraction)) for v in (a, b, c, d))
        if exact:
            a, b, c, d = (ExactScalar.coerce(v) for v in (a, b, c, d))
            det = a * d - b * c
            if det.is_zero():
                raise ValueError("singular matrix")
        else:
            a, b, c, d = (complex(v) for v in (a, b, c, d))
            det = a * d - b * c
            if abs(det) <= tolerance():
                raise ValueError("singular matrix")
            if normalize:
                s = cmath.sqrt(det)
                a, b, c, d = a / s, b / s, c / s, d / s
        self.a, self.b, self.c, self.d = a, b, c, d

    # -- basic algebra ---------------------------------------------------
    @property
    def exact(self) -> bool:
        return is_exact(self.a)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def det(self):
        return scalar_sub(scalar_mul(self.a, self.d), scalar_mul(self.b, self.c))

    def __mul__(self, other: "MobiusElement") -> "MobiusElement":
        if not isinstance(other, MobiusElement):
            return NotImplemented
        a = scalar_add(scalar_mul(self.a, other.a), scalar_mul(self.b, other.c))
        b = scalar_add(scalar_mul(self.a, other.b), scalar_mul(self.b, other.d))
        c = scalar_add(scalar_mul(self.c, other.a), scalar_mul(self.d, other.c))
        d = scalar_add(scalar_mul(self.c, other.b), scalar_mul(self.d, other.d))
        return MobiusElement(a, b, c, d, normalize=False)

    def inverse(self) -> "MobiusElement":
        if self.exact:
            det = self.det()
            return MobiusElement(self.d / det, -self.b / det, -self.c / det, self.a / det)
        # determinant is 1 in float mode
        return MobiusElement(self.d, -self.b, -self.c, self.a, normalize=False)

    def trace(self):
        return scalar_add(self.a, self.d)

    # -- equality up to scalar/sign --------------------------------------
    def _float_sign_normalized(self):
        # the sign rule must be stable under small perturbations: use the
        # first entry of significant modulus and decide by its real part,
        # falling back to the imaginary part only when the real part is
        # essentially zero
        ents = [complex(v) for v in self.entries()]
        big = max(abs(v) for v in ents)
        s = 1.0
        for p in ents:
            if abs(p) > 1e-6 * big:
                if abs(p.real) > 1e-6 * big:
                    s = -1.0 if p.real < 0 else 1.0
                else:
                    s = -1.0 if p.imag < 0 else 1.0
                break
        return [v * s for v in ents]

    def proj_eq(self, other: "MobiusElement", tol: float | None = None) -> bool:
        if self.exact and other.exact:
            # find a pivot of other and compare cross products
            for pv, sv in zip(other.entries(), self.entries()):
                if not pv.is_zero():
                    lam = sv / pv
                    break
            else:  # pragma: no cover - singular matrices are rejected earlier
                return False
            return all(scalar_eq(s, lam * o) for s, o in zip(self.entries(), other.entries()))
        if tol is None:
            tol = tolerance()
        u = self._float_sign_normalized()
        v = other._float_sign_normalized()
        return all(abs(x - y) <= tol for x, y in zip(u, v))

    def is_identity(self, tol: float | None = None) -> bool:
        return self.proj_eq(mobius_identity(exact=self.exact), tol)

    def is_plus_or_minus_identity(self, tol: float | None = None):
        """For determinant-1 matrices: +1, -1 or None.

        Exact matrices must have determinant exactly 1 for the sign to be
        meaningful (commutator products always do).
        """
        if self.exact:
            if self.b.is_zero() and self.c.is_zero() and self.a == self.d:
                if self.a.is_one():
                    return +1
                if (-self.a).is_one():
                    return -1
            return None
        if tol is None:
            tol = 1e-6
        ents = [complex(v) for v in self.entries()]
        for sign in (+1, -1):
            if (
                abs(ents[0] - sign) <= tol
                and abs(ents[3] - sign) <= tol
                and abs(ents[1]) <= tol
                and abs(ents[2]) <= tol
            ):
                return sign
        return None

    def apply(self, z: complex | None) -> complex | None:
        """Apply to a point of CP^1 given as a complex number or None (=inf)."""
        a, b, c, d = (complex(v) for v in self.entries())
        if z is None:
            if abs(c) <= tolerance():
                return None
            return a / c
        den = c * z + d
        if abs(den) <= tolerance() * max(1.0, abs(z)):
            return None
        return (a * z + b) / den

    def __repr__(self):
        return f"MobiusElement({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


def mobius_identity(exact: bool = False) -> MobiusElement:
    if exact:
        one, zero = ExactScalar(1), ExactScalar(0)
        return MobiusElement(one, zero, zero, one)
    return MobiusElement(1.0, 0.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Affine elements z -> a z + b
# ---------------------------------------------------------------------------

class AffineElement:
    __slots__ = ("a", "b")

    def __init__(self, a: Scalar, b: Scalar):
        if isinstance(a, (int, Fraction)):
            a = ExactScalar.coerce(a)
        if isinstance(b, (int, Fraction)):
            b = ExactScalar.coerce(b)
        if is_exact(a) != is_exact(b):
            if is_exact(a):
                a = complex(a)
            else:
                b = complex(b)
        if scalar_is_zero(a):
            raise ValueError("linear part must be nonzero")
        self.a, self.b = a, b

    @property
    def exact(self) -> bool:
        return is_exact(self.a)

    def __mul__(self, other: "AffineElement") -> "AffineElement":
        if not isinstance(other, AffineElement):
            return NotImplemented
        # (f o g)(z) = a_f (a_g z + b_g) + b_f
        return AffineElement(
            scalar_mul(self.a, other.a),
            scalar_add(scalar_mul(self.a, other.b), self.b),
        )

    def inverse(self) -> "AffineElement":
        ai = scalar_div(ExactScalar(1) if self.exact else 1.0, self.a)
        return AffineElement(ai, -scalar_mul(ai, self.b) if not is_exact(self.b) else -(ai * self.b))

    def apply(self, z: Scalar) -> Scalar:
        return scalar_add(scalar_mul(self.a, z), self.b)

    def to_mobius(self) -> MobiusElement:
        one = ExactScalar(1) if self.exact else 1.0
        zero = ExactScalar(0) if self.exact else 0.0
        return MobiusElement(self.a, self.b, zero, one)

    def eq(self, other: "AffineElement", tol: float | None = None) -> bool:
        return scalar_eq(self.a, other.a, tol) and scalar_eq(self.b, other.b, tol)

    def is_identity(self, tol: float | None = None) -> bool:
        one = ExactScalar(1) if self.exact else 1.0
        zero = ExactScalar(0) if self.exact else 0.0
        return scalar_eq(self.a, one, tol) and scalar_eq(self.b, zero, tol)

    def __repr__(self):
        return f"AffineElement({self.a!r}, {self.b!r})"


def affine_identity(exact: bool = False) -> AffineElement:
    if exact:
        return AffineElement(ExactScalar(1), ExactScalar(0))
    return AffineElement(1.0, 0.0)


# ---------------------------------------------------------------------------
# Finite targets: permutations, cyclic and dihedral groups
# ---------------------------------------------------------------------------

class PermElement(tuple):
    """Permutation of {0..d-1} in one-line notation (0-based)."""

    def __new__(cls, seq: Sequence[int]):
        t = tuple(seq)
        if sorted(t) != list(range(len(t))):
            raise ValueError("not a permutation")
        return super().__new__(cls, t)

    def __mul__(self, other):
        # (self * other)(x) = self(other(x)), composition like functions
        return PermElement(tuple(self[other[i]] for i in range(len(self))))

    def inverse(self):
        inv = [0] * len(self)
        for i, v in enumerate(self):
            inv[v] = i
        return PermElement(inv)

    def is_identity(self):
        return all(i == v for i, v in enumerate(self))

    def cycles(self, skip_fixed: bool = True):
        seen = [False] * len(self)
        out = []
        for i in range(len(self)):
            if seen[i]:
                continue
            cyc = [i]
            seen[i] = True
            j = self[i]
            while j != i:
                seen[j] = True
                cyc.append(j)
                j = self[j]
            if len(cyc) > 1 or not skip_fixed:
                out.append(tuple(cyc))
        return out


def perm_identity(d: int) -> PermElement:
    return PermElement(range(d))


@dataclass(frozen=True)
class DihedralElement:
    """rot in Z_n, flip in {0, 1}; flip acts by inversion on rotations."""

    n: int
    rot: int
    flip: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rot", self.rot % self.n)
        if self.flip not in (0, 1):
            raise ValueError("flip must be 0 or 1")

    def __mul__(self, other: "DihedralElement") -> "DihedralElement":
        if self.n != other.n:
            raise TargetMismatch("mixed dihedral orders")
        if self.flip == 0:
            return DihedralElement(self.n, self.rot + other.rot, other.flip)
        return DihedralElement(self.n, self.rot - other.rot, 1 - other.flip)

    def inverse(self) -> "DihedralElement":
        if self.flip == 0:
            return DihedralElement(self.n, -self.rot, 0)
        return DihedralElement(self.n, self.rot, 1)

    def is_identity(self) -> bool:
        return self.rot == 0 and self.flip == 0


# ---------------------------------------------------------------------------
# Branch data
# ---------------------------------------------------------------------------

class BranchData:
    """Sorted multiset of branch orders n_1 <= ... <= n_k, all >= 1.

    A branch point of order n has local model z -> z^{n+1}.
    """

    __slots__ = ("orders",)

    def __init__(self, orders: Sequence[int] = ()):
        orders = tuple(sorted(int(n) for n in orders))
        if any(n < 1 for n in orders):
            raise ValueError("branch orders must be positive")
        self.orders = orders

    @property
    def total(self) -> int:
        return sum(self.orders)

    @property
    def max(self) -> int:
        return self.orders[-1] if self.orders else 0

    @property
    def k(self) -> int:
        return len(self.orders)

    def __iter__(self):
        return iter(self.orders)

    def __len__(self):
        return len(self.orders)

    def __eq__(self, other):
        if isinstance(other, BranchData):
            return self.orders == other.orders
        if isinstance(other, (tuple, list)):
            return self.orders == tuple(sorted(other))
        return NotImplemented

    def __hash__(self):
        return hash(self.orders)

    def __repr__(self):
        return f"BranchData{self.orders}"


# ---------------------------------------------------------------------------
# Surface representations
# ---------------------------------------------------------------------------

def _tag_base(tag: str) -> str:
    return tag.split("(", 1)[0]


def tag_param(tag: str) -> int | None:
    if "(" in tag:
        return int(tag.split("(", 1)[1].rstrip(")"))
    return None


def identity_for(tag: str, exact: bool = False):
    base = _tag_base(tag)
    if base == "psl2c":
        return mobius_identity(exact)
    if base in ("affine", "euclidean", "circle-linear"):
        return affine_identity(exact)
    if base == "permutation":
        return perm_identity(tag_param(tag))
    if base in ("cyclic", "dihedral"):
        return DihedralElement(tag_param(tag), 0, 0)
    raise ValueError(f"unknown target tag {tag!r}")


def compose(f, g):
    """Group composition; both operands must share an element type."""
    if type(f) is not type(g) and not (
        isinstance(f, AffineElement) and isinstance(g, AffineElement)
    ):
        raise TargetMismatch(
            f"cannot compose {type(f).__name__} with {type(g).__name__}"
        )
    return f * g


def invert(f):
    return f.inverse()


def element_is_identity(e, tol: float | None = None) -> bool:
    if isinstance(e, (MobiusElement, AffineElement)):
        return e.is_identity(tol)
    return e.is_identity()


def elements_equal(e, f, tol: float | None = None) -> bool:
    if isinstance(e, MobiusElement):
        return e.proj_eq(f, tol)
    if isinstance(e, AffineElement):
        return e.eq(f, tol)
    return e == f


class SurfaceRep:
    """Genus g plus the ordered 2g-tuple of generator images."""

    __slots__ = ("genus", "images", "target_tag")

    def __init__(self, genus: int, images: Sequence, target_tag: str, check: bool = True):
        genus = int(genus)
        if genus < 0:
            raise ValueError("genus must be nonnegative")
        images = tuple(images)
        if len(images) != 2 * genus:
            raise ValueError(f"expected {2 * genus} images, got {len(images)}")
        self.genus = genus
        self.images = images
        self.target_tag = target_tag
        if check and not relator_check(self):
            raise ValueError("images do not satisfy the surface relator")

    def a(self, i: int):
        """Image of a_i, 1-based."""
        return self.images[2 * (i - 1)]

    def b(self, i: int):
        return self.images[2 * (i - 1) + 1]

    @property
    def exact(self) -> bool:
        return bool(self.images) and getattr(self.images[0], "exact", False)

    def with_images(self, images: Sequence, check: bool = True) -> "SurfaceRep":
        return SurfaceRep(self.genus, images, self.target_tag, check=check)

    def apply_word(self, word: Sequence[int]):
        """Evaluate a word in generators; letter k>0 means generator index
        k-1 in (a_1, b_1, ...), negative letters are inverses."""
        acc = identity_for(self.target_tag, self.exact)
        for letter in word:
            g = self.images[abs(letter) - 1]
            acc = acc * (g if letter > 0 else g.inverse())
        return acc

    def __repr__(self):
        return f"SurfaceRep(genus={self.genus}, target={self.target_tag!r})"


def relator_check(rep: SurfaceRep, tol: float | None = None) -> bool:
    """Product of commutators equals the identity (up to sign for Mobius)."""
    if rep.genus == 0:
        return True
    acc = identity_for(rep.target_tag, rep.exact)
    for i in range(1, rep.genus + 1):
        a, b = rep.a(i), rep.b(i)
        acc = acc * a * b * a.inverse() * b.inverse()
    return element_is_identity(acc, tol)


def sl2_commutator_product(rep: SurfaceRep):
    """Product of commutators of arbitrary matrix lifts, as a matrix.

    The result has determinant 1 and is +-Id whenever the relator holds in
    PSL(2, C); its sign is independent of the choice of lifts.
    """
    mats = []
    for e in rep.images:
        if isinstance(e, AffineElement):
            e = e.to_mobius()
        if not isinstance(e, MobiusElement):
            raise TargetMismatch("lifting requires a Mobius-embeddable target")
        mats.append(e)
    exact = mats[0].exact if mats else False
    acc = mobius_identity(exact)
    for i in range(rep.genus):
        a, b = mats[2 * i], mats[2 * i + 1]
        acc = acc * a * b * a.inverse() * b.inverse()
    return acc


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def _scalar_to_json(v: Scalar):
    if is_exact(v):
        den = (v.x.denominator * v.y.denominator) // math.gcd(
            v.x.denominator, v.y.denominator
        )
        return {
            "num": [int(v.x * den), int(v.y * den)],
            "den": int(den),
            "basis": v.basis,
        }
    c = complex(v)
    return [c.real, c.imag]


def _scalar_from_json(obj) -> Scalar:
    if isinstance(obj, dict):
        p, q = obj["num"]
        den = obj["den"]
        return ExactScalar(Fraction(p, den), Fraction(q, den), obj.get("basis", "1"))
    re, im = obj
    return complex(re, im)


def rep_to_json(rep: SurfaceRep) -> dict:
    images = []
    for e in rep.images:
        if isinstance(e, MobiusElement):
            images.append([_scalar_to_json(v) for v in e.entries()])
        elif isinstance(e, AffineElement):
            images.append({"a": _scalar_to_json(e.a), "b": _scalar_to_json(e.b)})
        elif isinstance(e, PermElement):
            images.append(list(e))
        elif isinstance(e, DihedralElement):
            images.append({"rot": e.rot, "flip": e.flip})
        else:  # pragma: no cover
            raise TypeError(f"cannot serialize {type(e).__name__}")
    return {"genus": rep.genus, "target": rep.target_tag, "images": images}


def rep_from_json(obj: dict) -> SurfaceRep:
    genus = obj["genus"]
    tag = obj["target"]
    base = _tag_base(tag)
    images = []
    for item in obj["images"]:
        if base == "psl2c":
            images.append(MobiusElement(*[_scalar_from_json(v) for v in item]))
        elif base in ("affine", "euclidean", "circle-linear"):
            images.append(
                AffineElement(_scalar_from_json(item["a"]), _scalar_from_json(item["b"]))
            )
        elif base == "permutation":
            images.append(PermElement(item))
        elif base in ("cyclic", "dihedral"):
            images.append(DihedralElement(tag_param(tag), item["rot"], item.get("flip", 0)))
        else:
            raise ValueError(f"unknown target tag {tag!r}")
    return SurfaceRep(genus, images, tag)


def rep_to_json_str(rep: SurfaceRep) -> str:
    return json.dumps(rep_to_json(rep), indent=2, sort_keys=True)


def rep_from_json_str(s: str) -> SurfaceRep:
    return rep_from_json(json.loads(s))
