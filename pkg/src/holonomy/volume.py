"""Volume of Euclidean representations, normal forms and the translation
subgroup Lambda.

A Euclidean representation takes values in Isom+(E^2) = S^1 x| C, i.e.
maps z -> alpha z + t with |alpha| = 1.  Its volume is the signed area of
any equivariant map from the universal cover to C; a piecewise-affine map
built on the 4g-gon makes this an exact finite sum.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import AffineElement, DihedralElement, SurfaceRep
from .scalars import (
    ExactScalar,
    cross,
    is_exact,
    root_of_unity,
    scalar_add,
    scalar_conj,
    scalar_div,
    scalar_eq,
    scalar_is_zero,
    scalar_mul,
    scalar_sub,
    tolerance,
)

TAU_LAT = 1e-6
_ZERO_LAT = 1e-9


class VolumeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Euclidean representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EuclideanRep:
    genus: int
    linear: tuple
    translation: tuple

    def __post_init__(self):
        if len(self.linear) != 2 * self.genus or len(self.translation) != 2 * self.genus:
            raise ValueError("need 2g linear and translation parts")
        for a in self.linear:
            if is_exact(a):
                if a.norm2() != 1:
                    raise VolumeError("linear part must have unit modulus")
            elif abs(abs(complex(a)) - 1.0) > 1e-6:
                raise VolumeError("linear part must have unit modulus")
        # the relator is validated through the SurfaceRep construction
        self.to_surface_rep()

    @property
    def exact(self) -> bool:
        return bool(self.linear) and is_exact(self.linear[0])

    def to_surface_rep(self, tag: str = "euclidean") -> SurfaceRep:
        images = [
            AffineElement(a, t) for a, t in zip(self.linear, self.translation)
        ]
        return SurfaceRep(self.genus, images, tag)

    @staticmethod
    def from_surface_rep(rep: SurfaceRep) -> "EuclideanRep":
        lin, tr = [], []
        for e in rep.images:
            if not isinstance(e, AffineElement):
                raise TypeError("EuclideanRep needs affine images")
            lin.append(e.a)
            tr.append(e.b)
        return EuclideanRep(rep.genus, tuple(lin), tuple(tr))


def _relator_prefix_orbit(rep: EuclideanRep):
    """Values f_j = rho(w_j)(0) for prefixes w_j of the relator word."""
    exact = rep.exact
    zero = ExactScalar(0) if exact else 0.0
    one = ExactScalar(1) if exact else 1.0
    acc = AffineElement(one, zero)
    out = [acc.b]
    sr = rep.to_surface_rep()
    for i in range(1, rep.genus + 1):
        a, b = sr.a(i), sr.b(i)
        for e in (a, b, a.inverse(), b.inverse()):
            acc = acc * e
            out.append(acc.b)
    return out


def _signed_area2(p, q, r):
    """Twice the signed area of the triangle (p, q, r): det(q-p, r-p)."""
    return cross(scalar_sub(q, p), scalar_sub(r, p))


def volume_pl(rep: EuclideanRep | SurfaceRep, center=None):
    """Signed area of the piecewise-affine equivariant map on the 4g-gon.

    Exact inputs give a Fraction (in units of Im(u) for the basis u of the
    scalar field; volumes and lattice areas share the unit, so comparisons
    stay exact).  Float inputs give a float.
    """
    if isinstance(rep, SurfaceRep):
        rep = EuclideanRep.from_surface_rep(rep)
    fs = _relator_prefix_orbit(rep)
    if center is None:
        if rep.exact:
            center = ExactScalar(0)
        else:
            center = sum(complex(f) for f in fs) / len(fs)
    total = Fraction(0) if rep.exact else 0.0
    for f, fn in zip(fs, fs[1:] + fs[:1]):
        total += _signed_area2(center, f, fn)
    return total / 2


def volume_closed_form(rep: EuclideanRep | SurfaceRep):
    """Sum of det(t(a_i), t(b_i)); only valid for trivial linear part."""
    if isinstance(rep, SurfaceRep):
        rep = EuclideanRep.from_surface_rep(rep)
    one = ExactScalar(1) if rep.exact else 1.0
    for a in rep.linear:
        if not scalar_eq(a, one):
            raise VolumeError("closed form requires trivial linear part")
    total = Fraction(0) if rep.exact else 0.0
    for i in range(rep.genus):
        total += cross(rep.translation[2 * i], rep.translation[2 * i + 1])
    return total


# ---------------------------------------------------------------------------
# linear part order and normal form
# ---------------------------------------------------------------------------

def _scalar_key(a):
    if is_exact(a):
        return ("e", a.x, a.y, "1" if a.y == 0 else a.basis)
    c = complex(a)
    return ("f", round(c.real, 8), round(c.imag, 8))


def linear_order(rep: EuclideanRep, cap: int = 4096):
    """Order of the multiplicative group generated by the linear parts, or
    None when it exceeds the cap (infinite for all practical purposes)."""
    one = ExactScalar(1) if rep.exact else 1.0 + 0j
    seen = {_scalar_key(one): one}
    frontier = [one]
    gens = [a for a in rep.linear if not scalar_eq(a, one)]
    while frontier:
        cur = frontier.pop()
        for gexp in gens:
            v = scalar_mul(cur, gexp)
            k = _scalar_key(v)
            if k not in seen:
                if len(seen) >= cap:
                    return None
                seen[k] = v
                frontier.append(v)
    return len(seen)


def _linear_exponents(rep: EuclideanRep, n: int):
    """Write each linear part as zeta^e with zeta = exp(2 pi i / n)."""
    out = []
    if rep.exact:
        zeta = root_of_unity(n)
        powers = []
        p = ExactScalar(1)
        for _ in range(n):
            powers.append(p)
            p = p * zeta
        for a in rep.linear:
            for e, pw in enumerate(powers):
                if a == pw or (pw.basis != a.basis and a.y == 0 and pw.y == 0 and a.x == pw.x):
                    out.append(e)
                    break
            else:
                raise VolumeError("linear part is not a power of the root")
        return out
    for a in rep.linear:
        th = cmath.phase(complex(a))
        e = round(th * n / (2 * math.pi)) % n
        if abs(complex(a) - cmath.exp(2j * math.pi * e / n)) > 1e-6:
            raise VolumeError("linear part is not a power of the root")
        out.append(e)
    return out


def conjugate_by_translation(rep: EuclideanRep, t) -> EuclideanRep:
    """Conjugate by z -> z + t: translation parts become b + (1 - a) t."""
    one = ExactScalar(1) if rep.exact else 1.0
    new_tr = tuple(
        scalar_add(b, scalar_mul(scalar_sub(one, a), t))
        for a, b in zip(rep.linear, rep.translation)
    )
    return EuclideanRep(rep.genus, rep.linear, new_tr)


def normal_form_finite_linear(rep: EuclideanRep | SurfaceRep):
    """Bring a Euclidean representation with finite linear image of order
    n >= 2 to the form (zeta z, z, z + t_3, ..., z + t_2g).

    Returns (normal_rep, record) with record = {"moves": word,
    "translation": t}; replaying the word and the conjugation on the input
    reproduces the output.
    """
    if isinstance(rep, SurfaceRep):
        rep = EuclideanRep.from_surface_rep(rep)
    n = linear_order(rep)
    if n is None:
        raise VolumeError("linear part has infinite image")
    if n < 2:
        raise VolumeError("normal form needs linear order >= 2")
    from .orbits import apply_moves, canonical_form_cyclic

    exps = _linear_exponents(rep, n)
    cyc = SurfaceRep(
        rep.genus, [DihedralElement(n, e, 0) for e in exps], f"cyclic({n})"
    )
    canon, moves = canonical_form_cyclic(cyc)
    got = [e.rot for e in canon.images]
    if got[0] != 1 or any(v != 0 for v in got[1:]):
        raise VolumeError(
            "linear exponents do not generate the full cyclic group"
        )
    moved = apply_moves(rep.to_surface_rep(), moves)
    moved = EuclideanRep.from_surface_rep(moved)
    zeta = moved.linear[0]
    one = ExactScalar(1) if moved.exact else 1.0
    t = scalar_div(moved.translation[0], scalar_sub(one, zeta))
    t = scalar_sub(ExactScalar(0) if moved.exact else 0.0, t)
    out = conjugate_by_translation(moved, t)
    # the relator forces the b_1 translation to vanish once a_1 is zeta z
    if not scalar_is_zero(out.translation[1], tol=1e-6):
        raise AssertionError("b_1 translation did not vanish in normal form")
    # snap it exactly in float mode
    tr = list(out.translation)
    tr[0] = ExactScalar(0) if out.exact else 0.0
    tr[1] = ExactScalar(0) if out.exact else 0.0
    out = EuclideanRep(out.genus, out.linear, tuple(tr))
    return out, {"moves": moves, "translation": t}


# ---------------------------------------------------------------------------
# the translation subgroup Lambda
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeInfo:
    rank: object  # 0 | 1 | 2 | "dense"
    basis: tuple
    area: object = None  # Fraction (exact, in units of Im(u)) or float

    @property
    def is_lattice(self) -> bool:
        return self.rank == 2

    def to_json(self) -> dict:
        def enc(v):
            c = complex(v)
            return [c.real, c.imag]

        return {
            "rank": self.rank,
            "basis": [enc(b) for b in self.basis],
            "area": float(self.area) if self.area is not None else None,
        }


def _re_inner(z, w):
    """Re(conj(z) w): rational for exact scalars, float otherwise."""
    if is_exact(z) and is_exact(w):
        from .scalars import _TRACE

        # Re(x + y u) = x + y Re(u); Re(u) = trace(u)/2 is rational
        p = z.conj() * w
        return p.x + p.y * _TRACE[p.basis] / 2
    return (complex(z).conjugate() * complex(w)).real


def _norm2(z):
    if is_exact(z):
        return z.norm2()
    return abs(complex(z)) ** 2


def _gauss_reduce_pair(b1, b2):
    """Two-dimensional Gauss reduction; exact or float."""
    while True:
        if _norm2(b1) > _norm2(b2):
            b1, b2 = b2, b1
        n1 = _norm2(b1)
        if n1 == 0:
            return b1, b2
        mu = _re_inner(b1, b2) / n1
        k = int(math.floor(float(mu) + 0.5))
        if k == 0:
            return b1, b2
        if is_exact(b2):
            b2 = b2 - ExactScalar(k) * b1
        else:
            b2 = complex(b2) - k * complex(b1)


def _lattice_exact(gens):
    """Integer lattice analysis in the coordinates (1, u)."""
    vecs = []
    basis_tag = "1"
    for z in gens:
        if z.basis != "1":
            basis_tag = z.basis
    den = 1
    for z in gens:
        den = den * z.x.denominator // math.gcd(den, z.x.denominator)
        den = den * z.y.denominator // math.gcd(den, z.y.denominator)
    for z in gens:
        vecs.append((int(z.x * den), int(z.y * den)))
    # Hermite normal form by integer row operations (each Euclid step
    # subtracts an integer multiple of one row from another, so the row
    # span never changes)
    pivot = None  # (a, b) with a > 0
    c = 0  # gcd of the second coordinates of first-coordinate-zero rows
    for x, y in vecs:
        if x != 0 and pivot is None:
            pivot = (x, y)
            continue
        if x != 0:
            a, b = pivot
            while x:
                q = a // x
                a, b, x, y = x, y, a - q * x, b - q * y
            pivot = (a, b)
        if y:
            c = math.gcd(c, abs(y))
    rows = []
    if pivot is not None:
        a, b = pivot
        if a < 0:
            a, b = -a, -b
        if c:
            b %= c
        rows.append((a, b))
    if c:
        rows.append((0, c))
    basis = [
        ExactScalar(Fraction(a, den), Fraction(b, den), basis_tag)
        for a, b in rows
    ]
    if len(basis) == 2:
        basis = list(_gauss_reduce_pair(*basis))
        area = abs(cross(basis[0], basis[1]))
        return LatticeInfo(2, tuple(basis), area)
    if len(basis) == 1:
        return LatticeInfo(1, tuple(basis))
    return LatticeInfo(0, ())


def _lattice_float(gens):
    """Iterative pairwise Gauss reduction of the generator pool.

    Vectors whose reduced length lands strictly between the zero cutoff and
    TAU_LAT signal an indiscrete (dense) translation group; exact
    cancellations fall below the zero cutoff.
    """
    scale = max(abs(complex(g)) for g in gens)
    pool = [complex(g) for g in gens if abs(complex(g)) > _ZERO_LAT * scale]
    if not pool:
        return LatticeInfo(0, ())

    for _ in range(60):
        kept = []
        for v in pool:
            if abs(v) < _ZERO_LAT * scale:
                continue
            if abs(v) < TAU_LAT * scale:
                return LatticeInfo("dense", ())
            kept.append(v)
        pool = sorted(kept, key=abs)
        changed = False
        # reduce each vector along every shorter one (one-dimensional steps)
        for idx in range(1, len(pool)):
            v = pool[idx]
            for b in pool[:idx]:
                if abs(b) < _ZERO_LAT * scale or abs(v) < _ZERO_LAT * scale:
                    continue
                k = round((v * b.conjugate()).real / abs(b) ** 2)
                if k:
                    v = v - k * b
                    changed = True
            pool[idx] = v
        if changed:
            continue
        if len(pool) <= 2:
            break
        # pairwise-reduced with three or more survivors: use the closest
        # lattice point of the two shortest if they are independent
        b1, b2 = pool[0], pool[1]
        det = (b1.conjugate() * b2).imag
        if abs(det) < TAU_LAT * scale * abs(b1) * abs(b2):
            # nearly collinear and mutually irreducible: indiscrete
            return LatticeInfo("dense", ())
        progressed = False
        rest = []
        for v in pool[2:]:
            x = (v.conjugate() * b2).imag / det
            y = (b1.conjugate() * v).imag / det
            v2 = v - round(x) * b1 - round(y) * b2
            if abs(v2 - v) > _ZERO_LAT * scale:
                progressed = True
            rest.append(v2)
        pool = [b1, b2] + rest
        if not progressed:
            # residuals stuck inside the fundamental cell
            return LatticeInfo("dense", ())
    else:
        return LatticeInfo("dense", ())

    pool = [v for v in pool if abs(v) > _ZERO_LAT * scale]
    if len(pool) > 2:
        return LatticeInfo("dense", ())
    if len(pool) == 2:
        b1, b2 = _gauss_reduce_pair(*pool)
        if abs(b1) < TAU_LAT * scale:
            return LatticeInfo("dense", ())
        area = abs((b1.conjugate() * b2).imag)
        if area < (TAU_LAT * scale) ** 2:
            return LatticeInfo("dense", ())
        return LatticeInfo(2, (b1, b2), area)
    if len(pool) == 1:
        return LatticeInfo(1, tuple(pool))
    return LatticeInfo(0, ())


def lattice_generators(rep: EuclideanRep | SurfaceRep):
    """Generators of Lambda = translations contained in the image."""
    if isinstance(rep, SurfaceRep):
        rep = EuclideanRep.from_surface_rep(rep)
    n = linear_order(rep)
    if n is None:
        raise VolumeError(
            "infinite linear part: Lambda computed from ker alpha generators "
            "is out of scope"
        )
    if n == 1:
        return [t for t in rep.translation if not scalar_is_zero(t)]
    nf, _ = normal_form_finite_linear(rep)
    zeta = nf.linear[0]
    gens = []
    for t in nf.translation[2:]:
        if scalar_is_zero(t):
            continue
        p = ExactScalar(1) if nf.exact else 1.0
        for _ in range(n):
            gens.append(scalar_mul(p, t))
            p = scalar_mul(p, zeta)
    return gens


def lattice_of(rep: EuclideanRep | SurfaceRep) -> LatticeInfo:
    """Rank, reduced basis and covolume of Lambda."""
    if isinstance(rep, SurfaceRep):
        rep = EuclideanRep.from_surface_rep(rep)
    gens = lattice_generators(rep)
    if not gens:
        return LatticeInfo(0, ())
    if all(is_exact(g) for g in gens):
        return _lattice_exact(gens)
    return _lattice_float(gens)
