"""The six obstructions, the decision procedure, and the minimal branching
degree d(rho).

A representation rho of a closed genus-g surface group into PSL(2, C) is the
holonomy of a branched projective structure with branch divisor of orders
(n_1, ..., n_k) if and only if it passes all six checks below.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .classify import (
    AmbiguousClassification,
    ElementaryClass,
    classify,
    finite_image_order,
    sw,
)
from .core import (
    AffineElement,
    BranchData,
    MobiusElement,
    SurfaceRep,
)
from .volume import (
    EuclideanRep,
    VolumeError,
    lattice_of,
    linear_order,
    volume_pl,
)

TAU_VOL = 1e-9


class UnsupportedGenus(ValueError):
    """Raised when the decision API is called with genus 0 or 1."""


@dataclass(frozen=True)
class ObstructionReport:
    parity_ok: bool
    min_degree_ok: bool
    riemann_hurwitz_ok: bool
    volume_ok: bool
    haupt_ok: bool
    genus2_dihedral_ok: bool
    verdict: bool
    annotations: dict = field(default_factory=dict)
    classification: ElementaryClass | None = None
    sw: int | None = None

    def to_json(self) -> dict:
        out = {
            "parity_ok": self.parity_ok,
            "min_degree_ok": self.min_degree_ok,
            "riemann_hurwitz_ok": self.riemann_hurwitz_ok,
            "volume_ok": self.volume_ok,
            "haupt_ok": self.haupt_ok,
            "genus2_dihedral_ok": self.genus2_dihedral_ok,
            "verdict": self.verdict,
            "annotations": dict(self.annotations),
        }
        if self.classification is not None:
            out["classification"] = self.classification.to_json()
        if self.sw is not None:
            out["sw"] = self.sw
        return out


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------

def check_parity(rep: SurfaceRep, bd: BranchData) -> bool:
    """Sum of the branching orders must be even iff rho lifts to SL(2, C)."""
    return bd.total % 2 == sw(rep) % 2


def check_min_degree(cls: ElementaryClass, bd: BranchData, g: int) -> bool:
    """Elementary representations need total >= 2g-2, spherical >= 2g-1."""
    if cls.nonelementary:
        return True
    if cls.spherical:
        return bd.total >= 2 * g - 1
    return bd.total >= 2 * g - 2


def check_riemann_hurwitz(n: int, g: int, bd: BranchData) -> bool:
    """n (chi(Sigma) + total) >= 2 (max + 1) for image of finite order n."""
    mx = bd.max if bd.k else 0
    return n * (2 - 2 * g + bd.total) >= 2 * (mx + 1)


def check_volume(rep, bd: BranchData, g: int) -> bool:
    """At the minimal total 2g-2 a Euclidean holonomy needs Vol > 0."""
    if bd.total != 2 * g - 2:
        return True
    vol = volume_pl(rep)
    if isinstance(vol, Fraction):
        return vol > 0
    return vol > TAU_VOL

def check_haupt(rep, bd: BranchData, g: int) -> bool:
    """At the minimal total, if the translation subgroup Lambda is a lattice
    then n Vol >= (max + 1) Area(C / Lambda)."""
    if bd.total != 2 * g - 2:
        return True
    if isinstance(rep, SurfaceRep):
        rep = EuclideanRep.from_surface_rep(rep)
    n = linear_order(rep)
    if n is None:
        return True
    lam = lattice_of(rep)
    if not lam.is_lattice:
        return True
    mx = bd.max if bd.k else 0
    vol = volume_pl(rep)
    if isinstance(vol, Fraction) and isinstance(lam.area, Fraction):
        return n * vol >= (mx + 1) * lam.area
    return n * float(vol) >= (mx + 1) * float(lam.area) - TAU_VOL


def check_genus2_dihedral(cls: ElementaryClass, sw_val: int, bd: BranchData, g: int) -> bool:
    """A genus-2 lifting dihedral non-affine holonomy excludes divisor (2)."""
    if g != 2 or bd.orders != (2,):
        return True
    return not (cls.dihedral and not cls.affine and sw_val == 0)


# ---------------------------------------------------------------------------
# Euclidean model extraction
# ---------------------------------------------------------------------------

def _euclidean_model(rep: SurfaceRep, cls: ElementaryClass) -> EuclideanRep:
    """Affine coordinates z -> a z + b for a Euclidean representation,
    conjugating its common fixed point to infinity when necessary."""
    if all(isinstance(e, AffineElement) for e in rep.images):
        return EuclideanRep.from_surface_rep(rep)
    p = cls.fixed_point
    if p == "none":
        raise ValueError("no fixed point recorded: not an affine representation")
    images = []
    for e in rep.images:
        if not isinstance(e, MobiusElement):
            raise TypeError("expected Mobius images")
        a, b, c, d = (complex(v) for v in e.entries())
        if p is not None:
            # conjugate by z -> 1/(z - p), which maps p to infinity
            a, b, c, d = d + c * p, c, b + (a - d) * p - c * p * p, a - c * p
        if abs(c) > 1e-6 * max(abs(a), abs(b), abs(d), 1.0):
            raise ValueError("fixed point is not shared: not affine")
        lam = a / d
        lam /= abs(lam)  # clamp the float multiplier onto the unit circle
        images.append(AffineElement(lam, b / d))
    return EuclideanRep.from_surface_rep(
        SurfaceRep(rep.genus, images, "euclidean")
    )


# ---------------------------------------------------------------------------
# decision procedure
# ---------------------------------------------------------------------------

def decide_holonomy(rep: SurfaceRep, bd: BranchData, cap: int = 10000) -> ObstructionReport:
    """Run all six obstructions; the verdict is their conjunction."""
    g = rep.genus
    if g < 2:
        raise UnsupportedGenus("the decision procedure requires genus >= 2")
    cls = classify(rep, cap=cap)
    sw_val = sw(rep)
    notes: dict = {}

    parity_ok = check_parity(rep, bd)

    min_degree_ok = check_min_degree(cls, bd, g)
    if cls.nonelementary:
        notes["min_degree"] = "n/a: nonelementary"

    n = cls.finite_order
    if n is None:
        n = finite_image_order(rep, cap=cap)
    if n is None:
        riemann_hurwitz_ok = True
        if cls.nonelementary:
            notes["riemann_hurwitz"] = "n/a: infinite image"
        else:
            notes["riemann_hurwitz"] = "unverified: cap"
    else:
        riemann_hurwitz_ok = check_riemann_hurwitz(n, g, bd)

    if cls.euclidean and bd.total == 2 * g - 2:
        erep = _euclidean_model(rep, cls)
        volume_ok = check_volume(erep, bd, g)
        haupt_ok = check_haupt(erep, bd, g)
    else:
        volume_ok = True
        haupt_ok = True
        notes["volume"] = "n/a"
        notes["haupt"] = "n/a"

    genus2_dihedral_ok = check_genus2_dihedral(cls, sw_val, bd, g)

    flags = (
        parity_ok,
        min_degree_ok,
        riemann_hurwitz_ok,
        volume_ok,
        haupt_ok,
        genus2_dihedral_ok,
    )
    return ObstructionReport(
        *flags,
        verdict=all(flags),
        annotations=notes,
        classification=cls,
        sw=sw_val,
    )


# ---------------------------------------------------------------------------
# minimal branching degree
# ---------------------------------------------------------------------------

def _euclidean_leaf(rep: SurfaceRep, cls: ElementaryClass, g: int):
    """2g-2 when Vol > 0 and the lattice condition allows it, else 2g."""
    erep = _euclidean_model(rep, cls)
    vol = volume_pl(erep)
    positive = vol > 0 if isinstance(vol, Fraction) else vol > TAU_VOL
    if not positive:
        return 2 * g, "volume <= 0"
    n = linear_order(erep)
    if n is None:
        return 2 * g - 2, "volume > 0, infinite linear part"
    lam = lattice_of(erep)
    if not lam.is_lattice:
        return 2 * g - 2, "volume > 0, Lambda not a lattice"
    if isinstance(vol, Fraction) and isinstance(lam.area, Fraction):
        ok = n * vol >= 2 * lam.area
    else:
        ok = n * float(vol) >= 2 * float(lam.area) - TAU_VOL
    if ok:
        return 2 * g - 2, "volume > 0, n Vol >= 2 Area"
    return 2 * g, "n Vol < 2 Area"


def minimal_degree_report(rep: SurfaceRep, cap: int = 10000) -> dict:
    """Minimal total branching order over admissible divisors, with the
    flowchart path that produced it."""
    g = rep.genus
    if g < 2:
        raise UnsupportedGenus("minimal_degree requires genus >= 2")
    cls = classify(rep, cap=cap)
    sw_val = sw(rep)
    path = []
    if cls.nonelementary:
        path.append("nonelementary")
        deg = 0 if sw_val == 0 else 1
        path.append("sw=0" if sw_val == 0 else "sw=1")
    elif sw_val == 1:
        path.extend(["elementary", "sw=1"])
        deg = 2 * g - 1
    elif cls.spherical:
        path.extend(["elementary", "sw=0", "spherical"])
        if cls.trivial:
            path.append("trivial")
            deg = 2 * g + 2
        else:
            path.append("nontrivial")
            deg = 2 * g
    elif not cls.euclidean:
        path.extend(["elementary", "sw=0", "not spherical", "not euclidean"])
        deg = 2 * g - 2
    else:
        path.extend(["elementary", "sw=0", "not spherical", "euclidean"])
        deg, why = _euclidean_leaf(rep, cls, g)
        path.append(why)
    return {"degree": deg, "path": path, "sw": sw_val}


def minimal_degree(rep: SurfaceRep, cap: int = 10000) -> int:
    return minimal_degree_report(rep, cap=cap)["degree"]
