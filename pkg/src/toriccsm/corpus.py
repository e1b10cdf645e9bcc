"""Bundled fans and morphisms used by the verification suites.

The corpus is small but covers the interesting shapes at desk scale: both
projective spaces up to dimension three, a product, a blow-up and a
Hirzebruch surface, together with the blow-down, the two product
projections, the Hirzebruch ruling and the structure maps to a point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .fans import Fan, ToricMorphism, make_fan, product_fan
from .lattice import LatticeMatrix

if TYPE_CHECKING:
    from .csm import GoodClosure


def projective_space(n: int, name: str | None = None) -> Fan:
    """The fan of n-dimensional projective space: the standard basis rays
    plus their negative sum, with all n-element subsets as maximal cones."""
    if n == 0:
        return make_fan(name or "Pt", 0, [], [()])
    rays = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    maxes = [tuple(j for j in range(n + 1) if j != skip) for skip in range(n + 1)]
    return make_fan(name or f"P{n}", n, rays, maxes)


def point_fan() -> Fan:
    return projective_space(0)


def hirzebruch(a: int, name: str | None = None) -> Fan:
    """The Hirzebruch surface of parameter a >= 0 (a ruled surface over the
    projective line; a = 0 is the product, a = 1 the one-point blow-up)."""
    rays = [(1, 0), (0, 1), (-1, a), (0, -1)]
    return make_fan(name or f"F{a}", 2, rays, [(0, 1), (1, 2), (2, 3), (3, 0)])


def blown_up_plane() -> Fan:
    """The plane blown up at the torus-fixed point of the first maximal
    cone; matches the star subdivision of the plane at that cone exactly."""
    rays = [(1, 0), (0, 1), (-1, -1), (1, 1)]
    return make_fan("BlpP2", 2, rays, [(0, 3), (1, 3), (1, 2), (0, 2)])


@dataclass
class Corpus:
    """Named fans and morphisms the suites iterate over, plus any extra
    closures supplied as files alongside them."""

    fans: dict[str, Fan]
    morphisms: dict[str, ToricMorphism]
    closures: list["GoodClosure"] = field(default_factory=list)

    def composable_pairs(self) -> list[tuple[str, str]]:
        """Ordered pairs (f, g) with g after f defined, f and g distinct."""
        pairs = []
        for nf, f in self.morphisms.items():
            for ng, g in self.morphisms.items():
                if nf != ng and f.target == g.source:
                    pairs.append((nf, ng))
        return sorted(pairs)


def bundled_corpus() -> Corpus:
    p1 = projective_space(1)
    p2 = projective_space(2)
    p3 = projective_space(3)
    pt = point_fan()
    p1xp1, pr1, pr2 = product_fan(p1, p1, name="P1xP1")
    blp2 = blown_up_plane()
    f1 = hirzebruch(1)

    fans = {
        "P1": p1,
        "P2": p2,
        "P1xP1": p1xp1,
        "BlpP2": blp2,
        "F1": f1,
        "P3": p3,
        "Pt": pt,
    }

    def to_point(fan: Fan) -> ToricMorphism:
        return ToricMorphism(fan, pt, LatticeMatrix.from_rows([], cols=fan.dim))

    morphisms = {
        "blowdown": ToricMorphism(blp2, p2, LatticeMatrix.identity(2)),
        "p1xp1_pr1": pr1,
        "p1xp1_pr2": pr2,
        "f1_ruling": ToricMorphism(f1, p1, LatticeMatrix.from_rows([[1, 0]])),
        "p1_to_pt": to_point(p1),
        "p2_to_pt": to_point(p2),
        "p1xp1_to_pt": to_point(p1xp1),
        "blp2_to_pt": to_point(blp2),
        "f1_to_pt": to_point(f1),
        "p3_to_pt": to_point(p3),
    }
    return Corpus(fans, morphisms)
