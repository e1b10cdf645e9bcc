"""Chern-Schwartz-MacPherson classes on smooth complete toric varieties.

The local datum of an open torus-invariant piece U inside a smooth complete
ambient fan is the Chern class of the dual log-tangent bundle along the
added boundary divisor.  Torically the total tangent Chern class is the
product of (1 + D_r) over all rays, so removing the boundary factors leaves

    prod over rays r outside the boundary of (1 + D_r),  capped with [X].

Summing fundamental orbit contributions over the orbit partition gives the
CSM class of any invariant constructible function; for the constant
function 1 this is Ehlers' formula.  The verifiers in this module check, by
exact computation on concrete fans, that the local data glue: they are
stable under blow-up along invariant centers, additive under
inclusion-exclusion, covariant for composable maps, natural against the
constructible push-forward, and multiply by the fiber Euler characteristic
along product fibrations.  Finite diagrams of closures linked by blow-down
maps carry compatible class assignments, the desk-scale shadow of a class
living on the whole inverse system of closures.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

from .chow import (
    CycleClass,
    classes_equal,
    fundamental_class,
    multiply_divisor_polynomial,
    pushforward_cycle,
)
from .constructible import ConstructibleFunction, indicator_of_orbit_closure, pushforward_function
from .errors import ValidationError
from .fans import (
    Cone,
    Fan,
    ToricMorphism,
    compose,
    star_quotient_fan,
    star_subdivision,
)


@dataclass(frozen=True)
class GoodClosure:
    """A smooth complete fan together with a set of boundary rays.

    The pair stands for the open set obtained by deleting the chosen
    boundary divisors; the toric boundary of a smooth toric variety has
    simple normal crossings, so any such pair is an admissible
    compactification of its open part.
    """

    fan: Fan
    boundary: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "boundary", frozenset(int(i) for i in self.boundary))
        if any(i < 0 or i >= len(self.fan.rays) for i in self.boundary):
            raise ValidationError("boundary ray index out of range")
        if not self.fan.is_complete or not self.fan.is_smooth:
            raise ValidationError(
                f"fan {self.fan.name} is not a smooth complete fan: "
                + self.fan.report.summary())

    @property
    def interior_rays(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.fan.rays)) if i not in self.boundary)

    def open_cones(self) -> tuple[Cone, ...]:
        """Cones whose orbits lie in the open part (they avoid the boundary)."""
        return tuple(
            c for c in self.fan.sorted_cones
            if not (self.boundary & set(c.ray_indices)))

    def __repr__(self) -> str:
        S = ",".join(str(i) for i in sorted(self.boundary))
        return f"GoodClosure({self.fan.name}; boundary={{{S}}})"


@lru_cache(maxsize=None)
def local_data(gc: GoodClosure) -> CycleClass:
    """Chern class of the dual log-tangent bundle of the closure along its
    boundary, capped with the fundamental class.

    With boundary rays S this is prod_{r not in S} (1 + D_r) cap [X]: the
    boundary factors of the total tangent Chern class cancel against the
    log poles.  Full boundary gives [X] on the nose (the log-tangent bundle
    along the whole toric boundary is trivial); empty boundary gives the
    total tangent Chern class.
    """
    return multiply_divisor_polynomial(
        gc.fan, gc.interior_rays, fundamental_class(gc.fan))


def csm_class(phi: ConstructibleFunction) -> CycleClass:
    """CSM class of an invariant constructible function: the orbit-sum

        sum over cones c of phi(c) * [V(c)].

    Every orbit, inside its own orbit closure with full boundary, has the
    fundamental class as local datum, so the orbit partition evaluates the
    patched class directly; for phi = 1 this is Ehlers' formula.
    """
    fan = phi.fan
    if not fan.is_complete or not fan.is_smooth:
        raise ValidationError(f"fan {fan.name} is not smooth and complete")
    return CycleClass(fan, dict(phi.values))


LocalData = Callable[[GoodClosure], CycleClass]


def verify_gluing(gc: GoodClosure, data: LocalData = local_data) -> bool:
    """Decomposition independence: the one-piece local datum of the open set
    must agree with the sum of its orbit contributions.

    The `data` hook allows plugging in a candidate local-data table other
    than the log-tangent one, to probe whether it glues the same way; no
    other gluable choice is claimed to exist.
    """
    orbit_sum = CycleClass(gc.fan, {c: 1 for c in gc.open_cones()})
    return classes_equal(data(gc), orbit_sum)


@dataclass(frozen=True, eq=False)
class BlowupCheck:
    """Outcome of the blow-up compatibility identity, with both sides."""

    passed: bool
    lhs: CycleClass
    rhs: CycleClass
    branch: str  # "center_in_boundary" (empty trace) or "center_meets_open"


def verify_blowup_formula(gc: GoodClosure, center: Cone) -> BlowupCheck:
    """Check that the local datum of U in the closure equals the push-forward
    of the datum upstairs plus the contribution of the blow-up center.

    Blowing up the orbit closure W of `center` inserts the barycentric ray;
    upstairs the boundary consists of the old boundary rays plus the
    exceptional one.  When the center meets the open part (no boundary ray
    in the center), its trace contributes the local datum of W, computed on
    the star quotient fan with the induced boundary and pushed back in along
    the cone correspondence.  When the center lies inside the boundary the
    trace is empty and contributes zero.
    """
    fan = gc.fan
    blown, down = star_subdivision(fan, center)
    exceptional = len(fan.rays)
    upstairs = GoodClosure(blown, frozenset(gc.boundary | {exceptional}))
    rhs = pushforward_cycle(down, local_data(upstairs))

    if gc.boundary & set(center.ray_indices):
        branch = "center_in_boundary"
    else:
        branch = "center_meets_open"
        qfan, to_q, from_q = star_quotient_fan(fan, center)
        induced_boundary = set()
        for r in sorted(gc.boundary):  # disjoint from the center in this branch
            bigger = center.with_ray(r)
            if bigger in fan.cones:
                induced_boundary.update(to_q[bigger].ray_indices)
        w_datum = local_data(GoodClosure(qfan, frozenset(induced_boundary)))
        rhs = rhs + CycleClass(
            fan, {from_q[c]: v for c, v in w_datum.coefficients.items()})

    lhs = local_data(gc)
    return BlowupCheck(classes_equal(lhs, rhs), lhs, rhs, branch)


@dataclass(frozen=True, eq=False)
class NaturalityCheck:
    passed: bool
    lhs: CycleClass  # push-forward of the CSM class
    rhs: CycleClass  # CSM class of the pushed function


def verify_naturality(m: ToricMorphism, phi: ConstructibleFunction) -> NaturalityCheck:
    """Push-forward then CSM versus CSM then push-forward."""
    lhs = pushforward_cycle(m, csm_class(phi))
    rhs = csm_class(pushforward_function(m, phi))
    return NaturalityCheck(classes_equal(lhs, rhs), lhs, rhs)


def verify_covariance(f: ToricMorphism, g: ToricMorphism, phi: ConstructibleFunction) -> bool:
    """Push-forward along the composite equals the two-step push-forward,
    value by value."""
    combined = pushforward_function(compose(g, f), phi)
    stepwise = pushforward_function(g, pushforward_function(f, phi))
    return combined == stepwise


def verify_fibration(m: ToricMorphism, fiber: Fan) -> bool:
    """For the projection off a product factor, the push-forward of the CSM
    class of the total space is the fiber's Euler characteristic times the
    CSM class of the base.  The fiber Euler characteristic is counted
    combinatorially (number of maximal cones = number of fixed points)."""
    fiber_euler = len(fiber.maximal_cones)
    lhs = pushforward_cycle(m, csm_class(ConstructibleFunction.constant(m.source, 1)))
    rhs = fiber_euler * csm_class(ConstructibleFunction.constant(m.target, 1))
    return classes_equal(lhs, rhs)


def verify_inclusion_exclusion(fan: Fan, c1: Cone, c2: Cone) -> bool:
    """CSM of a union of two orbit closures by inclusion-exclusion."""
    if c1 not in fan.cones or c2 not in fan.cones:
        raise ValidationError("cones are not in the fan")
    one = indicator_of_orbit_closure(fan, c1)
    two = indicator_of_orbit_closure(fan, c2)
    union = one.pointwise_max(two)
    intersection = one.pointwise_min(two)
    lhs = csm_class(union)
    rhs = csm_class(one) + csm_class(two) - csm_class(intersection)
    return classes_equal(lhs, rhs)


# ---------------------------------------------------------------------------
# finite diagrams of closures

@dataclass(frozen=True, eq=False)
class BlowupEdge:
    """A blow-down arrow between named closures: the source fan is the star
    subdivision of the target fan at the center."""

    source: str
    target: str
    center: Cone
    morphism: ToricMorphism


@dataclass(frozen=True, eq=False)
class ProChowElement:
    """A class assignment on a finite diagram of closures.

    Whether all nodes present the same open set is the caller's intent and
    is recorded by the diagram shape, not enforced; compatibility along the
    edges is what verify_prochow_compatibility checks.
    """

    nodes: Mapping[str, GoodClosure]
    edges: tuple[BlowupEdge, ...]
    classes: Mapping[str, CycleClass]

    def with_class(self, node: str, cls: CycleClass) -> "ProChowElement":
        if node not in self.nodes:
            raise ValidationError(f"unknown node {node!r}")
        updated = dict(self.classes)
        updated[node] = cls
        return ProChowElement(self.nodes, self.edges, updated)


def prochow_assign_local_data(nodes: Mapping[str, GoodClosure],
                              edges) -> ProChowElement:
    """Assign each node its log-tangent local datum, after checking that
    every edge really is a star subdivision between the named nodes."""
    edge_tuple = tuple(edges)
    for e in edge_tuple:
        if e.source not in nodes or e.target not in nodes:
            raise ValidationError(f"edge {e.source}->{e.target} names unknown nodes")
        blown, down = star_subdivision(nodes[e.target].fan, e.center)
        if blown != nodes[e.source].fan:
            raise ValidationError(
                f"edge {e.source}->{e.target}: source fan is not the star "
                f"subdivision of the target at {e.center.key}")
        if e.morphism.source != blown or e.morphism.target != nodes[e.target].fan \
                or e.morphism.matrix != down.matrix:
            raise ValidationError(
                f"edge {e.source}->{e.target}: morphism does not match the "
                "star subdivision")
    classes = {name: local_data(gc) for name, gc in nodes.items()}
    return ProChowElement(dict(nodes), edge_tuple, classes)


def verify_prochow_compatibility(element: ProChowElement) -> bool:
    """Along every blow-down edge, the class upstairs must push to the class
    downstairs."""
    for e in element.edges:
        pushed = pushforward_cycle(e.morphism, element.classes[e.source])
        if not classes_equal(pushed, element.classes[e.target]):
            return False
    return True


def two_node_diagram(gc: GoodClosure, center: Cone) -> ProChowElement:
    """The basic compatible diagram: a closure and its blow-up at a center
    inside the boundary, both presenting the same open set.

    Requires the center to contain a boundary ray, so that the blown-up
    locus is disjoint from the open part and the subdivided node (with the
    exceptional ray added to the boundary) presents the same open set.
    """
    if not (gc.boundary & set(center.ray_indices)):
        raise ValidationError(
            f"center {center.key} meets the open part; the subdivision would "
            "present a smaller open set")
    blown, down = star_subdivision(gc.fan, center)
    upstairs = GoodClosure(blown, frozenset(gc.boundary | {len(gc.fan.rays)}))
    nodes = {"base": gc, "blowup": upstairs}
    edge = BlowupEdge("blowup", "base", center, down)
    return prochow_assign_local_data(nodes, [edge])
