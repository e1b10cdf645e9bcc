"""Torus-invariant constructible functions and their push-forward.

A constructible function assigns an integer to every orbit, i.e. to every
cone.  Push-forward along a toric morphism weights each orbit by the
compactly-supported Euler characteristic of the fibers of the induced orbit
map: a finite fiber of size d contributes d, a positive-dimensional torus
fiber contributes 0.
"""

from __future__ import annotations

import random
from typing import Mapping

from .errors import ValidationError
from .fans import Cone, Fan, ToricMorphism, image_smallest_cone, orbit_map_degree


class ConstructibleFunction:
    """Integer values on the orbits of a fan, stored sparsely (default 0)."""

    __slots__ = ("fan", "values")

    def __init__(self, fan: Fan, values: Mapping[Cone, int]):
        clean: dict[Cone, int] = {}
        for cone, value in values.items():
            if cone not in fan.cones:
                raise ValidationError(f"cone {cone.key} is not in fan {fan.name}")
            value = int(value)
            if value:
                clean[cone] = value
        self.fan = fan
        self.values = clean

    @classmethod
    def constant(cls, fan: Fan, value: int) -> "ConstructibleFunction":
        return cls(fan, {c: value for c in fan.sorted_cones})

    def value(self, cone: Cone) -> int:
        return self.values.get(cone, 0)

    @property
    def is_zero(self) -> bool:
        return not self.values

    def __add__(self, other: "ConstructibleFunction") -> "ConstructibleFunction":
        self._same_fan(other)
        out = dict(self.values)
        for c, v in other.values.items():
            out[c] = out.get(c, 0) + v
        return ConstructibleFunction(self.fan, out)

    def __sub__(self, other: "ConstructibleFunction") -> "ConstructibleFunction":
        return self + (-1) * other

    def __rmul__(self, scalar: int) -> "ConstructibleFunction":
        return ConstructibleFunction(self.fan, {c: scalar * v for c, v in self.values.items()})

    def pointwise_max(self, other: "ConstructibleFunction") -> "ConstructibleFunction":
        self._same_fan(other)
        return ConstructibleFunction(
            self.fan,
            {c: max(self.value(c), other.value(c)) for c in self.fan.sorted_cones})

    def pointwise_min(self, other: "ConstructibleFunction") -> "ConstructibleFunction":
        self._same_fan(other)
        return ConstructibleFunction(
            self.fan,
            {c: min(self.value(c), other.value(c)) for c in self.fan.sorted_cones})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ConstructibleFunction)
            and self.fan == other.fan
            and self.values == other.values
        )

    def __repr__(self) -> str:
        body = ", ".join(f"{c.key or 'o'}:{v}" for c, v in sorted(
            self.values.items(), key=lambda kv: (kv[0].dim, kv[0].ray_indices)))
        return f"ConstructibleFunction({self.fan.name}: {{{body}}})"

    def to_json(self) -> dict[str, int]:
        items = sorted(self.values.items(), key=lambda kv: (kv[0].dim, kv[0].key))
        return {c.key: v for c, v in items}

    def _same_fan(self, other: "ConstructibleFunction") -> None:
        if self.fan != other.fan:
            raise ValidationError("constructible functions live on different fans")


def indicator_of_orbit_closure(fan: Fan, cone: Cone) -> ConstructibleFunction:
    """The function that is 1 on the orbit closure of the cone: value 1 on
    every cone containing it."""
    if cone not in fan.cones:
        raise ValidationError(f"cone {cone.key} is not in fan {fan.name}")
    return ConstructibleFunction(
        fan, {c: 1 for c in fan.sorted_cones if cone.is_face_of(c)})


def euler_characteristic(phi: ConstructibleFunction) -> int:
    """Compactly-supported Euler characteristic: orbits are tori, so only
    the zero-dimensional orbits (maximal cones) contribute."""
    fan = phi.fan
    if not fan.is_complete:
        raise ValidationError(f"fan {fan.name} is not complete")
    return sum(phi.value(c) for c in fan.cones_of_dim(fan.dim))


def pushforward_function(m: ToricMorphism, phi: ConstructibleFunction) -> ConstructibleFunction:
    """Push a constructible function forward along a toric morphism.

    Each source orbit lands in the orbit of the smallest target cone
    containing its image; the fiber of that orbit map is either a finite set
    (when the orbit dimensions agree and the induced lattice map has finite
    cokernel) or contains a positive-dimensional torus and contributes 0.
    """
    if not m.source.is_complete:
        raise ValidationError(f"source fan {m.source.name} is not complete")
    if not m.is_compatible:
        raise ValidationError("incompatible morphism")
    if phi.fan != m.source:
        raise ValidationError("function does not live on the source fan")
    out: dict[Cone, int] = {}
    for cone, value in phi.values.items():
        target_cone = image_smallest_cone(m, cone)
        fiber_size = orbit_map_degree(m, cone, target_cone)
        if fiber_size is None:
            continue
        out[target_cone] = out.get(target_cone, 0) + value * fiber_size
    return ConstructibleFunction(m.target, out)


def random_function(fan: Fan, rng: random.Random, low: int = -3, high: int = 3) -> ConstructibleFunction:
    """A reproducible random function, drawn cone by cone in canonical order."""
    return ConstructibleFunction(
        fan, {c: rng.randint(low, high) for c in fan.sorted_cones})
