"""Rational polyhedral fans for smooth complete toric varieties.

A fan is stored as a list of primitive ray generators plus a face-closed set
of cones, each cone being the set of indices of the rays it spans.  All fans
in scope are simplicial and smooth, which keeps every geometric test exact:
membership of a lattice point in a cone reduces to an integer solve, and
cone overlaps are decided by Fourier-Motzkin elimination over the integers.

Star subdivisions model blow-ups along orbit closures; star quotients model
the orbit closures themselves; lattice maps compatible with the cone
structure model toric morphisms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from math import gcd
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError
from .lattice import (
    LatticeMatrix,
    LatticeVector,
    cokernel_index,
    kernel_basis,
    matrix_of_rays,
    quotient_projection,
    smith_normal_form,
    solve_integer,
    zero_vector,
)


@dataclass(frozen=True, order=True)
class Cone:
    """A cone of a fan, as the sorted tuple of the ray indices it spans."""

    ray_indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.ray_indices)
        if any(i < 0 for i in idx):
            raise ValidationError(f"negative ray index in cone {idx}")
        if len(set(idx)) != len(idx):
            raise ValidationError(f"repeated ray index in cone {idx}")
        object.__setattr__(self, "ray_indices", tuple(sorted(idx)))

    @property
    def dim(self) -> int:
        return len(self.ray_indices)

    @property
    def key(self) -> str:
        return ",".join(str(i) for i in self.ray_indices)

    @classmethod
    def from_key(cls, key: str) -> "Cone":
        if key == "":
            return cls(())
        return cls(tuple(int(part) for part in key.split(",")))

    def is_face_of(self, other: "Cone") -> bool:
        return set(self.ray_indices) <= set(other.ray_indices)

    def with_ray(self, i: int) -> "Cone":
        return Cone(self.ray_indices + (i,))

    def without_ray(self, i: int) -> "Cone":
        return Cone(tuple(j for j in self.ray_indices if j != i))

    def faces(self) -> Iterable["Cone"]:
        for k in range(len(self.ray_indices) + 1):
            for sub in combinations(self.ray_indices, k):
                yield Cone(sub)

    def __iter__(self):
        return iter(self.ray_indices)

    def __repr__(self) -> str:
        return f"Cone(({self.key}))"


ZERO_CONE = Cone(())


@dataclass(frozen=True)
class FanViolation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.detail}"


@dataclass(frozen=True)
class FanReport:
    """Diagnostics produced by validate(); empty tuples mean all good."""

    violations: tuple[FanViolation, ...]
    completeness_violations: tuple[FanViolation, ...]

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def complete(self) -> bool:
        return self.valid and not self.completeness_violations

    @property
    def smooth(self) -> bool:
        return not any(v.kind in ("smoothness", "independence") for v in self.violations)

    def summary(self) -> str:
        lines = [str(v) for v in self.violations]
        lines += [str(v) for v in self.completeness_violations]
        return "\n".join(lines) if lines else "ok"


@dataclass(frozen=True)
class Fan:
    """A fan in Z^dim.  Equality and hashing are structural and ignore the
    name, so fans rebuilt from files compare equal to generated ones."""

    name: str = field(compare=False)
    dim: int
    rays: tuple[LatticeVector, ...]
    cones: frozenset[Cone]

    def ray(self, i: int) -> LatticeVector:
        return self.rays[i]

    @cached_property
    def sorted_cones(self) -> tuple[Cone, ...]:
        return tuple(sorted(self.cones, key=lambda c: (c.dim, c.ray_indices)))

    @cached_property
    def maximal_cones(self) -> tuple[Cone, ...]:
        maximal = [
            c for c in self.sorted_cones
            if not any(c is not d and c.is_face_of(d) for d in self.cones)
        ]
        return tuple(maximal)

    @cached_property
    def cones_by_dim(self) -> Mapping[int, tuple[Cone, ...]]:
        out: dict[int, list[Cone]] = {}
        for c in self.sorted_cones:
            out.setdefault(c.dim, []).append(c)
        return MappingProxyType({k: tuple(v) for k, v in out.items()})

    def cones_of_dim(self, k: int) -> tuple[Cone, ...]:
        return self.cones_by_dim.get(k, ())

    def cone_matrix(self, c: Cone) -> LatticeMatrix:
        """Matrix whose columns are the primitive generators of c."""
        return matrix_of_rays([self.rays[i] for i in c.ray_indices], dim=self.dim)

    def has_cone(self, c: Cone) -> bool:
        return c in self.cones

    @cached_property
    def report(self) -> FanReport:
        return validate(self)

    @property
    def is_valid(self) -> bool:
        return self.report.valid

    @property
    def is_smooth(self) -> bool:
        return self.report.smooth

    @property
    def is_complete(self) -> bool:
        return self.report.complete

    def __repr__(self) -> str:
        return f"Fan({self.name!r}, dim={self.dim}, rays={len(self.rays)}, cones={len(self.cones)})"


def make_fan(name: str, dim: int,
             rays: Sequence[Sequence[int] | LatticeVector],
             max_cones: Iterable[Iterable[int]]) -> Fan:
    """Build a fan from ray generators and maximal cones; faces are generated."""
    ray_tuple = tuple(
        r if isinstance(r, LatticeVector) else LatticeVector(tuple(r)) for r in rays
    )
    cones: set[Cone] = {ZERO_CONE}
    for raw in max_cones:
        for face in Cone(tuple(raw)).faces():
            cones.add(face)
    for c in cones:
        if any(i >= len(ray_tuple) for i in c.ray_indices):
            raise ValidationError(f"cone {c.key} references a missing ray")
    return Fan(name=name, dim=dim, rays=ray_tuple, cones=frozenset(cones))


# ---------------------------------------------------------------------------
# membership and interiors

def cone_coordinates(fan: Fan, c: Cone, v: LatticeVector) -> LatticeVector | None:
    """Coordinates of v in the generators of c, or None if v is not in the
    integer span.  Smooth cones have saturated spans, so for them this
    decides real membership of lattice points exactly; the membership tests
    below rely on that."""
    if c.dim == 0:
        return LatticeVector(()) if v.is_zero else None
    return solve_integer(fan.cone_matrix(c), v)


def contains_point(fan: Fan, c: Cone, v: LatticeVector) -> bool:
    if c.dim == 0:
        return v.is_zero
    coords = cone_coordinates(fan, c, v)
    return coords is not None and all(x >= 0 for x in coords)


def in_relative_interior(fan: Fan, c: Cone, v: LatticeVector) -> bool:
    if c.dim == 0:
        return v.is_zero
    coords = cone_coordinates(fan, c, v)
    return coords is not None and all(x > 0 for x in coords)


def smallest_containing_cone(fan: Fan, v) -> Cone:
    """The unique cone whose relative interior contains the given point.

    Accepts a LatticeVector, or a sequence of LatticeVectors standing for
    the cone they span; a generic relative-interior point of that cone (the
    sum of the vectors) is then used.
    """
    if not isinstance(v, LatticeVector):
        vs = list(v)
        point = zero_vector(fan.dim)
        for w in vs:
            point = point + w
        v = point
    for c in fan.sorted_cones:
        if in_relative_interior(fan, c, v):
            return c
    raise ValidationError(f"point {v.entries} is outside the support of fan {fan.name}")


# ---------------------------------------------------------------------------
# validation

def _fm_feasible(ineqs: list[tuple[tuple[int, ...], int]], nvars: int) -> bool:
    """Feasibility of {a . t + c >= 0} over the rationals, by integer
    Fourier-Motzkin elimination."""

    def norm(q):
        coeffs, const = q
        g = gcd(*(abs(x) for x in coeffs), abs(const)) if coeffs else abs(const)
        if g > 1:
            coeffs = tuple(x // g for x in coeffs)
            const = const // g
        return coeffs, const

    work = {norm(q) for q in ineqs}
    for var in range(nvars):
        pos, neg, zero = [], [], []
        for q in work:
            cv = q[0][var]
            (pos if cv > 0 else neg if cv < 0 else zero).append(q)
        new = set(zero)
        for (pc, pk) in pos:
            for (nc, nk) in neg:
                a, b = pc[var], -nc[var]
                coeffs = tuple(b * pc[i] + a * nc[i] for i in range(nvars))
                new.add(norm((coeffs, b * pk + a * nk)))
        work = new
    return all(const >= 0 for _, const in work)


def _pair_intersects_properly(fan: Fan, a: Cone, b: Cone) -> bool:
    """Whether cone(a) and cone(b) meet exactly in the face they share.

    Uses the parametrization cone(a) = {U_a l : l >= 0}: any point of the
    intersection solves U_a l = U_b m with l, m >= 0, so the intersection
    exceeds the common face iff some coefficient outside the shared rays can
    be made positive.  Solutions form the integer kernel of [U_a | -U_b];
    positivity is then a Fourier-Motzkin feasibility question.
    """
    if a.is_face_of(b) or b.is_face_of(a):
        return True
    common = set(a.ray_indices) & set(b.ray_indices)
    cols = [fan.rays[i].entries for i in a.ray_indices]
    cols += [tuple(-x for x in fan.rays[i].entries) for i in b.ray_indices]
    stacked = LatticeMatrix.from_columns(cols, rows=fan.dim)
    K = kernel_basis(stacked)
    d = K.cols
    if d == 0:
        return True  # trivial kernel: the cones meet only at the origin
    positions = [
        (pos, idx)
        for pos, idx in enumerate(list(a.ray_indices) + list(b.ray_indices))
        if idx not in common
    ]
    base = [(K.row(j), 0) for j in range(K.rows)]
    for pos, _idx in positions:
        ineqs = base + [(K.row(pos), -1)]
        if _fm_feasible(ineqs, d):
            return False
    return True


def validate(fan: Fan) -> FanReport:
    """Check every structural invariant and the completeness criterion.

    Structural checks: primitive distinct rays, face closure, linear
    independence and smoothness of every cone, and proper pairwise
    intersections.  Completeness (reported separately): the fan is pure of
    top dimension, every facet bounds exactly two maximal cones, and the
    adjacency graph of maximal cones is connected.
    """
    v: list[FanViolation] = []
    n = fan.dim

    seen: dict[tuple[int, ...], int] = {}
    for i, r in enumerate(fan.rays):
        if r.dim != n:
            v.append(FanViolation("ray", f"ray {i} has dimension {r.dim}, expected {n}"))
            continue
        if not r.is_primitive:
            v.append(FanViolation("ray", f"ray {i} = {r.entries} is not primitive"))
        if r.entries in seen:
            v.append(FanViolation("ray", f"ray {i} duplicates ray {seen[r.entries]}"))
        else:
            seen[r.entries] = i

    if ZERO_CONE not in fan.cones:
        v.append(FanViolation("face-closure", "zero cone missing"))

    indexable = True
    for c in fan.sorted_cones:
        if any(i >= len(fan.rays) for i in c.ray_indices):
            v.append(FanViolation("cone", f"cone {c.key} references a missing ray"))
            indexable = False
    geometry_ok = indexable and not any(x.kind == "ray" for x in v)

    if indexable:
        for c in fan.sorted_cones:
            for i in c.ray_indices:
                if c.without_ray(i) not in fan.cones:
                    v.append(FanViolation(
                        "face-closure",
                        f"face {c.without_ray(i).key} of cone {c.key} missing"))
        for c in fan.sorted_cones:
            if c.dim == 0:
                continue
            snf = smith_normal_form(fan.cone_matrix(c))
            if snf.rank < c.dim:
                v.append(FanViolation(
                    "independence", f"rays of cone {c.key} are linearly dependent"))
                geometry_ok = False
            else:
                index = 1
                for d in snf.diag:
                    if d:
                        index *= d
                if index != 1:
                    v.append(FanViolation(
                        "smoothness", f"cone {c.key} has lattice index {index}"))

    if geometry_ok and not any(x.kind == "independence" for x in v):
        # Proper intersection of maximal pairs implies it for all pairs of a
        # simplicial face-closed collection.
        for a, b in combinations(fan.maximal_cones, 2):
            if not _pair_intersects_properly(fan, a, b):
                v.append(FanViolation(
                    "overlap",
                    f"cones {a.key} and {b.key} intersect outside a common face"))

    cv: list[FanViolation] = []
    if indexable:
        maximal = fan.maximal_cones
        if not maximal or all(c.dim == 0 for c in maximal) and n > 0:
            cv.append(FanViolation("purity", "fan has no top-dimensional cone"))
        for c in maximal:
            if c.dim != n:
                cv.append(FanViolation(
                    "purity", f"maximal cone {c.key} has dimension {c.dim}, expected {n}"))
        if not cv:
            top = [c for c in maximal if c.dim == n]
            for facet in fan.cones_of_dim(n - 1) if n > 0 else ():
                count = sum(1 for c in top if facet.is_face_of(c))
                if count != 2:
                    cv.append(FanViolation(
                        "facets",
                        f"facet {facet.key} lies in {count} maximal cones, expected 2"))
        if not cv and n > 0:
            # connectivity of the facet-adjacency graph
            top = list(fan.maximal_cones)
            reached = {0}
            frontier = [0]
            while frontier:
                cur = frontier.pop()
                for j in range(len(top)):
                    if j in reached:
                        continue
                    shared = set(top[cur].ray_indices) & set(top[j].ray_indices)
                    if len(shared) == n - 1 and Cone(tuple(shared)) in fan.cones:
                        reached.add(j)
                        frontier.append(j)
            if len(reached) != len(top):
                cv.append(FanViolation(
                    "connectivity", "maximal-cone adjacency graph is disconnected"))

    return FanReport(tuple(v), tuple(cv))


# ---------------------------------------------------------------------------
# fan surgery

def orbit_dimension(fan: Fan, c: Cone) -> int:
    """Dimension of the torus orbit attached to c (n minus the cone size)."""
    if c not in fan.cones:
        raise ValidationError(f"cone {c.key} is not in fan {fan.name}")
    return fan.dim - c.dim


def boundary_divisor_cones(fan: Fan, boundary_rays: Iterable[int]) -> tuple[tuple[Cone, ...], tuple[Cone, ...]]:
    """Split the cones by whether their orbit avoids the chosen divisors.

    A cone avoiding every ray of the set has its orbit inside the open
    complement; any cone meeting the set has its orbit inside the divisor.
    """
    s = set(boundary_rays)
    if any(i < 0 or i >= len(fan.rays) for i in s):
        raise ValidationError("boundary ray index out of range")
    inside_u, inside_d = [], []
    for c in fan.sorted_cones:
        (inside_d if s & set(c.ray_indices) else inside_u).append(c)
    return tuple(inside_u), tuple(inside_d)


@lru_cache(maxsize=None)
def star_subdivision(fan: Fan, center: Cone) -> tuple[Fan, "ToricMorphism"]:
    """Star-subdivide at a cone of dimension >= 2 (a smooth blow-up).

    The new ray is the sum of the center's primitive generators; every cone
    containing the center is replaced by its star pieces.  Returns the new
    fan together with the induced morphism down to the original fan (the
    lattice map is the identity).
    """
    if center not in fan.cones:
        raise ValidationError(f"center {center.key} is not a cone of fan {fan.name}")
    if center.dim < 2:
        raise ValidationError(
            f"center {center.key} has dimension {center.dim}; blow-ups along "
            "divisors or the whole space are isomorphisms")
    if not fan.is_smooth:
        raise ValidationError(f"fan {fan.name} is not smooth")
    new_ray = zero_vector(fan.dim)
    for i in center.ray_indices:
        new_ray = new_ray + fan.rays[i]
    nu = len(fan.rays)
    pieces: list[tuple[int, ...]] = []
    for c in fan.sorted_cones:
        if center.is_face_of(c):
            for j in center.ray_indices:
                pieces.append(c.without_ray(j).with_ray(nu).ray_indices)
        else:
            pieces.append(c.ray_indices)
    name = f"{fan.name}_bl_{'_'.join(str(i) for i in center.ray_indices)}"
    out = make_fan(name, fan.dim, fan.rays + (new_ray.primitive(),), pieces)
    down = ToricMorphism(source=out, target=fan, matrix=LatticeMatrix.identity(fan.dim))
    return out, down


@lru_cache(maxsize=None)
def star_quotient_fan(fan: Fan, c: Cone):
    """The fan of the orbit closure of c, in the quotient lattice.

    Returns (quotient fan, to_quotient, from_quotient) where the maps give
    the bijection between cones of the original fan containing c and cones
    of the quotient fan.
    """
    if c not in fan.cones:
        raise ValidationError(f"cone {c.key} is not in fan {fan.name}")
    if not fan.is_smooth:
        raise ValidationError(f"fan {fan.name} is not smooth")
    proj, _ = quotient_projection(fan.cone_matrix(c))
    star = [t for t in fan.sorted_cones if c.is_face_of(t)]
    link_rays = sorted({i for t in star for i in t.ray_indices} - set(c.ray_indices))
    images: list[LatticeVector] = []
    position: dict[int, int] = {}
    for i in link_rays:
        w = proj.apply(fan.rays[i])
        if w.is_zero or not w.is_primitive:
            raise ValidationError(
                f"ray {i} does not stay primitive in the quotient by {c.key}")
        position[i] = len(images)
        images.append(w)
    to_q: dict[Cone, Cone] = {}
    from_q: dict[Cone, Cone] = {}
    mapped = []
    for t in star:
        q = Cone(tuple(position[i] for i in t.ray_indices if i not in c.ray_indices))
        to_q[t] = q
        from_q[q] = t
        mapped.append(q.ray_indices)
    qfan = make_fan(f"{fan.name}_star_{c.key or 'o'}", fan.dim - c.dim, images, mapped)
    return qfan, MappingProxyType(to_q), MappingProxyType(from_q)


def product_fan(x: Fan, y: Fan, name: str | None = None):
    """Product of two fans with the two projections.

    Rays of the first factor come first; maximal cones are the pairwise
    unions of maximal cones of the factors.
    """
    dim = x.dim + y.dim
    rays = [tuple(r.entries) + (0,) * y.dim for r in x.rays]
    rays += [(0,) * x.dim + tuple(r.entries) for r in y.rays]
    shift = len(x.rays)
    maxes = []
    for a in x.maximal_cones:
        for b in y.maximal_cones:
            maxes.append(tuple(a.ray_indices) + tuple(i + shift for i in b.ray_indices))
    fan = make_fan(name or f"{x.name}x{y.name}", dim, rays, maxes)
    eye = LatticeMatrix.identity(dim)
    proj_x = LatticeMatrix.from_rows([list(eye.row(i)) for i in range(x.dim)], cols=dim)
    proj_y = LatticeMatrix.from_rows(
        [list(eye.row(i)) for i in range(x.dim, dim)], cols=dim)
    return fan, ToricMorphism(fan, x, proj_x), ToricMorphism(fan, y, proj_y)


# ---------------------------------------------------------------------------
# morphisms

@dataclass(frozen=True)
class ToricMorphism:
    """A lattice map sending every source cone into some target cone."""

    source: Fan
    target: Fan
    matrix: LatticeMatrix

    def __post_init__(self):
        if self.matrix.rows != self.target.dim or self.matrix.cols != self.source.dim:
            raise ValidationError(
                f"morphism matrix is {self.matrix.rows}x{self.matrix.cols}, "
                f"expected {self.target.dim}x{self.source.dim}")

    @classmethod
    def identity(cls, fan: Fan) -> "ToricMorphism":
        return cls(fan, fan, LatticeMatrix.identity(fan.dim))

    @cached_property
    def is_compatible(self) -> bool:
        return check_compatibility(self)

    def __repr__(self) -> str:
        return f"ToricMorphism({self.source.name} -> {self.target.name})"


def check_compatibility(m: ToricMorphism) -> bool:
    """True iff the image of every source cone lies in some target cone.

    It is enough to test maximal source cones, since images of faces sit
    inside images of the cones they bound.
    """
    for c in m.source.maximal_cones:
        images = [m.matrix.apply(m.source.rays[i]) for i in c.ray_indices]
        if not any(
            all(contains_point(m.target, t, w) for w in images)
            for t in m.target.sorted_cones
        ):
            return False
    return True


def compose(g: ToricMorphism, f: ToricMorphism) -> ToricMorphism:
    """The composite morphism g after f."""
    if f.target != g.source:
        raise ValidationError("morphisms do not compose: target/source fans differ")
    return ToricMorphism(f.source, g.target, g.matrix @ f.matrix)


def image_smallest_cone(m: ToricMorphism, c: Cone) -> Cone:
    """The target cone whose relative interior receives the interior of the
    image of c (computed from the sum of the mapped generators)."""
    images = [m.matrix.apply(m.source.rays[i]) for i in c.ray_indices]
    return smallest_containing_cone(m.target, images)


@lru_cache(maxsize=None)
def _cone_quotient(fan: Fan, c: Cone) -> tuple[LatticeMatrix, LatticeMatrix]:
    return quotient_projection(fan.cone_matrix(c))


def orbit_lattice_map(m: ToricMorphism, source_cone: Cone, target_cone: Cone) -> LatticeMatrix:
    """The induced map between the orbit lattices N/span(source_cone) and
    N/span(target_cone).  Well defined whenever the image of the source cone
    lies in the target cone."""
    _, section = _cone_quotient(m.source, source_cone)
    proj, _ = _cone_quotient(m.target, target_cone)
    return proj @ m.matrix @ section


def orbit_map_degree(m: ToricMorphism, source_cone: Cone, target_cone: Cone) -> int | None:
    """Cardinality of the fibers of the induced map of orbit tori, when the
    orbits have equal dimension and the map is an isogeny; None otherwise
    (the fibers are then positive-dimensional or the dimensions drop)."""
    if (m.source.dim - source_cone.dim) != (m.target.dim - target_cone.dim):
        return None
    return cokernel_index(orbit_lattice_map(m, source_cone, target_cone))
