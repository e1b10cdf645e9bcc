"""Named verification suites over a corpus of fans and morphisms.

Each suite runs a family of exact identity checks and returns one record
per instance; the CLI serializes the records as JSON lines and the
acceptance tests assert on them directly.  Randomized suites draw from a
seeded generator in a fixed iteration order, so a (seed, trials) pair
reproduces a run bit for bit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dataclass_field

from .chow import (
    CycleClass,
    classes_equal,
    degree,
    fundamental_class,
    multiply_divisor,
    pushforward_cycle,
)
from .constructible import (
    ConstructibleFunction,
    euler_characteristic,
    pushforward_function,
    random_function,
)
from .corpus import Corpus
from .csm import (
    GoodClosure,
    csm_class,
    local_data,
    two_node_diagram,
    verify_blowup_formula,
    verify_covariance,
    verify_fibration,
    verify_gluing,
    verify_naturality,
    verify_prochow_compatibility,
)
from .errors import ValidationError
from .fans import Fan, compose, product_fan
from .lattice import LatticeVector, kernel_basis, solve_integer


@dataclass
class Check:
    """One verified instance, ready for the JSON-lines report."""

    check: str
    instance: str
    passed: bool
    lhs: object = None
    rhs: object = None
    degree_lhs: int | None = None
    degree_rhs: int | None = None
    extra: dict = dataclass_field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "check": self.check,
            "instance": self.instance,
            "pass": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "degree_lhs": self.degree_lhs,
            "degree_rhs": self.degree_rhs,
        }
        out.update(self.extra)
        return out


def _rng(seed: int, suite: str) -> random.Random:
    # Seeding from a string goes through a hash of its bytes, which is
    # stable across processes (unlike hash() on strings).
    return random.Random(f"{seed}:{suite}")


def _boundary_subsets(fan: Fan):
    n = len(fan.rays)
    for mask in range(1 << n):
        yield frozenset(i for i in range(n) if mask >> i & 1)


def _subset_label(s) -> str:
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


def _closures(corpus: Corpus):
    for name, fan in sorted(corpus.fans.items()):
        for S in _boundary_subsets(fan):
            yield f"{name}|S={_subset_label(S)}", GoodClosure(fan, S)
    for i, gc in enumerate(corpus.closures):
        yield f"closure[{i}]|S={_subset_label(gc.boundary)}", gc


def _blowup_centers(fan: Fan):
    for c in fan.sorted_cones:
        if c.dim >= 2:
            yield c


# ---------------------------------------------------------------------------
# suites

def suite_normalization(corpus: Corpus, seed: int, trials: int) -> list[Check]:
    """Degree of the CSM class of the constant function 1 equals the number
    of torus-fixed points (maximal cones)."""
    out = []
    for name, fan in sorted(corpus.fans.items()):
        total = csm_class(ConstructibleFunction.constant(fan, 1))
        fixed_points = len(fan.maximal_cones)
        out.append(Check(
            check="normalization",
            instance=name,
            passed=degree(total) == fixed_points,
            lhs=total.to_json(),
            degree_lhs=degree(total),
            degree_rhs=fixed_points,
        ))
    return out


def suite_gluing(corpus: Corpus, seed: int, trials: int) -> list[Check]:
    """Local datum of every boundary subset equals its orbit-sum class."""
    out = []
    for label, gc in _closures(corpus):
        lhs = local_data(gc)
        rhs = CycleClass(gc.fan, {c: 1 for c in gc.open_cones()})
        out.append(Check(
            check="gluing",
            instance=label,
            passed=verify_gluing(gc),
            lhs=lhs.to_json(),
            rhs=rhs.to_json(),
            degree_lhs=degree(lhs),
            degree_rhs=degree(rhs),
        ))
    return out


def suite_blowup(corpus: Corpus, seed: int, trials: int) -> list[Check]:
    """Blow-up compatibility of the local data for every closure and every
    invariant center of dimension at least two."""
    out = []
    for label, gc in _closures(corpus):
        for center in _blowup_centers(gc.fan):
            result = verify_blowup_formula(gc, center)
            out.append(Check(
                check="blowup",
                instance=f"{label}|center={center.key}",
                passed=result.passed,
                lhs=result.lhs.to_json(),
                rhs=result.rhs.to_json(),
                degree_lhs=degree(result.lhs),
                degree_rhs=degree(result.rhs),
                extra={"branch": result.branch},
            ))
    return out


def suite_covariance(corpus: Corpus, seed: int, trials: int) -> list[Check]:
    """Composite push-forward equals stepwise push-forward on random
    constructible functions, for every composable pair of corpus maps."""
    rng = _rng(seed, "covariance")
    out = []
    for nf, ng in corpus.composable_pairs():
        f, g = corpus.morphisms[nf], corpus.morphisms[ng]
        for t in range(trials):
            phi = random_function(f.source, rng)
            combined = compose(g, f)
            lhs = pushforward_function(combined, phi)
            rhs = pushforward_function(g, pushforward_function(f, phi))
            out.append(Check(
                check="covariance",
                instance=f"{nf}*{ng}|trial={t}",
                passed=verify_covariance(f, g, phi),
                lhs=lhs.to_json(),
                rhs=rhs.to_json(),
                degree_lhs=euler_characteristic(lhs),
                degree_rhs=euler_characteristic(rhs),
            ))
    return out


def suite_naturality(corpus: Corpus, seed: int, trials: int) -> list[Check]:
    """CSM commutes with push-forward on random constructible functions,
    for every corpus morphism."""
    rng = _rng(seed, "naturality")
    out = []
    for name, m in sorted(corpus.morphisms.items()):
        for t in range(trials):
            phi = random_function(m.source, rng)
            result = verify_naturality(m, phi)
            out.append(Check(
                check="naturality",
                instance=f"{name}|trial={t}",
                passed=result.passed,
                lhs=result.lhs.to_json(),
                rhs=result.rhs.to_json(),
                degree_lhs=degree(result.lhs),
                degree_rhs=degree(result.rhs),
            ))
    return out


def _fibration_pairs(corpus: Corpus):
    """Base/fiber pairs: projective-space-shaped factors of dimension 1 or 2
    (a fan is projective-space-shaped when it has dim + 1 rays)."""
    small = [
        (name, fan) for name, fan in sorted(corpus.fans.items())
        if fan.dim in (1, 2) and len(fan.rays) == fan.dim + 1
    ]
    for bname, base in small:
        for fname, fiber in small:
            yield bname, base, fname, fiber


def suite_fibration(corpus: Corpus, seed: int, trials: int) -> list[Check]:
    """Push-forward along product projections multiplies by the fiber Euler
    characteristic, and the factors multiply along a tower."""
    out = []
    for bname, base, fname, fiber in _fibration_pairs(corpus):
        total, to_base, _ = product_fan(base, fiber)
        lhs = pushforward_cycle(
            to_base, csm_class(ConstructibleFunction.constant(total, 1)))
        chi = len(fiber.maximal_cones)
        rhs = chi * csm_class(ConstructibleFunction.constant(base, 1))
        out.append(Check(
            check="fibration",
            instance=f"{bname}x{fname}->{bname}",
            passed=verify_fibration(to_base, fiber),
            lhs=lhs.to_json(),
            rhs=rhs.to_json(),
            degree_lhs=degree(lhs),
            degree_rhs=degree(rhs),
            extra={"fiber_euler": chi},
        ))

    lines = [(name, fan) for name, fan in sorted(corpus.fans.items()) if fan.dim == 1]
    if lines:
        lname, line = lines[0]
        square, sq_to_line, _ = product_fan(line, line)
        cube, cube_to_square, _ = product_fan(square, line)
        step1 = verify_fibration(cube_to_square, line)
        step2 = verify_fibration(sq_to_line, line)
        tower = compose(sq_to_line, cube_to_square)
        composite = verify_fibration(tower, square)
        chi_square = len(square.maximal_cones)
        chi_line = len(line.maximal_cones)
        out.append(Check(
            check="fibration-multiplicativity",
            instance=f"{lname}^3->{lname}^2->{lname}",
            passed=step1 and step2 and composite
            and chi_square == chi_line * chi_line,
            extra={
                "factor_step1": chi_line,
                "factor_step2": chi_line,
                "factor_composite": chi_square,
            },
        ))
    return out


def suite_prochow(corpus: Corpus, seed: int, trials: int) -> list[Check]:
    """Two-node closure diagrams (blow-up along a center inside the
    boundary) carry compatible local data; one corrupted diagram per run
    must be caught."""
    out = []
    first_diagram = None
    for label, gc in _closures(corpus):
        for center in _blowup_centers(gc.fan):
            if not (gc.boundary & set(center.ray_indices)):
                continue  # center meets the open set: nodes would differ
            diagram = two_node_diagram(gc, center)
            if first_diagram is None:
                first_diagram = (label, center, diagram)
            out.append(Check(
                check="prochow",
                instance=f"{label}|center={center.key}",
                passed=verify_prochow_compatibility(diagram),
                lhs=diagram.classes["blowup"].to_json(),
                rhs=diagram.classes["base"].to_json(),
                degree_lhs=degree(diagram.classes["blowup"]),
                degree_rhs=degree(diagram.classes["base"]),
            ))
    if first_diagram is not None:
        label, center, diagram = first_diagram
        broken = diagram.with_class(
            "blowup",
            diagram.classes["blowup"]
            + fundamental_class(diagram.nodes["blowup"].fan))
        out.append(Check(
            check="prochow-corruption",
            instance=f"{label}|center={center.key}|corrupted",
            passed=not verify_prochow_compatibility(broken),
        ))
    return out


def _random_class(fan: Fan, rng: random.Random) -> CycleClass:
    return CycleClass(fan, {c: rng.randint(-3, 3) for c in fan.sorted_cones})


def _perturbing_solver(matrix, rhs):
    """A valid integer solver that returns a different representative than
    the default whenever the solution is not unique."""
    base = solve_integer(matrix, rhs)
    if base is None:
        return None
    K = kernel_basis(matrix)
    if K.cols == 0:
        return base
    return base + LatticeVector(K.column(0))


def suite_chow(corpus: Corpus, seed: int, trials: int) -> list[Check]:
    """Soundness of the Chow arithmetic: divisor-choice independence,
    commutativity modulo relations, degree preservation under push-forward,
    and equivalence of all point classes."""
    out = []
    fans = [(n, f) for n, f in sorted(corpus.fans.items()) if f.dim >= 1]

    rng = _rng(seed, "chow-choice")
    triples = [
        (name, fan, c, r)
        for name, fan in fans
        for c in fan.sorted_cones if c.dim >= 1
        for r in c.ray_indices
    ]
    for t in range(trials):
        name, fan, c, r = triples[t % len(triples)]
        alpha = _random_class(fan, rng)
        lhs = multiply_divisor(fan, r, alpha)
        rhs = multiply_divisor(fan, r, alpha, solver=_perturbing_solver)
        out.append(Check(
            check="chow-choice-independence",
            instance=f"{name}|cone={c.key}|ray={r}|trial={t}",
            passed=classes_equal(lhs, rhs),
            lhs=lhs.to_json(),
            rhs=rhs.to_json(),
        ))

    rng = _rng(seed, "chow-commute")
    for t in range(trials):
        name, fan = fans[t % len(fans)]
        a = rng.randrange(len(fan.rays))
        b = rng.randrange(len(fan.rays))
        alpha = _random_class(fan, rng)
        lhs = multiply_divisor(fan, a, multiply_divisor(fan, b, alpha))
        rhs = multiply_divisor(fan, b, multiply_divisor(fan, a, alpha))
        out.append(Check(
            check="chow-commutativity",
            instance=f"{name}|D{a}.D{b}|trial={t}",
            passed=classes_equal(lhs, rhs),
            lhs=lhs.to_json(),
            rhs=rhs.to_json(),
        ))

    rng = _rng(seed, "chow-degree")
    morphisms = sorted(corpus.morphisms.items())
    for t in range(trials):
        name, m = morphisms[t % len(morphisms)]
        points = CycleClass(
            m.source,
            {c: rng.randint(-3, 3) for c in m.source.cones_of_dim(m.source.dim)})
        pushed = pushforward_cycle(m, points)
        out.append(Check(
            check="chow-degree-pushforward",
            instance=f"{name}|trial={t}",
            passed=degree(pushed) == degree(points),
            lhs=points.to_json(),
            rhs=pushed.to_json(),
            degree_lhs=degree(points),
            degree_rhs=degree(pushed),
        ))

    rng = _rng(seed, "chow-points")
    for t in range(trials):
        name, fan = fans[t % len(fans)]
        tops = fan.cones_of_dim(fan.dim)
        c1 = tops[rng.randrange(len(tops))]
        c2 = tops[rng.randrange(len(tops))]
        out.append(Check(
            check="chow-point-equivalence",
            instance=f"{name}|{c1.key}~{c2.key}|trial={t}",
            passed=classes_equal(
                CycleClass(fan, {c1: 1}), CycleClass(fan, {c2: 1})),
        ))
    return out


SUITES = {
    "normalization": suite_normalization,
    "gluing": suite_gluing,
    "blowup": suite_blowup,
    "covariance": suite_covariance,
    "naturality": suite_naturality,
    "fibration": suite_fibration,
    "prochow": suite_prochow,
    "chow": suite_chow,
}

ALL_ORDER = ("normalization", "gluing", "blowup", "covariance", "naturality",
             "fibration", "prochow", "chow")


def run_suite(name: str, corpus: Corpus, seed: int = 0, trials: int = 100) -> list[Check]:
    if name == "all":
        out = []
        for suite in ALL_ORDER:
            out.extend(run_suite(suite, corpus, seed, trials))
        return out
    if name not in SUITES:
        raise ValidationError(
            f"unknown suite {name!r}; choose from {', '.join(ALL_ORDER)} or 'all'")
    checks = SUITES[name](corpus, seed, trials)
    checks.sort(key=lambda c: (c.check, c.instance))
    return checks
