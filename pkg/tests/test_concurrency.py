"""Concurrent use of the pure operations and the memoized relation cache."""

import random
from concurrent.futures import ThreadPoolExecutor

from toriccsm.chow import classes_equal, degree
from toriccsm.constructible import ConstructibleFunction, random_function
from toriccsm.corpus import projective_space
from toriccsm.csm import GoodClosure, csm_class, local_data, verify_gluing


def test_parallel_classes_equal_on_fresh_fan():
    # a fresh fan so the relation cache is cold and populated under contention
    fan = projective_space(3, name="P3-threads")
    rng = random.Random(0)
    functions = [random_function(fan, rng) for _ in range(32)]

    def work(phi):
        cls = csm_class(phi)
        assert classes_equal(cls, cls)
        return degree(cls)

    with ThreadPoolExecutor(max_workers=8) as pool:
        parallel = list(pool.map(work, functions))
    assert parallel == [work(phi) for phi in functions]


def test_parallel_verifications():
    fan = projective_space(2, name="P2-threads")
    closures = [GoodClosure(fan, frozenset(s))
                for s in ([], [0], [1], [2], [0, 1], [0, 2], [1, 2], [0, 1, 2])]

    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(verify_gluing, closures))
    assert all(results)
    # the memoized local data agrees with a fresh sequential pass
    for gc in closures:
        assert local_data(gc) == local_data(GoodClosure(gc.fan, gc.boundary))
