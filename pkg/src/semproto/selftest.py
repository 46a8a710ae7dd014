"""Cross-checks of the optimized operations against the brute-force oracles.

Each battery runs a deterministic stream of random cases and counts failures.
This is what the hidden ``selftest`` CLI subcommand runs; the test suite uses
the same functions with fixed seeds.
"""
from __future__ import annotations

import math
import random
from typing import Callable

from .asd import ASD, merge, similarity, subsumes
from .mining import greedy_cover
from .oracle import (OracleBudget, oracle_coverage_opt, oracle_edit_distance,
                     random_asds, subsuming_pairs)
from .prototypes import edit_distance

Battery = tuple[str, int, int]  # name, cases, failures


def battery_merge_generalizes(cases: int, seed: int) -> Battery:
    """merge(a, b) subsumes both inputs and is an antichain."""
    failures = 0
    left = list(random_asds(seed, cases))
    right = list(random_asds(seed + 1, cases))
    for a, b in zip(left, right):
        m = merge(a, b)
        if not (subsumes(m, a) and subsumes(m, b) and m.is_antichain):
            failures += 1
    return ("merge-generalizes", cases, failures)


def battery_merge_most_specific(cases: int, seed: int) -> Battery:
    """Anything subsuming both inputs also subsumes their merge."""
    failures = 0
    extra = random_asds(seed, cases)
    left = random_asds(seed + 1, cases)
    right = random_asds(seed + 2, cases)
    for w0, z1, z2 in zip(extra, left, right):
        # Merging w0 over both sides yields some common generalization of
        # z1 and z2, usually strictly above their join.
        upper = merge(merge(w0, z1), z2)
        if not (subsumes(upper, z1) and subsumes(upper, z2)):
            failures += 1
            continue
        if not subsumes(upper, merge(z1, z2)):
            failures += 1
    return ("merge-most-specific", cases, failures)


def battery_similarity(cases: int, seed: int) -> Battery:
    """Symmetry, range, and identity of the similarity score."""
    failures = 0
    left = list(random_asds(seed, cases))
    right = list(random_asds(seed + 1, cases))
    for a, b in zip(left, right):
        s_ab = similarity(a, b)
        s_ba = similarity(b, a)
        if abs(s_ab - s_ba) > 1e-12 or not (0.0 <= s_ab <= 1.0):
            failures += 1
            continue
        if abs(similarity(a, a) - 1.0) > 1e-12:
            failures += 1
    return ("similarity-props", cases, failures)


def battery_edit_oracle(cases: int, seed: int,
                        budget: OracleBudget = OracleBudget()) -> Battery:
    """Assignment-based edit distance equals the exhaustive oracle, both modes."""
    failures = 0
    pairs = subsuming_pairs(seed, cases, max_general=4, max_specific=6)
    for rule, sample in pairs:
        for mode in ("attrs", "zero"):
            solved = edit_distance(rule, sample, unmatched_cost=mode)
            expected = oracle_edit_distance(rule, sample, unmatched_cost=mode,
                                            budget=budget)
            if solved.total != expected:
                failures += 1
    return ("edit-distance-oracle", cases, failures)


def battery_greedy_coverage(cases: int, seed: int,
                            budget: OracleBudget = OracleBudget()) -> Battery:
    """Greedy coverage stays within the (1 - 1/e) bound of the optimum."""
    rng = random.Random(seed)
    failures = 0
    guarantee = 1.0 - 1.0 / math.e
    for _ in range(cases):
        n_sets = rng.randint(1, budget.max_candidates)
        n_points = rng.randint(1, 20)
        coverages = [
            frozenset(str(p) for p in rng.sample(range(n_points),
                                                 rng.randint(0, n_points)))
            for _ in range(n_sets)
        ]
        k = rng.randint(1, 4)
        picks = greedy_cover(coverages, k)
        achieved = len(set().union(*[coverages[i] for i in picks]) if picks else set())
        optimal = oracle_coverage_opt(coverages, k, budget=budget)
        if achieved < math.ceil(guarantee * optimal):
            failures += 1
    return ("greedy-coverage-bound", cases, failures)


ALL_BATTERIES: list[Callable[[int, int], Battery]] = [
    battery_merge_generalizes,
    battery_merge_most_specific,
    battery_similarity,
    battery_edit_oracle,
    battery_greedy_coverage,
]


def run_selftest(cases: int = 1000, seed: int = 0) -> list[Battery]:
    return [battery(cases, seed) for battery in ALL_BATTERIES]
