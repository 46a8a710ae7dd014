"""Greedy mining and selection of class cluster descriptions.

Each positive sample seeds one candidate: starting from the seed's own
description, the remaining positives are visited most-similar first and
greedily merged in, keeping a merge only when the generalized description
still describes no negative sample.  The surviving candidates are deduplicated
and a greedy maximum-coverage pass picks the final rule set.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .asd import ASD, entity_ids, merge, similarity, subsumes
from .errors import ConfigError, InseparableDataError


@dataclass(frozen=True)
class Sample:
    """A data point: stable id, class label, description, optional raw pointer."""

    id: str
    label: str
    asd: ASD
    raw_ref: str | None = None


@dataclass(frozen=True)
class ClassClusterDescription:
    """A description that describes only samples of one class.

    coverage holds the exact ids of the positives it describes; it is computed
    by the miner and never empty (a candidate always covers its seed).
    """

    asd: ASD
    class_label: str
    coverage: frozenset[str]


@dataclass(frozen=True)
class MiningConfig:
    resort_on_accept_only: bool = True
    dedupe_seeds: bool = True
    max_seeds: int | None = None
    parallelism: int = 1

    def __post_init__(self):
        if self.parallelism < 1:
            raise ConfigError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.max_seeds is not None and self.max_seeds < 0:
            raise ConfigError(f"max_seeds must be >= 0, got {self.max_seeds}")


# ----------------------------------------------------------------------------
# negative checking
# ----------------------------------------------------------------------------

class NegativeAttributeIndex:
    """Attribute-occurrence inverted index over the negative samples.

    For each attribute, a bitset of the negatives whose descriptions mention
    it anywhere.  A candidate can only describe a negative that mentions every
    attribute the candidate uses, so intersecting those bitsets prunes the
    negatives that need a full subsumption check.  Results always agree with
    the naive linear scan.
    """

    def __init__(self, negatives: Sequence[Sample]):
        self._ids = [n.id for n in negatives]
        self._asds = [n.asd for n in negatives]
        self._all = (1 << len(negatives)) - 1
        self._attr_bits: dict[int, int] = {}
        for pos, asd in enumerate(self._asds):
            for attr in entity_ids(asd.attribute_union):
                self._attr_bits[attr] = self._attr_bits.get(attr, 0) | (1 << pos)

    def first_described(self, candidate: ASD) -> str | None:
        """Id of some negative the candidate describes, or None."""
        survivors = self._all
        for attr in entity_ids(candidate.attribute_union):
            survivors &= self._attr_bits.get(attr, 0)
            if not survivors:
                return None
        while survivors:
            low = survivors & -survivors
            survivors ^= low
            pos = low.bit_length() - 1
            if subsumes(candidate, self._asds[pos]):
                return self._ids[pos]
        return None

    def describes_none(self, candidate: ASD) -> bool:
        return self.first_described(candidate) is None


def check_ccd(candidate: ASD, negatives: Sequence[Sample],
              index: NegativeAttributeIndex | None = None) -> bool:
    """True iff the candidate describes no negative sample.

    With ``index`` (built over the same negatives) the check is pruned by
    attribute occurrence; without it, a naive scan.  A candidate holding only
    the empty entity describes everything, so it passes only when there are no
    negatives at all.
    """
    if index is not None:
        return index.describes_none(candidate)
    return all(not subsumes(candidate, n.asd) for n in negatives)


# ----------------------------------------------------------------------------
# seed traces
# ----------------------------------------------------------------------------

def _sort_by_similarity(items: list[tuple[str, ASD]],
                        reference: ASD) -> list[tuple[str, ASD]]:
    # Descending similarity, ties by ascending sample id.
    return sorted(items, key=lambda item: (-similarity(reference, item[1]), item[0]))


def _trace(seed_asd: ASD, others: list[tuple[str, ASD]],
           index: NegativeAttributeIndex, resort_on_accept_only: bool) -> ASD:
    """Run one seed's greedy generalization and return its final description."""
    description = seed_asd
    remaining = _sort_by_similarity(others, description)
    while remaining:
        _, candidate = remaining.pop(0)
        if subsumes(description, candidate):
            # The merge of comparable descriptions is the general one, trimmed.
            generalized = description.trimmed
        else:
            generalized = merge(description, candidate)
        if generalized != description:
            if index.describes_none(generalized):
                description = generalized
                remaining = _sort_by_similarity(remaining, description)
                continue
        # Accepted no-ops and rejections leave the ordering untouched; only
        # re-sort here when literal re-sorting is requested (same order, the
        # similarity keys did not change).
        if not resort_on_accept_only:
            remaining = _sort_by_similarity(remaining, description)
    return description


# Worker-side state for parallel mining, set once per process.
_POOL_STATE: dict | None = None


def _pool_init(positives: list[tuple[str, tuple[int, ...]]],
               negatives: list[tuple[str, tuple[int, ...]]],
               resort_on_accept_only: bool) -> None:
    global _POOL_STATE
    samples = [(sid, ASD(entities)) for sid, entities in positives]
    index = NegativeAttributeIndex(
        [Sample(sid, "", ASD(entities)) for sid, entities in negatives])
    _POOL_STATE = {
        "positives": samples,
        "index": index,
        "resort_on_accept_only": resort_on_accept_only,
    }


def _pool_trace(seed_id: str) -> tuple[int, ...]:
    assert _POOL_STATE is not None
    positives = _POOL_STATE["positives"]
    seed_asd = next(asd for sid, asd in positives if sid == seed_id)
    others = [(sid, asd) for sid, asd in positives if sid != seed_id]
    result = _trace(seed_asd, others, _POOL_STATE["index"],
                    _POOL_STATE["resort_on_accept_only"])
    return result.entities


# ----------------------------------------------------------------------------
# mining
# ----------------------------------------------------------------------------

def mine_ccds(positives: Sequence[Sample], negatives: Sequence[Sample],
              config: MiningConfig = MiningConfig()) -> list[ClassClusterDescription]:
    """Mine candidate class descriptions from one class versus the rest.

    Returns the deduplicated candidates in canonical order, each carrying its
    exact positive coverage.  Raises ``ValueError`` for an empty or mixed
    positive set and ``InseparableDataError`` when some positive's description
    already describes a negative (no sound rule can cover that positive).
    """
    if not positives:
        raise ValueError("cannot mine from an empty positive set")
    labels = {p.label for p in positives}
    if len(labels) != 1:
        raise ValueError(f"positives must share one label, got {sorted(labels)}")
    label = positives[0].label
    if any(n.label == label for n in negatives):
        raise ValueError(f"negatives contain the positive label {label!r}")
    overlap = {p.id for p in positives} & {n.id for n in negatives}
    if overlap:
        raise ValueError(f"sample ids appear on both sides: {sorted(overlap)[:5]}")

    index = NegativeAttributeIndex(negatives)
    for p in positives:
        hit = index.first_described(p.asd)
        if hit is not None:
            raise InseparableDataError(p.id, hit, label)

    seeds = sorted(positives, key=lambda p: p.id)
    if config.dedupe_seeds:
        # Identical descriptions provably produce identical traces; keep the
        # lowest-id representative of each.
        seen: set[ASD] = set()
        unique = []
        for p in seeds:
            if p.asd not in seen:
                seen.add(p.asd)
                unique.append(p)
        seeds = unique
    if config.max_seeds is not None:
        seeds = seeds[:config.max_seeds]

    if config.parallelism > 1 and len(seeds) > 1:
        raw = _mine_parallel(seeds, positives, negatives, config)
    else:
        raw = []
        for seed in seeds:
            others = [(p.id, p.asd) for p in positives if p.id != seed.id]
            raw.append(_trace(seed.asd, others, index, config.resort_on_accept_only))

    descriptions = sorted(set(raw), key=lambda a: a.sort_key)
    result = []
    for asd in descriptions:
        described = index.first_described(asd)
        if described is not None:  # pragma: no cover - accepted merges are checked
            raise RuntimeError(f"mined description describes negative {described!r}")
        coverage = frozenset(p.id for p in positives if subsumes(asd, p.asd))
        result.append(ClassClusterDescription(asd, label, coverage))
    # Post-hoc soundness re-check with the naive scan, independent of the index.
    for ccd in result:
        if not check_ccd(ccd.asd, negatives):  # pragma: no cover - defensive
            raise RuntimeError("index and naive negative checks disagree")
    return result


def _mine_parallel(seeds: Sequence[Sample], positives: Sequence[Sample],
                   negatives: Sequence[Sample], config: MiningConfig) -> list[ASD]:
    pos_blob = [(p.id, p.asd.entities) for p in positives]
    neg_blob = [(n.id, n.asd.entities) for n in negatives]
    chunk = max(1, len(seeds) // (config.parallelism * 4))
    with ProcessPoolExecutor(
            max_workers=config.parallelism, initializer=_pool_init,
            initargs=(pos_blob, neg_blob, config.resort_on_accept_only)) as pool:
        entity_tuples = list(pool.map(_pool_trace, [s.id for s in seeds],
                                      chunksize=chunk))
    return [ASD(entities) for entities in entity_tuples]


# ----------------------------------------------------------------------------
# selection
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SelectionStep:
    """One greedy pick with its marginal and cumulative coverage."""

    ccd: ClassClusterDescription
    newly_covered: int
    cumulative_covered: int


def greedy_cover(coverages: Sequence[frozenset[str]], k: int | None = None,
                 tie_keys: Sequence[tuple] | None = None) -> list[int]:
    """Greedy maximum-coverage pick order over coverage sets.

    Picks the set with the largest marginal gain until k picks are made
    (k None: until nothing new can be covered).  Ties break by tie_keys then
    by position, so the order is deterministic.  The greedy value is within a
    factor (1 - 1/e) of the optimal coverage for any k.
    """
    n = len(coverages)
    keys = tie_keys if tie_keys is not None else [()] * n
    covered: set[str] = set()
    picks: list[int] = []
    available = set(range(n))
    while available and (k is None or len(picks) < k):
        best = None
        best_rank = None
        for i in available:
            gain = len(coverages[i] - covered)
            rank = (-gain, keys[i], i)
            if best_rank is None or rank < best_rank:
                best, best_rank = i, rank
        assert best is not None
        if len(coverages[best] - covered) == 0:
            break
        picks.append(best)
        available.remove(best)
        covered |= coverages[best]
    return picks


def select_ccds(candidates: Sequence[ClassClusterDescription],
                positives: Sequence[Sample],
                k: int | None = None) -> tuple[list[SelectionStep], list[str]]:
    """Pick a small rule set by greedy coverage.

    With k, at most k rules are picked (maximum coverage); without it, picking
    continues until every positive is covered or no candidate helps (set
    cover).  Returns the picks in order plus the ids left uncovered.  Ties
    break toward fewer total attributes, then canonical description order.
    """
    universe = {p.id for p in positives}
    coverages = [c.coverage for c in candidates]
    tie_keys = [(c.asd.total_attributes, c.asd.sort_key) for c in candidates]
    picks = greedy_cover(coverages, k, tie_keys)
    steps = []
    covered: set[str] = set()
    for i in picks:
        gained = len(coverages[i] - covered)
        covered |= coverages[i]
        steps.append(SelectionStep(candidates[i], gained, len(covered)))
    uncovered = sorted(universe - covered)
    return steps, uncovered
