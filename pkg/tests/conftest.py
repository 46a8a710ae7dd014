"""Shared strategies and helpers for the test suite."""

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from semproto import ASD

settings.register_profile(
    "semproto",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("semproto")

# small id universe on purpose: collisions, duplicate entities, and nested
# subsets must show up often, or the antichain/trim paths go untested
entity_sets = st.frozensets(st.integers(0, 9), max_size=5)
nonempty_entity_sets = st.frozensets(st.integers(0, 9), min_size=1, max_size=5)


def build(id_sets) -> ASD:
    return ASD.from_id_sets(id_sets)


asds = st.lists(entity_sets, max_size=5).map(build)
nonempty_asds = st.lists(nonempty_entity_sets, min_size=1, max_size=5).map(build)


@st.composite
def generalizations(draw, specific=None):
    """(general, specific) with general subsuming specific by construction.

    Each general entity is a random subset of a randomly chosen specific
    entity, so the witness property holds without consulting subsumes().
    """
    if specific is None:
        specific = draw(nonempty_asds)
    width = draw(st.integers(1, 4))
    entities = []
    for _ in range(width):
        witness = draw(st.sampled_from(specific.entities))
        keep = draw(st.integers(0, (1 << witness.bit_length()) - 1 if witness else 0))
        entities.append(witness & keep)
    return ASD(tuple(entities)), specific


@st.composite
def subsumption_chains(draw):
    """(x, y, z) with x subsuming y and y subsuming z, built constructively."""
    y, z = draw(generalizations())
    x, _ = draw(generalizations(specific=y))
    return x, y, z


@st.composite
def common_generalizations(draw):
    """(w, z1, z2) where w subsumes both z1 and z2.

    Every w entity is a subset of (e1 & e2) for some e1 in z1, e2 in z2, so
    both sides hold a witness for it.
    """
    z1 = draw(nonempty_asds)
    z2 = draw(nonempty_asds)
    width = draw(st.integers(1, 4))
    entities = []
    for _ in range(width):
        e1 = draw(st.sampled_from(z1.entities))
        e2 = draw(st.sampled_from(z2.entities))
        both = e1 & e2
        keep = draw(st.integers(0, (1 << both.bit_length()) - 1 if both else 0))
        entities.append(both & keep)
    return ASD(tuple(entities)), z1, z2
