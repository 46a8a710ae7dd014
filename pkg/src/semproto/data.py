"""Dataset model, line-delimited JSON I/O, scene generation, matrix conversion.

Datasets are files of one JSON record per line:

    {"id": "class1-0000", "label": "class1", "asd": [["Large", "Cube"], ...]}

with an optional "ref" field pointing at the raw data.  Attribute names are
case-sensitive exact strings; ids must be unique; entities must be non-empty;
identical descriptions under different labels are rejected because no sound
rule could ever separate them.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

from .asd import ASD, Vocabulary, subsumes
from .errors import ConfigError, DatasetValidationError, Diagnostic, GenerationError
from .mining import Sample


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable collection of labeled samples over one vocabulary."""

    vocabulary: Vocabulary
    samples: tuple[Sample, ...]
    source: str | None = None

    @cached_property
    def label_index(self) -> dict[str, tuple[str, ...]]:
        """Label -> sample ids, both in first-appearance order."""
        index: dict[str, list[str]] = {}
        for s in self.samples:
            index.setdefault(s.label, []).append(s.id)
        return {label: tuple(ids) for label, ids in index.items()}

    @cached_property
    def by_id(self) -> dict[str, Sample]:
        return {s.id: s for s in self.samples}

    def labels(self) -> list[str]:
        return sorted(self.label_index)

    def split(self, label: str) -> tuple[list[Sample], list[Sample]]:
        """Positives with the label, negatives everything else."""
        positives = [s for s in self.samples if s.label == label]
        negatives = [s for s in self.samples if s.label != label]
        return positives, negatives

    def __len__(self) -> int:
        return len(self.samples)


# ----------------------------------------------------------------------------
# loading and validation
# ----------------------------------------------------------------------------

def scan_dataset(lines: Iterable[str], source: str | None = None,
                 ) -> tuple[Dataset | None, list[Diagnostic]]:
    """Parse and validate dataset lines, collecting every problem found.

    Returns the dataset (when clean) and all diagnostics; never stops at the
    first error.  Blank lines are allowed and skipped.
    """
    vocab = Vocabulary()
    samples: list[Sample] = []
    diagnostics: list[Diagnostic] = []
    seen_ids: dict[str, int] = {}
    by_asd: dict[ASD, Sample] = {}

    for line_no, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            diagnostics.append(Diagnostic(f"malformed JSON ({exc.msg})", line=line_no))
            continue
        if not isinstance(record, dict):
            diagnostics.append(Diagnostic("record is not a JSON object", line=line_no))
            continue
        sample_id = record.get("id")
        label = record.get("label")
        raw_asd = record.get("asd")
        ref = record.get("ref")
        bad = False
        if not isinstance(sample_id, str) or not sample_id:
            diagnostics.append(Diagnostic("missing or empty 'id'", line=line_no))
            bad = True
        if not isinstance(label, str) or not label:
            diagnostics.append(Diagnostic("missing or empty 'label'", line=line_no,
                                          sample_id=sample_id if isinstance(sample_id, str) else None))
            bad = True
        if not isinstance(raw_asd, list) or not raw_asd:
            diagnostics.append(Diagnostic("'asd' must be a non-empty list of entities",
                                          line=line_no,
                                          sample_id=sample_id if isinstance(sample_id, str) else None))
            bad = True
        if ref is not None and not isinstance(ref, str):
            diagnostics.append(Diagnostic("'ref' must be a string when present",
                                          line=line_no, sample_id=sample_id))
            bad = True
        if bad:
            continue
        entity_lists: list[list[str]] = []
        for entity in raw_asd:
            if not isinstance(entity, list) or not entity:
                diagnostics.append(Diagnostic("empty entity in 'asd'",
                                              line=line_no, sample_id=sample_id))
                bad = True
                break
            if not all(isinstance(attr, str) and attr.strip() for attr in entity):
                diagnostics.append(Diagnostic("entity attributes must be non-empty strings",
                                              line=line_no, sample_id=sample_id))
                bad = True
                break
            entity_lists.append(entity)
        if bad:
            continue
        if sample_id in seen_ids:
            diagnostics.append(Diagnostic(
                f"duplicate sample id (first seen at line {seen_ids[sample_id]})",
                line=line_no, sample_id=sample_id))
            continue
        seen_ids[sample_id] = line_no
        asd = ASD.from_names(vocab, entity_lists, intern=True)
        clash = by_asd.get(asd)
        if clash is not None and clash.label != label:
            diagnostics.append(Diagnostic(
                f"identical description under different labels "
                f"(same as sample {clash.id!r} with label {clash.label!r}); "
                "no rule can separate them",
                line=line_no, sample_id=sample_id))
            continue
        sample = Sample(sample_id, label, asd, raw_ref=ref)
        if clash is None:
            by_asd[asd] = sample
        samples.append(sample)

    if diagnostics:
        return None, diagnostics
    if not samples:
        return None, [Diagnostic("dataset contains no samples")]
    return Dataset(vocab, tuple(samples), source=source), []


def load_dataset(path: str | Path) -> Dataset:
    """Load and validate a dataset file; raises with every diagnostic on failure."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        dataset, diagnostics = scan_dataset(handle, source=str(path))
    if diagnostics:
        raise DatasetValidationError(diagnostics, source=str(path))
    assert dataset is not None
    return dataset


def validate_dataset(path: str | Path) -> list[Diagnostic]:
    """All validation findings for a dataset file (empty when clean)."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            _, diagnostics = scan_dataset(handle, source=str(path))
    except OSError as exc:
        return [Diagnostic(f"cannot read dataset: {exc}")]
    return diagnostics


def sample_record(sample: Sample, vocab: Vocabulary) -> dict:
    record: dict = {"id": sample.id, "label": sample.label,
                    "asd": sample.asd.to_name_lists(vocab)}
    if sample.raw_ref is not None:
        record["ref"] = sample.raw_ref
    return record


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset back to line-delimited JSON in canonical order."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for sample in dataset.samples:
            handle.write(json.dumps(sample_record(sample, dataset.vocabulary)))
            handle.write("\n")


# ----------------------------------------------------------------------------
# synthetic scenes
# ----------------------------------------------------------------------------

CLEVR_HANS3_RULES: tuple[tuple[str, tuple[tuple[str, ...], ...]], ...] = (
    ("class1", (("Large", "Cube"), ("Large", "Cylinder"))),
    ("class2", (("Small", "Metal", "Cube"), ("Small", "Sphere"))),
    ("class3", (("Large", "Blue", "Sphere"), ("Small", "Yellow", "Sphere"))),
)


@dataclass(frozen=True)
class GeneratorConfig:
    """Configuration for the three-class synthetic scene generator."""

    samples_per_class: int = 200
    objects_min: int = 3
    objects_max: int = 10
    seed: int = 0
    sizes: tuple[str, ...] = ("Small", "Large")
    materials: tuple[str, ...] = ("Metal", "Rubber")
    shapes: tuple[str, ...] = ("Cube", "Sphere", "Cylinder")
    colors: tuple[str, ...] = ("Gray", "Red", "Blue", "Green",
                               "Brown", "Purple", "Cyan", "Yellow")
    confounded: bool = False
    rejection_budget: int = 1000

    def __post_init__(self):
        if self.samples_per_class < 1:
            raise ConfigError("samples_per_class must be >= 1")
        if self.objects_min < 2 or self.objects_max < self.objects_min:
            raise ConfigError("object count range must satisfy 2 <= min <= max")
        if self.rejection_budget < 1:
            raise ConfigError("rejection_budget must be >= 1")


def generate_clevr_hans3(config: GeneratorConfig = GeneratorConfig(),
                         ) -> tuple[Dataset, dict[str, ASD]]:
    """Generate the three-class scene dataset and its ground-truth rules.

    Each scene draws a uniform object count and uniform attributes per object,
    force-fills two objects so the class rule holds, and is rejection-sampled
    until neither other class rule describes it.  The same config always
    yields the same dataset.  Raises ``GenerationError`` when the rejection
    budget runs out (pathological axis configurations).
    """
    vocab = Vocabulary()
    axis_values: set[str] = set()
    for axis in (config.sizes, config.materials, config.shapes, config.colors):
        for name in axis:
            vocab.intern(name)
            axis_values.add(name)

    rules: dict[str, ASD] = {}
    for label, entities in CLEVR_HANS3_RULES:
        missing = {attr for entity in entities for attr in entity} - axis_values
        if missing:
            raise ConfigError(
                f"rule attributes {sorted(missing)} are missing from the configured "
                f"axes; the {label!r} rule could never hold")
        rules[label] = ASD.from_names(vocab, entities, intern=True)

    rng = random.Random(config.seed)
    samples: list[Sample] = []
    width = max(4, len(str(config.samples_per_class - 1)))
    for label, rule_entities in CLEVR_HANS3_RULES:
        other_rules = [rules[other] for other, _ in CLEVR_HANS3_RULES if other != label]
        for i in range(config.samples_per_class):
            for _ in range(config.rejection_budget):
                asd = _draw_scene(rng, config, vocab, label, rule_entities)
                if not any(subsumes(other, asd) for other in other_rules):
                    break
            else:
                raise GenerationError(
                    f"gave up after {config.rejection_budget} draws for a "
                    f"{label!r} scene that no other rule describes")
            samples.append(Sample(f"{label}-{i:0{width}d}", label, asd))
    return Dataset(vocab, tuple(samples)), rules


def _draw_scene(rng: random.Random, config: GeneratorConfig, vocab: Vocabulary,
                label: str, rule_entities: tuple[tuple[str, ...], ...]) -> ASD:
    count = rng.randint(config.objects_min, config.objects_max)
    objects = []
    for _ in range(count):
        objects.append({
            "size": rng.choice(config.sizes),
            "material": rng.choice(config.materials),
            "shape": rng.choice(config.shapes),
            "color": rng.choice(config.colors),
        })
    # Overwrite the constrained axes of the first objects so the class rule
    # holds; the free axes keep their drawn values.
    for slot, entity in enumerate(rule_entities):
        for attr in entity:
            for axis_name, axis in (("size", config.sizes),
                                    ("material", config.materials),
                                    ("shape", config.shapes),
                                    ("color", config.colors)):
                if attr in axis:
                    objects[slot][axis_name] = attr
    if config.confounded:
        # Reconstructed shortcut attributes: the witness objects of the first
        # two classes get a fixed free axis, so mining picks up the shortcut.
        if label == "class1":
            objects[0]["color"] = "Gray"
        elif label == "class2":
            objects[1]["material"] = "Metal"
    name_lists = [[o["size"], o["material"], o["shape"], o["color"]] for o in objects]
    return ASD.from_names(vocab, name_lists, intern=False)


def write_ground_truth(rules: dict[str, ASD], vocab: Vocabulary,
                       path: str | Path) -> None:
    """Write one {"label", "rule"} JSON record per class."""
    with Path(path).open("w", encoding="utf-8") as handle:
        for label, asd in rules.items():
            handle.write(json.dumps({"label": label, "rule": asd.to_name_lists(vocab)}))
            handle.write("\n")


def load_ground_truth(path: str | Path, vocab: Vocabulary) -> dict[str, ASD]:
    """Read ground-truth rules, interning attribute names into ``vocab``."""
    rules: dict[str, ASD] = {}
    diagnostics: list[Diagnostic] = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                record = json.loads(text)
            except json.JSONDecodeError as exc:
                diagnostics.append(Diagnostic(f"malformed JSON ({exc.msg})", line=line_no))
                continue
            label = record.get("label") if isinstance(record, dict) else None
            rule = record.get("rule") if isinstance(record, dict) else None
            if (not isinstance(label, str) or not isinstance(rule, list) or not rule
                    or not all(isinstance(e, list) and e for e in rule)):
                diagnostics.append(Diagnostic("expected {'label', 'rule'} with a "
                                              "non-empty rule", line=line_no))
                continue
            rules[label] = ASD.from_names(vocab, rule, intern=True)
    if diagnostics:
        raise DatasetValidationError(diagnostics, source=str(path))
    if not rules:
        raise DatasetValidationError([Diagnostic("ground-truth file holds no rules")],
                                     source=str(path))
    return rules


# ----------------------------------------------------------------------------
# attribute matrix conversion
# ----------------------------------------------------------------------------

GROUPINGS = ("whole", "part-prefix")


def convert_attribute_matrix(path: str | Path, grouping: str = "whole",
                             threshold: float = 1.0) -> Dataset:
    """Convert (sample_id, attribute_name, value[, label]) rows to a dataset.

    Values are certainties in [0, 1]; attributes below the threshold are
    dropped.  Grouping "whole" makes one entity per sample; "part-prefix"
    groups attributes by the name part before "::" into one entity per part.
    Labels come from the optional fourth column, else from a "label/rest"
    sample id prefix.  Samples whose attributes all fall below the threshold
    are an error, not silently dropped.
    """
    if grouping not in GROUPINGS:
        raise ConfigError(f"unknown grouping {grouping!r}; expected one of {GROUPINGS}")
    path = Path(path)
    diagnostics: list[Diagnostic] = []
    rows: list[tuple[str, str, float, str | None]] = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DatasetValidationError([Diagnostic(f"cannot read matrix: {exc}")],
                                     source=str(path))
    delimiter = "\t" if lines and "\t" in lines[0] else ","
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(delimiter)]
        if len(parts) not in (3, 4):
            diagnostics.append(Diagnostic(
                f"expected 3 or 4 {'tab' if delimiter == chr(9) else 'comma'}-separated "
                f"columns, got {len(parts)}", line=line_no))
            continue
        try:
            value = float(parts[2])
        except ValueError:
            if line_no == 1:
                continue  # header row
            diagnostics.append(Diagnostic(f"value {parts[2]!r} is not a number",
                                          line=line_no))
            continue
        if not parts[0] or not parts[1]:
            diagnostics.append(Diagnostic("empty sample id or attribute name",
                                          line=line_no))
            continue
        label = parts[3] if len(parts) == 4 else None
        rows.append((parts[0], parts[1], value, label))

    order: list[str] = []
    kept: dict[str, list[str]] = {}
    labels: dict[str, str] = {}
    for sample_id, attr, value, label in rows:
        if sample_id not in kept:
            kept[sample_id] = []
            order.append(sample_id)
        if label is not None:
            previous = labels.get(sample_id)
            if previous is not None and previous != label:
                diagnostics.append(Diagnostic(
                    f"conflicting labels {previous!r} and {label!r}",
                    sample_id=sample_id))
            labels[sample_id] = label
        if value >= threshold:
            kept[sample_id].append(attr)

    vocab = Vocabulary()
    name_lists: dict[str, list[list[str]]] = {}
    for sample_id in order:
        attrs = kept[sample_id]
        if not attrs:
            diagnostics.append(Diagnostic(
                f"no attribute at or above threshold {threshold}", sample_id=sample_id))
            continue
        if grouping == "whole":
            entities = [attrs]
        else:
            by_part: dict[str, list[str]] = {}
            for attr in attrs:
                by_part.setdefault(attr.split("::", 1)[0], []).append(attr)
            entities = [by_part[part] for part in sorted(by_part)]
        name_lists[sample_id] = entities
        if sample_id not in labels:
            if "/" in sample_id:
                labels[sample_id] = sample_id.split("/", 1)[0]
            else:
                diagnostics.append(Diagnostic(
                    "no label: add a fourth column or use 'label/...' sample ids",
                    sample_id=sample_id))

    if diagnostics:
        raise DatasetValidationError(diagnostics, source=str(path))
    if not name_lists:
        raise DatasetValidationError([Diagnostic("matrix holds no samples")],
                                     source=str(path))

    samples = []
    by_asd: dict[ASD, Sample] = {}
    for sample_id in order:
        if sample_id not in name_lists:
            continue
        asd = ASD.from_names(vocab, name_lists[sample_id], intern=True)
        clash = by_asd.get(asd)
        if clash is not None and clash.label != labels[sample_id]:
            diagnostics.append(Diagnostic(
                f"identical description under different labels "
                f"(same as sample {clash.id!r} with label {clash.label!r})",
                sample_id=sample_id))
            continue
        sample = Sample(sample_id, labels[sample_id], asd)
        if clash is None:
            by_asd[asd] = sample
        samples.append(sample)
    if diagnostics:
        raise DatasetValidationError(diagnostics, source=str(path))
    return Dataset(vocab, tuple(samples), source=str(path))
