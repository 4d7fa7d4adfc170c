"""Input schemas over categorical characteristics.

A schema is an ordered sequence of named characteristics, each with an ordered set of labels. Inputs store one label
index per characteristic; label text only appears at the wire, CSV and report boundaries.

The schema document is JSON:
    {"characteristics":[{"name":"race","values":["green","purple"]},{"name":"age","values":["lt40","geq40"]}]}

"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .exceptions import SchemaError, UsageError

_FORBIDDEN = (',', '\n', '\r')


def _check_text(value, what):
    if not isinstance(value, str) or not value:
        raise SchemaError(f"{what} must be a non-empty string, got {value!r}")
    if value != value.strip():
        raise SchemaError(f"{what} {value!r} has leading or trailing whitespace")
    if any(c in value for c in _FORBIDDEN):
        raise SchemaError(f"{what} {value!r} contains a comma or a line break")


@dataclass(frozen=True)
class Characteristic:

    """A named categorical characteristic.

    Attributes:
        name (str): Identifier, free of commas, line breaks and surrounding whitespace.
        labels (tuple): Ordered, pairwise distinct label texts.

    """

    name: str
    labels: tuple

    def __post_init__(self):
        _check_text(self.name, "characteristic name")
        object.__setattr__(self, 'labels', tuple(self.labels))
        if not self.labels:
            raise SchemaError(f"empty label set for characteristic {self.name!r}")
        seen = set()
        for label in self.labels:
            _check_text(label, f"label of characteristic {self.name!r}")
            if label in seen:
                raise SchemaError(f"duplicate label {label!r} in characteristic {self.name!r}")
            seen.add(label)

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class Input:

    """A full valuation: one label index per characteristic, in schema order."""

    values: tuple

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, position):
        return self.values[position]


@dataclass(frozen=True, order=True)
class CharSubset:

    """A sorted, deduplicated set of characteristic positions."""

    indices: tuple

    @classmethod
    def of(cls, indices, n=None):
        """Build a subset from any iterable of positions, validating them against a schema size when given."""
        ordered = tuple(sorted(set(int(i) for i in indices)))
        if n is not None and any(i < 0 or i >= n for i in ordered):
            raise SchemaError(f"subset {list(ordered)} out of range for {n} characteristics")
        return cls(ordered)

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, position):
        return position in self.indices

    def issubset(self, other):
        return set(self.indices) <= set(other.indices)


@dataclass(frozen=True)
class Schema:

    """An input type: the ordered characteristics every input assigns labels to.

    Attributes:
        characteristics (tuple): The characteristics, in wire order.

    """

    characteristics: tuple

    def __post_init__(self):
        object.__setattr__(self, 'characteristics', tuple(self.characteristics))
        if not self.characteristics:
            raise SchemaError("a schema needs at least one characteristic")
        names = set()
        for characteristic in self.characteristics:
            if characteristic.name in names:
                raise SchemaError(f"duplicate characteristic name {characteristic.name!r}")
            names.add(characteristic.name)

    @property
    def n(self):
        return len(self.characteristics)

    @property
    def label_counts(self):
        return tuple(len(c) for c in self.characteristics)

    @property
    def domain_size(self):
        return math.prod(self.label_counts)

    @property
    def names(self):
        return tuple(c.name for c in self.characteristics)

    def index_of(self, name):
        """Return the position of the characteristic called name."""
        for position, characteristic in enumerate(self.characteristics):
            if characteristic.name == name:
                return position
        raise SchemaError(f"unknown characteristic {name!r}")

    def subset_of(self, names):
        """Build a CharSubset from characteristic names."""
        return CharSubset.of((self.index_of(name) for name in names), self.n)

    def validate(self, input):
        """Raise SchemaError unless input is a valuation of this schema."""
        if len(input) != self.n:
            raise SchemaError(f"input has {len(input)} values, schema has {self.n} characteristics")
        for position, (value, count) in enumerate(zip(input, self.label_counts)):
            if not 0 <= value < count:
                raise SchemaError(f"label index {value} out of range for characteristic "
                                  f"{self.characteristics[position].name!r}")
        return input

    def input_index(self, input):
        """Mixed-radix index of input in enumeration order (last characteristic fastest)."""
        index = 0
        for value, count in zip(input, self.label_counts):
            index = index * count + value
        return index


def input_from_labels(schema: Schema, labels: Sequence[str]) -> Input:
    """Decode label texts, in schema order, into an Input."""
    if len(labels) != schema.n:
        raise SchemaError(f"expected {schema.n} labels, got {len(labels)}")
    values = []
    for position, (label, characteristic) in enumerate(zip(labels, schema.characteristics)):
        try:
            values.append(characteristic.labels.index(label))
        except ValueError:
            raise SchemaError(f"unknown label {label!r} at position {position} "
                              f"(characteristic {characteristic.name!r})") from None
    return Input(tuple(values))


def labels_of(schema: Schema, input: Input) -> tuple:
    """Encode an Input as label texts in schema order."""
    return tuple(c.labels[v] for c, v in zip(schema.characteristics, input))


def parse_schema(text) -> Schema:
    """Parse and validate a schema document.

    Args:
        text (str or bytes): A UTF-8 JSON document with exactly the keys characteristics, name and values.

    Returns:
        schema (Schema): The validated schema.

    Raises:
        SchemaError: On malformed JSON, unknown or missing keys, duplicate names or labels, or empty label sets.

    """
    try:
        if isinstance(text, bytes):
            text = text.decode('utf-8')
        document = json.loads(text)
    except ValueError as error:
        raise SchemaError(f"malformed schema document: {error}") from None
    if not isinstance(document, dict) or set(document) != {'characteristics'}:
        raise SchemaError("malformed schema document: expected exactly the key 'characteristics'")
    entries = document['characteristics']
    if not isinstance(entries, list):
        raise SchemaError("malformed schema document: 'characteristics' must be a list")

    characteristics = []
    for position, entry in enumerate(entries):
        if not isinstance(entry, dict) or set(entry) != {'name', 'values'}:
            raise SchemaError(f"malformed characteristic at position {position}: "
                              f"expected exactly the keys 'name' and 'values'")
        if not isinstance(entry['values'], list):
            raise SchemaError(f"malformed characteristic at position {position}: 'values' must be a list")
        characteristics.append(Characteristic(entry['name'], tuple(entry['values'])))
    return Schema(tuple(characteristics))


def serialize_schema(schema: Schema) -> str:
    """Serialize a schema to its canonical document."""
    document = {'characteristics': [{'name': c.name, 'values': list(c.labels)} for c in schema.characteristics]}
    return json.dumps(document, ensure_ascii=False, separators=(',', ':'))


def load_schema(path) -> Schema:
    """Read and parse a schema document.

    Args:
        path (str): Path of the JSON schema document.

    Returns:
        schema (Schema): The parsed schema.

    Raises:
        SchemaError: If the file cannot be read or the document is invalid.

    """
    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as error:
        raise SchemaError(f"cannot read schema {path}: {error}") from None
    return parse_schema(data)


def schema_digest(schema: Schema) -> str:
    """SHA-256 of the canonical serialization."""
    return hashlib.sha256(serialize_schema(schema).encode('utf-8')).hexdigest()


def enumerate_subsets(schema: Schema, max_size: int) -> Iterator[CharSubset]:
    """Yield every non-empty subset of at most max_size characteristics, size-ascending then lexicographic.

    Raises:
        UsageError: If max_size is not within 1..n.

    """
    if not 1 <= max_size <= schema.n:
        raise UsageError(f"max subset size {max_size} out of range 1..{schema.n}")
    for size in range(1, max_size + 1):
        for indices in itertools.combinations(range(schema.n), size):
            yield CharSubset(indices)


def enumerate_inputs(schema: Schema) -> Iterator[Input]:
    """Yield every input of the schema in mixed-radix order."""
    for values in itertools.product(*(range(count) for count in schema.label_counts)):
        yield Input(values)


def enumerate_assignments(schema: Schema, subset: CharSubset) -> Iterator[tuple]:
    """Yield every assignment of label indices to the characteristics of subset, in mixed-radix order."""
    return itertools.product(*(range(schema.label_counts[i]) for i in subset))
