"""Test suites and operational profiles: the partial input domains apparent discrimination is measured on.

A test-suite file is CSV: a header holding the characteristic names in schema order, then one row of label texts per
input. An operational profile file is a JSON object mapping characteristic names to {label: weight} objects;
characteristics it does not name are uniform.

"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass

import numpy as np
from scrapy.exporters import CsvItemExporter

from .exceptions import SuiteError, ProfileError, SchemaError
from .sampler import stream_rng, profile_input, SUITE_STREAM
from .schema import Input, Schema, input_from_labels, labels_of

logger = logging.getLogger(__name__)


class TestSuite(object):

    """Ordered set of inputs, without duplicates."""

    __test__ = False

    def __init__(self, inputs=()):
        self._inputs = dict.fromkeys(inputs)

    def add(self, input: Input):
        self._inputs[input] = None

    def __iter__(self):
        return iter(self._inputs)

    def __len__(self):
        return len(self._inputs)

    def __contains__(self, input):
        return input in self._inputs

    def __eq__(self, other):
        return isinstance(other, TestSuite) and list(self) == list(other)


@dataclass(frozen=True, eq=False)
class OperationalProfile:

    """Independent per-characteristic label distributions.

    Attributes:
        weights (tuple): One numpy array per characteristic, non-negative and summing to 1.

    """

    weights: tuple

    @classmethod
    def uniform(cls, schema: Schema):
        return cls(tuple(np.full(count, 1.0 / count) for count in schema.label_counts))

    @classmethod
    def from_mapping(cls, schema: Schema, mapping):
        """Build a profile from {characteristic name: {label: weight}}, normalizing each distribution."""
        if not isinstance(mapping, dict):
            raise ProfileError("an operational profile must be a JSON object")
        weights = [np.full(count, 1.0 / count) for count in schema.label_counts]
        for name, labels in mapping.items():
            try:
                position = schema.index_of(name)
            except SchemaError as error:
                raise ProfileError(str(error)) from None
            if not isinstance(labels, dict):
                raise ProfileError(f"weights of {name!r} must be an object mapping labels to weights")
            characteristic = schema.characteristics[position]
            raw = np.zeros(len(characteristic))
            for label, weight in labels.items():
                if label not in characteristic.labels:
                    raise ProfileError(f"unknown label {label!r} for characteristic {name!r}")
                if not isinstance(weight, (int, float)) or weight < 0:
                    raise ProfileError(f"weight of {name}={label} must be a non-negative number")
                raw[characteristic.labels.index(label)] = weight
            total = raw.sum()
            if total <= 0:
                raise ProfileError(f"weights of {name!r} sum to zero")
            weights[position] = raw / total
        return cls(tuple(weights))


def load_profile(path, schema: Schema) -> OperationalProfile:
    """Read an operational profile document.

    Args:
        path (str): JSON file mapping characteristic names to {label: weight} objects.
        schema (Schema): The input type the profile is over.

    Returns:
        profile (OperationalProfile): Normalized per-characteristic weights.

    Raises:
        ProfileError: If the file cannot be read, is not JSON, or names unknown characteristics or labels.

    """
    try:
        with open(path, encoding='utf-8') as f:
            mapping = json.load(f)
    except OSError as error:
        raise ProfileError(f"cannot read profile {path}: {error}") from None
    except ValueError as error:
        raise ProfileError(f"{path}: malformed profile: {error}") from None
    return OperationalProfile.from_mapping(schema, mapping)


def generate_suite(schema: Schema, profile: OperationalProfile, size: int, seed: int) -> TestSuite:
    """Draw size inputs from an operational profile; duplicates collapse, so the suite may be smaller."""
    rng = stream_rng(seed, SUITE_STREAM)
    return TestSuite(profile_input(schema, profile, rng) for _ in range(size))


def read_suite(text: str, schema: Schema, source='<suite>') -> TestSuite:
    """Parse a CSV test suite, dropping duplicate rows with a warning."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != schema.names:
        raise SuiteError(f"{source}: header {header} does not match schema characteristics {list(schema.names)}")
    suite = TestSuite()
    duplicates = 0
    for number, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            input = input_from_labels(schema, row)
        except SchemaError as error:
            raise SuiteError(f"{source}:{number}: {error}") from None
        if input in suite:
            duplicates += 1
        suite.add(input)
    if duplicates:
        logger.warning(f"{source}: dropped {duplicates} duplicate inputs")
    return suite


def load_suite(path, schema: Schema) -> TestSuite:
    """Read a test-suite CSV file.

    Args:
        path (str): CSV file whose header lists the characteristic names in schema order.
        schema (Schema): The input type.

    Returns:
        suite (TestSuite): The inputs in file order; duplicate rows are dropped with a warning.

    Raises:
        SuiteError: If the file cannot be read, or on a bad header or row (reported as path:line).

    """
    try:
        with open(path, encoding='utf-8', newline='') as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as error:
        raise SuiteError(f"cannot read suite {path}: {error}") from None
    return read_suite(text, schema, source=str(path))


def write_suite(suite: TestSuite, schema: Schema, file):
    """Write suite as CSV to a binary file object."""
    exporter = CsvItemExporter(file, fields_to_export=list(schema.names), lineterminator='\n')
    exporter.start_exporting()
    for input in suite:
        exporter.export_item(dict(zip(schema.names, labels_of(schema, input))))
    exporter.finish_exporting()
