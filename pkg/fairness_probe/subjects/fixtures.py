"""Built-in deterministic subjects with known or oracle-computable discrimination.

Fixture specs are written as a name followed by colon-separated parameters:
    const:true                  always true (or false)
    echo-char:<i>               true iff characteristic i is not at its first label
    threshold:<i>:<cutoff>      true iff the label index of characteristic i is at least cutoff
    xor:<i>:<j>[:<k>...]        parity of the listed characteristics, each counted as 1 when not at its first label
    table:<seed>                seeded random truth table over the whole domain
    fraction:<i>:<aux>:<f0>,<f1>,...
                                true iff the label index of characteristic aux is below f * |labels of aux|, with f
                                the fraction configured for the label of characteristic i; every group of i then
                                answers true for exactly its configured fraction of inputs

The truth table of table:<seed> holds numpy.random.Generator(PCG64(seed)).integers(0, 2, |K|), indexed by the
mixed-radix position of the input (last characteristic fastest).

"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass

import numpy as np

from . import Subject
from ..exceptions import FixtureError, SchemaError
from ..schema import Input, Schema, input_from_labels

logger = logging.getLogger(__name__)

TABLE_DOMAIN_BOUND = 2 ** 20


@dataclass(frozen=True)
class FixtureSpec:

    """A fixture name and its parameters.

    Attributes:
        kind (str): One of const, echo-char, threshold, xor, table, fraction.
        params (tuple): Parameters, already converted to int, bool or tuple of float.

    """

    kind: str
    params: tuple

    def __str__(self):
        if self.kind == 'const':
            return f"const:{'true' if self.params[0] else 'false'}"
        if self.kind == 'fraction':
            i, aux, fractions = self.params
            return f"fraction:{i}:{aux}:{','.join(repr(f) for f in fractions)}"
        return ':'.join([self.kind] + [str(p) for p in self.params])


def _int(text, spec):
    try:
        return int(text)
    except ValueError:
        raise FixtureError(f"fixture {spec!r}: {text!r} is not an integer") from None


def parse_fixture(text: str) -> FixtureSpec:
    """Parse a fixture spec string."""
    kind, *args = text.strip().split(':')
    if kind == 'const' and len(args) == 1 and args[0] in ('true', 'false'):
        return FixtureSpec(kind, (args[0] == 'true',))
    if kind == 'echo-char' and len(args) == 1:
        return FixtureSpec(kind, (_int(args[0], text),))
    if kind == 'threshold' and len(args) == 2:
        return FixtureSpec(kind, (_int(args[0], text), _int(args[1], text)))
    if kind == 'xor' and len(args) >= 2:
        return FixtureSpec(kind, tuple(_int(a, text) for a in args))
    if kind == 'table' and len(args) == 1:
        return FixtureSpec(kind, (_int(args[0], text),))
    if kind == 'fraction' and len(args) == 3:
        try:
            fractions = tuple(float(f) for f in args[2].split(','))
        except ValueError:
            raise FixtureError(f"fixture {text!r}: fractions must be numbers") from None
        return FixtureSpec(kind, (_int(args[0], text), _int(args[1], text), fractions))
    raise FixtureError(f"unknown or malformed fixture spec {text!r}")


def validate_fixture(spec: FixtureSpec, schema: Schema) -> FixtureSpec:
    """Raise FixtureError unless spec references valid characteristics of schema."""
    counts = schema.label_counts

    def position(i):
        if not 0 <= i < schema.n:
            raise FixtureError(f"fixture {spec}: characteristic {i} out of range for {schema.n} characteristics")
        return i

    if spec.kind in ('echo-char', 'threshold'):
        position(spec.params[0])
    elif spec.kind == 'xor':
        for i in spec.params:
            position(i)
        if len(set(spec.params)) != len(spec.params):
            raise FixtureError(f"fixture {spec}: characteristics must be distinct")
    elif spec.kind == 'table':
        if schema.domain_size > TABLE_DOMAIN_BOUND:
            raise FixtureError(f"fixture {spec}: domain of {schema.domain_size} inputs exceeds {TABLE_DOMAIN_BOUND}")
        if spec.params[0] < 0:
            raise FixtureError(f"fixture {spec}: seed must be non-negative")
    elif spec.kind == 'fraction':
        i, aux, fractions = spec.params
        position(i)
        position(aux)
        if i == aux:
            raise FixtureError(f"fixture {spec}: the auxiliary characteristic must differ from {i}")
        if len(fractions) != counts[i]:
            raise FixtureError(f"fixture {spec}: {len(fractions)} fractions for {counts[i]} labels")
        for f in fractions:
            cut = f * counts[aux]
            if not 0 <= f <= 1 or abs(cut - round(cut)) > 1e-9:
                raise FixtureError(f"fixture {spec}: fraction {f} is not realizable with {counts[aux]} "
                                   f"auxiliary labels")
    return spec


@functools.lru_cache(maxsize=32)
def _truth_table(seed, domain_size):
    return np.random.Generator(np.random.PCG64(seed)).integers(0, 2, domain_size, dtype=np.int8)


def fixture_decide(spec: FixtureSpec, input: Input, schema: Schema) -> bool:
    """Decide input according to the fixture's definition."""
    kind, params = spec.kind, spec.params
    if kind == 'const':
        return params[0]
    if kind == 'echo-char':
        return input[params[0]] != 0
    if kind == 'threshold':
        return input[params[0]] >= params[1]
    if kind == 'xor':
        return sum(input[i] != 0 for i in params) % 2 == 1
    if kind == 'table':
        return bool(_truth_table(params[0], schema.domain_size)[schema.input_index(input)])
    if kind == 'fraction':
        i, aux, fractions = params
        return input[aux] < round(fractions[input[i]] * schema.label_counts[aux])
    raise FixtureError(f"unknown fixture kind {kind!r}")


class FixtureSubject(Subject):

    """In-process subject deciding with a fixture. Pure, so safe for any number of workers."""

    name = 'fixture'
    reentrant = True

    def __init__(self, spec: FixtureSpec, schema: Schema):
        super(FixtureSubject, self).__init__()
        self.spec = validate_fixture(spec, schema)

    def decide(self, input, schema):
        return fixture_decide(self.spec, input, schema)


def serve_fixture(spec: FixtureSpec, schema: Schema, stdin, stdout) -> int:
    """Answer wire-protocol requests from stdin on stdout until stdin closes.

    Returns:
        code (int): 0 when stdin closed normally, 3 when a request did not fit the schema.

    """
    validate_fixture(spec, schema)
    for line in stdin:
        try:
            input = input_from_labels(schema, line.rstrip('\n').split(','))
        except SchemaError as error:
            logger.error(f"fixture {spec}: bad request {line!r}: {error}")
            return SchemaError.exit_code
        stdout.write('true\n' if fixture_decide(spec, input, schema) else 'false\n')
        stdout.flush()
    return 0
