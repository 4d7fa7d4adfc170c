"""Schemas and subjects shared by the unit tests."""

import os

from fairness_probe.schema import Characteristic, Schema
from fairness_probe.subjects import Subject

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def make_schema(*counts, names=None):
    """Schema with characteristics c0, c1, ... holding labels v0, v1, ... in the given counts."""
    names = names or [f"c{i}" for i in range(len(counts))]
    return Schema(tuple(Characteristic(name, tuple(f"v{j}" for j in range(count)))
                        for name, count in zip(names, counts)))


class CountingSubject(Subject):

    """Subject wrapping a plain function of the label indices."""

    reentrant = True

    def __init__(self, function):
        super(CountingSubject, self).__init__()
        self.function = function

    def decide(self, input, schema):
        return bool(self.function(input.values))


class FailingSubject(Subject):

    """Subject raising the given error once it has answered `after` requests."""

    def __init__(self, error, after=0):
        super(FailingSubject, self).__init__()
        self.error = error
        self.after = after

    def decide(self, input, schema):
        if self.invocations > self.after:
            raise self.error
        return input[0] != 0
