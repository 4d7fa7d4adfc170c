"""Subjects: handles over the black-box decision software under test.

A subject maps an input to a boolean decision. Concrete subjects live in this package: external processes speaking
the line protocol (process.py) and the built-in fixtures (fixtures.py).

"""

from __future__ import annotations

import threading
from typing import Callable

from ..schema import Input, Schema

# Distance between two output labels, a value in [0, 1] that is 0 for equal labels.
OutputDistance = Callable[[bool, bool], float]


def default_distance(a, b):
    """Discrete metric over output labels: 0 if a equals b, 1 otherwise."""
    return 0.0 if a == b else 1.0


class Subject(object):

    """Base class of every subject.

    Subclasses implement decide. Callers go through evaluate_raw, which validates the input and counts invocations.

    Attributes:
        name (str): Short name used in log messages.
        reentrant (bool): Whether several workers may call decide concurrently.
        invocations (int): Number of decisions requested from the subject so far.

    """

    name = 'subject'
    reentrant = False

    def __init__(self):
        self.invocations = 0
        self._invocations_lock = threading.Lock()

    def decide(self, input: Input, schema: Schema) -> bool:
        raise NotImplementedError

    def close(self):
        """Release whatever the subject holds."""

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def evaluate_raw(subject: Subject, input: Input, schema: Schema) -> bool:
    """Ask the subject for its decision on exactly this input.

    Args:
        subject (Subject): The subject under test.
        input (Input): A valid input of schema.
        schema (Schema): The input type.

    Returns:
        decision (bool): The subject's output.

    Raises:
        SubjectError: If the subject crashes, times out or answers with a malformed line.

    """
    schema.validate(input)
    with subject._invocations_lock:
        subject.invocations += 1
    return subject.decide(input, schema)
