"""Shared fixtures: field pool, seeded corpora, and a live harness."""

from __future__ import annotations

import pytest

from formbench.fields import load_pool
from formbench.forms import WRAPPER_STYLE, build_corpus
from formbench.harness import Harness


@pytest.fixture(scope="session")
def pool():
    return load_pool("builtin")


@pytest.fixture(scope="session")
def small_corpus(pool):
    return build_corpus(pool, 6, 4, 8, seed=11)


@pytest.fixture(scope="session")
def wrapper_corpus(pool):
    return build_corpus(pool, 6, 4, 8, seed=11,
                        style_template_id=WRAPPER_STYLE)


@pytest.fixture(scope="session")
def harness():
    with Harness() as h:
        yield h
