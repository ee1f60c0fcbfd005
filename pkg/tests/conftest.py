import pytest

from curatekit.balancer import SubsetId, TaggedPrompt
from curatekit.classifier import LabeledPrompt
from curatekit.taxonomy import AXIS_NAMES, default_taxonomy


@pytest.fixture(scope="session")
def tax():
    return default_taxonomy()


def lp(pid, sc=(), tc=(), sa=(), ta=()):
    """Shorthand for a labeled prompt; axes in SC, TC, SA, TA order."""
    return LabeledPrompt(pid, {a: frozenset(v) for a, v in zip(AXIS_NAMES, (sc, tc, sa, ta))})


def tagged(pid, *keys, subset=SubsetId.P1):
    return TaggedPrompt(pid, subset, tuple(keys))
