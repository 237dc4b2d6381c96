import math

import pytest
from hypothesis import HealthCheck, settings

from shifttree import WeightedShift, WeightSequence, builtin

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

BUILTINS = ["T1", "T2", "T3", "T4", "Tfan(3)", "Tfan(5)"]


@pytest.fixture(params=BUILTINS)
def tree(request):
    return builtin(request.param)


@pytest.fixture
def shift(tree):
    return WeightedShift.default(tree)


def closed_form_shift():
    """T2 with weights 1,1 / 1,sqrt2 / sqrt2,1 then 1 on both rays."""
    r2 = math.sqrt(2)
    return WeightedShift(
        builtin("T2"),
        {},
        {"1": WeightSequence((1, 1, r2), (1,)), "2": WeightSequence((1, r2, 1), (1,))},
    )


def dyadic_shift():
    return WeightedShift(builtin("T1"), {}, {"1": WeightSequence((), None, "dyadic_blocks")})


def two_circle_shift(a=1.0, b=3.0):
    return WeightedShift(builtin("T2"), {}, {"1": WeightSequence((), (a,)), "2": WeightSequence((), (b,))})
