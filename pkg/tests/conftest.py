import numpy as np
import pytest

from slabperc.geometry import Region, SlabSpec
from slabperc.sampling import Config

PLANE = SlabSpec(1, 2)
SLAB = SlabSpec(2, 3)


def random_config(region, rng, p=0.5):
    return Config.from_bits(region, rng.random(region.n_bonds) < p, p, 0)


def small_regions():
    """Boxes with at most 12 sites across a few slab shapes."""
    out = []
    for spec in (PLANE, SLAB, SlabSpec(3, 3), SlabSpec(2, 4)):
        F = spec.fiber_size
        for m in range(1, 5):
            for n in range(1, 5):
                if m * n * F <= 12:
                    out.append(Region.box(m, n, spec))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
