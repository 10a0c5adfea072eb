import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from toriclab.config import DEFAULTS, RunConfig
from toriclab.lattice import Bond, Cone, Orientation, Window
from toriclab.pauli import PauliOp

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def bonds_in(xmin=-4, xmax=4, ymin=-4, ymax=4):
    return st.builds(Bond, st.integers(xmin, xmax), st.integers(ymin, ymax),
                     st.sampled_from([Orientation.E, Orientation.N]))


def pauli_ops(max_bonds=8, **box):
    b = st.frozensets(bonds_in(**box), max_size=max_bonds)
    return st.builds(PauliOp, st.integers(0, 3), b, b)


primitive_dirs = st.sampled_from([(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (1, -1), (-1, -1),
                                  (2, 1), (1, 2), (-1, 2), (-2, 1), (1, 3), (-1, 3), (3, -1)])


@st.composite
def cones(draw):
    apex = (draw(st.integers(-2, 2)), draw(st.integers(-2, 2)))
    d1 = draw(primitive_dirs)
    d2 = draw(primitive_dirs.filter(lambda d: d1[0] * d[1] - d1[1] * d[0] > 0))
    return Cone(apex, d1, d2)


@pytest.fixture
def default_cfg():
    return RunConfig(DEFAULTS)


@pytest.fixture
def rng():
    return random.Random(12345)


# Configuration with two interior gap vertices: the outer cone sits one row
# below a second cone three rows up, both with slope-3 edges.
TWO_SITE = {
    "inner": Cone((0, 3), (1, 3), (-1, 3)),
    "outer": Cone((0, 0), (1, 3), (-1, 3)),
    "window": Window(-6, 6, -3, 12),
}
