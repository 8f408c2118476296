import math
import os

import numpy as np
import pytest

from delone_diagnostics.generators import (
    CurveSpec,
    LatticeSpec,
    SturmianSpec,
    kronecker_source,
    lattice_source,
    sturmian_source,
)

GOLDEN = (math.sqrt(5) - 1) / 2
INV_SQRT2 = 1 / math.sqrt(2)


def cosine2_spec(phase=(0.0, 0.0)) -> CurveSpec:
    return CurveSpec(
        family="cosine2", params=(), theta=INV_SQRT2, phase=phase, label="cosine2"
    )


def linear_spec() -> CurveSpec:
    return CurveSpec(
        family="linear", params=(1.0, -1.0), theta=math.sqrt(2) - 1, label="linear"
    )


@pytest.fixture(scope="session")
def integers():
    return lattice_source(LatticeSpec(basis=[[1.0]], motif=[[0.0]], label="Z"))


@pytest.fixture(scope="session")
def half_integers():
    return lattice_source(LatticeSpec(basis=[[1.0]], motif=[[0.5]], label="Z+0.5"))


@pytest.fixture(scope="session")
def square_lattice():
    return lattice_source(LatticeSpec(basis=np.eye(2), motif=[[0.0, 0.0]], label="Z2"))


@pytest.fixture(scope="session")
def sturmian():
    return sturmian_source(SturmianSpec(theta=GOLDEN, label="golden"))


@pytest.fixture(scope="session")
def cosine2():
    return kronecker_source(cosine2_spec())


@pytest.fixture(scope="session")
def linear_curve():
    return kronecker_source(linear_spec())


@pytest.fixture(scope="session")
def specs_dir():
    return os.path.join(os.path.dirname(__file__), "..", "data", "specs")
