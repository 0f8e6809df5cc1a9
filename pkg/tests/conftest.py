import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from colmp.fixtures import generate_fixture
from colmp.types import ColumnFeatures


@pytest.fixture(scope="session")
def fixture_ds():
    """Medium synthetic dataset shared by pipeline-level tests."""
    return generate_fixture(seed=7, n_rect=120, n_circ=80)


@pytest.fixture
def worked_features():
    """The feature vector used in the worked estimator examples."""
    return ColumnFeatures(span_depth=3.0, axial_ratio=0.2, rho_l=0.02,
                          rho_t=0.01, spacing_depth=0.5, shear_ratio=0.8)


def random_features(rng: np.random.Generator) -> ColumnFeatures:
    """One random-but-valid feature vector."""
    return ColumnFeatures(
        span_depth=rng.uniform(0.5, 10.0),
        axial_ratio=rng.uniform(0.0, 1.0),
        rho_l=rng.uniform(0.0, 0.06),
        rho_t=rng.uniform(0.0, 0.03),
        spacing_depth=rng.uniform(0.05, 1.5),
        shear_ratio=rng.uniform(0.0, 2.0),
    )
