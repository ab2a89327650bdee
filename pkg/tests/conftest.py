#! /usr/bin/env python3

import numpy as np
import pytest

from rh.hierarchy import RodParams
from rh.reduction import CasimirTriple

@pytest.fixture
def rng():
    return np.random.default_rng(20180329)

@pytest.fixture(scope="session")
def section_params():
    """
    Stiffnesses of the isotropic magnetic rod used for the Poincaré sections.
    """
    return RodParams.isotropic(1.0, 0.75)

@pytest.fixture(scope="session")
def section_casimirs():
    return CasimirTriple(1.02, 1.0, 1.0)
