import os

import hypothesis
import numpy as np
import pytest

np.seterr(all="warn", under="ignore")

hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("default", max_examples=25, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def small_ring():
    from chirpdnls import DimensionlessParams

    return DimensionlessParams(p1=0.5, p2=3.0, p3=0.4, n_sites=6)


@pytest.fixture
def small_chain():
    from chirpdnls import DimensionlessParams

    return DimensionlessParams(p1=0.5, p2=3.0, p3=0.4, n_sites=7)
