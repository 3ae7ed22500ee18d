import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile(
    "default", max_examples=25, deadline=None, derandomize=True
)
hypothesis.settings.load_profile("default")


@pytest.fixture(autouse=True)
def _ignore_recurrence_warnings():
    # most tests run up to t_max on purpose
    import warnings

    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="requested t_end")
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
