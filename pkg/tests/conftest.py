"""Shared fixtures: the reference dataset and the default protocol.

Session scope keeps the expensive artifacts (parsed data, the seed-1
protocol, the full experiment suites) computed exactly once per run.
"""

import numpy as np
import pytest

from mpgworkbench.experiments import (ExperimentConfig, prepare_protocol,
                                      run_classification_grid,
                                      run_regression_suite)
from mpgworkbench.ingest import load_dataset, parse_auto_mpg, reference_data_path


@pytest.fixture(scope="session")
def reference_text():
    with open(reference_data_path(), "r", encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture(scope="session")
def raw_table(reference_text):
    return parse_auto_mpg(reference_text)


@pytest.fixture(scope="session")
def dataset():
    return load_dataset(reference_data_path())


@pytest.fixture(scope="session")
def protocol():
    return prepare_protocol(ExperimentConfig())


@pytest.fixture(scope="session")
def regression_suite(protocol):
    return run_regression_suite(ExperimentConfig(), protocol)


@pytest.fixture(scope="session")
def classification_grid(protocol):
    return run_classification_grid(ExperimentConfig(), protocol)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
