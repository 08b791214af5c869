import pathlib

import pytest

from imcergo import UpperTransitionOperator, load_model_file

MODELS = pathlib.Path(__file__).resolve().parents[1] / "models"


@pytest.fixture(scope="session")
def example1():
    return load_model_file(MODELS / "example1.json")


@pytest.fixture(scope="session")
def example2():
    return load_model_file(MODELS / "example2.json")


@pytest.fixture(scope="session")
def example2_vertexized():
    return load_model_file(MODELS / "example2_vertexized.json")


@pytest.fixture(scope="session")
def two_absorbing():
    return load_model_file(MODELS / "two_absorbing.json")


@pytest.fixture(scope="session")
def op1(example1):
    return UpperTransitionOperator(example1)


@pytest.fixture(scope="session")
def op2(example2):
    return UpperTransitionOperator(example2)
