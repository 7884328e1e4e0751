"""
Configuration file for pytest.
This file sets up shared fixtures: seeded layer inputs, array geometries and
a seeded Faker instance for configuration generators.
"""

import pytest
from faker import Faker

from gradinterleave import golden
from gradinterleave.models.core_models import ArrayGeometry, LayerShape, Precision
from gradinterleave.models.train_models import TrainStepInputs


@pytest.fixture
def small_geometry() -> ArrayGeometry:
    """
    Fixture to provide a 4 x 4 array, small enough for cycle-stepped runs.
    Returns:
        ArrayGeometry: P = Q = 4.
    """
    return ArrayGeometry(p=4, q=4)


@pytest.fixture
def full_geometry() -> ArrayGeometry:
    """
    Fixture to provide the 128 x 128 array used for benchmarks.
    Returns:
        ArrayGeometry: P = Q = 128.
    """
    return ArrayGeometry(p=128, q=128)


@pytest.fixture
def small_shape() -> LayerShape:
    """
    Fixture to provide an 8 x 8 layer with a batch of 4.
    Returns:
        LayerShape: N = M = 8, B = 4.
    """
    return LayerShape(n_out=8, m_in=8, batch=4)


@pytest.fixture
def int_inputs(small_shape: LayerShape) -> TrainStepInputs:
    """
    Fixture to provide seeded integer inputs for the small layer, lr = 1.
    Returns:
        TrainStepInputs: Exact-integer operands.
    """
    return golden.seeded_inputs(small_shape, seed=7, precision=Precision.INT, lr=1)


@pytest.fixture
def f64_inputs(small_shape: LayerShape) -> TrainStepInputs:
    """
    Fixture to provide seeded f64 inputs for the small layer, lr = 0.125.
    Returns:
        TrainStepInputs: Double-precision operands.
    """
    return golden.seeded_inputs(small_shape, seed=7, precision=Precision.F64, lr=0.125)


@pytest.fixture
def faker_instance() -> Faker:
    """
    Fixture to provide a Faker instance with a fixed seed, so generated
    configurations are the same on every run.
    Returns:
        Faker: Seeded Faker.
    """
    fake = Faker()
    fake.seed_instance(2019)
    return fake
