from __future__ import annotations

import numpy as np
import pytest

from frobmodel.algebra import (
    _presentation_from_array,
    field_algebra,
    group_algebra_elementary_abelian,
    truncated_polynomial,
    validate_algebra,
)


def matrix_algebra_f2():
    c = np.zeros((4, 4, 4), dtype=np.int64)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                c[2 * i + j, 2 * j + k, 2 * i + k] = 1
    return _presentation_from_array(2, c, [1, 0, 0, 1], [1, 0, 0, 1], "M2(F2)")


def f4_over_f2():
    # basis 1, w with w^2 = w + 1
    c = np.zeros((2, 2, 2), dtype=np.int64)
    c[0, 0, 0] = c[0, 1, 1] = c[1, 0, 1] = 1
    c[1, 1, 0] = c[1, 1, 1] = 1
    return _presentation_from_array(2, c, [1, 0], [0, 1], "F4")


@pytest.fixture(scope="session")
def A2():
    return validate_algebra(truncated_polynomial(2, 2))


@pytest.fixture(scope="session")
def B3():
    return validate_algebra(truncated_polynomial(3, 3))


@pytest.fixture(scope="session")
def klein():
    return validate_algebra(group_algebra_elementary_abelian(2, 2))


@pytest.fixture(scope="session")
def F5():
    return validate_algebra(field_algebra(5))


@pytest.fixture(scope="session")
def mat2():
    return validate_algebra(matrix_algebra_f2())


@pytest.fixture(scope="session")
def F4():
    return validate_algebra(f4_over_f2())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
