import pathlib

import pytest

from smallheight.fields import FieldDescriptor

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def Q():
    return FieldDescriptor.rational()


@pytest.fixture
def QI():
    return FieldDescriptor.quadratic(-1)


@pytest.fixture
def F2():
    return FieldDescriptor.function(2)


@pytest.fixture
def F3():
    return FieldDescriptor.function(3)
