import pytest

from wubimt.codec import default_punctuation
from wubimt.table import default_table


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture(scope="session")
def punct():
    return default_punctuation()
