import pytest

from primegrid.ledger import build_ledger
from primegrid.sequence import build_store


@pytest.fixture(scope="session")
def demo_ledger():
    # 6 blocks parameterized, blocks 1..5 closed
    return build_ledger("demo", 6)


@pytest.fixture(scope="session")
def demo_store(demo_ledger):
    return build_store(demo_ledger)


@pytest.fixture(scope="session")
def faithful_ledger():
    return build_ledger("faithful", 2)
