import pytest

from core.arithmetic import ArithmeticToolkit
from core.constants import compute_constants
from core.dimensions import DimensionCalculator
from core.dirichlet import DirichletEngine, FunctionRegistry
from core.oracle import NewformOracle
from utils.config import ScanConfig
from utils.scanner import LevelScanner

# Euler products over primes up to 10^5 keep the radius near 5e-6, enough for every test.
TEST_CUTOFF_PRIME = 100_000


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run acceptance-scale scans")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def config():
    return ScanConfig(euler_cutoff_prime=TEST_CUTOFF_PRIME)


@pytest.fixture(scope="session")
def toolkit():
    return ArithmeticToolkit()


@pytest.fixture(scope="session")
def registry():
    return FunctionRegistry()


@pytest.fixture(scope="session")
def engine(toolkit, registry, config):
    return DirichletEngine(toolkit, registry, config)


@pytest.fixture(scope="session")
def calculator(engine, config):
    return DimensionCalculator(engine, config)


@pytest.fixture(scope="session")
def scanner(calculator, config):
    return LevelScanner(calculator, config)


@pytest.fixture(scope="session")
def oracle(calculator, scanner):
    return NewformOracle(calculator, scanner)


@pytest.fixture(scope="session")
def constants():
    return compute_constants(TEST_CUTOFF_PRIME)
