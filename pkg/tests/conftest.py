"""
Pytest configuration and fixtures for the satpart tests.
"""
import os

import numpy as np
import pytest

# Set test environment variables
os.environ.update({
    "ENVIRONMENT": "test",
    "SATPART_LOG_LEVEL": "WARNING",
})
os.environ.pop("SENTRY_DSN", None)
os.environ.pop("SATPART_WORKERS", None)

from satpart.encoders.instances import make_instance, weaken  # noqa: E402
from satpart.formula.cnf import Cnf  # noqa: E402


def random_kcnf(n: int, m: int, seed: int, k: int = 3) -> Cnf:
    """Uniform random k-CNF with distinct variables per clause."""
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(m):
        variables = rng.choice(n, size=k, replace=False) + 1
        signs = rng.integers(0, 2, size=k)
        clauses.append(tuple(int(v) if s else -int(v) for v, s in zip(variables, signs)))
    return Cnf(n, tuple(clauses))


@pytest.fixture
def cnf_factory():
    """Seeded random 3-CNF factory."""
    return random_kcnf


@pytest.fixture
def small_sat_cnf():
    """(x1 or x2) and (not x1 or x3) and (not x2 or not x3), satisfiable."""
    return Cnf(3, ((1, 2), (-1, 3), (-2, -3)))


@pytest.fixture
def pigeonhole_cnf():
    """Three pigeons, two holes: unsatisfiable. Variable 2p + h - 2 means pigeon p in hole h."""
    def var(p, h):
        return 2 * (p - 1) + h
    clauses = [(var(p, 1), var(p, 2)) for p in (1, 2, 3)]
    for h in (1, 2):
        for p in (1, 2, 3):
            for q in range(p + 1, 4):
                clauses.append((-var(p, h), -var(q, h)))
    return Cnf(6, tuple(clauses))


@pytest.fixture(scope="session")
def bivium_instance():
    """Bivium instance with 40 keystream bits and its witness meta."""
    return make_instance("bivium", 40, seed=11)


@pytest.fixture(scope="session")
def bivium_toy(bivium_instance):
    """Bivium instance weakened until only the first 6 starting variables are free."""
    cnf, meta = bivium_instance
    return weaken(cnf, meta, 171, extend=True)
