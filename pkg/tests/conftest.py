import random

import pytest
from gmpy2 import mpq

from simplexmoments import catalog as cat


@pytest.fixture(scope="session")
def solids():
    """Catalog polytopes by name (d <= 4, everything the fast tests touch)."""
    wanted = ["T1", "T2", "C2", "T3", "C3", "O3", "T4", "C4", "O4",
              "square pyramid", "triangular prism", "triangular bipyramid", "cuboctahedron",
              "rhombic dodecahedron", "truncated tetrahedron", "triakis tetrahedron"]
    return {name: cat.get(name).polytope for name in wanted}


def random_rational(rng: random.Random, lo=-3, hi=3, den=7):
    return mpq(rng.randint(lo * den, hi * den), rng.randint(1, den))


def random_eta(rng: random.Random, P, tries=200):
    """Random rational eta whose plane cuts P without touching a vertex."""
    for _ in range(tries):
        eta = tuple(random_rational(rng) for _ in range(P.dim))
        vals = [sum(a * b for a, b in zip(eta, v)) - 1 for v in P.vertices]
        if any(x == 0 for x in vals):
            continue
        if any(x < 0 for x in vals) and any(x > 0 for x in vals):
            return eta
    raise RuntimeError("no cutting plane found")
