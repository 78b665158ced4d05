import numpy as np
import pytest

import lapdiag as ld
from lapdiag import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile every numba kernel once so timing-sensitive tests measure work,
    # not JIT latency
    _kernels.warmup()


@pytest.fixture
def p3():
    return ld.generate_test_graph("path", 3)


@pytest.fixture
def k2():
    return ld.from_edges([(0, 1)])


@pytest.fixture
def k3():
    return ld.generate_test_graph("complete", 3)


@pytest.fixture
def k4():
    return ld.generate_test_graph("complete", 4)


@pytest.fixture
def s3():
    # three leaves around center 3 (center stored last on purpose)
    return ld.from_edges([(0, 3), (1, 3), (2, 3)])


@pytest.fixture
def bowtie():
    # two triangles sharing vertex 2
    return ld.from_edges([(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])


@pytest.fixture
def c4_chord():
    return ld.from_edges([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])


@pytest.fixture
def weighted_triangle():
    return ld.from_edges([(0, 1), (0, 2), (1, 2)], weights=[2.0, 1.0, 1.0])


@pytest.fixture
def er300():
    return ld.generate_test_graph("erdos_renyi", 300, seed=7, p=0.03)


def random_connected_graph(rng, n_max=60, weighted=False):
    """Small random connected graph for property checks."""
    n = int(rng.integers(4, n_max + 1))
    p = min(1.0, 2.5 * np.log(n) / n)
    g = ld.generate_test_graph("erdos_renyi", n, seed=int(rng.integers(2**31)), p=p)
    if not weighted:
        return g
    w = rng.uniform(0.5, 2.0, size=g.m)
    return ld.from_edges(g.edge_array, n=g.n, weights=w)
