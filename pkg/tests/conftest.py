import numpy as np
import pytest

from leakage_lab.confusion import build
from leakage_lab.mechanism import Mechanism, PartitionMechanism
from leakage_lab.prob import ProductDistribution, SourceDistribution
from leakage_lab.system import SystemSpec, UserSpec

ACCEPTANCE_LINES: list[str] = []


def binary_uniform(n=2):
    return ProductDistribution(tuple(SourceDistribution.uniform(2) for _ in range(n)))


def t1_system():
    """Two uniform bits; one user knows x2 and must decode x1; adversary knows x2."""
    return SystemSpec(binary_uniform(), (UserSpec({1}, {0}, 0.0),), {1})


def t2_system():
    """Same user as T1, adversary knows nothing."""
    return SystemSpec(binary_uniform(), (UserSpec({1}, {0}, 0.0),), set())


def t3_system():
    """User has no side info, must decode x1, wants 0.5 bit of gain on x2; adversary knows x1."""
    return SystemSpec(binary_uniform(), (UserSpec(set(), {0}, 0.5),), {0})


@pytest.fixture
def T1():
    return t1_system()


@pytest.fixture
def T2():
    return t2_system()


@pytest.fixture
def T3():
    return t3_system()


def random_sources(rng, n, max_alphabet=3):
    out = []
    for _ in range(n):
        k = int(rng.integers(2, max_alphabet + 1))
        p = rng.dirichlet(np.ones(k)) + 1e-3
        out.append(SourceDistribution(tuple(p / p.sum())))
    return ProductDistribution(tuple(out))


def random_subset(rng, pool, p=0.5):
    return frozenset(int(i) for i in pool if rng.random() < p)


def random_spec(rng, n_max=4, max_alphabet=3, m_max=3, thresholds=True):
    """Random valid system; thresholds are a random fraction of the cap."""
    n = int(rng.integers(1, n_max + 1))
    src = random_sources(rng, n, max_alphabet)
    users = []
    for _ in range(int(rng.integers(1, m_max + 1))):
        A = random_subset(rng, range(n), 0.4)
        W = random_subset(rng, sorted(set(range(n)) - A), 0.5)
        G = frozenset(range(n)) - A - W
        d = float(rng.random()) * src.min_entropy(G) if thresholds else 0.0
        users.append(UserSpec(A, W, d))
    P = random_subset(rng, range(n), 0.4)
    return SystemSpec(src, tuple(users), P)


def random_kernel(rng, size, outputs=None, sparsity=0.3):
    k = int(outputs or rng.integers(1, 6))
    K = rng.dirichlet(np.ones(k), size=size)
    K[rng.random(K.shape) < sparsity] = 0.0
    for row in K:
        if row.sum() == 0:
            row[rng.integers(k)] = 1.0
    K /= K.sum(axis=1, keepdims=True)
    return Mechanism(K)


def random_partition(rng, size, max_cells=None):
    k = int(max_cells or rng.integers(1, size + 1))
    return PartitionMechanism.from_labels(rng.integers(0, k, size=size))


def decodable_partition(rng, spec, max_cells=None):
    """Random partition whose cells contain no confusable pair."""
    adj = build(spec).adjacency
    size = spec.sources.size
    labels = rng.integers(0, int(max_cells or rng.integers(1, size + 1)), size=size)
    cells: list[list[int]] = []
    owner: list[int] = []
    for x in rng.permutation(size):
        placed = False
        for c, cell in enumerate(cells):
            if owner[c] == labels[x] and not adj[x, cell].any():
                cell.append(int(x))
                placed = True
                break
        if not placed:
            cells.append([int(x)])
            owner.append(labels[x])
    return PartitionMechanism(tuple(tuple(c) for c in cells), size)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
