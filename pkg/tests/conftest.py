import copy
import random

import pytest

from prm import enumeration as E
from prm.density import build_dense_subset
from prm.ideal import PsiFixture, build_ideal
from prm.sparse import build_sparse


@pytest.fixture(scope="session")
def sparse3():
    return build_sparse(3)


@pytest.fixture(scope="session")
def sparse6():
    return build_sparse(6)


@pytest.fixture(scope="session")
def dense_golden(sparse3):
    return build_dense_subset(E.ALL_SET, sparse3, 3, 10**6)


@pytest.fixture(scope="session")
def ideal6(sparse6):
    return build_ideal(sparse6, PsiFixture("constant", (0,)))


# -- acceptance report ------------------------------------------------------

# criterion number -> (status, description), filled in by test_acceptance
CRITERIA: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        status, text = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {status:<15} {text}")


# -- single-bit mutations of a JSON payload ---------------------------------

SKIP_KEYS = {"kind", "cost_model_version", "sparse_ref"}


def payload_leaves(doc, path=()):
    """Paths of every integer or boolean leaf outside the header fields."""
    if isinstance(doc, dict):
        for k in sorted(doc):
            if not path and k in SKIP_KEYS:
                continue
            yield from payload_leaves(doc[k], path + (k,))
    elif isinstance(doc, list):
        for i, v in enumerate(doc):
            yield from payload_leaves(v, path + (i,))
    elif isinstance(doc, (bool, int)):
        yield path


def flip_bit(doc, path, bit):
    out = copy.deepcopy(doc)
    node = out
    for k in path[:-1]:
        node = node[k]
    old = node[path[-1]]
    node[path[-1]] = (not old) if isinstance(old, bool) else old ^ (1 << bit)
    return out


def random_mutations(doc, count, seed):
    rng = random.Random(seed)
    leaves = list(payload_leaves(doc))
    for _ in range(count):
        path = rng.choice(leaves)
        node = doc
        for k in path:
            node = node[k]
        width = 1 if isinstance(node, bool) else max(node.bit_length(), 1) + 1
        bit = rng.randrange(width)
        yield path, bit, flip_bit(doc, path, bit)
