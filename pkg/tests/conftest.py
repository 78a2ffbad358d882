import itertools
from functools import reduce

import numpy as np
import pytest

from qdsp.model import DspModel, LevelSpec

I2 = np.eye(2, dtype=complex)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)


def kron_ops(nq, ops):
    """Full operator from a {qubit: 2x2} map; qubit 0 is the least significant bit."""
    return reduce(np.kron, [ops.get(q, I2) for q in reversed(range(nq))])


def controlled_op(nq, controls, target, u):
    """Dense controlled-u built from projectors, independent of the engine."""
    on = kron_ops(nq, {**{c: P1 for c in controls}, target: u})
    proj = kron_ops(nq, {c: P1 for c in controls}) if controls else np.eye(2**nq)
    return np.eye(2**nq, dtype=complex) - proj + on


def random_independent(rng, n, k=2, x0=None):
    levels = []
    for _ in range(n):
        w = rng.random(k) + 0.05
        levels.append(LevelSpec(tuple(rng.uniform(-2, 2, k)), tuple(w / w.sum())))
    return DspModel.independent(levels, rng.uniform(-1, 1) if x0 is None else x0)


def random_markov(rng, n, x0=0.0):
    values = rng.uniform(-2, 2, (n, 2))
    init = rng.dirichlet([1, 1])
    trans = rng.dirichlet([1, 1], size=(n - 1, 2))
    return DspModel.markov(values, init, trans, x0)


def chain_rule_law(x0, x_plus, x_minus, p, q):
    """Exact law of a correlated walk, enumerated step by step."""
    out = {}
    for path in itertools.product((0, 1), repeat=len(p)):
        pr = p[0] if path[0] == 0 else 1 - p[0]
        for l in range(1, len(p)):
            stay = p[l] if path[l - 1] == 0 else q[l]
            pr *= stay if path[l] == 0 else 1 - stay
        s = x0 + sum(x_plus if j == 0 else x_minus for j in path)
        out[s] = out.get(s, 0.0) + pr
    return out


CRW_PARAMS = dict(x0=0.0, x_plus=1.0, x_minus=-1.0, p=(1 / 2, 2 / 3, 5 / 6, 1.0), q=(1 / 2, 1 / 3, 1 / 6, 0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def crw_model():
    return DspModel.correlated_walk((1.0, -1.0), CRW_PARAMS["p"], CRW_PARAMS["q"], 0.0)


@pytest.fixture
def two_step_model():
    return DspModel.independent([((-1.0, 1.0), (0.3, 0.7)), ((0.5, 2.0), (0.6, 0.4))])
