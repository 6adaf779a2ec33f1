import networkx as nx
import numpy as np
import pytest

from predsearch.instgen.independent_set import independent_set_instance
from predsearch.models.milp_model import MilpInstance, ObjSense, Row, Sense, VarKind

TWO_VAR_MPS = """NAME two_var
ROWS
 N  OBJ
 L  C1
COLUMNS
    MARKER  'MARKER'  'INTORG'
    x1  OBJ  -1
    x1  C1  1
    x2  OBJ  -1
    x2  C1  1
    MARKER  'MARKER'  'INTEND'
RHS
    RHS  C1  1
ENDATA
"""


def binary_instance(c, rows, name="toy", sense_flag=ObjSense.MIN) -> MilpInstance:
    n = len(c)
    return MilpInstance(
        name=name,
        objective=list(c),
        sense_flag=sense_flag,
        rows=[Row(coeffs=coeffs, rhs=rhs, sense=sense) for coeffs, rhs, sense in rows],
        lower=[0.0] * n,
        upper=[1.0] * n,
        var_kind=[VarKind.BINARY] * n,
    )


def random_binary_instance(seed: int, n: int = 8, m: int = 5) -> MilpInstance:
    """Small knapsack-like instance; the all-zero vector is always feasible."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(m):
        support = rng.choice(n, size=int(rng.integers(2, n + 1)), replace=False)
        coeffs = {int(j): float(rng.integers(1, 6)) for j in sorted(support)}
        rows.append((coeffs, float(rng.integers(2, 9)), Sense.LE))
    c = [-float(v) for v in rng.integers(1, 10, size=n)]
    return binary_instance(c, rows, name=f"random_{seed}")


@pytest.fixture
def two_var():
    """min -x1 - x2 s.t. x1 + x2 <= 1."""
    return binary_instance([-1.0, -1.0], [({0: 1.0, 1: 1.0}, 1.0, Sense.LE)], name="two_var")


@pytest.fixture
def triangle():
    return independent_set_instance(nx.complete_graph(3), name="triangle")


@pytest.fixture
def mixed():
    """One binary switching on a continuous supply: min 3y - 2s, s <= 4y, s <= 2.5."""
    return MilpInstance(
        name="mixed",
        objective=[3.0, -2.0],
        rows=[Row(coeffs={1: 1.0, 0: -4.0}, rhs=0.0, sense=Sense.LE)],
        lower=[0.0, 0.0],
        upper=[1.0, 2.5],
        var_kind=[VarKind.BINARY, VarKind.CONTINUOUS],
        var_names=["y", "s"],
    )
