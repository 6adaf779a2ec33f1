import logging

import networkx as nx
import numpy as np

from predsearch.errors import InvalidSizeError
from predsearch.instgen.rng import PRNG_NAME, instance_rng
from predsearch.models.milp_model import MilpInstance, ObjSense, Row, Sense, VarKind

logger = logging.getLogger(__name__)


def barabasi_albert(nodes: int, affinity: int, rng: np.random.Generator) -> nx.Graph:
    """
    Preferential-attachment graph seeded with a clique on affinity+1 nodes; every
    later node attaches to `affinity` distinct existing nodes drawn proportionally
    to their degree.
    """
    if not 1 <= affinity < nodes:
        raise InvalidSizeError(f"need 1 <= affinity < nodes, got affinity={affinity}, nodes={nodes}")
    graph = nx.complete_graph(affinity + 1)
    degrees = np.zeros(nodes, dtype=np.int64)
    degrees[: affinity + 1] = affinity
    for new_node in range(affinity + 1, nodes):
        prob = degrees[:new_node] / degrees[:new_node].sum()
        targets = rng.choice(new_node, size=affinity, replace=False, p=prob)
        graph.add_node(new_node)
        for t in sorted(int(t) for t in targets):
            graph.add_edge(t, new_node)
            degrees[t] += 1
        degrees[new_node] = affinity
    return graph


def independent_set_instance(graph: nx.Graph, name: str = "independent_set", meta: dict | None = None) -> MilpInstance:
    """max sum x_v s.t. x_u + x_v <= 1 per edge; stored as min -sum x_v."""
    nodes = sorted(graph.nodes())
    index = {v: j for j, v in enumerate(nodes)}
    edges = sorted(tuple(sorted((index[u], index[v]))) for u, v in graph.edges())
    n = len(nodes)
    return MilpInstance(
        name=name,
        objective=[-1.0] * n,
        sense_flag=ObjSense.MAX,
        rows=[Row(coeffs={u: 1.0, v: 1.0}, rhs=1.0, sense=Sense.LE) for u, v in edges],
        lower=[0.0] * n,
        upper=[1.0] * n,
        var_kind=[VarKind.BINARY] * n,
        row_names=[f"e{u + 1}_{v + 1}" for u, v in edges],
        meta=meta or {},
    )


def gen_independent_set(nodes: int, affinity: int, seed: int, index: int = 0) -> MilpInstance:
    if nodes < 1:
        raise InvalidSizeError(f"nodes must be >= 1, got {nodes}")
    rng = instance_rng(seed, index)
    graph = barabasi_albert(nodes, affinity, rng)
    meta = {
        "family": "independent_set",
        "nodes": nodes,
        "affinity": affinity,
        "seed": seed,
        "index": index,
        "prng": PRNG_NAME,
    }
    inst = independent_set_instance(graph, name=f"independent_set_{index}", meta=meta)
    logger.debug(f"Generated IS instance {inst.name}: {nodes} nodes, {inst.num_rows} edges")
    return inst
