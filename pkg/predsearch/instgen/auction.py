import logging

import numpy as np

from predsearch.errors import InvalidSizeError
from predsearch.instgen.rng import PRNG_NAME, instance_rng
from predsearch.models.milp_model import MilpInstance, ObjSense, Row, Sense, VarKind

logger = logging.getLogger(__name__)


def draw_bids(items: int, bids: int, rng: np.random.Generator) -> tuple[list[list[int]], list[float]]:
    """Each item joins a bundle with probability 3/items (at least one item per bundle)."""
    p = min(1.0, 3.0 / items)
    bundles, prices = [], []
    for _ in range(bids):
        mask = rng.random(items) < p
        if not mask.any():
            mask[rng.integers(items)] = True
        bundle = np.flatnonzero(mask).tolist()
        price = len(bundle) * (1.0 + rng.uniform(-0.1, 0.1))
        bundles.append(bundle)
        prices.append(float(price))
    return bundles, prices


def auction_instance(items: int, bundles: list[list[int]], prices: list[float],
                     name: str = "combinatorial_auction", meta: dict | None = None) -> MilpInstance:
    """max sum price_j x_j s.t. each item is sold at most once; stored as minimization."""
    by_item: list[dict[int, float]] = [{} for _ in range(items)]
    for j, bundle in enumerate(bundles):
        for item in bundle:
            by_item[item][j] = 1.0
    n = len(bundles)
    return MilpInstance(
        name=name,
        objective=[-p for p in prices],
        sense_flag=ObjSense.MAX,
        rows=[Row(coeffs=coeffs, rhs=1.0, sense=Sense.LE) for coeffs in by_item],
        lower=[0.0] * n,
        upper=[1.0] * n,
        var_kind=[VarKind.BINARY] * n,
        var_names=[f"bid{j + 1}" for j in range(n)],
        row_names=[f"item{i + 1}" for i in range(items)],
        meta=meta or {},
    )


def gen_combinatorial_auction(items: int, bids: int, seed: int, index: int = 0) -> MilpInstance:
    if items < 1 or bids < 1:
        raise InvalidSizeError(f"items and bids must be >= 1, got items={items}, bids={bids}")
    rng = instance_rng(seed, index)
    bundles, prices = draw_bids(items, bids, rng)
    meta = {
        "family": "combinatorial_auction",
        "items": items,
        "bids": bids,
        "seed": seed,
        "index": index,
        "prng": PRNG_NAME,
        # simplified bundle/price scheme, not the full arbitrary-relationships generator
        "generator": "simplified_bundles",
    }
    inst = auction_instance(items, bundles, prices, name=f"combinatorial_auction_{index}", meta=meta)
    logger.debug(f"Generated CA instance {inst.name}: {items} items, {bids} bids")
    return inst
