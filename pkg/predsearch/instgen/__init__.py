import json
import logging
import os
from typing import List

from predsearch.instgen.auction import gen_combinatorial_auction
from predsearch.instgen.independent_set import gen_independent_set
from predsearch.instgen.rng import PRNG_NAME
from predsearch.milp.mps import write_mps_file
from predsearch.models.eval_model import Family, GenSpec
from predsearch.models.milp_model import MilpInstance

logger = logging.getLogger(__name__)


def generate_one(spec: GenSpec, index: int) -> MilpInstance:
    if spec.family == Family.INDEPENDENT_SET:
        return gen_independent_set(spec.nodes, spec.affinity, spec.seed, index)
    return gen_combinatorial_auction(spec.items, spec.bids, spec.seed, index)


def generate(spec: GenSpec) -> List[MilpInstance]:
    return [generate_one(spec, i) for i in range(spec.count)]


def write_instances(spec: GenSpec, out_dir: str) -> List[str]:
    """Writes `<family>_<index>.mps` files plus manifest.json; returns the file paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for i in range(spec.count):
        inst = generate_one(spec, i)
        path = os.path.join(out_dir, f"{spec.family.value}_{i}.mps")
        write_mps_file(inst, path)
        paths.append(path)
    manifest = {
        "spec": spec.model_dump(mode="json"),
        "prng": PRNG_NAME,
        "files": [os.path.basename(p) for p in paths],
        "stand_in_generator": spec.family == Family.COMBINATORIAL_AUCTION,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Generated {len(paths)} {spec.family.value} instances in {out_dir}")
    return paths
